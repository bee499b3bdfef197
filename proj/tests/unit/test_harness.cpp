#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "eopt/harness.hpp"

using nlohmann::json;

namespace {

eopt::ExperimentConfig small_rank_config() {
  eopt::ExperimentConfig cfg;
  cfg.experiment = eopt::ExperimentKind::Rank;
  cfg.noise.kind = eopt::NoiseKind::Type2;
  cfg.n_grid = {150, 200};
  cfg.replicates = 3;
  cfg.seed = 12;
  cfg.signal_rank = 5;
  cfg.alpha = 1.65;
  return cfg;
}

std::string csv_of(const eopt::ExperimentResult& r) {
  std::ostringstream out;
  eopt::write_result_csv(out, r);
  return out.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config validation") {
  eopt::ExperimentConfig cfg = small_rank_config();
  CHECK_NOTHROW(eopt::validate(cfg));
  cfg.replicates = 0;
  CHECK_THROWS_AS(eopt::validate(cfg), eopt::ConfigError);
  cfg = small_rank_config();
  cfg.n_grid.clear();
  CHECK_THROWS_AS(eopt::validate(cfg), eopt::ConfigError);
  cfg = small_rank_config();
  cfg.experiment = eopt::ExperimentKind::CdfCompare;
  cfg.rank_offsets = {0, 3};
  CHECK_THROWS_AS(eopt::validate(cfg), eopt::ConfigError);
  cfg = small_rank_config();
  cfg.beta_n = 1.2;
  CHECK_THROWS_AS(eopt::validate(cfg), eopt::ConfigError);
}

TEST_CASE("config json round trip") {
  const json j = json::parse(R"({
    "experiment": "cdf-compare", "noise": {"kind": "type3", "entry_dist": "gaussian"},
    "beta_n": 0.5, "n_grid": [300, 600], "replicates": 4, "seed": 9, "loss": "nuclear",
    "rank_offsets": [-2, 0, 2], "output_path": "x.csv", "signal_rank": 10, "alpha": 1.5,
    "cdf_k": 20})");
  const eopt::ExperimentConfig cfg = eopt::config_from_json(j);
  CHECK(cfg.experiment == eopt::ExperimentKind::CdfCompare);
  CHECK(cfg.noise.kind == eopt::NoiseKind::Type3);
  CHECK(cfg.noise.entry_dist == eopt::EntryDist::Gaussian);
  CHECK(cfg.loss == eopt::LossKind::Nuclear);
  CHECK(cfg.rank_offsets == std::vector<int>{-2, 0, 2});
  CHECK(cfg.cdf_k == std::optional<std::size_t>(20));
  const eopt::ExperimentConfig again = eopt::config_from_json(eopt::config_to_json(cfg));
  CHECK(eopt::config_to_json(again) == eopt::config_to_json(cfg));

  CHECK_THROWS_AS(eopt::config_from_json(json::parse(R"({"experiment": "rank"})")),
                  eopt::ConfigError);
  CHECK_THROWS_AS(eopt::config_from_json(json::parse(R"({"experiment": "nope", "n_grid": [300]})")),
                  eopt::ConfigError);
  CHECK_THROWS_AS(
      eopt::config_from_json(json::parse(R"({"experiment": "rank", "n_grid": "x"})")),
      eopt::ConfigError);
}

TEST_CASE("rank experiment row layout and determinism") {
  const eopt::ExperimentConfig cfg = small_rank_config();
  const eopt::ExperimentResult r = eopt::run_rank_experiment(cfg);
  CHECK(r.rows.size() == cfg.n_grid.size() * cfg.replicates * r.metrics.size());
  CHECK(r.rows.front().n == 150);
  CHECK(r.rows.back().n == 200);
  CHECK(r.rows.back().replicate == 2);
  for (const auto& row : r.rows)
    if (row.metric == "eopt_rank_error") CHECK(std::isfinite(row.value));
  CHECK(r.metadata.contains("wall_time_seconds"));
  CHECK(r.metadata["alpha"]["value"] == 1.65);
  CHECK(r.metadata.contains("version"));

  eopt::ExperimentConfig threaded = cfg;
  threaded.threads = 3;
  CHECK(csv_of(eopt::run_rank_experiment(threaded)) == csv_of(r));
  CHECK(csv_of(eopt::run_rank_experiment(cfg)) == csv_of(r));
  CHECK_THROWS_AS(eopt::run_cdf_comparison(cfg), eopt::ConfigError);
}

TEST_CASE("result csv round trip") {
  eopt::ExperimentResult r;
  r.metrics = {"a", "b"};
  r.rows = {{300, 0, "a", 0.1}, {300, 0, "b", std::numeric_limits<double>::quiet_NaN()},
            {300, 1, "a", -1e-300}, {300, 1, "b", 1.0 / 3.0}};
  std::istringstream in(csv_of(r));
  const std::vector<eopt::ResultRow> back = eopt::read_result_csv(in);
  CHECK(back == r.rows);
  std::istringstream bad("n,replicate,metric,value\n1,2,3\n");
  CHECK_THROWS_AS(eopt::read_result_csv(bad), eopt::ConfigError);
}

TEST_CASE("cdf comparison with rank offsets") {
  eopt::ExperimentConfig cfg;
  cfg.experiment = eopt::ExperimentKind::CdfCompare;
  cfg.noise.kind = eopt::NoiseKind::Type2;
  cfg.n_grid = {300};
  cfg.replicates = 2;
  cfg.seed = 5;
  cfg.signal_rank = 6;
  cfg.alpha = 1.65;
  cfg.strength_max = 6.0;
  cfg.rank_offsets = {-2, -1, 0, 1, 2};
  const eopt::ExperimentResult r = eopt::run_cdf_comparison(cfg);
  CHECK(r.metrics.size() == 5 * 2 * 2 * 3);
  CHECK(r.rows.size() == 2 * r.metrics.size());
  CHECK(r.metadata["window_k"] == 12);
  for (int off : {-2, 2}) {
    const std::string tag = off > 0 ? "+2" : "-2";
    for (const char* v : {"e", "t", "imp"}) {
      const std::vector<double> vals =
          eopt::metric_values(r, std::string("d_ratio_") + v + "_off" + tag);
      REQUIRE(vals.size() == 2);
      for (double x : vals) CHECK(std::isfinite(x));
    }
  }
}

TEST_CASE("alpha benchmark emits one value per replicate") {
  eopt::ExperimentConfig cfg;
  cfg.experiment = eopt::ExperimentKind::Alpha;
  cfg.noise.kind = eopt::NoiseKind::Type1;
  cfg.beta_n = 0.5;
  cfg.n_grid = {600};
  cfg.replicates = 3;
  const eopt::ExperimentResult r = eopt::run_alpha_benchmark(cfg);
  CHECK(r.rows.size() == 3);
  CHECK(r.metadata["alpha_summary"][0]["mean"].get<double>() ==
        doctest::Approx(std::pow(0.5, 0.25)).epsilon(0.05));
  cfg.n_grid = {400};
  CHECK_THROWS_AS(eopt::run_alpha_benchmark(cfg), eopt::ConfigError);
}

TEST_CASE("denoise bench shares one SVD across methods") {
  eopt::ExperimentConfig cfg;
  cfg.experiment = eopt::ExperimentKind::DenoiseBench;
  cfg.noise.kind = eopt::NoiseKind::Type1;
  cfg.n_grid = {200};
  cfg.replicates = 2;
  cfg.signal_rank = 3;
  cfg.strength_max = 5.0;
  const eopt::ExperimentResult r = eopt::run_denoise_bench(cfg);
  CHECK(r.rows.size() == 2 * r.metrics.size());
  for (double x : eopt::metric_values(r, "frob_loss_eopt")) CHECK(std::isfinite(x));
}

TEST_CASE("denoise bench and rank experiment see the same observations") {
  eopt::ExperimentConfig cfg = small_rank_config();
  const eopt::ExperimentResult rank = eopt::run_rank_experiment(cfg);
  cfg.experiment = eopt::ExperimentKind::DenoiseBench;
  const eopt::ExperimentResult bench = eopt::run_denoise_bench(cfg);
  for (const char* m : {"r_plus_truth", "eopt_rank_error", "trad_rank_error"})
    CHECK(eopt::metric_values(rank, m) == eopt::metric_values(bench, m));
}

TEST_CASE("matrix csv round trip at full precision") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  eopt::Matrix m(4, 3);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng) * 1e-7;
  std::stringstream io;
  eopt::write_matrix_csv(io, m);
  CHECK(eopt::read_matrix_csv(io) == m);

  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(eopt::read_matrix_csv(ragged), eopt::ConfigError);
  std::istringstream text("1,abc\n");
  CHECK_THROWS_AS(eopt::read_matrix_csv(text), eopt::ConfigError);
  std::istringstream empty("");
  CHECK_THROWS_AS(eopt::read_matrix_csv(empty), eopt::ConfigError);
  std::istringstream crlf("1,2\r\n3,4\r\n");
  CHECK(eopt::read_matrix_csv(crlf)(1, 0) == 3.0);
}

TEST_CASE("rmse") {
  const eopt::Matrix a = eopt::Matrix::Random(5, 7);
  CHECK(eopt::rmse(a, a) == 0.0);
  const eopt::Matrix b = a.array() - 2.0;
  CHECK(eopt::rmse(a, b) == doctest::Approx(2.0));
  const eopt::Matrix c = eopt::Matrix::Random(5, 7);
  double ss = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 7; ++j) ss += (a(i, j) - c(i, j)) * (a(i, j) - c(i, j));
  CHECK(eopt::rmse(a, c) == doctest::Approx(std::sqrt(ss / 35.0)));
  CHECK_THROWS_AS(eopt::rmse(a, eopt::Matrix::Zero(5, 6)), std::invalid_argument);
}

TEST_CASE("denoise report fields") {
  eopt::DenoiseResult res;
  res.edge_rank.lambda_plus_hat = 4.1;
  res.edge_rank.r_plus_hat = 1;
  res.edge_rank.k = 20;
  res.edge_rank.c = 0.49;
  eopt::ComponentEstimate c;
  c.lambda_tilde = 9.0;
  c.d_hat = 2.5;
  c.a1_hat = 0.8;
  c.a2_hat = 0.7;
  c.phi_hat = 1.9;
  res.components = {c};
  res.warnings = {"w"};
  const json j = eopt::denoise_report(res, 42);
  for (const char* key : {"lambda_plus_hat", "r_plus_hat", "c", "k", "components", "warnings",
                          "method", "loss", "cdf_variant", "seed"})
    CHECK(j.contains(key));
  CHECK(j["components"][0]["phi_hat"] == 1.9);
  CHECK(j["seed"] == 42);
  CHECK(j["method"] == "eopt");
  res.method = eopt::Method::Trad;
  res.sigma_hat = 1.01;
  const json t = eopt::denoise_report(res, std::nullopt);
  CHECK(t["seed"].is_null());
  CHECK(t["sigma_hat"] == 1.01);
}

}  // TEST_SUITE
