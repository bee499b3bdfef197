// eoptshrink command-line front end.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "eopt/errors.hpp"
#include "eopt/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw eopt::ConfigError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw eopt::ConfigError("cannot write '" + path + "'");
  return out;
}

struct DenoiseArgs {
  std::string input;
  std::string loss = "frobenius";
  std::string method = "eopt";
  std::string cdf = "e";
  std::string output;
  std::string report;
  std::optional<double> c;
  std::optional<std::int64_t> seed;
};

int run_denoise(const DenoiseArgs& a) {
  std::ifstream in = open_input(a.input);
  const eopt::Matrix m = eopt::read_matrix_csv(in);
  if (!m.allFinite()) throw eopt::NumericalError("input matrix contains non-finite entries");

  const eopt::LossKind loss = eopt::parse_loss(a.loss);
  eopt::DenoiseResult res;
  if (eopt::parse_method(a.method) == eopt::Method::Trad) {
    res = eopt::trad_denoise(m, loss);
  } else {
    eopt::EOptOptions opts;
    opts.loss = loss;
    opts.cdf = eopt::parse_cdf_variant(a.cdf);
    opts.c = a.c;
    res = eopt::eoptshrink(m, opts);
  }
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';

  std::ofstream out = open_output(a.output);
  eopt::write_matrix_csv(out, res.s_hat);
  if (!a.report.empty()) {
    std::ofstream rep = open_output(a.report);
    rep << eopt::denoise_report(res, a.seed).dump(2) << '\n';
  }
  return 0;
}

int run_simulate(const std::string& experiment, const std::string& config_path,
                 const std::string& output_override) {
  std::ifstream in = open_input(config_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw eopt::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw eopt::ConfigError("config must be a JSON object");
  const eopt::ExperimentKind kind = eopt::parse_experiment_kind(experiment);
  if (j.contains("experiment")) {
    if (eopt::parse_experiment_kind(j.at("experiment").get<std::string>()) != kind)
      throw eopt::ConfigError("config experiment does not match the subcommand");
  } else {
    j["experiment"] = std::string(eopt::to_string(kind));
  }
  eopt::ExperimentConfig cfg = eopt::config_from_json(j);
  if (!output_override.empty()) cfg.output_path = output_override;

  const eopt::ExperimentResult result = eopt::run_experiment(cfg);
  if (cfg.output_path.empty()) {
    eopt::write_result_csv(std::cout, result);
  } else {
    std::ofstream out = open_output(cfg.output_path);
    eopt::write_result_csv(out, result);
    std::ofstream meta = open_output(cfg.output_path + ".meta.json");
    meta << result.metadata.dump(2) << '\n';
  }
  return 0;
}

int run_alpha(const std::string& noise, double ratio, std::size_t n_prime, std::size_t reps,
              std::uint64_t seed, std::size_t threads) {
  eopt::NoiseModel model;
  model.kind = eopt::parse_noise_kind(noise);
  const eopt::AlphaEstimate est =
      eopt::estimate_alpha(model, ratio, n_prime, reps, seed, threads);
  nlohmann::json j = {{"noise", eopt::to_string(model.kind)},
                      {"pn_ratio", ratio},
                      {"n_prime", n_prime},
                      {"replicates", reps},
                      {"seed", seed},
                      {"mean", est.mean},
                      {"std", est.std},
                      {"values", est.values}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  eopt::reexec_if_blas_broken(argv);
  CLI::App app{"Data-driven optimal singular value shrinkage"};
  app.set_version_flag("--version", eopt::version_string());
  app.require_subcommand(1);

  DenoiseArgs d;
  auto* denoise = app.add_subcommand("denoise", "Denoise a matrix stored as CSV");
  denoise->add_option("--input", d.input, "Input matrix CSV")->required();
  denoise->add_option("--loss", d.loss, "frobenius | operator | nuclear");
  denoise->add_option("--method", d.method, "eopt | trad");
  denoise->add_option("--cdf", d.cdf, "e | t | imp");
  denoise->add_option("--output", d.output, "Output matrix CSV")->required();
  denoise->add_option("--report", d.report, "JSON report path");
  denoise->add_option("--c", d.c, "Window exponent c in (0, 1)");
  denoise->add_option("--seed", d.seed, "Seed echoed in the report");

  std::string experiment;
  std::string config_path;
  std::string sim_output;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo experiment");
  simulate->add_option("experiment", experiment, "rank | cdf-compare | alpha | denoise-bench")
      ->required();
  simulate->add_option("--config", config_path, "Experiment config JSON")->required();
  simulate->add_option("--output", sim_output, "Result CSV, overrides output_path");

  std::string noise = "type2";
  double ratio = 1.0;
  std::size_t n_prime = 4000;
  std::size_t reps = 20;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  auto* alpha = app.add_subcommand("alpha", "Monte-Carlo detection threshold of a noise model");
  alpha->add_option("--noise", noise, "type1 | type2 | type3 | mix2 | unif_1_10 | fisher3n");
  alpha->add_option("--pn-ratio", ratio, "p'/n' in (0, 1]");
  alpha->add_option("--nprime", n_prime, "Noise matrix width n'");
  alpha->add_option("--reps", reps, "Replicates");
  alpha->add_option("--seed", seed, "Seed");
  alpha->add_option("--threads", threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*denoise) return run_denoise(d);
    if (*simulate) return run_simulate(experiment, config_path, sim_output);
    if (*alpha) return run_alpha(noise, ratio, n_prime, reps, seed, threads);
  } catch (const eopt::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
