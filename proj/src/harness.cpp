#include "eopt/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "eopt/parallel.hpp"

#ifndef EOPT_VERSION
#define EOPT_VERSION "0.0.0-dev"
#endif

namespace eopt {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view token) {
  std::string s(token);
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  if (s.empty()) throw ConfigError("empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ConfigError("malformed number '" + s + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::size_t rows_for(const ExperimentConfig& cfg, std::size_t n) {
  return static_cast<std::size_t>(std::llround(cfg.beta_n * static_cast<double>(n)));
}

ReplicateKey key_for(const ExperimentConfig& cfg, std::size_t n, std::size_t rep) {
  return ReplicateKey{derive_stream_seed(ReplicateKey{cfg.seed, n}, StreamPurpose::Auxiliary),
                      rep};
}

struct Observation {
  SignalSample signal;
  Matrix noisy;
};

Observation simulate(const ExperimentConfig& cfg, std::size_t n, std::size_t rep) {
  const std::size_t p = rows_for(cfg, n);
  const ReplicateKey key = key_for(cfg, n, rep);
  Observation obs;
  SignalModel sm;
  sm.d = sample_strengths(cfg.signal_rank, 0.0, cfg.strength_max, key);
  obs.signal = generate_signal(p, n, sm, key);
  obs.noisy = obs.signal.s + generate_noise(p, n, cfg.noise, key);
  return obs;
}

// Detection threshold used for the rank ground truth, with its provenance.
double resolve_alpha(const ExperimentConfig& cfg, json& meta) {
  if (cfg.alpha) {
    meta["alpha"] = {{"value", *cfg.alpha}, {"source", "config"}};
    return *cfg.alpha;
  }
  if (cfg.noise.kind == NoiseKind::Type1) {
    const double a = std::pow(cfg.beta_n, 0.25);
    meta["alpha"] = {{"value", a}, {"source", "closed form (p/n)^(1/4)"}};
    return a;
  }
  NoiseModel model = cfg.noise;
  model.haar_rotations = false;
  const AlphaEstimate est = estimate_alpha(model, cfg.beta_n, cfg.alpha_n_prime,
                                           cfg.alpha_replicates, cfg.seed, cfg.threads);
  meta["alpha"] = {{"value", est.mean},
                   {"std", est.std},
                   {"n_prime", cfg.alpha_n_prime},
                   {"replicates", cfg.alpha_replicates},
                   {"source", "monte carlo"}};
  return est.mean;
}

// Evaluates fn(n, rep) -> metric values over the whole grid and lays the
// rows out in grid order.
template <class Fn>
ExperimentResult run_grid(const ExperimentConfig& cfg, std::vector<std::string> metrics,
                          json meta, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t cells = cfg.n_grid.size() * cfg.replicates;
  std::vector<std::vector<double>> values(cells);
  parallel_for(cells, cfg.threads, [&](std::size_t cell) {
    const std::size_t n = cfg.n_grid[cell / cfg.replicates];
    const std::size_t rep = cell % cfg.replicates;
    std::vector<double> v = fn(n, rep);
    if (v.size() != metrics.size())
      throw std::logic_error("experiment produced a wrong number of metrics");
    values[cell] = std::move(v);
  });

  ExperimentResult result;
  result.metrics = std::move(metrics);
  result.rows.reserve(cells * result.metrics.size());
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const std::size_t n = cfg.n_grid[cell / cfg.replicates];
    const std::size_t rep = cell % cfg.replicates;
    for (std::size_t m = 0; m < result.metrics.size(); ++m)
      result.rows.push_back(ResultRow{n, rep, result.metrics[m], values[cell][m]});
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  meta["config"] = config_to_json(cfg);
  meta["version"] = version_string();
  meta["wall_time_seconds"] = elapsed;
  meta["metrics"] = result.metrics;
  result.metadata = std::move(meta);
  return result;
}

std::string offset_label(int offset) {
  return offset >= 0 ? "+" + std::to_string(offset) : std::to_string(offset);
}

json noise_to_json(const NoiseModel& m) {
  json j = {{"kind", to_string(m.kind)},
            {"side", to_string(m.side)},
            {"entry_dist", to_string(m.entry_dist)},
            {"haar_rotations", m.haar_rotations}};
  if (m.kind == NoiseKind::Custom) {
    j["custom_a"] = m.custom_a;
    j["custom_b"] = m.custom_b;
  }
  return j;
}

NoiseModel noise_from_json(const json& j) {
  NoiseModel m;
  if (j.is_string()) {
    m.kind = parse_noise_kind(j.get<std::string>());
    return m;
  }
  if (!j.is_object()) throw ConfigError("noise must be a string or an object");
  m.kind = parse_noise_kind(j.at("kind").get<std::string>());
  if (j.contains("side")) m.side = parse_noise_side(j.at("side").get<std::string>());
  if (j.contains("entry_dist"))
    m.entry_dist = parse_entry_dist(j.at("entry_dist").get<std::string>());
  if (j.contains("haar_rotations")) m.haar_rotations = j.at("haar_rotations").get<bool>();
  if (j.contains("custom_a")) m.custom_a = j.at("custom_a").get<std::vector<double>>();
  if (j.contains("custom_b")) m.custom_b = j.at("custom_b").get<std::vector<double>>();
  return m;
}

}  // namespace

std::string version_string() { return "eoptshrink " EOPT_VERSION; }

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Rank: return "rank";
    case ExperimentKind::CdfCompare: return "cdf-compare";
    case ExperimentKind::Alpha: return "alpha";
    case ExperimentKind::DenoiseBench: return "denoise-bench";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  std::string s = lowercase(name);
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "rank") return ExperimentKind::Rank;
  if (s == "cdf-compare") return ExperimentKind::CdfCompare;
  if (s == "alpha") return ExperimentKind::Alpha;
  if (s == "denoise-bench") return ExperimentKind::DenoiseBench;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  if (cfg.n_grid.empty()) throw ConfigError("n_grid must not be empty");
  if (!(cfg.beta_n > 0.0 && cfg.beta_n <= 1.0)) throw ConfigError("beta_n must lie in (0, 1]");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  for (std::size_t n : cfg.n_grid) {
    const std::size_t p = rows_for(cfg, n);
    if (cfg.experiment == ExperimentKind::Alpha) {
      if (n < 500) throw ConfigError("alpha experiments need n' >= 500");
    } else if (p < 3 || p < 2 * cfg.signal_rank + 1) {
      throw ConfigError("n = " + std::to_string(n) + " gives too few rows for the signal rank");
    }
  }
  if (cfg.experiment != ExperimentKind::Alpha) {
    if (cfg.signal_rank < 1) throw ConfigError("signal_rank must be at least 1");
    if (!(cfg.strength_max > 0.0)) throw ConfigError("strength_max must be positive");
    if (!cfg.alpha && cfg.noise.kind != NoiseKind::Type1 && cfg.alpha_n_prime < 500)
      throw ConfigError("alpha_n_prime must be at least 500");
  }
  if (cfg.experiment == ExperimentKind::CdfCompare) {
    if (cfg.rank_offsets.empty()) throw ConfigError("rank_offsets must not be empty");
    for (int o : cfg.rank_offsets)
      if (o < -2 || o > 2) throw ConfigError("rank offsets must lie in [-2, 2]");
  }
  if (cfg.c && !(*cfg.c > 0.0 && *cfg.c < 1.0)) throw ConfigError("c must lie in (0, 1)");
  if (cfg.alpha && !(*cfg.alpha > 0.0)) throw ConfigError("alpha must be positive");
}

ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig cfg;
    cfg.experiment = parse_experiment_kind(j.at("experiment").get<std::string>());
    if (j.contains("noise")) cfg.noise = noise_from_json(j.at("noise"));
    if (j.contains("beta_n")) cfg.beta_n = j.at("beta_n").get<double>();
    cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("loss")) cfg.loss = parse_loss(j.at("loss").get<std::string>());
    if (j.contains("rank_offsets")) cfg.rank_offsets = j.at("rank_offsets").get<std::vector<int>>();
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<std::size_t>();
    if (j.contains("signal_rank")) cfg.signal_rank = j.at("signal_rank").get<std::size_t>();
    if (j.contains("strength_max")) cfg.strength_max = j.at("strength_max").get<double>();
    if (j.contains("alpha") && !j.at("alpha").is_null()) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("alpha_n_prime")) cfg.alpha_n_prime = j.at("alpha_n_prime").get<std::size_t>();
    if (j.contains("alpha_replicates"))
      cfg.alpha_replicates = j.at("alpha_replicates").get<std::size_t>();
    if (j.contains("c") && !j.at("c").is_null()) cfg.c = j.at("c").get<double>();
    if (j.contains("cdf_k") && !j.at("cdf_k").is_null()) cfg.cdf_k = j.at("cdf_k").get<std::size_t>();
    validate(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& cfg) {
  json j = {{"experiment", to_string(cfg.experiment)},
            {"noise", noise_to_json(cfg.noise)},
            {"beta_n", cfg.beta_n},
            {"n_grid", cfg.n_grid},
            {"replicates", cfg.replicates},
            {"seed", cfg.seed},
            {"loss", to_string(cfg.loss)},
            {"rank_offsets", cfg.rank_offsets},
            {"output_path", cfg.output_path},
            {"signal_rank", cfg.signal_rank},
            {"strength_max", cfg.strength_max},
            {"alpha_n_prime", cfg.alpha_n_prime},
            {"alpha_replicates", cfg.alpha_replicates}};
  j["alpha"] = cfg.alpha ? json(*cfg.alpha) : json(nullptr);
  j["c"] = cfg.c ? json(*cfg.c) : json(nullptr);
  j["cdf_k"] = cfg.cdf_k ? json(*cfg.cdf_k) : json(nullptr);
  // threads is deliberately not echoed: outputs must not depend on it.
  return j;
}

bool ResultRow::operator==(const ResultRow& other) const {
  const bool same_value =
      (std::isnan(value) && std::isnan(other.value)) || value == other.value;
  return n == other.n && replicate == other.replicate && metric == other.metric && same_value;
}

ExperimentResult run_rank_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::Rank) throw ConfigError("expected a rank experiment");
  validate(cfg);
  json meta;
  const double alpha = resolve_alpha(cfg, meta);
  std::vector<std::string> metrics = {"r_plus_truth", "eopt_r_plus_hat", "eopt_rank_error",
                                      "trad_rank", "trad_rank_error"};
  return run_grid(cfg, metrics, meta, [&](std::size_t n, std::size_t rep) {
    const Observation obs = simulate(cfg, n, rep);
    const std::size_t p = static_cast<std::size_t>(obs.noisy.rows());
    const std::vector<double> lambdas = gram_eigenvalues(obs.noisy);
    std::vector<std::string> warnings;
    EdgeRankOptions opts;
    opts.c = cfg.c;
    const EdgeRankEstimate est = estimate_edge_rank(lambdas, n, opts, warnings);

    std::vector<double> s(lambdas.size());
    std::transform(lambdas.begin(), lambdas.end(), s.begin(), [](double l) { return std::sqrt(l); });
    const double sigma = trad_sigma(s, p, n);
    const double thr = sigma * (1.0 + std::sqrt(static_cast<double>(p) / static_cast<double>(n)));
    const auto trad_rank = static_cast<double>(
        std::count_if(s.begin(), s.end(), [&](double x) { return x > thr; }));

    const auto truth = static_cast<double>(effective_rank_truth(obs.signal.d, alpha, n));
    const auto rhat = static_cast<double>(est.r_plus_hat);
    return std::vector<double>{truth, rhat, rhat - truth, trad_rank, trad_rank - truth};
  });
}

ExperimentResult run_cdf_comparison(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::CdfCompare)
    throw ConfigError("expected a cdf-compare experiment");
  validate(cfg);
  json meta;
  const double alpha = resolve_alpha(cfg, meta);
  const std::size_t k = cfg.cdf_k ? *cfg.cdf_k : 2 * cfg.signal_rank;
  meta["window_k"] = k;
  meta["error_ratio"] = "|estimate - truth| / |truth|";
  meta["error_abs"] = "|estimate - truth|";

  const std::vector<CdfVariant> variants = {CdfVariant::E, CdfVariant::T, CdfVariant::Imp};
  std::vector<std::string> metrics;
  for (int off : cfg.rank_offsets)
    for (const char* q : {"d", "sqrt_a1a2"})
      for (const char* kind : {"ratio", "abs"})
        for (CdfVariant v : variants)
          metrics.push_back(std::string(q) + "_" + kind + "_" + std::string(to_string(v)) +
                            "_off" + offset_label(off));

  return run_grid(cfg, metrics, meta, [&](std::size_t n, std::size_t rep) {
    const Observation obs = simulate(cfg, n, rep);
    const std::size_t p = static_cast<std::size_t>(obs.noisy.rows());
    const double beta = static_cast<double>(p) / static_cast<double>(n);
    const SpectralDecomposition svd = full_svd(obs.noisy);
    std::vector<double> lambdas(p);
    for (std::size_t i = 0; i < p; ++i) {
      const double s = svd.singular_values(static_cast<Eigen::Index>(i));
      lambdas[i] = s * s;
    }
    const std::size_t r_plus = effective_rank_truth(obs.signal.d, alpha, n);

    std::vector<double> out;
    out.reserve(metrics.size());
    for (int off : cfg.rank_offsets) {
      const long forced = static_cast<long>(r_plus) + off;
      const bool usable = r_plus > 0 && forced >= 1 &&
                          static_cast<std::size_t>(forced) + 2 * k + 1 <= p;
      std::vector<double> d_est(variants.size(), kNaN);
      std::vector<double> a_est(variants.size(), kNaN);
      double d_true = kNaN;
      double a_true = kNaN;
      if (usable) {
        const std::size_t idx = std::min(r_plus, static_cast<std::size_t>(forced)) - 1;
        const auto col = static_cast<Eigen::Index>(idx);
        d_true = obs.signal.d[idx];
        const double cu = obs.signal.u.col(col).dot(svd.left_vectors.col(col));
        const double cv = obs.signal.v.col(col).dot(svd.right_vectors.col(col));
        a_true = std::abs(cu * cv);

        std::vector<std::string> warnings;
        EdgeRankOptions opts;
        opts.k = k;
        opts.forced_rank = static_cast<std::size_t>(forced);
        const EdgeRankEstimate est = estimate_edge_rank(lambdas, n, opts, warnings);
        for (std::size_t v = 0; v < variants.size(); ++v) {
          try {
            const PseudoSpectrum ps = build_pseudo_spectrum(lambdas, est, variants[v], k, beta);
            const ComponentEstimate ce = component_estimates(ps, lambdas[idx]);
            d_est[v] = ce.d_hat;
            a_est[v] = std::sqrt(ce.a1_hat * ce.a2_hat);
          } catch (const std::domain_error&) {
            // left as NaN: the estimate is undefined for this pseudo-spectrum
          }
        }
      }
      for (int q = 0; q < 2; ++q) {
        const double truth = q == 0 ? d_true : a_true;
        const std::vector<double>& est = q == 0 ? d_est : a_est;
        for (std::size_t v = 0; v < variants.size(); ++v)
          out.push_back(std::abs(est[v] - truth) / std::abs(truth));
        for (std::size_t v = 0; v < variants.size(); ++v) out.push_back(std::abs(est[v] - truth));
      }
    }
    return out;
  });
}

ExperimentResult run_alpha_benchmark(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::Alpha) throw ConfigError("expected an alpha experiment");
  validate(cfg);
  json meta;
  NoiseModel model = cfg.noise;
  ExperimentResult result =
      run_grid(cfg, {"alpha_hat"}, meta, [&](std::size_t n_prime, std::size_t rep) {
        const std::size_t p_prime = rows_for(cfg, n_prime);
        const Matrix z = generate_noise(p_prime, n_prime, model, key_for(cfg, n_prime, rep));
        const std::vector<double> eigs = gram_eigenvalues(z);
        return std::vector<double>{alpha_from_spectrum(eigs, n_prime)};
      });
  json summary = json::array();
  for (std::size_t n_prime : cfg.n_grid) {
    const std::vector<double> v = metric_values(result, "alpha_hat", n_prime);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    summary.push_back({{"n_prime", n_prime},
                       {"noise", to_string(cfg.noise.kind)},
                       {"beta_n", cfg.beta_n},
                       {"mean", mean},
                       {"std", sd}});
  }
  result.metadata["alpha_summary"] = summary;
  return result;
}

ExperimentResult run_denoise_bench(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::DenoiseBench)
    throw ConfigError("expected a denoise-bench experiment");
  validate(cfg);
  json meta;
  const double alpha = resolve_alpha(cfg, meta);
  std::vector<std::string> metrics = {"r_plus_truth",   "r_plus_hat",      "eopt_rank_error",
                                      "trad_rank_error", "frob_loss_eopt", "frob_loss_trunc",
                                      "frob_loss_trad",  "rmse_eopt",      "rmse_trad"};
  return run_grid(cfg, metrics, meta, [&](std::size_t n, std::size_t rep) {
    const Observation obs = simulate(cfg, n, rep);
    const std::size_t p = static_cast<std::size_t>(obs.noisy.rows());
    const SpectralDecomposition svd = full_svd(obs.noisy);
    std::vector<double> s(svd.singular_values.data(),
                          svd.singular_values.data() + svd.singular_values.size());
    std::vector<double> lambdas(s.size());
    std::transform(s.begin(), s.end(), lambdas.begin(), [](double x) { return x * x; });

    EOptOptions opts;
    opts.loss = cfg.loss;
    opts.c = cfg.c;
    const SpectrumEstimate est = estimate_from_spectrum(lambdas, n, opts);
    std::vector<double> phi;
    for (const auto& c : est.components) phi.push_back(c.phi_hat);
    const Matrix s_eopt = reconstruct(svd, phi);
    const std::vector<double> hard(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(phi.size()));
    const Matrix s_trunc = reconstruct(svd, hard);

    const TradSpectrumEstimate trad = trad_from_singular_values(s, p, n, cfg.loss);
    std::vector<double> phi_trad;
    for (const auto& t : trad.components) phi_trad.push_back(t.phi);
    const Matrix s_trad = reconstruct(svd, phi_trad);

    const auto truth = static_cast<double>(effective_rank_truth(obs.signal.d, alpha, n));
    const auto rhat = static_cast<double>(est.edge_rank.r_plus_hat);
    const double trad_rank = std::count_if(s.begin(), s.end(), [&](double x) {
      return x > trad.threshold;
    });
    return std::vector<double>{truth,
                               rhat,
                               rhat - truth,
                               trad_rank - truth,
                               (s_eopt - obs.signal.s).norm(),
                               (s_trunc - obs.signal.s).norm(),
                               (s_trad - obs.signal.s).norm(),
                               rmse(s_eopt, obs.signal.s),
                               rmse(s_trad, obs.signal.s)};
  });
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::Rank: return run_rank_experiment(cfg);
    case ExperimentKind::CdfCompare: return run_cdf_comparison(cfg);
    case ExperimentKind::Alpha: return run_alpha_benchmark(cfg);
    case ExperimentKind::DenoiseBench: return run_denoise_bench(cfg);
  }
  throw ConfigError("unknown experiment");
}

std::vector<double> metric_values(const ExperimentResult& result, const std::string& metric,
                                  std::optional<std::size_t> n) {
  std::vector<double> out;
  for (const auto& row : result.rows)
    if (row.metric == metric && (!n || row.n == *n)) out.push_back(row.value);
  return out;
}

void write_result_csv(std::ostream& out, const ExperimentResult& result) {
  out << "n,replicate,metric,value\n";
  for (const auto& row : result.rows)
    out << row.n << ',' << row.replicate << ',' << row.metric << ',' << format_double(row.value)
        << '\n';
}

std::vector<ResultRow> read_result_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,replicate,metric,value", 0) != 0)
    throw ConfigError("result CSV: missing header");
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4) throw ConfigError("result CSV: expected 4 fields");
    ResultRow row;
    row.n = static_cast<std::size_t>(parse_double(fields[0]));
    row.replicate = static_cast<std::size_t>(parse_double(fields[1]));
    row.metric = std::string(fields[2]);
    row.value = parse_double(fields[3]);
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    for (std::string_view field : split(line, ',')) {
      try {
        row.push_back(parse_double(field));
      } catch (const ConfigError& e) {
        throw ConfigError("matrix CSV line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("matrix CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(rows.front().size()) + " columns, got " +
                        std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("matrix CSV: no data");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

json denoise_report(const DenoiseResult& result, std::optional<std::int64_t> seed) {
  json comps = json::array();
  for (const auto& c : result.components)
    comps.push_back({{"lambda_tilde", c.lambda_tilde},
                     {"d_hat", c.d_hat},
                     {"a1_hat", c.a1_hat},
                     {"a2_hat", c.a2_hat},
                     {"phi_hat", c.phi_hat}});
  json j;
  j["lambda_plus_hat"] = result.edge_rank.lambda_plus_hat;
  j["r_plus_hat"] = result.edge_rank.r_plus_hat;
  if (result.method == Method::EOpt) {
    j["c"] = result.edge_rank.c;
    j["k"] = result.edge_rank.k;
    j["cdf_variant"] = to_string(result.cdf_variant);
  } else {
    j["c"] = nullptr;
    j["k"] = nullptr;
    j["cdf_variant"] = nullptr;
    j["sigma_hat"] = result.sigma_hat ? json(*result.sigma_hat) : json(nullptr);
  }
  j["components"] = comps;
  j["warnings"] = result.warnings;
  j["method"] = to_string(result.method);
  j["loss"] = to_string(result.loss);
  j["seed"] = seed ? json(*seed) : json(nullptr);
  return j;
}

double rmse(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("rmse: shape mismatch");
  if (a.size() == 0) throw std::invalid_argument("rmse: empty matrices");
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

}  // namespace eopt
