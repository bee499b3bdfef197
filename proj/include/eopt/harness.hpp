#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eopt/linalg.hpp"
#include "eopt/pipeline.hpp"
#include "eopt/random_models.hpp"

namespace eopt {

/// Invalid experiment configuration or malformed input file.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { Rank, CdfCompare, Alpha, DenoiseBench };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Rank;
  NoiseModel noise;
  double beta_n = 1.0;
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::Frobenius;
  std::vector<int> rank_offsets{0};
  std::string output_path;
  std::size_t threads = 1;

  // Signal: r strengths drawn i.i.d. from Unif[0, strength_max].
  std::size_t signal_rank = 15;
  double strength_max = 4.0;

  // Detection threshold for the rank ground truth. When `alpha` is unset it
  // is (p/n)^{1/4} for Type1 and the Monte-Carlo estimate otherwise.
  std::optional<double> alpha;
  std::size_t alpha_n_prime = 4000;
  std::size_t alpha_replicates = 20;

  std::optional<double> c;            // window exponent for eOptShrink
  std::optional<std::size_t> cdf_k;   // CDF_COMPARE window, default 2 * signal_rank
};

void validate(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct ResultRow {
  std::size_t n = 0;
  std::size_t replicate = 0;
  std::string metric;
  double value = 0.0;

  bool operator==(const ResultRow& other) const;  // NaN values compare equal
};

struct ExperimentResult {
  std::vector<std::string> metrics;  // metric names per (n, replicate), in emission order
  std::vector<ResultRow> rows;       // sorted by (n-grid position, replicate, metric order)
  nlohmann::json metadata;
};

ExperimentResult run_rank_experiment(const ExperimentConfig& cfg);
ExperimentResult run_cdf_comparison(const ExperimentConfig& cfg);
ExperimentResult run_alpha_benchmark(const ExperimentConfig& cfg);
ExperimentResult run_denoise_bench(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Rows of one metric in row order.
std::vector<double> metric_values(const ExperimentResult& result, const std::string& metric,
                                  std::optional<std::size_t> n = std::nullopt);

/// Header "n,replicate,metric,value"; values with 17 significant digits.
void write_result_csv(std::ostream& out, const ExperimentResult& result);
std::vector<ResultRow> read_result_csv(std::istream& in);

/// Plain comma-separated matrix, one row per line, no header.
Matrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Matrix& m);

/// Denoising report with the fields consumed by downstream tooling.
nlohmann::json denoise_report(const DenoiseResult& result, std::optional<std::int64_t> seed);

/// Root-mean-square entrywise difference.
double rmse(const Matrix& a, const Matrix& b);

/// Library version string.
std::string version_string();

}  // namespace eopt
