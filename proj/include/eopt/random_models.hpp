#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "eopt/linalg.hpp"

namespace eopt {

/// Purpose tags separating the random streams used within one replicate.
enum class StreamPurpose : std::uint64_t {
  SignalStrengths = 1,
  SignalLeft = 2,
  SignalRight = 3,
  NoiseEntries = 4,
  NoiseLeftRotation = 5,
  NoiseRightRotation = 6,
  NoiseLeftProfile = 7,
  NoiseRightProfile = 8,
  Auxiliary = 9,
};

/// Identifies one replicate of an experiment; every random stream used by
/// the replicate is derived from (seed, index, purpose) alone, so results do
/// not depend on execution order or thread count.
struct ReplicateKey {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

/// Deterministic 64-bit stream seed from (seed, index, purpose) via SplitMix64 mixing.
std::uint64_t derive_stream_seed(const ReplicateKey& key, StreamPurpose purpose);

class RandomStream {
 public:
  RandomStream(const ReplicateKey& key, StreamPurpose purpose)
      : engine_(derive_stream_seed(key, purpose)) {}

  std::mt19937_64& engine() noexcept { return engine_; }
  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

enum class NoiseKind { Type1, Type2, Type3, Mix2, Unif1To10, Fisher3n, Custom };
enum class NoiseSide { AOnly, BOnly, Both };
enum class EntryDist { StudentT10, Gaussian };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);
std::string_view to_string(NoiseSide side);
NoiseSide parse_noise_side(std::string_view name);
std::string_view to_string(EntryDist dist);
EntryDist parse_entry_dist(std::string_view name);

/// Separable-covariance noise Z = A^{1/2} X B^{1/2}.
///
/// The profiles listed per kind are the eigenvalues of A and B; each is
/// rescaled to unit mean (trace equal to the dimension). `side` applies to
/// the single-ensemble kinds (Mix2, Unif1To10, Fisher3n); Type1..3 define both
/// sides. Custom uses `custom_a` / `custom_b`, whose lengths must match p, n.
struct NoiseModel {
  NoiseKind kind = NoiseKind::Type1;
  NoiseSide side = NoiseSide::AOnly;
  EntryDist entry_dist = EntryDist::StudentT10;
  std::vector<double> custom_a;
  std::vector<double> custom_b;
  /// Rotate the profiles by independent Haar matrices. Spectrum-only
  /// consumers may turn this off; a constant profile is never rotated.
  bool haar_rotations = true;
};

struct NoiseProfiles {
  std::vector<double> a;  // eigenvalues of A, unit mean
  std::vector<double> b;  // eigenvalues of B, unit mean
};

NoiseProfiles noise_profiles(std::size_t p, std::size_t n, const NoiseModel& model,
                             const ReplicateKey& key);

/// p x n i.i.d. entries with E X_ij = 0 and E X_ij^2 = 1/n.
Matrix generate_entries(std::size_t p, std::size_t n, EntryDist dist, RandomStream& stream);

/// Haar-distributed orthogonal matrix (QR of a standard Gaussian matrix).
Matrix haar_orthogonal(std::size_t m, RandomStream& stream);

Matrix generate_noise(std::size_t p, std::size_t n, const NoiseModel& model,
                      const ReplicateKey& key);

struct SignalModel {
  std::vector<double> d;  // descending, positive
};

struct SignalSample {
  Matrix s;
  Matrix u;
  Matrix v;
  std::vector<double> d;
};

/// S = sum_i d_i u_i v_i^T with U, V the Q factors of independent Gaussian matrices.
SignalSample generate_signal(std::size_t p, std::size_t n, const SignalModel& model,
                             const ReplicateKey& key);

/// r i.i.d. Unif[lo, hi] strengths sorted descending.
std::vector<double> sample_strengths(std::size_t r, double lo, double hi, const ReplicateKey& key);

struct AlphaEstimate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across replicates
  std::vector<double> values;
};

/// Detection threshold from one pure-noise spectrum: `eigs` are the p'
/// nonzero eigenvalues (descending) of Z^T Z, padded with n' - p' zeros.
double alpha_from_spectrum(std::span<const double> eigs, std::size_t n_prime);

/// Monte-Carlo detection threshold for a noise model at ratio beta_n = p'/n'.
AlphaEstimate estimate_alpha(const NoiseModel& model, double beta_n, std::size_t n_prime,
                             std::size_t replicates, std::uint64_t seed,
                             std::size_t threads = 1);

/// Number of strengths with d_i - alpha > n^{-2/5}.
std::size_t effective_rank_truth(std::span<const double> d, double alpha_hat, std::size_t n);

}  // namespace eopt
