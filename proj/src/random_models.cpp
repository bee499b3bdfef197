#include "eopt/random_models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "eopt/parallel.hpp"

namespace eopt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::vector<double> unit_mean(std::vector<double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (!(mean > 0.0)) throw std::invalid_argument("noise profile must have a positive mean");
  for (double& x : v) x /= mean;
  return v;
}

bool is_constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

// Eigenvalues of the single-ensemble kinds for dimension m.
std::vector<double> ensemble_profile(NoiseKind kind, std::size_t m, RandomStream& stream) {
  std::vector<double> out(m);
  switch (kind) {
    case NoiseKind::Mix2:
      for (std::size_t i = 0; i < m; ++i) out[i] = i < m / 2 ? 1.0 : 10.0;
      return out;
    case NoiseKind::Unif1To10:
      for (double& x : out) x = stream.uniform(1.0, 10.0);
      return out;
    case NoiseKind::Fisher3n: {
      const std::size_t rows = 3 * m;
      Matrix w(rows, m);
      const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = stream.normal() * scale;
      return gram_eigenvalues(w);
    }
    default:
      break;
  }
  throw std::invalid_argument("ensemble_profile: not a single-ensemble kind");
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RandomStream& stream) {
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = stream.normal();
  return g;
}

}  // namespace

std::uint64_t derive_stream_seed(const ReplicateKey& key, StreamPurpose purpose) {
  std::uint64_t h = splitmix64(key.seed);
  h = splitmix64(h ^ splitmix64(key.index + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(purpose) * 0x8cb92ba72f3d8dd7ULL));
  return h;
}

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Type1: return "type1";
    case NoiseKind::Type2: return "type2";
    case NoiseKind::Type3: return "type3";
    case NoiseKind::Mix2: return "mix2";
    case NoiseKind::Unif1To10: return "unif_1_10";
    case NoiseKind::Fisher3n: return "fisher3n";
    case NoiseKind::Custom: return "custom";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  const std::string s = lowercase(name);
  if (s == "type1") return NoiseKind::Type1;
  if (s == "type2") return NoiseKind::Type2;
  if (s == "type3") return NoiseKind::Type3;
  if (s == "mix2") return NoiseKind::Mix2;
  if (s == "unif_1_10" || s == "unif1to10" || s == "unif[1,10]") return NoiseKind::Unif1To10;
  if (s == "fisher3n") return NoiseKind::Fisher3n;
  if (s == "custom") return NoiseKind::Custom;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

std::string_view to_string(NoiseSide side) {
  switch (side) {
    case NoiseSide::AOnly: return "a_only";
    case NoiseSide::BOnly: return "b_only";
    case NoiseSide::Both: return "both";
  }
  return "unknown";
}

NoiseSide parse_noise_side(std::string_view name) {
  const std::string s = lowercase(name);
  if (s == "a_only" || s == "a") return NoiseSide::AOnly;
  if (s == "b_only" || s == "b") return NoiseSide::BOnly;
  if (s == "both") return NoiseSide::Both;
  throw std::invalid_argument("unknown noise side '" + std::string(name) + "'");
}

std::string_view to_string(EntryDist dist) {
  switch (dist) {
    case EntryDist::StudentT10: return "student_t10";
    case EntryDist::Gaussian: return "gaussian";
  }
  return "unknown";
}

EntryDist parse_entry_dist(std::string_view name) {
  const std::string s = lowercase(name);
  if (s == "student_t10" || s == "t10") return EntryDist::StudentT10;
  if (s == "gaussian" || s == "normal") return EntryDist::Gaussian;
  throw std::invalid_argument("unknown entry distribution '" + std::string(name) + "'");
}

NoiseProfiles noise_profiles(std::size_t p, std::size_t n, const NoiseModel& model,
                             const ReplicateKey& key) {
  if (p == 0 || n == 0) throw std::invalid_argument("noise_profiles: dimensions must be positive");
  NoiseProfiles prof;
  prof.a.assign(p, 1.0);
  prof.b.assign(n, 1.0);
  const double pd = static_cast<double>(p);
  const double nd = static_cast<double>(n);
  switch (model.kind) {
    case NoiseKind::Type1:
      break;
    case NoiseKind::Type2:
      for (std::size_t i = 1; i <= p; ++i) prof.a[i - 1] = std::sqrt(1.0 + 9.0 * i / pd);
      for (std::size_t i = 1; i <= n; ++i)
        prof.b[i - 1] = i <= n / 4 ? std::sqrt(10.0 + i / nd) : std::sqrt(0.3);
      break;
    case NoiseKind::Type3:
      // The listed values exp(i/p) and 1.1 + sin(4 pi i/n) are the
      // eigenvalues of A^{1/2} and B^{1/2}.
      for (std::size_t i = 1; i <= p; ++i) prof.a[i - 1] = std::exp(2.0 * i / pd);
      for (std::size_t i = 1; i <= n; ++i) {
        const double s = 1.1 + std::sin(4.0 * std::numbers::pi * i / nd);
        prof.b[i - 1] = s * s;
      }
      break;
    case NoiseKind::Mix2:
    case NoiseKind::Unif1To10:
    case NoiseKind::Fisher3n:
      if (model.side != NoiseSide::BOnly) {
        RandomStream stream(key, StreamPurpose::NoiseLeftProfile);
        prof.a = ensemble_profile(model.kind, p, stream);
      }
      if (model.side != NoiseSide::AOnly) {
        RandomStream stream(key, StreamPurpose::NoiseRightProfile);
        prof.b = ensemble_profile(model.kind, n, stream);
      }
      break;
    case NoiseKind::Custom:
      if (model.custom_a.size() != p || model.custom_b.size() != n)
        throw std::invalid_argument("custom noise profiles must have lengths p and n");
      prof.a = model.custom_a;
      prof.b = model.custom_b;
      for (double x : prof.a)
        if (!(x > 0.0)) throw std::invalid_argument("custom profile entries must be positive");
      for (double x : prof.b)
        if (!(x > 0.0)) throw std::invalid_argument("custom profile entries must be positive");
      break;
  }
  prof.a = unit_mean(std::move(prof.a));
  prof.b = unit_mean(std::move(prof.b));
  return prof;
}

Matrix generate_entries(std::size_t p, std::size_t n, EntryDist dist, RandomStream& stream) {
  Matrix x(p, n);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  if (dist == EntryDist::Gaussian) {
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = stream.normal() * inv_sqrt_n;
  } else {
    // Var of t(10) is 10/8 = 1.25.
    std::student_t_distribution<double> t10(10.0);
    const double scale = inv_sqrt_n / std::sqrt(1.25);
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = t10(stream.engine()) * scale;
  }
  return x;
}

Matrix haar_orthogonal(std::size_t m, RandomStream& stream) {
  return orthonormal_q(gaussian_matrix(m, m, stream));
}

Matrix generate_noise(std::size_t p, std::size_t n, const NoiseModel& model,
                      const ReplicateKey& key) {
  if (p == 0 || n == 0) throw std::invalid_argument("generate_noise: dimensions must be positive");
  const NoiseProfiles prof = noise_profiles(p, n, model, key);
  RandomStream entries(key, StreamPurpose::NoiseEntries);
  Matrix z = generate_entries(p, n, model.entry_dist, entries);

  Vector sqrt_a(p);
  for (std::size_t i = 0; i < p; ++i) sqrt_a(i) = std::sqrt(prof.a[i]);
  Vector sqrt_b(n);
  for (std::size_t i = 0; i < n; ++i) sqrt_b(i) = std::sqrt(prof.b[i]);

  if (!is_constant(prof.a)) {
    if (model.haar_rotations) {
      RandomStream rot(key, StreamPurpose::NoiseLeftRotation);
      const Matrix q = haar_orthogonal(p, rot);
      Matrix tmp = q.transpose() * z;
      tmp = sqrt_a.asDiagonal() * tmp;
      z.noalias() = q * tmp;
    } else {
      z = sqrt_a.asDiagonal() * z;
    }
  } else if (prof.a.front() != 1.0) {
    z *= sqrt_a(0);
  }

  if (!is_constant(prof.b)) {
    if (model.haar_rotations) {
      RandomStream rot(key, StreamPurpose::NoiseRightRotation);
      const Matrix q = haar_orthogonal(n, rot);
      Matrix tmp = z * q;
      tmp = tmp * sqrt_b.asDiagonal();
      z.noalias() = tmp * q.transpose();
    } else {
      z = z * sqrt_b.asDiagonal();
    }
  } else if (prof.b.front() != 1.0) {
    z *= sqrt_b(0);
  }
  return z;
}

SignalSample generate_signal(std::size_t p, std::size_t n, const SignalModel& model,
                             const ReplicateKey& key) {
  const std::size_t r = model.d.size();
  if (r > std::min(p, n))
    throw std::invalid_argument("generate_signal: rank exceeds min(p, n)");
  for (std::size_t i = 0; i < r; ++i) {
    if (!(model.d[i] > 0.0)) throw std::invalid_argument("signal strengths must be positive");
    if (i > 0 && model.d[i] > model.d[i - 1])
      throw std::invalid_argument("signal strengths must be sorted descending");
  }
  SignalSample out;
  out.d = model.d;
  RandomStream left(key, StreamPurpose::SignalLeft);
  RandomStream right(key, StreamPurpose::SignalRight);
  out.u = orthonormal_q(gaussian_matrix(p, r, left));
  out.v = orthonormal_q(gaussian_matrix(n, r, right));
  Vector d = Eigen::Map<const Vector>(model.d.data(), static_cast<Eigen::Index>(r));
  out.s = out.u * d.asDiagonal() * out.v.transpose();
  return out;
}

std::vector<double> sample_strengths(std::size_t r, double lo, double hi, const ReplicateKey& key) {
  if (!(hi > lo)) throw std::invalid_argument("sample_strengths: need hi > lo");
  RandomStream stream(key, StreamPurpose::SignalStrengths);
  std::vector<double> d(r);
  for (double& x : d) x = stream.uniform(lo, hi);
  std::sort(d.begin(), d.end(), std::greater<double>());
  return d;
}

double alpha_from_spectrum(std::span<const double> eigs, std::size_t n_prime) {
  const std::size_t p_prime = eigs.size();
  if (p_prime < 2 || n_prime < p_prime)
    throw std::invalid_argument("alpha_from_spectrum: need 2 <= p' <= n'");
  const double top = eigs[0];
  double sum = 0.0;
  for (std::size_t j = 1; j < p_prime; ++j) sum += 1.0 / (eigs[j] - top);
  const double zeros = static_cast<double>(n_prime - p_prime) * (-1.0 / top);
  const double m1 = sum / static_cast<double>(p_prime - 1);
  const double m2 = (sum + zeros) / static_cast<double>(n_prime - 1);
  const double t = top * m1 * m2;
  if (!(t > 0.0)) throw std::domain_error("alpha_from_spectrum: D-transform is not positive");
  return 1.0 / std::sqrt(t);
}

AlphaEstimate estimate_alpha(const NoiseModel& model, double beta_n, std::size_t n_prime,
                             std::size_t replicates, std::uint64_t seed, std::size_t threads) {
  if (!(beta_n > 0.0 && beta_n <= 1.0))
    throw std::invalid_argument("estimate_alpha: beta_n must lie in (0, 1]");
  if (n_prime < 500) throw std::invalid_argument("estimate_alpha: n' must be at least 500");
  if (replicates == 0) throw std::invalid_argument("estimate_alpha: need at least one replicate");
  const auto p_prime =
      static_cast<std::size_t>(std::llround(beta_n * static_cast<double>(n_prime)));

  AlphaEstimate out;
  out.values.assign(replicates, 0.0);
  parallel_for(replicates, threads, [&](std::size_t rep) {
    const Matrix z = generate_noise(p_prime, n_prime, model, ReplicateKey{seed, rep});
    const std::vector<double> eigs = gram_eigenvalues(z);
    out.values[rep] = alpha_from_spectrum(eigs, n_prime);
  });
  const double k = static_cast<double>(replicates);
  out.mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) / k;
  double ss = 0.0;
  for (double v : out.values) ss += (v - out.mean) * (v - out.mean);
  out.std = replicates > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
  return out;
}

std::size_t effective_rank_truth(std::span<const double> d, double alpha_hat, std::size_t n) {
  if (n == 0) throw std::invalid_argument("effective_rank_truth: n must be positive");
  const double margin = std::pow(static_cast<double>(n), -0.4);
  return static_cast<std::size_t>(
      std::count_if(d.begin(), d.end(), [&](double di) { return di - alpha_hat > margin; }));
}

}  // namespace eopt
