#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eopt/edge_rank.hpp"
#include "eopt/linalg.hpp"
#include "eopt/shrinkers.hpp"
#include "eopt/spectral_transforms.hpp"

namespace eopt {

enum class Method { EOpt, Trad };
enum class CdfVariant { E, T, Imp };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
std::string_view to_string(CdfVariant variant);
CdfVariant parse_cdf_variant(std::string_view name);

struct EOptOptions {
  LossKind loss = LossKind::Frobenius;
  CdfVariant cdf = CdfVariant::E;
  std::optional<double> c;                  // window exponent, default select_c(n)
  std::optional<std::size_t> k;             // window size, overrides c
  std::optional<std::size_t> forced_rank;   // replaces the r+ estimate
  std::optional<std::size_t> k_imp;         // imputation window for CdfVariant::Imp
};

/// Everything the shrinkage step derives from the eigenvalues alone.
struct SpectrumEstimate {
  EdgeRankEstimate edge_rank;
  std::vector<ComponentEstimate> components;
  std::vector<std::string> warnings;
};

/// Pseudo-spectrum selected by `variant` for a spectrum with the given edge/rank estimate.
PseudoSpectrum build_pseudo_spectrum(std::span<const double> lambdas,
                                     const EdgeRankEstimate& est, CdfVariant variant,
                                     std::size_t k_imp, double beta_n);

/// Steps (i)-(iii) on eigenvalues of S S^T (p <= n, descending): edge and
/// rank, pseudo-spectrum, per-outlier estimates and shrunken values.
SpectrumEstimate estimate_from_spectrum(std::span<const double> lambdas, std::size_t n,
                                        const EOptOptions& options);

struct DenoiseResult {
  Matrix s_hat;
  EdgeRankEstimate edge_rank;
  std::vector<ComponentEstimate> components;
  Method method = Method::EOpt;
  LossKind loss = LossKind::Frobenius;
  CdfVariant cdf_variant = CdfVariant::E;
  std::optional<double> sigma_hat;  // TRAD only
  std::vector<std::string> warnings;
};

/// Data-driven optimal shrinkage of a p x n matrix. Inputs with p > n are
/// transposed internally and the estimate is transposed back.
DenoiseResult eoptshrink(const Matrix& m, const EOptOptions& options);

/// Rank-r reconstruction sum_i phi_i xi_i zeta_i^T from an SVD.
Matrix reconstruct(const SpectralDecomposition& svd, std::span<const double> phi);

struct TradSpectrumEstimate {
  double sigma_hat = 0.0;
  double threshold = 0.0;  // singular-value detection threshold sigma_hat (1 + sqrt(beta))
  std::vector<TradEstimate> components;  // detected components, in order
};

/// TRAD on singular values alone (p <= n orientation, descending).
TradSpectrumEstimate trad_from_singular_values(std::span<const double> singular_values,
                                               std::size_t p, std::size_t n, LossKind loss);

/// White-noise closed-form shrinkage with the median-based noise level.
DenoiseResult trad_denoise(const Matrix& m, LossKind loss);

}  // namespace eopt
