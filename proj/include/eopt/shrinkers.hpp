#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace eopt {

enum class LossKind { Frobenius, Operator, Nuclear };

std::string_view to_string(LossKind loss);
/// Accepts "frobenius", "operator", "nuclear" (case-insensitive).
LossKind parse_loss(std::string_view name);

/// Optimal singular value for a component with strength d and squared
/// cosines a1 (left) and a2 (right), under the given loss.
double optimal_shrinker(double d_hat, double a1, double a2, LossKind loss);

/// CDF of the Marchenko-Pastur eigenvalue law with ratio beta in (0, 1]
/// and unit variance, support [(1-sqrt(beta))^2, (1+sqrt(beta))^2].
double mp_cdf(double x, double beta);

/// Median of the Marchenko-Pastur law, |mp_cdf(median) - 1/2| <= 1e-8.
double mp_median(double beta);

/// White-noise level from the median singular value.
///
/// Scale convention: the noise is sigma * X with X having i.i.d. entries of
/// variance 1/n, so the noise singular values fill [sigma(1-sqrt(beta)),
/// sigma(1+sqrt(beta))] and sigma_hat = s_med / sqrt(mu_beta). An even-length
/// list uses the mean of the two central order statistics.
double trad_sigma(std::span<const double> singular_values, std::size_t p, std::size_t n);

struct TradEstimate {
  double sigma_hat = 0.0;
  double ell = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double phi = 0.0;
  bool detected = false;
};

/// Closed-form white-noise shrinkage of one singular value (TRAD).
TradEstimate trad_estimate(double singular_value, double sigma, double beta, LossKind loss);

double trad_shrinker(double singular_value, double sigma, double beta, LossKind loss);

}  // namespace eopt
