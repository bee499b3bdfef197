#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace eopt {

/// A finite, descending list of nonnegative pseudo-eigenvalues standing in for
/// the noise eigenvalue distribution. The discrete measure puts mass
/// 1/denom on each value, so `denom` may exceed the number of stored values
/// (the remainder is mass that is never evaluated).
class PseudoSpectrum {
 public:
  PseudoSpectrum(std::vector<double> values, std::size_t denom, double beta_n);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t denom() const noexcept { return denom_; }
  double beta_n() const noexcept { return beta_n_; }

  /// Largest pseudo-eigenvalue, 0 when empty.
  double top() const noexcept { return values_.empty() ? 0.0 : values_.front(); }

 private:
  std::vector<double> values_;
  std::size_t denom_;
  double beta_n_;
};

/// Stieltjes pair, derivatives, and the D-transform at one real point.
struct DTransform {
  double x = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double m1_prime = 0.0;
  double m2_prime = 0.0;
  double t = 0.0;
  double t_prime = 0.0;
};

/// Per-outlier estimates derived from a pseudo-spectrum.
///
/// `a1_raw`/`a2_raw` are the unclamped cosine-squared estimates kept for
/// diagnostics; `a1_hat`/`a2_hat` are clamped to [0, 1] and feed the
/// shrinkers. `phi_hat` is filled in once a loss is chosen.
struct ComponentEstimate {
  double lambda_tilde = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double m1_prime = 0.0;
  double m2_prime = 0.0;
  double t_hat = 0.0;
  double t_hat_prime = 0.0;
  double d_hat = 0.0;
  double a1_raw = 0.0;
  double a2_raw = 0.0;
  double a1_hat = 0.0;
  double a2_hat = 0.0;
  double phi_hat = 0.0;
};

/// (1/denom) * sum_j 1/(value_j - x). Requires x above every value.
double stieltjes_at(const PseudoSpectrum& ps, double x);

/// (1/denom) * sum_j 1/(value_j - x)^2. Requires x above every value.
double stieltjes_deriv_at(const PseudoSpectrum& ps, double x);

/// Companion transform of the n-side spectrum: -(1 - beta_n)/x + beta_n * m1.
double companion_stieltjes(double m1, double x, double beta_n);

/// Derivative of the companion transform: (1 - beta_n)/x^2 + beta_n * m1'.
double companion_stieltjes_deriv(double m1_prime, double x, double beta_n);

/// D-transform x * m1(x) * m2(x) and its derivative, with the underlying
/// Stieltjes values.
DTransform d_transform_at(const PseudoSpectrum& ps, double x);

/// Signal strength and singular-vector alignment estimates for an observed
/// outlier eigenvalue. Throws std::domain_error when the D-transform is not
/// positive at `lambda_tilde`.
ComponentEstimate component_estimates(const PseudoSpectrum& ps, double lambda_tilde);

/// Location x above the pseudo-bulk with D-transform equal to `target`,
/// found by bisection on (top * (1 + 1e-6), upper]. The D-transform is
/// strictly decreasing there, so the root is unique when it exists;
/// std::nullopt when `target` lies outside the range spanned on the bracket.
std::optional<double> invert_d_transform(const PseudoSpectrum& ps, double target, double upper);

/// Predicted outlier eigenvalue for signal strength d: the point where the
/// D-transform equals 1/d^2.
std::optional<double> outlier_location(const PseudoSpectrum& ps, double d, double upper);

}  // namespace eopt
