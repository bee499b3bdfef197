#include "eopt/spectral_transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace eopt {

PseudoSpectrum::PseudoSpectrum(std::vector<double> values, std::size_t denom, double beta_n)
    : values_(std::move(values)), denom_(denom), beta_n_(beta_n) {
  if (denom_ == 0) throw std::invalid_argument("PseudoSpectrum: denom must be positive");
  if (!(beta_n_ > 0.0) || !std::isfinite(beta_n_))
    throw std::invalid_argument("PseudoSpectrum: beta_n must be a positive finite number");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i]))
      throw std::invalid_argument("PseudoSpectrum: values must be finite and nonnegative");
    if (i > 0 && values_[i] > values_[i - 1])
      throw std::invalid_argument("PseudoSpectrum: values must be sorted non-increasing");
  }
}

namespace {

void require_above_bulk(const PseudoSpectrum& ps, double x) {
  if (!std::isfinite(x)) throw std::domain_error("evaluation point is not finite");
  if (ps.size() > 0 && !(x > ps.top()))
    throw std::domain_error("evaluation point " + std::to_string(x) +
                            " is not above the pseudo-spectrum (top " +
                            std::to_string(ps.top()) + ")");
}

void require_positive(double x) {
  if (!(x > 0.0)) throw std::domain_error("companion transform needs x > 0");
}

}  // namespace

double stieltjes_at(const PseudoSpectrum& ps, double x) {
  require_above_bulk(ps, x);
  double sum = 0.0;
  for (double v : ps.values()) sum += 1.0 / (v - x);
  return sum / static_cast<double>(ps.denom());
}

double stieltjes_deriv_at(const PseudoSpectrum& ps, double x) {
  require_above_bulk(ps, x);
  double sum = 0.0;
  for (double v : ps.values()) {
    const double g = 1.0 / (v - x);
    sum += g * g;
  }
  return sum / static_cast<double>(ps.denom());
}

double companion_stieltjes(double m1, double x, double beta_n) {
  require_positive(x);
  return -(1.0 - beta_n) / x + beta_n * m1;
}

double companion_stieltjes_deriv(double m1_prime, double x, double beta_n) {
  require_positive(x);
  return (1.0 - beta_n) / (x * x) + beta_n * m1_prime;
}

DTransform d_transform_at(const PseudoSpectrum& ps, double x) {
  require_above_bulk(ps, x);
  require_positive(x);
  DTransform out;
  out.x = x;
  double s0 = 0.0;
  double s1 = 0.0;
  for (double v : ps.values()) {
    const double g = 1.0 / (v - x);
    s0 += g;
    s1 += g * g;
  }
  const double inv = 1.0 / static_cast<double>(ps.denom());
  out.m1 = s0 * inv;
  out.m1_prime = s1 * inv;
  out.m2 = companion_stieltjes(out.m1, x, ps.beta_n());
  out.m2_prime = companion_stieltjes_deriv(out.m1_prime, x, ps.beta_n());
  out.t = x * out.m1 * out.m2;
  out.t_prime = out.m1 * out.m2 + x * out.m1_prime * out.m2 + x * out.m2_prime * out.m1;
  return out;
}

ComponentEstimate component_estimates(const PseudoSpectrum& ps, double lambda_tilde) {
  const DTransform dt = d_transform_at(ps, lambda_tilde);
  if (!(dt.t > 0.0))
    throw std::domain_error("D-transform is not positive at lambda_tilde = " +
                            std::to_string(lambda_tilde));
  ComponentEstimate c;
  c.lambda_tilde = lambda_tilde;
  c.m1 = dt.m1;
  c.m2 = dt.m2;
  c.m1_prime = dt.m1_prime;
  c.m2_prime = dt.m2_prime;
  c.t_hat = dt.t;
  c.t_hat_prime = dt.t_prime;
  c.d_hat = 1.0 / std::sqrt(dt.t);
  const double d2 = c.d_hat * c.d_hat;
  c.a1_raw = dt.m1 / (d2 * dt.t_prime);
  c.a2_raw = dt.m2 / (d2 * dt.t_prime);
  auto clamp01 = [](double a) { return std::isfinite(a) ? std::clamp(a, 0.0, 1.0) : 0.0; };
  c.a1_hat = clamp01(c.a1_raw);
  c.a2_hat = clamp01(c.a2_raw);
  return c;
}

std::optional<double> invert_d_transform(const PseudoSpectrum& ps, double target, double upper) {
  if (!(target > 0.0) || !std::isfinite(target)) return std::nullopt;
  double lo = ps.top() * (1.0 + 1e-6);
  if (!(lo > 0.0)) lo = std::numeric_limits<double>::min();
  double hi = upper;
  if (!(hi > lo)) return std::nullopt;

  // T decreases on the bracket: T(lo) > target > T(hi) is required.
  const double t_lo = d_transform_at(ps, lo).t;
  const double t_hi = d_transform_at(ps, hi).t;
  if (!(t_lo >= target) || !(t_hi <= target)) return std::nullopt;

  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double t_mid = d_transform_at(ps, mid).t;
    if (t_mid > target)
      lo = mid;
    else if (t_mid < target)
      hi = mid;
    else
      return mid;
  }
  // Pick the endpoint with the smaller residual.
  const double r_lo = std::abs(d_transform_at(ps, lo).t - target);
  const double r_hi = std::abs(d_transform_at(ps, hi).t - target);
  return r_lo <= r_hi ? lo : hi;
}

std::optional<double> outlier_location(const PseudoSpectrum& ps, double d, double upper) {
  if (!(d > 0.0)) return std::nullopt;
  return invert_d_transform(ps, 1.0 / (d * d), upper);
}

}  // namespace eopt
