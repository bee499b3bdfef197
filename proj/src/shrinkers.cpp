#include "eopt/shrinkers.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace eopt {

std::string_view to_string(LossKind loss) {
  switch (loss) {
    case LossKind::Frobenius: return "frobenius";
    case LossKind::Operator: return "operator";
    case LossKind::Nuclear: return "nuclear";
  }
  return "unknown";
}

LossKind parse_loss(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "frobenius" || lower == "fro") return LossKind::Frobenius;
  if (lower == "operator" || lower == "op") return LossKind::Operator;
  if (lower == "nuclear" || lower == "nuc") return LossKind::Nuclear;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

double optimal_shrinker(double d_hat, double a1, double a2, LossKind loss) {
  if (!(d_hat >= 0.0) || !std::isfinite(d_hat))
    throw std::domain_error("optimal_shrinker: d_hat must be finite and nonnegative");
  if (!(a1 >= 0.0 && a1 <= 1.0) || !(a2 >= 0.0 && a2 <= 1.0))
    throw std::domain_error("optimal_shrinker: a1 and a2 must lie in [0, 1]");
  switch (loss) {
    case LossKind::Frobenius:
      return d_hat * std::sqrt(a1 * a2);
    case LossKind::Operator: {
      const double hi = std::max(a1, a2);
      if (hi == 0.0) return 0.0;
      return d_hat * std::sqrt(std::min(a1, a2) / hi);
    }
    case LossKind::Nuclear:
      return std::max(0.0, d_hat * (std::sqrt(a1 * a2) - std::sqrt((1.0 - a1) * (1.0 - a2))));
  }
  throw std::invalid_argument("optimal_shrinker: unknown loss");
}

namespace {

void require_beta(double beta) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::domain_error("Marchenko-Pastur ratio must lie in (0, 1]");
}

// Mass of the MP law on [x(theta), upper edge] with x = a + (b - a) cos^2(theta/2).
// The substitution removes both square-root endpoint singularities.
double mp_upper_mass(double theta, double beta) {
  const double sb = std::sqrt(beta);
  const double a = (1.0 - sb) * (1.0 - sb);
  const double b = (1.0 + sb) * (1.0 + sb);
  const double half = 0.5 * (b - a);
  auto integrand = [=](double t) {
    const double c = std::cos(0.5 * t);
    const double x = a + (b - a) * c * c;
    const double s = std::sin(t);
    return half * half * s * s / (2.0 * std::numbers::pi * beta * x);
  };
  if (theta <= 0.0) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, theta,
                                                                       20, 1e-14);
}

double theta_of(double x, double beta) {
  const double sb = std::sqrt(beta);
  const double a = (1.0 - sb) * (1.0 - sb);
  const double b = (1.0 + sb) * (1.0 + sb);
  const double c2 = std::clamp((x - a) / (b - a), 0.0, 1.0);
  return 2.0 * std::acos(std::sqrt(c2));
}

}  // namespace

double mp_cdf(double x, double beta) {
  require_beta(beta);
  const double sb = std::sqrt(beta);
  const double a = (1.0 - sb) * (1.0 - sb);
  const double b = (1.0 + sb) * (1.0 + sb);
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  // theta runs from 0 at the upper edge to pi at the lower edge.
  return 1.0 - mp_upper_mass(theta_of(x, beta), beta);
}

double mp_median(double beta) {
  require_beta(beta);
  // Bisect in theta: upper mass is increasing in theta, median at mass 1/2.
  double lo = 0.0;
  double hi = std::numbers::pi;
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double mass = mp_upper_mass(mid, beta);
    if (std::abs(mass - 0.5) <= 1e-12) break;
    if (mass < 0.5)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15) break;
  }
  const double sb = std::sqrt(beta);
  const double a = (1.0 - sb) * (1.0 - sb);
  const double b = (1.0 + sb) * (1.0 + sb);
  const double c = std::cos(0.5 * mid);
  return a + (b - a) * c * c;
}

double trad_sigma(std::span<const double> singular_values, std::size_t p, std::size_t n) {
  if (singular_values.empty()) throw std::invalid_argument("trad_sigma: empty spectrum");
  if (p == 0 || n == 0) throw std::invalid_argument("trad_sigma: dimensions must be positive");
  const double beta =
      static_cast<double>(std::min(p, n)) / static_cast<double>(std::max(p, n));
  std::vector<double> s(singular_values.begin(), singular_values.end());
  std::sort(s.begin(), s.end());
  const std::size_t m = s.size();
  const double median = m % 2 == 1 ? s[m / 2] : 0.5 * (s[m / 2 - 1] + s[m / 2]);
  return median / std::sqrt(mp_median(beta));
}

TradEstimate trad_estimate(double singular_value, double sigma, double beta, LossKind loss) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::domain_error("trad_estimate: sigma must be positive");
  require_beta(beta);
  if (!(singular_value >= 0.0))
    throw std::domain_error("trad_estimate: singular value must be nonnegative");
  TradEstimate est;
  est.sigma_hat = sigma;
  const double x = singular_value / sigma;
  if (x <= 1.0 + std::sqrt(beta)) return est;

  const double t = x * x - beta - 1.0;
  const double disc = std::max(0.0, t * t - 4.0 * beta);
  est.ell = std::sqrt(0.5 * (t + std::sqrt(disc)));
  const double l2 = est.ell * est.ell;
  const double l4 = l2 * l2;
  est.a1 = std::clamp((l4 - beta) / (l4 + beta * l2), 0.0, 1.0);
  est.a2 = std::clamp((l4 - beta) / (l4 + l2), 0.0, 1.0);
  est.phi = optimal_shrinker(sigma * est.ell, est.a1, est.a2, loss);
  est.detected = true;
  return est;
}

double trad_shrinker(double singular_value, double sigma, double beta, LossKind loss) {
  return trad_estimate(singular_value, sigma, beta, loss).phi;
}

}  // namespace eopt
