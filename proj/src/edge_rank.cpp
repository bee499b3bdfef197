#include "eopt/edge_rank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eopt {

namespace {

// 2^{2/3} - 1
const double kEdgeDenominator = std::cbrt(4.0) - 1.0;

void require_length(std::span<const double> lambdas, std::size_t needed, const char* what) {
  if (lambdas.size() < needed)
    throw std::length_error(std::string(what) + ": spectrum of length " +
                            std::to_string(lambdas.size()) + " is shorter than the " +
                            std::to_string(needed) + " values required");
}

// Square-root-law imputation anchored at lambdas[offset + k] and
// lambdas[offset + 2k]; j runs over 1..k.
std::vector<double> impute_from(std::span<const double> lambdas, std::size_t offset,
                                std::size_t k) {
  std::vector<double> out;
  out.reserve(k);
  const double anchor = lambdas[offset + k];
  const double gap = anchor - lambdas[offset + 2 * k];
  for (std::size_t j = 1; j <= k; ++j) {
    const double frac = static_cast<double>(j - 1) / static_cast<double>(k);
    const double coef = (1.0 - std::pow(frac, 2.0 / 3.0)) / kEdgeDenominator;
    out.push_back(anchor + coef * gap);
  }
  return out;
}

}  // namespace

double select_c(std::size_t n) {
  if (n <= 2) throw std::domain_error("select_c: n must be at least 3");
  const double loglog = std::log(std::log(static_cast<double>(n)));
  return std::min(1.0 / 2.01, 1.0 / loglog);
}

std::size_t edge_window(std::size_t n, double c) {
  if (!(c > 0.0)) throw std::domain_error("edge_window: exponent must be positive");
  return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), c)));
}

double estimate_bulk_edge(std::span<const double> lambdas, std::size_t k) {
  if (k == 0) throw std::domain_error("estimate_bulk_edge: k must be positive");
  require_length(lambdas, 2 * k + 1, "estimate_bulk_edge");
  const double anchor = lambdas[k];
  return anchor + (anchor - lambdas[2 * k]) / kEdgeDenominator;
}

std::size_t estimate_effective_rank(std::span<const double> lambdas, double lambda_plus_hat,
                                    std::size_t n) {
  if (n == 0) throw std::domain_error("estimate_effective_rank: n must be positive");
  const double threshold = lambda_plus_hat + 1.0 / std::cbrt(static_cast<double>(n));
  return static_cast<std::size_t>(
      std::count_if(lambdas.begin(), lambdas.end(), [&](double l) { return l > threshold; }));
}

std::vector<double> impute_edge_eigenvalues(std::span<const double> lambdas,
                                            std::size_t r_plus_hat, std::size_t k) {
  if (k == 0) throw std::domain_error("impute_edge_eigenvalues: k must be positive");
  require_length(lambdas, 2 * k + r_plus_hat + 1, "impute_edge_eigenvalues");
  return impute_from(lambdas, r_plus_hat, k);
}

PseudoSpectrum pseudo_cdf_e(std::span<const double> lambdas, std::size_t r_plus_hat,
                            std::size_t k, double beta_n) {
  if (r_plus_hat >= lambdas.size())
    throw std::length_error("pseudo_cdf_e: r_plus_hat must be smaller than the spectrum length");
  std::vector<double> values;
  values.reserve(lambdas.size() - r_plus_hat);
  if (k > 0) values = impute_edge_eigenvalues(lambdas, r_plus_hat, k);
  values.insert(values.end(), lambdas.begin() + static_cast<std::ptrdiff_t>(r_plus_hat + k),
                lambdas.end());
  return PseudoSpectrum(std::move(values), lambdas.size() - r_plus_hat, beta_n);
}

PseudoSpectrum pseudo_cdf_T(std::span<const double> lambdas, std::size_t r_plus_hat,
                            double beta_n) {
  if (r_plus_hat >= lambdas.size())
    throw std::length_error("pseudo_cdf_T: r_plus_hat must be smaller than the spectrum length");
  std::vector<double> values(lambdas.begin() + static_cast<std::ptrdiff_t>(r_plus_hat),
                             lambdas.end());
  return PseudoSpectrum(std::move(values), lambdas.size() - r_plus_hat, beta_n);
}

PseudoSpectrum pseudo_cdf_imp(std::span<const double> lambdas, std::size_t k_imp,
                              double beta_n) {
  if (k_imp == 0) throw std::domain_error("pseudo_cdf_imp: k_imp must be positive");
  require_length(lambdas, 2 * k_imp + 1, "pseudo_cdf_imp");
  std::vector<double> values = impute_from(lambdas, 0, k_imp);
  values.insert(values.end(), lambdas.begin() + static_cast<std::ptrdiff_t>(k_imp),
                lambdas.end());
  return PseudoSpectrum(std::move(values), lambdas.size(), beta_n);
}

EdgeRankEstimate estimate_edge_rank(std::span<const double> lambdas, std::size_t n,
                                    const EdgeRankOptions& options,
                                    std::vector<std::string>& warnings) {
  const std::size_t p = lambdas.size();
  if (p < 3)
    throw std::length_error("estimate_edge_rank: at least 3 eigenvalues are required, got " +
                            std::to_string(p));
  if (n < p) throw std::invalid_argument("estimate_edge_rank: expected p <= n orientation");

  EdgeRankEstimate est;
  if (options.k) {
    est.k = *options.k;
    est.c = n > 1 && est.k > 0
                ? std::log(static_cast<double>(est.k)) / std::log(static_cast<double>(n))
                : 0.0;
  } else {
    est.c = options.c ? *options.c : select_c(n);
    if (!(est.c > 0.0) || !(est.c < 1.0))
      throw std::domain_error("estimate_edge_rank: exponent c must lie in (0, 1)");
    est.k = edge_window(n, est.c);
  }
  if (est.k == 0) {
    warnings.push_back("edge window floor(n^c) is 0; using k = 1");
    est.k = 1;
  }
  const std::size_t k_edge_max = (p - 1) / 2;
  if (est.k > k_edge_max) {
    warnings.push_back("edge window k = " + std::to_string(est.k) +
                       " needs 2k+1 eigenvalues; reduced to k = " + std::to_string(k_edge_max));
    est.k = k_edge_max;
  }

  est.lambda_plus_hat = estimate_bulk_edge(lambdas, est.k);
  if (options.forced_rank) {
    if (*options.forced_rank >= p)
      throw std::length_error("estimate_edge_rank: forced rank must be below p");
    est.r_plus_hat = *options.forced_rank;
  } else {
    est.r_plus_hat = estimate_effective_rank(lambdas, est.lambda_plus_hat, n);
  }
  if (est.k <= est.r_plus_hat)
    warnings.push_back("edge window k = " + std::to_string(est.k) +
                       " does not exceed the estimated rank " + std::to_string(est.r_plus_hat));

  std::size_t k_imp = est.k;
  if (2 * k_imp + est.r_plus_hat + 1 > p) {
    k_imp = p > est.r_plus_hat ? (p - est.r_plus_hat - 1) / 2 : 0;
    warnings.push_back("imputation window reduced from " + std::to_string(est.k) + " to " +
                       std::to_string(k_imp) + " to fit the spectrum");
  }
  if (k_imp > 0) est.imputed = impute_edge_eigenvalues(lambdas, est.r_plus_hat, k_imp);
  return est;
}

std::vector<double> sorted_descending(std::vector<double> values) {
  std::stable_sort(values.begin(), values.end(), std::greater<double>());
  return values;
}

}  // namespace eopt
