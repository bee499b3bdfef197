#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eopt/spectral_transforms.hpp"

namespace eopt {

// All spectra here are eigenvalues of S S^T in the p <= n orientation,
// sorted non-increasing, indexed from 0 (lambdas[0] is the largest).

/// Bulk edge, effective rank, and the square-root-law imputed edge values.
struct EdgeRankEstimate {
  double lambda_plus_hat = 0.0;
  std::size_t r_plus_hat = 0;
  std::size_t k = 0;       // window used for the edge estimate
  double c = 0.0;          // exponent with k = floor(n^c)
  std::vector<double> imputed;  // length = window used for imputation
};

/// Default window exponent min(1/2.01, 1/ln(ln n)).
double select_c(std::size_t n);

/// floor(n^c).
std::size_t edge_window(std::size_t n, double c);

/// lambda_{k+1} + (lambda_{k+1} - lambda_{2k+1}) / (2^{2/3} - 1).
double estimate_bulk_edge(std::span<const double> lambdas, std::size_t k);

/// Number of eigenvalues strictly above lambda_plus_hat + n^{-1/3}.
std::size_t estimate_effective_rank(std::span<const double> lambdas, double lambda_plus_hat,
                                    std::size_t n);

/// Square-root-law reconstruction of the (r+1)-th .. (r+k)-th eigenvalues
/// from lambda_{k+r+1} and lambda_{2k+r+1}. Output is non-increasing.
std::vector<double> impute_edge_eigenvalues(std::span<const double> lambdas,
                                            std::size_t r_plus_hat, std::size_t k);

/// Imputed edge values followed by the observed tail lambda_{k+r+1..p};
/// divisor p - r.
PseudoSpectrum pseudo_cdf_e(std::span<const double> lambdas, std::size_t r_plus_hat,
                            std::size_t k, double beta_n);

/// Truncated spectrum lambda_{r+1..p}; divisor p - r.
PseudoSpectrum pseudo_cdf_T(std::span<const double> lambdas, std::size_t r_plus_hat,
                            double beta_n);

/// Top k_imp values imputed from lambda_{k+1}, lambda_{2k+1}, the rest
/// observed; divisor p.
PseudoSpectrum pseudo_cdf_imp(std::span<const double> lambdas, std::size_t k_imp,
                              double beta_n);

struct EdgeRankOptions {
  std::optional<double> c;            // window exponent override
  std::optional<std::size_t> k;       // direct window override (wins over c)
  std::optional<std::size_t> forced_rank;  // replaces the r+ estimate
};

/// Edge and rank estimation followed by imputation, in that order: the edge
/// uses the unshifted window, imputation the window shifted by r+. When the
/// spectrum is too short for the requested window, k is reduced to the
/// largest feasible value and a warning is appended.
EdgeRankEstimate estimate_edge_rank(std::span<const double> lambdas, std::size_t n,
                                    const EdgeRankOptions& options,
                                    std::vector<std::string>& warnings);

/// Stable descending sort; ties keep their original order.
std::vector<double> sorted_descending(std::vector<double> values);

}  // namespace eopt
