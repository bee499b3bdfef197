#include "eopt/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eopt {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string_view to_string(Method method) {
  return method == Method::EOpt ? "eopt" : "trad";
}

Method parse_method(std::string_view name) {
  const std::string s = lowercase(name);
  if (s == "eopt" || s == "eoptshrink") return Method::EOpt;
  if (s == "trad") return Method::Trad;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(CdfVariant variant) {
  switch (variant) {
    case CdfVariant::E: return "e";
    case CdfVariant::T: return "t";
    case CdfVariant::Imp: return "imp";
  }
  return "unknown";
}

CdfVariant parse_cdf_variant(std::string_view name) {
  const std::string s = lowercase(name);
  if (s == "e") return CdfVariant::E;
  if (s == "t") return CdfVariant::T;
  if (s == "imp") return CdfVariant::Imp;
  throw std::invalid_argument("unknown CDF variant '" + std::string(name) + "'");
}

PseudoSpectrum build_pseudo_spectrum(std::span<const double> lambdas,
                                     const EdgeRankEstimate& est, CdfVariant variant,
                                     std::size_t k_imp, double beta_n) {
  switch (variant) {
    case CdfVariant::E: {
      const std::size_t r = est.r_plus_hat;
      const std::size_t k = est.imputed.size();
      if (r + k > lambdas.size())
        throw std::length_error("build_pseudo_spectrum: imputed window exceeds the spectrum");
      std::vector<double> values = est.imputed;
      values.insert(values.end(), lambdas.begin() + static_cast<std::ptrdiff_t>(r + k),
                    lambdas.end());
      return PseudoSpectrum(std::move(values), lambdas.size() - r, beta_n);
    }
    case CdfVariant::T:
      return pseudo_cdf_T(lambdas, est.r_plus_hat, beta_n);
    case CdfVariant::Imp:
      return pseudo_cdf_imp(lambdas, k_imp, beta_n);
  }
  throw std::invalid_argument("build_pseudo_spectrum: unknown variant");
}

SpectrumEstimate estimate_from_spectrum(std::span<const double> lambdas, std::size_t n,
                                        const EOptOptions& options) {
  const std::size_t p = lambdas.size();
  if (p > n) throw std::invalid_argument("estimate_from_spectrum: expected p <= n");
  for (std::size_t i = 1; i < p; ++i)
    if (lambdas[i] > lambdas[i - 1])
      throw std::invalid_argument("estimate_from_spectrum: eigenvalues must be descending");

  SpectrumEstimate out;
  EdgeRankOptions edge_opts;
  edge_opts.c = options.c;
  edge_opts.k = options.k;
  edge_opts.forced_rank = options.forced_rank;
  out.edge_rank = estimate_edge_rank(lambdas, n, edge_opts, out.warnings);

  const std::size_t r = out.edge_rank.r_plus_hat;
  if (r == 0) return out;

  const double beta_n = static_cast<double>(p) / static_cast<double>(n);
  std::size_t k_imp = 0;
  if (options.cdf == CdfVariant::Imp) {
    k_imp = options.k_imp ? *options.k_imp : std::max<std::size_t>(1, 4 * r);
    const std::size_t k_max = (p - 1) / 2;
    if (k_imp > k_max) {
      out.warnings.push_back("imputation window k_imp = " + std::to_string(k_imp) +
                             " reduced to " + std::to_string(k_max));
      k_imp = k_max;
    }
  }
  const PseudoSpectrum ps = build_pseudo_spectrum(lambdas, out.edge_rank, options.cdf, k_imp,
                                                  beta_n);
  out.components.reserve(r);
  for (std::size_t i = 0; i < r; ++i) {
    ComponentEstimate comp = component_estimates(ps, lambdas[i]);
    comp.phi_hat = optimal_shrinker(comp.d_hat, comp.a1_hat, comp.a2_hat, options.loss);
    out.components.push_back(comp);
  }
  return out;
}

Matrix reconstruct(const SpectralDecomposition& svd, std::span<const double> phi) {
  const auto r = static_cast<Eigen::Index>(phi.size());
  if (r > svd.singular_values.size())
    throw std::invalid_argument("reconstruct: more weights than singular triplets");
  if (r == 0) return Matrix::Zero(svd.left_vectors.rows(), svd.right_vectors.rows());
  const Vector w = Eigen::Map<const Vector>(phi.data(), r);
  return svd.left_vectors.leftCols(r) * w.asDiagonal() * svd.right_vectors.leftCols(r).transpose();
}

DenoiseResult eoptshrink(const Matrix& m, const EOptOptions& options) {
  if (m.rows() > m.cols()) {
    DenoiseResult res = eoptshrink(m.transpose(), options);
    res.s_hat.transposeInPlace();
    return res;
  }
  const auto n = static_cast<std::size_t>(m.cols());
  const SpectralDecomposition svd = full_svd(m);
  std::vector<double> lambdas(static_cast<std::size_t>(svd.singular_values.size()));
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double s = svd.singular_values(static_cast<Eigen::Index>(i));
    lambdas[i] = s * s;
  }
  SpectrumEstimate est = estimate_from_spectrum(lambdas, n, options);

  DenoiseResult res;
  res.method = Method::EOpt;
  res.loss = options.loss;
  res.cdf_variant = options.cdf;
  res.edge_rank = std::move(est.edge_rank);
  res.components = std::move(est.components);
  res.warnings = std::move(est.warnings);
  std::vector<double> phi;
  phi.reserve(res.components.size());
  for (const auto& c : res.components) phi.push_back(c.phi_hat);
  res.s_hat = reconstruct(svd, phi);
  return res;
}

TradSpectrumEstimate trad_from_singular_values(std::span<const double> singular_values,
                                               std::size_t p, std::size_t n, LossKind loss) {
  if (p > n) throw std::invalid_argument("trad_from_singular_values: expected p <= n");
  TradSpectrumEstimate out;
  const double beta = static_cast<double>(p) / static_cast<double>(n);
  out.sigma_hat = trad_sigma(singular_values, p, n);
  out.threshold = out.sigma_hat * (1.0 + std::sqrt(beta));
  if (!(out.sigma_hat > 0.0)) return out;
  for (double s : singular_values) {
    TradEstimate est = trad_estimate(s, out.sigma_hat, beta, loss);
    if (!est.detected) break;
    out.components.push_back(est);
  }
  return out;
}

DenoiseResult trad_denoise(const Matrix& m, LossKind loss) {
  if (m.rows() > m.cols()) {
    DenoiseResult res = trad_denoise(m.transpose(), loss);
    res.s_hat.transposeInPlace();
    return res;
  }
  const auto p = static_cast<std::size_t>(m.rows());
  const auto n = static_cast<std::size_t>(m.cols());
  if (p == 0) throw std::length_error("trad_denoise: empty matrix");
  const SpectralDecomposition svd = full_svd(m);
  std::vector<double> s(svd.singular_values.data(),
                        svd.singular_values.data() + svd.singular_values.size());
  const TradSpectrumEstimate trad = trad_from_singular_values(s, p, n, loss);

  DenoiseResult res;
  res.method = Method::Trad;
  res.loss = loss;
  res.sigma_hat = trad.sigma_hat;
  if (!(trad.sigma_hat > 0.0)) res.warnings.push_back("estimated noise level is zero");
  res.edge_rank.lambda_plus_hat = trad.threshold * trad.threshold;
  res.edge_rank.r_plus_hat = trad.components.size();
  std::vector<double> phi;
  for (std::size_t i = 0; i < trad.components.size(); ++i) {
    const TradEstimate& t = trad.components[i];
    ComponentEstimate c;
    c.lambda_tilde = s[i] * s[i];
    c.m1 = c.m2 = c.m1_prime = c.m2_prime = c.t_hat = c.t_hat_prime = kNaN;
    c.d_hat = t.sigma_hat * t.ell;
    c.a1_raw = c.a1_hat = t.a1;
    c.a2_raw = c.a2_hat = t.a2;
    c.phi_hat = t.phi;
    res.components.push_back(c);
    phi.push_back(t.phi);
  }
  res.s_hat = reconstruct(svd, phi);
  return res;
}

}  // namespace eopt
