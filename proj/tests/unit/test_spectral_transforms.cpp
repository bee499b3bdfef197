#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "eopt/edge_rank.hpp"
#include "eopt/spectral_transforms.hpp"

using eopt::PseudoSpectrum;

namespace {

PseudoSpectrum random_spectrum(std::mt19937_64& rng, double beta) {
  std::uniform_int_distribution<int> len(1, 40);
  std::uniform_real_distribution<double> val(0.0, 5.0);
  std::vector<double> v(static_cast<std::size_t>(len(rng)));
  for (double& x : v) x = val(rng);
  const std::size_t denom = v.size() + static_cast<std::size_t>(len(rng)) / 4;
  return PseudoSpectrum(eopt::sorted_descending(v), denom, beta);
}

}  // namespace

TEST_SUITE("spectral_transforms") {

TEST_CASE("pseudo spectrum validates its invariants") {
  CHECK_THROWS_AS(PseudoSpectrum({1.0, 2.0}, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PseudoSpectrum({1.0, -0.5}, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PseudoSpectrum({1.0}, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PseudoSpectrum({1.0}, 1, 0.0), std::invalid_argument);
  // denom below the number of values is allowed
  CHECK_NOTHROW(PseudoSpectrum({3.0, 2.0, 1.0}, 1, 2.0));
}

TEST_CASE("stieltjes_at examples") {
  CHECK(eopt::stieltjes_at(PseudoSpectrum({1.0}, 1, 1.0), 2.0) == doctest::Approx(-1.0));
  CHECK(eopt::stieltjes_at(PseudoSpectrum({3.0, 1.0}, 2, 1.0), 5.0) == doctest::Approx(-0.375));
  CHECK(eopt::stieltjes_at(PseudoSpectrum({}, 5, 1.0), 1.0) == 0.0);
}

TEST_CASE("stieltjes_at rejects points inside the bulk") {
  const PseudoSpectrum ps({3.0, 1.0}, 2, 1.0);
  CHECK_THROWS_AS(eopt::stieltjes_at(ps, 3.0), std::domain_error);
  CHECK_THROWS_AS(eopt::stieltjes_at(ps, 2.0), std::domain_error);
  CHECK_THROWS_AS(eopt::stieltjes_deriv_at(ps, 3.0), std::domain_error);
}

TEST_CASE("stieltjes_deriv_at examples") {
  CHECK(eopt::stieltjes_deriv_at(PseudoSpectrum({1.0}, 1, 1.0), 2.0) == doctest::Approx(1.0));
  CHECK(eopt::stieltjes_deriv_at(PseudoSpectrum({3.0, 1.0}, 2, 1.0), 5.0) ==
        doctest::Approx(0.15625));
  CHECK(eopt::stieltjes_deriv_at(PseudoSpectrum({}, 3, 1.0), 2.0) == 0.0);
}

TEST_CASE("companion transform examples") {
  CHECK(eopt::companion_stieltjes(-0.5, 3.0, 1.0) == doctest::Approx(-0.5));
  CHECK(eopt::companion_stieltjes(-1.0 / 3.0, 4.0, 0.5) == doctest::Approx(-7.0 / 24.0));
  CHECK(eopt::companion_stieltjes(0.0, 1.0, 0.5) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(eopt::companion_stieltjes(-1.0, 0.0, 0.5), std::domain_error);

  CHECK(eopt::companion_stieltjes_deriv(0.2, 7.3, 1.0) == doctest::Approx(0.2));
  CHECK(eopt::companion_stieltjes_deriv(1.0 / 9.0, 4.0, 0.5) == doctest::Approx(25.0 / 288.0));
  CHECK(eopt::companion_stieltjes_deriv(0.0, 2.0, 0.5) == doctest::Approx(0.125));
  CHECK_THROWS_AS(eopt::companion_stieltjes_deriv(1.0, 0.0, 0.5), std::domain_error);
}

TEST_CASE("companion identity matches the padded spectrum") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(0.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 5 + static_cast<std::size_t>(trial);
    const std::size_t n = p + 1 + static_cast<std::size_t>(trial) * 3;
    std::vector<double> v(p);
    for (double& x : v) x = val(rng);
    v = eopt::sorted_descending(v);
    const double beta = static_cast<double>(p) / static_cast<double>(n);
    const PseudoSpectrum ps(v, p, beta);
    std::vector<double> padded = v;
    padded.resize(n, 0.0);
    const PseudoSpectrum pad(padded, n, 1.0);
    for (double x : {v.front() + 0.01, v.front() * 1.5 + 1.0, 40.0}) {
      const double m1 = eopt::stieltjes_at(ps, x);
      const double direct = eopt::stieltjes_at(pad, x);
      CHECK(eopt::companion_stieltjes(m1, x, beta) == doctest::Approx(direct).epsilon(1e-13));
      const double m1p = eopt::stieltjes_deriv_at(ps, x);
      CHECK(eopt::companion_stieltjes_deriv(m1p, x, beta) ==
            doctest::Approx(eopt::stieltjes_deriv_at(pad, x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("derivative matches centered finite differences") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const PseudoSpectrum ps = random_spectrum(rng, 0.7);
    for (double factor : {1.05, 1.5, 3.0}) {
      const double x = ps.top() * factor + 0.1;
      const double h = 1e-5 * x;
      const double fd = (eopt::stieltjes_at(ps, x + h) - eopt::stieltjes_at(ps, x - h)) / (2 * h);
      CHECK(eopt::stieltjes_deriv_at(ps, x) == doctest::Approx(fd).epsilon(1e-6));

      const eopt::DTransform a = eopt::d_transform_at(ps, x + h);
      const eopt::DTransform b = eopt::d_transform_at(ps, x - h);
      const eopt::DTransform c = eopt::d_transform_at(ps, x);
      CHECK(c.t_prime == doctest::Approx((a.t - b.t) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("stieltjes transform increases and the D-transform decreases above the bulk") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const PseudoSpectrum ps = random_spectrum(rng, 0.4 + 0.006 * trial);
    double prev_m = -std::numeric_limits<double>::infinity();
    double prev_t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10; ++i) {
      const double x = ps.top() + 0.05 + 0.7 * i * i;
      const eopt::DTransform d = eopt::d_transform_at(ps, x);
      CHECK(d.m1 > prev_m);
      CHECK(d.t < prev_t);
      CHECK(d.t_prime < 0.0);
      CHECK(d.m1 < 0.0);
      CHECK(d.m2 < 0.0);
      prev_m = d.m1;
      prev_t = d.t;
    }
  }
}

TEST_CASE("d_transform_at examples") {
  const eopt::DTransform a = eopt::d_transform_at(PseudoSpectrum({1.0}, 1, 0.5), 4.0);
  CHECK(a.t == doctest::Approx(7.0 / 18.0));
  CHECK(a.m2 == doctest::Approx(-7.0 / 24.0));
  const eopt::DTransform b = eopt::d_transform_at(PseudoSpectrum({1.0}, 1, 1.0), 2.0);
  CHECK(b.t == doctest::Approx(2.0));
  CHECK(b.t_prime < 0.0);
}

TEST_CASE("component_estimates on a single atom") {
  const PseudoSpectrum ps({1.0}, 1, 0.5);
  const eopt::ComponentEstimate c = eopt::component_estimates(ps, 4.0);
  CHECK(c.d_hat == doctest::Approx(std::sqrt(18.0 / 7.0)));
  CHECK(c.t_hat == c.lambda_tilde * c.m1 * c.m2);
  CHECK(c.d_hat == doctest::Approx(1.0 / std::sqrt(c.t_hat)));
  // T' = m1 m2 + x m1' m2 + x m2' m1 = 7/72 - 7/54 - 25/216 = -4/27
  CHECK(c.t_hat_prime == doctest::Approx(-4.0 / 27.0));
  CHECK(c.a1_raw == doctest::Approx(0.875));
  CHECK(c.a2_raw == doctest::Approx(0.765625));
  CHECK(c.a1_hat > 0.0);
  CHECK(c.a2_hat > 0.0);
}

TEST_CASE("component_estimates clamps and keeps raw values") {
  const PseudoSpectrum ps({2.0, 1.9, 0.5}, 3, 1.0);
  for (double x : {2.001, 2.5, 10.0, 1e4}) {
    const eopt::ComponentEstimate c = eopt::component_estimates(ps, x);
    CHECK(c.a1_hat >= 0.0);
    CHECK(c.a1_hat <= 1.0);
    CHECK(c.a2_hat >= 0.0);
    CHECK(c.a2_hat <= 1.0);
    CHECK(c.a1_hat == doctest::Approx(std::clamp(c.a1_raw, 0.0, 1.0)));
    CHECK(c.a2_hat == doctest::Approx(std::clamp(c.a2_raw, 0.0, 1.0)));
  }
}

TEST_CASE("component_estimates is scale equivariant") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const PseudoSpectrum ps = random_spectrum(rng, 0.8);
    const double x = ps.top() * 1.3 + 0.2;
    const eopt::ComponentEstimate base = eopt::component_estimates(ps, x);
    for (double s : {0.01, 3.0, 250.0}) {
      std::vector<double> v = ps.values();
      for (double& e : v) e *= s;
      const PseudoSpectrum scaled(v, ps.denom(), ps.beta_n());
      const eopt::ComponentEstimate c = eopt::component_estimates(scaled, s * x);
      CHECK(c.d_hat == doctest::Approx(std::sqrt(s) * base.d_hat).epsilon(1e-10));
      CHECK(c.a1_raw == doctest::Approx(base.a1_raw).epsilon(1e-10));
      CHECK(c.a2_raw == doctest::Approx(base.a2_raw).epsilon(1e-10));
    }
  }
}

TEST_CASE("component_estimates rejects a nonpositive D-transform") {
  // Empty pseudo-spectrum with beta = 1 gives m1 = m2 = 0.
  CHECK_THROWS_AS(eopt::component_estimates(PseudoSpectrum({}, 4, 1.0), 3.0), std::domain_error);
  CHECK_THROWS_AS(eopt::component_estimates(PseudoSpectrum({2.0}, 1, 1.0), 1.5),
                  std::domain_error);
}

TEST_CASE("D-transform inversion round trip") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const PseudoSpectrum ps = random_spectrum(rng, 0.5 + 0.01 * trial);
    const double upper = 100.0 * (ps.top() + 1.0);
    for (double f : {1.01, 1.4, 4.0, 20.0}) {
      const double x = ps.top() * f + 0.05;
      const double y = eopt::d_transform_at(ps, x).t;
      const auto root = eopt::invert_d_transform(ps, y, upper);
      REQUIRE(root.has_value());
      CHECK(eopt::d_transform_at(ps, *root).t == doctest::Approx(y).epsilon(1e-9));
      CHECK(*root == doctest::Approx(x).epsilon(1e-8));
    }
  }
}

TEST_CASE("outlier_location inverts 1/d^2") {
  const PseudoSpectrum ps({1.0}, 1, 0.5);
  const auto x = eopt::outlier_location(ps, std::sqrt(18.0 / 7.0), 1000.0);
  REQUIRE(x.has_value());
  CHECK(*x == doctest::Approx(4.0).epsilon(1e-9));
  // The D-transform diverges at the top atom, so only targets below its
  // value at the upper end of the bracket have no root.
  CHECK(eopt::outlier_location(ps, 1e-3, 1000.0).has_value());
  CHECK_FALSE(eopt::outlier_location(ps, 1e3, 1000.0).has_value());
}

}  // TEST_SUITE
