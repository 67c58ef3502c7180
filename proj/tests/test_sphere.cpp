#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "spinwigner/sphere.hpp"
#include "test_util.hpp"

using namespace spinwigner;
namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;
}  // namespace

TEST_CASE("spherical_harmonic: closed forms") {
  // Y_00 is constant
  CHECK_NEAR(spherical_harmonic(0, 0, 0.7, 1.9).real(), 1.0 / std::sqrt(kFourPi), 1e-15);
  CHECK_NEAR(spherical_harmonic(0, 0, 2.2, 5.0).imag(), 0.0, 1e-15);
  // Y_10(0, 0) = sqrt(3/4pi)
  CHECK_NEAR(spherical_harmonic(1, 0, 0.0, 0.0).real(), std::sqrt(3.0 / kFourPi), 1e-15);
  // Y_11(pi/2, 0) = -sqrt(3/8pi) (Condon-Shortley sign)
  CHECK_NEAR(spherical_harmonic(1, 1, kPi / 2.0, 0.0).real(), -std::sqrt(3.0 / (8.0 * kPi)), 1e-15);
  CHECK_THROWS_AS(spherical_harmonic(1, 2, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(spherical_harmonic(HalfInt::half(), 0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("spherical_harmonic: conjugation symmetry Y_{k,-q} = (-1)^q conj(Y_kq)") {
  for (int k = 0; k <= 8; ++k) {
    for (int q = 0; q <= k; ++q) {
      for (double theta : {0.3, 1.1, 2.7}) {
        for (double phi : {0.0, 0.9, 4.4}) {
          const auto plus = spherical_harmonic(k, q, theta, phi);
          const auto minus = spherical_harmonic(k, -q, theta, phi);
          const auto expected = (q % 2 == 0 ? 1.0 : -1.0) * std::conj(plus);
          CHECK_NEAR(std::abs(minus - expected), 0.0, 1e-15);
        }
      }
    }
  }
}

TEST_CASE("harmonic_table matches spherical_harmonic") {
  const auto table = harmonic_table(5, 1.3, 2.1);
  for (int k = 0; k <= 5; ++k) {
    for (int q = -k; q <= k; ++q) {
      CHECK_NEAR(std::abs(table[k * k + q + k] - spherical_harmonic(k, q, 1.3, 2.1)), 0.0, 1e-15);
    }
  }
}

TEST_CASE("gauss_legendre: small closed forms and exactness") {
  const auto one = gauss_legendre(1);
  CHECK_NEAR(one.nodes[0], 0.0, 1e-15);
  CHECK_NEAR(one.weights[0], 2.0, 1e-15);

  const auto two = gauss_legendre(2);
  CHECK_NEAR(two.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
  CHECK_NEAR(two.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  CHECK_NEAR(two.weights[0], 1.0, 1e-15);
  CHECK_NEAR(two.weights[1], 1.0, 1e-15);

  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);

  // integrates x^p exactly for p <= 2n-1 (exact value 2/(p+1) for even p)
  for (int n : {1, 2, 3, 5, 8, 10}) {
    const auto rule = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK_NEAR(wsum, 2.0, 1e-14);
    for (int p = 0; p <= std::min(2 * n - 1, 20); ++p) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += rule.weights[i] * std::pow(rule.nodes[i], p);
      const double exact = (p % 2 == 0) ? 2.0 / (p + 1.0) : 0.0;
      CHECK_NEAR(acc, exact, 1e-14);
    }
  }
}

TEST_CASE("product_quadrature: trivial rule and harmonic orthonormality") {
  const auto single = product_quadrature(1, 1);
  CHECK(single.weights.size() == 1);
  CHECK_NEAR(single.weights[0], kFourPi, 1e-12);

  const auto quad = product_quadrature(4, 8);
  // int |Y_21|^2 = 1
  const double y21sq = integrate(
      std::function<double(double, double)>(
          [](double t, double p) { return std::norm(spherical_harmonic(2, 1, t, p)); }),
      quad);
  CHECK_NEAR(y21sq, 1.0, 1e-13);
  // int Y_10 = 0
  const std::complex<double> y10 = integrate(
      std::function<std::complex<double>(double, double)>(
          [](double t, double p) { return spherical_harmonic(1, 0, t, p); }),
      quad);
  CHECK_NEAR(std::abs(y10), 0.0, 1e-13);
}

TEST_CASE("product_quadrature: full orthonormality table at n = 6") {
  const int n = 6;
  const auto quad = product_quadrature(n, 2 * n);
  for (int k = 0; k <= n - 1; ++k) {
    for (int q = -k; q <= k; ++q) {
      for (int kp = 0; kp <= n - 1; ++kp) {
        for (int qp = -kp; qp <= kp; ++qp) {
          std::complex<double> acc = 0.0;
          for (std::size_t i = 0; i < quad.weights.size(); ++i) {
            const double t = quad.node_theta(i), p = quad.node_phi(i);
            acc += quad.weights[i] * spherical_harmonic(k, q, t, p) *
                   std::conj(spherical_harmonic(kp, qp, t, p));
          }
          const double expected = (k == kp && q == qp) ? 1.0 : 0.0;
          CHECK_NEAR(std::abs(acc - expected), 0.0, 1e-12);
        }
      }
    }
  }
}

TEST_CASE("grid_quadrature: paper grid weight sum and symmetry") {
  const auto grid = SphereGrid::paper_grid();
  CHECK(grid.theta.size() == 61);
  CHECK(grid.phi.size() == 20);
  CHECK(grid.point_count() == 1220);

  const auto quad = grid_quadrature(grid);
  double wsum = 0.0;
  for (double w : quad.weights) wsum += w;
  CHECK_NEAR(wsum / kFourPi, 1.0, 1e-3);  // trapezoid O(h^2) defect

  // constant field integrates to the weight sum
  const double c = integrate(std::function<double(double, double)>([](double, double) { return 1.0; }),
                             quad);
  CHECK_NEAR(c, wsum, 1e-12);

  // cos(theta) integrates to 0 by symmetry of the rule
  const double odd = integrate(
      std::function<double(double, double)>([](double t, double) { return std::cos(t); }), quad);
  CHECK_NEAR(odd, 0.0, 1e-10);

  CHECK_THROWS_AS(grid_quadrature(SphereGrid::make({0.1}, {0.0, 1.0})), std::invalid_argument);
}

TEST_CASE("grid_quadrature: O(h^2) convergence in the theta step") {
  auto defect = [](int steps) {
    const auto quad = grid_quadrature(SphereGrid::uniform(steps, 16));
    const double val = integrate(
        std::function<double(double, double)>(
            [](double t, double) { return std::cos(t) * std::cos(t); }),
        quad);
    return std::abs(val - kFourPi / 3.0);
  };
  const double coarse = defect(20);
  const double fine = defect(40);
  CHECK(coarse / fine > 3.5);
  CHECK(coarse / fine < 4.5);
}

TEST_CASE("integrate: error paths") {
  const auto quad = product_quadrature(2, 4);
  std::vector<double> bad(quad.weights.size(), 1.0);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(integrate(std::span<const double>(bad), quad), std::invalid_argument);
  std::vector<double> short_vec(3, 1.0);
  CHECK_THROWS_AS(integrate(std::span<const double>(short_vec), quad), std::invalid_argument);
}

TEST_CASE("sphere grid: invariant validation") {
  CHECK_THROWS_AS(SphereGrid::make({}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(SphereGrid::make({0.2, 0.1}, {0.0}), std::invalid_argument);        // not increasing
  CHECK_THROWS_AS(SphereGrid::make({0.1}, {0.0, 2.0 * kPi}), std::invalid_argument);  // seam duplicate
  CHECK_THROWS_AS(SphereGrid::make({0.1, 4.0}, {0.0}), std::invalid_argument);        // theta > pi
}

TEST_CASE("scalar field validation") {
  const auto grid = SphereGrid::uniform(2, 4);
  CHECK_THROWS_AS(ScalarField::make(grid, {{1.0, 0.0}}), std::invalid_argument);
  std::vector<std::complex<double>> vals(grid.point_count(), 1.0);
  CHECK(ScalarField::make(grid, vals).values.size() == grid.point_count());
  vals[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ScalarField::make(grid, vals), std::invalid_argument);
}
