#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spinwigner/simulator.hpp"
#include "spinwigner/wigner.hpp"
#include "test_util.hpp"

using namespace spinwigner;
namespace {
constexpr double kPi = std::numbers::pi;
const HalfInt kHalf = HalfInt::half();

DensityMatrix mixed_qubit() {
  return DensityMatrix::create(kHalf, Eigen::Matrix2cd::Identity() * 0.5);
}

// Exact-probability grid for a state, via the fixed measurement convention.
ProbabilityGrid exact_probabilities(const DensityMatrix& rho, const SphereGrid& grid) {
  ProbabilityGrid pg;
  pg.grid = grid;
  pg.j = rho.j();
  pg.shots = 0;
  for (double theta : grid.theta) {
    for (double phi : grid.phi) {
      const auto p = ideal_probabilities(rho, theta, phi);
      pg.probs.insert(pg.probs.end(), p.begin(), p.end());
    }
  }
  return pg;
}
}  // namespace

TEST_CASE("wigner_from_rho: mixed state is constant 1/(2 pi)") {
  const auto map = wigner_from_rho(mixed_qubit(), SphereGrid::uniform(6, 8));
  for (double v : map.values) CHECK_NEAR(v, 1.0 / (2.0 * kPi), 1e-14);
}

TEST_CASE("wigner_from_rho: |y> extrema at the Bloch direction and antipode") {
  const auto y = pure_qubit(kPi / 2.0, kPi / 2.0);
  const auto eval = wigner_evaluator(y);
  // value along the Bloch vector: (1 + sqrt(3))/(2 pi)
  CHECK_NEAR(eval(kPi / 2.0, kPi / 2.0), (1.0 + std::sqrt(3.0)) / (2.0 * kPi), 1e-14);
  // antipode: (1 - sqrt(3))/(2 pi)
  CHECK_NEAR(eval(kPi / 2.0, 3.0 * kPi / 2.0), (1.0 - std::sqrt(3.0)) / (2.0 * kPi), 1e-14);
}

TEST_CASE("wigner_point: frozen qubit examples") {
  const std::vector<double> top{1.0, 0.0};
  const std::vector<double> even{0.5, 0.5};
  const std::vector<double> bottom{0.0, 1.0};
  CHECK_NEAR(wigner_point(top, kHalf), (1.0 + std::sqrt(3.0)) / (2.0 * kPi), 1e-14);
  CHECK_NEAR(wigner_point(even, kHalf), 1.0 / (2.0 * kPi), 1e-14);
  CHECK_NEAR(wigner_point(bottom, kHalf), (1.0 - std::sqrt(3.0)) / (2.0 * kPi), 1e-14);

  const std::vector<double> unnormalized{0.7, 0.7};
  CHECK_THROWS_AS(wigner_point(unnormalized, kHalf), std::invalid_argument);
  const std::vector<double> negative{1.2, -0.2};
  CHECK_THROWS_AS(wigner_point(negative, kHalf), std::invalid_argument);
}

TEST_CASE("forward/reconstruction identity on the paper grid, j = 1/2, 1, 3/2") {
  std::mt19937_64 rng(2024);
  const auto grid = SphereGrid::paper_grid();
  for (int tj : {1, 2, 3}) {
    const HalfInt j = HalfInt::from_twice(tj);
    for (int rep = 0; rep < 2; ++rep) {
      const auto rho = testutil::random_rho(j, rng);
      const auto forward = wigner_from_rho(rho, grid);
      const auto recon = reconstruct(exact_probabilities(rho, grid));
      double worst = 0.0;
      for (std::size_t i = 0; i < forward.values.size(); ++i) {
        worst = std::max(worst, std::abs(forward.values[i] - recon.values[i]));
      }
      CHECK(worst < 1e-12);
    }
  }
}

TEST_CASE("reconstruct: mixed state gives a constant map; errors carry node coordinates") {
  const auto grid = SphereGrid::uniform(4, 6);
  const auto recon = reconstruct(exact_probabilities(mixed_qubit(), grid));
  for (double v : recon.values) CHECK_NEAR(v, 1.0 / (2.0 * kPi), 1e-13);

  ProbabilityGrid broken = exact_probabilities(mixed_qubit(), grid);
  broken.probs[2 * broken.levels()] = 0.9;  // break normalization at node 2
  CHECK_THROWS_WITH_AS(reconstruct(broken), doctest::Contains("theta="), std::invalid_argument);
}

TEST_CASE("rho_from_wigner: Gauss round trip at j = 1/2 .. 5/2") {
  std::mt19937_64 rng(7);
  for (int tj : {1, 2, 3, 4, 5}) {
    const HalfInt j = HalfInt::from_twice(tj);
    const auto quad = product_quadrature(tj + 2, 2 * tj + 4);
    const auto rho = testutil::random_rho(j, rng);
    const auto back = rho_from_wigner(wigner_evaluator(rho), j, quad);
    CHECK((back.entries() - rho.entries()).norm() < 1e-10);
  }
  // spin-coherent round trip at j = 3/2
  const auto coherent = spin_coherent(HalfInt::from_twice(3), 1.1, 0.4);
  const auto quad = product_quadrature(5, 10);
  const auto back = rho_from_wigner(wigner_evaluator(coherent), HalfInt::from_twice(3), quad);
  CHECK((back.entries() - coherent.entries()).norm() < 1e-10);
}

TEST_CASE("rho_from_wigner: paper-grid trapezoid quadrature is measurement-grade") {
  std::mt19937_64 rng(8);
  const auto rho = testutil::random_rho(kHalf, rng);
  const auto grid = SphereGrid::paper_grid();
  const auto map = wigner_from_rho(rho, grid);
  const auto quad = grid_quadrature(grid);
  // default rho_00 gate rejects the O(h^2) rule...
  CHECK_THROWS_AS(rho_from_wigner(map, quad), std::runtime_error);
  // ...with a relaxed gate the result is ~1e-3 accurate
  const auto approx = rho_from_wigner(map, quad, 1e-2);
  const double err = (approx.entries() - rho.entries()).norm();
  CHECK(err < 5e-3);
  CHECK(err > 1e-8);  // genuinely measurement-grade, not exact
}

TEST_CASE("trace_product: frozen values and faithfulness to Tr(rho1 rho2)") {
  const auto grid_quad = product_quadrature(8, 16);
  const auto mixed_map = wigner_from_rho(mixed_qubit(), grid_quad.grid);
  const auto y = pure_qubit(kPi / 2.0, kPi / 2.0);
  const auto y_map = wigner_from_rho(y, grid_quad.grid);

  CHECK_NEAR(trace_product(mixed_map, mixed_map, grid_quad), 0.5, 1e-12);
  CHECK_NEAR(trace_product(y_map, y_map, grid_quad), 1.0, 1e-10);

  const auto z0_map = wigner_from_rho(pure_qubit(0.0, 0.0), grid_quad.grid);
  const auto z1_map = wigner_from_rho(pure_qubit(kPi, 0.0), grid_quad.grid);
  CHECK_NEAR(trace_product(z0_map, z1_map, grid_quad), 0.0, 1e-10);

  std::mt19937_64 rng(9);
  for (int tj : {1, 2, 3, 4}) {
    const HalfInt j = HalfInt::from_twice(tj);
    const auto quad = product_quadrature(tj + 2, 2 * tj + 4);
    for (int rep = 0; rep < 5; ++rep) {
      const auto a = testutil::random_rho(j, rng);
      const auto b = testutil::random_rho(j, rng);
      const double via_wigner = trace_product(wigner_from_rho(a, quad.grid),
                                              wigner_from_rho(b, quad.grid), quad);
      const double via_matrix = (a.entries() * b.entries()).trace().real();
      CHECK_NEAR(via_wigner, via_matrix, 1e-10);
    }
  }

  WignerMap other = y_map;
  other.grid = SphereGrid::uniform(3, 4);
  other.values.resize(other.grid.point_count());
  CHECK_THROWS_AS(trace_product(y_map, other, grid_quad), std::invalid_argument);
}

TEST_CASE("wigner normalization: int W = sqrt(8/(2j+1))") {
  std::mt19937_64 rng(10);
  for (int tj : {1, 2, 3, 4}) {
    const HalfInt j = HalfInt::from_twice(tj);
    const auto quad = product_quadrature(tj + 2, 2 * tj + 4);
    const auto map = wigner_from_rho(testutil::random_rho(j, rng), quad.grid);
    const double beam = integrate(std::span<const double>(map.values), quad);
    CHECK_NEAR(beam, std::sqrt(8.0 / (tj + 1.0)), 1e-10);
  }
}

TEST_CASE("wigner fidelity and purity reproduce the dephasing closed forms") {
  const double t2 = 2.64;
  const auto model = DephasingModel::make(t2);
  const auto y = pure_qubit(kPi / 2.0, kPi / 2.0);
  const auto quad = product_quadrature(8, 16);
  const auto ref_map = wigner_from_rho(y, quad.grid);

  for (double tau : {0.0, 1.0, t2, 2.0, 3.0 * t2}) {
    const auto dephased = dephase_qubit(y, tau, model);
    const auto map = wigner_from_rho(dephased, quad.grid);
    const double decay = std::exp(-(tau / t2) * (tau / t2));
    CHECK_NEAR(wigner_fidelity_to_pure(map, ref_map, quad), 0.5 + 0.5 * decay, 1e-10);
    CHECK_NEAR(wigner_purity(map, quad), 0.5 + 0.5 * decay * decay, 1e-10);
    // agreement with the matrix-side functionals
    CHECK_NEAR(wigner_fidelity_to_pure(map, ref_map, quad), uhlmann_fidelity(y, dephased), 1e-9);
    CHECK_NEAR(wigner_purity(map, quad), matrix_purity(dephased), 1e-10);
  }

  // non-pure reference is rejected, naming the purity
  const auto mixed_map = wigner_from_rho(mixed_qubit(), quad.grid);
  CHECK_THROWS_WITH_AS(wigner_fidelity_to_pure(ref_map, mixed_map, quad),
                       doctest::Contains("purity"), std::invalid_argument);
}

TEST_CASE("wigner_min: grid and refined extrema") {
  const auto y = pure_qubit(kPi / 2.0, kPi / 2.0);
  const auto grid = SphereGrid::paper_grid();
  const auto map = wigner_from_rho(y, grid);

  // the paper grid contains the exact antipode, so the grid minimum is exact
  const auto grid_min = wigner_min(map);
  CHECK_NEAR(grid_min.value, (1.0 - std::sqrt(3.0)) / (2.0 * kPi), 1e-12);
  CHECK_NEAR(grid_min.theta, kPi / 2.0, 1e-12);
  CHECK_NEAR(grid_min.phi, 3.0 * kPi / 2.0, 1e-12);

  // refined search off an intentionally coarse scan
  const auto eval = wigner_evaluator(y);
  const auto refined = wigner_min(eval, SphereGrid::uniform(7, 9));
  CHECK_NEAR(refined.value, (1.0 - std::sqrt(3.0)) / (2.0 * kPi), 1e-10);
  const auto top = wigner_max(eval, SphereGrid::uniform(7, 9));
  CHECK_NEAR(top.value, (1.0 + std::sqrt(3.0)) / (2.0 * kPi), 1e-10);
  CHECK_NEAR(top.theta, kPi / 2.0, 1e-4);
  CHECK_NEAR(top.phi, kPi / 2.0, 1e-4);

  // mixed state: constant map
  const auto flat = wigner_min(wigner_from_rho(mixed_qubit(), grid));
  CHECK_NEAR(flat.value, 1.0 / (2.0 * kPi), 1e-14);

  // dephased |y> with coherence 1/sqrt(3): minimum exactly zero
  const double t2 = 2.64;
  const double tau_star = t2 * std::sqrt(std::log(std::sqrt(3.0)));
  const auto critical = dephase_qubit(y, tau_star, DephasingModel::make(t2));
  const auto crit_min = wigner_min(wigner_evaluator(critical), SphereGrid::uniform(13, 16));
  CHECK_NEAR(crit_min.value, 0.0, 1e-9);
}

TEST_CASE("angular_momentum: against Tr(rho J)") {
  const auto quad = product_quadrature(6, 12);
  const auto y = pure_qubit(kPi / 2.0, kPi / 2.0);
  const auto jy = angular_momentum(wigner_from_rho(y, quad.grid), quad);
  CHECK_NEAR(jy[0], 0.0, 1e-10);
  CHECK_NEAR(jy[1], 0.5, 1e-10);
  CHECK_NEAR(jy[2], 0.0, 1e-10);

  const auto mixed = angular_momentum(wigner_from_rho(mixed_qubit(), quad.grid), quad);
  for (double v : mixed) CHECK_NEAR(v, 0.0, 1e-12);

  const auto top = spin_coherent(1, 0.0, 0.0);
  const auto jtop = angular_momentum(wigner_from_rho(top, quad.grid), quad);
  CHECK_NEAR(jtop[0], 0.0, 1e-10);
  CHECK_NEAR(jtop[1], 0.0, 1e-10);
  CHECK_NEAR(jtop[2], 1.0, 1e-10);

  std::mt19937_64 rng(12);
  for (int tj : {1, 2, 3}) {
    const HalfInt j = HalfInt::from_twice(tj);
    const auto rho = testutil::random_rho(j, rng);
    const auto ops = spin_operators(j);
    const auto got = angular_momentum(wigner_from_rho(rho, quad.grid), quad);
    CHECK_NEAR(got[0], (rho.entries() * ops.jx).trace().real(), 1e-10);
    CHECK_NEAR(got[1], (rho.entries() * ops.jy).trace().real(), 1e-10);
    CHECK_NEAR(got[2], (rho.entries() * ops.jz).trace().real(), 1e-10);
  }
}

TEST_CASE("qubit_wigner_closed_form matches the forward map pointwise") {
  CHECK_NEAR(qubit_wigner_closed_form(0.0, 0.3, 0.9, 1.0, 2.0), 1.0 / (2.0 * kPi), 1e-15);
  CHECK_NEAR(qubit_wigner_closed_form(1.0, 0.7, 1.1, 0.7, 1.1),
             (1.0 + std::sqrt(3.0)) / (2.0 * kPi), 1e-14);
  CHECK_NEAR(qubit_wigner_closed_form(1.0, 0.7, 1.1, kPi - 0.7, 1.1 + kPi),
             (1.0 - std::sqrt(3.0)) / (2.0 * kPi), 1e-14);
  CHECK_THROWS_AS(qubit_wigner_closed_form(1.2, 0.0, 0.0, 0.0, 0.0), std::invalid_argument);

  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double r = uni(rng);
    const double eps = uni(rng) * kPi, eta = uni(rng) * 2.0 * kPi;
    const double theta = uni(rng) * kPi, phi = uni(rng) * 2.0 * kPi;
    // rho = r * pure(eps, eta) + (1 - r) * I/2 has Bloch vector length r
    const auto rho = DensityMatrix::create(
        kHalf, r * pure_qubit(eps, eta).entries() + (1.0 - r) * mixed_qubit().entries());
    CHECK_NEAR(qubit_wigner_closed_form(r, eps, eta, theta, phi), wigner_evaluator(rho)(theta, phi),
               1e-12);
  }
}

TEST_CASE("rotational covariance: W_{U rho U^dag}(n) = W_rho(R^{-1} n)") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int tj : {1, 2, 3}) {
    const HalfInt j = HalfInt::from_twice(tj);
    const auto rho = testutil::random_rho(j, rng);
    const double theta0 = uni(rng) * kPi, phi0 = uni(rng) * 2.0 * kPi;
    const auto u = rotation_unitary(j, theta0, phi0);
    const auto rotated = DensityMatrix::create(j, u.entries * rho.entries() * u.entries.adjoint());
    const auto w0 = wigner_evaluator(rho);
    const auto w1 = wigner_evaluator(rotated);

    // R = right-handed rotation by theta0 about (cos phi0, sin phi0, 0)
    const Eigen::Vector3d axis(std::cos(phi0), std::sin(phi0), 0.0);
    const Eigen::AngleAxisd rot(theta0, axis);
    for (int rep = 0; rep < 12; ++rep) {
      const double t = uni(rng) * kPi, p = uni(rng) * 2.0 * kPi;
      const Eigen::Vector3d n(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t));
      const Eigen::Vector3d pre = rot.inverse() * n;
      const double tp = std::acos(std::clamp(pre.z(), -1.0, 1.0));
      const double pp = std::atan2(pre.y(), pre.x());
      CHECK_NEAR(w1(t, p), w0(tp, pp), 1e-10);
    }
  }
}

TEST_CASE("negativity threshold: W_min crosses zero exactly at purity 2/3") {
  const double t2 = 2.64;
  const auto model = DephasingModel::make(t2);
  const auto y = pure_qubit(kPi / 2.0, kPi / 2.0);
  const auto quad = product_quadrature(6, 12);
  const auto scan = SphereGrid::uniform(13, 16);

  // bisection on tau for wigner_min = 0
  double lo = 1.0, hi = 2.6;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    const auto rho = dephase_qubit(y, mid, model);
    (wigner_min(wigner_evaluator(rho), scan).value < 0.0 ? lo : hi) = mid;
  }
  const double tau_star = 0.5 * (lo + hi);
  CHECK_NEAR(tau_star, t2 * std::sqrt(std::log(std::sqrt(3.0))), 1e-6);
  const auto at_crossing = dephase_qubit(y, tau_star, model);
  CHECK_NEAR(wigner_purity(wigner_from_rho(at_crossing, quad.grid), quad), 2.0 / 3.0, 1e-6);
}

TEST_CASE("linearity: W of a convex mixture is the mixture of W maps") {
  std::mt19937_64 rng(16);
  const auto grid = SphereGrid::uniform(5, 8);
  for (int tj : {1, 3}) {
    const HalfInt j = HalfInt::from_twice(tj);
    const auto a = testutil::random_rho(j, rng);
    const auto b = testutil::random_rho(j, rng);
    const double alpha = 0.37;
    const auto mix =
        DensityMatrix::create(j, alpha * a.entries() + (1.0 - alpha) * b.entries());
    const auto wa = wigner_from_rho(a, grid);
    const auto wb = wigner_from_rho(b, grid);
    const auto wmix = wigner_from_rho(mix, grid);
    for (std::size_t i = 0; i < wmix.values.size(); ++i) {
      CHECK_NEAR(wmix.values[i], alpha * wa.values[i] + (1.0 - alpha) * wb.values[i], 1e-13);
    }
  }
}
