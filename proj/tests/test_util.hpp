#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "spinwigner/spin_state.hpp"

// Absolute-tolerance comparison; doctest decomposes the expression so both
// sides show up on failure.
#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))
#define REQUIRE_NEAR(a, b, tol) REQUIRE(std::abs((a) - (b)) <= (tol))

namespace testutil {

// Random full-rank density matrix (Ginibre ensemble).
inline spinwigner::DensityMatrix random_rho(spinwigner::HalfInt j, std::mt19937_64& rng) {
  const int dim = j.twice() + 1;
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd g(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) g(r, c) = std::complex<double>(gauss(rng), gauss(rng));
  }
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  // round off the anti-Hermitian dust so the constructor check passes cleanly
  rho = (0.5 * (rho + rho.adjoint())).eval();
  return spinwigner::DensityMatrix::create(j, std::move(rho));
}

// Random pure state.
inline spinwigner::DensityMatrix random_pure(spinwigner::HalfInt j, std::mt19937_64& rng) {
  const int dim = j.twice() + 1;
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd psi(dim);
  for (int r = 0; r < dim; ++r) psi[r] = std::complex<double>(gauss(rng), gauss(rng));
  psi.normalize();
  return spinwigner::DensityMatrix::create(j, psi * psi.adjoint());
}

}  // namespace testutil
