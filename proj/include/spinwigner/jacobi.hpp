#pragma once

#include <Eigen/Dense>

namespace spinwigner {

// A = V * diag(eigenvalues) * V^dagger, eigenvalues ascending.
struct HermitianEigensystem {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
};

// Cyclic complex Jacobi rotations; the matrices in this project are small
// (dimension <= ~21) so plain Jacobi converges in a handful of sweeps.
// Stops when the off-diagonal Frobenius norm drops below tol * ||A||_F.
HermitianEigensystem hermitian_eigensystem(const Eigen::MatrixXcd& a, double tol = 1e-14);

}  // namespace spinwigner
