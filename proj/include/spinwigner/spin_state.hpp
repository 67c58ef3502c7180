#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "spinwigner/half_int.hpp"

namespace spinwigner {

// Dicke-basis ordering used everywhere: row/column i corresponds to
// m = j - i, i.e. m runs j, j-1, ..., -j. For the qubit, |0> is m = +1/2 and
// |1> is m = -1/2 (which physical m_s level carries which label is a
// documentation matter, not encoded here).

// Density matrix of a spin-j system. Construction enforces Hermiticity and
// unit trace to 1e-12; positivity is checked by the operations that need it,
// so slightly unphysical measured matrices stay representable.
class DensityMatrix {
 public:
  static DensityMatrix create(HalfInt j, Eigen::MatrixXcd entries);

  HalfInt j() const { return j_; }
  int dim() const { return j_.twice() + 1; }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  std::complex<double> operator()(int row, int col) const { return entries_(row, col); }

  // Smallest eigenvalue; >= -1e-10 for physical states.
  double min_eigenvalue() const;

 private:
  DensityMatrix(HalfInt j, Eigen::MatrixXcd entries) : j_(j), entries_(std::move(entries)) {}
  HalfInt j_;
  Eigen::MatrixXcd entries_;
};

// Spherical-tensor components rho_kq of a density matrix, k = 0..2j,
// q = -k..k, flattened as [k*k + (q+k)].
struct MultipoleDecomposition {
  HalfInt j;
  std::vector<std::complex<double>> coeffs;

  std::complex<double>& at(int k, int q) { return coeffs[k * k + q + k]; }
  const std::complex<double>& at(int k, int q) const { return coeffs[k * k + q + k]; }
};

struct UnitaryMatrix {
  HalfInt j;
  Eigen::MatrixXcd entries;
};

// Gaussian dephasing: off-diagonal coherences decay as exp[-(tau/T2*)^2].
struct DephasingModel {
  double t2_star_us;

  static DephasingModel make(double t2_star_us);
};

struct SpinOperators {
  Eigen::MatrixXcd jx, jy, jz;
};

// Ladder-operator construction; Jz diagonal with entries m = j..-j.
SpinOperators spin_operators(HalfInt j);

// Projector onto cos(eps/2)|0> + e^{i eta} sin(eps/2)|1>; Bloch vector
// (sin eps cos eta, sin eps sin eta, cos eps).
DensityMatrix pure_qubit(double epsilon, double eta);

// Spin-coherent state: the maximal-weight state |j, j> rotated to point along
// (epsilon, eta); equals pure_qubit at j = 1/2.
DensityMatrix spin_coherent(HalfInt j, double epsilon, double eta);

// exp(-i theta (cos(phi) Jx + sin(phi) Jy)), via eigendecomposition of the
// Hermitian generator. At j = 1/2 this is the tomography pulse
// exp(-i theta/2 (cos(phi) sigma_x + sin(phi) sigma_y)).
UnitaryMatrix rotation_unitary(HalfInt j, double theta, double phi);

MultipoleDecomposition rho_to_multipole(const DensityMatrix& rho);

// Inverse transform; rejects coefficient sets whose matrix fails the
// Hermiticity or trace checks of DensityMatrix::create.
DensityMatrix multipole_to_rho(const MultipoleDecomposition& d);

// Qubit dephasing channel for an idle time tau (microseconds).
DensityMatrix dephase_qubit(const DensityMatrix& rho, double tau_us, const DephasingModel& model);

// Uhlmann fidelity F = (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2. Eigenvalues
// in [-1e-10, 0) are clipped to zero; anything lower is an error.
double uhlmann_fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);

// Tr(rho^2).
double matrix_purity(const DensityMatrix& rho);

// Linear inversion rho = (I + s . sigma)/2 from Pauli expectation values.
// With clip_to_physical the result is projected to the nearest PSD trace-1
// matrix by eigenvalue clipping (useful when ||s|| > 1 from measurement
// noise); default off so raw data stays untouched.
DensityMatrix bloch_inversion(double sx, double sy, double sz, bool clip_to_physical = false);

// Bloch vector (eigenvalue-free readout of Pauli expectations, j = 1/2 only).
std::array<double, 3> bloch_vector(const DensityMatrix& rho);

}  // namespace spinwigner
