#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "spinwigner/spin_state.hpp"
#include "spinwigner/sphere.hpp"

namespace spinwigner {

// W(theta, phi) sampled on a grid. `shots` records how the samples were
// produced (0 = exact/analytic).
struct WignerMap {
  SphereGrid grid;
  std::vector<double> values;  // row-major parallel to grid points
  HalfInt j;
  long long shots = 0;
};

// Spin-projection probabilities p_m (m = j..-j) at every grid node, plus the
// shot count that produced them (0 = exact).
struct ProbabilityGrid {
  SphereGrid grid;
  HalfInt j;
  std::vector<double> probs;  // node-major: probs[node*(2j+1) + (j-m)]
  long long shots = 0;
  std::uint64_t seed = 0;

  int levels() const { return j.twice() + 1; }
  std::span<const double> at(std::size_t node) const {
    return {probs.data() + node * levels(), static_cast<std::size_t>(levels())};
  }
};

// Continuous W evaluator, used where off-grid values are needed (extremum
// refinement, Gauss-grid projection).
using WignerEvaluator = std::function<double(double theta, double phi)>;

struct WignerExtremum {
  double value;
  double theta;
  double phi;
};

// Forward map: W = sqrt(2/pi) sum_kq Y_kq rho_kq. Throws if the imaginary
// residue of the sum exceeds 1e-9 (broken Hermiticity upstream).
WignerMap wigner_from_rho(const DensityMatrix& rho, const SphereGrid& grid);

// Same map as a continuous evaluator.
WignerEvaluator wigner_evaluator(const DensityMatrix& rho);

// Pointwise reconstruction: W = sqrt(2/pi) sum_m p_m R_mj. The probability
// vector must sum to 1 within 1e-6 with entries in [-1e-9, 1+1e-9].
double wigner_point(std::span<const double> probs, HalfInt j);

// wigner_point at every node of a ProbabilityGrid.
WignerMap reconstruct(const ProbabilityGrid& pg);

// Inverse map by harmonic projection: rho_kq = sqrt(pi/2) int Y*_kq W dOmega.
// The raw rho_00 must land within rho00_tol of 1/sqrt(2j+1) or the quadrature
// is reported as insufficient. The result is Hermitized and renormalized, so
// measurement-grade quadratures (grid_quadrature, ~1e-3) still produce a valid
// state when called with a matching rho00_tol.
DensityMatrix rho_from_wigner(const WignerEvaluator& w, HalfInt j, const SphereQuadrature& quad,
                              double rho00_tol = 1e-6);
DensityMatrix rho_from_wigner(const WignerMap& map, const SphereQuadrature& quad,
                              double rho00_tol = 1e-6);

// (pi/2) int W1 W2 dOmega = Tr(rho1 rho2). The pi/2 constant follows from the
// sqrt(2/pi) prefactor of the forward map plus multipole orthonormality.
double trace_product(const WignerMap& w1, const WignerMap& w2, const SphereQuadrature& quad);

// P = Tr(rho^2) through the map.
double wigner_purity(const WignerMap& w, const SphereQuadrature& quad);

// F against a PURE reference map (the integral form equals Uhlmann fidelity
// only then; the reference purity is verified to 1e-6 and reported on error).
double wigner_fidelity_to_pure(const WignerMap& w_tau, const WignerMap& w_ref,
                               const SphereQuadrature& quad);

// Minimum over the stored samples.
WignerExtremum wigner_min(const WignerMap& map);
WignerExtremum wigner_max(const WignerMap& map);

// Scan `scan` then refine by coordinate descent with step halving to 1e-10 in
// value.
WignerExtremum wigner_min(const WignerEvaluator& w, const SphereGrid& scan);
WignerExtremum wigner_max(const WignerEvaluator& w, const SphereGrid& scan);

// <J_i> = c_J int f_i W dOmega with f = (sin t cos p, sin t sin p, cos t) and
// c_J = sqrt(j(j+1)(2j+1)/8), the constant consistent with the forward map.
std::array<double, 3> angular_momentum(const WignerMap& w, const SphereQuadrature& quad);

// Closed-form single-qubit Wigner function for Bloch vector r*(sin eps cos
// eta, sin eps sin eta, cos eps):
//   W = (1 + sqrt(3) r [sin eps sin th cos(phi - eta) + cos eps cos th])/(2 pi).
double qubit_wigner_closed_form(double r, double epsilon, double eta, double theta, double phi);

}  // namespace spinwigner
