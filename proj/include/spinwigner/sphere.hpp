#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "spinwigner/half_int.hpp"

namespace spinwigner {

// Tensor grid on the unit sphere. Points are enumerated row-major with theta
// as the outer index: index(it, ip) = it * n_phi + ip.
struct SphereGrid {
  std::vector<double> theta;  // radians, strictly increasing, in [0, pi]
  std::vector<double> phi;    // radians, strictly increasing, in [0, 2*pi)

  std::size_t point_count() const { return theta.size() * phi.size(); }
  std::size_t index(std::size_t it, std::size_t ip) const { return it * phi.size() + ip; }

  // Validates the node invariants; throws std::invalid_argument on violation.
  static SphereGrid make(std::vector<double> theta, std::vector<double> phi);

  // theta = 0..pi in `theta_steps` equal steps (theta_steps+1 nodes), phi
  // periodic with `phi_steps` nodes starting at 0. The measurement grid used
  // throughout: paper_grid() = uniform(60, 20).
  static SphereGrid uniform(int theta_steps, int phi_steps);
  static SphereGrid paper_grid() { return uniform(60, 20); }

  bool operator==(const SphereGrid&) const = default;
};

// Nodes (as a SphereGrid, row-major) with one weight per node, in steradians.
struct SphereQuadrature {
  SphereGrid grid;
  std::vector<double> weights;

  double node_theta(std::size_t i) const { return grid.theta[i / grid.phi.size()]; }
  double node_phi(std::size_t i) const { return grid.phi[i % grid.phi.size()]; }
};

// Sampled complex field on a grid; values row-major parallel to grid points.
struct ScalarField {
  SphereGrid grid;
  std::vector<std::complex<double>> values;

  static ScalarField make(SphereGrid grid, std::vector<std::complex<double>> values);
};

// Orthonormal spherical harmonic Y_kq(theta, phi) with Condon-Shortley phase,
// via upward recursion on fully normalized associated Legendre functions.
std::complex<double> spherical_harmonic(HalfInt k, int q, double theta, double phi);

// All Y_kq for k = 0..k_max at one point, flattened as [k*k + (q+k)].
std::vector<std::complex<double>> harmonic_table(int k_max, double theta, double phi);

// n-point Gauss-Legendre rule on (-1, 1); nodes ascending; exact for
// polynomials of degree <= 2n-1.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(int n);

// Gauss-Legendre in cos(theta) tensored with the n_phi-point uniform
// periodic rule in phi. Integrates spherical polynomials of harmonic degree
// <= min(2*n_theta - 1, n_phi - 1) exactly.
SphereQuadrature product_quadrature(int n_theta, int n_phi);

// Composite trapezoid in theta (sin(theta) Jacobian folded into the weights)
// times the periodic midpoint rule in phi, on an existing measurement grid.
// Accurate to O(h^2); weight sum within 0.1% of 4*pi on the 61x20 grid.
SphereQuadrature grid_quadrature(const SphereGrid& grid);

// sum_i w_i * f(node_i). Sample spans must be row-major parallel to the
// quadrature grid. Non-finite samples raise std::invalid_argument.
double integrate(std::span<const double> samples, const SphereQuadrature& quad);
std::complex<double> integrate(std::span<const std::complex<double>> samples,
                               const SphereQuadrature& quad);
double integrate(const std::function<double(double, double)>& f, const SphereQuadrature& quad);
std::complex<double> integrate(const std::function<std::complex<double>(double, double)>& f,
                               const SphereQuadrature& quad);

}  // namespace spinwigner
