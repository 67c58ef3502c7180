#include "spinwigner/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "spinwigner/angular.hpp"

namespace spinwigner {

namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> wigner_sum(const MultipoleDecomposition& d, double theta, double phi) {
  const auto y = harmonic_table(d.j.twice(), theta, phi);
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < d.coeffs.size(); ++i) sum += y[i] * d.coeffs[i];
  return kSqrt2OverPi * sum;
}

void require_same_grid(const WignerMap& a, const WignerMap& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("wigner maps sampled on different grids");
}

void require_quad_matches(const WignerMap& map, const SphereQuadrature& quad) {
  if (!(map.grid == quad.grid)) {
    throw std::invalid_argument("quadrature nodes do not match the map grid");
  }
}

}  // namespace

WignerMap wigner_from_rho(const DensityMatrix& rho, const SphereGrid& grid) {
  const MultipoleDecomposition d = rho_to_multipole(rho);
  WignerMap map;
  map.grid = grid;
  map.j = rho.j();
  map.values.resize(grid.point_count());
  double worst_imag = 0.0;
  for (std::size_t it = 0; it < grid.theta.size(); ++it) {
    for (std::size_t ip = 0; ip < grid.phi.size(); ++ip) {
      const std::complex<double> w = wigner_sum(d, grid.theta[it], grid.phi[ip]);
      worst_imag = std::max(worst_imag, std::abs(w.imag()));
      map.values[grid.index(it, ip)] = w.real();
    }
  }
  if (worst_imag > 1e-9) {
    throw std::runtime_error("wigner_from_rho: imaginary residue " + std::to_string(worst_imag) +
                             " signals broken Hermiticity");
  }
  return map;
}

WignerEvaluator wigner_evaluator(const DensityMatrix& rho) {
  return [d = rho_to_multipole(rho)](double theta, double phi) {
    return wigner_sum(d, theta, phi).real();
  };
}

double wigner_point(std::span<const double> probs, HalfInt j) {
  if (probs.size() != static_cast<std::size_t>(j.twice() + 1)) {
    throw std::invalid_argument("wigner_point: expected " + std::to_string(j.twice() + 1) +
                                " probabilities, got " + std::to_string(probs.size()));
  }
  double total = 0.0;
  for (double p : probs) {
    if (p < -1e-9 || p > 1.0 + 1e-9) {
      throw std::invalid_argument("wigner_point: probability " + std::to_string(p) + " outside [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw std::invalid_argument("wigner_point: probabilities sum to " + std::to_string(total));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    sum += probs[i] * reconstruction_weight(j, j - HalfInt(static_cast<int>(i)));
  }
  return kSqrt2OverPi * sum;
}

WignerMap reconstruct(const ProbabilityGrid& pg) {
  WignerMap map;
  map.grid = pg.grid;
  map.j = pg.j;
  map.shots = pg.shots;
  map.values.resize(pg.grid.point_count());
  for (std::size_t node = 0; node < map.values.size(); ++node) {
    try {
      map.values[node] = wigner_point(pg.at(node), pg.j);
    } catch (const std::invalid_argument& e) {
      const std::size_t it = node / pg.grid.phi.size();
      const std::size_t ip = node % pg.grid.phi.size();
      throw std::invalid_argument("reconstruct: node (theta=" + std::to_string(pg.grid.theta[it]) +
                                  ", phi=" + std::to_string(pg.grid.phi[ip]) + "): " + e.what());
    }
  }
  return map;
}

namespace {

DensityMatrix project_to_rho(const std::function<double(std::size_t)>& sample, HalfInt j,
                             const SphereQuadrature& quad, double rho00_tol) {
  const int kmax = j.twice();
  const std::size_t n = quad.weights.size();

  MultipoleDecomposition d;
  d.j = j;
  d.coeffs.assign(static_cast<std::size_t>(kmax + 1) * (kmax + 1), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = harmonic_table(kmax, quad.node_theta(i), quad.node_phi(i));
    const double wval = sample(i) * quad.weights[i];
    for (std::size_t kq = 0; kq < d.coeffs.size(); ++kq) {
      d.coeffs[kq] += std::conj(y[kq]) * wval;
    }
  }
  const double front = std::sqrt(std::numbers::pi / 2.0);
  for (auto& c : d.coeffs) c *= front;

  const double rho00_expected = 1.0 / std::sqrt(j.twice() + 1.0);
  if (std::abs(d.coeffs[0] - rho00_expected) > rho00_tol) {
    throw std::runtime_error("rho_from_wigner: insufficient quadrature (rho_00 = " +
                             std::to_string(d.coeffs[0].real()) + " expected " +
                             std::to_string(rho00_expected) + ")");
  }

  // Quadrature noise breaks the exact conjugation pattern of the
  // coefficients; Hermitize and renormalize before validating, so the
  // measurement-grade path still yields a legal state. Exact quadratures are
  // untouched beyond rounding.
  const int dim = j.twice() + 1;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k <= kmax; ++k) {
    for (int q = -k; q <= k; ++q) {
      const std::complex<double> c = d.at(k, q);
      for (int row = 0; row < dim; ++row) {
        const HalfInt m = j - HalfInt(row);
        const HalfInt mp = m - HalfInt(q);
        if (mp.abs() > j || (j + mp).twice() % 2 != 0) continue;
        const int col = (j - mp).to_int();
        rho(row, col) += c * multipole_coeff(j, m, mp, HalfInt(k), HalfInt(q));
      }
    }
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return DensityMatrix::create(j, std::move(rho));
}

}  // namespace

DensityMatrix rho_from_wigner(const WignerEvaluator& w, HalfInt j, const SphereQuadrature& quad,
                              double rho00_tol) {
  std::vector<double> samples(quad.weights.size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = w(quad.node_theta(i), quad.node_phi(i));
  return project_to_rho([&](std::size_t i) { return samples[i]; }, j, quad, rho00_tol);
}

DensityMatrix rho_from_wigner(const WignerMap& map, const SphereQuadrature& quad, double rho00_tol) {
  require_quad_matches(map, quad);
  return project_to_rho([&](std::size_t i) { return map.values[i]; }, map.j, quad, rho00_tol);
}

double trace_product(const WignerMap& w1, const WignerMap& w2, const SphereQuadrature& quad) {
  require_same_grid(w1, w2);
  require_quad_matches(w1, quad);
  double acc = 0.0;
  for (std::size_t i = 0; i < quad.weights.size(); ++i) {
    acc += quad.weights[i] * w1.values[i] * w2.values[i];
  }
  return 0.5 * std::numbers::pi * acc;
}

double wigner_purity(const WignerMap& w, const SphereQuadrature& quad) {
  return trace_product(w, w, quad);
}

double wigner_fidelity_to_pure(const WignerMap& w_tau, const WignerMap& w_ref,
                               const SphereQuadrature& quad) {
  const double ref_purity = wigner_purity(w_ref, quad);
  if (std::abs(ref_purity - 1.0) > 1e-6) {
    throw std::invalid_argument("wigner_fidelity_to_pure: reference is not pure (purity " +
                                std::to_string(ref_purity) + ")");
  }
  return trace_product(w_tau, w_ref, quad);
}

WignerExtremum wigner_min(const WignerMap& map) {
  if (map.values.empty()) throw std::invalid_argument("wigner_min: empty map");
  const auto it = std::min_element(map.values.begin(), map.values.end());
  const std::size_t node = static_cast<std::size_t>(it - map.values.begin());
  return {*it, map.grid.theta[node / map.grid.phi.size()], map.grid.phi[node % map.grid.phi.size()]};
}

WignerExtremum wigner_max(const WignerMap& map) {
  WignerMap negated = map;
  for (auto& v : negated.values) v = -v;
  WignerExtremum e = wigner_min(negated);
  e.value = -e.value;
  return e;
}

namespace {

WignerExtremum refine_min(const WignerEvaluator& w, const SphereGrid& scan) {
  // Start from the best scan node.
  double best = std::numeric_limits<double>::infinity();
  double theta = 0.0, phi = 0.0;
  for (double t : scan.theta) {
    for (double p : scan.phi) {
      const double v = w(t, p);
      if (v < best) {
        best = v;
        theta = t;
        phi = p;
      }
    }
  }

  // Coordinate descent with step halving; tolerance 1e-10 in value.
  double dt = scan.theta.size() > 1 ? scan.theta[1] - scan.theta[0] : 0.5;
  double dp = scan.phi.size() > 1 ? scan.phi[1] - scan.phi[0] : 0.5;
  for (int iter = 0; iter < 200; ++iter) {
    const double before = best;
    bool moved = true;
    while (moved) {
      moved = false;
      for (const auto& [nt, np] :
           {std::pair{theta + dt, phi}, {theta - dt, phi}, {theta, phi + dp}, {theta, phi - dp}}) {
        const double ct = std::clamp(nt, 0.0, std::numbers::pi);
        double cp = std::fmod(np, kTwoPi);
        if (cp < 0) cp += kTwoPi;
        const double v = w(ct, cp);
        if (v < best) {
          best = v;
          theta = ct;
          phi = cp;
          moved = true;
        }
      }
    }
    dt *= 0.5;
    dp *= 0.5;
    if (before - best < 1e-10 && dt < 1e-8 && dp < 1e-8) break;
  }
  return {best, theta, phi};
}

}  // namespace

WignerExtremum wigner_min(const WignerEvaluator& w, const SphereGrid& scan) {
  return refine_min(w, scan);
}

WignerExtremum wigner_max(const WignerEvaluator& w, const SphereGrid& scan) {
  WignerExtremum e = refine_min([&](double t, double p) { return -w(t, p); }, scan);
  e.value = -e.value;
  return e;
}

std::array<double, 3> angular_momentum(const WignerMap& w, const SphereQuadrature& quad) {
  require_quad_matches(w, quad);
  const double jv = w.j.value();
  const double c_j = std::sqrt(jv * (jv + 1.0) * (2.0 * jv + 1.0) / 8.0);
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < quad.weights.size(); ++i) {
    const double t = quad.node_theta(i);
    const double p = quad.node_phi(i);
    const double wv = quad.weights[i] * w.values[i];
    out[0] += wv * std::sin(t) * std::cos(p);
    out[1] += wv * std::sin(t) * std::sin(p);
    out[2] += wv * std::cos(t);
  }
  for (double& v : out) v *= c_j;
  return out;
}

double qubit_wigner_closed_form(double r, double epsilon, double eta, double theta, double phi) {
  if (r < 0.0 || r > 1.0) throw std::invalid_argument("qubit_wigner_closed_form: r outside [0, 1]");
  const double dot = std::sin(epsilon) * std::sin(theta) * std::cos(phi - eta) +
                     std::cos(epsilon) * std::cos(theta);
  return (1.0 + std::sqrt(3.0) * r * dot) / kTwoPi;
}

}  // namespace spinwigner
