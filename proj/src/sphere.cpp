#include "spinwigner/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinwigner {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;

void check_strictly_increasing(const std::vector<double>& v, const char* name) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) {
      throw std::invalid_argument(std::string("SphereGrid: ") + name + " nodes not strictly increasing");
    }
  }
}

// Fully normalized associated Legendre values N_l^m(cos theta) for all
// 0 <= m <= l <= l_max, with the Condon-Shortley phase folded in so that
// Y_lm = N_l^m * exp(i m phi) for m >= 0. Flattened as [l(l+1)/2 + m].
std::vector<double> legendre_table(int l_max, double theta) {
  const double x = std::cos(theta);
  const double s = std::sin(theta);  // >= 0 on [0, pi]
  std::vector<double> n((l_max + 1) * (l_max + 2) / 2);
  auto at = [&](int l, int m) -> double& { return n[l * (l + 1) / 2 + m]; };

  at(0, 0) = 1.0 / std::sqrt(kFourPi);
  for (int m = 1; m <= l_max; ++m) {
    at(m, m) = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * at(m - 1, m - 1);
  }
  for (int m = 0; m < l_max; ++m) {
    at(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * at(m, m);
    for (int l = m + 2; l <= l_max; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
      const double b =
          std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      at(l, m) = a * (x * at(l - 1, m) - b * at(l - 2, m));
    }
  }
  return n;
}

// Legendre polynomial value and derivative at x, by the three-term recurrence.
std::pair<double, double> legendre_pd(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

SphereGrid SphereGrid::make(std::vector<double> theta, std::vector<double> phi) {
  if (theta.empty() || phi.empty()) throw std::invalid_argument("SphereGrid: empty node list");
  check_strictly_increasing(theta, "theta");
  check_strictly_increasing(phi, "phi");
  if (theta.front() < -1e-12 || theta.back() > std::numbers::pi + 1e-12) {
    throw std::invalid_argument("SphereGrid: theta outside [0, pi]");
  }
  if (phi.front() < -1e-12 || phi.back() >= kTwoPi) {
    throw std::invalid_argument("SphereGrid: phi outside [0, 2*pi)");
  }
  SphereGrid g;
  g.theta = std::move(theta);
  g.phi = std::move(phi);
  return g;
}

SphereGrid SphereGrid::uniform(int theta_steps, int phi_steps) {
  if (theta_steps < 1 || phi_steps < 1) {
    throw std::invalid_argument("SphereGrid::uniform: step counts must be >= 1");
  }
  std::vector<double> theta(theta_steps + 1), phi(phi_steps);
  for (int i = 0; i <= theta_steps; ++i) theta[i] = std::numbers::pi * i / theta_steps;
  // phi sweeps [0, 2*pi) only: a node at 2*pi would duplicate the seam.
  for (int i = 0; i < phi_steps; ++i) phi[i] = kTwoPi * i / phi_steps;
  return make(std::move(theta), std::move(phi));
}

ScalarField ScalarField::make(SphereGrid grid, std::vector<std::complex<double>> values) {
  if (values.size() != grid.point_count()) {
    throw std::invalid_argument("ScalarField: value count does not match grid");
  }
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument("ScalarField: non-finite value");
    }
  }
  return ScalarField{std::move(grid), std::move(values)};
}

std::complex<double> spherical_harmonic(HalfInt k, int q, double theta, double phi) {
  if (!k.is_integer() || k.twice() < 0) {
    throw std::invalid_argument("spherical_harmonic: k must be a nonnegative integer");
  }
  const int l = k.to_int();
  if (std::abs(q) > l) throw std::invalid_argument("spherical_harmonic: |q| > k");
  const int mq = std::abs(q);
  const auto table = legendre_table(l, theta);
  const double n = table[l * (l + 1) / 2 + mq];
  const std::complex<double> e(std::cos(mq * phi), std::sin(mq * phi));
  if (q >= 0) return n * e;
  // Y_{k,-q} = (-1)^q conj(Y_kq)
  return (mq % 2 == 0 ? 1.0 : -1.0) * n * std::conj(e);
}

std::vector<std::complex<double>> harmonic_table(int k_max, double theta, double phi) {
  const auto leg = legendre_table(k_max, theta);
  std::vector<std::complex<double>> y((k_max + 1) * (k_max + 1));
  for (int l = 0; l <= k_max; ++l) {
    for (int m = 0; m <= l; ++m) {
      const double n = leg[l * (l + 1) / 2 + m];
      const std::complex<double> e(std::cos(m * phi), std::sin(m * phi));
      y[l * l + (m + l)] = n * e;
      y[l * l + (l - m)] = (m % 2 == 0 ? 1.0 : -1.0) * n * std::conj(e);
    }
  }
  return y;
}

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi-type initial guess, then Newton; roots are simple and the
    // guess is close enough that bracketing never triggers in practice.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, d] = legendre_pd(n, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // one polishing step
        const auto [p2, d2] = legendre_pd(n, x);
        x -= p2 / d2;
        dp = d2;
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;  // i-th guess is the largest root; store ascending
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

SphereQuadrature product_quadrature(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) {
    throw std::invalid_argument("product_quadrature: node counts must be >= 1");
  }
  const auto gl = gauss_legendre(n_theta);
  // x ascending => theta = acos(x) descending; flip to ascending theta.
  std::vector<double> theta(n_theta), wtheta(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    theta[i] = std::acos(gl.nodes[n_theta - 1 - i]);
    wtheta[i] = gl.weights[n_theta - 1 - i];
  }
  std::vector<double> phi(n_phi);
  for (int i = 0; i < n_phi; ++i) phi[i] = kTwoPi * i / n_phi;

  SphereQuadrature quad;
  quad.grid = SphereGrid::make(std::move(theta), std::move(phi));
  quad.weights.resize(quad.grid.point_count());
  const double wphi = kTwoPi / n_phi;
  for (int it = 0; it < n_theta; ++it) {
    for (int ip = 0; ip < n_phi; ++ip) {
      quad.weights[quad.grid.index(it, ip)] = wtheta[it] * wphi;
    }
  }
  return quad;
}

SphereQuadrature grid_quadrature(const SphereGrid& grid) {
  const auto nt = grid.theta.size();
  const auto np = grid.phi.size();
  if (nt < 2 || np < 2) {
    throw std::invalid_argument("grid_quadrature: need at least 2 nodes per direction");
  }
  std::vector<double> wtheta(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const double left = (i == 0) ? grid.theta[0] : grid.theta[i - 1];
    const double right = (i + 1 == nt) ? grid.theta[nt - 1] : grid.theta[i + 1];
    wtheta[i] = 0.5 * (right - left) * std::sin(grid.theta[i]);
  }
  // Periodic midpoint weights in phi (wrap the last interval through 2*pi).
  std::vector<double> wphi(np);
  for (std::size_t i = 0; i < np; ++i) {
    const double prev = (i == 0) ? grid.phi[np - 1] - kTwoPi : grid.phi[i - 1];
    const double next = (i + 1 == np) ? grid.phi[0] + kTwoPi : grid.phi[i + 1];
    wphi[i] = 0.5 * (next - prev);
  }

  SphereQuadrature quad;
  quad.grid = grid;
  quad.weights.resize(grid.point_count());
  double total = 0.0;
  for (std::size_t it = 0; it < nt; ++it) {
    for (std::size_t ip = 0; ip < np; ++ip) {
      const double w = wtheta[it] * wphi[ip];
      quad.weights[grid.index(it, ip)] = w;
      total += w;
    }
  }
  if (std::abs(total - kFourPi) > 0.01 * kFourPi) {
    throw std::invalid_argument("grid_quadrature: grid does not cover the sphere (weight sum " +
                                std::to_string(total) + ")");
  }
  return quad;
}

namespace {

template <typename T>
T integrate_samples(std::span<const T> samples, const SphereQuadrature& quad) {
  if (samples.size() != quad.weights.size()) {
    throw std::invalid_argument("integrate: sample count does not match quadrature");
  }
  T acc{};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if constexpr (std::is_same_v<T, double>) {
      if (!std::isfinite(samples[i])) throw std::invalid_argument("integrate: non-finite sample");
    } else {
      if (!std::isfinite(samples[i].real()) || !std::isfinite(samples[i].imag())) {
        throw std::invalid_argument("integrate: non-finite sample");
      }
    }
    acc += quad.weights[i] * samples[i];
  }
  return acc;
}

}  // namespace

double integrate(std::span<const double> samples, const SphereQuadrature& quad) {
  return integrate_samples(samples, quad);
}

std::complex<double> integrate(std::span<const std::complex<double>> samples,
                               const SphereQuadrature& quad) {
  return integrate_samples(samples, quad);
}

double integrate(const std::function<double(double, double)>& f, const SphereQuadrature& quad) {
  std::vector<double> samples(quad.weights.size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = f(quad.node_theta(i), quad.node_phi(i));
  return integrate_samples(std::span<const double>(samples), quad);
}

std::complex<double> integrate(const std::function<std::complex<double>(double, double)>& f,
                               const SphereQuadrature& quad) {
  std::vector<std::complex<double>> samples(quad.weights.size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = f(quad.node_theta(i), quad.node_phi(i));
  return integrate_samples(std::span<const std::complex<double>>(samples), quad);
}

}  // namespace spinwigner
