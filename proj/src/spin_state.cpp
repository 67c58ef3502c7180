#include "spinwigner/spin_state.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "spinwigner/angular.hpp"
#include "spinwigner/jacobi.hpp"

namespace spinwigner {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

// Cached table of t^{jmm'}_{kq} for one j, indexed [kq][row][col] with
// kq = k*k + q + k and row/col the Dicke indices of m, m'.
struct MultipoleTensor {
  int dim;
  std::vector<double> t;  // [(kq)*dim + row]*dim + col

  double at(int kq, int row, int col) const { return t[(static_cast<std::size_t>(kq) * dim + row) * dim + col]; }
};

std::shared_ptr<const MultipoleTensor> multipole_tensor(HalfInt j) {
  static std::map<int, std::shared_ptr<const MultipoleTensor>> cache;
  static std::mutex lock;
  std::lock_guard guard(lock);
  auto it = cache.find(j.twice());
  if (it != cache.end()) return it->second;

  const int dim = j.twice() + 1;
  auto tensor = std::make_shared<MultipoleTensor>();
  tensor->dim = dim;
  tensor->t.assign(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0);
  for (int k = 0; k <= j.twice(); ++k) {
    for (int q = -k; q <= k; ++q) {
      const int kq = k * k + q + k;
      for (int row = 0; row < dim; ++row) {
        const HalfInt m = j - HalfInt(row);
        for (int col = 0; col < dim; ++col) {
          const HalfInt mp = j - HalfInt(col);
          if ((m - mp).twice() != 2 * q) continue;
          tensor->t[(static_cast<std::size_t>(kq) * dim + row) * dim + col] =
              multipole_coeff(j, m, mp, HalfInt(k), HalfInt(q));
        }
      }
    }
  }
  cache.emplace(j.twice(), tensor);
  return tensor;
}

}  // namespace

DensityMatrix DensityMatrix::create(HalfInt j, Eigen::MatrixXcd entries) {
  const int dim = j.twice() + 1;
  if (j.twice() < 0) throw std::invalid_argument("DensityMatrix: negative j");
  if (entries.rows() != dim || entries.cols() != dim) {
    throw std::invalid_argument("DensityMatrix: entries are " + std::to_string(entries.rows()) + "x" +
                                std::to_string(entries.cols()) + " but 2j+1 = " + std::to_string(dim));
  }
  if (!entries.allFinite()) throw std::invalid_argument("DensityMatrix: non-finite entries");
  if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("DensityMatrix: not Hermitian within 1e-12");
  }
  const std::complex<double> tr = entries.trace();
  if (std::abs(tr - 1.0) > 1e-12) {
    throw std::invalid_argument("DensityMatrix: trace deviates from 1 by " + std::to_string(std::abs(tr - 1.0)));
  }
  return DensityMatrix(j, std::move(entries));
}

double DensityMatrix::min_eigenvalue() const {
  return hermitian_eigensystem(entries_).eigenvalues.minCoeff();
}

DephasingModel DephasingModel::make(double t2_star_us) {
  if (!(t2_star_us > 0.0)) throw std::invalid_argument("DephasingModel: T2* must be positive");
  return DephasingModel{t2_star_us};
}

SpinOperators spin_operators(HalfInt j) {
  if (j.twice() < 0) throw std::invalid_argument("spin_operators: negative j");
  const int dim = j.twice() + 1;
  const double jv = j.value();
  Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double m = jv - i;
    jz(i, i) = m;
    if (i > 0) jp(i - 1, i) = std::sqrt(jv * (jv + 1.0) - m * (m + 1.0));  // J+|m> = ...|m+1>
  }
  const Eigen::MatrixXcd jm = jp.adjoint();
  SpinOperators ops;
  ops.jx = 0.5 * (jp + jm);
  ops.jy = -0.5 * kI * (jp - jm);
  ops.jz = std::move(jz);
  return ops;
}

DensityMatrix pure_qubit(double epsilon, double eta) {
  Eigen::Vector2cd psi;
  psi << std::cos(epsilon / 2.0), std::exp(kI * eta) * std::sin(epsilon / 2.0);
  return DensityMatrix::create(HalfInt::half(), psi * psi.adjoint());
}

DensityMatrix spin_coherent(HalfInt j, double epsilon, double eta) {
  // The pulse U(theta, phi) rotates +z to azimuth phi - pi/2, so aiming the
  // maximal-weight state at (epsilon, eta) takes pulse phase eta + pi/2.
  const UnitaryMatrix u = rotation_unitary(j, epsilon, eta + std::numbers::pi / 2.0);
  const Eigen::VectorXcd psi = u.entries.col(0);
  return DensityMatrix::create(j, psi * psi.adjoint());
}

UnitaryMatrix rotation_unitary(HalfInt j, double theta, double phi) {
  const int dim = j.twice() + 1;
  if (dim == 1) return UnitaryMatrix{j, Eigen::MatrixXcd::Identity(1, 1)};
  const SpinOperators ops = spin_operators(j);
  const Eigen::MatrixXcd generator = std::cos(phi) * ops.jx + std::sin(phi) * ops.jy;
  const HermitianEigensystem es = hermitian_eigensystem(generator);
  Eigen::VectorXcd phases(dim);
  for (int i = 0; i < dim; ++i) phases[i] = std::exp(-kI * theta * es.eigenvalues[i]);
  return UnitaryMatrix{j, es.eigenvectors * phases.asDiagonal() * es.eigenvectors.adjoint()};
}

MultipoleDecomposition rho_to_multipole(const DensityMatrix& rho) {
  const auto tensor = multipole_tensor(rho.j());
  const int dim = rho.dim();
  MultipoleDecomposition d;
  d.j = rho.j();
  d.coeffs.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int k = 0; k <= rho.j().twice(); ++k) {
    for (int q = -k; q <= k; ++q) {
      const int kq = k * k + q + k;
      std::complex<double> sum = 0.0;
      for (int row = 0; row < dim; ++row) {
        for (int col = 0; col < dim; ++col) {
          const double t = tensor->at(kq, row, col);
          if (t != 0.0) sum += rho(row, col) * t;
        }
      }
      d.coeffs[kq] = sum;
    }
  }
  return d;
}

DensityMatrix multipole_to_rho(const MultipoleDecomposition& d) {
  const int dim = d.j.twice() + 1;
  if (d.coeffs.size() != static_cast<std::size_t>(dim) * dim) {
    throw std::invalid_argument("multipole_to_rho: expected " + std::to_string(dim * dim) +
                                " coefficients, got " + std::to_string(d.coeffs.size()));
  }
  const auto tensor = multipole_tensor(d.j);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k <= d.j.twice(); ++k) {
    for (int q = -k; q <= k; ++q) {
      const int kq = k * k + q + k;
      const std::complex<double> c = d.coeffs[kq];
      if (c == 0.0) continue;
      for (int row = 0; row < dim; ++row) {
        for (int col = 0; col < dim; ++col) {
          const double t = tensor->at(kq, row, col);
          if (t != 0.0) rho(row, col) += c * t;
        }
      }
    }
  }
  return DensityMatrix::create(d.j, std::move(rho));
}

DensityMatrix dephase_qubit(const DensityMatrix& rho, double tau_us, const DephasingModel& model) {
  if (rho.j() != HalfInt::half()) {
    throw std::invalid_argument("dephase_qubit: defined for j = 1/2 only");
  }
  if (tau_us < 0.0) throw std::invalid_argument("dephase_qubit: negative tau");
  const double ratio = tau_us / model.t2_star_us;
  const double decay = std::exp(-ratio * ratio);
  Eigen::MatrixXcd out = rho.entries();
  out(0, 1) *= decay;
  out(1, 0) *= decay;
  return DensityMatrix::create(HalfInt::half(), std::move(out));
}

namespace {

// PSD eigenvalue cleanup before taking square roots: [-1e-10, 0) clips to 0,
// anything below errors, and numerically-zero eigenvalues (< 1e-13 of the
// largest) clip too, since sqrt would amplify eigensolver dust to ~1e-9.
Eigen::VectorXd clipped_psd_eigenvalues(const Eigen::VectorXd& lambda, const char* what) {
  const double cut = 1e-13 * std::max(lambda.maxCoeff(), 0.0);
  Eigen::VectorXd out(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < -1e-10) {
      throw std::invalid_argument(std::string(what) + ": matrix not PSD (eigenvalue " +
                                  std::to_string(lambda[i]) + ")");
    }
    out[i] = lambda[i] < cut ? 0.0 : lambda[i];
  }
  return out;
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m, const char* what) {
  const HermitianEigensystem es = hermitian_eigensystem(m);
  const Eigen::VectorXd lambda = clipped_psd_eigenvalues(es.eigenvalues, what);
  Eigen::VectorXcd roots(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) roots[i] = std::sqrt(lambda[i]);
  return es.eigenvectors * roots.asDiagonal() * es.eigenvectors.adjoint();
}

}  // namespace

double uhlmann_fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.j() != rho2.j()) throw std::invalid_argument("uhlmann_fidelity: dimension mismatch");
  const Eigen::MatrixXcd root1 = psd_sqrt(rho1.entries(), "uhlmann_fidelity");
  const Eigen::MatrixXcd inner = root1 * rho2.entries() * root1;
  const HermitianEigensystem es = hermitian_eigensystem(inner);
  const Eigen::VectorXd lambda = clipped_psd_eigenvalues(es.eigenvalues, "uhlmann_fidelity");
  double trace_root = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) trace_root += std::sqrt(lambda[i]);
  return trace_root * trace_root;
}

double matrix_purity(const DensityMatrix& rho) {
  return (rho.entries() * rho.entries()).trace().real();
}

DensityMatrix bloch_inversion(double sx, double sy, double sz, bool clip_to_physical) {
  Eigen::Matrix2cd m;
  m << 1.0 + sz, std::complex<double>(sx, -sy), std::complex<double>(sx, sy), 1.0 - sz;
  m *= 0.5;
  if (clip_to_physical) {
    const HermitianEigensystem es = hermitian_eigensystem(m);
    Eigen::VectorXd clipped = es.eigenvalues.cwiseMax(0.0);
    const double total = clipped.sum();
    if (total <= 0.0) throw std::invalid_argument("bloch_inversion: zero matrix after clipping");
    clipped /= total;
    m = es.eigenvectors * clipped.cast<std::complex<double>>().asDiagonal() * es.eigenvectors.adjoint();
  }
  return DensityMatrix::create(HalfInt::half(), m);
}

std::array<double, 3> bloch_vector(const DensityMatrix& rho) {
  if (rho.j() != HalfInt::half()) throw std::invalid_argument("bloch_vector: j = 1/2 only");
  const auto& m = rho.entries();
  return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real()};
}

}  // namespace spinwigner
