#include "spinwigner/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace spinwigner {

namespace {

double offdiag_norm(const Eigen::MatrixXcd& a) {
  double s = 0.0;
  for (Eigen::Index p = 0; p < a.rows(); ++p) {
    for (Eigen::Index q = p + 1; q < a.cols(); ++q) s += 2.0 * std::norm(a(p, q));
  }
  return std::sqrt(s);
}

}  // namespace

HermitianEigensystem hermitian_eigensystem(const Eigen::MatrixXcd& a, double tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_eigensystem: matrix not square");
  const Eigen::Index n = a.rows();
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("hermitian_eigensystem: matrix not Hermitian");
  }

  Eigen::MatrixXcd m = 0.5 * (a + a.adjoint());
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
  const double scale = std::max(m.norm(), 1e-300);

  for (int sweep = 0; sweep < 100 && offdiag_norm(m) > tol * scale; ++sweep) {
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const std::complex<double> apq = m(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-2 * tol * scale / n) continue;

        // 2x2 Hermitian block [[alpha, a],[conj(a), beta]]: the rotation
        // [[c, s e^{i phase}], [-s e^{-i phase}, c]] with
        // tan(2t) = 2|a| / (beta - alpha) zeroes the off-diagonal entry.
        const double alpha = m(p, p).real();
        const double beta = m(q, q).real();
        const std::complex<double> phase = apq / mag;
        const double w = (alpha - beta) / (2.0 * mag);
        const double t = -((w >= 0.0) ? 1.0 : -1.0) / (std::abs(w) + std::sqrt(w * w + 1.0));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const std::complex<double> s = t * c * phase;

        // m := R^dagger m R, applied as row/column updates.
        for (Eigen::Index k = 0; k < n; ++k) {
          const std::complex<double> mkp = m(k, p);
          const std::complex<double> mkq = m(k, q);
          m(k, p) = c * mkp - std::conj(s) * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const std::complex<double> mpk = m(p, k);
          const std::complex<double> mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = std::conj(s) * mpk + c * mqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const std::complex<double> vkp = v(k, p);
          const std::complex<double> vkq = v(k, q);
          v(k, p) = c * vkp - std::conj(s) * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  HermitianEigensystem out;
  out.eigenvalues.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.eigenvalues[i] = m(i, i).real();

  // Sort ascending, permuting eigenvector columns along.
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return out.eigenvalues[x] < out.eigenvalues[y]; });
  Eigen::VectorXd sorted_vals(n);
  Eigen::MatrixXcd sorted_vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sorted_vals[i] = out.eigenvalues[order[i]];
    sorted_vecs.col(i) = v.col(order[i]);
  }
  out.eigenvalues = std::move(sorted_vals);
  out.eigenvectors = std::move(sorted_vecs);
  return out;
}

}  // namespace spinwigner
