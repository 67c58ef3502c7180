#include "spinwigner/angular.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace spinwigner {

namespace {

// Exact factorial table. Arguments stay below 4*j_max + 2 = 202 for the
// supported range j <= 50; the table grows on demand under a lock so the
// coefficient functions stay safe for concurrent callers.
const mpz_class& factorial(int n) {
  static std::vector<mpz_class> table{1_mpz};
  static std::mutex lock;
  std::lock_guard guard(lock);
  while (static_cast<int>(table.size()) <= n) {
    table.push_back(table.back() * static_cast<int>(table.size()));
  }
  return table[n];
}

void require_valid_jm(HalfInt j, HalfInt m, const char* what) {
  if (j.twice() < 0) {
    throw std::invalid_argument(std::string(what) + ": negative j = " + j.str());
  }
  if (m.abs() > j) {
    throw std::invalid_argument(std::string(what) + ": |m| > j (j=" + j.str() + ", m=" + m.str() + ")");
  }
  if ((j + m).twice() % 2 != 0) {
    throw std::invalid_argument(std::string(what) + ": j+m is not a whole number (j=" + j.str() +
                                ", m=" + m.str() + ")");
  }
}

// Exact value of the Racah sum and prefactor: returns the 3j symbol as
// sign * sqrt(ratio) with ratio an exact rational. Assumes selection rules
// already checked.
double racah_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  const int a = (j1 + j2 - j3).to_int();
  const int b = (j1 - j2 + j3).to_int();
  const int c = (-j1 + j2 + j3).to_int();
  const int perimeter = (j1 + j2 + j3).to_int();

  const int j1m1 = (j1 + m1).to_int(), j1m1n = (j1 - m1).to_int();
  const int j2m2 = (j2 + m2).to_int(), j2m2n = (j2 - m2).to_int();
  const int j3m3 = (j3 + m3).to_int(), j3m3n = (j3 - m3).to_int();

  // Term denominators: t!(a-t)!(j1-m1-t)!(j2+m2-t)!(j3-j2+m1+t)!(j3-j1-m2+t)!
  const int d1 = (j3 - j2 + m1).to_int();
  const int d2 = (j3 - j1 - m2).to_int();
  const int t_min = std::max({0, -d1, -d2});
  const int t_max = std::min({a, j1m1n, j2m2});
  if (t_min > t_max) return 0.0;

  mpq_class sum = 0;
  for (int t = t_min; t <= t_max; ++t) {
    mpz_class den = factorial(t) * factorial(a - t);
    den *= factorial(j1m1n - t);
    den *= factorial(j2m2 - t);
    den *= factorial(d1 + t);
    den *= factorial(d2 + t);
    mpq_class term(t % 2 == 0 ? 1 : -1);
    term /= mpq_class(den);
    sum += term;
  }
  if (sum == 0) return 0.0;

  // ratio = Delta * prod (j_i +- m_i)! * sum^2, an exact rational in (0, 1].
  mpq_class delta(factorial(a) * factorial(b) * factorial(c), factorial(perimeter + 1));
  mpz_class mprod = factorial(j1m1) * factorial(j1m1n);
  mprod *= factorial(j2m2) * factorial(j2m2n);
  mprod *= factorial(j3m3) * factorial(j3m3n);
  mpq_class ratio = delta * mpq_class(mprod) * sum * sum;
  ratio.canonicalize();

  mpf_class root(0, 256);
  mpf_set_q(root.get_mpf_t(), ratio.get_mpq_t());
  root = sqrt(root);

  const int phase = parity_phase(j1 - j2 - m3);
  const int sum_sign = sgn(sum);
  return phase * sum_sign * root.get_d();
}

}  // namespace

bool CouplingTriple::satisfies_triangle() const {
  if ((j1 + j2 + j3).twice() % 2 != 0) return false;
  return (j1 - j2).abs() <= j3 && j3 <= j1 + j2;
}

double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  require_valid_jm(j1, m1, "wigner3j");
  require_valid_jm(j2, m2, "wigner3j");
  require_valid_jm(j3, m3, "wigner3j");
  if ((m1 + m2 + m3).twice() != 0) return 0.0;
  if (!CouplingTriple{j1, j2, j3}.satisfies_triangle()) return 0.0;
  return racah_3j(j1, j2, j3, m1, m2, m3);
}

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  require_valid_jm(j1, m1, "clebsch_gordan");
  require_valid_jm(j2, m2, "clebsch_gordan");
  require_valid_jm(J, M, "clebsch_gordan");
  if ((m1 + m2).twice() != M.twice()) return 0.0;
  if (!CouplingTriple{j1, j2, J}.satisfies_triangle()) return 0.0;
  // <j1,m1; j2,m2 | J,M> = (-1)^{j1-j2+M} sqrt(2J+1) (j1 j2 J; m1 m2 -M)
  const double three_j = racah_3j(j1, j2, J, m1, m2, -M);
  return parity_phase(j1 - j2 + M) * std::sqrt(J.twice() + 1.0) * three_j;
}

double multipole_coeff(HalfInt j, HalfInt m, HalfInt mp, HalfInt k, HalfInt q) {
  require_valid_jm(j, m, "multipole_coeff");
  require_valid_jm(j, mp, "multipole_coeff");
  if (k.twice() < 0 || k > j + j) {
    throw std::invalid_argument("multipole_coeff: k outside [0, 2j] (k=" + k.str() + ", j=" + j.str() + ")");
  }
  if (q.abs() > k) {
    throw std::invalid_argument("multipole_coeff: |q| > k (q=" + q.str() + ", k=" + k.str() + ")");
  }
  if ((m - mp).twice() != q.twice()) return 0.0;
  return parity_phase(j - m - q) * clebsch_gordan(j, m, j, -mp, k, q);
}

double reconstruction_weight(HalfInt j, HalfInt m) {
  require_valid_jm(j, m, "reconstruction_weight");

  static std::map<int, std::vector<double>> cache;
  static std::mutex lock;
  std::lock_guard guard(lock);

  auto [it, fresh] = cache.try_emplace(j.twice());
  if (fresh) {
    const int dim = j.twice() + 1;
    it->second.resize(dim);
    for (int i = 0; i < dim; ++i) {
      const HalfInt mi = j - HalfInt(i);
      double sum = 0.0;
      for (int k = 0; k <= j.twice(); ++k) {
        sum += (2 * k + 1) * wigner3j(j, j, HalfInt(k), mi, -mi, HalfInt(0));
      }
      it->second[i] = parity_phase(j - mi) / std::sqrt(4.0 * std::numbers::pi) * sum;
    }
  }
  return it->second[(j - m).to_int()];
}

}  // namespace spinwigner
