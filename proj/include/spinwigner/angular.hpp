#pragma once

#include "spinwigner/half_int.hpp"

namespace spinwigner {

// Triple of angular momenta subject to the coupling (triangle) rule.
struct CouplingTriple {
  HalfInt j1, j2, j3;

  // |j1-j2| <= j3 <= j1+j2 and integer perimeter.
  bool satisfies_triangle() const;
};

// Wigner 3j symbol (j1 j2 j3; m1 m2 m3), evaluated by the Racah single-sum
// formula with factorials held as exact integers. Returns exactly 0 when
// m1+m2+m3 != 0 or the triangle rule fails. Throws std::invalid_argument for
// structurally impossible inputs (|m| > j, negative j, or j+m not a whole
// number).
double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);

// Clebsch-Gordan coefficient <j1,m1; j2,m2 | J,M>.
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

// Multipole coefficient t^{jmm'}_{kq} = (-1)^{j-m-q} <j,m; j,-m' | k,q>.
// Zero unless q = m - m'. Throws for k > 2j or |q| > k.
double multipole_coeff(HalfInt j, HalfInt m, HalfInt mp, HalfInt k, HalfInt q);

// Reconstruction weight R_mj = ((-1)^{j-m}/sqrt(4*pi)) * sum_{k=0}^{2j}
// (2k+1) * 3j(j,j,k; m,-m,0). Values are memoized per j.
double reconstruction_weight(HalfInt j, HalfInt m);

}  // namespace spinwigner
