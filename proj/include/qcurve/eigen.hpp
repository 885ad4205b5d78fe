#pragma once

// Exact-first eigenvalue kernel for the leading coefficient matrices that
// drive the branch recursions.  Dimensions are small (at most 12).
// Characteristic polynomials are computed exactly; roots are extracted
// exactly when they live in Q(zeta12) (rational roots, quadratics whose
// discriminant has a square root there, binomials with rational radicands)
// and otherwise the whole computation escalates to the approx backend.

#include "qcurve/smat.hpp"

#include <vector>

namespace qcurve {

struct EigenData {
  std::vector<Scalar> values;               // canonical (re, im) lex order
  std::vector<std::vector<Scalar>> right;   // right[k]: column eigenvector
  std::vector<std::vector<Scalar>> left;    // left[k]: row eigenvector
  bool distinct = false;
  bool escalated = false;                   // approx backend was needed
};

// Coefficients c[0..n] of det(lambda I - A), c[n] = 1.  Exact for the exact
// backend (Faddeev-LeVerrier).
std::vector<Scalar> char_poly(const SMat& A);

// Roots of a monic polynomial given by coefficients c[0..n], attempting the
// exact strategies first; sets escalated when the approx backend was used.
std::vector<Scalar> poly_roots(std::vector<Scalar> c, bool& escalated, int bits = 0);

EigenData eigen_leading(const SMat& A, int bits = 0);

// Nullspace vector of A (throws if A is invertible); deterministic choice
// with first free coordinate set to 1.
std::vector<Scalar> null_vector(const SMat& A);

}  // namespace qcurve
