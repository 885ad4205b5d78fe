#pragma once

// Meromorphic connection attached to a companion matrix, cyclic-vector
// reduction to a single scalar operator, formal diagonalization at the
// irregular point, and the Newton polygon of a scalar operator.
//
// The connection acts on vectors of functions of z with z^q = w; the
// covariant derivative is nabla = hbar d/dz^q - B with B a matrix of Laurent
// polynomials in z whose coefficients are polynomials in hbar.

#include "qcurve/eigen.hpp"
#include "qcurve/psdelta.hpp"
#include "qcurve/quantize.hpp"
#include "qcurve/ratfunc.hpp"

#include <gmpxx.h>

#include <utility>
#include <vector>

namespace qcurve {

struct Connection {
  int q = 1;    // z^q = w; the derivative is d/dz^q = (1/(q z^{q-1})) d/dz
  int dim = 1;  // size of B (q times the blocksize)
  int p = 0;    // leading z-degree of B
  HSeries hbar{Scalar(0L)};
  std::vector<std::vector<ZSeries>> b;
};

// The deformation parameter as an exact degree-one polynomial, for building
// connections with hbar kept symbolic.
inline HSeries hbar_symbol() {
  return HSeries(std::vector<Scalar>{Scalar(0L), Scalar(1L)}, HSeries::kExactCap);
}

// Connection of the first-order system attached to a companion matrix, with
// the diagonal correction terms carrying the deformation parameter.  Blocks
// are flattened to scalar entries.
Connection connection_from_companion(const WMatrix& m, const HSeries& hbar);

// Scalar operator sum_s a_s (hbar d/dz^q)^s with a_order = 1, obtained by
// eliminating all but one component.
struct ScalarOperator {
  int order = 1;  // equals the connection dimension
  int q = 1;      // coordinate order of the derivative
  std::vector<ZRat> a;  // a[s], s = 0..order
  int cyclic_index = 0;  // which start vector succeeded
  std::vector<Scalar> cyclic_vector;
};

// Reduces the connection to a scalar operator using the first cyclic start
// vector that works: the coordinate vectors in order, then partial sums of
// them.  Throws precondition_error if none is cyclic.
ScalarOperator cyclic_reduce(const Connection& c);

// The coefficients with hbar set to zero; throws when a denominator
// vanishes there.
FRat<Scalar> at_hbar_zero(const ZRat& a);

// Coefficients A_i(w) of det(M - lambda I) = sum_i A_i(w) lambda^i, blocks
// flattened.
std::vector<FPoly<Scalar>> char_poly_w(const WMatrix& m);

// Formal diagonalization B R = R Lam + hbar dR/dz^q with R = P (1 + lower
// order in 1/z), P the constant eigenframe of the leading coefficient of B.
// Requires distinct leading eigenvalues.
struct DiagonalizeResult {
  std::vector<Scalar> leading;           // eigenvalues, canonical order
  std::vector<std::vector<ZSeries>> r;   // column j is the branch-j series
  std::vector<ZSeries> lam;              // diagonal entries of Lam
};

DiagonalizeResult formal_diagonalize(const Connection& c, int window);

// Newton polygon of a scalar operator.  Support points are (s, deg_z a_s)
// over the nonzero coefficients; the hull is the upper convex hull over the
// support, and a horizontal edge from s = 0 is prepended when a_0 = 0 (the
// operator has a pure derivative factor).  Edge slopes are measured per
// power of w, so a regular coprime case of bidegree (p, q) gives p/q.
struct NewtonEdge {
  std::pair<int, int> from, to;  // (s, deg) vertices
  mpq_class slope;
};

struct NewtonPolygon {
  std::vector<std::pair<int, int>> support;
  std::vector<std::pair<int, int>> hull;  // upper hull vertices
  std::vector<NewtonEdge> edges;
  bool one_edge = false;  // at most one distinct slope (single-point support counts)
  mpq_class slope;        // the common slope when one_edge
};

NewtonPolygon newton_polygon(const ScalarOperator& op);

}  // namespace qcurve
