#pragma once

// Formal pseudodifferential operators sum_k a_k(x) D^k with matrix-valued
// polynomial coefficients, in normal form (all x to the left of all D).
//
// In the z-representation D acts as multiplication by z and x as -d/dz, so
// the component x^l D^k drops the exponent of a monomial by l - k.  That drop
// is the component's *weight*; an operator tracks the largest trusted weight
// (wcap), the analogue of a series window: components of weight > wcap are
// unknown, and truncated constructions (inverses, dressings) state up front
// how deep they go.  Exact operators have wcap = kExactW.

#include "qcurve/series.hpp"
#include "qcurve/smat.hpp"

#include <map>
#include <vector>

namespace qcurve {

using MSeries = Series<SMat>;

// Polynomial in x with square-matrix coefficients, degree-indexed.
class XPoly {
 public:
  XPoly() = default;
  explicit XPoly(const SMat& c0) {
    if (!c0.is_zero()) c_.push_back(c0);
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  SMat coeff(int l) const {
    if (l < 0 || l > degree()) return SMat();
    return c_[l];
  }
  void set_coeff(int l, const SMat& v);

  XPoly operator-() const;
  friend XPoly operator+(const XPoly& a, const XPoly& b);
  friend XPoly operator-(const XPoly& a, const XPoly& b) { return a + (-b); }
  friend XPoly operator*(const XPoly& a, const XPoly& b);
  bool operator==(const XPoly& o) const;

  XPoly scaled(const Scalar& s) const;
  XPoly derivative() const;
  XPoly antiderivative() const;  // integration constant zero

 private:
  std::vector<SMat> c_;
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
};

class PsDiffOp {
 public:
  static constexpr int kExactW = std::numeric_limits<int>::max() / 4;

  explicit PsDiffOp(int blocksize = 1, int xcap = 16)
      : s_(blocksize), xcap_(xcap) {}

  static PsDiffOp identity(int blocksize = 1, int xcap = 16);
  static PsDiffOp dpow(int k, int blocksize = 1, int xcap = 16);  // D^k
  static PsDiffOp from_term(int k, const XPoly& a, int blocksize = 1, int xcap = 16);

  int blocksize() const { return s_; }
  int xcap() const { return xcap_; }
  int wcap() const { return wcap_; }
  bool exact() const { return wcap_ >= kExactW; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<int, XPoly>& terms() const { return terms_; }

  // Highest D-order with a nonzero coefficient.
  int order() const;
  XPoly coeff(int k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? XPoly() : it->second;
  }
  void set_term(int k, const XPoly& a);

  // True when no trusted component has negative D-order.
  bool is_differential() const;
  // Differential part (orders >= 0) and the complementary tail.
  PsDiffOp plus_part() const;
  PsDiffOp minus_part() const;

  PsDiffOp operator-() const;
  friend PsDiffOp operator+(const PsDiffOp& a, const PsDiffOp& b);
  friend PsDiffOp operator-(const PsDiffOp& a, const PsDiffOp& b) { return a + (-b); }
  friend PsDiffOp operator*(const PsDiffOp& a, const PsDiffOp& b);

  PsDiffOp scaled(const Scalar& s) const;
  PsDiffOp restricted(int wcap) const;  // forget components of weight > wcap

  // Inverse of an operator of the form 1 + (weight >= 1 tail), tracked to
  // weight `depth`.
  PsDiffOp inverted(int depth) const;

  // Action on a Laurent series in the representation D -> z, x -> -d/dz.
  MSeries apply(const MSeries& f) const;
  LSeries apply_scalar(const LSeries& f) const;

  bool equal_on_window(const PsDiffOp& o) const;

 private:
  int s_;
  int xcap_;
  int wcap_ = kExactW;
  std::map<int, XPoly> terms_;

  int min_weight() const;  // smallest weight present (most exponent-raising)
  void trim();
};

// Commutator [a, b].
PsDiffOp commutator(const PsDiffOp& a, const PsDiffOp& b);

// Conjugation s * a * s^{-1}; s must be 1 + (positive weight) and the result
// is tracked to weight `depth`.
PsDiffOp dress(const PsDiffOp& s, const PsDiffOp& a, int depth);

// Dressing operator S with S Q S^{-1} = D^q for a normalized monic
// differential operator Q of order q >= 1 with vanishing subleading
// coefficient; canonicalized so the x-independent part of every coefficient
// of S is zero.  Tracked to weight `depth`.
PsDiffOp undress(const PsDiffOp& q_op, int depth);

// S^{-1} D^n S built from the undressing of Q: the n/q-th power of Q.
PsDiffOp psdo_root(const PsDiffOp& q_op, int n, int depth);

// A point of the Sato Grassmannian in normal form: basis[n] projects to
// z^n * I exactly, with a strictly lower (eventually negative) tail.
struct GrPoint {
  int s = 1;
  std::vector<MSeries> basis;
};

// Basis v_n = S z^n for n = 0..depth-1.
GrPoint sato_point(const PsDiffOp& s_op, int depth, int prec);

// Recover the dressing operator 1 + (weight >= 1) from a Grassmannian point;
// inverse of sato_point.  Tracked to weight `depth`.
PsDiffOp sato_operator(const GrPoint& v, int depth, int xcap);

}  // namespace qcurve
