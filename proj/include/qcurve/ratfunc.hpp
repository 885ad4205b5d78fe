#pragma once

// Dense univariate polynomials and rational functions over an exact field,
// generic in the coefficient type.  Instantiated with Scalar (rational
// functions of one variable) and, nested, with rational functions of hbar as
// coefficients (rational functions of z over Q(hbar)).  The coefficient type
// needs construction from long, is_zero(), inv() and the ring operators.

#include "qcurve/scalar.hpp"

#include <vector>

namespace qcurve {

template <class F>
class FPoly {
 public:
  FPoly() = default;
  FPoly(long v) {
    F c(v);
    if (!c.is_zero()) c_.push_back(c);
  }
  explicit FPoly(const F& c0) {
    if (!c0.is_zero()) c_.push_back(c0);
  }

  static FPoly monomial(int e, const F& c) {
    FPoly p;
    if (!c.is_zero()) {
      p.c_.assign(e + 1, F(0L));
      p.c_[e] = c;
    }
    return p;
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  F coeff(int k) const {
    if (k < 0 || k > degree()) return F(0L);
    return c_[k];
  }
  const F& leading() const { return c_.back(); }
  void set_coeff(int k, const F& v) {
    if (k > degree()) c_.resize(k + 1, F(0L));
    c_[k] = v;
    trim();
  }

  FPoly operator-() const {
    FPoly r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend FPoly operator+(const FPoly& a, const FPoly& b) {
    FPoly r;
    r.c_.resize(std::max(a.c_.size(), b.c_.size()), F(0L));
    for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = a.coeff(i) + b.coeff(i);
    r.trim();
    return r;
  }
  friend FPoly operator-(const FPoly& a, const FPoly& b) { return a + (-b); }
  friend FPoly operator*(const FPoly& a, const FPoly& b) {
    FPoly r;
    if (a.is_zero() || b.is_zero()) return r;
    r.c_.assign(a.c_.size() + b.c_.size() - 1, F(0L));
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (size_t j = 0; j < b.c_.size(); ++j)
        r.c_[i + j] = r.c_[i + j] + a.c_[i] * b.c_[j];
    }
    r.trim();
    return r;
  }
  friend bool operator==(const FPoly& a, const FPoly& b) {
    return (a - b).is_zero();
  }

  FPoly scaled(const F& s) const {
    FPoly r = *this;
    for (auto& x : r.c_) x = s * x;
    r.trim();
    return r;
  }
  FPoly derivative() const {
    FPoly r;
    for (int k = 1; k <= degree(); ++k)
      r.set_coeff(k - 1, F(static_cast<long>(k)) * c_[k]);
    return r;
  }
  F eval(const F& x) const {
    F r(0L);
    for (int k = degree(); k >= 0; --k) r = r * x + c_[k];
    return r;
  }

 private:
  std::vector<F> c_;
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
};

template <class F>
void fpoly_divrem(const FPoly<F>& a, const FPoly<F>& b, FPoly<F>& quo, FPoly<F>& rem) {
  if (b.is_zero()) throw precondition_error("polynomial division by zero");
  quo = FPoly<F>();
  rem = a;
  F linv = b.leading().inv();
  while (!rem.is_zero() && rem.degree() >= b.degree()) {
    int d = rem.degree() - b.degree();
    F c = rem.leading() * linv;
    quo.set_coeff(d, quo.coeff(d) + c);
    rem = rem - FPoly<F>::monomial(d, c) * b;
  }
}

// Monic greatest common divisor by the Euclidean algorithm.
template <class F>
FPoly<F> fpoly_gcd(FPoly<F> a, FPoly<F> b) {
  while (!b.is_zero()) {
    FPoly<F> q, r;
    fpoly_divrem(a, b, q, r);
    a = b;
    b = r;
  }
  if (a.is_zero()) return a;
  return a.scaled(a.leading().inv());
}

template <class F>
class FRat {
 public:
  FRat() : den_(1L) {}
  FRat(long v) : num_(v), den_(1L) {}
  explicit FRat(const FPoly<F>& num) : num_(num), den_(1L) {}
  FRat(const FPoly<F>& num, const FPoly<F>& den) : num_(num), den_(den) {
    normalize();
  }

  const FPoly<F>& num() const { return num_; }
  const FPoly<F>& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  FRat operator-() const {
    FRat r = *this;
    r.num_ = -r.num_;
    return r;
  }
  friend FRat operator+(const FRat& a, const FRat& b) {
    return FRat(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend FRat operator-(const FRat& a, const FRat& b) { return a + (-b); }
  friend FRat operator*(const FRat& a, const FRat& b) {
    return FRat(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend bool operator==(const FRat& a, const FRat& b) {
    return (a.num_ * b.den_ - b.num_ * a.den_).is_zero();
  }

  FRat inv() const {
    if (is_zero()) throw precondition_error("inverse of a zero rational function");
    return FRat(den_, num_);
  }
  FRat derivative() const {
    return FRat(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
  }
  F eval(const F& x) const {
    F d = den_.eval(x);
    if (d.is_zero())
      throw precondition_error("rational function evaluated at a pole");
    return num_.eval(x) * d.inv();
  }

 private:
  FPoly<F> num_, den_;

  void normalize() {
    if (den_.is_zero()) throw precondition_error("zero denominator");
    if (num_.is_zero()) {
      den_ = FPoly<F>(1L);
      return;
    }
    FPoly<F> g = fpoly_gcd(num_, den_);
    if (g.degree() > 0) {
      FPoly<F> q, r;
      fpoly_divrem(num_, g, q, r);
      num_ = q;
      fpoly_divrem(den_, g, q, r);
      den_ = q;
    }
    F linv = den_.leading().inv();
    num_ = num_.scaled(linv);
    den_ = den_.scaled(linv);
  }
};

template <class F>
FRat<F> operator/(const FRat<F>& a, const FRat<F>& b) {
  return a * b.inv();
}

using HPoly = FPoly<Scalar>;  // polynomials in hbar
using HRat = FRat<Scalar>;    // rational functions of hbar
using ZPoly = FPoly<HRat>;    // polynomials in z over Q(hbar)
using ZRat = FRat<HRat>;      // rational functions of z over Q(hbar)

}  // namespace qcurve
