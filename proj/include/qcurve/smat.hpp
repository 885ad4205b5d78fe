#pragma once

// Small dense matrices of Scalars.  A default-constructed (0 x 0) matrix is
// the shapeless additive zero: it absorbs in products and vanishes in sums,
// which lets series code pad windows without threading shape information.

#include "qcurve/scalar.hpp"

#include <vector>

namespace qcurve {

class SMat {
 public:
  SMat() = default;
  SMat(int rows, int cols) : r_(rows), c_(cols), a_(rows * cols) {}

  static SMat identity(int n) {
    SMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
    return m;
  }
  static SMat scalar(int n, const Scalar& s) {
    SMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = s;
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  bool empty() const { return r_ == 0; }

  Scalar& at(int i, int j) { return a_[i * c_ + j]; }
  const Scalar& at(int i, int j) const { return a_[i * c_ + j]; }

  bool is_zero() const {
    for (const auto& x : a_)
      if (!x.is_zero()) return false;
    return true;
  }

  SMat operator-() const {
    SMat m = *this;
    for (auto& x : m.a_) x = -x;
    return m;
  }

  friend SMat operator+(const SMat& a, const SMat& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.r_ != b.r_ || a.c_ != b.c_)
      throw precondition_error("matrix shape mismatch in addition");
    SMat m = a;
    for (size_t i = 0; i < m.a_.size(); ++i) m.a_[i] = m.a_[i] + b.a_[i];
    return m;
  }
  friend SMat operator-(const SMat& a, const SMat& b) { return a + (-b); }
  friend SMat operator*(const SMat& a, const SMat& b) {
    if (a.empty() || b.empty()) return SMat();
    if (a.c_ != b.r_) throw precondition_error("matrix shape mismatch in product");
    SMat m(a.r_, b.c_);
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.c_; ++k) {
        if (a.at(i, k).is_zero()) continue;
        for (int j = 0; j < b.c_; ++j)
          m.at(i, j) = m.at(i, j) + a.at(i, k) * b.at(k, j);
      }
    return m;
  }
  friend bool operator==(const SMat& a, const SMat& b) {
    if (a.empty() || b.empty()) return a.is_zero() && b.is_zero();
    if (a.r_ != b.r_ || a.c_ != b.c_) return false;
    for (size_t i = 0; i < a.a_.size(); ++i)
      if (!(a.a_[i] == b.a_[i])) return false;
    return true;
  }

  SMat scaled(const Scalar& s) const {
    SMat m = *this;
    for (auto& x : m.a_) x = s * x;
    return m;
  }

  SMat transposed() const {
    SMat m(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m.at(j, i) = at(i, j);
    return m;
  }

  // Exact inverse by Gauss-Jordan elimination (first nonzero pivot for the
  // exact backend, largest modulus for the approx backend).
  SMat inverse() const;

  // Solves A x = b; throws precondition_error when A is singular.
  std::vector<Scalar> solve(const std::vector<Scalar>& b) const;

 private:
  int r_ = 0, c_ = 0;
  std::vector<Scalar> a_;
};

inline SMat cmul(const Scalar& s, const SMat& m) { return m.scaled(s); }
inline Scalar cmul(const Scalar& s, const Scalar& x) { return s * x; }

}  // namespace qcurve
