#pragma once

// Truncated power series in the deformation parameter hbar.  Coefficient 0 is
// the classical part.  A series carries its truncation cap (highest tracked
// power); arithmetic truncates to the smaller cap.  kExactCap marks values
// that are exact polynomials (no truncation), which is how plain scalars are
// embedded.

#include "qcurve/scalar.hpp"

#include <limits>
#include <vector>

namespace qcurve {

class HSeries {
 public:
  static constexpr int kExactCap = std::numeric_limits<int>::max() / 2;

  HSeries() = default;
  HSeries(const Scalar& s, int cap = kExactCap) : cap_(cap) {
    if (!s.is_zero()) c_.push_back(s);
  }
  HSeries(std::vector<Scalar> coeffs, int cap) : cap_(cap), c_(std::move(coeffs)) {
    trim();
  }

  // exp(hbar) truncated at the given cap.
  static HSeries exp_hbar(int cap) {
    std::vector<Scalar> c(cap + 1);
    mpq_class f = 1;
    for (int k = 0; k <= cap; ++k) {
      if (k > 0) f /= k;
      c[k] = Scalar(mpq_class(f));
    }
    return HSeries(std::move(c), cap);
  }

  int cap() const { return cap_; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Scalar coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(c_.size())) return Scalar(0L);
    return c_[k];
  }
  Scalar constant() const { return coeff(0); }

  HSeries operator-() const {
    HSeries r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  friend HSeries operator+(const HSeries& a, const HSeries& b) {
    HSeries r;
    r.cap_ = std::min(a.cap_, b.cap_);
    r.c_.resize(std::max(a.c_.size(), b.c_.size()));
    for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = a.coeff(i) + b.coeff(i);
    r.trim();
    return r;
  }
  friend HSeries operator-(const HSeries& a, const HSeries& b) { return a + (-b); }
  friend HSeries operator*(const HSeries& a, const HSeries& b) {
    HSeries r;
    r.cap_ = std::min(a.cap_, b.cap_);
    if (a.is_zero() || b.is_zero()) return r;
    int top = std::min<long>(static_cast<long>(a.degree()) + b.degree(), r.cap_);
    r.c_.assign(top + 1, Scalar(0L));
    for (int i = 0; i <= a.degree(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (int j = 0; j <= b.degree() && i + j <= top; ++j)
        r.c_[i + j] = r.c_[i + j] + a.c_[i] * b.c_[j];
    }
    r.trim();
    return r;
  }
  friend bool operator==(const HSeries& a, const HSeries& b) {
    size_t n = std::max(a.c_.size(), b.c_.size());
    for (size_t i = 0; i < n; ++i)
      if (!(a.coeff(i) == b.coeff(i))) return false;
    return true;
  }

  // Inverse; requires an invertible classical part.
  HSeries inv() const {
    if (is_zero() || c_[0].is_zero())
      throw precondition_error("hbar series with zero classical part is not invertible");
    Scalar u = c_[0].inv();
    if (is_constant()) return HSeries(u, cap_);
    if (cap_ >= kExactCap)
      throw precondition_error("inverse of a nonconstant hbar polynomial needs a truncation cap");
    int n = cap_;
    std::vector<Scalar> r(n + 1, Scalar(0L));
    r[0] = u;
    for (int k = 1; k <= n; ++k) {
      Scalar acc(0L);
      for (int j = 1; j <= std::min(k, degree()); ++j) acc = acc + c_[j] * r[k - j];
      r[k] = -(u * acc);
    }
    return HSeries(std::move(r), cap_);
  }

 private:
  int cap_ = kExactCap;
  std::vector<Scalar> c_;

  void trim() {
    if (static_cast<int>(c_.size()) > cap_ + 1) c_.resize(cap_ + 1);
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
};

inline HSeries cmul(const Scalar& s, const HSeries& x) { return HSeries(s) * x; }

}  // namespace qcurve
