#pragma once

// Truncated Laurent series in z with explicit precision windows.
//
// A series tracks coefficients for exponents floor()..top().  Exponents above
// top() are exactly zero; exponents below floor() are unknown.  A series with
// floor() == kExactFloor is exact: everything below its support is known to
// be zero.  Every operation computes the widest window the inputs justify and
// fails loudly (window_underflow) when a requested coefficient is not
// trusted.  The coefficient ring C is Scalar, SMat or HSeries.

#include "qcurve/hseries.hpp"
#include "qcurve/scalar.hpp"
#include "qcurve/smat.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace qcurve {

struct window_underflow : precondition_error {
  using precondition_error::precondition_error;
};

template <class C>
class Series {
 public:
  static constexpr int kExactFloor = std::numeric_limits<int>::min() / 4;

  Series() : floor_(kExactFloor) {}
  explicit Series(int floor) : floor_(floor) {}

  static Series monomial(int e, const C& c) {
    Series s;
    if (!c.is_zero()) {
      s.floor_ = kExactFloor;
      s.c_.push_back(c);
      s.base_ = e;
      s.has_support_ = true;
    }
    return s;
  }

  bool exact() const { return floor_ == kExactFloor; }
  bool is_zero() const { return !has_support_; }
  int floor() const { return floor_; }
  // Leading exponent; only meaningful when !is_zero().
  int top() const {
    if (!has_support_) throw precondition_error("top() of zero series");
    return base_ + static_cast<int>(c_.size()) - 1;
  }
  int low() const {
    if (!has_support_) throw precondition_error("low() of zero series");
    return base_;
  }
  // Number of tracked coefficients (top .. floor); for exact series this is
  // unbounded and reported relative to the support.
  long prec() const {
    if (!has_support_) return 0;
    if (exact()) return static_cast<long>(c_.size());
    return static_cast<long>(top()) - floor_ + 1;
  }

  const C& coeff(int e) const {
    static const C zero{};
    if (!has_support_) {
      if (!exact() && e < floor_) throw window_underflow("coefficient below trusted window");
      return zero;
    }
    if (e > top()) return zero;
    if (e < base_) {
      if (!exact() && e < floor_) throw window_underflow("coefficient below trusted window");
      return zero;
    }
    return c_[e - base_];
  }
  bool trusted(int e) const { return exact() || e >= floor_; }

  C leading() const {
    if (!has_support_) throw precondition_error("leading coefficient of zero series");
    return c_.back();
  }

  void set_coeff(int e, const C& v) {
    if (!has_support_) {
      if (v.is_zero()) return;
      base_ = e;
      c_.assign(1, v);
      has_support_ = true;
      normalize();
      return;
    }
    if (e > top()) {
      c_.resize(c_.size() + (e - top()));
      c_.back() = v;
    } else if (e < base_) {
      std::vector<C> nc(top() - e + 1);
      for (size_t i = 0; i < c_.size(); ++i) nc[(base_ - e) + i] = c_[i];
      nc[0] = v;
      c_ = std::move(nc);
      base_ = e;
    } else {
      c_[e - base_] = v;
    }
    normalize();
  }

  // Restrict the trusted window from below (drop knowledge under new_floor).
  Series restricted(int new_floor) const {
    if (!exact() && new_floor <= floor_) return *this;
    Series r = *this;
    r.floor_ = new_floor;
    if (r.has_support_) {
      if (r.top() < new_floor) {
        r.c_.clear();
        r.has_support_ = false;
      } else if (r.base_ < new_floor) {
        r.c_.erase(r.c_.begin(), r.c_.begin() + (new_floor - r.base_));
        r.base_ = new_floor;
      }
    }
    r.normalize();
    return r;
  }

  Series operator-() const {
    Series r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  friend Series operator+(const Series& a, const Series& b) {
    Series r;
    r.floor_ = std::max(a.floor_, b.floor_);
    int lo, hi;
    if (a.has_support_ && b.has_support_) {
      lo = std::min(a.base_, b.base_);
      hi = std::max(a.top(), b.top());
    } else if (a.has_support_) {
      lo = a.base_;
      hi = a.top();
    } else if (b.has_support_) {
      lo = b.base_;
      hi = b.top();
    } else {
      return r;
    }
    lo = std::max(lo, r.floor_ == kExactFloor ? lo : r.floor_);
    if (hi < lo) return r;
    r.base_ = lo;
    r.c_.resize(hi - lo + 1);
    r.has_support_ = true;
    for (int e = lo; e <= hi; ++e) r.c_[e - lo] = a.window_coeff(e) + b.window_coeff(e);
    r.normalize();
    return r;
  }
  friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

  friend Series operator*(const Series& a, const Series& b) {
    Series r;
    // Highest exponent where unknown (below-floor) mass of x could sit.
    auto efftop = [](const Series& x) {
      return x.has_support_ ? x.top() : x.floor_ - 1;
    };
    if ((a.exact() && !a.has_support_) || (b.exact() && !b.has_support_)) {
      r.floor_ = kExactFloor;  // exact zero annihilates
      return r;
    }
    if (a.exact() && b.exact())
      r.floor_ = kExactFloor;
    else if (a.exact())
      r.floor_ = b.floor_ + a.top();
    else if (b.exact())
      r.floor_ = a.floor_ + b.top();
    else
      r.floor_ = std::max(a.floor_ + efftop(b), b.floor_ + efftop(a));
    if (!a.has_support_ || !b.has_support_) return r;
    int lo = a.base_ + b.base_;
    int hi = a.top() + b.top();
    lo = std::max(lo, r.floor_ == kExactFloor ? lo : r.floor_);
    if (hi < lo) return r;
    r.base_ = lo;
    r.c_.resize(hi - lo + 1);
    r.has_support_ = true;
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      int ea = a.base_ + static_cast<int>(i);
      for (size_t j = 0; j < b.c_.size(); ++j) {
        int e = ea + b.base_ + static_cast<int>(j);
        if (e < lo) continue;
        if (b.c_[j].is_zero()) continue;
        r.c_[e - lo] = r.c_[e - lo] + a.c_[i] * b.c_[j];
      }
    }
    r.normalize();
    return r;
  }

  friend bool operator==(const Series& a, const Series& b) {
    // Equality of tracked data on the common window.
    int lo = std::max(a.floor_, b.floor_);
    Series d = a - b;
    if (!d.has_support_) return true;
    return d.top() < lo;
  }

  // Scale the argument z -> eps * z (coefficient of z^k picks eps^k).
  Series scaled_arg(const Scalar& eps) const {
    Series r = *this;
    if (!r.has_support_) return r;
    Scalar p = eps.pow(r.base_);
    for (auto& x : r.c_) {
      x = cmul(p, x);
      p = p * eps;
    }
    r.normalize();
    return r;
  }

  Series shifted(int k) const {  // multiply by z^k
    Series r = *this;
    if (r.floor_ != kExactFloor) r.floor_ += k;
    r.base_ += k;
    return r;
  }

  Series derivative() const {  // d/dz
    Series r;
    r.floor_ = exact() ? kExactFloor : floor_ - 1;
    for (size_t i = 0; i < c_.size(); ++i) {
      int e = base_ + static_cast<int>(i);
      if (e == 0 || c_[i].is_zero()) continue;
      r.set_coeff(e - 1, cmul(Scalar(static_cast<long>(e)), c_[i]));
    }
    if (!r.has_support_) r.floor_ = exact() ? kExactFloor : floor_ - 1;
    return r;
  }

  // Multiplicative inverse with `terms` tracked coefficients (fewer if the
  // input window is narrower).  The leading coefficient must be invertible.
  Series inverted(int terms) const;

  template <class F>
  Series mapped(F&& f) const {
    Series r = *this;
    for (auto& x : r.c_) x = f(x);
    r.normalize();
    return r;
  }

 private:
  // floor_ == kExactFloor means exact; otherwise lowest trusted exponent.
  int floor_;
  int base_ = 0;           // exponent of c_[0]
  bool has_support_ = false;
  std::vector<C> c_;

  const C& window_coeff(int e) const {  // like coeff() but without the floor check
    static const C zero{};
    if (!has_support_ || e > top() || e < base_) return zero;
    return c_[e - base_];
  }

  void normalize() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    while (!c_.empty() && c_.front().is_zero() && (exact() || base_ < floor_)) {
      c_.erase(c_.begin());
      ++base_;
    }
    if (c_.empty()) has_support_ = false;
  }
};

template <class C>
Series<C> Series<C>::inverted(int terms) const {
  if (!has_support_) throw precondition_error("inverse of zero series");
  int t = top();
  long have = exact() ? terms : prec();
  int w = static_cast<int>(std::min<long>(terms, have));
  if (w < 1) throw window_underflow("no trusted terms for series inversion");
  C u = inv_leading(c_.back());
  // a = z^t (L + n), inverse = z^{-t} (1 + L^{-1} n)^{-1} L^{-1} computed by
  // the geometric series; n strictly lowers the exponent so w terms suffice.
  Series tail = shifted(-t);  // L + n at exponent 0
  Series m;                   // -L^{-1} n
  {
    Series lead = monomial(0, u);
    Series prod = lead * tail;
    m = (monomial(0, unit_like(u)) - prod).restricted(-(w - 1));
  }
  Series acc = monomial(0, unit_like(u));
  Series pw = acc;
  for (int k = 1; k < w; ++k) {
    pw = (pw * m).restricted(-(w - 1));
    if (pw.is_zero() && pw.exact()) break;
    acc = acc + pw;
  }
  Series result = (acc * monomial(0, u)).shifted(-t);
  return result.restricted(-t - (w - 1));
}

// Inversion hooks for the coefficient rings.
inline Scalar inv_leading(const Scalar& s) { return s.inv(); }
inline Scalar unit_like(const Scalar&) { return Scalar(1); }
inline HSeries inv_leading(const HSeries& s) { return s.inv(); }
inline HSeries unit_like(const HSeries& s) { return HSeries(Scalar(1), s.cap()); }
SMat inv_leading(const SMat& m);
inline SMat unit_like(const SMat& m) { return SMat::identity(m.rows()); }

using LSeries = Series<Scalar>;

}  // namespace qcurve
