#include "qcurve/eigen.hpp"

#include <algorithm>

namespace qcurve {

namespace {

mpf_class mag2(const Scalar& s) {
  mpf_class re, im;
  s.embed(re, im, 192);
  return re * re + im * im;
}

bool is_negligible(const Scalar& s, int bits) {
  if (s.is_exact()) return s.is_zero();
  mpf_class tol(0, 64);
  tol = 1;
  tol >>= std::max(32, bits / 2);
  return mag2(s) < tol * tol;
}

}  // namespace

SMat inv_leading(const SMat& m) { return m.inverse(); }

SMat SMat::inverse() const {
  if (r_ != c_) throw precondition_error("inverse of non-square matrix");
  int n = r_;
  SMat m = *this;
  SMat inv = SMat::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    bool approx = false;
    for (int r = col; r < n; ++r)
      if (!m.at(r, col).is_exact()) approx = true;
    if (!approx) {
      for (int r = col; r < n; ++r)
        if (!m.at(r, col).is_zero()) {
          piv = r;
          break;
        }
    } else {
      mpf_class best(0);
      for (int r = col; r < n; ++r) {
        mpf_class v = mag2(m.at(r, col));
        if (piv < 0 || v > best) {
          best = v;
          piv = r;
        }
      }
      if (best == 0) piv = -1;
    }
    if (piv < 0) throw precondition_error("singular matrix inverse");
    for (int k = 0; k < n; ++k) {
      std::swap(m.at(col, k), m.at(piv, k));
      std::swap(inv.at(col, k), inv.at(piv, k));
    }
    Scalar d = m.at(col, col).inv();
    for (int k = 0; k < n; ++k) {
      m.at(col, k) = d * m.at(col, k);
      inv.at(col, k) = d * inv.at(col, k);
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || m.at(r, col).is_zero()) continue;
      Scalar f = m.at(r, col);
      for (int k = 0; k < n; ++k) {
        m.at(r, k) = m.at(r, k) - f * m.at(col, k);
        inv.at(r, k) = inv.at(r, k) - f * inv.at(col, k);
      }
    }
  }
  return inv;
}

std::vector<Scalar> SMat::solve(const std::vector<Scalar>& b) const {
  if (r_ != c_ || static_cast<int>(b.size()) != r_)
    throw precondition_error("solve() shape mismatch");
  SMat inv = inverse();
  std::vector<Scalar> x(r_, Scalar(0L));
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < r_; ++j) x[i] = x[i] + inv.at(i, j) * b[j];
  return x;
}

std::vector<Scalar> char_poly(const SMat& A) {
  if (A.rows() != A.cols()) throw precondition_error("char_poly of non-square matrix");
  int n = A.rows();
  if (n > 12) throw precondition_error("eigenvalue kernel limited to dimension 12");
  // Faddeev-LeVerrier: M_1 = A, c_{n-1} = -tr, M_{k+1} = A (M_k + c_{n-k} I).
  std::vector<Scalar> c(n + 1, Scalar(0L));
  c[n] = Scalar(1);
  SMat M = A;
  for (int k = 1; k <= n; ++k) {
    Scalar tr(0L);
    for (int i = 0; i < n; ++i) tr = tr + M.at(i, i);
    Scalar ck = -(tr * Scalar(mpq_class(1, k)));
    c[n - k] = ck;
    if (k < n) M = A * (M + SMat::scalar(n, ck));
  }
  return c;
}

namespace {

// Synthetic division of monic-ish poly c by (x - r); c must vanish at r.
std::vector<Scalar> deflate(const std::vector<Scalar>& c, const Scalar& r) {
  int n = static_cast<int>(c.size()) - 1;
  std::vector<Scalar> q(n);
  Scalar acc = c[n];
  for (int k = n - 1; k >= 0; --k) {
    q[k] = acc;
    acc = c[k] + r * acc;
  }
  return q;
}

bool all_rational(const std::vector<Scalar>& c) {
  for (const auto& x : c)
    if (!x.is_rational()) return false;
  return true;
}

Scalar eval_poly(const std::vector<Scalar>& c, const Scalar& x) {
  Scalar acc(0L);
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) acc = acc * x + c[k];
  return acc;
}

// Rational roots of a rational-coefficient polynomial via the rational root
// theorem after clearing denominators.
std::vector<mpq_class> rational_roots(const std::vector<Scalar>& c) {
  int n = static_cast<int>(c.size()) - 1;
  mpz_class lcm = 1;
  for (const auto& x : c) lcm = lcm * x.rational_value().get_den() / gcd(lcm, mpz_class(x.rational_value().get_den()));
  std::vector<mpz_class> a(n + 1);
  for (int k = 0; k <= n; ++k) {
    mpq_class v = c[k].rational_value() * lcm;
    a[k] = v.get_num();
  }
  int low = 0;
  while (low <= n && a[low] == 0) ++low;
  std::vector<mpq_class> roots;
  if (low > 0) roots.push_back(0);
  if (low > n) return roots;
  mpz_class a0 = abs(a[low]), an = abs(a[n]);
  auto divisors = [](const mpz_class& v) {
    std::vector<mpz_class> d;
    for (mpz_class i = 1; i * i <= v; ++i) {
      if (v % i == 0) {
        d.push_back(i);
        d.push_back(v / i);
      }
    }
    return d;
  };
  // Divisor enumeration is fine at desk scale; cap to avoid pathological input.
  if (a0 > 1000000000 || an > 1000000000) {
    // Fall back to testing small candidates only.
    a0 = std::min(a0, mpz_class(10000));
    an = std::min(an, mpz_class(100));
  }
  for (const auto& p : divisors(a0)) {
    for (const auto& q : divisors(an)) {
      for (int sign = -1; sign <= 1; sign += 2) {
        mpq_class cand(sign * p, q);
        cand.canonicalize();
        if (eval_poly(c, Scalar(cand)).is_zero()) {
          if (std::find(roots.begin(), roots.end(), cand) == roots.end()) roots.push_back(cand);
        }
      }
    }
  }
  return roots;
}

bool exact_roots_rec(std::vector<Scalar> c, std::vector<Scalar>& out) {
  // Strip leading zero coefficients defensively.
  while (c.size() > 1 && c.back().is_zero()) c.pop_back();
  int n = static_cast<int>(c.size()) - 1;
  if (n <= 0) return true;
  if (n == 1) {
    out.push_back(-(c[0] / c[1]));
    return true;
  }
  if (all_rational(c)) {
    if (n == 2) {
      Scalar a = c[2], b = c[1], d = c[0];
      mpq_class disc = (b * b - Scalar(4L) * a * d).rational_value();
      Scalar sq;
      if (exact_sqrt(disc, sq)) {
        Scalar inv2a = (Scalar(2L) * a).inv();
        out.push_back((-b + sq) * inv2a);
        out.push_back((-b - sq) * inv2a);
        return true;
      }
      return false;
    }
    auto rr = rational_roots(c);
    if (!rr.empty()) {
      std::vector<Scalar> rest = c;
      for (const auto& r : rr) {
        while (eval_poly(rest, Scalar(r)).is_zero() && rest.size() > 1) {
          out.push_back(Scalar(r));
          rest = deflate(rest, Scalar(r));
        }
      }
      return exact_roots_rec(rest, out);
    }
    // Binomial x^n - c0 with a rational n-th root and n | 12.
    bool binomial = true;
    for (int k = 1; k < n; ++k)
      if (!c[k].is_zero()) binomial = false;
    if (binomial && 12 % n == 0) {
      mpq_class c0 = -(c[0] / c[n]).rational_value();
      mpq_class root;
      if (rational_kth_root(c0, n, root)) {
        for (int k = 0; k < n; ++k)
          out.push_back(Scalar(root) * Scalar::root_of_unity(n, k));
        return true;
      }
    }
    return false;
  }
  // Coefficients in Q(zeta12) beyond Q: try the small exact root-of-unity
  // multiples of rational roots of the constant-term norm; cheap and covers
  // the symmetric branch structures.  Otherwise give up on exactness.
  for (int k = 0; k < 12; ++k) {
    Scalar cand = Scalar::root_of_unity(12, k);
    if (eval_poly(c, cand).is_zero()) {
      out.push_back(cand);
      return exact_roots_rec(deflate(c, cand), out);
    }
  }
  return false;
}

std::vector<Scalar> durand_kerner(const std::vector<Scalar>& cin, int bits) {
  int n = static_cast<int>(cin.size()) - 1;
  std::vector<AppC> c(n + 1);
  for (int k = 0; k <= n; ++k) {
    Scalar s = cin[k].to_approx(bits);
    c[k] = s.approx_value();
  }
  AppC lead = c[n];
  for (auto& x : c) x = x * app_inv(lead);
  std::vector<AppC> r(n);
  // Deterministic non-real seed points (0.4 + 0.9 i)^k.
  AppC seed(mpf_class(0.4, bits), mpf_class(0.9, bits), bits);
  AppC p(mpf_class(1, bits), mpf_class(0, bits), bits);
  for (int k = 0; k < n; ++k) {
    p = p * seed;
    r[k] = p;
  }
  mpf_class tol(0, 64);
  tol = 1;
  tol >>= (bits - 16);
  for (int iter = 0; iter < 2000; ++iter) {
    mpf_class worst(0);
    for (int k = 0; k < n; ++k) {
      AppC val = AppC::zero(bits);
      for (int j = n; j >= 0; --j) val = val * r[k] + c[j];
      AppC den(mpf_class(1, bits), mpf_class(0, bits), bits);
      for (int j = 0; j < n; ++j)
        if (j != k) den = den * (r[k] - r[j]);
      AppC delta = val * app_inv(den);
      r[k] = r[k] - delta;
      mpf_class d = app_abs2(delta);
      if (d > worst) worst = d;
    }
    if (worst < tol * tol) break;
  }
  std::vector<Scalar> out;
  for (const auto& x : r) out.push_back(Scalar(x));
  return out;
}

}  // namespace

std::vector<Scalar> poly_roots(std::vector<Scalar> c, bool& escalated, int bits) {
  if (bits <= 0) bits = default_prec_bits;
  escalated = false;
  for (const auto& x : c)
    if (!x.is_exact()) escalated = true;
  std::vector<Scalar> out;
  if (!escalated && exact_roots_rec(c, out)) {
    std::sort(out.begin(), out.end(), scalar_less);
    return out;
  }
  escalated = true;
  out = durand_kerner(c, bits);
  std::sort(out.begin(), out.end(), scalar_less);
  return out;
}

std::vector<Scalar> null_vector(const SMat& A) {
  int n = A.rows();
  SMat m = A;
  int bits = default_prec_bits;
  std::vector<int> pivot_col;
  int row = 0;
  std::vector<bool> used(n, false);
  for (int col = 0; col < n && row < n; ++col) {
    int piv = -1;
    bool approx = false;
    for (int r = row; r < n; ++r)
      if (!m.at(r, col).is_exact()) approx = true;
    if (!approx) {
      for (int r = row; r < n; ++r)
        if (!m.at(r, col).is_zero()) {
          piv = r;
          break;
        }
    } else {
      mpf_class best(0);
      for (int r = row; r < n; ++r) {
        mpf_class v = mag2(m.at(r, col));
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (piv >= 0 && is_negligible(m.at(piv, col), bits)) piv = -1;
    }
    if (piv < 0) continue;
    for (int k = 0; k < n; ++k) std::swap(m.at(row, k), m.at(piv, k));
    Scalar d = m.at(row, col).inv();
    for (int k = 0; k < n; ++k) m.at(row, k) = d * m.at(row, k);
    for (int r = 0; r < n; ++r) {
      if (r == row) continue;
      Scalar f = m.at(r, col);
      if (f.is_zero()) continue;
      for (int k = 0; k < n; ++k) m.at(r, k) = m.at(r, k) - f * m.at(row, k);
    }
    pivot_col.push_back(col);
    used[col] = true;
    ++row;
  }
  int free_col = -1;
  for (int col = 0; col < n; ++col)
    if (!used[col]) {
      free_col = col;
      break;
    }
  if (free_col < 0) throw precondition_error("null_vector of invertible matrix");
  std::vector<Scalar> v(n, Scalar(0L));
  v[free_col] = Scalar(1);
  for (size_t r = 0; r < pivot_col.size(); ++r)
    v[pivot_col[r]] = -m.at(static_cast<int>(r), free_col);
  return v;
}

EigenData eigen_leading(const SMat& A, int bits) {
  if (bits <= 0) bits = default_prec_bits;
  EigenData ed;
  auto cp = char_poly(A);
  ed.values = poly_roots(cp, ed.escalated, bits);
  int n = A.rows();
  ed.distinct = true;
  for (size_t i = 0; i + 1 < ed.values.size(); ++i) {
    for (size_t j = i + 1; j < ed.values.size(); ++j) {
      if (ed.escalated ? scalar_close(ed.values[i], ed.values[j])
                       : ed.values[i] == ed.values[j])
        ed.distinct = false;
    }
  }
  if (!ed.distinct) return ed;
  SMat base = A;
  if (ed.escalated) {
    base = SMat(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) base.at(i, j) = A.at(i, j).to_approx(bits);
  }
  for (const auto& lam : ed.values) {
    SMat shifted = base - SMat::scalar(n, lam);
    auto v = null_vector(shifted);
    // Normalize: first non-negligible entry becomes 1.
    int lead = -1;
    for (int i = 0; i < n; ++i)
      if (!is_negligible(v[i], bits)) {
        lead = i;
        break;
      }
    if (lead < 0) throw precondition_error("zero eigenvector");
    Scalar inv = v[lead].inv();
    for (auto& x : v) x = inv * x;
    ed.right.push_back(v);
    auto w = null_vector(shifted.transposed());
    lead = -1;
    for (int i = 0; i < n; ++i)
      if (!is_negligible(w[i], bits)) {
        lead = i;
        break;
      }
    if (lead < 0) throw precondition_error("zero left eigenvector");
    inv = w[lead].inv();
    for (auto& x : w) x = inv * x;
    ed.left.push_back(w);
  }
  return ed;
}

}  // namespace qcurve
