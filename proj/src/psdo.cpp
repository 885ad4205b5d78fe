#include "qcurve/psdo.hpp"

#include <map>

namespace qcurve {

namespace {

// Generalized binomial coefficient C(j, i) for integer j of either sign.
Scalar gen_binom(int j, int i) {
  Scalar num(1);
  mpq_class den(1);
  for (int r = 0; r < i; ++r) {
    num = num * Scalar(static_cast<long>(j - r));
    den *= r + 1;
  }
  return num * Scalar(mpq_class(1) / den);
}

// (-1)^l m (m-1) ... (m-l+1), the action of x^l on z^m.
Scalar signed_falling(int m, int l) {
  Scalar f(1);
  for (int r = 0; r < l; ++r) f = f * Scalar(static_cast<long>(-(m - r)));
  return f;
}

// Smallest weight a trusted or just-untrusted component of x can carry.
int min_wbound(const PsDiffOp& x) {
  if (!x.is_zero()) {
    int w = PsDiffOp::kExactW;
    for (const auto& [k, p] : x.terms())
      for (int l = 0; l <= p.degree(); ++l)
        if (!p.coeff(l).is_zero()) w = std::min(w, l - k);
    return w;
  }
  return x.exact() ? PsDiffOp::kExactW : x.wcap() + 1;
}

MSeries to_matrix_series(const LSeries& f) {
  MSeries r = f.exact() ? MSeries() : MSeries(f.floor());
  if (!f.is_zero())
    for (int e = f.low(); e <= f.top(); ++e) {
      SMat m(1, 1);
      m.at(0, 0) = f.coeff(e);
      r.set_coeff(e, m);
    }
  return r;
}

LSeries to_scalar_series(const MSeries& f) {
  LSeries r = f.exact() ? LSeries() : LSeries(f.floor());
  if (!f.is_zero())
    for (int e = f.low(); e <= f.top(); ++e) {
      const SMat& m = f.coeff(e);
      if (!m.empty() && m.rows() != 1)
        throw precondition_error("matrix series is not scalar valued");
      r.set_coeff(e, m.empty() ? Scalar() : m.at(0, 0));
    }
  return r;
}

}  // namespace

void XPoly::set_coeff(int l, const SMat& v) {
  if (l < 0) throw precondition_error("negative x-degree");
  if (l >= static_cast<int>(c_.size())) {
    if (v.is_zero()) return;
    c_.resize(l + 1);
  }
  c_[l] = v;
  trim();
}

XPoly XPoly::operator-() const {
  XPoly r = *this;
  for (auto& m : r.c_) m = -m;
  return r;
}

XPoly operator+(const XPoly& a, const XPoly& b) {
  XPoly r = a;
  for (int l = 0; l <= b.degree(); ++l)
    r.set_coeff(l, r.coeff(l) + b.coeff(l));
  return r;
}

XPoly operator*(const XPoly& a, const XPoly& b) {
  XPoly r;
  for (int i = 0; i <= a.degree(); ++i) {
    if (a.coeff(i).is_zero()) continue;
    for (int j = 0; j <= b.degree(); ++j)
      r.set_coeff(i + j, r.coeff(i + j) + a.coeff(i) * b.coeff(j));
  }
  return r;
}

bool XPoly::operator==(const XPoly& o) const {
  int d = std::max(degree(), o.degree());
  for (int l = 0; l <= d; ++l)
    if (!(coeff(l) == o.coeff(l))) return false;
  return true;
}

XPoly XPoly::scaled(const Scalar& s) const {
  XPoly r = *this;
  for (auto& m : r.c_) m = m.scaled(s);
  r.trim();
  return r;
}

XPoly XPoly::derivative() const {
  XPoly r;
  for (int l = 1; l <= degree(); ++l)
    r.set_coeff(l - 1, coeff(l).scaled(Scalar(static_cast<long>(l))));
  return r;
}

XPoly XPoly::antiderivative() const {
  XPoly r;
  for (int l = 0; l <= degree(); ++l)
    r.set_coeff(l + 1, coeff(l).scaled(Scalar(mpq_class(1, l + 1))));
  return r;
}

PsDiffOp PsDiffOp::identity(int blocksize, int xcap) {
  return from_term(0, XPoly(SMat::identity(blocksize)), blocksize, xcap);
}

PsDiffOp PsDiffOp::dpow(int k, int blocksize, int xcap) {
  return from_term(k, XPoly(SMat::identity(blocksize)), blocksize, xcap);
}

PsDiffOp PsDiffOp::from_term(int k, const XPoly& a, int blocksize, int xcap) {
  PsDiffOp r(blocksize, xcap);
  r.set_term(k, a);
  return r;
}

int PsDiffOp::order() const {
  if (terms_.empty()) throw precondition_error("order of zero operator");
  return terms_.rbegin()->first;
}

void PsDiffOp::set_term(int k, const XPoly& a) {
  if (a.degree() > xcap_)
    throw precondition_error("x-degree cap exceeded in operator term");
  if (a.is_zero())
    terms_.erase(k);
  else
    terms_[k] = a;
}

bool PsDiffOp::is_differential() const {
  for (const auto& [k, p] : terms_)
    if (k < 0 && !p.is_zero()) return false;
  return true;
}

PsDiffOp PsDiffOp::plus_part() const {
  PsDiffOp r(s_, xcap_);
  r.wcap_ = wcap_;
  for (const auto& [k, p] : terms_)
    if (k >= 0) r.terms_[k] = p;
  return r;
}

PsDiffOp PsDiffOp::minus_part() const {
  PsDiffOp r(s_, xcap_);
  r.wcap_ = wcap_;
  for (const auto& [k, p] : terms_)
    if (k < 0) r.terms_[k] = p;
  return r;
}

int PsDiffOp::min_weight() const { return min_wbound(*this); }

void PsDiffOp::trim() {
  if (wcap_ < kExactW) {
    for (auto& [k, p] : terms_) {
      XPoly q;
      for (int l = 0; l <= std::min(p.degree(), wcap_ + k); ++l)
        q.set_coeff(l, p.coeff(l));
      p = q;
    }
  }
  for (auto it = terms_.begin(); it != terms_.end();)
    it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
}

PsDiffOp PsDiffOp::operator-() const {
  PsDiffOp r = *this;
  for (auto& [k, p] : r.terms_) p = -p;
  return r;
}

PsDiffOp operator+(const PsDiffOp& a, const PsDiffOp& b) {
  if (!a.is_zero() && !b.is_zero() && a.s_ != b.s_)
    throw precondition_error("blocksize mismatch in operator sum");
  PsDiffOp r(a.is_zero() ? b.s_ : a.s_, std::max(a.xcap_, b.xcap_));
  r.wcap_ = std::min(a.wcap_, b.wcap_);
  r.terms_ = a.terms_;
  for (const auto& [k, p] : b.terms_) {
    auto it = r.terms_.find(k);
    if (it == r.terms_.end())
      r.terms_[k] = p;
    else
      it->second = it->second + p;
  }
  r.trim();
  return r;
}

PsDiffOp operator*(const PsDiffOp& a, const PsDiffOp& b) {
  if (!a.is_zero() && !b.is_zero() && a.s_ != b.s_)
    throw precondition_error("blocksize mismatch in operator product");
  PsDiffOp r(a.is_zero() ? b.s_ : a.s_, std::max(a.xcap_, b.xcap_));
  if ((a.is_zero() && a.exact()) || (b.is_zero() && b.exact())) return r;
  long w = PsDiffOp::kExactW;
  if (!a.exact()) w = std::min(w, static_cast<long>(a.wcap_) + min_wbound(b));
  if (!b.exact()) w = std::min(w, static_cast<long>(b.wcap_) + min_wbound(a));
  r.wcap_ = static_cast<int>(std::min<long>(w, PsDiffOp::kExactW));
  // a_j x^p D^j followed by b_k x^q D^k: commuting D^j past x^q spends
  // derivatives, D^j x^q = sum_i C(j, i) (x^q)^(i) D^{j-i}.
  for (const auto& [j, aj] : a.terms_) {
    for (const auto& [k, bk] : b.terms_) {
      for (int i = 0;; ++i) {
        XPoly der = bk;
        for (int r2 = 0; r2 < i; ++r2) der = der.derivative();
        if (der.is_zero()) break;
        XPoly piece = (aj * der).scaled(gen_binom(j, i));
        int ord = j + k - i;
        if (!piece.is_zero()) {
          XPoly cur = r.coeff(ord);
          cur = cur + piece;
          if (cur.degree() > r.xcap_)
            throw precondition_error("x-degree cap exceeded in operator product");
          if (cur.is_zero())
            r.terms_.erase(ord);
          else
            r.terms_[ord] = cur;
        }
      }
    }
  }
  r.trim();
  return r;
}

PsDiffOp PsDiffOp::scaled(const Scalar& s) const {
  PsDiffOp r = *this;
  for (auto& [k, p] : r.terms_) p = p.scaled(s);
  r.trim();
  return r;
}

PsDiffOp PsDiffOp::restricted(int wcap) const {
  PsDiffOp r = *this;
  r.wcap_ = std::min(r.wcap_, wcap);
  r.trim();
  return r;
}

PsDiffOp PsDiffOp::inverted(int depth) const {
  PsDiffOp one = identity(s_, xcap_);
  PsDiffOp n = one - *this;
  if (!n.is_zero() && n.min_weight() < 1)
    throw precondition_error("operator inverse needs the form 1 + (weight >= 1)");
  if (n.is_zero() && n.exact()) return one;
  PsDiffOp acc = one;
  PsDiffOp pw = one;
  for (int k = 1; k <= depth; ++k) {
    pw = (pw * n).restricted(depth);
    if (pw.is_zero()) {
      if (pw.exact()) return acc;
      break;
    }
    acc = acc + pw;
  }
  return acc.restricted(depth);
}

MSeries PsDiffOp::apply(const MSeries& f) const {
  if ((is_zero() && exact()) || (f.is_zero() && f.exact())) return MSeries();
  long fl = Series<SMat>::kExactFloor;
  int ftop = f.is_zero() ? f.floor() - 1 : f.top();
  if (!exact()) fl = std::max(fl, static_cast<long>(ftop) - wcap_);
  if (!f.exact()) fl = std::max(fl, static_cast<long>(f.floor()) - min_wbound(*this));
  bool ex = fl == Series<SMat>::kExactFloor;
  MSeries r = ex ? MSeries() : MSeries(static_cast<int>(fl));
  if (f.is_zero()) return r;
  for (const auto& [k, p] : terms_) {
    for (int l = 0; l <= p.degree(); ++l) {
      const SMat& a = p.coeff(l);
      if (a.is_zero()) continue;
      for (int e = f.low(); e <= f.top(); ++e) {
        int out = e + k - l;
        if (!ex && out < fl) continue;
        Scalar fac = signed_falling(e + k, l);
        if (fac.is_zero()) continue;
        const SMat& fe = f.coeff(e);
        if (fe.is_zero()) continue;
        r.set_coeff(out, r.coeff(out) + (a * fe).scaled(fac));
      }
    }
  }
  return r;
}

LSeries PsDiffOp::apply_scalar(const LSeries& f) const {
  return to_scalar_series(apply(to_matrix_series(f)));
}

bool PsDiffOp::equal_on_window(const PsDiffOp& o) const {
  return (*this - o).is_zero();
}

PsDiffOp commutator(const PsDiffOp& a, const PsDiffOp& b) {
  return a * b - b * a;
}

PsDiffOp dress(const PsDiffOp& s, const PsDiffOp& a, int depth) {
  if (a.is_zero() && a.exact()) return a;
  int needed = depth + std::max(0, -min_wbound(a));
  PsDiffOp sinv = s.inverted(needed);
  return (s * a * sinv).restricted(depth);
}

PsDiffOp undress(const PsDiffOp& q_op, int depth) {
  if (q_op.is_zero() || !q_op.is_differential())
    throw precondition_error("undress needs a differential operator");
  int q = q_op.order();
  if (q < 1) throw precondition_error("undress needs order >= 1");
  int s = q_op.blocksize();
  XPoly one_p(SMat::identity(s));
  if (!(q_op.coeff(q) == one_p))
    throw precondition_error("undress needs a monic operator");
  if (q > 1 && !q_op.coeff(q - 1).is_zero())
    throw precondition_error("undress needs a vanishing subleading coefficient");

  int work = depth + q + 2;
  PsDiffOp dq = PsDiffOp::dpow(q, s, q_op.xcap());
  PsDiffOp r = q_op.restricted(std::min(q_op.wcap(), work));
  PsDiffOp big_s = PsDiffOp::identity(s, q_op.xcap());
  int guard = work + q + 8;
  for (int it = 0;; ++it) {
    if (it > guard)
      throw residual_error("dressing iteration did not terminate");
    PsDiffOp e = r - dq;
    if (e.is_zero()) break;
    int e_ord = e.order();
    if (e_ord > q - 2)
      throw residual_error("dressing iteration produced a non-normalized remainder");
    XPoly t = e.coeff(e_ord).antiderivative().scaled(Scalar(mpq_class(1, q)));
    PsDiffOp corr = PsDiffOp::identity(s, q_op.xcap());
    corr.set_term(e_ord - q + 1, t);
    PsDiffOp cinv = corr.inverted(work + q);
    r = (corr * r * cinv).restricted(work);
    big_s = (corr * big_s).restricted(work);
  }
  // Gauge fixing: a left factor with constant coefficients keeps the
  // conjugate D^q and zeroes the x-independent part of every tail term.
  for (int j = 1; j <= depth; ++j) {
    SMat g = big_s.coeff(-j).coeff(0);
    if (g.is_zero()) continue;
    PsDiffOp c = PsDiffOp::identity(s, q_op.xcap());
    c.set_term(-j, XPoly(-g));
    big_s = (c * big_s).restricted(work);
  }
  return big_s.restricted(depth);
}

PsDiffOp psdo_root(const PsDiffOp& q_op, int n, int depth) {
  int d2 = depth + std::max(n, 0);
  PsDiffOp s = undress(q_op, d2);
  PsDiffOp core = PsDiffOp::dpow(n, q_op.blocksize(), q_op.xcap());
  return (s.inverted(d2) * core * s).restricted(depth);
}

GrPoint sato_point(const PsDiffOp& s_op, int depth, int prec) {
  GrPoint v;
  v.s = s_op.blocksize();
  for (int n = 0; n < depth; ++n) {
    MSeries f = MSeries::monomial(n, SMat::identity(v.s));
    MSeries vn = s_op.apply(f);
    if (prec > 0 && !vn.exact())
      vn = vn.restricted(n - std::min(prec, s_op.wcap()));
    v.basis.push_back(vn);
  }
  return v;
}

namespace {

bool smat_close(const SMat& a, const SMat& b) {
  SMat d = a - b;
  if (d.empty()) return true;
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j)
      if (!scalar_close(d.at(i, j), Scalar())) return false;
  return true;
}

}  // namespace

namespace {

// Direct recovery: a weight-m monomial x^{m-j} D^{-j} lowers every exponent
// by exactly m, so when the rows satisfy v_n = S z^n literally, the z^{n-m}
// coefficient of v_n involves only the weight-m part of S.  The action
// factor signed_falling(n - j, m - j) vanishes for j <= n, so the rows
// n = 0..m-1 form a triangular system with pivot j = n + 1.
PsDiffOp rowwise_dressing(const GrPoint& v, int depth, int xcap, int& done) {
  int s = v.s;
  int n_basis = static_cast<int>(v.basis.size());
  PsDiffOp s_op = PsDiffOp::identity(s, xcap);
  done = 0;
  for (int m = 1; m <= depth && m <= n_basis; ++m) {
    bool have_rows = true;
    for (int n = 0; n < m; ++n)
      if (!v.basis[n].trusted(n - m)) have_rows = false;
    if (!have_rows) break;
    std::vector<SMat> b(m + 1, SMat(s, s));
    for (int n = m - 1; n >= 0; --n) {
      SMat k = v.basis[n].coeff(n - m);
      for (int j = n + 2; j <= m; ++j)
        k = k - b[j].scaled(signed_falling(n - j, m - j));
      b[n + 1] = k.scaled(signed_falling(-1, m - n - 1).inv());
    }
    for (int j = 1; j <= m; ++j) {
      if (b[j].is_zero()) continue;
      if (m - j > xcap) throw precondition_error("x-degree cap exceeded");
      XPoly p = s_op.coeff(-j);
      p.set_coeff(m - j, b[j]);
      s_op.set_term(-j, p);
    }
    done = m;
  }
  return s_op.restricted(done);
}

// The direct solve only reads rows 0..m-1 at weight m; accept it only when
// the remaining rows agree with the recovered operator on their trusted
// windows, up to weight `done`.
bool rows_match(const GrPoint& v, const PsDiffOp& s_op, int done) {
  int n_basis = static_cast<int>(v.basis.size());
  for (int n = 0; n < n_basis; ++n) {
    MSeries wn = s_op.apply(MSeries::monomial(n, SMat::identity(v.s)));
    for (int e = n; e >= n - done; --e) {
      if (!v.basis[n].trusted(e)) break;
      if (!((wn.trusted(e) ? wn.coeff(e) : SMat(v.s, v.s)) == v.basis[n].coeff(e)))
        return false;
    }
  }
  return true;
}

}  // namespace

PsDiffOp sato_operator(const GrPoint& v, int depth, int xcap) {
  int s = v.s;
  int n_basis = static_cast<int>(v.basis.size());
  if (n_basis < 1) throw precondition_error("empty basis");
  for (int n = 0; n < n_basis; ++n) {
    const MSeries& vn = v.basis[n];
    if (vn.is_zero() || vn.top() != n || !(vn.coeff(n) == SMat::identity(s)))
      throw precondition_error("basis is not in normal form");
  }
  int done = 0;
  PsDiffOp direct = rowwise_dressing(v, depth, xcap, done);
  if (done > 0 && rows_match(v, direct, done)) return direct;
  // Span fallback for bases given in an echelon gauge: solve for the inverse
  // dressing T, where T v_n must be a polynomial for every n.  At weight m
  // the vanishing conditions at exponent n - m for rows n = 0..m-1 form a
  // square triangular system for the weight-m part of T, since the
  // coefficient of x^{m-j} D^{-j} couples to row n only for j > n.
  PsDiffOp t_op = PsDiffOp::identity(s, xcap);
  std::vector<MSeries> resid = v.basis;
  done = 0;
  for (int m = 1; m <= depth && m <= n_basis; ++m) {
    bool have_rows = true;
    for (int n = 0; n < m; ++n)
      if (!resid[n].trusted(n - m)) have_rows = false;
    if (!have_rows) {
      if (m == 1)
        throw precondition_error("basis too shallow to recover a dressing operator");
      break;
    }
    std::vector<SMat> b(m + 1, SMat(s, s));
    for (int n = m - 1; n >= 0; --n) {
      SMat k = resid[n].coeff(n - m);
      for (int j = n + 2; j <= m; ++j)
        k = k + b[j].scaled(signed_falling(n - j, m - j));
      b[n + 1] = k.scaled(-signed_falling(-1, m - n - 1).inv());
    }
    PsDiffOp tm(s, xcap);
    for (int j = 1; j <= m; ++j) {
      if (b[j].is_zero()) continue;
      if (m - j > xcap) throw precondition_error("x-degree cap exceeded");
      XPoly p = t_op.coeff(-j);
      p.set_coeff(m - j, b[j]);
      t_op.set_term(-j, p);
      XPoly pm;
      pm.set_coeff(m - j, b[j]);
      tm.set_term(-j, pm);
    }
    if (!tm.is_zero())
      for (int n = 0; n < n_basis; ++n) resid[n] = resid[n] + tm.apply(v.basis[n]);
    done = m;
  }
  return t_op.restricted(done).inverted(done);
}

}  // namespace qcurve
