#include "qcurve/psdelta.hpp"

#include "qcurve/eigen.hpp"
#include "qcurve/quantize.hpp"

#include <numeric>

namespace qcurve {

namespace {

int imod(int k, int n) { return ((k % n) + n) % n; }

HSeries hs_one() { return HSeries(Scalar(1)); }

HSeries hpow(const HSeries& x, long e) {
  HSeries base = e < 0 ? x.inv() : x;
  if (e < 0) e = -e;
  HSeries r = hs_one();
  for (long i = 0; i < e; ++i) r = r * base;
  return r;
}

bool hs_eq(const HSeries& a, const HSeries& b) { return a == b; }

}  // namespace

// ---------------------------------------------------------------------------
// DiagonalSeq

DiagonalSeq DiagonalSeq::explicit_window(int lo, std::vector<HSeries> entries) {
  DiagonalSeq d;
  d.explicit_ = true;
  d.lo_ = lo;
  d.entries_ = std::move(entries);
  return d;
}

DiagonalSeq DiagonalSeq::periodic(int period, std::vector<HSeries> base,
                                  const HSeries& mult) {
  if (period < 1 || static_cast<int>(base.size()) != period)
    throw precondition_error("periodic diagonal needs one base entry per residue");
  DiagonalSeq d;
  d.explicit_ = false;
  d.period_ = period;
  d.mult_ = mult;
  d.entries_ = std::move(base);
  return d;
}

void DiagonalSeq::trim_window() {}

bool DiagonalSeq::is_zero() const {
  for (const auto& x : entries_)
    if (!x.is_zero()) return false;
  return true;
}

bool DiagonalSeq::is_constant() const {
  if (explicit_) return false;
  bool all_zero = is_zero();
  for (const auto& x : entries_)
    if (!hs_eq(x, entries_[0])) return false;
  return all_zero || hs_eq(mult_, hs_one());
}

HSeries DiagonalSeq::at(int k) const {
  if (explicit_) {
    if (k < lo() || k > hi())
      throw window_underflow("diagonal entry outside trusted window");
    return entries_[k - lo_];
  }
  int i = imod(k, period_);
  long t = (static_cast<long>(k) - i) / period_;
  if (t == 0) return entries_[i];
  return hpow(mult_, t) * entries_[i];
}

DiagonalSeq DiagonalSeq::shifted(int s) const {
  if (explicit_) {
    DiagonalSeq d = *this;
    d.lo_ += s;
    return d;
  }
  std::vector<HSeries> base(period_);
  for (int i = 0; i < period_; ++i) base[i] = at(i - s);
  return periodic(period_, std::move(base), mult_);
}

DiagonalSeq DiagonalSeq::scaled(const HSeries& c) const {
  DiagonalSeq d = *this;
  for (auto& x : d.entries_) x = x * c;
  return d;
}

DiagonalSeq DiagonalSeq::entries_inverted() const {
  DiagonalSeq d = *this;
  for (auto& x : d.entries_) x = x.inv();
  if (!explicit_) d.mult_ = mult_.inv();
  return d;
}

DiagonalSeq operator+(const DiagonalSeq& a, const DiagonalSeq& b) {
  if (!a.explicit_ && !b.explicit_) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    int n = std::lcm(a.period_, b.period_);
    HSeries ma = hpow(a.mult_, n / a.period_);
    HSeries mb = hpow(b.mult_, n / b.period_);
    if (!hs_eq(ma, mb))
      throw precondition_error("incompatible multipliers in diagonal sum");
    std::vector<HSeries> base(n);
    for (int i = 0; i < n; ++i) base[i] = a.at(i) + b.at(i);
    return DiagonalSeq::periodic(n, std::move(base), ma);
  }
  int lo = std::numeric_limits<int>::min() / 2;
  int hi = std::numeric_limits<int>::max() / 2;
  if (a.explicit_) {
    lo = std::max(lo, a.lo());
    hi = std::min(hi, a.hi());
  }
  if (b.explicit_) {
    lo = std::max(lo, b.lo());
    hi = std::min(hi, b.hi());
  }
  std::vector<HSeries> entries;
  for (int k = lo; k <= hi; ++k) entries.push_back(a.at(k) + b.at(k));
  return DiagonalSeq::explicit_window(lo, std::move(entries));
}

DiagonalSeq operator*(const DiagonalSeq& a, const DiagonalSeq& b) {
  if (!a.explicit_ && !b.explicit_) {
    int n = std::lcm(a.period_, b.period_);
    HSeries ma = hpow(a.mult_, n / a.period_);
    HSeries mb = hpow(b.mult_, n / b.period_);
    std::vector<HSeries> base(n);
    for (int i = 0; i < n; ++i) base[i] = a.at(i) * b.at(i);
    return DiagonalSeq::periodic(n, std::move(base), ma * mb);
  }
  int lo = std::numeric_limits<int>::min() / 2;
  int hi = std::numeric_limits<int>::max() / 2;
  if (a.explicit_) {
    lo = std::max(lo, a.lo());
    hi = std::min(hi, a.hi());
  }
  if (b.explicit_) {
    lo = std::max(lo, b.lo());
    hi = std::min(hi, b.hi());
  }
  std::vector<HSeries> entries;
  for (int k = lo; k <= hi; ++k) entries.push_back(a.at(k) * b.at(k));
  return DiagonalSeq::explicit_window(lo, std::move(entries));
}

bool operator==(const DiagonalSeq& a, const DiagonalSeq& b) {
  if (!a.explicit_ && !b.explicit_) {
    int n = std::lcm(a.period_, b.period_);
    for (int i = 0; i < n; ++i)
      if (!hs_eq(a.at(i), b.at(i))) return false;
    if (a.is_zero()) return true;
    return hs_eq(hpow(a.mult_, n / a.period_), hpow(b.mult_, n / b.period_));
  }
  int lo = std::numeric_limits<int>::min() / 2;
  int hi = std::numeric_limits<int>::max() / 2;
  if (a.explicit_) {
    lo = std::max(lo, a.lo());
    hi = std::min(hi, a.hi());
  }
  if (b.explicit_) {
    lo = std::max(lo, b.lo());
    hi = std::min(hi, b.hi());
  }
  for (int k = lo; k <= hi; ++k)
    if (!hs_eq(a.at(k), b.at(k))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// PsDeltaOp

PsDeltaOp PsDeltaOp::shift_op(int s) {
  PsDeltaOp op;
  op.terms_[s] = DiagonalSeq::constant(hs_one());
  return op;
}

PsDeltaOp PsDeltaOp::from_term(int s, const DiagonalSeq& a) {
  PsDeltaOp op;
  if (!a.is_zero()) op.terms_[s] = a;
  return op;
}

int PsDeltaOp::order() const {
  if (terms_.empty()) throw precondition_error("order of the zero operator");
  return terms_.rbegin()->first;
}

DiagonalSeq PsDeltaOp::coeff(int s) const {
  auto it = terms_.find(s);
  if (it == terms_.end()) return DiagonalSeq();
  return it->second;
}

void PsDeltaOp::set_term(int s, const DiagonalSeq& a) {
  if (a.is_zero())
    terms_.erase(s);
  else
    terms_[s] = a;
}

bool PsDeltaOp::is_monic() const {
  if (terms_.empty()) return false;
  return terms_.rbegin()->second == DiagonalSeq::constant(hs_one());
}

PsDeltaOp PsDeltaOp::plus_part() const {
  PsDeltaOp r;
  for (const auto& [s, a] : terms_)
    if (s >= 0) r.terms_[s] = a;
  if (floor_ > 0) r.floor_ = floor_;
  return r;
}

PsDeltaOp PsDeltaOp::minus_part() const {
  PsDeltaOp r;
  for (const auto& [s, a] : terms_)
    if (s < 0) r.terms_[s] = a;
  r.floor_ = floor_;
  return r;
}

PsDeltaOp PsDeltaOp::restricted(int floor) const {
  PsDeltaOp r = *this;
  r.floor_ = std::max(r.floor_, floor);
  r.trim();
  return r;
}

PsDeltaOp PsDeltaOp::scaled(const HSeries& c) const {
  PsDeltaOp r = *this;
  for (auto& [s, a] : r.terms_) a = a.scaled(c);
  r.trim();
  return r;
}

void PsDeltaOp::trim() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->first < floor_ || it->second.is_zero())
      it = terms_.erase(it);
    else
      ++it;
  }
}

PsDeltaOp operator+(const PsDeltaOp& a, const PsDeltaOp& b) {
  PsDeltaOp r = a;
  r.floor_ = std::max(a.floor_, b.floor_);
  for (const auto& [s, d] : b.terms_) {
    auto it = r.terms_.find(s);
    if (it == r.terms_.end())
      r.terms_[s] = d;
    else
      it->second = it->second + d;
  }
  r.trim();
  return r;
}

PsDeltaOp operator*(const PsDeltaOp& a, const PsDeltaOp& b) {
  PsDeltaOp r;
  if ((a.exact() && a.is_zero()) || (b.exact() && b.is_zero())) return r;
  auto efftop = [](const PsDeltaOp& x) {
    return x.is_zero() ? x.floor_ - 1 : x.order();
  };
  if (a.exact() && b.exact())
    r.floor_ = PsDeltaOp::kExactFloor;
  else if (a.exact())
    r.floor_ = b.floor_ + efftop(a);
  else if (b.exact())
    r.floor_ = a.floor_ + efftop(b);
  else
    r.floor_ = std::max(a.floor_ + efftop(b), b.floor_ + efftop(a));
  for (const auto& [s, da] : a.terms_) {
    for (const auto& [t, db] : b.terms_) {
      if (s + t < r.floor_) continue;
      DiagonalSeq c = da * db.shifted(s);
      if (c.is_zero()) continue;
      auto it = r.terms_.find(s + t);
      if (it == r.terms_.end())
        r.terms_[s + t] = c;
      else
        it->second = it->second + c;
    }
  }
  r.trim();
  return r;
}

ZSeries PsDeltaOp::apply(const ZSeries& f) const {
  ZSeries r;
  if (exact() && is_zero()) return r;
  if (f.exact() && f.is_zero()) return r;
  if (f.is_zero()) {
    // Only unknown mass below the input floor can contribute.
    if (is_zero()) return ZSeries(floor_ + f.floor());
    return ZSeries(f.floor() + order());
  }
  if (is_zero()) return ZSeries(floor_ + f.top());
  int smin = terms_.begin()->first;
  int smax = order();
  long rf = ZSeries::kExactFloor;
  if (!exact()) rf = std::max(rf, static_cast<long>(floor_) + f.top());
  if (!f.exact()) rf = std::max(rf, static_cast<long>(f.floor()) + smax);
  int hi = f.top() + smax;
  int lo = static_cast<int>(std::max(rf, static_cast<long>(f.low()) + smin));
  ZSeries out(rf <= ZSeries::kExactFloor ? ZSeries::kExactFloor
                                         : static_cast<int>(rf));
  for (int e = hi; e >= lo; --e) {
    HSeries acc;
    for (const auto& [s, a] : terms_) {
      const HSeries& c = f.coeff(e - s);
      if (c.is_zero()) continue;
      acc = acc + a.at(e) * c;
    }
    if (!acc.is_zero()) out.set_coeff(e, acc);
  }
  return out;
}

PsDeltaOp PsDeltaOp::inverted(int depth) const {
  if (is_zero()) throw precondition_error("inverse of the zero operator");
  int top = order();
  PsDeltaOp lead_inv = PsDeltaOp::from_term(
      -top, terms_.rbegin()->second.entries_inverted().shifted(-top));
  PsDeltaOp m = (PsDeltaOp::identity() - lead_inv * (*this)).restricted(-depth);
  PsDeltaOp acc = PsDeltaOp::identity();
  PsDeltaOp pw = acc;
  for (int k = 1; k <= depth; ++k) {
    pw = (pw * m).restricted(-depth);
    if (pw.is_zero()) break;
    acc = acc + pw;
  }
  return (acc * lead_inv).restricted(-top - depth);
}

bool PsDeltaOp::equal_on_window(const PsDeltaOp& o) const {
  return (*this - o).is_zero();
}

PsDeltaOp commutator(const PsDeltaOp& a, const PsDeltaOp& b) {
  return a * b - b * a;
}

PsDeltaOp verify_discrete(const PsDeltaOp& k_op, const PsDeltaOp& l_op,
                          const HSeries& lambda) {
  return k_op * l_op - (l_op * k_op).scaled(lambda);
}

// ---------------------------------------------------------------------------
// Flags

Flag flag_from_dressing(const PsDeltaOp& s, int depth) {
  Flag f;
  f.depth = depth;
  for (int m = -depth; m <= depth; ++m)
    f.gen.push_back(s.apply(ZSeries::monomial(m, hs_one())));
  return f;
}

PsDeltaOp dressing_from_flag(const Flag& f) {
  int d = f.depth;
  bool all_exact = true;
  int tail = 0;
  for (int m = -d; m <= d; ++m) {
    const ZSeries& w = f.at(m);
    if (w.is_zero() || !(w.coeff(m) == hs_one()))
      throw precondition_error("flag generator is not in normal form");
    if (!w.exact()) all_exact = false;
    if (w.exact()) tail = std::max(tail, m - w.low());
  }
  PsDeltaOp op = PsDeltaOp::identity();
  int r = 1;
  for (;; ++r) {
    if (all_exact && r > tail) break;
    int hi = d - r;
    std::vector<HSeries> entries;
    int k = hi;
    for (; k >= -d - r; --k) {
      if (!f.at(k + r).trusted(k)) break;
      entries.push_back(f.at(k + r).coeff(k));
    }
    if (entries.empty()) break;
    std::reverse(entries.begin(), entries.end());
    op.set_term(-r, DiagonalSeq::explicit_window(k + 1, std::move(entries)));
  }
  if (!all_exact) op = op.restricted(-(r - 1));
  return op;
}

// ---------------------------------------------------------------------------
// Undressing a difference operator

UndressResult undress_difference(const PsDeltaOp& l_op, int depth, int width) {
  if (l_op.is_zero() || !l_op.is_monic() || l_op.order() < 1)
    throw precondition_error("undressing needs a monic operator of positive order");
  int n = l_op.order();
  if (width < n + depth)
    throw precondition_error("diagonal window too narrow for the requested depth");
  int w2 = 2 * width + 1;
  std::vector<std::vector<HSeries>> sr(depth + 1, std::vector<HSeries>(w2));
  auto s_at = [&](int r, int k) -> HSeries {
    if (r == 0) return hs_one();
    return sr[r][k + width];
  };
  PsDeltaOp s = PsDeltaOp::identity();
  for (int m = 1; m <= depth; ++m) {
    std::vector<HSeries> kv(w2);
    for (int k = -width; k <= width; ++k) {
      HSeries acc;
      for (int r = 0; r < m; ++r) {
        DiagonalSeq a = l_op.coeff(n - m + r);
        if (a.is_zero()) continue;
        acc = acc + s_at(r, k) * a.at(k + r);
      }
      kv[k + width] = acc;
    }
    for (int k = n; k <= width; ++k)
      sr[m][k + width] = sr[m][k - n + width] - kv[k + width];
    for (int k = -1; k >= -width; --k)
      sr[m][k + width] = sr[m][k + n + width] + kv[k + n + width];
    s.set_term(-m, DiagonalSeq::explicit_window(-width, sr[m]));
  }
  s = s.restricted(-depth);
  UndressResult res;
  res.s = s;
  PsDeltaOp sin = s.inverted(depth);
  res.l_inverse = sin * PsDeltaOp::shift_op(-n) * s;
  int margin = std::max(2, depth / 3);
  res.invertible = true;
  for (const auto& [sh, a] : res.l_inverse.terms())
    if (sh < res.l_inverse.floor() + margin && !a.is_zero()) res.invertible = false;
  return res;
}

// ---------------------------------------------------------------------------
// Companion matrix of a discrete pair

WMatrix discrete_companion(const DiscretePair& pair, int depth, int width) {
  if (!pair.l_invertible)
    throw precondition_error("companion basis needs an invertible partner");
  int n = pair.l_op.order();
  UndressResult ud = undress_difference(pair.l_op, depth, width);
  PsDeltaOp sin = ud.s.inverted(depth);
  PsDeltaOp a = sin * pair.k_op * ud.s;
  WMatrix m = WMatrix::zero(n, 1);
  for (const auto& [sh, diag] : a.terms()) {
    // The subspace is preserved exactly when every diagonal repeats with
    // ratio lambda after n steps.
    if (diag.is_explicit()) {
      for (int k = diag.lo(); k + n <= diag.hi(); ++k)
        if (!hs_eq(diag.at(k + n), pair.lambda * diag.at(k)))
          throw residual_error("operator does not preserve the flag of its partner");
    } else {
      for (int k = 0; k < diag.period(); ++k)
        if (!hs_eq(diag.at(k + n), pair.lambda * diag.at(k)))
          throw residual_error("operator does not preserve the flag of its partner");
    }
    for (int j = 0; j < n; ++j) {
      if (!diag.trusted(j + sh))
        throw precondition_error("diagonal window too narrow for companion entries");
      HSeries val = diag.at(j + sh);
      if (val.is_zero()) continue;
      if (!val.is_constant())
        throw residual_error("companion entry is not scalar");
      int i = imod(j + sh, n);
      int t = (j + sh - i) / n;
      m.add(i, j, t, val.constant());
    }
  }
  // Canonical diagonal gauge: rescaling the flag generators by constants d_i
  // changes entries by d_c / d_r.  Fix d_0 = 1 and walk the nonzero entries,
  // making each spanning entry monic.
  std::vector<Scalar> d(n, Scalar(1));
  std::vector<bool> known(n, false);
  known[0] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        if (r == c || m.e[r][c].is_zero()) continue;
        Scalar lead = m.e[r][c].leading().at(0, 0);
        if (lead.is_zero()) continue;
        if (known[r] && !known[c]) {
          d[c] = d[r] * lead.inv();
          known[c] = true;
          changed = true;
        } else if (known[c] && !known[r]) {
          d[r] = d[c] * lead;
          known[r] = true;
          changed = true;
        }
      }
  }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (r == c || m.e[r][c].is_zero()) continue;
      Scalar f = d[c] * d[r].inv();
      if (f == Scalar(1)) continue;
      m.e[r][c] =
          m.e[r][c].mapped([&f](const SMat& blk) { return blk.scaled(f); });
    }
  return m;
}

// ---------------------------------------------------------------------------
// Branch recursion shared by quantization and deformation

namespace {

struct BGrading {
  int n = 1;
  int p = 0;
  std::map<int, SMat> by_exp;  // exponent -> n x n coefficient matrix
  SMat sigma;
};

BGrading b_grading(const WMatrix& m) {
  if (m.s != 1)
    throw precondition_error("discrete quantization supports scalar entries only");
  BGrading g;
  g.n = m.q;
  bool any = false;
  for (int r = 0; r < g.n; ++r)
    for (int c = 0; c < g.n; ++c) {
      const WPoly& e = m.e[r][c];
      if (e.is_zero()) continue;
      if (!e.exact()) throw precondition_error("companion entries must be exact");
      for (int d = e.low(); d <= e.top(); ++d) {
        SMat cf = e.coeff(d);
        if (cf.empty() || cf.is_zero()) continue;
        int exp = g.n * d + r - c;
        auto it = g.by_exp.find(exp);
        if (it == g.by_exp.end())
          it = g.by_exp.emplace(exp, SMat(g.n, g.n)).first;
        it->second.at(r, c) = it->second.at(r, c) + cf.at(0, 0);
        any = true;
      }
    }
  if (!any) throw precondition_error("zero companion matrix");
  g.p = g.by_exp.rbegin()->first;
  g.sigma = g.by_exp.at(g.p);
  return g;
}

SMat b_level(const BGrading& g, int m) {
  auto it = g.by_exp.find(g.p - m);
  if (it == g.by_exp.end()) return SMat(g.n, g.n);
  return it->second;
}

struct BranchState {
  int n = 1;
  int p = 0;
  HSeries lambda;
  // b[m]: base values at residues 0..n-1, extended by b_{k+n} = lambda b_k.
  std::vector<std::vector<HSeries>> b;
  std::vector<std::vector<HSeries>> u;
};

HSeries b_at(const BranchState& st, int m, int k) {
  int rho = imod(k, st.n);
  long t = (static_cast<long>(k) - rho) / st.n;
  if (t == 0) return st.b[m][rho];
  return hpow(st.lambda, t) * st.b[m][rho];
}

void b_store(BranchState& st, int m, const std::vector<HSeries>& vals) {
  // vals[i] is the value at index p - m + i.
  st.b.resize(m + 1);
  st.b[m].assign(st.n, HSeries());
  for (int i = 0; i < st.n; ++i) {
    int k = st.p - m + i;
    int rho = imod(k, st.n);
    long t = (static_cast<long>(k) - rho) / st.n;
    st.b[m][rho] = hpow(st.lambda, -t) * vals[i];
  }
}

// Solve sum_j A[i][j] mu[j] + E[i] mb[i] = R[i] for (mu, mb), preferring to
// pivot on mu columns and zeroing the free unknowns.
void solve_level(std::vector<std::vector<HSeries>> A, std::vector<HSeries> E,
                 std::vector<HSeries> R, std::vector<HSeries>& mu,
                 std::vector<HSeries>& mb) {
  int n = static_cast<int>(E.size());
  std::vector<std::vector<HSeries>> t(n, std::vector<HSeries>(2 * n + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = E[i];
    t[i][2 * n] = R[i];
  }
  std::vector<int> pivcol;
  int rank = 0;
  for (int c = 0; c < 2 * n && rank < n; ++c) {
    int pr = -1;
    for (int r = rank; r < n; ++r)
      if (!t[r][c].constant().is_zero()) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(t[rank], t[pr]);
    HSeries inv = t[rank][c].inv();
    for (int j = c; j <= 2 * n; ++j) t[rank][j] = t[rank][j] * inv;
    for (int r = 0; r < n; ++r) {
      if (r == rank || t[r][c].is_zero()) continue;
      HSeries f = t[r][c];
      for (int j = c; j <= 2 * n; ++j) t[r][j] = t[r][j] - f * t[rank][j];
    }
    pivcol.push_back(c);
    ++rank;
  }
  for (int r = rank; r < n; ++r)
    if (!t[r][2 * n].is_zero())
      throw residual_error("branch recursion is inconsistent");
  mu.assign(n, HSeries());
  mb.assign(n, HSeries());
  for (int r = 0; r < rank; ++r) {
    int c = pivcol[r];
    if (c < n)
      mu[c] = t[r][2 * n];
    else
      mb[c - n] = t[r][2 * n];
  }
}

// Right-hand side of the order-m branch equation, before the unknowns.
std::vector<HSeries> level_rhs(const BGrading& g, const BranchState& st, int m) {
  int n = g.n;
  std::vector<HSeries> R(n);
  for (int k = 0; k < m; ++k) {
    SMat B = b_level(g, m - k);
    for (int i = 0; i < n; ++i) {
      HSeries acc;
      for (int j = 0; j < n; ++j) {
        if (B.at(i, j).is_zero()) continue;
        acc = acc + cmul(B.at(i, j), st.u[k][j]);
      }
      R[i] = R[i] + acc;
      if (k >= 1) R[i] = R[i] - b_at(st, m - k, g.p - m + i) * st.u[k][i];
    }
  }
  return R;
}

DiscretePair assemble_pair(const BranchState& st, int window) {
  int n = st.n;
  PsDeltaOp s = PsDeltaOp::identity();
  for (int r = 1; r <= window; ++r) {
    std::vector<HSeries> base(n);
    for (int k = 0; k < n; ++k) {
      int i = imod(k + r, n);
      base[k] = st.u[r][i] * st.u[0][i].inv();
    }
    s.set_term(-r, DiagonalSeq::periodic(n, std::move(base), hs_one()));
  }
  s = s.restricted(-window);
  PsDeltaOp sin = s.inverted(window);
  PsDeltaOp ktil;
  for (int m = 0; m <= window && m < static_cast<int>(st.b.size()); ++m)
    ktil = ktil + PsDeltaOp::from_term(
                      st.p - m, DiagonalSeq::periodic(n, st.b[m], st.lambda));
  ktil = ktil.restricted(st.p - window);
  PsDeltaOp k_full = sin * ktil * s;
  PsDeltaOp l_full = sin * PsDeltaOp::shift_op(n) * s;
  int margin = std::max(2, window / 3);
  auto truncate_exact = [margin](const PsDeltaOp& op) {
    PsDeltaOp out;
    for (const auto& [sh, a] : op.terms()) {
      if (sh < op.floor() + margin)
        throw residual_error("dressing tail does not terminate");
      out.set_term(sh, a);
    }
    return out;
  };
  DiscretePair pair;
  pair.k_op = truncate_exact(k_full);
  pair.l_op = truncate_exact(l_full);
  pair.lambda = st.lambda;
  pair.p = st.p;
  pair.n = n;
  if (!verify_discrete(pair.k_op, pair.l_op, pair.lambda).is_zero())
    throw residual_error("assembled pair fails the exchange relation");
  PsDeltaOp linv = pair.l_op.inverted(window);
  pair.l_invertible = true;
  for (const auto& [sh, a] : linv.terms())
    if (sh < linv.floor() + margin && !a.is_zero()) pair.l_invertible = false;
  return pair;
}

}  // namespace

std::vector<std::vector<int>> discrete_branches(const WMatrix& m,
                                                const HSeries& lambda, int bits) {
  BGrading g = b_grading(m);
  int n = g.n;
  Scalar l0 = lambda.constant();
  EigenData eig = eigen_leading(g.sigma, bits);
  std::vector<std::vector<int>> out;
  std::vector<int> a(n, 0);
  for (;;) {
    BranchState st;
    st.n = n;
    st.p = g.p;
    st.lambda = HSeries(l0);
    st.b.resize(1);
    st.b[0].resize(n);
    for (int i = 0; i < n; ++i) st.b[0][i] = HSeries(eig.values[a[i]]);
    SMat A0(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        A0.at(i, j) = -g.sigma.at(i, j);
        if (i == j) A0.at(i, j) = A0.at(i, j) + b_at(st, 0, g.p + i).constant();
      }
    try {
      std::vector<Scalar> u0 = null_vector(A0);
      bool complete = true;
      for (const Scalar& c : u0)
        if (c.is_zero()) complete = false;
      if (complete) out.push_back(a);
    } catch (const precondition_error&) {
    }
    int i = n - 1;
    for (; i >= 0; --i) {
      if (++a[i] < n) break;
      a[i] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

DiscretePair discrete_quantize(const WMatrix& m, const HSeries& lambda,
                               const std::vector<int>& assign,
                               const DiscreteOptions& opt) {
  BGrading g = b_grading(m);
  int n = g.n;
  if (!lambda.is_constant())
    throw precondition_error("exchange parameter must be a scalar");
  Scalar l0 = lambda.constant();
  if (!(l0.pow(n) == Scalar(1)))
    throw precondition_error("exchange parameter must be an n-th root of unity");
  if (static_cast<int>(assign.size()) != n)
    throw precondition_error("branch assignment needs one eigenvalue per residue");
  EigenData eig = eigen_leading(g.sigma, opt.bits);
  BranchState st;
  st.n = n;
  st.p = g.p;
  st.lambda = HSeries(l0);
  st.b.resize(1);
  st.b[0].resize(n);
  for (int i = 0; i < n; ++i) {
    if (assign[i] < 0 || assign[i] >= static_cast<int>(eig.values.size()))
      throw precondition_error("branch assignment index out of range");
    st.b[0][i] = HSeries(eig.values[assign[i]]);
  }
  SMat A0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      A0.at(i, j) = -g.sigma.at(i, j);
      if (i == j) A0.at(i, j) = A0.at(i, j) + b_at(st, 0, g.p + i).constant();
    }
  std::vector<Scalar> u0 = null_vector(A0);
  st.u.resize(1);
  st.u[0].resize(n);
  for (int i = 0; i < n; ++i) {
    if (u0[i].is_zero())
      throw precondition_error("branch eigenvector has a vanishing component");
    st.u[0][i] = HSeries(u0[i]);
  }
  int window = opt.window;
  for (int m2 = 1; m2 <= window; ++m2) {
    std::vector<std::vector<HSeries>> A(n, std::vector<HSeries>(n));
    std::vector<HSeries> E(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        A[i][j] = HSeries(-g.sigma.at(i, j));
      A[i][i] = A[i][i] + b_at(st, 0, g.p - m2 + i);
      E[i] = st.u[0][i];
    }
    std::vector<HSeries> R = level_rhs(g, st, m2);
    std::vector<HSeries> mu, mb;
    solve_level(A, E, R, mu, mb);
    st.u.push_back(mu);
    b_store(st, m2, mb);
  }
  return assemble_pair(st, window);
}

DiscretePair hbar_deform(const DiscretePair& pair, int hcap,
                         const DiscreteOptions& opt) {
  if (!(pair.lambda == hs_one()))
    throw precondition_error("deformation starts from a commuting pair");
  int n = pair.l_op.order();
  int window = opt.window;
  int depth = opt.depth > 0 ? opt.depth : window + pair.p + n + 2;
  int width = opt.width > 0 ? opt.width : depth + n + std::abs(pair.p) + 2;
  UndressResult ud = undress_difference(pair.l_op, depth, width);
  // Seed ladder: the input flag restricted to one period, extended
  // t-independently; valid because the partner acts as multiplication by
  // z^n on the flag of a quantizable pair.
  std::vector<ZSeries> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = ud.s.apply(ZSeries::monomial(i, hs_one()));
  std::vector<std::vector<HSeries>> useed(window + 1, std::vector<HSeries>(n));
  for (int m = 0; m <= window; ++m)
    for (int i = 0; i < n; ++i) {
      if (!v[i].trusted(i - m))
        throw precondition_error("dressing depth too small for the deformation");
      useed[m][i] = v[i].coeff(i - m);
    }
  // Seed diagonal symbol via the t-independent dressing built from the seeds.
  PsDeltaOp sseed = PsDeltaOp::identity();
  for (int r = 1; r <= window; ++r) {
    std::vector<HSeries> base(n);
    for (int k = 0; k < n; ++k) base[k] = useed[r][imod(k + r, n)];
    sseed.set_term(-r, DiagonalSeq::periodic(n, std::move(base), hs_one()));
  }
  sseed = sseed.restricted(-window);
  PsDeltaOp ktil0 = sseed * pair.k_op * sseed.inverted(window);
  int p = pair.k_op.order();
  BGrading g = b_grading(discrete_companion(pair, depth, width));
  if (g.p != p) throw residual_error("companion order mismatch");
  HSeries lam = HSeries::exp_hbar(hcap);
  BranchState st;
  st.n = n;
  st.p = p;
  st.lambda = lam;
  st.b.resize(1);
  st.b[0].resize(n);
  {
    DiagonalSeq d0 = ktil0.coeff(p);
    std::vector<HSeries> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = d0.at(p + i);
    st.u.resize(1);
    st.u[0] = useed[0];
    b_store(st, 0, vals);
  }
  for (int m = 1; m <= window; ++m) {
    std::vector<std::vector<HSeries>> A(n, std::vector<HSeries>(n));
    std::vector<HSeries> E(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) A[i][j] = HSeries(-g.sigma.at(i, j));
      A[i][i] = A[i][i] + b_at(st, 0, p - m + i);
      E[i] = st.u[0][i];
    }
    std::vector<HSeries> R = level_rhs(g, st, m);
    // Split the unknowns as seed plus a correction of order hbar.
    std::vector<HSeries> bseed(n);
    {
      DiagonalSeq dm = ktil0.coeff(p - m);
      for (int i = 0; i < n; ++i) bseed[i] = dm.at(p - m + i);
    }
    std::vector<HSeries> Rp(n);
    for (int i = 0; i < n; ++i) {
      Rp[i] = R[i] - E[i] * bseed[i];
      for (int j = 0; j < n; ++j) Rp[i] = Rp[i] - A[i][j] * useed[m][j];
      if (!Rp[i].constant().is_zero())
        throw residual_error("input pair does not satisfy the branch recursion");
    }
    std::vector<HSeries> du, db;
    solve_level(A, E, Rp, du, db);
    std::vector<HSeries> mu(n), mbvals(n);
    for (int i = 0; i < n; ++i) {
      mu[i] = useed[m][i] + du[i];
      mbvals[i] = bseed[i] + db[i];
    }
    st.u.push_back(mu);
    b_store(st, m, mbvals);
  }
  return assemble_pair(st, window);
}

PsDeltaOp dkp_flow_step(const PsDeltaOp& l_op, int m, const Scalar& t, int depth,
                        int width) {
  UndressResult ud = undress_difference(l_op, depth, width);
  PsDeltaOp r = ud.s.inverted(depth) * PsDeltaOp::shift_op(m) * ud.s;
  return l_op + commutator(r.plus_part(), l_op).scaled(HSeries(t));
}

}  // namespace qcurve
