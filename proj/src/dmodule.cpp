#include "qcurve/dmodule.hpp"

#include <algorithm>
#include <functional>

namespace qcurve {

namespace {

HRat hrat_from_hseries(const HSeries& h) {
  HPoly p;
  for (int k = 0; k <= h.degree(); ++k) p.set_coeff(k, h.coeff(k));
  return HRat(p);
}

// Laurent polynomial in z with hbar-polynomial coefficients as a rational
// function of z.
ZRat zrat_from_series(const ZSeries& s) {
  if (s.is_zero()) return ZRat();
  if (!s.exact())
    throw precondition_error("connection entries must be exact Laurent polynomials");
  int lo = s.low();
  int shift = lo < 0 ? -lo : 0;
  ZPoly num;
  for (int e = lo; e <= s.top(); ++e) {
    HSeries c = s.coeff(e);
    if (!c.is_zero()) num.set_coeff(e + shift, hrat_from_hseries(c));
  }
  ZPoly den = ZPoly::monomial(shift, HRat(1L));
  return ZRat(num, den);
}

// Solves A x = rhs over the rational function field; returns false when A is
// singular.
bool solve_rat(std::vector<std::vector<ZRat>> a, std::vector<ZRat> rhs,
               std::vector<ZRat>& out) {
  int n = static_cast<int>(a.size());
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!a[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) return false;
    std::swap(a[piv], a[col]);
    std::swap(rhs[piv], rhs[col]);
    ZRat pinv = a[col][col].inv();
    for (int c = col; c < n; ++c) a[col][c] = a[col][c] * pinv;
    rhs[col] = rhs[col] * pinv;
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      ZRat f = a[r][col];
      for (int c = col; c < n; ++c) a[r][c] = a[r][c] - f * a[col][c];
      rhs[r] = rhs[r] - f * rhs[col];
    }
  }
  out = std::move(rhs);
  return true;
}

}  // namespace

Connection connection_from_companion(const WMatrix& m, const HSeries& hbar) {
  BMatrix bm = build_b_matrix(m, Scalar(0L));
  Connection c;
  c.q = bm.q;
  c.dim = bm.q * bm.s;
  c.p = bm.p;
  c.hbar = hbar;
  c.b.assign(c.dim, std::vector<ZSeries>(c.dim));
  int s = bm.s;
  for (int i = 0; i < bm.q; ++i)
    for (int j = 0; j < bm.q; ++j) {
      const Series<SMat>& ent = bm.entry[i][j];
      if (ent.is_zero()) continue;
      for (int e = ent.low(); e <= ent.top(); ++e) {
        SMat cm = ent.coeff(e);
        if (cm.empty()) continue;
        for (int a = 0; a < s; ++a)
          for (int b = 0; b < s; ++b) {
            Scalar v = cm.at(a, b);
            if (!v.is_zero()) c.b[i * s + a][j * s + b].set_coeff(e, HSeries(v));
          }
      }
    }
  for (int i = 1; i < bm.q; ++i) {
    HSeries corr = HSeries(Scalar::rational(-i, bm.q)) * hbar;
    if (corr.is_zero()) continue;
    for (int a = 0; a < s; ++a) {
      ZSeries& d = c.b[i * s + a][i * s + a];
      d.set_coeff(-bm.q, d.coeff(-bm.q) + corr);
    }
  }
  return c;
}

ScalarOperator cyclic_reduce(const Connection& c) {
  int n = c.dim;
  std::vector<std::vector<ZRat>> bmat(n, std::vector<ZRat>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) bmat[i][j] = zrat_from_series(c.b[i][j]);
  ZRat hb(ZPoly(hrat_from_hseries(c.hbar)));
  // d/dz^q = (1/(q z^{q-1})) d/dz
  ZRat dfac(ZPoly(HRat(1L)), ZPoly::monomial(c.q - 1, HRat(static_cast<long>(c.q))));
  auto step = [&](const std::vector<ZRat>& v) {
    std::vector<ZRat> r(n);
    for (int i = 0; i < n; ++i) {
      r[i] = hb * dfac * v[i].derivative();
      for (int j = 0; j < n; ++j) r[i] = r[i] + bmat[i][j] * v[j];
    }
    return r;
  };
  for (int cand = 0; cand < 2 * n - 1; ++cand) {
    std::vector<Scalar> start(n, Scalar(0L));
    if (cand < n)
      start[cand] = Scalar(1L);
    else
      for (int i = 0; i <= cand - n + 1; ++i) start[i] = Scalar(1L);
    std::vector<std::vector<ZRat>> vs(n + 1, std::vector<ZRat>(n));
    for (int i = 0; i < n; ++i)
      vs[0][i] = start[i].is_zero() ? ZRat() : ZRat(ZPoly(hrat_from_hseries(HSeries(start[i]))));
    for (int k = 0; k < n; ++k) vs[k + 1] = step(vs[k]);
    std::vector<std::vector<ZRat>> a(n, std::vector<ZRat>(n));
    std::vector<ZRat> rhs(n);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) a[i][k] = vs[k][i];
      rhs[i] = -vs[n][i];
    }
    std::vector<ZRat> sol;
    if (!solve_rat(a, rhs, sol)) continue;
    for (int i = 0; i < n; ++i) {
      ZRat acc = vs[n][i];
      for (int k = 0; k < n; ++k) acc = acc + sol[k] * vs[k][i];
      if (!acc.is_zero())
        throw residual_error("cyclic reduction left a nonzero remainder");
    }
    ScalarOperator op;
    op.order = n;
    op.q = c.q;
    op.a = std::move(sol);
    op.a.push_back(ZRat(1L));
    op.cyclic_index = cand;
    op.cyclic_vector = std::move(start);
    return op;
  }
  throw precondition_error("no cyclic vector found for the connection");
}

FRat<Scalar> at_hbar_zero(const ZRat& a) {
  FPoly<Scalar> num, den;
  for (int k = 0; k <= a.num().degree(); ++k)
    num.set_coeff(k, a.num().coeff(k).eval(Scalar(0L)));
  for (int k = 0; k <= a.den().degree(); ++k)
    den.set_coeff(k, a.den().coeff(k).eval(Scalar(0L)));
  return FRat<Scalar>(num, den);
}

std::vector<FPoly<Scalar>> char_poly_w(const WMatrix& m) {
  using WP = FPoly<Scalar>;
  using BP = FPoly<WP>;  // outer variable lambda, inner w
  int n = m.q * m.s;
  std::vector<std::vector<BP>> a(n, std::vector<BP>(n));
  for (int i = 0; i < m.q; ++i)
    for (int j = 0; j < m.q; ++j) {
      const WPoly& ent = m.e[i][j];
      if (ent.is_zero()) continue;
      for (int d = ent.low(); d <= ent.top(); ++d) {
        SMat cm = ent.coeff(d);
        if (cm.empty()) continue;
        for (int r = 0; r < m.s; ++r)
          for (int c = 0; c < m.s; ++c) {
            Scalar v = cm.at(r, c);
            if (v.is_zero()) continue;
            int fi = i * m.s + r, fj = j * m.s + c;
            a[fi][fj] = a[fi][fj] + BP(WP::monomial(d, v));
          }
      }
    }
  for (int i = 0; i < n; ++i)
    a[i][i] = a[i][i] - BP::monomial(1, WP(1L));
  std::function<BP(const std::vector<int>&, int)> det =
      [&](const std::vector<int>& rows, int col0) -> BP {
    if (rows.size() == 1) return a[rows[0]][col0];
    BP acc;
    Scalar sign(1L);
    for (size_t k = 0; k < rows.size(); ++k) {
      std::vector<int> rest;
      for (size_t l = 0; l < rows.size(); ++l)
        if (l != k) rest.push_back(rows[l]);
      BP minor = det(rest, col0 + 1);
      acc = acc + (BP(WP(sign)) * a[rows[k]][col0]) * minor;
      sign = -sign;
    }
    return acc;
  };
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  BP d = det(all, 0);
  std::vector<WP> out(n + 1);
  for (int i = 0; i <= n; ++i) out[i] = d.coeff(i);
  return out;
}

DiagonalizeResult formal_diagonalize(const Connection& c, int window) {
  int n = c.dim, q = c.q;
  int m0 = 0;
  bool any = false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!c.b[i][j].is_zero()) {
        int t = c.b[i][j].top();
        m0 = any ? std::max(m0, t) : t;
        any = true;
      }
  if (!any) throw precondition_error("cannot diagonalize the zero connection");
  if (m0 + q < 1)
    throw precondition_error("leading degree is too low for the irregular expansion");
  SMat s0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      HSeries h = c.b[i][j].coeff(m0);
      if (!h.is_constant())
        throw precondition_error("leading coefficient of the connection depends on hbar");
      s0.at(i, j) = h.constant();
    }
  EigenData eig = eigen_leading(s0);
  if (!eig.distinct)
    throw precondition_error("leading coefficient has repeated eigenvalues");
  SMat pm(n, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) pm.at(i, k) = eig.right[k][i];
  SMat pinv = pm.inverse();
  std::vector<std::vector<ZSeries>> bt(n, std::vector<ZSeries>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ZSeries acc;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Scalar f = pinv.at(i, k) * pm.at(l, j);
          if (f.is_zero() || c.b[k][l].is_zero()) continue;
          acc = acc + c.b[k][l].mapped([&](const HSeries& h) { return cmul(f, h); });
        }
      bt[i][j] = acc;
    }
  // coefficient tables: Bc[k] is the z^{m0-k} coefficient matrix
  std::vector<std::vector<std::vector<HSeries>>> bc(
      window + 1, std::vector<std::vector<HSeries>>(n, std::vector<HSeries>(n)));
  for (int k = 0; k <= window; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) bc[k][i][j] = bt[i][j].coeff(m0 - k);
  std::vector<std::vector<std::vector<HSeries>>> rc(
      window + 1, std::vector<std::vector<HSeries>>(n, std::vector<HSeries>(n)));
  std::vector<std::vector<HSeries>> lc(window + 1, std::vector<HSeries>(n));
  for (int i = 0; i < n; ++i) {
    rc[0][i][i] = HSeries(Scalar(1L));
    lc[0][i] = HSeries(eig.values[i]);
  }
  for (int k = 1; k <= window; ++k) {
    std::vector<std::vector<HSeries>> w(n, std::vector<HSeries>(n));
    for (int j2 = 0; j2 < k; ++j2)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          HSeries acc = w[i][j];
          for (int l = 0; l < n; ++l) acc = acc + bc[k - j2][i][l] * rc[j2][l][j];
          w[i][j] = acc;
        }
    for (int j2 = 1; j2 < k; ++j2)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          w[i][j] = w[i][j] - rc[j2][i][j] * lc[k - j2][j];
    int j0 = k - m0 - q;
    if (j0 >= 0) {
      HSeries f = HSeries(Scalar::rational(j0, q)) * c.hbar;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w[i][j] = w[i][j] + f * rc[j0][i][j];
    }
    for (int i = 0; i < n; ++i) {
      lc[k][i] = w[i][i];
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        Scalar d = eig.values[j] - eig.values[i];
        rc[k][i][j] = cmul(d.inv(), w[i][j]);
      }
    }
  }
  DiagonalizeResult res;
  res.leading = eig.values;
  res.r.assign(n, std::vector<ZSeries>(n));
  res.lam.assign(n, ZSeries());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ZSeries acc;
      for (int k = 0; k <= window; ++k) {
        HSeries v;
        for (int l = 0; l < n; ++l) v = v + cmul(pm.at(i, l), rc[k][l][j]);
        if (!v.is_zero()) acc.set_coeff(-k, v);
      }
      res.r[i][j] = acc.restricted(-window);
    }
  for (int j = 0; j < n; ++j) {
    ZSeries acc;
    for (int k = 0; k <= window; ++k)
      if (!lc[k][j].is_zero()) acc.set_coeff(m0 - k, lc[k][j]);
    res.lam[j] = acc.restricted(m0 - window);
  }
  return res;
}

NewtonPolygon newton_polygon(const ScalarOperator& op) {
  NewtonPolygon np;
  for (int s = 0; s <= op.order; ++s) {
    if (s >= static_cast<int>(op.a.size()) || op.a[s].is_zero()) continue;
    int deg = op.a[s].num().degree() - op.a[s].den().degree();
    np.support.emplace_back(s, deg);
  }
  if (np.support.empty())
    throw precondition_error("newton polygon of the zero operator");
  auto cross = [](const std::pair<int, int>& o, const std::pair<int, int>& a,
                  const std::pair<int, int>& b) {
    return static_cast<long>(a.first - o.first) * (b.second - o.second) -
           static_cast<long>(a.second - o.second) * (b.first - o.first);
  };
  for (const auto& pt : np.support) {
    while (np.hull.size() >= 2 &&
           cross(np.hull[np.hull.size() - 2], np.hull.back(), pt) >= 0)
      np.hull.pop_back();
    np.hull.push_back(pt);
  }
  if (np.support.front().first > 0) {
    NewtonEdge e;
    e.from = {0, np.support.front().second};
    e.to = np.support.front();
    e.slope = 0;
    np.edges.push_back(e);
  }
  for (size_t k = 0; k + 1 < np.hull.size(); ++k) {
    NewtonEdge e;
    e.from = np.hull[k];
    e.to = np.hull[k + 1];
    e.slope = mpq_class(e.from.second - e.to.second,
                        static_cast<long>(e.to.first - e.from.first) * op.q);
    e.slope.canonicalize();
    np.edges.push_back(e);
  }
  np.one_edge = true;
  for (size_t k = 1; k < np.edges.size(); ++k)
    if (np.edges[k].slope != np.edges[0].slope) np.one_edge = false;
  np.slope = np.edges.empty() ? mpq_class(0) : np.edges[0].slope;
  return np;
}

}  // namespace qcurve
