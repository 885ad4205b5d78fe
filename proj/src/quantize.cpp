#include "qcurve/quantize.hpp"

#include <numeric>

namespace qcurve {

namespace {

bool smat_close_zero(const SMat& a) {
  if (a.empty()) return true;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (!scalar_close(a.at(i, j), Scalar())) return false;
  return true;
}

// Tests a = lambda * I and extracts lambda.
bool scalar_block(const SMat& a, int s, Scalar& lambda) {
  if (a.empty()) {
    lambda = Scalar();
    return true;
  }
  if (a.rows() != s || a.cols() != s) return false;
  lambda = a.at(0, 0);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      if (i == j ? !(a.at(i, j) == lambda) : !a.at(i, j).is_zero()) return false;
    }
  return true;
}

PsDiffOp make_exact(const PsDiffOp& a) {
  PsDiffOp r(a.blocksize(), a.xcap());
  for (const auto& [k, p] : a.terms()) r.set_term(k, p);
  return r;
}

}  // namespace

void WMatrix::add(int r, int c, int deg, const Scalar& coef) {
  SMat blk = SMat::scalar(s, coef);
  e[r][c].set_coeff(deg, e[r][c].coeff(deg) + blk);
}

bool operator==(const WMatrix& a, const WMatrix& b) {
  if (a.q != b.q || a.s != b.s) return false;
  for (int r = 0; r < a.q; ++r)
    for (int c = 0; c < a.q; ++c)
      if (!(a.e[r][c] == b.e[r][c])) return false;
  return true;
}

BMatrix build_b_matrix(const WMatrix& m, const Scalar& hbar, int bits) {
  (void)bits;
  int q = m.q;
  if (q < 1) throw precondition_error("empty companion matrix");
  BMatrix b;
  b.q = q;
  b.s = m.s;
  b.hbar = hbar;
  b.entry.assign(q, std::vector<Series<SMat>>(q));
  bool any = false;
  int p = 0;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      const WPoly& poly = m.e[j][i];
      if (poly.is_zero()) continue;
      for (int d = std::max(0, poly.low()); d <= poly.top(); ++d) {
        const SMat& c = poly.coeff(d);
        if (c.is_zero()) continue;
        int e = q * d + j - i;
        b.entry[i][j].set_coeff(e, b.entry[i][j].coeff(e) + c);
        if (!any || e > p) p = e;
        any = true;
      }
    }
  if (!any) throw precondition_error("zero companion matrix");
  b.p = p;
  if (!hbar.is_zero()) {
    for (int i = 1; i < q; ++i) {
      Scalar c = -(Scalar(static_cast<long>(i)) * hbar * Scalar(mpq_class(1, q)));
      b.entry[i][i].set_coeff(-q, b.entry[i][i].coeff(-q) + SMat::scalar(m.s, c));
    }
  }
  b.sigma = SMat(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      Scalar lambda;
      if (!scalar_block(b.entry[i][j].coeff(p), m.s, lambda))
        throw precondition_error("leading coefficient is not of scalar block form");
      b.sigma.at(i, j) = lambda;
    }
  return b;
}

RegularityReport regularity_check(const WMatrix& m, int bits) {
  RegularityReport rep;
  BMatrix b;
  try {
    b = build_b_matrix(m, Scalar(), bits);
  } catch (const precondition_error&) {
    return rep;
  }
  rep.scalar_blocks = true;
  rep.p = b.p;
  EigenData eig = eigen_leading(b.sigma, bits);
  rep.eigenvalues = eig.values;
  rep.regular = eig.distinct;
  rep.cyclic_applicable = rep.regular && std::gcd(std::max(rep.p, 1), m.q) == 1 && rep.p >= 1;
  if (rep.cyclic_applicable) {
    Scalar eps = Scalar::root_of_unity(m.q, rep.p, bits);
    rep.cyclic_relation = true;
    for (const Scalar& a : eig.values) {
      Scalar target = eps * a;
      bool found = false;
      for (const Scalar& c : eig.values)
        if (scalar_close(c, target)) found = true;
      if (!found) rep.cyclic_relation = false;
    }
  }
  return rep;
}

DegreeBoundReport degree_bound_check(const WMatrix& m) {
  int n = m.q * m.s;
  // Flatten to an n x n matrix of scalar w-polynomials and run the
  // Faddeev-LeVerrier recursion over the polynomial ring.
  std::vector<std::vector<LSeries>> a(n, std::vector<LSeries>(n));
  for (int r = 0; r < m.q; ++r)
    for (int c = 0; c < m.q; ++c) {
      const WPoly& poly = m.e[r][c];
      if (poly.is_zero()) continue;
      for (int d = poly.low(); d <= poly.top(); ++d) {
        const SMat& blk = poly.coeff(d);
        if (blk.is_zero()) continue;
        for (int i = 0; i < m.s; ++i)
          for (int j = 0; j < m.s; ++j)
            if (!blk.at(i, j).is_zero())
              a[r * m.s + i][c * m.s + j].set_coeff(
                  d, a[r * m.s + i][c * m.s + j].coeff(d) + blk.at(i, j));
      }
    }
  auto mat_mul = [n](const std::vector<std::vector<LSeries>>& x,
                     const std::vector<std::vector<LSeries>>& y) {
    std::vector<std::vector<LSeries>> z(n, std::vector<LSeries>(n));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        if (x[i][k].is_zero()) continue;
        for (int j = 0; j < n; ++j) z[i][j] = z[i][j] + x[i][k] * y[k][j];
      }
    return z;
  };
  std::vector<LSeries> c(n + 1);
  c[n] = LSeries::monomial(0, Scalar(1));
  std::vector<std::vector<LSeries>> mk = a;
  for (int k = 1; k <= n; ++k) {
    LSeries tr;
    for (int i = 0; i < n; ++i) tr = tr + mk[i][i];
    c[n - k] = tr.mapped([k](const Scalar& v) { return v * Scalar::rational(-1, k); });
    if (k == n) break;
    for (int i = 0; i < n; ++i) mk[i][i] = mk[i][i] + c[n - k];
    mk = mat_mul(a, mk);
  }
  DegreeBoundReport rep;
  if (c[0].is_zero()) return rep;  // det M = 0: no degree to bound against
  rep.p = c[0].top();
  rep.ok = true;
  for (int i = 0; i <= n; ++i) {
    rep.degrees.push_back(c[i].is_zero() ? -1 : c[i].top());
    rep.bounds.push_back(static_cast<int>((static_cast<long>(rep.p) * (n - i)) / n));
    if (rep.degrees.back() > rep.bounds.back()) rep.ok = false;
  }
  return rep;
}

BranchData quantize_branch(const WMatrix& m, const Scalar& hbar, int branch,
                           const QuantizeOptions& opt) {
  int q = m.q;
  int s = m.s;
  BMatrix bm = build_b_matrix(m, hbar, opt.bits);
  int p = bm.p;
  EigenData eig = eigen_leading(bm.sigma, opt.bits);
  if (!eig.distinct)
    throw precondition_error("companion matrix is not regular");
  if (branch < 0 || branch >= q) throw precondition_error("branch index out of range");
  Scalar alpha = eig.values[branch];
  const std::vector<Scalar>& sv = eig.right[branch];
  const std::vector<Scalar>& rho = eig.left[branch];
  Scalar pairing;
  for (int i = 0; i < q; ++i) pairing = pairing + rho[i] * sv[i];
  if (pairing.is_zero() || (!pairing.is_exact() && scalar_close(pairing, Scalar())))
    throw precondition_error("left and right eigenvectors are orthogonal");

  // (alpha I - sigma) has a one-dimensional kernel along the right
  // eigenvector; adding the rank-one piece s rho^T makes it invertible, and
  // solutions of the patched system automatically satisfy the gauge
  // rho . u = 0 whenever the right-hand side is consistent.
  SMat g(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      Scalar v = sv[i] * rho[j] - bm.sigma.at(i, j);
      if (i == j) v = v + alpha;
      g.at(i, j) = v;
    }
  SMat ginv = g.inverse();

  // B expanded as sum_j ^jB z^{p-j}.
  int jmax = p + q;
  std::vector<std::vector<std::vector<SMat>>> bc(
      jmax + 1, std::vector<std::vector<SMat>>(q, std::vector<SMat>(q)));
  for (int i = 0; i < q; ++i)
    for (int j2 = 0; j2 < q; ++j2) {
      const Series<SMat>& e = bm.entry[i][j2];
      if (e.is_zero()) continue;
      for (int d = e.low(); d <= e.top(); ++d) {
        int idx = p - d;
        if (idx < 0 || idx > jmax) {
          if (!e.coeff(d).is_zero())
            throw precondition_error("unexpected exponent in branch equation");
          continue;
        }
        bc[idx][i][j2] = e.coeff(d);
      }
    }

  BranchData out;
  out.alpha = alpha;
  out.p = p;
  out.u.assign(opt.window + 1, std::vector<SMat>(q));
  out.b.assign(opt.window + 1, SMat());
  for (int i = 0; i < q; ++i) out.u[0][i] = SMat::scalar(s, sv[i]);
  out.b[0] = SMat::scalar(s, alpha);

  Scalar pinv = pairing.inv();
  for (int mm = 1; mm <= opt.window; ++mm) {
    std::vector<SMat> kvec(q, SMat(s, s));
    for (int j = 1; j <= std::min(mm, jmax); ++j)
      for (int i = 0; i < q; ++i)
        for (int l = 0; l < q; ++l) {
          if (bc[j][i][l].is_zero() || out.u[mm - j][l].is_zero()) continue;
          kvec[i] = kvec[i] + bc[j][i][l] * out.u[mm - j][l];
        }
    for (int j = 1; j < mm; ++j)
      for (int i = 0; i < q; ++i) {
        if (out.u[mm - j][i].is_zero() || out.b[j].is_zero()) continue;
        kvec[i] = kvec[i] - out.u[mm - j][i] * out.b[j];
      }
    int k0 = mm - p - q;
    if (k0 >= 0 && !hbar.is_zero())
      for (int i = 0; i < q; ++i)
        kvec[i] = kvec[i] + out.u[k0][i].scaled(hbar * Scalar::rational(k0, q));

    SMat bcur(s, s);
    for (int i = 0; i < q; ++i) bcur = bcur + kvec[i].scaled(rho[i]);
    bcur = bcur.scaled(pinv);
    out.b[mm] = bcur;
    std::vector<SMat> rvec(q);
    for (int i = 0; i < q; ++i) rvec[i] = kvec[i] - bcur.scaled(sv[i]);
    // Solvability: the right-hand side must be orthogonal to the left
    // eigenvector once ^mb is chosen.
    SMat res(s, s);
    for (int i = 0; i < q; ++i) res = res + rvec[i].scaled(rho[i]);
    if (!smat_close_zero(res))
      throw residual_error("branch recursion became inconsistent");
    for (int i = 0; i < q; ++i) {
      SMat ui(s, s);
      for (int l = 0; l < q; ++l) {
        if (rvec[l].is_zero() || ginv.at(i, l).is_zero()) continue;
        ui = ui + rvec[l].scaled(ginv.at(i, l));
      }
      out.u[mm][i] = ui;
    }
  }
  return out;
}

namespace {

QuantumPair quantize_attempt(const WMatrix& m, const Scalar& hbar, int branch,
                             const QuantizeOptions& opt) {
  int q = m.q;
  int s = m.s;
  BranchData bd = quantize_branch(m, hbar, branch, opt);
  int p = bd.p;
  std::vector<Scalar> lead(q);
  for (int i = 0; i < q; ++i) {
    Scalar c = bd.u[0][i].at(0, 0);
    if (c.is_zero() || (!c.is_exact() && scalar_close(c, Scalar())))
      throw precondition_error(
          "leading eigenvector has a zero component; the basis ladder is incomplete");
    lead[i] = c;
  }

  int sdepth = opt.sato_depth > 0 ? opt.sato_depth : std::max(opt.window / 2, 2 * q + 4);
  int xc = std::max(opt.xcap, 2 * sdepth + q + 2);
  GrPoint v;
  v.s = s;
  for (int n = 0; n < opt.window; ++n) {
    int i = n % q;
    int shift = n - i;  // q * (n / q)
    MSeries vn(n - opt.window);
    Scalar inv = lead[i].inv();
    for (int mm = 0; mm <= opt.window; ++mm) {
      int e = shift + i - mm;
      if (e < n - opt.window) break;
      if (bd.u[mm][i].is_zero()) continue;
      vn.set_coeff(e, bd.u[mm][i].scaled(inv));
    }
    v.basis.push_back(vn);
  }
  // Reduce the ladder to the canonical echelon basis of the point: clear
  // every coefficient at a nonnegative exponent below the pivot, so that the
  // tails match the action of a single dressing operator.
  for (int n = 1; n < opt.window; ++n)
    for (int k = n - 1; k >= 0; --k) {
      if (k < v.basis[n].floor()) break;
      SMat c = v.basis[n].coeff(k);
      if (c.is_zero()) continue;
      v.basis[n] =
          v.basis[n] - v.basis[k].mapped([&c](const SMat& f) { return f * c; });
    }
  PsDiffOp sop = sato_operator(v, sdepth, xc);
  PsDiffOp sinv = sop.inverted(sdepth);

  PsDiffOp qfull = sinv * PsDiffOp::dpow(q, s, xc) * sop;
  if (!qfull.minus_part().is_zero())
    throw residual_error("conjugated D^q is not differential within the window");
  PsDiffOp q_op = make_exact(qfull.plus_part());

  PsDiffOp pt(s, xc);
  for (int mm = 0; mm <= opt.window; ++mm)
    if (!bd.b[mm].is_zero()) pt.set_term(p - mm, XPoly(bd.b[mm]));
  pt = pt.restricted(opt.window - p);
  if (!hbar.is_zero()) {
    Scalar f = -(hbar * Scalar(mpq_class(1, q)));
    XPoly xp;
    xp.set_coeff(1, SMat::scalar(s, f));
    PsDiffOp corr = PsDiffOp::from_term(1 - q, xp, s, xc);
    corr.set_term(-q, XPoly(SMat::scalar(s, f * Scalar(static_cast<long>(1 - q)))));
    pt = pt + corr;
  }
  PsDiffOp pfull = sinv * pt * sop;
  if (!pfull.minus_part().is_zero())
    throw residual_error("conjugated branch operator is not differential within the window");
  PsDiffOp p_op = make_exact(pfull.plus_part());

  PsDiffOp residual = verify_pair(p_op, q_op, hbar);
  if (!residual.is_zero())
    throw residual_error("commutator residual is nonzero");
  QuantumPair out;
  out.p_op = p_op;
  out.q_op = q_op;
  out.hbar = hbar;
  out.q = q;
  out.s = s;
  return out;
}

}  // namespace

QuantumPair quantize(const WMatrix& m, const Scalar& hbar, int branch,
                     const QuantizeOptions& opt) {
  try {
    return quantize_attempt(m, hbar, branch, opt);
  } catch (const residual_error&) {
    QuantizeOptions wide = opt;
    wide.window = opt.window * 2;
    wide.xcap = opt.xcap * 2;
    wide.sato_depth = opt.sato_depth * 2;
    return quantize_attempt(m, hbar, branch, wide);
  }
}

WMatrix companion_matrix(const QuantumPair& pair, int depth) {
  int q = pair.q_op.order();
  int s = pair.s;
  int xcap = std::max(pair.q_op.xcap(), 2 * depth + q + 2);
  PsDiffOp qw(s, xcap);
  for (const auto& [k, c] : pair.q_op.terms()) qw.set_term(k, c);
  PsDiffOp s0 = undress(qw, depth);
  std::vector<MSeries> v(q);
  for (int j = 0; j < q; ++j)
    v[j] = s0.apply(MSeries::monomial(j, SMat::identity(s)));

  WMatrix res = WMatrix::zero(q, s);
  for (int i = 0; i < q; ++i) {
    MSeries w = s0.apply(pair.p_op.apply(MSeries::monomial(i, SMat::identity(s))));
    while (!w.is_zero() && w.top() >= 0) {
      int t = w.top();
      SMat c = w.coeff(t);
      int mm = t / q;
      int j = t % q;
      res.e[j][i].set_coeff(mm, res.e[j][i].coeff(mm) + c);
      w = w - v[j].shifted(q * mm).mapped([&c](const SMat& f) { return f * c; });
    }
    if (!w.is_zero())
      throw residual_error("companion expansion does not close polynomially");
  }

  // Canonical diagonal gauge: rescaling the basis by constants d_i changes
  // entries by d_c / d_r.  Fix d_0 = 1 and walk the nonzero entries in
  // row-major order, making each spanning entry monic.
  std::vector<Scalar> d(q, Scalar(1));
  std::vector<bool> known(q, false);
  known[0] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < q; ++r)
      for (int c = 0; c < q; ++c) {
        if (r == c || res.e[r][c].is_zero()) continue;
        Scalar lam;
        if (!scalar_block(res.e[r][c].leading(), s, lam) || lam.is_zero()) continue;
        if (known[r] && !known[c]) {
          d[c] = d[r] * lam.inv();
          known[c] = true;
          changed = true;
        } else if (known[c] && !known[r]) {
          d[r] = d[c] * lam;
          known[r] = true;
          changed = true;
        }
      }
  }
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c) {
      if (res.e[r][c].is_zero() || r == c) continue;
      Scalar f = d[c] * d[r].inv();
      if (f == Scalar(1)) continue;
      res.e[r][c] = res.e[r][c].mapped([&f](const SMat& blk) { return blk.scaled(f); });
    }
  return res;
}

namespace {

using PolyMat = std::vector<std::vector<WPoly>>;

PolyMat pm_mul(const PolyMat& a, const PolyMat& b) {
  int n = static_cast<int>(a.size());
  PolyMat z(n, std::vector<WPoly>(n));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (int j = 0; j < n; ++j) z[i][j] = z[i][j] + a[i][k] * b[k][j];
    }
  return z;
}

WPoly pm_det(const PolyMat& a) {
  int n = static_cast<int>(a.size());
  if (n == 1) return a[0][0];
  WPoly det;
  for (int r = 0; r < n; ++r) {
    if (a[r][0].is_zero()) continue;
    PolyMat minor(n - 1, std::vector<WPoly>(n - 1));
    for (int i = 0, mi = 0; i < n; ++i) {
      if (i == r) continue;
      for (int j = 1; j < n; ++j) minor[mi][j - 1] = a[i][j];
      ++mi;
    }
    WPoly term = a[r][0] * pm_det(minor);
    if (r % 2) term = -term;
    det = det + term;
  }
  return det;
}

}  // namespace

WMatrix gauge_transform(const WMatrix& m, const WMatrix& g, const Scalar& hbar) {
  if (m.s != 1 || g.s != 1)
    throw precondition_error("gauge transform supports blocksize 1 only");
  if (g.q != m.q) throw precondition_error("gauge matrix shape mismatch");
  int q = m.q;
  WPoly det = pm_det(g.e);
  if (det.is_zero() || det.top() != 0 || det.low() != 0)
    throw precondition_error("gauge matrix is not unimodular");
  Scalar dinv = det.coeff(0).at(0, 0).inv();

  PolyMat adj(q, std::vector<WPoly>(q));
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c) {
      PolyMat minor(q - 1, std::vector<WPoly>(q - 1));
      for (int i = 0, mi = 0; i < q; ++i) {
        if (i == c) continue;
        for (int j = 0, mj = 0; j < q; ++j) {
          if (j == r) continue;
          minor[mi][mj++] = g.e[i][j];
        }
        ++mi;
      }
      WPoly cof = q == 1 ? WPoly::monomial(0, SMat::identity(1)) : pm_det(minor);
      if ((r + c) % 2) cof = -cof;
      adj[r][c] = cof.mapped([&dinv](const SMat& b) { return b.scaled(dinv); });
    }

  PolyMat dg(q, std::vector<WPoly>(q));
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c) dg[r][c] = g.e[r][c].derivative();

  PolyMat part1 = pm_mul(pm_mul(g.e, m.e), adj);
  PolyMat part2 = pm_mul(dg, adj);
  WMatrix out = WMatrix::zero(q, 1);
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c)
      out.e[r][c] = part1[r][c] +
                    part2[r][c].mapped([&hbar](const SMat& b) { return b.scaled(hbar); });
  return out;
}

QuantumPair kp_flow_step(const QuantumPair& pair, int n, const Scalar& t, int depth) {
  if (n < 1) throw precondition_error("flow index must be positive");
  int q = pair.q_op.order();
  int s = pair.s;
  int xcap = std::max(pair.q_op.xcap(), 3 * depth);
  PsDiffOp qw(s, xcap), pw(s, xcap);
  for (const auto& [k, c] : pair.q_op.terms()) qw.set_term(k, c);
  for (const auto& [k, c] : pair.p_op.terms()) pw.set_term(k, c);
  PsDiffOp sop = undress(qw, depth + n);
  PsDiffOp sinv = sop.inverted(depth + n);
  PsDiffOp r = (sinv * PsDiffOp::dpow(n, s, xcap) * sop).restricted(depth);
  PsDiffOp rm = r.minus_part();
  PsDiffOp q1 = commutator(r.plus_part(), qw);
  PsDiffOp extra = (sinv * PsDiffOp::dpow(n - q, s, xcap) * sop).restricted(depth);
  PsDiffOp p1 = commutator(pw, rm) - extra.scaled(pair.hbar * Scalar::rational(n, q));
  if (!(commutator(p1, qw) + commutator(pw, q1)).is_zero())
    throw residual_error("flow step violates first-order compatibility");
  if (!p1.minus_part().is_zero() || !q1.minus_part().is_zero())
    throw residual_error("flow step left a nondifferential tail");
  QuantumPair out = pair;
  out.p_op = pair.p_op + make_exact(p1.plus_part()).scaled(t);
  out.q_op = pair.q_op + make_exact(q1.plus_part()).scaled(t);
  return out;
}

PsDiffOp verify_pair(const PsDiffOp& p_op, const PsDiffOp& q_op, const Scalar& hbar) {
  PsDiffOp h = PsDiffOp::identity(p_op.blocksize(), p_op.xcap()).scaled(hbar);
  return commutator(p_op, q_op) - h;
}

}  // namespace qcurve
