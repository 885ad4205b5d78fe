// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.
//
// The matrix bank covers orders q = 1, 2, 3; every check is exact.  Failures
// include a short diagnosis in the printed line.

#include "qcurve/curve.hpp"
#include "qcurve/dmodule.hpp"
#include "qcurve/json_io.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace qcurve;

namespace {

struct BankEntry {
  std::string name;
  WMatrix m;
  int q = 1;
  int p = 1;
  bool coprime = true;
};

std::vector<BankEntry> bank() {
  std::vector<BankEntry> b;
  auto diag1 = [](int p) {
    WMatrix m = WMatrix::zero(1);
    m.add(0, 0, p, Scalar(1L));
    return m;
  };
  b.push_back({"[w]", diag1(1), 1, 1, true});
  b.push_back({"[w^2]", diag1(2), 1, 2, true});
  b.push_back({"[w^3]", diag1(3), 1, 3, true});
  WMatrix swap = WMatrix::zero(2);
  swap.add(0, 1, 1, Scalar(1L));
  swap.add(1, 0, 0, Scalar(1L));
  b.push_back({"[[0,w],[1,0]]", swap, 2, 1, true});
  WMatrix swapw = swap;
  swapw.add(1, 1, 1, Scalar(1L));
  b.push_back({"[[0,w],[1,w]]", swapw, 2, 2, false});
  WMatrix cyc = WMatrix::zero(3);
  cyc.add(0, 2, 1, Scalar(1L));
  cyc.add(1, 0, 0, Scalar(1L));
  cyc.add(2, 1, 0, Scalar(1L));
  b.push_back({"q=3 corner", cyc, 3, 1, true});
  return b;
}

std::vector<Scalar> hbars() {
  return {Scalar(0L), Scalar(1L), Scalar::rational(1, 2)};
}

struct Result {
  bool pass = true;
  std::ostringstream why;
  void fail(const std::string& msg) {
    if (!pass) why << "; ";
    pass = false;
    why << msg;
  }
};

// Pairs from criterion 1, reused by later criteria: key (bank index,
// hbar index, branch).
std::map<std::tuple<int, int, int>, QuantumPair> g_pairs;

Result c1_residual() {
  Result r;
  auto bk = bank();
  auto hs = hbars();
  for (size_t mi = 0; mi < bk.size(); ++mi)
    for (size_t hi = 0; hi < hs.size(); ++hi)
      for (int br = 0; br < bk[mi].q; ++br) {
        auto t0 = std::chrono::steady_clock::now();
        try {
          QuantumPair pair = quantize(bk[mi].m, hs[hi], br);
          if (!verify_pair(pair.p_op, pair.q_op, pair.hbar).is_zero())
            r.fail(bk[mi].name + " branch " + std::to_string(br) + ": nonzero residual");
          else
            g_pairs[{(int)mi, (int)hi, br}] = pair;
        } catch (const std::exception& e) {
          r.fail(bk[mi].name + " branch " + std::to_string(br) + ": " + e.what());
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (sec >= 10.0)
          r.fail(bk[mi].name + " branch " + std::to_string(br) + ": over 10 s");
      }
  return r;
}

Result c2_roundtrip() {
  Result r;
  auto bk = bank();
  auto hs = hbars();
  for (size_t mi = 0; mi < bk.size(); ++mi)
    for (size_t hi = 0; hi < hs.size(); ++hi) {
      auto it = g_pairs.find({(int)mi, (int)hi, 0});
      if (it == g_pairs.end()) {
        r.fail(bk[mi].name + ": no quantization to round-trip");
        continue;
      }
      try {
        if (!(companion_matrix(it->second) == bk[mi].m))
          r.fail(bk[mi].name + ": companion differs from the input");
      } catch (const std::exception& e) {
        r.fail(bk[mi].name + ": " + std::string(e.what()));
      }
    }
  return r;
}

Result c3_branches() {
  Result r;
  auto bk = bank();
  for (size_t mi = 0; mi < bk.size(); ++mi) {
    int ok = 0;
    for (int br = 0; br < bk[mi].q; ++br)
      if (g_pairs.count({(int)mi, 1, br})) ++ok;
    if (ok != bk[mi].q)
      r.fail(bk[mi].name + ": " + std::to_string(ok) + " of " +
             std::to_string(bk[mi].q) + " branches succeed");
    if (bk[mi].coprime && bk[mi].q <= 4) {
      RegularityReport rr = regularity_check(bk[mi].m);
      if (!rr.regular || !rr.cyclic_applicable || !rr.cyclic_relation)
        r.fail(bk[mi].name + ": leading coefficients break the root-of-unity ladder");
    }
  }
  return r;
}

Result c4_closed_forms() {
  Result r;
  auto hs = hbars();
  WMatrix m1 = WMatrix::zero(1);
  m1.add(0, 0, 2, Scalar(1L));
  WMatrix swap = WMatrix::zero(2);
  swap.add(0, 1, 1, Scalar(1L));
  swap.add(1, 0, 0, Scalar(1L));
  SMat one(1, 1);
  one.at(0, 0) = Scalar(1L);
  for (const Scalar& h : hs) {
    // order (2, 1): P = D^2 - hbar x, Q = D
    try {
      QuantumPair pr = quantize(m1, h, 0);
      XPoly hx;
      hx.set_coeff(1, one);
      PsDiffOp expect_p =
          PsDiffOp::dpow(2, 1, pr.p_op.xcap()) +
          PsDiffOp::from_term(0, hx, 1, pr.p_op.xcap()).scaled(-h);
      if (!pr.p_op.equal_on_window(expect_p) ||
          !pr.q_op.equal_on_window(PsDiffOp::dpow(1, 1, pr.q_op.xcap())))
        r.fail("[w^2] at hbar " + h.str() + " is not (D^2 - hbar x, D)");
    } catch (const std::exception& e) {
      r.fail(std::string("[w^2]: ") + e.what());
    }
    // order (1, 2): some branch is (D, D^2 + hbar x)
    bool found = false;
    for (int br = 0; br < 2; ++br) {
      try {
        QuantumPair pr = quantize(swap, h, br);
        XPoly hx;
        hx.set_coeff(1, one);
        PsDiffOp expect_q =
            PsDiffOp::dpow(2, 1, pr.q_op.xcap()) +
            PsDiffOp::from_term(0, hx, 1, pr.q_op.xcap()).scaled(h);
        if (pr.p_op.equal_on_window(PsDiffOp::dpow(1, 1, pr.p_op.xcap())) &&
            pr.q_op.equal_on_window(expect_q))
          found = true;
      } catch (const std::exception&) {
      }
    }
    if (!found) r.fail("no branch of the swap matrix is (D, D^2 + hbar x) at hbar " + h.str());
  }
  return r;
}

Result c5_discrete() {
  Result r;
  // multiplier obstruction: order 1 with lambda = -1 must be rejected
  WMatrix m1 = WMatrix::zero(1);
  m1.add(0, 0, 1, Scalar(1L));
  bool rejected = false;
  try {
    discrete_quantize(m1, HSeries(Scalar(-1L)), {0});
  } catch (const precondition_error&) {
    rejected = true;
  } catch (const std::exception&) {
  }
  if (!rejected) r.fail("lambda = -1 at order 1 was not rejected as a precondition");
  if (!discrete_branches(m1, HSeries(Scalar(-1L))).empty())
    r.fail("branch enumeration accepts an impossible multiplier");

  // anticommuting pairs at order 2
  Flag fl;
  fl.depth = 10;
  for (int m = -10; m <= 10; ++m)
    fl.gen.push_back(ZSeries::monomial(m, HSeries(Scalar(1L))));
  std::vector<std::pair<std::string, ZSeries>> fs = {
      {"Lambda", ZSeries::monomial(1, HSeries(Scalar(1L)))},
      {"Lambda^3", ZSeries::monomial(3, HSeries(Scalar(1L)))},
  };
  HSeries lam(Scalar(-1L));
  DiscreteOptions opt;
  opt.window = 32;
  for (const auto& [name, f] : fs) {
    try {
      CurveDataDiff data{2, f, fl};
      WMatrix m = curve_companion_diff(data, 8);
      auto assigns = discrete_branches(m, lam);
      if (assigns.empty()) {
        r.fail(name + ": no branch at lambda = -1");
        continue;
      }
      for (const auto& assign : assigns) {
        DiscretePair pair = discrete_quantize(m, lam, assign, opt);
        PsDeltaOp anti = pair.k_op * pair.l_op + pair.l_op * pair.k_op;
        if (!anti.is_zero()) r.fail(name + ": KL + LK is nonzero");
        UndressResult ud = undress_difference(pair.l_op, 16, 48);
        if (!ud.invertible) {
          r.fail(name + ": L is not invertible within the window");
          continue;
        }
        if (!(ud.l_inverse * pair.l_op).equal_on_window(PsDeltaOp::identity()))
          r.fail(name + ": L^{-1} L differs from the identity");
      }
    } catch (const std::exception& e) {
      r.fail(name + ": " + e.what());
    }
  }
  return r;
}

Result c6_deform() {
  Result r;
  DiscreteOptions opt;
  opt.window = 16;
  auto check_pair = [&](const std::string& name, const DiscretePair& pair, const WMatrix* m) {
    try {
      DiscretePair dp = hbar_deform(pair, 3, opt);
      if (!(dp.lambda == HSeries::exp_hbar(3)))
        r.fail(name + ": deformed multiplier is not e^hbar");
      if (!verify_discrete(dp.k_op, dp.l_op, dp.lambda).is_zero())
        r.fail(name + ": exchange relation fails mod hbar^4");
      WMatrix before = discrete_companion(pair, 10, 30);
      WMatrix after = discrete_companion(dp, 10, 30);
      if (!(after == before)) r.fail(name + ": companion changes under deformation");
      if (m && !(after == *m)) r.fail(name + ": companion differs from the curve matrix");
    } catch (const std::exception& e) {
      r.fail(name + ": " + e.what());
    }
  };
  DiscretePair shifts;
  shifts.k_op = PsDeltaOp::shift_op(3);
  shifts.l_op = PsDeltaOp::shift_op(2);
  shifts.lambda = HSeries(Scalar(1L));
  shifts.p = 3;
  shifts.n = 2;
  check_pair("(Lambda^3, Lambda^2)", shifts, nullptr);

  try {
    Flag fl;
    fl.depth = 10;
    for (int m = -10; m <= 10; ++m)
      fl.gen.push_back(ZSeries::monomial(m, HSeries(Scalar(1L))));
    CurveDataDiff data{2, ZSeries::monomial(3, HSeries(Scalar(1L))) +
                              ZSeries::monomial(1, HSeries(Scalar(1L))),
                       fl};
    WMatrix m = curve_companion_diff(data, 8);
    auto assigns = discrete_branches(m, HSeries(Scalar(1L)));
    if (assigns.empty()) {
      r.fail("curve pair: no branch at lambda = 1");
    } else {
      DiscretePair pair = quantize_from_curve(data, HSeries(Scalar(1L)), assigns.back(), opt);
      check_pair("curve pair (Lambda^3 + Lambda, Lambda^2)", pair, &m);
    }
  } catch (const std::exception& e) {
    r.fail(std::string("curve pair: ") + e.what());
  }
  return r;
}

Result c7_sato() {
  Result r;
  std::mt19937 rng(12345);
  auto rand_scalar = [&] {
    long num = static_cast<long>(rng() % 19) - 9;
    long den = 1 + static_cast<long>(rng() % 4);
    return Scalar::rational(num, den);
  };
  int bad_ops = 0;
  for (int it = 0; it < 100; ++it) {
    PsDiffOp s = PsDiffOp::identity(1, 24);
    for (int k = 1; k <= 4; ++k) {
      XPoly a;
      for (int l = 0; l <= 2; ++l) {
        SMat c(1, 1);
        c.at(0, 0) = rand_scalar();
        a.set_coeff(l, c);
      }
      s = s + PsDiffOp::from_term(-k, a, 1, 24);
    }
    GrPoint v = sato_point(s, 16, 20);
    PsDiffOp back = sato_operator(v, 16, 24);
    if (!back.equal_on_window(s.restricted(16))) ++bad_ops;
  }
  if (bad_ops) r.fail(std::to_string(bad_ops) + " of 100 dressing round-trips differ");

  int bad_flags = 0;
  for (int it = 0; it < 100; ++it) {
    PsDeltaOp s = PsDeltaOp::identity();
    for (int j = 1; j <= 4; ++j) {
      std::vector<HSeries> entries;
      for (int k = -24; k <= 24; ++k) entries.push_back(HSeries(rand_scalar()));
      s = s + PsDeltaOp::from_term(-j, DiagonalSeq::explicit_window(-24, entries));
    }
    Flag f = flag_from_dressing(s, 16);
    PsDeltaOp back = dressing_from_flag(f);
    if (!back.equal_on_window(s)) ++bad_flags;
  }
  if (bad_flags) r.fail(std::to_string(bad_flags) + " of 100 flag round-trips differ");
  return r;
}

Result c8_flows() {
  Result r;
  Scalar h(1L);
  Scalar t = Scalar::rational(1, 3);
  WMatrix m1 = WMatrix::zero(1);
  m1.add(0, 0, 2, Scalar(1L));
  WMatrix swap = WMatrix::zero(2);
  swap.add(0, 1, 1, Scalar(1L));
  swap.add(1, 0, 0, Scalar(1L));
  for (int n : {1, 2, 3}) {
    try {
      kp_flow_step(quantize(m1, h, 0), n, t);
    } catch (const std::exception& e) {
      r.fail("(D^2 - x, D) flow " + std::to_string(n) + ": " + e.what());
    }
    try {
      kp_flow_step(quantize(swap, h, 1), n, t);
    } catch (const std::exception& e) {
      r.fail("(D, D^2 + x) flow " + std::to_string(n) + ": " + e.what());
    }
  }
  // L = Lambda + diag: the first flow is stationary and the second moves L
  // by exactly t [ (L^2)_+, L ].
  std::vector<HSeries> base;
  for (int k = 0; k < 5; ++k) base.push_back(HSeries(Scalar::rational(k - 2, 3)));
  PsDeltaOp l = PsDeltaOp::shift_op(1) +
                PsDeltaOp::from_term(
                    0, DiagonalSeq::periodic(5, base, HSeries(Scalar(1L))));
  try {
    if (!dkp_flow_step(l, 1, t, 8, 24).equal_on_window(l))
      r.fail("Lambda + diag: its own flow is not stationary");
    PsDeltaOp l2 = dkp_flow_step(l, 2, t, 8, 24);
    PsDeltaOp expect = l + commutator((l * l).plus_part(), l).scaled(HSeries(t));
    if (!l2.equal_on_window(expect))
      r.fail("Lambda + diag: second flow differs from t [ (L^2)_+, L ]");
    if (!l2.is_monic() || l2.order() != 1)
      r.fail("Lambda + diag: flow breaks the monic normal form");
  } catch (const std::exception& e) {
    r.fail(std::string("Lambda + diag: ") + e.what());
  }
  return r;
}

Result c9_dmodule() {
  Result r;
  for (const BankEntry& b : bank()) {
    try {
      Connection conn = connection_from_companion(b.m, hbar_symbol());
      ScalarOperator op = cyclic_reduce(conn);
      auto a = char_poly_w(b.m);
      Scalar unit(op.order % 2 == 0 ? 1L : -1L);
      for (int s = 0; s <= op.order; ++s) {
        FPoly<Scalar> str;
        for (int k = 0; k <= a[s].degree(); ++k) str.set_coeff(b.q * k, a[s].coeff(k));
        if (!(at_hbar_zero(op.a[s]) == FRat<Scalar>(str.scaled(unit))))
          r.fail(b.name + ": classical symbol differs from the characteristic polynomial");
      }
      NewtonPolygon np = newton_polygon(op);
      if (b.coprime) {
        if (!np.one_edge || np.slope != mpq_class(b.p, b.q))
          r.fail(b.name + ": newton polygon is not one edge of slope p/q");
      } else if (np.edges.size() < 2) {
        r.fail(b.name + ": reducible case should give more than one edge");
      }
    } catch (const std::exception& e) {
      r.fail(b.name + ": " + e.what());
    }
    // the diagonal entries of the formal diagonalization reproduce the
    // branch series of the quantization recursion
    if (!b.coprime) continue;
    try {
      Connection conn1 = connection_from_companion(b.m, HSeries(Scalar(1L)));
      DiagonalizeResult d = formal_diagonalize(conn1, 18);
      for (int br = 0; br < b.q; ++br) {
        BranchData bd = quantize_branch(b.m, Scalar(1L), br);
        for (int m = 0; m <= 16; ++m) {
          Scalar want = bd.b[m].empty() ? Scalar(0L) : bd.b[m].at(0, 0);
          if (!(d.lam[br].coeff(conn1.p - m).constant() == want)) {
            r.fail(b.name + " branch " + std::to_string(br) +
                   ": diagonal entry differs from the branch series");
            break;
          }
        }
      }
    } catch (const std::exception& e) {
      r.fail(b.name + ": " + e.what());
    }
  }
  return r;
}

Result c10_degree_bounds() {
  Result r;
  // companion matrices recovered from the quantizations of criterion 1
  auto bk = bank();
  for (size_t mi = 0; mi < bk.size(); ++mi) {
    auto it = g_pairs.find({(int)mi, 1, 0});
    if (it == g_pairs.end()) continue;
    try {
      DegreeBoundReport d = degree_bound_check(companion_matrix(it->second));
      if (!d.ok) r.fail(bk[mi].name + ": degree bound fails on the recovered companion");
    } catch (const std::exception& e) {
      r.fail(bk[mi].name + ": " + e.what());
    }
  }
  // companion matrices built by the curve module
  auto lmon = [](int e) { return LSeries::monomial(e, Scalar(1L)); };
  struct CurveCase {
    std::string name;
    CurveDataODE data;
  };
  std::vector<CurveCase> cases;
  for (int q = 1; q <= 3; ++q)
    for (int p = 1; p <= 3; ++p) {
      if (std::gcd(p, q) != 1) continue;
      CurveDataODE data;
      data.q = q;
      data.f = lmon(p);
      for (int k = 0; k < q; ++k) data.basis.push_back(lmon(k));
      cases.push_back({"z^" + std::to_string(p) + " on the order-" + std::to_string(q) +
                           " standard basis",
                       data});
    }
  cases.push_back({"parameterization (t^3, t^2)",
                   curve_data_from_param({"t^3", "t^2"}, 2, 12)});
  for (const CurveCase& c : cases) {
    try {
      DegreeBoundReport d = degree_bound_check(curve_companion_ode(c.data, 12));
      if (!d.ok) r.fail(c.name + ": degree bound fails");
    } catch (const std::exception& e) {
      r.fail(c.name + ": " + e.what());
    }
  }
  return r;
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    Result (*run)();
  };
  Criterion cs[] = {
      {"quantum-curve residual on the matrix bank", c1_residual},
      {"companion matrix round-trip at every hbar", c2_roundtrip},
      {"branch count and root-of-unity ladder", c3_branches},
      {"closed-form pairs for the first orders", c4_closed_forms},
      {"discrete obstruction, anticommuting pairs, inverse", c5_discrete},
      {"hbar deformation preserves exchange and companion", c6_deform},
      {"dressing and flag round-trips on random inputs", c7_sato},
      {"flow steps preserve the defining relations", c8_flows},
      {"scalar reduction, diagonalization, newton polygon", c9_dmodule},
      {"degree bounds for recovered and curve companions", c10_degree_bounds},
  };
  int failed = 0;
  int idx = 0;
  for (const Criterion& c : cs) {
    ++idx;
    Result r;
    auto t0 = std::chrono::steady_clock::now();
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.fail(e.what());
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.pass) {
      std::printf("criterion %2d: PASS  %s [%.1fs]\n", idx, c.title, sec);
    } else {
      ++failed;
      std::printf("criterion %2d: FAIL  %s (%s) [%.1fs]\n", idx, c.title, r.why.str().c_str(),
                  sec);
    }
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
