#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qcurve/psdelta.hpp"
#include "qcurve/quantize.hpp"

using namespace qcurve;

namespace {

HSeries hs(long v) { return HSeries(Scalar(v)); }

// Geometric diagonal a_k = m^k.
DiagonalSeq geom(long m) {
  return DiagonalSeq::periodic(1, {hs(1)}, hs(m));
}

// Explicit diagonal a_k = k on [-w, w].
DiagonalSeq ramp(int w) {
  std::vector<HSeries> e;
  for (int k = -w; k <= w; ++k) e.push_back(hs(k));
  return DiagonalSeq::explicit_window(-w, std::move(e));
}

// Explicit indicator of index 0 on [-w, w].
DiagonalSeq delta0(int w) {
  std::vector<HSeries> e(2 * w + 1);
  e[w] = hs(1);
  return DiagonalSeq::explicit_window(-w, std::move(e));
}

ZSeries zmon(int e, long c = 1) { return ZSeries::monomial(e, hs(c)); }

WMatrix swap_matrix() {
  WMatrix m = WMatrix::zero(2);
  m.add(0, 1, 1, Scalar(1));
  m.add(1, 0, 0, Scalar(1));
  return m;
}

}  // namespace

TEST_CASE("shift and diagonal algebra") {
  PsDeltaOp sh = PsDeltaOp::shift_op(1);
  CHECK((sh * PsDeltaOp::shift_op(-1)).equal_on_window(PsDeltaOp::identity()));

  // diag(2^k) Lambda = 2 Lambda diag(2^k)
  PsDeltaOp d = PsDeltaOp::from_term(0, geom(2));
  CHECK((d * sh).equal_on_window((sh * d).scaled(hs(2))));

  // (Lambda + diag(k)) Lambda = Lambda^2 + diag(k) Lambda
  PsDeltaOp a = sh + PsDeltaOp::from_term(0, ramp(8));
  PsDeltaOp prod = a * sh;
  CHECK(prod.coeff(2).at(5) == hs(1));
  CHECK(prod.coeff(1).at(3) == hs(3));
  // Lambda (Lambda + diag(k)) picks the shifted diagonal instead
  PsDeltaOp prod2 = sh * a;
  CHECK(prod2.coeff(1).at(3) == hs(2));
}

TEST_CASE("split into positive and negative shifts") {
  PsDeltaOp a = PsDeltaOp::shift_op(1) + PsDeltaOp::shift_op(-1);
  CHECK(a.plus_part().equal_on_window(PsDeltaOp::shift_op(1)));
  CHECK(a.minus_part().equal_on_window(PsDeltaOp::shift_op(-1)));
  PsDeltaOp d = PsDeltaOp::from_term(0, geom(3));
  CHECK(d.plus_part().equal_on_window(d));
  CHECK(d.minus_part().is_zero());
  PsDeltaOp m = PsDeltaOp::from_term(-2, ramp(6));
  CHECK(m.plus_part().is_zero());
  CHECK(m.minus_part().equal_on_window(m));
}

TEST_CASE("residual of the exchange relation") {
  PsDeltaOp sh = PsDeltaOp::shift_op(1);
  PsDeltaOp r = verify_discrete(sh, sh, hs(3));
  CHECK(r.coeff(2).at(0) == hs(-2));  // (1 - lambda) Lambda^2
  CHECK(r.terms().size() == 1);
}

TEST_CASE("action on Laurent series") {
  PsDeltaOp a = PsDeltaOp::shift_op(1) + PsDeltaOp::from_term(0, geom(3));
  ZSeries f = zmon(2) + zmon(0, 5);
  ZSeries g = a.apply(f);
  CHECK(g.coeff(3) == hs(1));
  CHECK(g.coeff(2) == hs(9));
  CHECK(g.coeff(1) == hs(5));
  CHECK(g.coeff(0) == hs(5));
  CHECK(g.exact());

  // composition agrees with iterated application
  PsDeltaOp b = PsDeltaOp::shift_op(-1) + PsDeltaOp::from_term(0, ramp(10));
  ZSeries lhs = (a * b).apply(f);
  ZSeries rhs = a.apply(b.apply(f));
  CHECK(lhs == rhs);
}

TEST_CASE("inverses terminate exactly when the tail dies") {
  // Lambda + indicator is invertible: the Neumann tail terminates because
  // the shifted indicators have disjoint support.
  PsDeltaOp l1 = PsDeltaOp::shift_op(1) + PsDeltaOp::from_term(0, delta0(12));
  PsDeltaOp inv1 = l1.inverted(8);
  CHECK((l1 * inv1 - PsDeltaOp::identity()).is_zero());
  CHECK((inv1 * l1 - PsDeltaOp::identity()).is_zero());
  CHECK(inv1.terms().size() == 2);

  // Lambda + 1 acts as multiplication by 1 + z; its inverse has an infinite
  // tail of nonzero coefficients.
  PsDeltaOp l2 = PsDeltaOp::shift_op(1) +
                 PsDeltaOp::from_term(0, DiagonalSeq::constant(hs(1)));
  PsDeltaOp inv2 = l2.inverted(8);
  CHECK((l2 * inv2 - PsDeltaOp::identity()).is_zero());
  CHECK(inv2.terms().size() >= 8);
}

TEST_CASE("flag of a dressing operator and back") {
  // 1 + Lambda^{-1} sends z^m to z^m + z^{m-1}.
  PsDeltaOp simple = PsDeltaOp::identity() +
                     PsDeltaOp::from_term(-1, DiagonalSeq::constant(hs(1)));
  Flag fs = flag_from_dressing(simple, 4);
  CHECK(fs.at(2) == zmon(2) + zmon(1));

  PsDeltaOp s = PsDeltaOp::identity() + PsDeltaOp::from_term(-1, ramp(10)) +
                PsDeltaOp::from_term(-2, geom(3));
  Flag f = flag_from_dressing(s, 6);
  for (int m = -6; m <= 6; ++m) CHECK(f.at(m).coeff(m) == hs(1));
  PsDeltaOp back = dressing_from_flag(f);
  CHECK(back.equal_on_window(s));

  // The reconstruction is a coordinate read: perturbing one flag entry
  // moves exactly one dressing coefficient.
  Flag g = f;
  g.gen[6 + 3].set_coeff(1, g.gen[6 + 3].coeff(1) + hs(7));
  PsDeltaOp moved = dressing_from_flag(g);
  CHECK(moved.coeff(-2).at(1) == back.coeff(-2).at(1) + hs(7));
  CHECK(moved.coeff(-1) == back.coeff(-1));
}

TEST_CASE("undressing a difference operator") {
  // Lambda + 1: the dressing exists but the operator is not invertible.
  PsDeltaOp l2 = PsDeltaOp::shift_op(1) +
                 PsDeltaOp::from_term(0, DiagonalSeq::constant(hs(1)));
  UndressResult ud = undress_difference(l2, 6, 14);
  CHECK((ud.s * l2 - PsDeltaOp::shift_op(1) * ud.s).is_zero());
  CHECK(ud.s.coeff(-1).at(0) == hs(0));  // gauge: entries vanish on [0, n)
  CHECK(ud.s.coeff(-1).at(3) == hs(-3));
  CHECK(!ud.invertible);

  // Lambda + indicator undresses and is invertible within the window.
  PsDeltaOp l1 = PsDeltaOp::shift_op(1) + PsDeltaOp::from_term(0, delta0(20));
  UndressResult ud1 = undress_difference(l1, 6, 14);
  CHECK((ud1.s * l1 - PsDeltaOp::shift_op(1) * ud1.s).is_zero());
  CHECK(ud1.invertible);
  CHECK((l1 * ud1.l_inverse - PsDeltaOp::identity()).is_zero());
}

TEST_CASE("companion matrices of discrete pairs") {
  // K = diag(2^k), L = Lambda satisfy K L = 2 L K with companion [1].
  DiscretePair p1;
  p1.k_op = PsDeltaOp::from_term(0, geom(2));
  p1.l_op = PsDeltaOp::shift_op(1);
  p1.lambda = hs(2);
  CHECK(verify_discrete(p1.k_op, p1.l_op, p1.lambda).is_zero());
  WMatrix m1 = discrete_companion(p1, 6, 20);
  WMatrix e1 = WMatrix::zero(1);
  e1.add(0, 0, 0, Scalar(1));
  CHECK(m1 == e1);

  // K = Lambda^3, L = Lambda^2 commute; the companion splits as w and w^2.
  DiscretePair p2;
  p2.k_op = PsDeltaOp::shift_op(3);
  p2.l_op = PsDeltaOp::shift_op(2);
  p2.lambda = hs(1);
  WMatrix m2 = discrete_companion(p2, 6, 20);
  WMatrix e2 = WMatrix::zero(2);
  e2.add(0, 1, 2, Scalar(1));
  e2.add(1, 0, 1, Scalar(1));
  CHECK(m2 == e2);

  // Scaling K scales the companion.
  DiscretePair p3 = p1;
  p3.k_op = p1.k_op.scaled(hs(5));
  WMatrix m3 = discrete_companion(p3, 6, 20);
  CHECK(m3.e[0][0].coeff(0).at(0, 0) == Scalar(5));
}

TEST_CASE("scalar curve quantizes to the pure shift") {
  WMatrix m = WMatrix::zero(1);
  m.add(0, 0, 1, Scalar(1));
  auto branches = discrete_branches(m, hs(1));
  REQUIRE(branches.size() == 1);
  DiscretePair pair = discrete_quantize(m, hs(1), branches[0]);
  CHECK(pair.k_op.equal_on_window(PsDeltaOp::shift_op(1)));
  CHECK(pair.l_op.equal_on_window(PsDeltaOp::shift_op(1)));
  CHECK(verify_discrete(pair.k_op, pair.l_op, pair.lambda).is_zero());
}

TEST_CASE("exchange parameter must be a root of unity") {
  WMatrix m = WMatrix::zero(1);
  m.add(0, 0, 1, Scalar(1));
  CHECK_THROWS_AS(discrete_quantize(m, hs(-1), {0}), precondition_error);
  WMatrix sw = swap_matrix();
  CHECK_THROWS_AS(
      discrete_quantize(sw, HSeries(Scalar::root_of_unity(4, 1)), {0, 1}),
      precondition_error);
}

TEST_CASE("anticommuting pair of the swap curve") {
  WMatrix m = swap_matrix();
  auto branches = discrete_branches(m, hs(-1));
  REQUIRE(branches.size() == 2);
  CHECK(branches[0] == std::vector<int>{0, 1});
  CHECK(branches[1] == std::vector<int>{1, 0});

  DiscretePair pair = discrete_quantize(m, hs(-1), branches[0]);
  CHECK(pair.p == 1);
  CHECK(pair.n == 2);
  CHECK(pair.l_op.equal_on_window(PsDeltaOp::shift_op(2)));
  // K = diag(b) Lambda with b of period 4: -1, 1, 1, -1.
  DiagonalSeq b = pair.k_op.coeff(1);
  CHECK(b.at(0) == hs(-1));
  CHECK(b.at(1) == hs(1));
  CHECK(b.at(2) == hs(1));
  CHECK(b.at(3) == hs(-1));
  CHECK(b.at(4) == hs(-1));
  CHECK(verify_discrete(pair.k_op, pair.l_op, pair.lambda).is_zero());
  CHECK(discrete_companion(pair, 8, 24) == m);

  // Dressed form of the relation: the conjugated operator exchanges with
  // Lambda^n at the same ratio.
  UndressResult ud = undress_difference(pair.l_op, 8, 24);
  PsDeltaOp ktil = ud.s * pair.k_op * ud.s.inverted(8);
  PsDeltaOp sh2 = PsDeltaOp::shift_op(2);
  CHECK((ktil * sh2 - (sh2 * ktil).scaled(pair.lambda)).is_zero());

  // The second branch flips the diagonal.
  DiscretePair other = discrete_quantize(m, hs(-1), branches[1]);
  CHECK(other.k_op.coeff(1).at(1) == hs(-1));
  CHECK(discrete_companion(other, 8, 24) == m);
}

TEST_CASE("commuting pairs of the swap curve") {
  WMatrix m = swap_matrix();
  auto branches = discrete_branches(m, hs(1));
  REQUIRE(branches.size() == 2);
  CHECK(branches[0] == std::vector<int>{0, 0});
  CHECK(branches[1] == std::vector<int>{1, 1});
  DiscretePair pair = discrete_quantize(m, hs(1), branches[1]);
  CHECK(pair.k_op.equal_on_window(PsDeltaOp::shift_op(1)));
  CHECK(pair.l_op.equal_on_window(PsDeltaOp::shift_op(2)));
  CHECK(discrete_companion(pair, 8, 24) == m);
}

TEST_CASE("formal deformation of commuting shifts") {
  DiscretePair p2;
  p2.k_op = PsDeltaOp::shift_op(3);
  p2.l_op = PsDeltaOp::shift_op(2);
  p2.lambda = hs(1);
  p2.p = 3;
  p2.n = 2;
  DiscreteOptions opt;
  opt.window = 8;
  DiscretePair dp = hbar_deform(p2, 2, opt);
  HSeries lam = HSeries::exp_hbar(2);
  CHECK(dp.lambda == lam);
  CHECK(verify_discrete(dp.k_op, dp.l_op, dp.lambda).is_zero());
  // The diagonal of K picks up exchange factors two steps apart.
  DiagonalSeq b = dp.k_op.coeff(3);
  CHECK(b.at(3) == hs(1));
  CHECK(b.at(4) == hs(1));
  CHECK(b.at(5) == lam);
  CHECK(b.at(1) == lam.inv());
  // Classical slice is the input pair.
  for (const auto& [s, d] : dp.k_op.terms())
    for (int k = 0; k < 4; ++k)
      CHECK(d.at(k).constant() == (s == 3 ? Scalar(1) : Scalar(0)));
  CHECK(dp.l_op.equal_on_window(PsDeltaOp::shift_op(2)));
  // Same companion as the input pair.
  CHECK(discrete_companion(dp, 10, 30) == discrete_companion(p2, 10, 30));
}

TEST_CASE("deformation at order zero is the identity") {
  WMatrix m = swap_matrix();
  DiscretePair pair = discrete_quantize(m, hs(1), {1, 1});
  DiscreteOptions opt;
  opt.window = 8;
  DiscretePair dp = hbar_deform(pair, 0, opt);
  CHECK(dp.k_op.equal_on_window(pair.k_op));
  CHECK(dp.l_op.equal_on_window(pair.l_op));
  CHECK(dp.lambda == hs(1));
}

TEST_CASE("deformation of a quantized curve keeps its companion") {
  WMatrix m = swap_matrix();
  DiscretePair pair = discrete_quantize(m, hs(1), {1, 1});
  DiscreteOptions opt;
  opt.window = 8;
  DiscretePair dp = hbar_deform(pair, 3, opt);
  CHECK(verify_discrete(dp.k_op, dp.l_op, dp.lambda).is_zero());
  CHECK(discrete_companion(dp, 10, 30) == m);
  // Per-order residual of the exchange relation vanishes through hbar^3.
  PsDeltaOp resid = dp.k_op * dp.l_op - (dp.l_op * dp.k_op).scaled(dp.lambda);
  CHECK(resid.is_zero());
}

TEST_CASE("discrete flows") {
  PsDeltaOp l = PsDeltaOp::shift_op(2) + PsDeltaOp::from_term(0, delta0(30));
  Scalar t = Scalar::rational(1, 3);

  // The n-th flow is stationary.
  CHECK(dkp_flow_step(l, 2, t, 8, 24).equal_on_window(l));

  // The first flow moves the operator but keeps it monic of the same order.
  PsDeltaOp l1 = dkp_flow_step(l, 1, t, 8, 24);
  CHECK(!l1.equal_on_window(l));
  CHECK(l1.is_monic());
  CHECK(l1.order() == 2);

  // Plus and minus projections generate opposite flows since the full
  // fractional power commutes with the operator.
  UndressResult ud = undress_difference(l, 8, 24);
  PsDeltaOp r = ud.s.inverted(8) * PsDeltaOp::shift_op(1) * ud.s;
  CHECK(commutator(r.plus_part(), l).equal_on_window(-commutator(r.minus_part(), l)));
}
