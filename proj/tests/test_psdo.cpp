#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qcurve/psdo.hpp"

using namespace qcurve;

namespace {

XPoly xpow(int l, long c = 1) {
  XPoly p;
  SMat m(1, 1);
  m.at(0, 0) = Scalar(c);
  p.set_coeff(l, m);
  return p;
}

SMat s1(long c) {
  SMat m(1, 1);
  m.at(0, 0) = Scalar(c);
  return m;
}

Scalar entry(const XPoly& p, int l) {
  SMat m = p.coeff(l);
  return m.empty() ? Scalar() : m.at(0, 0);
}

}  // namespace

TEST_CASE("canonical commutation relation") {
  PsDiffOp d = PsDiffOp::dpow(1);
  PsDiffOp x = PsDiffOp::from_term(0, xpow(1));
  PsDiffOp c = commutator(d, x);
  CHECK(c.equal_on_window(PsDiffOp::identity()));
}

TEST_CASE("normal ordering of D^2 after x") {
  // D^2 x = x D^2 + 2 D
  PsDiffOp p = PsDiffOp::dpow(2) * PsDiffOp::from_term(0, xpow(1));
  CHECK(entry(p.coeff(2), 1) == Scalar(1));
  CHECK(entry(p.coeff(1), 0) == Scalar(2));
  CHECK(p.coeff(0).is_zero());
}

TEST_CASE("negative order normal ordering") {
  // D^{-1} x = x D^{-1} - D^{-2}
  PsDiffOp p = PsDiffOp::dpow(-1) * PsDiffOp::from_term(0, xpow(1));
  CHECK(entry(p.coeff(-1), 1) == Scalar(1));
  CHECK(entry(p.coeff(-2), 0) == Scalar(-1));
}

TEST_CASE("action on series matches the representation") {
  // D -> multiplication by z, x -> -d/dz.
  LSeries f = LSeries::monomial(3, Scalar(1));
  PsDiffOp x = PsDiffOp::from_term(0, xpow(1));
  LSeries g = x.apply_scalar(f);
  CHECK(g.coeff(2) == Scalar(-3));

  PsDiffOp d = PsDiffOp::dpow(2);
  CHECK(d.apply_scalar(f).coeff(5) == Scalar(1));

  // x^2 D z^3 = (d/dz)^2 z^4 = 12 z^2
  PsDiffOp xxd = PsDiffOp::from_term(1, xpow(2));
  CHECK(xxd.apply_scalar(f).coeff(2) == Scalar(12));
}

TEST_CASE("composition is faithful on series") {
  PsDiffOp a = PsDiffOp::from_term(2, xpow(1)) + PsDiffOp::dpow(-1).scaled(Scalar(3));
  PsDiffOp b = PsDiffOp::from_term(-2, xpow(2)) + PsDiffOp::dpow(1);
  LSeries f = LSeries::monomial(3, Scalar(1)) + LSeries::monomial(1, Scalar(2)) +
              LSeries::monomial(-1, Scalar(1));
  LSeries lhs = (a * b).apply_scalar(f);
  LSeries rhs = a.apply_scalar(b.apply_scalar(f));
  CHECK(lhs == rhs);
  CHECK(lhs.exact());
}

TEST_CASE("split into differential part and tail") {
  PsDiffOp a = PsDiffOp::dpow(2) + PsDiffOp::from_term(0, xpow(1)) +
               PsDiffOp::from_term(-3, xpow(2));
  CHECK(a.plus_part().equal_on_window(PsDiffOp::dpow(2) + PsDiffOp::from_term(0, xpow(1))));
  CHECK(a.minus_part().equal_on_window(PsDiffOp::from_term(-3, xpow(2))));
  CHECK((a.plus_part() + a.minus_part()).equal_on_window(a));
  CHECK(!a.is_differential());
  CHECK(a.plus_part().is_differential());
}

TEST_CASE("inverse of 1 + x D^{-1}") {
  PsDiffOp s = PsDiffOp::identity() + PsDiffOp::from_term(-1, xpow(1));
  PsDiffOp si = s.inverted(8);
  CHECK((s * si).equal_on_window(PsDiffOp::identity().restricted(8)));
  CHECK((si * s).equal_on_window(PsDiffOp::identity().restricted(8)));
  CHECK(si.wcap() == 8);
  // Leading Neumann terms: 1 - x D^{-1} + (x D^{-1})^2 - ...
  CHECK(entry(si.coeff(-1), 1) == Scalar(-1));
  CHECK(entry(si.coeff(-2), 2) == Scalar(1));
  CHECK(entry(si.coeff(-3), 1) == Scalar(-1));
  CHECK(entry(si.coeff(-3), 3) == Scalar(-1));
}

TEST_CASE("inverse rejects operators without unit leading part") {
  PsDiffOp bad = PsDiffOp::dpow(1) + PsDiffOp::identity();
  CHECK_THROWS_AS(bad.inverted(4), precondition_error);
}

TEST_CASE("undress conjugates an Airy operator to D^2") {
  int depth = 8;
  PsDiffOp q = PsDiffOp::dpow(2) + PsDiffOp::from_term(0, xpow(1));
  PsDiffOp s = undress(q, depth);
  CHECK(s.coeff(0) == XPoly(s1(1)));
  CHECK(dress(s, q, depth).equal_on_window(PsDiffOp::dpow(2).restricted(depth)));
  // The first correction integrates the potential: coefficient -x^2/4.
  CHECK(entry(s.coeff(-1), 2) == Scalar::rational(1, 4));
  // Round trip: q = S^{-1} D^2 S.
  PsDiffOp back = (s.inverted(depth) * PsDiffOp::dpow(2) * s).restricted(depth - 2);
  CHECK(back.equal_on_window(q.restricted(depth - 2)));
}

TEST_CASE("undress fixes the constant-part gauge") {
  // Dressings of the same operator differ by a left factor with constant
  // coefficients; undress returns the representative with zero constant
  // parts, deterministically.
  PsDiffOp q = PsDiffOp::dpow(2) + PsDiffOp::from_term(0, xpow(1));
  PsDiffOp s0 = undress(q, 6);
  for (int j = 1; j <= 6; ++j) CHECK(s0.coeff(-j).coeff(0).is_zero());
  PsDiffOp s1_op = (PsDiffOp::identity() + PsDiffOp::dpow(-2).scaled(Scalar(5))) * s0;
  CHECK(dress(s1_op, q, 4).equal_on_window(PsDiffOp::dpow(2).restricted(4)));
  CHECK(!s1_op.equal_on_window(s0));
  CHECK(undress(q, 6).equal_on_window(s0));
}

TEST_CASE("undress rejects non-normalized input") {
  CHECK_THROWS_AS(undress(PsDiffOp::dpow(2) + PsDiffOp::dpow(1), 4), precondition_error);
  PsDiffOp not_monic = PsDiffOp::dpow(2).scaled(Scalar(2));
  CHECK_THROWS_AS(undress(not_monic, 4), precondition_error);
  PsDiffOp tail = PsDiffOp::dpow(2) + PsDiffOp::dpow(-1);
  CHECK_THROWS_AS(undress(tail, 4), precondition_error);
}

TEST_CASE("fractional powers through undressing") {
  PsDiffOp q = PsDiffOp::dpow(2, 1, 48) + PsDiffOp::from_term(0, xpow(1), 1, 48);
  PsDiffOp r1 = psdo_root(q, 1, 6);  // q^{1/2}
  CHECK((r1 * r1).equal_on_window(q.restricted(5)));
  PsDiffOp r3 = psdo_root(q, 3, 6);  // q^{3/2}
  CHECK((r1 * r1 * r1).equal_on_window(r3.restricted(4)));
  CHECK(r3.plus_part().is_differential());
}

TEST_CASE("sato point and operator are mutually inverse") {
  PsDiffOp s = PsDiffOp::identity() + PsDiffOp::from_term(-1, xpow(1)) +
               PsDiffOp::from_term(-2, xpow(0, 3) + xpow(2));
  GrPoint v = sato_point(s, 9, 12);
  for (size_t n = 0; n < v.basis.size(); ++n) {
    CHECK(v.basis[n].top() == static_cast<int>(n));
    CHECK(v.basis[n].coeff(static_cast<int>(n)) == s1(1));
  }
  PsDiffOp back = sato_operator(v, 5, 6);
  CHECK(back.equal_on_window(s.restricted(5)));
}

TEST_CASE("sato operator spans a corrupted basis without reproducing it") {
  PsDiffOp s = PsDiffOp::identity() + PsDiffOp::from_term(-1, xpow(1));
  GrPoint v = sato_point(s, 8, 12);
  // Corrupt one deep coefficient.  The recovered operator still spans the
  // perturbed subspace, but it no longer reproduces the given basis, so the
  // round trip detects the corruption.
  MSeries bad = v.basis[5];
  bad.set_coeff(0, s1(7));
  v.basis[5] = bad;
  PsDiffOp back = sato_operator(v, 8, 24);
  CHECK(!back.equal_on_window(s.restricted(8)));
  GrPoint again = sato_point(back, 8, 12);
  CHECK(!(again.basis[5].coeff(0) == v.basis[5].coeff(0)));
}

TEST_CASE("matrix coefficients") {
  SMat e01(2, 2), e10(2, 2);
  e01.at(0, 1) = Scalar(1);
  e10.at(1, 0) = Scalar(1);
  // An Airy-type operator with a nilpotent matrix potential.
  XPoly pot;
  pot.set_coeff(1, e01);
  PsDiffOp q = PsDiffOp::dpow(2, 2) + PsDiffOp::from_term(0, pot, 2);
  PsDiffOp s = undress(q, 6);
  CHECK(dress(s, q, 6).equal_on_window(PsDiffOp::dpow(2, 2).restricted(6)));

  // Noncommutativity is respected: e01 * e10 != e10 * e01.
  XPoly px, py;
  px.set_coeff(1, e01);
  py.set_coeff(0, e10);
  PsDiffOp a = PsDiffOp::from_term(0, px, 2);
  PsDiffOp b = PsDiffOp::from_term(0, py, 2);
  CHECK(!commutator(a, b).is_zero());

  PsDiffOp sg = PsDiffOp::identity(2) + PsDiffOp::from_term(-1, px, 2);
  GrPoint v = sato_point(sg, 8, 10);
  CHECK(sato_operator(v, 4, 5).equal_on_window(sg.restricted(4)));
}

TEST_CASE("x-degree cap fails loudly") {
  PsDiffOp a = PsDiffOp::from_term(0, xpow(2), 1, 3);
  CHECK_THROWS_AS(a * a, precondition_error);
}
