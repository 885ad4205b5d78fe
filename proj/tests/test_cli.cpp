#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qcurve/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

using namespace qcurve;

namespace {

#ifndef QC_BIN
#define QC_BIN "./qc"
#endif
#ifndef GOLDEN_DIR
#define GOLDEN_DIR "../tests/golden"
#endif

std::string golden(const std::string& name) { return std::string(GOLDEN_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  RunResult r;
  std::string cmd = std::string(QC_BIN) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.exit_code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

ZSeries zmon(int e, long c = 1) { return ZSeries::monomial(e, HSeries(Scalar(c))); }

}  // namespace

TEST_CASE("scalar and series round-trips") {
  for (const char* s : {"0", "1", "-3/2", "7"}) {
    Scalar v = Scalar::parse(s);
    CHECK(scalar_from_json(scalar_to_json(v)) == v);
  }
  LSeries a = LSeries::monomial(3, Scalar(2L)) + LSeries::monomial(-2, Scalar::rational(1, 3));
  CHECK(lseries_from_json(lseries_to_json(a)) == a);
  LSeries b = a.restricted(-5);
  LSeries back = lseries_from_json(lseries_to_json(b));
  CHECK(back == b);
  CHECK(back.floor() == b.floor());

  HSeries h(std::vector<Scalar>{Scalar(1L), Scalar::rational(-1, 2)}, 3);
  CHECK(hseries_from_json(hseries_to_json(h)) == h);
  CHECK(hseries_from_json(hseries_to_json(h)).cap() == 3);

  ZSeries z = zmon(1) + ZSeries::monomial(-2, h);
  CHECK(zseries_from_json(zseries_to_json(z)) == z);
}

TEST_CASE("operator and matrix round-trips") {
  PsDiffOp d2 = PsDiffOp::dpow(2);
  XPoly x1;
  SMat one(1, 1);
  one.at(0, 0) = Scalar(1L);
  x1.set_coeff(1, one);
  PsDiffOp op = d2 + PsDiffOp::from_term(-1, x1);
  op = op.restricted(6);
  PsDiffOp back = psdiffop_from_json(psdiffop_to_json(op));
  CHECK(back.equal_on_window(op));
  CHECK(back.wcap() == op.wcap());

  WMatrix m = WMatrix::zero(2);
  m.add(0, 1, 1, Scalar(1L));
  m.add(1, 0, 0, Scalar(1L));
  m.add(1, 1, 2, Scalar::rational(-2, 3));
  CHECK(wmatrix_from_json(wmatrix_to_json(m)) == m);

  PsDeltaOp l = PsDeltaOp::shift_op(2) +
                PsDeltaOp::from_term(-1, DiagonalSeq::constant(HSeries(Scalar(3L))));
  l.set_term(0, DiagonalSeq::explicit_window(-2, {HSeries(Scalar(1L)), HSeries(Scalar(2L)),
                                                  HSeries(Scalar(3L)), HSeries(Scalar(4L)),
                                                  HSeries(Scalar(5L))}));
  PsDeltaOp lb = psdeltaop_from_json(psdeltaop_to_json(l));
  CHECK(lb.equal_on_window(l));

  DiscretePair pair;
  pair.k_op = PsDeltaOp::shift_op(1);
  pair.l_op = PsDeltaOp::shift_op(2);
  pair.lambda = HSeries(Scalar(-1L));
  pair.p = 1;
  pair.n = 2;
  DiscretePair pb = dpair_from_json(dpair_to_json(pair));
  CHECK(pb.k_op.equal_on_window(pair.k_op));
  CHECK(pb.lambda == pair.lambda);
  CHECK(pb.n == 2);

  WMatrix swap = WMatrix::zero(2);
  swap.add(0, 1, 1, Scalar(1L));
  swap.add(1, 0, 0, Scalar(1L));
  Connection c = connection_from_companion(swap, hbar_symbol());
  Connection cb = connection_from_json(connection_to_json(c));
  CHECK(cb.q == c.q);
  CHECK(cb.dim == c.dim);
  CHECK(cb.hbar == c.hbar);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(cb.b[i][j] == c.b[i][j]);
}

TEST_CASE("rational expression strings round-trip") {
  ZRat z = zrat_parse("z");
  ZRat h = zrat_parse("h");
  ZRat samples[] = {
      ZRat(),
      ZRat(5L),
      -z * z,
      (z * z + h * z - ZRat(1L)) / (z - ZRat(2L)),
      -h / z,
      zrat_parse("(1/2)*h^2*z - 3/4"),
  };
  for (const ZRat& v : samples) {
    std::string s = zrat_str(v);
    CHECK(zrat_parse(s) == v);
  }
  CHECK(zrat_parse("2 + 3*4") == ZRat(14L));
  CHECK(zrat_parse("z^-1") == ZRat(1L) / z);
  CHECK_THROWS_AS(zrat_parse("z +"), parse_error);
  CHECK_THROWS_AS(zrat_parse("(z"), parse_error);
}

TEST_CASE("golden corpus stays byte-identical") {
  RunResult r = run("commutator " + golden("d_op.json") + " " + golden("x_op.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == read_file(golden("expected_commutator_dx.json")));

  r = run("quantize --hbar 1 --branch 0 " + golden("swap_matrix.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == read_file(golden("expected_quantize_swap.json")));
  RunResult again = run("quantize --hbar 1 --branch 0 " + golden("swap_matrix.json"));
  CHECK(again.out == r.out);

  r = run("cyclic --hbar symbolic " + golden("swap_matrix.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == read_file(golden("expected_cyclic_swap.json")));

  r = run("newton --hbar symbolic " + golden("swap_matrix.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == read_file(golden("expected_newton_swap.json")));

  r = run("curve-companion --depth 8 " + golden("parabola_curve.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == read_file(golden("expected_companion_parabola.json")));
}

TEST_CASE("pipeline verification and exit codes") {
  std::string pair_path = "cli_pair_tmp.json";
  RunResult r = run("quantize --hbar 1 --branch 0 --out " + pair_path + " " +
                    golden("swap_matrix.json"));
  CHECK(r.exit_code == 0);
  r = run("verify " + pair_path);
  CHECK(r.exit_code == 0);
  r = run("companion " + pair_path);
  CHECK(r.exit_code == 0);
  CHECK(parse_json_text(r.out) == parse_json_text(read_file(golden("swap_matrix.json"))));
  std::remove(pair_path.c_str());

  r = run("discrete-quantize --lambda -1 " + golden("order1_matrix.json"));
  CHECK(r.exit_code == 2);

  r = run("quantize --hbar 1 " + golden("d_op.json"));
  CHECK(r.exit_code == 1);
}
