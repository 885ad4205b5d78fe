#include "qcurve/json_io.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace qcurve {

namespace {

int req_int(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number_integer())
    throw parse_error(std::string("missing integer field \"") + key + "\"");
  return j[key].get<int>();
}

const Json& req(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw parse_error(std::string("missing field \"") + key + "\"");
  return j[key];
}

std::string req_str(const Json& j, const char* key) {
  const Json& v = req(j, key);
  if (!v.is_string()) throw parse_error(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

Json smat_to_json(const SMat& m, int s) {
  if (s == 1) {
    Scalar v = m.empty() ? Scalar(0L) : m.at(0, 0);
    return Json(v.str());
  }
  Json rows = Json::array();
  for (int r = 0; r < s; ++r) {
    Json row = Json::array();
    for (int c = 0; c < s; ++c)
      row.push_back((m.empty() ? Scalar(0L) : m.at(r, c)).str());
    rows.push_back(std::move(row));
  }
  return rows;
}

SMat smat_from_json(const Json& j, int s) {
  SMat m(s, s);
  if (j.is_string()) {
    if (s != 1) throw parse_error("matrix entry expected");
    m.at(0, 0) = Scalar::parse(j.get<std::string>());
    return m;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != s)
    throw parse_error("matrix entry has the wrong shape");
  for (int r = 0; r < s; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != s)
      throw parse_error("matrix entry has the wrong shape");
    for (int c = 0; c < s; ++c) {
      if (!row[c].is_string()) throw parse_error("matrix entry must hold scalar strings");
      m.at(r, c) = Scalar::parse(row[c].get<std::string>());
    }
  }
  return m;
}

// Generic truncated-series writer: coeffs run from top down to the floor
// (exact series: down to the lowest support).
template <class C, class Writer>
Json series_to_json(const Series<C>& s, Writer&& wr) {
  Json j;
  j["exact"] = s.exact();
  if (s.is_zero()) {
    int top = s.exact() ? 0 : s.floor() - 1;
    j["top"] = top;
    j["prec"] = 0;
    j["coeffs"] = Json::array();
    return j;
  }
  int top = s.top();
  int lo = s.exact() ? s.low() : std::min(s.low(), s.floor());
  if (!s.exact()) lo = s.floor();
  Json coeffs = Json::array();
  for (int e = top; e >= lo; --e) coeffs.push_back(wr(s.coeff(e)));
  j["top"] = top;
  j["prec"] = top - lo + 1;
  j["coeffs"] = std::move(coeffs);
  return j;
}

template <class C, class Reader>
Series<C> series_from_json(const Json& j, Reader&& rd) {
  int top = req_int(j, "top");
  int prec = req_int(j, "prec");
  const Json& coeffs = req(j, "coeffs");
  if (!coeffs.is_array() || static_cast<int>(coeffs.size()) != prec)
    throw parse_error("series coeffs length disagrees with prec");
  Series<C> s;
  for (int i = 0; i < prec; ++i) {
    C v = rd(coeffs[i]);
    if (!v.is_zero()) s.set_coeff(top - i, v);
  }
  bool exact = j.contains("exact") ? req(j, "exact").get<bool>() : true;
  if (!exact) s = s.restricted(top - prec + 1);
  return s;
}

}  // namespace

Json scalar_to_json(const Scalar& v) { return Json(v.str()); }

Scalar scalar_from_json(const Json& j) {
  if (!j.is_string()) throw parse_error("scalar must be a string");
  return Scalar::parse(j.get<std::string>());
}

Json lseries_to_json(const LSeries& s) {
  return series_to_json<Scalar>(s, [](const Scalar& c) { return Json(c.str()); });
}

LSeries lseries_from_json(const Json& j) {
  return series_from_json<Scalar>(j, [](const Json& c) { return scalar_from_json(c); });
}

Json hseries_to_json(const HSeries& h) {
  Json j;
  if (h.cap() >= HSeries::kExactCap)
    j["cap"] = "exact";
  else
    j["cap"] = h.cap();
  Json coeffs = Json::array();
  for (int k = 0; k <= h.degree(); ++k) coeffs.push_back(h.coeff(k).str());
  j["coeffs"] = std::move(coeffs);
  return j;
}

HSeries hseries_from_json(const Json& j) {
  const Json& capj = req(j, "cap");
  int cap = HSeries::kExactCap;
  if (capj.is_number_integer())
    cap = capj.get<int>();
  else if (!(capj.is_string() && capj.get<std::string>() == "exact"))
    throw parse_error("hbar series cap must be an integer or \"exact\"");
  const Json& coeffs = req(j, "coeffs");
  if (!coeffs.is_array()) throw parse_error("hbar series coeffs must be an array");
  std::vector<Scalar> c;
  for (const Json& v : coeffs) c.push_back(scalar_from_json(v));
  return HSeries(std::move(c), cap);
}

Json zseries_to_json(const ZSeries& s) {
  return series_to_json<HSeries>(s, [](const HSeries& c) { return hseries_to_json(c); });
}

ZSeries zseries_from_json(const Json& j) {
  return series_from_json<HSeries>(j, [](const Json& c) { return hseries_from_json(c); });
}

Json psdiffop_to_json(const PsDiffOp& a) {
  Json j;
  j["s"] = a.blocksize();
  j["xcap"] = a.xcap();
  if (a.exact())
    j["wcap"] = "exact";
  else
    j["wcap"] = a.wcap();
  Json terms = Json::array();
  for (const auto& [k, xp] : a.terms()) {
    Json t;
    t["k"] = k;
    Json cs = Json::array();
    for (int l = 0; l <= xp.degree(); ++l) {
      SMat c = xp.coeff(l);
      if (c.empty() || c.is_zero()) continue;
      cs.push_back(Json::array({l, smat_to_json(c, a.blocksize())}));
    }
    t["coeff"] = std::move(cs);
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

PsDiffOp psdiffop_from_json(const Json& j, int xcap) {
  int s = req_int(j, "s");
  int xc = j.contains("xcap") ? req_int(j, "xcap") : xcap;
  PsDiffOp op(s, xc);
  const Json& terms = req(j, "terms");
  if (!terms.is_array()) throw parse_error("operator terms must be an array");
  for (const Json& t : terms) {
    int k = req_int(t, "k");
    const Json& cs = req(t, "coeff");
    if (!cs.is_array()) throw parse_error("term coeff must be an array");
    XPoly xp;
    for (const Json& pair : cs) {
      if (!pair.is_array() || pair.size() != 2) throw parse_error("coeff entries are [xdeg, value]");
      if (!pair[0].is_number_integer()) throw parse_error("xdeg must be an integer");
      xp.set_coeff(pair[0].get<int>(), smat_from_json(pair[1], s));
    }
    op.set_term(k, xp);
  }
  if (j.contains("wcap") && req(j, "wcap").is_number_integer())
    op = op.restricted(j["wcap"].get<int>());
  return op;
}

Json grpoint_to_json(const GrPoint& v) {
  Json j;
  j["s"] = v.s;
  Json basis = Json::array();
  for (const MSeries& b : v.basis)
    basis.push_back(series_to_json<SMat>(b, [&](const SMat& c) { return smat_to_json(c, v.s); }));
  j["basis"] = std::move(basis);
  return j;
}

GrPoint grpoint_from_json(const Json& j) {
  GrPoint v;
  v.s = req_int(j, "s");
  const Json& basis = req(j, "basis");
  if (!basis.is_array()) throw parse_error("basis must be an array");
  for (const Json& b : basis)
    v.basis.push_back(
        series_from_json<SMat>(b, [&](const Json& c) { return smat_from_json(c, v.s); }));
  return v;
}

Json wmatrix_to_json(const WMatrix& m) {
  Json j;
  j["q"] = m.q;
  j["s"] = m.s;
  Json rows = Json::array();
  for (int r = 0; r < m.q; ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.q; ++c) {
      Json ent = Json::array();
      const WPoly& e = m.e[r][c];
      if (!e.is_zero())
        for (int d = e.low(); d <= e.top(); ++d) {
          SMat v = e.coeff(d);
          if (v.empty() || v.is_zero()) continue;
          ent.push_back(Json::array({d, smat_to_json(v, m.s)}));
        }
      row.push_back(std::move(ent));
    }
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return j;
}

WMatrix wmatrix_from_json(const Json& j) {
  int q = req_int(j, "q");
  int s = j.contains("s") ? req_int(j, "s") : 1;
  if (q < 1 || s < 1) throw parse_error("matrix dimensions must be positive");
  WMatrix m = WMatrix::zero(q, s);
  const Json& rows = req(j, "entries");
  if (!rows.is_array() || static_cast<int>(rows.size()) != q)
    throw parse_error("entries must be a q x q array");
  for (int r = 0; r < q; ++r) {
    const Json& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != q)
      throw parse_error("entries must be a q x q array");
    for (int c = 0; c < q; ++c) {
      for (const Json& pair : row[c]) {
        if (!pair.is_array() || pair.size() != 2)
          throw parse_error("polynomial entries are [deg, value]");
        if (!pair[0].is_number_integer()) throw parse_error("deg must be an integer");
        m.e[r][c].set_coeff(pair[0].get<int>(), smat_from_json(pair[1], s));
      }
    }
  }
  return m;
}

Json qpair_to_json(const QuantumPair& pair) {
  Json j;
  j["hbar"] = pair.hbar.str();
  j["p"] = psdiffop_to_json(pair.p_op);
  j["q"] = psdiffop_to_json(pair.q_op);
  j["qorder"] = pair.q;
  j["s"] = pair.s;
  return j;
}

QuantumPair qpair_from_json(const Json& j, int xcap) {
  QuantumPair pair;
  pair.hbar = Scalar::parse(req_str(j, "hbar"));
  pair.p_op = psdiffop_from_json(req(j, "p"), xcap);
  pair.q_op = psdiffop_from_json(req(j, "q"), xcap);
  pair.q = j.contains("qorder") ? req_int(j, "qorder") : pair.q_op.order();
  pair.s = j.contains("s") ? req_int(j, "s") : pair.q_op.blocksize();
  return pair;
}

Json diagseq_to_json(const DiagonalSeq& d) {
  Json j;
  if (d.is_explicit()) {
    j["kind"] = "explicit";
    j["lo"] = d.lo();
    Json es = Json::array();
    for (int k = d.lo(); k <= d.hi(); ++k) es.push_back(hseries_to_json(d.at(k)));
    j["entries"] = std::move(es);
  } else {
    j["kind"] = "geometric";
    j["period"] = d.period();
    j["mult"] = hseries_to_json(d.mult());
    Json base = Json::array();
    for (int k = 0; k < d.period(); ++k) base.push_back(hseries_to_json(d.at(k)));
    j["base"] = std::move(base);
  }
  return j;
}

DiagonalSeq diagseq_from_json(const Json& j) {
  std::string kind = req_str(j, "kind");
  if (kind == "explicit") {
    int lo = req_int(j, "lo");
    const Json& es = req(j, "entries");
    if (!es.is_array()) throw parse_error("entries must be an array");
    std::vector<HSeries> v;
    for (const Json& e : es) v.push_back(hseries_from_json(e));
    return DiagonalSeq::explicit_window(lo, std::move(v));
  }
  if (kind == "geometric") {
    int period = req_int(j, "period");
    HSeries mult = hseries_from_json(req(j, "mult"));
    const Json& bs = req(j, "base");
    if (!bs.is_array() || static_cast<int>(bs.size()) != period)
      throw parse_error("base length must equal the period");
    std::vector<HSeries> v;
    for (const Json& e : bs) v.push_back(hseries_from_json(e));
    return DiagonalSeq::periodic(period, std::move(v), mult);
  }
  throw parse_error("diagonal kind must be \"explicit\" or \"geometric\"");
}

Json psdeltaop_to_json(const PsDeltaOp& a) {
  Json j;
  if (a.exact())
    j["floor"] = "exact";
  else
    j["floor"] = a.floor();
  Json terms = Json::array();
  for (const auto& [s, d] : a.terms()) {
    Json t;
    t["shift"] = s;
    t["diag"] = diagseq_to_json(d);
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

PsDeltaOp psdeltaop_from_json(const Json& j) {
  PsDeltaOp op;
  const Json& terms = req(j, "terms");
  if (!terms.is_array()) throw parse_error("operator terms must be an array");
  for (const Json& t : terms)
    op.set_term(req_int(t, "shift"), diagseq_from_json(req(t, "diag")));
  if (j.contains("floor") && req(j, "floor").is_number_integer())
    op = op.restricted(j["floor"].get<int>());
  return op;
}

Json flag_to_json(const Flag& f) {
  Json j;
  j["depth"] = f.depth;
  Json gen = Json::array();
  for (const ZSeries& g : f.gen) gen.push_back(zseries_to_json(g));
  j["gen"] = std::move(gen);
  return j;
}

Flag flag_from_json(const Json& j) {
  Flag f;
  f.depth = req_int(j, "depth");
  const Json& gen = req(j, "gen");
  if (!gen.is_array() || static_cast<int>(gen.size()) != 2 * f.depth + 1)
    throw parse_error("flag needs 2*depth + 1 generators");
  for (const Json& g : gen) f.gen.push_back(zseries_from_json(g));
  return f;
}

Json dpair_to_json(const DiscretePair& pair) {
  Json j;
  j["k"] = psdeltaop_to_json(pair.k_op);
  j["l"] = psdeltaop_to_json(pair.l_op);
  j["lambda"] = hseries_to_json(pair.lambda);
  j["p"] = pair.p;
  j["n"] = pair.n;
  j["l_invertible"] = pair.l_invertible;
  return j;
}

DiscretePair dpair_from_json(const Json& j) {
  DiscretePair pair;
  pair.k_op = psdeltaop_from_json(req(j, "k"));
  pair.l_op = psdeltaop_from_json(req(j, "l"));
  pair.lambda = hseries_from_json(req(j, "lambda"));
  pair.p = j.contains("p") ? req_int(j, "p") : 0;
  pair.n = j.contains("n") ? req_int(j, "n") : 1;
  pair.l_invertible = j.contains("l_invertible") ? req(j, "l_invertible").get<bool>() : true;
  return pair;
}

CurveDataODE curve_ode_from_json(const Json& j, int depth) {
  int q = req_int(j, "q");
  if (j.contains("parameterization")) {
    const Json& p = j["parameterization"];
    RationalParam par{req_str(p, "f"), req_str(p, "g")};
    return curve_data_from_param(par, q, depth);
  }
  CurveDataODE data;
  data.q = q;
  data.f = lseries_from_json(req(j, "f"));
  const Json& basis = req(j, "basis");
  if (!basis.is_array()) throw parse_error("basis must be an array");
  for (const Json& b : basis) data.basis.push_back(lseries_from_json(b));
  return data;
}

CurveDataDiff curve_diff_from_json(const Json& j) {
  CurveDataDiff data;
  data.n = req_int(j, "n");
  data.f = zseries_from_json(req(j, "f"));
  data.flag = flag_from_json(req(j, "flag"));
  return data;
}

Json connection_to_json(const Connection& c) {
  Json j;
  j["q"] = c.q;
  j["dim"] = c.dim;
  j["p"] = c.p;
  j["hbar"] = hseries_to_json(c.hbar);
  Json rows = Json::array();
  for (int i = 0; i < c.dim; ++i) {
    Json row = Json::array();
    for (int k = 0; k < c.dim; ++k) row.push_back(zseries_to_json(c.b[i][k]));
    rows.push_back(std::move(row));
  }
  j["b"] = std::move(rows);
  return j;
}

Connection connection_from_json(const Json& j) {
  Connection c;
  c.q = req_int(j, "q");
  c.dim = req_int(j, "dim");
  c.p = req_int(j, "p");
  c.hbar = hseries_from_json(req(j, "hbar"));
  const Json& rows = req(j, "b");
  if (!rows.is_array() || static_cast<int>(rows.size()) != c.dim)
    throw parse_error("connection matrix must be dim x dim");
  c.b.assign(c.dim, std::vector<ZSeries>(c.dim));
  for (int i = 0; i < c.dim; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != c.dim)
      throw parse_error("connection matrix must be dim x dim");
    for (int k = 0; k < c.dim; ++k) c.b[i][k] = zseries_from_json(rows[i][k]);
  }
  return c;
}

namespace {

std::string join_terms(std::vector<std::string> terms) {
  if (terms.empty()) return "0";
  std::string out = terms[0];
  for (size_t i = 1; i < terms.size(); ++i) {
    if (!terms[i].empty() && terms[i][0] == '-')
      out += " - " + terms[i].substr(1);
    else
      out += " + " + terms[i];
  }
  return out;
}

std::string var_pow(const std::string& v, int k) {
  if (k == 0) return "";
  if (k == 1) return v;
  return v + "^" + std::to_string(k);
}

std::string hpoly_str(const HPoly& p) {
  std::vector<std::string> terms;
  for (int k = p.degree(); k >= 0; --k) {
    Scalar c = p.coeff(k);
    if (c.is_zero()) continue;
    std::string vp = var_pow("h", k);
    if (vp.empty())
      terms.push_back(c.str());
    else if (c == Scalar(1L))
      terms.push_back(vp);
    else if (c == Scalar(-1L))
      terms.push_back("-" + vp);
    else
      terms.push_back(c.str() + "*" + vp);
  }
  return join_terms(std::move(terms));
}

// True when the string needs no parentheses as a multiplicative factor.
bool atomic_str(const std::string& s) {
  for (char ch : s)
    if (ch == ' ' || ch == '+') return false;
  return s.find('-', 1) == std::string::npos;
}

std::string hrat_str(const HRat& a) {
  std::string num = hpoly_str(a.num());
  if (a.den().degree() == 0) return num;
  std::string den = hpoly_str(a.den());
  if (!atomic_str(num)) num = "(" + num + ")";
  if (!atomic_str(den)) den = "(" + den + ")";
  return num + "/" + den;
}

std::string zpoly_str(const ZPoly& p) {
  std::vector<std::string> terms;
  for (int k = p.degree(); k >= 0; --k) {
    HRat c = p.coeff(k);
    if (c.is_zero()) continue;
    std::string cs = hrat_str(c);
    std::string vp = var_pow("z", k);
    if (vp.empty()) {
      if (!atomic_str(cs)) cs = "(" + cs + ")";
      terms.push_back(cs);
    } else if (c == HRat(1L)) {
      terms.push_back(vp);
    } else if (c == HRat(-1L)) {
      terms.push_back("-" + vp);
    } else {
      if (!atomic_str(cs)) cs = "(" + cs + ")";
      terms.push_back(cs + "*" + vp);
    }
  }
  return join_terms(std::move(terms));
}

// Recursive-descent evaluation of an expression in z and h over the
// rational function field.
class ZRatParser {
 public:
  explicit ZRatParser(const std::string& s) : s_(s) {}

  ZRat run() {
    ZRat v = expr();
    skip();
    if (pos_ != s_.size())
      throw parse_error("unexpected character at position " + std::to_string(pos_));
    return v;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ZRat expr() {
    ZRat v = term();
    for (;;) {
      if (eat('+'))
        v = v + term();
      else if (eat('-'))
        v = v - term();
      else
        return v;
    }
  }

  ZRat term() {
    ZRat v = factor();
    for (;;) {
      if (eat('*'))
        v = v * factor();
      else if (eat('/'))
        v = v / factor();
      else
        return v;
    }
  }

  ZRat factor() {
    if (eat('-')) return -factor();
    ZRat v = base();
    if (eat('^')) {
      bool neg = eat('-');
      long e = integer();
      ZRat r(1L);
      for (long i = 0; i < e; ++i) r = r * v;
      return neg ? r.inv() : r;
    }
    return v;
  }

  ZRat base() {
    skip();
    if (pos_ >= s_.size()) throw parse_error("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ZRat v = expr();
      if (!eat(')')) throw parse_error("missing closing parenthesis");
      return v;
    }
    if (c == 'z') {
      ++pos_;
      return ZRat(ZPoly::monomial(1, HRat(1L)));
    }
    if (c == 'h') {
      ++pos_;
      return ZRat(ZPoly(HRat(HPoly::monomial(1, Scalar(1L)))));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return ZRat(integer());
    throw parse_error("unexpected character at position " + std::to_string(pos_));
  }

  long integer() {
    skip();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw parse_error("expected an integer");
    return std::stol(s_.substr(start, pos_ - start));
  }
};

}  // namespace

std::string zrat_str(const ZRat& a) {
  std::string num = zpoly_str(a.num());
  if (a.den().degree() == 0 && a.den().coeff(0) == HRat(1L)) return num;
  std::string den = zpoly_str(a.den());
  return "(" + num + ")/(" + den + ")";
}

ZRat zrat_parse(const std::string& s) { return ZRatParser(s).run(); }

Json scalar_op_to_json(const ScalarOperator& op) {
  Json j;
  j["q"] = op.q;
  j["order"] = op.order;
  Json a = Json::array();
  for (const ZRat& v : op.a) a.push_back(zrat_str(v));
  j["a"] = std::move(a);
  j["cyclic_index"] = op.cyclic_index;
  return j;
}

ScalarOperator scalar_op_from_json(const Json& j) {
  ScalarOperator op;
  op.q = req_int(j, "q");
  const Json& a = req(j, "a");
  if (!a.is_array() || a.empty()) throw parse_error("operator coefficients must be a nonempty array");
  for (const Json& v : a) {
    if (!v.is_string()) throw parse_error("operator coefficients are expression strings");
    op.a.push_back(zrat_parse(v.get<std::string>()));
  }
  op.order = j.contains("order") ? req_int(j, "order") : static_cast<int>(op.a.size()) - 1;
  op.cyclic_index = j.contains("cyclic_index") ? req_int(j, "cyclic_index") : 0;
  return op;
}

Json diagonalize_to_json(const DiagonalizeResult& d) {
  Json j;
  Json leading = Json::array();
  for (const Scalar& v : d.leading) leading.push_back(v.str());
  j["leading"] = std::move(leading);
  Json lam = Json::array();
  for (const ZSeries& v : d.lam) lam.push_back(zseries_to_json(v));
  j["lam"] = std::move(lam);
  Json rows = Json::array();
  for (const auto& row : d.r) {
    Json r = Json::array();
    for (const ZSeries& v : row) r.push_back(zseries_to_json(v));
    rows.push_back(std::move(r));
  }
  j["r"] = std::move(rows);
  return j;
}

Json newton_to_json(const NewtonPolygon& np) {
  Json j;
  Json support = Json::array();
  for (const auto& [s, d] : np.support) support.push_back(Json::array({s, d}));
  j["support"] = std::move(support);
  Json hull = Json::array();
  for (const auto& [s, d] : np.hull) hull.push_back(Json::array({s, d}));
  j["hull"] = std::move(hull);
  Json edges = Json::array();
  for (const NewtonEdge& e : np.edges) {
    Json ej;
    ej["from"] = Json::array({e.from.first, e.from.second});
    ej["to"] = Json::array({e.to.first, e.to.second});
    ej["slope"] = e.slope.get_str();
    edges.push_back(std::move(ej));
  }
  j["edges"] = std::move(edges);
  j["one_edge"] = np.one_edge;
  j["slope"] = np.slope.get_str();
  return j;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json_text(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw parse_error("malformed JSON input");
  return j;
}

}  // namespace qcurve
