#include "qcurve/curve.hpp"

#include <cctype>

namespace qcurve {

namespace {

int imod(int a, int n) {
  int r = a % n;
  return r < 0 ? r + n : r;
}

// Recursive-descent evaluator for the rational-function grammar
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := '-'? base ('^' '-'? integer)?
//   base   := integer | variable | '(' expr ')'
// evaluated directly at a Laurent-series value of the variable.
class ExprEval {
 public:
  ExprEval(const std::string& src, const std::string& var, const LSeries& value,
           int terms)
      : src_(src), var_(var), value_(value), terms_(terms) {}

  LSeries run() {
    LSeries r = expr();
    skip();
    if (pos_ != src_.size())
      throw parse_error("unexpected character in expression at position " +
                        std::to_string(pos_));
    return r;
  }

 private:
  const std::string& src_;
  const std::string& var_;
  const LSeries& value_;
  int terms_;
  size_t pos_ = 0;

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  LSeries expr() {
    LSeries r = term();
    for (;;) {
      if (eat('+'))
        r = r + term();
      else if (eat('-'))
        r = r - term();
      else
        return r;
    }
  }

  LSeries term() {
    LSeries r = factor();
    for (;;) {
      if (eat('*'))
        r = r * factor();
      else if (eat('/'))
        r = r * factor().inverted(terms_);
      else
        return r;
    }
  }

  LSeries factor() {
    if (eat('-')) return -factor();
    LSeries b = base();
    if (eat('^')) {
      bool neg = eat('-');
      long e = integer();
      if (neg) b = b.inverted(terms_);
      LSeries r = LSeries::monomial(0, Scalar(1));
      for (long k = 0; k < e; ++k) r = r * b;
      return r;
    }
    return b;
  }

  LSeries base() {
    skip();
    if (eat('(')) {
      LSeries r = expr();
      if (!eat(')')) throw parse_error("missing closing parenthesis");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(peek())))
      return LSeries::monomial(0, Scalar(integer()));
    if (src_.compare(pos_, var_.size(), var_) == 0) {
      pos_ += var_.size();
      return value_;
    }
    throw parse_error("expected number, variable or parenthesis at position " +
                      std::to_string(pos_));
  }

  long integer() {
    skip();
    size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    if (pos_ == start) throw parse_error("expected an integer exponent");
    return std::stol(src_.substr(start, pos_ - start));
  }
};

// q-th root of a series 1 + (strictly negative exponents), coefficient by
// coefficient down to exponent -terms.
LSeries series_root(const LSeries& s, int q, int terms) {
  if (s.is_zero() || s.top() != 0 || s.leading() != Scalar(1))
    throw precondition_error("series root needs the form 1 + lower order");
  int lo = s.exact() ? -terms : std::max(-terms, s.floor());
  LSeries r = LSeries::monomial(0, Scalar(1));
  Scalar qinv = Scalar(static_cast<long>(q)).inv();
  for (int e = -1; e >= lo; --e) {
    LSeries p = r;
    for (int k = 1; k < q; ++k) p = p * r;
    r.set_coeff(e, (s.coeff(e) - p.coeff(e)) * qinv);
  }
  return r.restricted(lo);
}

// f evaluated at a monic degree-one series value, summing coefficient by
// coefficient; negative exponents go through the inverted value.
LSeries compose_at(const LSeries& f, const LSeries& value, int terms) {
  LSeries r;
  if (f.is_zero()) return f.exact() ? r : r.restricted(f.floor());
  LSeries ival;
  std::vector<LSeries> pos, neg;  // value^k, value^-k
  pos.push_back(LSeries::monomial(0, Scalar(1)));
  neg.push_back(pos[0]);
  int lo = f.exact() ? f.low() : std::max(f.low(), f.floor());
  for (int e = f.top(); e >= lo; --e) {
    const Scalar& c = f.coeff(e);
    if (c.is_zero()) continue;
    if (e >= 0) {
      while (static_cast<int>(pos.size()) <= e) pos.push_back(pos.back() * value);
      r = r + LSeries::monomial(0, c) * pos[e];
    } else {
      if (ival.is_zero()) ival = value.inverted(terms);
      while (static_cast<int>(neg.size()) <= -e) neg.push_back(neg.back() * ival);
      r = r + LSeries::monomial(0, c) * neg[-e];
    }
  }
  if (!f.exact()) r = r.restricted(f.floor());
  return r;
}

}  // namespace

LSeries eval_rational_expr(const std::string& expr, const std::string& var,
                           const LSeries& value, int terms) {
  return ExprEval(expr, var, value, terms).run();
}

CurveDataODE curve_data_from_param(const RationalParam& par, int q, int depth) {
  if (q < 1) throw precondition_error("parameterization needs q >= 1");
  int terms = depth + 2 * q + 4;
  LSeries t_id = LSeries::monomial(1, Scalar(1));
  LSeries g = eval_rational_expr(par.g, "t", t_id, terms);
  if (g.is_zero() || g.top() != q || g.leading() != Scalar(1))
    throw precondition_error("parameterization g must be monic of degree q in t");

  // Local coordinate z = g(t)^{1/q} = t (1 + lower); invert the monic
  // degree-one series z(t) by fixed-point iteration to get t(z).
  LSeries z_of_t = series_root(g.shifted(-q), q, terms).shifted(1);
  LSeries phi = z_of_t - t_id;  // exponents <= 0
  LSeries t_of_z = LSeries::monomial(1, Scalar(1));
  for (int it = 0; it <= terms + 1; ++it) {
    LSeries next = LSeries::monomial(1, Scalar(1)) - compose_at(phi, t_of_z, terms);
    if (next == t_of_z && it > 0) {
      t_of_z = next;
      break;
    }
    t_of_z = next;
  }

  CurveDataODE data;
  data.q = q;
  data.f = compose_at(eval_rational_expr(par.f, "t", t_id, terms), t_of_z, terms);
  data.basis.resize(q);
  LSeries tp = LSeries::monomial(0, Scalar(1));
  for (int k = 0; k < q; ++k) {
    LSeries v = tp;
    for (int e = k - 1; e >= 0; --e) {
      const Scalar& c = v.coeff(e);
      if (!c.is_zero()) v = v - LSeries::monomial(0, c) * data.basis[e];
    }
    data.basis[k] = v.restricted(-depth);
    tp = tp * t_of_z;
  }
  return data;
}

WMatrix curve_companion_ode(const CurveDataODE& data, int depth) {
  int q = data.q;
  if (q < 1 || static_cast<int>(data.basis.size()) < q)
    throw precondition_error("curve data needs q basis elements");
  for (int j = 0; j < q; ++j) {
    const LSeries& v = data.basis[j];
    if (v.is_zero() || v.top() != j || v.leading() != Scalar(1))
      throw precondition_error("curve basis is not in normal form");
    for (int e = 0; e < j; ++e)
      if (!v.coeff(e).is_zero())
        throw precondition_error("curve basis is not in normal form");
  }
  if (data.f.is_zero()) throw precondition_error("curve function f is zero");

  WMatrix m = WMatrix::zero(q, 1);
  for (int j = 0; j < q; ++j) {
    LSeries h = data.f * data.basis[j];
    if (!h.exact()) h = h.restricted(std::max(h.floor(), -depth));
    while (!h.is_zero()) {
      int e = h.top();
      if (e < 0)
        throw residual_error(
            "multiplication by f does not close over the curve basis (column " +
            std::to_string(j) + ")");
      const Scalar c = h.coeff(e);
      int i = e % q, t = e / q;
      m.add(i, j, t, c);
      h = h - LSeries::monomial(q * t, c) * data.basis[i];
    }
  }
  return m;
}

WMatrix curve_companion_diff(const CurveDataDiff& data, int depth) {
  int n = data.n;
  if (n < 1 || data.flag.depth < n - 1)
    throw precondition_error("curve flag must cover the residues 0..n-1");
  for (int i = 0; i < n; ++i) {
    const ZSeries& s = data.flag.at(i);
    if (s.is_zero() || s.top() != i || !(s.leading() == HSeries(Scalar(1))))
      throw precondition_error("curve flag is not in normal form");
  }
  if (data.f.is_zero()) throw precondition_error("curve function f is zero");

  WMatrix m = WMatrix::zero(n, 1);
  for (int j = 0; j < n; ++j) {
    ZSeries h = data.f * data.flag.at(j);
    while (!h.is_zero()) {
      int e = h.top();
      int i = imod(e, n), t = (e - i) / n;
      if (t < -depth || t > depth)
        throw residual_error(
            "multiplication by f does not close over the flag (column " +
            std::to_string(j) + ")");
      const HSeries c = h.coeff(e);
      if (!c.is_constant())
        throw precondition_error("curve flag coefficients must be scalar");
      m.add(i, j, t, c.constant());
      h = h - ZSeries::monomial(n * t, c) * data.flag.at(i);
    }
  }
  return m;
}

QuantumPair quantize_from_curve(const CurveDataODE& data, const Scalar& hbar,
                                int branch, const QuantizeOptions& opt) {
  return quantize(curve_companion_ode(data, opt.window), hbar, branch, opt);
}

DiscretePair quantize_from_curve(const CurveDataDiff& data, const HSeries& lambda,
                                 const std::vector<int>& assign,
                                 const DiscreteOptions& opt) {
  return discrete_quantize(curve_companion_diff(data, opt.window), lambda, assign,
                           opt);
}

}  // namespace qcurve
