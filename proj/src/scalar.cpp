#include "qcurve/scalar.hpp"

#include <sstream>
#include <vector>

namespace qcurve {

namespace {

// Multiplication of basis monomials z^i * z^j reduced by z^4 = z^2 - 1.
// Rows give the coordinates of z^k for k = 0..6.
const int kPowRed[7][4] = {
    {1, 0, 0, 0},   // z^0
    {0, 1, 0, 0},   // z^1
    {0, 0, 1, 0},   // z^2
    {0, 0, 0, 1},   // z^3
    {-1, 0, 1, 0},  // z^4 = z^2 - 1
    {0, -1, 0, 1},  // z^5 = z^3 - z
    {-1, 0, 0, 0},  // z^6 = -1
};

mpq_class q_abs(const mpq_class& x) { return x < 0 ? mpq_class(-x) : x; }

}  // namespace

bool Cyclo::is_zero() const {
  return c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0;
}

Cyclo operator+(const Cyclo& a, const Cyclo& b) {
  Cyclo r;
  for (int i = 0; i < 4; ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}

Cyclo operator-(const Cyclo& a, const Cyclo& b) {
  Cyclo r;
  for (int i = 0; i < 4; ++i) r.c[i] = a.c[i] - b.c[i];
  return r;
}

Cyclo operator-(const Cyclo& a) {
  Cyclo r;
  for (int i = 0; i < 4; ++i) r.c[i] = -a.c[i];
  return r;
}

Cyclo operator*(const Cyclo& a, const Cyclo& b) {
  std::array<mpq_class, 7> raw;
  for (int i = 0; i < 4; ++i) {
    if (a.c[i] == 0) continue;
    for (int j = 0; j < 4; ++j) {
      if (b.c[j] == 0) continue;
      raw[i + j] += a.c[i] * b.c[j];
    }
  }
  Cyclo r;
  for (int k = 0; k < 7; ++k) {
    if (raw[k] == 0) continue;
    for (int i = 0; i < 4; ++i) {
      if (kPowRed[k][i] != 0) r.c[i] += raw[k] * kPowRed[k][i];
    }
  }
  return r;
}

bool operator==(const Cyclo& a, const Cyclo& b) {
  for (int i = 0; i < 4; ++i) {
    if (a.c[i] != b.c[i]) return false;
  }
  return true;
}

Cyclo cyclo_inv(const Cyclo& a) {
  if (a.is_zero()) throw precondition_error("division by zero scalar");
  if (a.is_rational()) {
    Cyclo r;
    r.c[0] = 1 / a.c[0];
    return r;
  }
  // Solve (mult-by-a) x = e_0 by Gaussian elimination on the 4x4
  // representation matrix M[i][j] = coordinate i of a * z^j.
  mpq_class m[4][5];
  for (int j = 0; j < 4; ++j) {
    Cyclo zj;
    zj.c[j] = 1;
    Cyclo col = a * zj;
    for (int i = 0; i < 4; ++i) m[i][j] = col.c[i];
  }
  m[0][4] = 1;
  for (int col = 0; col < 4; ++col) {
    int piv = -1;
    for (int r = col; r < 4; ++r) {
      if (m[r][col] != 0) {
        piv = r;
        break;
      }
    }
    if (piv < 0) throw precondition_error("singular scalar inverse");
    for (int k = 0; k <= 4; ++k) std::swap(m[col][k], m[piv][k]);
    mpq_class d = m[col][col];
    for (int k = col; k <= 4; ++k) m[col][k] /= d;
    for (int r = 0; r < 4; ++r) {
      if (r == col || m[r][col] == 0) continue;
      mpq_class f = m[r][col];
      for (int k = col; k <= 4; ++k) m[r][k] -= f * m[col][k];
    }
  }
  Cyclo r;
  for (int i = 0; i < 4; ++i) r.c[i] = m[i][4];
  return r;
}

AppC operator+(const AppC& a, const AppC& b) {
  int bits = std::max(a.bits, b.bits);
  return AppC(mpf_class(a.re + b.re, bits), mpf_class(a.im + b.im, bits), bits);
}

AppC operator-(const AppC& a, const AppC& b) {
  int bits = std::max(a.bits, b.bits);
  return AppC(mpf_class(a.re - b.re, bits), mpf_class(a.im - b.im, bits), bits);
}

AppC operator-(const AppC& a) {
  return AppC(mpf_class(-a.re, a.bits), mpf_class(-a.im, a.bits), a.bits);
}

AppC operator*(const AppC& a, const AppC& b) {
  int bits = std::max(a.bits, b.bits);
  return AppC(mpf_class(a.re * b.re - a.im * b.im, bits),
              mpf_class(a.re * b.im + a.im * b.re, bits), bits);
}

mpf_class app_abs2(const AppC& a) {
  return mpf_class(a.re * a.re + a.im * a.im, a.bits);
}

AppC app_inv(const AppC& a) {
  mpf_class n = app_abs2(a);
  if (n == 0) throw precondition_error("division by zero scalar");
  return AppC(mpf_class(a.re / n, a.bits), mpf_class(-a.im / n, a.bits), a.bits);
}

AppC app_sqrt(const AppC& a) {
  int bits = a.bits;
  mpf_class r(0, bits);
  r = sqrt(sqrt(app_abs2(a)));
  if (r == 0) return AppC::zero(bits);
  // Half-angle construction avoiding trigonometry.
  mpf_class mod(0, bits);
  mod = sqrt(app_abs2(a));
  mpf_class s2(0, bits);
  s2 = (mod + a.re) / 2;
  mpf_class sre(0, bits);
  sre = sqrt(s2);
  if (sre != 0) {
    mpf_class sim(0, bits);
    sim = a.im / (2 * sre);
    return AppC(sre, sim, bits);
  }
  mpf_class sim(0, bits);
  sim = sqrt(mpf_class((mod - a.re) / 2, bits));
  if (a.im < 0) sim = -sim;
  return AppC(sre, sim, bits);
}

long promotion_count = 0;

void Scalar::check_same(const Scalar& a, const Scalar& b) {
  if (a.backend_ != b.backend_)
    throw precondition_error("scalar backend mismatch");
}

namespace {

// Promote the exact side of a mixed pair to the approx side's precision.
void promote_pair(Scalar& a, Scalar& b) {
  if (a.backend() == b.backend()) return;
  ++promotion_count;
  if (a.backend() == Backend::Exact)
    a = a.to_approx(b.approx_value().bits);
  else
    b = b.to_approx(a.approx_value().bits);
}

}  // namespace

bool Scalar::is_zero() const {
  if (backend_ == Backend::Exact) return ex_.is_zero();
  return ap_.re == 0 && ap_.im == 0;
}

mpq_class Scalar::rational_value() const {
  if (!is_rational()) throw precondition_error("scalar is not rational");
  return ex_.c[0];
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  Scalar x = a, y = b;
  promote_pair(x, y);
  if (x.backend_ == Backend::Exact) return Scalar(x.ex_ + y.ex_);
  return Scalar(x.ap_ + y.ap_);
}

Scalar operator-(const Scalar& a, const Scalar& b) {
  Scalar x = a, y = b;
  promote_pair(x, y);
  if (x.backend_ == Backend::Exact) return Scalar(x.ex_ - y.ex_);
  return Scalar(x.ap_ - y.ap_);
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  Scalar x = a, y = b;
  promote_pair(x, y);
  if (x.backend_ == Backend::Exact) return Scalar(x.ex_ * y.ex_);
  return Scalar(x.ap_ * y.ap_);
}

bool operator==(const Scalar& a, const Scalar& b) {
  if (a.backend_ != b.backend_) return false;
  if (a.backend_ == Backend::Exact) return a.ex_ == b.ex_;
  return a.ap_.re == b.ap_.re && a.ap_.im == b.ap_.im;
}

Scalar Scalar::operator-() const {
  if (backend_ == Backend::Exact) return Scalar(-ex_);
  return Scalar(-ap_);
}

Scalar Scalar::inv() const {
  if (backend_ == Backend::Exact) return Scalar(cyclo_inv(ex_));
  return Scalar(app_inv(ap_));
}

Scalar Scalar::pow(long e) const {
  Scalar base = e < 0 ? inv() : *this;
  unsigned long n = e < 0 ? -e : e;
  Scalar r(1);
  if (backend_ == Backend::Approx) r = Scalar(AppC(mpf_class(1, ap_.bits), mpf_class(0, ap_.bits), ap_.bits));
  while (n) {
    if (n & 1) r = r * base;
    base = base * base;
    n >>= 1;
  }
  return r;
}

Scalar Scalar::to_approx(int bits) const {
  if (bits <= 0) bits = default_prec_bits;
  mpf_class re(0, bits), im(0, bits);
  embed(re, im, bits);
  return Scalar(AppC(re, im, bits));
}

void Scalar::embed(mpf_class& re, mpf_class& im, int bits) const {
  if (backend_ == Backend::Approx) {
    re = mpf_class(ap_.re, bits);
    im = mpf_class(ap_.im, bits);
    return;
  }
  // zeta12 = (sqrt(3) + i) / 2.
  mpf_class s3(0, bits + 32);
  s3 = 3;
  s3 = sqrt(s3);
  mpf_class zr(0, bits + 32), zi(0, bits + 32);
  zr = s3 / 2;
  zi = mpf_class(1, bits + 32) / 2;
  mpf_class ar(0, bits + 32), ai(0, bits + 32), pr(0, bits + 32), pi(0, bits + 32);
  pr = 1;
  pi = 0;
  for (int k = 0; k < 4; ++k) {
    if (ex_.c[k] != 0) {
      mpf_class c(ex_.c[k], bits + 32);
      ar += c * pr;
      ai += c * pi;
    }
    mpf_class nr(0, bits + 32);
    nr = pr * zr - pi * zi;
    pi = pr * zi + pi * zr;
    pr = nr;
  }
  re = mpf_class(ar, bits);
  im = mpf_class(ai, bits);
}

bool scalar_less(const Scalar& a, const Scalar& b) {
  if (a == b) return false;
  int bits = 192;
  mpf_class ar, ai, br, bi;
  a.embed(ar, ai, bits);
  b.embed(br, bi, bits);
  mpf_class tol(0, 64);
  tol = 1;
  tol >>= 96;
  if (abs(ar - br) > tol) return ar < br;
  if (abs(ai - bi) > tol) return ai < bi;
  // Embeddings agree to high precision but values differ: fall back to a
  // stable coordinatewise order (exact backend only reaches here).
  if (a.is_exact() && b.is_exact()) {
    for (int i = 0; i < 4; ++i) {
      if (a.exact().c[i] != b.exact().c[i]) return a.exact().c[i] < b.exact().c[i];
    }
  }
  return ar < br || (ar == br && ai < bi);
}

bool scalar_close(const Scalar& a, const Scalar& b) {
  if (a.backend() == b.backend() && a.backend() == Backend::Exact) return a == b;
  int bits = std::min(a.is_exact() ? 1 << 20 : a.approx_value().bits,
                      b.is_exact() ? 1 << 20 : b.approx_value().bits);
  mpf_class ar, ai, br, bi;
  a.embed(ar, ai, bits + 16);
  b.embed(br, bi, bits + 16);
  mpf_class tol(0, 64);
  tol = 1;
  tol >>= std::min(bits - 8, 100);
  return abs(ar - br) <= tol && abs(ai - bi) <= tol;
}

namespace {

std::string mpf_str(const mpf_class& x) {
  mp_exp_t e = 0;
  std::string digits = x.get_str(e, 10, 48);
  if (digits.empty()) return "0";
  std::string sign;
  if (digits[0] == '-') {
    sign = "-";
    digits = digits.substr(1);
  }
  std::ostringstream out;
  out << sign << "0." << digits << "e" << e;
  return out.str();
}

mpf_class mpf_parse(const std::string& s, int bits) {
  mpf_class x(0, bits);
  if (x.set_str(s, 10) != 0) throw parse_error("bad float literal: " + s);
  return x;
}

}  // namespace

std::string Scalar::str() const {
  if (backend_ == Backend::Exact) {
    if (is_rational()) return ex_.c[0].get_str();
    std::ostringstream os;
    os << "cyc(" << ex_.c[0].get_str() << "," << ex_.c[1].get_str() << ","
       << ex_.c[2].get_str() << "," << ex_.c[3].get_str() << ")";
    return os.str();
  }
  std::ostringstream os;
  os << "(" << mpf_str(ap_.re) << "," << mpf_str(ap_.im) << ")@" << ap_.bits;
  return os.str();
}

Scalar Scalar::parse(const std::string& s) {
  if (s.empty()) throw parse_error("empty scalar literal");
  if (s[0] == '(') {
    auto comma = s.find(',');
    auto close = s.rfind(')');
    auto at = s.rfind('@');
    if (comma == std::string::npos || close == std::string::npos ||
        at == std::string::npos || at < close)
      throw parse_error("bad approx scalar literal: " + s);
    int bits = std::stoi(s.substr(at + 1));
    if (bits < 64) throw parse_error("approx precision below 64 bits");
    mpf_class re = mpf_parse(s.substr(1, comma - 1), bits);
    mpf_class im = mpf_parse(s.substr(comma + 1, close - comma - 1), bits);
    return Scalar(AppC(re, im, bits));
  }
  if (s.rfind("cyc(", 0) == 0) {
    if (s.back() != ')') throw parse_error("bad cyclotomic literal: " + s);
    std::string body = s.substr(4, s.size() - 5);
    Cyclo c;
    size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
      size_t comma = i < 3 ? body.find(',', pos) : body.size();
      if (comma == std::string::npos) throw parse_error("bad cyclotomic literal: " + s);
      try {
        c.c[i] = mpq_class(body.substr(pos, comma - pos));
      } catch (const std::invalid_argument&) {
        throw parse_error("bad cyclotomic literal: " + s);
      }
      c.c[i].canonicalize();
      pos = comma + 1;
    }
    return Scalar(c);
  }
  try {
    mpq_class q(s);
    q.canonicalize();
    return Scalar(q);
  } catch (const std::invalid_argument&) {
    throw parse_error("bad rational literal: " + s);
  }
}

Scalar Scalar::root_of_unity(int n, int k, int bits) {
  if (n <= 0) throw precondition_error("root of unity needs positive order");
  k %= n;
  if (k < 0) k += n;
  if (12 % n == 0) {
    int e = (12 / n) * k % 12;
    Cyclo z;
    z.c[1] = 1;
    Scalar zeta(z);
    return zeta.pow(e);
  }
  if (bits <= 0) bits = default_prec_bits;
  // cos/sin(2 pi k / n) by Taylor series around 0 after range reduction,
  // with pi from the Machin formula at extended precision.
  int wb = bits + 64;
  mpf_class pi(0, wb);
  {
    auto atan_inv = [&](unsigned long x) {
      mpf_class sum(0, wb), term(0, wb);
      term = 1;
      term /= x;
      mpf_class x2(0, wb);
      x2 = mpf_class(x, wb) * x;
      unsigned long d = 1;
      mpf_class limit(0, wb);
      limit = 1;
      limit >>= (wb + 8);
      int sign = 1;
      while (term > limit) {
        mpf_class t(0, wb);
        t = term / d;
        if (sign > 0)
          sum += t;
        else
          sum -= t;
        sign = -sign;
        term /= x2;
        d += 2;
      }
      return sum;
    };
    pi = 16 * atan_inv(5) - 4 * atan_inv(239);
  }
  mpf_class theta(0, wb);
  theta = 2 * pi * k;
  theta /= n;
  // Argument reduction: halve until |theta| < 1/8, then double back with
  // cos(2t) = 1 - 2 sin^2 t, sin(2t) = 2 sin t cos t.
  int halvings = 0;
  mpf_class bound(0, wb);
  bound = 1;
  bound /= 8;
  while (abs(theta) > bound) {
    theta /= 2;
    ++halvings;
  }
  mpf_class c(0, wb), si(0, wb), term(0, wb), t2(0, wb);
  t2 = theta * theta;
  c = 1;
  si = theta;
  term = 1;
  mpf_class limit(0, wb);
  limit = 1;
  limit >>= (wb + 8);
  mpf_class cterm(0, wb), sterm(0, wb);
  cterm = 1;
  sterm = theta;
  for (unsigned long m = 1; m < 100000; ++m) {
    cterm *= t2;
    cterm /= (2 * m - 1) * (2 * m);
    sterm *= t2;
    sterm /= (2 * m) * (2 * m + 1);
    if (m % 2 == 1) {
      c -= cterm;
      si -= sterm;
    } else {
      c += cterm;
      si += sterm;
    }
    if (cterm < limit && sterm < limit) break;
  }
  for (int h = 0; h < halvings; ++h) {
    mpf_class nc(0, wb), ns(0, wb);
    nc = 1 - 2 * si * si;
    ns = 2 * si * c;
    c = nc;
    si = ns;
  }
  return Scalar(AppC(mpf_class(c, bits), mpf_class(si, bits), bits));
}

bool rational_kth_root(const mpq_class& x, int k, mpq_class& out) {
  if (k <= 0) return false;
  mpq_class v = x;
  bool neg = v < 0;
  if (neg && k % 2 == 0) return false;
  if (neg) v = -v;
  mpz_class num = v.get_num(), den = v.get_den();
  mpz_class rn, rd;
  if (mpz_root(rn.get_mpz_t(), num.get_mpz_t(), k) == 0) return false;
  if (mpz_root(rd.get_mpz_t(), den.get_mpz_t(), k) == 0) return false;
  out = mpq_class(rn, rd);
  out.canonicalize();
  if (neg) out = -out;
  return true;
}

bool exact_sqrt(const mpq_class& x, Scalar& out) {
  if (x == 0) {
    out = Scalar(0L);
    return true;
  }
  static const int units[4] = {1, -1, 3, -3};
  for (int u : units) {
    mpq_class y = x / u;
    if (y <= 0) continue;
    mpz_class prod = y.get_num() * y.get_den();
    if (mpz_perfect_square_p(prod.get_mpz_t()) == 0) continue;
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), prod.get_mpz_t());
    mpq_class root(s, y.get_den());
    root.canonicalize();
    Scalar unit_root(1);
    if (u == 1) {
      unit_root = Scalar(1);
    } else if (u == -1) {
      unit_root = Scalar::root_of_unity(4, 1);  // i = zeta12^3
    } else {
      // sqrt(3) = zeta12 + zeta12^-1.
      Cyclo z;
      z.c[1] = 1;
      Scalar zeta(z);
      Scalar s3 = zeta + zeta.inv();
      unit_root = (u == 3) ? s3 : s3 * Scalar::root_of_unity(4, 1);
    }
    out = Scalar(root) * unit_root;
    return true;
  }
  return false;
}

}  // namespace qcurve
