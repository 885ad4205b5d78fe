#pragma once

// Scalar arithmetic for the operator calculus.
//
// Two backends, never mixed silently:
//   * Exact    -- elements of Q(zeta), zeta a primitive 12th root of unity,
//                 stored as four GMP rationals.  Plain rationals are the
//                 degree-zero case.  Covers the roots of unity +-1, +-i,
//                 omega needed by the symmetric branch structure (orders
//                 dividing 12), and square roots of -1, 3, -3.
//   * Approx   -- complex floating point at a recorded bit precision
//                 (default 256 bits), used only when exact root extraction
//                 fails inside the eigenvalue kernel.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qcurve {

// Error taxonomy shared by the whole library.  The CLI maps these to exit
// codes: parse_error -> 1, precondition_error -> 2, residual_error -> 3.
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct residual_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Backend { Exact, Approx };

inline int default_prec_bits = 256;

// Mixed-backend arithmetic promotes the exact operand to the approx
// operand's precision; every promotion is counted here so conversions stay
// observable.  Approx values are never demoted.
extern long promotion_count;

// Element of Q(zeta12) as c0 + c1 z + c2 z^2 + c3 z^3 with z^4 = z^2 - 1.
struct Cyclo {
  std::array<mpq_class, 4> c;

  Cyclo() = default;
  explicit Cyclo(const mpq_class& r) { c[0] = r; }

  bool is_zero() const;
  bool is_rational() const { return c[1] == 0 && c[2] == 0 && c[3] == 0; }
};

Cyclo operator+(const Cyclo& a, const Cyclo& b);
Cyclo operator-(const Cyclo& a, const Cyclo& b);
Cyclo operator-(const Cyclo& a);
Cyclo operator*(const Cyclo& a, const Cyclo& b);
bool operator==(const Cyclo& a, const Cyclo& b);
Cyclo cyclo_inv(const Cyclo& a);

// Complex floating point value with explicit precision in bits.
struct AppC {
  mpf_class re, im;
  int bits = 0;

  AppC() : re(0, 64), im(0, 64), bits(64) {}
  AppC(const mpf_class& r, const mpf_class& i, int b) : re(r), im(i), bits(b) {}
  static AppC zero(int b) { return AppC(mpf_class(0, b), mpf_class(0, b), b); }
};

AppC operator+(const AppC& a, const AppC& b);
AppC operator-(const AppC& a, const AppC& b);
AppC operator-(const AppC& a);
AppC operator*(const AppC& a, const AppC& b);
AppC app_inv(const AppC& a);
mpf_class app_abs2(const AppC& a);
AppC app_sqrt(const AppC& a);

class Scalar {
 public:
  Scalar() : backend_(Backend::Exact) {}
  Scalar(long n) : backend_(Backend::Exact), ex_(mpq_class(n)) {}
  Scalar(const mpq_class& q) : backend_(Backend::Exact), ex_(q) {}
  explicit Scalar(const Cyclo& c) : backend_(Backend::Exact), ex_(c) {}
  explicit Scalar(const AppC& a) : backend_(Backend::Approx), ap_(a) {}

  static Scalar rational(long num, long den) {
    mpq_class q(num, den);
    q.canonicalize();
    return Scalar(q);
  }
  // Primitive n-th root of unity to the k-th power; exact for n | 12,
  // approximate (at `bits`) otherwise.
  static Scalar root_of_unity(int n, int k, int bits = 0);

  Backend backend() const { return backend_; }
  bool is_exact() const { return backend_ == Backend::Exact; }
  bool is_zero() const;
  bool is_rational() const { return is_exact() && ex_.is_rational(); }

  const Cyclo& exact() const { return ex_; }
  const AppC& approx_value() const { return ap_; }
  mpq_class rational_value() const;

  // Conversion Exact -> Approx at the given precision (bits <= 0 uses the
  // library default).  Converting an Approx value re-rounds.
  Scalar to_approx(int bits = 0) const;

  Scalar operator-() const;
  Scalar inv() const;
  Scalar pow(long e) const;

  std::string str() const;          // canonical serialized form
  static Scalar parse(const std::string& s);

  // Numeric embedding used for canonical ordering (zeta12 = e^{i pi/6}).
  void embed(mpf_class& re, mpf_class& im, int bits = 128) const;

  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend bool operator==(const Scalar& a, const Scalar& b);

 private:
  Backend backend_;
  Cyclo ex_;
  AppC ap_;

  static void check_same(const Scalar& a, const Scalar& b);
};

inline Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inv(); }
inline bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

// Lexicographic order on the (re, im) embedding; exact ties are resolved
// exactly.  Used wherever branch enumerations must be deterministic.
bool scalar_less(const Scalar& a, const Scalar& b);

// Values considered equal: exactly for the exact backend, within 1e-30
// (or the tolerance implied by the precision) for the approx backend.
bool scalar_close(const Scalar& a, const Scalar& b);

// Square root of a rational scalar if it exists inside Q(zeta12)
// (i.e. rational * sqrt(u) with u in {1, -1, 3, -3}); returns false otherwise.
bool exact_sqrt(const mpq_class& x, Scalar& out);

// Exact k-th root of a rational if the root is itself rational.
bool rational_kth_root(const mpq_class& x, int k, mpq_class& out);

}  // namespace qcurve
