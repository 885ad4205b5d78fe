#pragma once

// Pseudodifference operators.  An operator is a sum of terms a(s) Lambda^s
// where a(s) is a diagonal operator acting on sequences indexed by the
// integers and Lambda shifts a sequence by one step.  On Laurent series the
// shift acts as multiplication by z and diag(a) scales the coefficient of
// z^k by a_k.  Entries are truncated power series in the deformation
// parameter hbar, so the same algebra serves exact pairs (constant entries)
// and formal e^hbar deformations.

#include "qcurve/hseries.hpp"
#include "qcurve/series.hpp"

#include <map>
#include <vector>

namespace qcurve {

// Laurent series in z with hbar-series coefficients.
using ZSeries = Series<HSeries>;

// Diagonal sequence a_k, either explicit on an index window (loud failure
// outside) or periodic-geometric: a_{k+period} = mult * a_k for all k.
class DiagonalSeq {
 public:
  DiagonalSeq() : entries_(1) {}

  static DiagonalSeq constant(const HSeries& v) {
    return periodic(1, {v}, HSeries(Scalar(1)));
  }
  static DiagonalSeq explicit_window(int lo, std::vector<HSeries> entries);
  static DiagonalSeq periodic(int period, std::vector<HSeries> base,
                              const HSeries& mult);

  bool is_explicit() const { return explicit_; }
  bool is_zero() const;
  bool is_constant() const;
  // Trusted index range; explicit windows are finite.
  bool unbounded() const { return !explicit_; }
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(entries_.size()) - 1; }
  bool trusted(int k) const { return !explicit_ || (k >= lo() && k <= hi()); }
  HSeries at(int k) const;

  int period() const { return period_; }
  const HSeries& mult() const { return mult_; }

  DiagonalSeq shifted(int s) const;  // b_k = a_{k-s}
  DiagonalSeq entries_inverted() const;  // entrywise inverse
  DiagonalSeq scaled(const HSeries& c) const;
  DiagonalSeq operator-() const { return scaled(HSeries(Scalar(-1))); }
  friend DiagonalSeq operator+(const DiagonalSeq& a, const DiagonalSeq& b);
  friend DiagonalSeq operator-(const DiagonalSeq& a, const DiagonalSeq& b) {
    return a + (-b);
  }
  friend DiagonalSeq operator*(const DiagonalSeq& a, const DiagonalSeq& b);
  friend bool operator==(const DiagonalSeq& a, const DiagonalSeq& b);

 private:
  bool explicit_ = false;
  int lo_ = 0;                    // explicit: first index of entries_
  int period_ = 1;                // periodic: period
  HSeries mult_{Scalar(1)};       // periodic: geometric multiplier
  std::vector<HSeries> entries_;  // explicit: window; periodic: base at 0..period-1

  void trim_window();
};

class PsDeltaOp {
 public:
  static constexpr int kExactFloor = std::numeric_limits<int>::min() / 2;

  PsDeltaOp() = default;

  static PsDeltaOp identity() { return shift_op(0); }
  static PsDeltaOp shift_op(int s);  // Lambda^s
  static PsDeltaOp from_term(int s, const DiagonalSeq& a);

  bool is_zero() const { return terms_.empty(); }
  bool exact() const { return floor_ <= kExactFloor; }
  int floor() const { return floor_; }
  int order() const;  // top shift; throws on the zero operator
  DiagonalSeq coeff(int s) const;
  void set_term(int s, const DiagonalSeq& a);
  const std::map<int, DiagonalSeq>& terms() const { return terms_; }

  // Monic of order n: leading diagonal is the constant 1.
  bool is_monic() const;

  PsDeltaOp plus_part() const;   // shifts >= 0
  PsDeltaOp minus_part() const;  // shifts < 0
  PsDeltaOp restricted(int floor) const;
  PsDeltaOp scaled(const HSeries& c) const;
  PsDeltaOp operator-() const { return scaled(HSeries(Scalar(-1))); }
  friend PsDeltaOp operator+(const PsDeltaOp& a, const PsDeltaOp& b);
  friend PsDeltaOp operator-(const PsDeltaOp& a, const PsDeltaOp& b) {
    return a + (-b);
  }
  friend PsDeltaOp operator*(const PsDeltaOp& a, const PsDeltaOp& b);

  // Action on a Laurent series in z.
  ZSeries apply(const ZSeries& f) const;

  // Neumann inverse for operators with an invertible leading diagonal,
  // tracked down to `depth` orders below the leading shift.
  PsDeltaOp inverted(int depth) const;

  bool equal_on_window(const PsDeltaOp& o) const;

 private:
  std::map<int, DiagonalSeq> terms_;
  int floor_ = kExactFloor;  // lowest trusted shift

  void trim();
};

PsDeltaOp commutator(const PsDeltaOp& a, const PsDeltaOp& b);

// Flag in the space of Laurent series: generators w_m = z^m + lower-order
// tail for m in [-depth, depth].  gen[i] stores w_{i-depth}.
struct Flag {
  int depth = 0;
  std::vector<ZSeries> gen;

  const ZSeries& at(int m) const { return gen.at(m + depth); }
};

Flag flag_from_dressing(const PsDeltaOp& s, int depth);
PsDeltaOp dressing_from_flag(const Flag& f);

struct UndressResult {
  PsDeltaOp s;          // monic order 0 with s L = Lambda^n s
  bool invertible;      // whether L^{-1} closes as a difference operator
                        // within the inspection window
  PsDeltaOp l_inverse;  // meaningful when invertible
};

// depth: number of dressing orders; width: diagonal index half-window.
UndressResult undress_difference(const PsDeltaOp& l_op, int depth, int width);

struct DiscretePair {
  PsDeltaOp k_op;
  PsDeltaOp l_op;
  HSeries lambda{Scalar(1)};
  int p = 0;
  int n = 1;
  bool l_invertible = true;  // L^{-1} closes as a difference operator
};

// KL - lambda LK; the zero operator means the pair is verified.
PsDeltaOp verify_discrete(const PsDeltaOp& k_op, const PsDeltaOp& l_op,
                          const HSeries& lambda);

// Companion matrix of K in the canonical z^{+-n}-basis of the flag of L.
// Requires an invertible L; entries are Laurent polynomials in w = z^n.
struct WMatrix;
WMatrix discrete_companion(const DiscretePair& pair, int depth, int width);

struct DiscreteOptions {
  int window = 16;  // tracked 1/z orders of the recursion
  int depth = 0;    // dressing orders; 0 picks window
  int width = 0;    // diagonal index half-window; 0 picks a scaled default
  int bits = 0;     // precision for escalated eigenvalue branches
};

// All residue-to-eigenvalue assignments compatible with the leading
// equation, in lexicographic order; each entry maps residue i to an
// eigenvalue index of the leading term.
std::vector<std::vector<int>> discrete_branches(const WMatrix& m, const HSeries& lambda,
                                                int bits = 0);

DiscretePair discrete_quantize(const WMatrix& m, const HSeries& lambda,
                               const std::vector<int>& assign,
                               const DiscreteOptions& opt = {});

// Formal deformation of a commuting pair to K L = e^hbar L K with the same
// companion matrix, truncated at hbar^hcap.
DiscretePair hbar_deform(const DiscretePair& pair, int hcap,
                         const DiscreteOptions& opt = {});

// First-order discrete KP flow: L <- L + t [ (L^{m/n})_+, L ].
PsDeltaOp dkp_flow_step(const PsDeltaOp& l_op, int m, const Scalar& t, int depth,
                        int width);

}  // namespace qcurve
