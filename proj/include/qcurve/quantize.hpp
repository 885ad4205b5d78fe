#pragma once

// Quantization of companion matrices.
//
// A companion matrix M is a q x q matrix of polynomials in w (blockwise
// s x s).  Substituting w = z^q and twisting rows and columns by powers of z
// yields the coefficient matrix B(z) of the branch equation
//   hbar d/dz^q u_i + u_i b = sum_j B[i][j] u_j,
// solved order by order in 1/z for each eigenvalue branch of the leading
// term.  The solutions generate a Grassmannian point whose dressing operator
// turns the branch data into a pair (P, Q) of differential operators with
// [P, Q] = hbar.

#include "qcurve/eigen.hpp"
#include "qcurve/psdo.hpp"
#include "qcurve/series.hpp"
#include "qcurve/smat.hpp"

#include <vector>

namespace qcurve {

// Exact polynomial in w with s x s matrix coefficients.
using WPoly = Series<SMat>;

// Entries are stored as e[r][c]; the action on the preferred basis reads
// off columns: image of v_c = sum_r e[r][c] v_r.
struct WMatrix {
  int q = 0;
  int s = 1;
  std::vector<std::vector<WPoly>> e;

  static WMatrix zero(int q, int s = 1) {
    WMatrix m;
    m.q = q;
    m.s = s;
    m.e.assign(q, std::vector<WPoly>(q));
    return m;
  }
  // Scalar-entry convenience: set e[r][c] += coef * w^deg.
  void add(int r, int c, int deg, const Scalar& coef);

  friend bool operator==(const WMatrix& a, const WMatrix& b);
};

struct BMatrix {
  int q = 1;
  int s = 1;
  int p = 0;  // leading z-degree
  Scalar hbar;
  std::vector<std::vector<Series<SMat>>> entry;  // entry[i][j], Laurent in z
  SMat sigma;  // scalar part of the leading coefficient (q x q)
};

BMatrix build_b_matrix(const WMatrix& m, const Scalar& hbar, int bits = 0);

struct RegularityReport {
  bool regular = false;
  bool scalar_blocks = false;  // leading term has the form sigma x I_s
  int p = 0;
  std::vector<Scalar> eigenvalues;
  bool cyclic_applicable = false;  // gcd(p, q) = 1
  bool cyclic_relation = false;    // alpha_{k+1} = eps^p alpha_k
};

RegularityReport regularity_check(const WMatrix& m, int bits = 0);

struct DegreeBoundReport {
  bool ok = false;
  int p = 0;
  std::vector<int> degrees;  // deg_w A_i, -1 for zero
  std::vector<int> bounds;   // floor(p (q - i) / q)
};

// Checks deg_w A_i <= floor(p(q-i)/q) for det(M - lambda) = sum A_i lambda^i.
DegreeBoundReport degree_bound_check(const WMatrix& m);

struct QuantumPair {
  PsDiffOp p_op{1};
  PsDiffOp q_op{1};
  Scalar hbar;
  int q = 1;
  int s = 1;
};

struct QuantizeOptions {
  int window = 32;      // tracked 1/z orders of the branch recursion
  int xcap = 16;        // x-degree cap for operator algebra
  int sato_depth = 0;   // dressing recovery depth; 0 picks window / 2
  int bits = 0;         // precision for escalated eigenvalue branches
};

// Branch data exposed for cross-checks against the diagonalization route.
struct BranchData {
  Scalar alpha;
  int p = 0;
  std::vector<SMat> b;               // b[m] = coefficient of z^{p-m}
  std::vector<std::vector<SMat>> u;  // u[m][i] = coefficient of z^{-m}
};

BranchData quantize_branch(const WMatrix& m, const Scalar& hbar, int branch,
                           const QuantizeOptions& opt = {});

QuantumPair quantize(const WMatrix& m, const Scalar& hbar, int branch,
                     const QuantizeOptions& opt = {});

// Companion matrix of a verified pair, computed in the canonical basis of
// the dressing of Q and normalized by the canonical diagonal gauge.
WMatrix companion_matrix(const QuantumPair& pair, int depth = 24);

// M' = g M g^{-1} + hbar (dg/dw) g^{-1}; g must be unimodular (polynomial
// inverse).  Blocksize 1 only.
WMatrix gauge_transform(const WMatrix& m, const WMatrix& g, const Scalar& hbar);

// First-order flow in the nilpotent time t: Q <- Q + t [ (Q^{n/q})_+, Q ],
// with P transported through the dressed picture.  The first-order
// compatibility [P1, Q] + [P, Q1] = 0 is verified before returning.
QuantumPair kp_flow_step(const QuantumPair& pair, int n, const Scalar& t,
                         int depth = 16);

// [P, Q] - hbar; the zero operator means the pair is verified.
PsDiffOp verify_pair(const PsDiffOp& p_op, const PsDiffOp& q_op, const Scalar& hbar);

}  // namespace qcurve
