#pragma once

// Genus-zero curve data: a space of meromorphic functions described by an
// explicit Laurent basis or by a rational parameterization, together with
// the expansions of the function pair (f, g) at the marked point.  The
// companion matrix of multiplication by f in the g-basis of that space is
// what the quantization pipelines consume.

#include "qcurve/psdelta.hpp"
#include "qcurve/quantize.hpp"

#include <string>
#include <vector>

namespace qcurve {

// Evaluates a rational-function expression (integers, + - * / ^ and
// parentheses over one variable) at a Laurent-series value of the variable,
// tracking `terms` coefficients below each leading exponent.
LSeries eval_rational_expr(const std::string& expr, const std::string& var,
                           const LSeries& value, int terms);

struct RationalParam {
  std::string f;  // rational function of t
  std::string g;  // polynomial in t, monic of degree q
};

// Differential-side curve data.  The space is spanned by the basis over
// C[w] with w = g = z^q in the local coordinate z; basis[m] = z^m + strictly
// negative tail (normal form).
struct CurveDataODE {
  int q = 1;
  LSeries f;
  std::vector<LSeries> basis;
};

// Difference-side curve data.  The flag generators s_m = z^m + lower tail
// span a space invariant under multiplication by f, g and g^{-1}, g = z^n.
struct CurveDataDiff {
  int n = 1;
  ZSeries f;
  Flag flag;
};

// Expands a rational parameterization at t = infinity in the coordinate z
// with z^q = g(t).  The basis lists the expansions of 1, t, ..., t^{q-1}
// reduced to normal form; depth bounds the tracked orders below each
// leading term.
CurveDataODE curve_data_from_param(const RationalParam& par, int q, int depth);

// Companion matrix of multiplication by f in the basis {v_0 .. v_{q-1}}
// over C[w].  Throws residual_error when the expansion of some f v_j does
// not close over the basis within the tracked window.
WMatrix curve_companion_ode(const CurveDataODE& data, int depth);

// Companion matrix of multiplication by f in the z^{+-n}-basis of the flag;
// entries are Laurent polynomials in w = z^n with degrees in [-depth, depth].
WMatrix curve_companion_diff(const CurveDataDiff& data, int depth);

// Pipeline composition: companion matrix of the curve, then quantization.
QuantumPair quantize_from_curve(const CurveDataODE& data, const Scalar& hbar,
                                int branch, const QuantizeOptions& opt = {});
DiscretePair quantize_from_curve(const CurveDataDiff& data, const HSeries& lambda,
                                 const std::vector<int>& assign,
                                 const DiscreteOptions& opt = {});

}  // namespace qcurve
