#pragma once

// JSON serialization for every artifact type.  Output is byte-deterministic:
// objects dump with sorted keys and scalars use their canonical strings.
// Every reader throws parse_error on malformed input, so the CLI can map it
// to its exit code.

#include "qcurve/curve.hpp"
#include "qcurve/dmodule.hpp"
#include "qcurve/psdelta.hpp"
#include "qcurve/psdo.hpp"
#include "qcurve/quantize.hpp"

#include <json.hpp>

#include <string>

namespace qcurve {

using Json = nlohmann::json;

Json scalar_to_json(const Scalar& v);
Scalar scalar_from_json(const Json& j);

// Truncated Laurent series: {"top", "prec", "coeffs" (descending from top),
// "exact"}.
Json lseries_to_json(const LSeries& s);
LSeries lseries_from_json(const Json& j);

// hbar power series: {"cap": int | "exact", "coeffs" (ascending from hbar^0)}.
Json hseries_to_json(const HSeries& h);
HSeries hseries_from_json(const Json& j);

Json zseries_to_json(const ZSeries& s);
ZSeries zseries_from_json(const Json& j);

Json psdiffop_to_json(const PsDiffOp& a);
PsDiffOp psdiffop_from_json(const Json& j, int xcap = 16);

Json grpoint_to_json(const GrPoint& v);
GrPoint grpoint_from_json(const Json& j);

Json wmatrix_to_json(const WMatrix& m);
WMatrix wmatrix_from_json(const Json& j);

Json qpair_to_json(const QuantumPair& pair);
QuantumPair qpair_from_json(const Json& j, int xcap = 16);

Json diagseq_to_json(const DiagonalSeq& d);
DiagonalSeq diagseq_from_json(const Json& j);

Json psdeltaop_to_json(const PsDeltaOp& a);
PsDeltaOp psdeltaop_from_json(const Json& j);

Json flag_to_json(const Flag& f);
Flag flag_from_json(const Json& j);

Json dpair_to_json(const DiscretePair& pair);
DiscretePair dpair_from_json(const Json& j);

// Curve data; the basis may be given explicitly or as a rational
// parameterization {"parameterization": {"f", "g"}}.
CurveDataODE curve_ode_from_json(const Json& j, int depth);
CurveDataDiff curve_diff_from_json(const Json& j);

Json connection_to_json(const Connection& c);
Connection connection_from_json(const Json& j);

// Rational functions of z with hbar-polynomial coefficients as canonical
// expression strings; the parser accepts integers, z, h, + - * / ^ and
// parentheses, so printed strings round-trip.
std::string zrat_str(const ZRat& a);
ZRat zrat_parse(const std::string& s);

Json scalar_op_to_json(const ScalarOperator& op);
ScalarOperator scalar_op_from_json(const Json& j);

Json diagonalize_to_json(const DiagonalizeResult& d);
Json newton_to_json(const NewtonPolygon& np);

// Canonical dump (sorted keys, two-space indent, trailing newline).
std::string dump_json(const Json& j);
Json parse_json_text(const std::string& text);

}  // namespace qcurve
