#pragma once

#include <string>

#include <json.hpp>

#include "melkit/generators.hpp"
#include "melkit/melnikov.hpp"
#include "melkit/reduced_expr.hpp"
#include "melkit/simulate.hpp"

namespace melkit {

using Json = nlohmann::json;

// Wire formats. Rationals travel as "p/q" strings, polynomials as
// lowest-power-first coefficient arrays, tails as {m, coeffs} records.

Json to_json(const Rational& r);
Rational rational_from_json(const Json& j);

Json to_json(const PolyH& p);
PolyH poly_from_json(const Json& j);

Json to_json(const AlgebraicTail& t);
AlgebraicTail tail_from_json(const Json& j);

Json to_json(const ReducedExpr& e);
ReducedExpr reduced_expr_from_json(const Json& j);

Json to_json(const PerturbationSpec& s);
PerturbationSpec spec_from_json(const Json& j);

Json to_json(const GeneratorConstants& k);
GeneratorConstants constants_from_json(const Json& j);

Json to_json(const ZeroReport& r);
Json to_json(const StructureReport& r);
Json to_json(const BasisCrossCheck& r);
Json to_json(const CycleReport& r);

PerturbationSpec load_spec_file(const std::string& path);

} // namespace melkit
