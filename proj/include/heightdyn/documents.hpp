#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"

#include "heightdyn/coefficients.hpp"
#include "heightdyn/height_machine.hpp"
#include "heightdyn/int_matrix.hpp"
#include "heightdyn/picard_lattice.hpp"

namespace heightdyn {

using Json = nlohmann::ordered_json;

// Every parser reports failures as ParseError carrying the JSON path of the
// offending value, rooted at `path`.

QuadraticNumber parse_scalar(const Json& j, const std::string& path = "$");
Rational parse_rational(const Json& j, const std::string& path = "$");
Json to_json(const QuadraticNumber& x);

PicardLattice parse_lattice(const Json& j, const std::string& path = "$");
Json to_json(const PicardLattice& lattice);

/// { "matrix": [[scalar]] }
PullbackMap parse_pullback(const Json& j, const std::string& path = "$");
Json to_json(const PullbackMap& map);

/// { "coeffs": [scalar] } or a bare array.
DivisorClass parse_divisor(const Json& j, const std::string& path = "$");
Json to_json(const DivisorClass& divisor);

/// { "signature": [int], "targets": [[ {"terms": [{"c": int, "e": [int]}]} ]] }
MultiHomogeneousMap parse_morphism(const Json& j, const std::string& path = "$");
Json to_json(const MultiHomogeneousMap& map);

/// [[x0, x1, ...], ...] or { "point": [...] }; coordinates are integers or
/// decimal strings.
MultiPoint parse_point(const Json& j, const std::string& path = "$");
Json to_json(const RationalProjectivePoint& point);
Json to_json(const MultiPoint& point);

/// [[int]] or { "matrix": [[int]] }.
IntMatrix parse_int_matrix(const Json& j, const std::string& path = "$");
Json to_json(const IntMatrix& matrix);

Json to_json(const CoefficientResult& result);

using Document = std::variant<PicardLattice, PullbackMap, DivisorClass, MultiHomogeneousMap>;

/// Parses text and dispatches on its shape: "cone" → lattice, "matrix" →
/// pullback, "coeffs" or an array → divisor, "signature" → morphism.
Document parse_document(std::string_view text);
Json parse_json(std::string_view text);
Json to_json(const Document& doc);

}  // namespace heightdyn
