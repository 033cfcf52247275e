#pragma once

#include "adjointkit/inverse.hpp"
#include "adjointkit/operator_core.hpp"

#include <json.hpp>

#include <string>

namespace adjointkit::io {

using Json = nlohmann::ordered_json;

/// Parses a JSON file. Throws InvalidArgument for unreadable or malformed input.
Json read_json_file(const std::string& path);

/// Operator record:
///   {"rows": m, "cols": n, "entries": [row-major reals],
///    "domain_metric": ..., "codomain_metric": ...}
/// A metric may be a flat row-major list of dim² reals, a nested list of
/// rows, or a list of dim reals (diagonal). Omitted means Euclidean.
DenseOperator operator_from_json(const Json& record);
Json operator_to_json(const DenseOperator& op);

/// A matrix given either as an operator record or as a nested list of rows.
Matrix matrix_from_json(const Json& value);
/// Nested list of rows.
Json matrix_to_json(const Matrix& m);

/// A vector given as a list or as {"entries": [...]}.
Vector vector_from_json(const Json& value);
Json vector_to_json(const Vector& v);

/// CSV with header i,sigma,coeff,ratio,cumsum.
std::string picard_csv(const PicardTable& table);

/// Fixed-point rendering with the given number of decimals.
std::string fixed(double value, int decimals);
/// Scientific rendering with three decimals, for diagnostics.
std::string sci(double value);

}  // namespace adjointkit::io
