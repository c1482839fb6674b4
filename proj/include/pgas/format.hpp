#pragma once

#include <string>
#include <string_view>

namespace pgas {

/// Shortest decimal that parses back to the same double; infinities are
/// written "inf" / "-inf" and NaN as "nan".
std::string format_double(double v);

/// Inverse of format_double; also accepts "+inf". Throws SchemaError.
double parse_double(std::string_view text);

}  // namespace pgas
