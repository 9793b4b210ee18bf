#pragma once

#include <string>

namespace dronecine {

/// Shortest decimal text that parses back to the same double.
std::string format_shortest(double value);

/// Fixed-point text with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Both formatters throw ExportError for NaN or infinity.

}  // namespace dronecine
