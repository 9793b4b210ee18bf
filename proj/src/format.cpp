#include "dronecine/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "dronecine/errors.hpp"

namespace dronecine {

namespace {

void require_finite(double value) {
  if (!std::isfinite(value)) throw ExportError("refusing to serialize a non-finite number");
}

}  // namespace

std::string format_shortest(double value) {
  require_finite(value);
  if (value == 0.0) value = 0.0;  // no "-0"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int decimals) {
  require_finite(value);
  char buf[400];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  std::string out(buf, res.ptr);
  // Values that round to zero print without a sign.
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::unsupported_latitude: return "unsupported_latitude";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::degenerate_heading: return "degenerate_heading";
    case ErrorKind::zero_length: return "zero_length";
    case ErrorKind::out_of_bounds: return "out_of_bounds";
    case ErrorKind::parse: return "parse";
    case ErrorKind::version: return "version";
    case ErrorKind::integrity: return "integrity";
    case ErrorKind::export_failure: return "export";
    case ErrorKind::conflict: return "conflict";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace dronecine
