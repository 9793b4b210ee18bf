#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dronecine {

enum class ErrorKind {
  invalid_argument,
  unsupported_latitude,
  insufficient_data,
  degenerate_heading,
  zero_length,
  out_of_bounds,
  parse,
  version,
  integrity,
  export_failure,
  conflict,
  not_found,
  io,
};

std::string_view to_string(ErrorKind kind);

// Base for every error raised by the library. `field` names the offending
// input (a flag, a JSON path, an id) when one is known.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {})
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

#define DRONECINE_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& message, std::string field = {})        \
        : Error(ErrorKind::Kind, message, std::move(field)) {}               \
  };

DRONECINE_DEFINE_ERROR(InvalidArgument, invalid_argument)
DRONECINE_DEFINE_ERROR(UnsupportedLatitude, unsupported_latitude)
DRONECINE_DEFINE_ERROR(InsufficientData, insufficient_data)
DRONECINE_DEFINE_ERROR(DegenerateHeading, degenerate_heading)
DRONECINE_DEFINE_ERROR(ZeroLength, zero_length)
DRONECINE_DEFINE_ERROR(OutOfBounds, out_of_bounds)
DRONECINE_DEFINE_ERROR(ParseError, parse)
DRONECINE_DEFINE_ERROR(VersionError, version)
DRONECINE_DEFINE_ERROR(IntegrityError, integrity)
DRONECINE_DEFINE_ERROR(ExportError, export_failure)
DRONECINE_DEFINE_ERROR(ConflictError, conflict)
DRONECINE_DEFINE_ERROR(NotFound, not_found)
DRONECINE_DEFINE_ERROR(IoError, io)

#undef DRONECINE_DEFINE_ERROR

}  // namespace dronecine
