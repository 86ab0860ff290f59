#include "convhom/common.hpp"

namespace convhom {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::usage: return "usage";
    case ErrorKind::assembly: return "assembly";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::spectral: return "spectral";
    case ErrorKind::contour: return "contour";
    case ErrorKind::solver: return "solver";
    case ErrorKind::model: return "model";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string stage, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error [" + stage + "]: " + message),
      kind_(kind),
      stage_(std::move(stage)) {}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::configuration:
    case ErrorKind::usage:
      return 2;
    default:
      return 3;
  }
}

void raise(ErrorKind kind, std::string stage, const std::string& message) {
  throw Error(kind, std::move(stage), message);
}

}  // namespace convhom
