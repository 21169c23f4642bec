#include "mifc/error.hpp"

#include <utility>

namespace mifc {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kFormat: return "format";
        case ErrorKind::kValidation: return "validation";
        case ErrorKind::kParse: return "parse";
        case ErrorKind::kTransport: return "transport";
        case ErrorKind::kConfig: return "config";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

FormatError::FormatError(const std::string& message, std::size_t line)
    : Error(ErrorKind::kFormat,
            line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

ValidationError::ValidationError(std::string field, const std::string& message)
    : Error(ErrorKind::kValidation, "invalid field '" + field + "': " + message),
      field_(std::move(field)),
      detail_(message) {}

ParseError::ParseError(std::string where, const std::string& message)
    : Error(ErrorKind::kParse, where.empty() ? message : message + " (" + where + ")"),
      where_(std::move(where)) {}

TransportError::TransportError(const std::string& message, int status)
    : Error(ErrorKind::kTransport,
            status == 0 ? message : message + " (status " + std::to_string(status) + ")"),
      status_(status) {}

ConfigError::ConfigError(const std::string& message) : Error(ErrorKind::kConfig, message) {}

RenderError::RenderError(std::string placeholder)
    : Error(ErrorKind::kConfig, "unbound prompt placeholder {" + placeholder + "}"),
      placeholder_(std::move(placeholder)) {}

}  // namespace mifc
