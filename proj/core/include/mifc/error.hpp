#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mifc {

/// Broad failure classes. The CLI maps each one onto a distinct exit code.
enum class ErrorKind {
    kFormat,      // malformed input bytes (bad JSON, bad UTF-8)
    kValidation,  // well-formed input that breaks an invariant
    kParse,       // LLM output that does not follow the mandated grammar
    kTransport,   // provider / network failure
    kConfig,      // bad configuration, missing env, bad CLI usage
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class FormatError : public Error {
public:
    FormatError(const std::string& message, std::size_t line = 0);
    /// 1-based line number; 0 when not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }
    /// Message without the field prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string field_;
    std::string detail_;
};

class ParseError : public Error {
public:
    /// `where` is the marker name (e.g. "###Answer") or a byte offset rendered as text.
    ParseError(std::string where, const std::string& message);
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

class TransportError : public Error {
public:
    TransportError(const std::string& message, int status = 0);
    /// Last HTTP status seen, 0 for connection-level failures.
    int status() const noexcept { return status_; }

private:
    int status_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message);
};

/// A prompt template was rendered with a placeholder left unbound.
class RenderError : public Error {
public:
    explicit RenderError(std::string placeholder);
    const std::string& placeholder() const noexcept { return placeholder_; }

private:
    std::string placeholder_;
};

}  // namespace mifc
