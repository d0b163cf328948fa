#pragma once

#include <stdexcept>
#include <string>

namespace larmor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a profile or special function.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A documented precondition of an operation was violated.
class PreconditionError : public Error {
  public:
    using Error::Error;
};

/// Evaluation requested at a point where the quantity is singular (e.g. omega = 0).
class SingularPointError : public Error {
  public:
    using Error::Error;
};

/// Coefficient extraction attempted outside the adiabatic regime.
class UnreliableExtractionError : public Error {
  public:
    using Error::Error;
};

/// A spectral distribution could not reach the requested tail tolerance.
class TruncationError : public Error {
  public:
    using Error::Error;
};

/// Malformed scenario configuration; carries the offending line and key.
class ConfigError : public Error {
  public:
    ConfigError(const std::string& message, int line = 0, std::string key = {})
        : Error(format(message, line, key)), line_(line), key_(std::move(key)) {}

    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

  private:
    static std::string format(const std::string& message, int line, const std::string& key) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += "key '" + key + "': ";
        return out + message;
    }

    int line_;
    std::string key_;
};

}  // namespace larmor
