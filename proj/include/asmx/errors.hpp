#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asmx {

/// Invalid argument to a model or analysis (empty vector, out-of-range value).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A root-find or fixed-point iteration failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration file problem. `line()` is 0 when the error has no source line
/// (e.g. a required key that is missing altogether).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& origin, std::size_t line, const std::string& message)
        : std::runtime_error(format(origin, line, message)), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& origin, std::size_t line,
                              const std::string& message) {
        std::string out = origin;
        if (line > 0) {
            out += ":" + std::to_string(line);
        }
        return out + ": " + message;
    }

    std::size_t line_;
};

}  // namespace asmx
