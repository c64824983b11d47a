#pragma once

#include <stdexcept>
#include <string>

namespace chaintrace {

// Coarse failure classes, mapped to CLI exit codes by the tool layer.
enum class ErrorKind {
    Usage,     // bad flags / bad invocation
    Data,      // malformed or inconsistent input files
    Transport, // retryable network failure
    Service,   // non-retryable rejection from a remote service
    Internal,  // bug or broken environment
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error data_error(std::string message) { return Error(ErrorKind::Data, std::move(message)); }
inline Error usage_error(std::string message) { return Error(ErrorKind::Usage, std::move(message)); }

const char* to_string(ErrorKind kind) noexcept;

} // namespace chaintrace
