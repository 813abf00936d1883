#pragma once

#include <stdexcept>
#include <string>

namespace hmf {

enum class ErrorKind {
    InvalidField,
    UnsupportedDegree,
    Domain,
    Pole,
    Numeric,
    Accuracy,
    Inconsistency,
    Resource,
    AmbiguousClassification,
    DegenerateAngle,
    NonIntegrable,
    Unsupported,
    Config,
    Usage
};

const char* error_kind_name(ErrorKind kind) noexcept;

/// Exception carrying a machine-readable kind; every module error is one of these.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace hmf
