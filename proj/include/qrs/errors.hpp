// errors.hpp: exception types shared by every qrs module

#pragma once

#include <stdexcept>
#include <string>

namespace qrs {

enum class ErrorKind {
    InvalidParameters,
    NoCriticalPoint,
    ComplexEnergy,
    Divergent,
    BelowCritical,
    InsufficientWindow,
    DomainError,
    DimensionOverflow,
    NoConvergence,
    EmptySubspace,
    NoRoot,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidParameters: return "InvalidParameters";
        case ErrorKind::NoCriticalPoint: return "NoCriticalPoint";
        case ErrorKind::ComplexEnergy: return "ComplexEnergy";
        case ErrorKind::Divergent: return "Divergent";
        case ErrorKind::BelowCritical: return "BelowCritical";
        case ErrorKind::InsufficientWindow: return "InsufficientWindow";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::DimensionOverflow: return "DimensionOverflow";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::EmptySubspace: return "EmptySubspace";
        case ErrorKind::NoRoot: return "NoRoot";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace qrs
