#pragma once

#include <stdexcept>
#include <string>

namespace becor {

// Invalid numeric input (out-of-range probability, loading, parameter).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension or shape mismatch between containers/matrices.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Problem size exceeds what an algorithm enumerates.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite value produced during evaluation.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require_domain(bool cond, const std::string& msg) {
    if (!cond) throw DomainError(msg);
}

inline void require_shape(bool cond, const std::string& msg) {
    if (!cond) throw ShapeError(msg);
}

} // namespace becor
