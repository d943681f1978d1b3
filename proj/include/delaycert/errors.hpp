#pragma once

#include <stdexcept>
#include <string>

namespace delaycert {

/// Non-finite values or an unreachable tolerance inside a numerical routine.
class NumericDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A history was queried beyond the time it has been computed to.
class OutOfRangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Input violates a documented precondition (shape, sign pattern, ...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A lower bound of the iterative bounding scheme reached zero.
class BoundCollapseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// State became non-finite during integration.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double time, const std::string& what)
        : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace delaycert
