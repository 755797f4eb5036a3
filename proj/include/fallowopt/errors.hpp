#pragma once

#include <stdexcept>
#include <string>

namespace fallowopt {

/// Raised when an argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a regularized problem admits no feasible schedule.
class Infeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when the ODE solver cannot make progress or a state leaves the
/// admissible region. Carries the last time at which the state was valid.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double last_valid_time)
        : std::runtime_error(what), last_valid_time_(last_valid_time) {}

    double last_valid_time() const noexcept { return last_valid_time_; }

private:
    double last_valid_time_;
};

}  // namespace fallowopt
