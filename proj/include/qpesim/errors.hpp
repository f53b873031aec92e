#pragma once

#include <stdexcept>
#include <string>

namespace qpesim {

/// A numeric routine (eigensolver, fit) failed to converge or produced
/// results outside its accuracy contract. The message carries diagnostics.
class NumericFailure : public std::runtime_error {
public:
    explicit NumericFailure(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested problem size exceeds the desk-scale budget of the simulator.
class ResourceLimit : public std::runtime_error {
public:
    explicit ResourceLimit(const std::string& msg) : std::runtime_error(msg) {}
};

/// A hard runtime invariant was violated; the message names the invariant
/// and the offending configuration.
class InvariantViolation : public std::runtime_error {
public:
    explicit InvariantViolation(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qpesim
