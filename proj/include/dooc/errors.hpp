#pragma once

#include <stdexcept>
#include <string>

namespace dooc {

// Raised when a scenario or a sub-configuration violates its invariants.
// Simulation never starts once one of these is thrown.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the integrated state (or a right-hand side) turns non-finite.
// Carries the simulation time and the state block that produced the value.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double t, std::string block, const std::string& what)
        : std::runtime_error(what), time(t), block(std::move(block)) {}

    double time;
    std::string block;
};

}  // namespace dooc
