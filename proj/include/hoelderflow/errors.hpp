#pragma once

#include <stdexcept>
#include <string>

namespace hoelderflow {

// Invalid parameter combinations in a user-supplied configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hoelder-exponent bookkeeping does not admit the requested operation
// (e.g. integrand and integrator exponents do not sum above one).
struct RegularityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A matrix fails the required spectral margin.
struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A derivative oracle disagrees with finite differences, or a field
// violates a structural assumption it claims to satisfy.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hoelderflow
