#pragma once

#include <stdexcept>
#include <string>

namespace poclab {

struct DegenerateProjection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedDerivative : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a trajectory produces a non-finite or absurdly large weight.
struct DivergedRun : std::runtime_error {
    double t;
    long particle;
    DivergedRun(double t_, long particle_, const std::string& what_)
        : std::runtime_error(what_), t(t_), particle(particle_) {}
};

// Raised when an advection step exceeds the stable step size. Carries the
// largest admissible dt so callers can shrink and retry.
struct CflError : std::runtime_error {
    double admissible_dt;
    CflError(double admissible, const std::string& what_)
        : std::runtime_error(what_), admissible_dt(admissible) {}
};

}  // namespace poclab
