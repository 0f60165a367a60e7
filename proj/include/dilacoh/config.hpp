#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace dilacoh {

// All quantities are dimensionless with kappa = 1: frequencies in units of
// kappa, times in units of 1/kappa.

// Emission direction of the unidirectional light field.  Upward means the
// photon propagates from x1 towards x2; it selects which branch's retardation
// exponent survives in the asymptotic visibility.
enum class Direction { Upward, Downward };

class ConfigError : public std::domain_error {
public:
    explicit ConfigError(const std::string& what) : std::domain_error(what) {}
};

// Dimensionless model parameters of the two-position, two-level emitter.
// lambda_i = 1 + g x_i / c^2 are the dilation factors of the two branches.
// Delta = lambda2 - lambda1 is always derived, never stored.
struct PhysicsConfig {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double w0 = 1.0e6;        // atomic transition frequency, in kappa
    double kappa_tau = 0.0;   // light travel time between the positions, in 1/kappa
    Direction direction = Direction::Upward;

    double delta() const { return lambda2 - lambda1; }
    // branch transition frequencies and population decay rates
    double nu1() const { return lambda1 * w0; }
    double nu2() const { return lambda2 * w0; }
    double gamma1() const { return lambda1 * lambda1; }
    double gamma2() const { return lambda2 * lambda2; }

    void validate() const {
        if (!(lambda1 > 0.0) || !std::isfinite(lambda1))
            throw ConfigError("lambda1 must be positive");
        if (!(lambda2 > 0.0) || !std::isfinite(lambda2))
            throw ConfigError("lambda2 must be positive");
        if (!(w0 > 0.0) || !std::isfinite(w0))
            throw ConfigError("w0 must be positive");
        if (!(kappa_tau >= 0.0) || !std::isfinite(kappa_tau))
            throw ConfigError("kappa_tau must be non-negative");
    }
};

inline PhysicsConfig make_config(double lambda1, double lambda2, double w0,
                                 double kappa_tau,
                                 Direction dir = Direction::Upward) {
    PhysicsConfig cfg{lambda1, lambda2, w0, kappa_tau, dir};
    cfg.validate();
    return cfg;
}

inline PhysicsConfig make_config_delta(double lambda1, double delta, double w0,
                                       double kappa_tau,
                                       Direction dir = Direction::Upward) {
    return make_config(lambda1, lambda1 + delta, w0, kappa_tau, dir);
}

// Constructor from physical inputs (SI or any coherent unit system):
// gravitational acceleration g, speed of light c, branch positions x1 < x2,
// linewidth kappa and transition frequency w0_abs in the same time units.
inline PhysicsConfig physical_config(double g, double c, double x1, double x2,
                                     double kappa, double w0_abs,
                                     Direction dir = Direction::Upward) {
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
    if (!(c > 0.0)) throw ConfigError("c must be positive");
    if (!(x2 >= x1)) throw ConfigError("x2 must not be below x1");
    const double lambda1 = 1.0 + g * x1 / (c * c);
    const double lambda2 = 1.0 + g * x2 / (c * c);
    const double tau = (x2 - x1) / c;
    return make_config(lambda1, lambda2, w0_abs / kappa, kappa * tau, dir);
}

}  // namespace dilacoh
