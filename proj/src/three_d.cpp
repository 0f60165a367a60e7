#include "dilacoh/three_d.hpp"

#include <cmath>

#include "dilacoh/quadrature.hpp"

namespace dilacoh {
namespace {

constexpr Cplx kI{0.0, 1.0};

double prefactor(const PhysicsConfig& cfg, double detuning_scale) {
    const double sum = cfg.gamma1() + cfg.gamma2();
    const double det = detuning_scale * cfg.w0 * cfg.delta();
    return 3.0 * cfg.lambda1 * cfg.lambda2 / std::hypot(sum, det);
}

// k_j arguments; width_scale = 1 for the published convention, 1/2 for the
// dynamics-consistent one.
std::pair<Cplx, Cplx> kernel_args(const PhysicsConfig& cfg,
                                  double width_scale) {
    const double tau = cfg.kappa_tau;
    const Cplx k1 = Cplx(-width_scale * cfg.gamma1(), -cfg.nu1()) * tau;
    const Cplx k2 = Cplx(-width_scale * cfg.gamma2(), cfg.nu2()) * tau;
    return {k1, k2};
}

}  // namespace

Cplx kernel_f(Cplx k) {
    if (std::abs(k) < kernel_series_threshold) {
        // sum_m k^m / (m! (m+3)); 26 terms are far below 1e-16 at |k| = 0.25
        Cplx sum = 0.0, pow = 1.0;
        double fact = 1.0;
        for (int m = 0; m <= 25; ++m) {
            if (m > 0) {
                fact *= m;
                pow *= k;
            }
            sum += pow / (fact * (m + 3));
        }
        return sum;
    }
    const Cplx k2 = k * k;
    return (-2.0 + std::exp(k) * (2.0 - 2.0 * k + k2)) / (k2 * k);
}

AngularKernelValue angular_kernel(Cplx k) { return {k, kernel_f(k)}; }

double visibility_3d_closed(const PhysicsConfig& cfg) {
    cfg.validate();
    const auto [k1, k2] = kernel_args(cfg, 1.0);
    return prefactor(cfg, 1.0) * std::abs(kernel_f(k1) + kernel_f(k2));
}

double visibility_3d_quadrature(const PhysicsConfig& cfg, double tol) {
    cfg.validate();
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    const auto [k1, k2] = kernel_args(cfg, 1.0);
    // u = cos(theta): int_0^1 u^2 (e^{k1 u} + e^{k2 u}) du
    const Cplx integral = integrate_gk(
        [&](double u) {
            return u * u * (std::exp(k1 * u) + std::exp(k2 * u));
        },
        0.0, 1.0, tol);
    return prefactor(cfg, 1.0) * std::abs(integral);
}

double visibility_3d_time_limit(const PhysicsConfig& cfg) {
    cfg.validate();
    const auto [k1, k2] = kernel_args(cfg, 0.5);
    return prefactor(cfg, 2.0) * std::abs(kernel_f(k1) + kernel_f(k2));
}

ThreeDLimits visibility_3d_limits(const PhysicsConfig& cfg) {
    cfg.validate();
    ThreeDLimits lim;
    const double tau = cfg.kappa_tau;
    const double pref = (2.0 / 3.0) * prefactor(cfg, 1.0);

    lim.small_limit =
        pref * (1.0 - cfg.gamma1() * tau - cfg.gamma2() * tau);

    const double k1m = std::hypot(cfg.nu1() * tau, cfg.gamma1() * tau);
    const double k2m = std::hypot(cfg.nu2() * tau, cfg.gamma2() * tau);
    if (k1m > 0.0 && k2m > 0.0) {
        const double cphi = cfg.gamma1() * tau / k1m;
        const double cos3phi = std::cos(3.0 * std::acos(cphi));
        lim.large_limit = pref * std::fabs(cos3phi) *
                          (3.0 / (k1m * k1m * k1m) + 3.0 / (k2m * k2m * k2m));
    }

    const double phase = std::max(cfg.nu1(), cfg.nu2()) * tau;
    const double decay = std::max(cfg.gamma1(), cfg.gamma2()) * tau;
    if (phase < 0.1 && decay < 0.1)
        lim.applicable = ThreeDRegime::Small;
    else if (phase > 10.0 && decay > 10.0)
        lim.applicable = ThreeDRegime::Large;
    return lim;
}

}  // namespace dilacoh
