#include "dilacoh/model_core.hpp"

#include <cmath>
#include <tuple>

namespace dilacoh {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr Cplx kI{0.0, 1.0};

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw ConfigError("time must be non-negative");
}

double direction_sign(const PhysicsConfig& cfg) {
    return cfg.direction == Direction::Upward ? 1.0 : -1.0;
}

}  // namespace

std::pair<Cplx, Cplx> excited_amplitudes(const PhysicsConfig& cfg, double t) {
    cfg.validate();
    require_time(t);
    const double a = std::exp(-0.5 * cfg.gamma1() * t) / std::sqrt(2.0);
    const double b = std::exp(-0.5 * cfg.gamma2() * t) / std::sqrt(2.0);
    return {Cplx(a, 0.0), Cplx(b, 0.0)};
}

Cplx spectral_amplitude(const PhysicsConfig& cfg, int branch, double w,
                        double t) {
    cfg.validate();
    require_time(t);
    if (branch != 1 && branch != 2)
        throw ConfigError("branch must be 1 or 2");
    const double lam = branch == 1 ? cfg.lambda1 : cfg.lambda2;
    const double nu = lam * cfg.w0;
    const double x_over_c = branch == 1 ? 0.0 : cfg.kappa_tau;
    const double s = direction_sign(cfg);
    const Cplx den(0.5 * lam * lam, nu - w);
    const Cplx num = 1.0 - std::exp(-den * t);
    return std::sqrt(1.0 / (2.0 * kPi)) * lam *
           std::exp(kI * (s * w * x_over_c)) * num / den;
}

Cplx photon_overlap(const PhysicsConfig& cfg, double t) {
    cfg.validate();
    require_time(t);
    const double g1 = cfg.gamma1(), g2 = cfg.gamma2();
    const double nu1 = cfg.nu1(), nu2 = cfg.nu2();
    const double tau = cfg.kappa_tau;
    const double s = direction_sign(cfg);

    // Poles of conj(D1)*D2 in the upper/lower half plane.
    const Cplx p1(nu1, 0.5 * g1);
    const Cplx p2(nu2, -0.5 * g2);
    // E(x) = exp(i p x) with the pole picked by the side the contour closes on.
    const auto E = [&](double x) {
        return std::exp(kI * (x >= 0.0 ? p1 : p2) * x);
    };

    const Cplx pref = cfg.lambda1 * cfg.lambda2 /
                      Cplx(g1 + g2, 2.0 * (nu2 - nu1));

    const Cplx decay1 = std::exp(Cplx(-0.5 * g1 * t, nu1 * t));
    const Cplx decay2 = std::exp(Cplx(-0.5 * g2 * t, -nu2 * t));
    const Cplx both = std::exp(Cplx(-0.5 * (g1 + g2) * t, (nu1 - nu2) * t));

    return pref * ((1.0 + both) * E(s * tau) - decay1 * E(s * tau - t) -
                   decay2 * E(s * tau + t));
}

AmplitudeState amplitude_state(const PhysicsConfig& cfg, double t) {
    AmplitudeState st;
    st.t = t;
    std::tie(st.c1, st.c2) = excited_amplitudes(cfg, t);
    st.overlap = photon_overlap(cfg, t);
    return st;
}

double visibility_time(const PhysicsConfig& cfg, double t) {
    const AmplitudeState st = amplitude_state(cfg, t);
    // relative phase between the excited-state and photon terms; the sign is
    // fixed by direct lab-frame integration (see docs/derivation_notes.md)
    const Cplx atom = std::exp(-kI * (cfg.delta() * cfg.w0 * t)) *
                      std::conj(st.c1) * st.c2;
    return 2.0 * std::abs(atom + st.overlap);
}

double visibility_time_limit(const PhysicsConfig& cfg) {
    cfg.validate();
    const double lam_d =
        cfg.direction == Direction::Upward ? cfg.lambda1 : cfg.lambda2;
    const double sum = cfg.gamma1() + cfg.gamma2();
    const double det = 2.0 * cfg.w0 * cfg.delta();
    return 2.0 * cfg.lambda1 * cfg.lambda2 *
           std::exp(-0.5 * lam_d * lam_d * cfg.kappa_tau) /
           std::hypot(sum, det);
}

double visibility_asymptotic(const PhysicsConfig& cfg) {
    cfg.validate();
    const double lam_d =
        cfg.direction == Direction::Upward ? cfg.lambda1 : cfg.lambda2;
    const double sum = cfg.gamma1() + cfg.gamma2();
    const double det = cfg.w0 * cfg.delta();
    return 2.0 * cfg.lambda1 * cfg.lambda2 *
           std::exp(-lam_d * lam_d * cfg.kappa_tau) / std::hypot(sum, det);
}

double visibility_frame(double lambda1, double delta, double w0,
                        double kappa_tau) {
    return visibility_asymptotic(
        make_config_delta(lambda1, delta, w0, kappa_tau));
}

double visibility_center(double delta, double w0, double kappa_tau) {
    if (!(std::fabs(delta) < 2.0))
        throw ConfigError("|delta| must be < 2 for the center frame");
    return visibility_frame(1.0 - 0.5 * delta, delta, w0, kappa_tau);
}

DominanceMargin dominance_margin(const PhysicsConfig& cfg, double threshold) {
    cfg.validate();
    DominanceMargin m;
    m.ratio = visibility_asymptotic(cfg) / std::exp(-cfg.kappa_tau);
    m.dominant = m.ratio <= threshold;
    m.necessary_factor =
        std::exp((cfg.gamma1() - 1.0) * cfg.kappa_tau);
    return m;
}

}  // namespace dilacoh
