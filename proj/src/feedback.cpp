#include "dilacoh/feedback.hpp"

#include <algorithm>
#include <cmath>

namespace dilacoh {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr Cplx kI{0.0, 1.0};

}  // namespace

FeedbackConfig feedback_physical(double r_over_c, double tau, double w0,
                                 double delta, int n, double margin) {
    if (!(r_over_c > 0.0)) throw ConfigError("mirror distance must be positive");
    if (!(tau >= 0.0)) throw ConfigError("tau must be non-negative");
    const double phi2 = w0 * (1.0 + 0.5 * delta) * 2.0 * r_over_c;
    const double phi1 = w0 * (1.0 - 0.5 * delta) * (2.0 * r_over_c + 2.0 * tau);
    return feedback_from_phases(phi1, phi2, n, margin);
}

double solve_mirror_distance(int n, double w0, double delta) {
    if (n < 1) throw ConfigError("n must be >= 1");
    if (!(w0 > 0.0)) throw ConfigError("w0 must be positive");
    return static_cast<double>(n) * kPi / (2.0 * w0 * (1.0 + 0.5 * delta));
}

double feedback_delay1(const PhysicsConfig& cfg, const FeedbackConfig& fb) {
    return fb.phi1 / cfg.nu1();
}

double feedback_delay2(const PhysicsConfig& cfg, const FeedbackConfig& fb) {
    return fb.phi2 / cfg.nu2();
}

ResonanceCheck resonance_check(const PhysicsConfig& cfg,
                               const FeedbackConfig& fb) {
    cfg.validate();
    fb.validate();
    ResonanceCheck rc;
    rc.phi2_deviation = std::fabs(fb.phi2 - static_cast<double>(fb.n) * kPi);
    rc.on_resonance_2 = rc.phi2_deviation < 1e-9;
    const double m = std::round(fb.phi1 / kPi);
    rc.phi1_distance = std::fabs(fb.phi1 - m * kPi);
    rc.excluded_1 = rc.phi1_distance >= fb.m_exclusion_margin;
    return rc;
}

double c2_asymptotic(const PhysicsConfig& cfg, const FeedbackConfig& fb) {
    const ResonanceCheck rc = resonance_check(cfg, fb);
    if (!rc.on_resonance_2 || !rc.excluded_1)
        throw ConfigError("c2_asymptotic requires phi2 = n pi and excluded phi1");
    return std::exp(-static_cast<double>(fb.n) * kPi *
                    (1.0 + 0.5 * cfg.delta()) / cfg.w0);
}

DdeRun integrate_dde(const PhysicsConfig& cfg, const FeedbackConfig& fb,
                     double t_max, double dt) {
    cfg.validate();
    fb.validate();
    if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
    const double T1 = feedback_delay1(cfg, fb);
    const double T2 = feedback_delay2(cfg, fb);
    if (!(dt > 0.0) || dt > std::min(T1, T2) / 20.0 * (1.0 + 1e-12))
        throw GuardError("DDE step must satisfy dt <= min(T1, T2)/20");

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
    // short delays would otherwise force one stored point per step; sample
    // the output on a bounded grid and keep only a delay-deep ring buffer
    const std::size_t stride = std::max<std::size_t>(1, n_steps / 4096);

    DdeRun run;
    run.dt = dt;
    run.t.reserve(n_steps / stride + 2);
    run.c1.reserve(n_steps / stride + 2);
    run.c2.reserve(n_steps / stride + 2);
    run.t.push_back(0.0);
    run.c1.push_back(Cplx(1.0, 0.0));
    run.c2.push_back(Cplx(1.0, 0.0));

    struct Branch {
        double rate;   // lam^2 / 2
        Cplx phase;    // e^{i phi}
        double delay;
        std::vector<Cplx>* out;
    };
    Branch branches[2] = {
        {0.5 * cfg.gamma1(), std::exp(kI * fb.phi1), T1, &run.c1},
        {0.5 * cfg.gamma2(), std::exp(kI * fb.phi2), T2, &run.c2}};

    bool first_branch = true;
    for (Branch& br : branches) {
        const auto nd = static_cast<std::size_t>(std::ceil(br.delay / dt));
        std::vector<Cplx> ring(nd + 3, Cplx(0.0, 0.0));
        const auto at = [&](std::size_t step) -> Cplx& {
            return ring[step % ring.size()];
        };
        at(0) = Cplx(1.0, 0.0);

        // delayed value by linear interpolation on the step grid; empty
        // history before the light returns
        std::size_t current = 0;
        const auto delayed = [&](double time) -> Cplx {
            const double td = time - br.delay;
            if (td < 0.0) return Cplx(0.0, 0.0);
            const double x = td / dt;
            auto i0 = static_cast<std::size_t>(x);
            if (i0 >= current) i0 = current - 1;  // stage at t + dt, tiny T
            const double frac = x - static_cast<double>(i0);
            return (1.0 - frac) * at(i0) + frac * at(i0 + 1);
        };
        const auto rhs = [&](double time, Cplx ci) {
            return -br.rate * (ci + br.phase * delayed(time));
        };
        for (std::size_t i = 0; i < n_steps; ++i) {
            current = i;
            const double t = static_cast<double>(i) * dt;
            const Cplx y = at(i);
            const Cplx k1 = rhs(t, y);
            const Cplx k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
            const Cplx k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
            const Cplx k4 = rhs(t + dt, y + dt * k3);
            at(i + 1) = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if ((i + 1) % stride == 0 || i + 1 == n_steps) {
                if (first_branch)
                    run.t.push_back(static_cast<double>(i + 1) * dt);
                br.out->push_back(at(i + 1));
            }
        }
        first_branch = false;
    }
    return run;
}

ModeGrid build_mirror_grid(const PhysicsConfig& cfg, const FeedbackConfig& fb,
                           double t_max, std::size_t n_modes,
                           double window_widths) {
    cfg.validate();
    fb.validate();
    if (n_modes < 2) throw ConfigError("n_modes must be >= 2");

    ModeGrid grid;
    const double margin = window_widths * std::max(cfg.gamma1(), cfg.gamma2());
    grid.w_lo = std::min(cfg.nu1(), cfg.nu2()) - margin;
    grid.w_hi = std::max(cfg.nu1(), cfg.nu2()) + margin;
    grid.spacing = (grid.w_hi - grid.w_lo) / static_cast<double>(n_modes);
    if (grid.spacing * t_max > 0.1 + 1e-12)
        throw GuardError("mirror grid: spacing*t_max > 0.1; increase n_modes");

    const double T1 = feedback_delay1(cfg, fb);
    const double T2 = feedback_delay2(cfg, fb);
    const double g0 = std::sqrt(grid.spacing / (2.0 * kPi));
    const double root2 = std::sqrt(2.0);
    grid.freq.resize(n_modes);
    grid.g1.resize(n_modes);
    grid.g2.resize(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double w = grid.w_lo + (static_cast<double>(k) + 0.5) * grid.spacing;
        grid.freq[k] = w;
        grid.g1[k] = Cplx(cfg.lambda1 * g0 * root2 * std::cos(0.5 * w * T1), 0.0);
        grid.g2[k] = Cplx(cfg.lambda2 * g0 * root2 * std::cos(0.5 * w * T2), 0.0);
    }
    return grid;
}

FeedbackReport run_feedback(const PhysicsConfig& cfg, const FeedbackConfig& fb,
                            double t_max, FeedbackRunOptions opts) {
    FeedbackReport rep;
    rep.resonance = resonance_check(cfg, fb);

    const ModeGrid grid =
        build_mirror_grid(cfg, fb, t_max, opts.n_modes, opts.window_widths);
    double dt = opts.dt;
    const double half_window = 0.5 * (grid.w_hi - grid.w_lo);
    const double dt_max =
        0.05 / std::max(std::max(cfg.gamma1(), cfg.gamma2()), half_window);
    if (dt <= 0.0) dt = t_max / std::ceil(t_max / dt_max);
    rep.oracle = integrate(cfg, grid, t_max, dt);

    // DDE cross-check on the same horizon
    const double T_min =
        std::min(feedback_delay1(cfg, fb), feedback_delay2(cfg, fb));
    const double dde_dt = std::min(T_min / 64.0, t_max / 512.0);
    rep.dde = integrate_dde(cfg, fb, t_max, dde_dt);

    const OracleSample& last = rep.oracle.samples.back();
    rep.c1_final_sq = 2.0 * std::norm(last.c1);  // branch-normalized
    rep.c2_final_sq = 2.0 * std::norm(last.c2);
    const Cplx atom = std::exp(-kI * (cfg.delta() * cfg.w0 * last.t)) *
                      std::conj(last.c1) * last.c2;
    rep.visibility = 2.0 * std::abs(atom + last.overlap);

    if (rep.resonance.on_resonance_2 && rep.resonance.excluded_1)
        rep.c2_asymptotic = c2_asymptotic(cfg, fb);

    // max pointwise |c2| deviation between DDE and oracle samples; the DDE
    // output grid is uniform except possibly its last point
    double dev = 0.0;
    const double sample_dt =
        rep.dde.t.size() > 1 ? rep.dde.t[1] - rep.dde.t[0] : rep.dde.dt;
    for (const OracleSample& s : rep.oracle.samples) {
        const double x = s.t / sample_dt;
        const auto i0 = static_cast<std::size_t>(x);
        if (i0 + 1 >= rep.dde.c2.size()) break;
        const double frac = x - static_cast<double>(i0);
        const Cplx dde_c2 =
            (1.0 - frac) * rep.dde.c2[i0] + frac * rep.dde.c2[i0 + 1];
        // DDE amplitudes are branch-normalized, oracle carries 1/sqrt2
        dev = std::max(dev, std::fabs(std::sqrt(2.0) * std::abs(s.c2) -
                                      std::abs(dde_c2)));
    }
    rep.dde_oracle_dev = dev;
    return rep;
}

double visibility_feedback(const PhysicsConfig& cfg, const FeedbackConfig& fb,
                           double t_max, FeedbackRunOptions opts) {
    return run_feedback(cfg, fb, t_max, opts).visibility;
}

}  // namespace dilacoh
