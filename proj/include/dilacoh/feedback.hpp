#pragma once

#include <complex>
#include <vector>

#include "dilacoh/config.hpp"
#include "dilacoh/oracle.hpp"

namespace dilacoh {

// Mirror geometry, stored as the dimensionless round-trip phases at the two
// branch frequencies: phi2 = w0 (1+D/2) 2r/c, phi1 = w0 (1-D/2) (2r/c + 2 tau).
// The corresponding delays are T_i = phi_i / nu_i.
struct FeedbackConfig {
    double phi1 = 0.0;
    double phi2 = 0.0;
    int n = 1;                          // resonance integer candidate
    double m_exclusion_margin = 0.1 * 3.14159265358979323846;

    void validate() const {
        if (!(phi1 > 0.0) || !(phi2 > 0.0))
            throw ConfigError("feedback phases must be positive");
        if (n < 1) throw ConfigError("resonance integer n must be >= 1");
        if (!(m_exclusion_margin > 0.0))
            throw ConfigError("exclusion margin must be positive");
    }
};

inline FeedbackConfig feedback_from_phases(double phi1, double phi2, int n,
                                           double margin = 0.1 * 3.14159265358979323846) {
    FeedbackConfig fb{phi1, phi2, n, margin};
    fb.validate();
    return fb;
}

// Physical constructor: r_over_c is the one-way mirror distance in units of
// 1/kappa, tau the branch light-travel time; the center frame
// (lambda = 1 -+ Delta/2) is implied.
FeedbackConfig feedback_physical(double r_over_c, double tau, double w0,
                                 double delta, int n,
                                 double margin = 0.1 * 3.14159265358979323846);

// Mirror distance r/c that puts branch 2 exactly on the n-th resonance.
double solve_mirror_distance(int n, double w0, double delta);

// Round-trip delays implied by the stored phases.
double feedback_delay1(const PhysicsConfig& cfg, const FeedbackConfig& fb);
double feedback_delay2(const PhysicsConfig& cfg, const FeedbackConfig& fb);

struct ResonanceCheck {
    bool on_resonance_2 = false;  // |phi2 - n pi| < 1e-9
    bool excluded_1 = false;      // phi1 at least margin away from every m pi
    double phi2_deviation = 0.0;
    double phi1_distance = 0.0;   // distance of phi1 to the nearest m pi
};

ResonanceCheck resonance_check(const PhysicsConfig& cfg,
                               const FeedbackConfig& fb);

// Asymptotic surviving population of the resonant branch,
// |C2|^2 = exp[-n pi (1+D/2) / w0]. Domain error off resonance.
double c2_asymptotic(const PhysicsConfig& cfg, const FeedbackConfig& fb);

// Delayed self-coupling trajectories
//   dc_i/dt = -(lam_i^2/2) [ c_i(t) + e^{i phi_i} c_i(t - T_i) Theta(t - T_i) ]
// with empty history before t = 0; c_i(0) = 1 (branch-normalized).
struct DdeRun {
    std::vector<double> t;
    std::vector<Cplx> c1, c2;
    double dt = 0.0;
};

DdeRun integrate_dde(const PhysicsConfig& cfg, const FeedbackConfig& fb,
                     double t_max, double dt);

// Mode grid with the mirror mode functions: couplings
// lam_i sqrt(spacing/2pi) * sqrt(2) cos(w T_i / 2). The sqrt(2) keeps the
// free-space decay rate; see docs/derivation_notes.md.
ModeGrid build_mirror_grid(const PhysicsConfig& cfg, const FeedbackConfig& fb,
                           double t_max, std::size_t n_modes,
                           double window_widths = 40.0);

struct FeedbackReport {
    double visibility = 0.0;       // V(t_max) from the mirror-mode oracle
    double c1_final_sq = 0.0;      // branch-normalized |c1|^2 at t_max
    double c2_final_sq = 0.0;
    double c2_asymptotic = 0.0;    // closed-form prediction (0 off resonance)
    double dde_oracle_dev = 0.0;   // max pointwise |c2| deviation DDE vs oracle
    ResonanceCheck resonance;
    OracleRun oracle;
    DdeRun dde;
};

struct FeedbackRunOptions {
    std::size_t n_modes = 8000;
    double dt = 0.0;               // 0: auto from the grid window
    double window_widths = 40.0;   // mirror-grid margin in units of gamma
};

FeedbackReport run_feedback(const PhysicsConfig& cfg, const FeedbackConfig& fb,
                            double t_max, FeedbackRunOptions opts = {});

// V(t_max) under feedback: DDE-validated amplitudes with the photon overlap
// taken from the mirror-mode oracle.
double visibility_feedback(const PhysicsConfig& cfg, const FeedbackConfig& fb,
                           double t_max, FeedbackRunOptions opts = {});

}  // namespace dilacoh
