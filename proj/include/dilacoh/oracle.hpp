#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dilacoh/config.hpp"
#include "dilacoh/model_core.hpp"

namespace dilacoh {

// Numerical-guard violations (recurrence time, step size, norm drift).
class GuardError : public std::runtime_error {
public:
    explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

// Frequency discretization of the field continuum. g1/g2 are the full
// per-mode couplings of the two branches including any position phases or
// mirror mode-function factors.
struct ModeGrid {
    std::vector<double> freq;
    std::vector<Cplx> g1, g2;
    double spacing = 0.0;
    double w_lo = 0.0, w_hi = 0.0;
    std::size_t n_modes() const { return freq.size(); }
};

// Free-space grid: window [min(nu_i) - 40 max(gamma_i), max(nu_i) + 40 max(gamma_i)]
// with centered bin frequencies and uniform couplings sqrt(spacing/2pi)*lam_i;
// the branch-2 coupling carries the position phase e^{-i s w tau}.
// Guard: spacing * t_max <= 0.1 so no recurrence occurs before t_max.
ModeGrid build_grid(const PhysicsConfig& cfg, double t_max,
                    std::size_t n_modes);

// Emission into all directions: (hemisphere, cos(theta) node, frequency)
// product grid with Gauss-Legendre angular nodes and coupling weight
// sqrt(3 u^2 w_u / 2) per node; used for the three-d convention cross-check.
ModeGrid build_grid_3d(const PhysicsConfig& cfg, double t_max,
                       std::size_t n_freq, std::size_t n_angles,
                       double window_widths = 40.0);

enum class Execution { Serial, Parallel };

struct OracleSample {
    double t = 0.0;
    Cplx c1{0.0, 0.0}, c2{0.0, 0.0};
    Cplx overlap{0.0, 0.0};  // sum_k conj(C1k) C2k at this time
    double norm1 = 0.0, norm2 = 0.0;
};

struct OracleRun {
    std::vector<OracleSample> samples;
    double dt = 0.0;
    // final per-mode amplitudes, rotating-mode frame (magnitudes are physical)
    std::vector<Cplx> b1, b2;
};

struct IntegrateOptions {
    std::size_t sample_stride = 0;  // 0: pick ~1000 samples automatically
    Execution exec = Execution::Parallel;
    double norm_drift_guard = 1e-6;  // allowed drift per unit time
};

// Fixed-step RK4 integration of the rotating-frame amplitude equations with
// the mode phases folded into the mode amplitudes (no trig in the stepper).
// Both branches evolve independently and are sampled on a common grid.
// Preconditions: dt <= 0.05 / max(gamma_i, half window width).
OracleRun integrate(const PhysicsConfig& cfg, const ModeGrid& grid,
                    double t_max, double dt, IntegrateOptions opts = {});

// Plain serial reference implementation of the same scheme, kept for
// verification of the parallel kernel.
OracleRun integrate_reference(const PhysicsConfig& cfg, const ModeGrid& grid,
                              double t_max, double dt,
                              std::size_t sample_stride = 0);

// V(t) = 2 | e^{i Delta w0 t} conj(c1) c2 + overlap | from a run's samples.
VisibilityCurve visibility_numeric(const OracleRun& run,
                                   const PhysicsConfig& cfg);

// Least-squares exponential fit of |c_branch(t)| over samples in [t_lo, t_hi];
// returns the amplitude decay rate (expected value: lambda^2 / 2).
double fit_decay_rate(const OracleRun& run, int branch, double t_lo,
                      double t_hi);

// Numerical evaluation of the photon-state contraction
//   int dw conj(C'_1w(t)) C'_2w(t)
// directly from the spectral amplitudes, by expanding the product into its
// four single-frequency terms and integrating each over expanding shells with
// an analytic tail bound. Ground truth for photon_overlap.
Cplx overlap_quadrature(const PhysicsConfig& cfg, double t, double tol);

}  // namespace dilacoh
