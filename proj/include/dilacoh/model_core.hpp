#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "dilacoh/config.hpp"

namespace dilacoh {

using Cplx = std::complex<double>;

// Excited-state and photon-overlap amplitudes at a given time.
struct AmplitudeState {
    double t = 0.0;
    Cplx c1{0.0, 0.0};      // branch-1 excited amplitude (weight 1/sqrt2 included)
    Cplx c2{0.0, 0.0};
    Cplx overlap{0.0, 0.0}; // photon-state contraction between the branches
};

// A sampled (parameter, V) curve with provenance.
struct VisibilityCurve {
    enum class Source { ClosedForm, Quadrature, Oracle };
    struct Point {
        double abscissa;
        double v;
    };
    std::vector<Point> points;
    Source source = Source::ClosedForm;
    std::string abscissa_name;
};

// Branch excited amplitudes C'_1, C'_2 at time t: (1/sqrt2) exp(-lam_i^2 t/2).
// Both are real positive; t < 0 is a domain error.
std::pair<Cplx, Cplx> excited_amplitudes(const PhysicsConfig& cfg, double t);

// Spectral photon amplitude of one branch, normalized to a unit branch
// (the 1/sqrt2 branch weight is NOT included):
//   sqrt(1/2pi) lam e^{i s w x/c} (1 - exp[-(lam^2/2 + i(lam w0 - w)) t])
//                                 / (lam^2/2 + i(lam w0 - w))
// where s = +1 (Upward) or -1 (Downward) and x1 = 0, x2 = c tau.
// The half-width lam^2/2 in the denominator is fixed by norm conservation;
// see docs/derivation_notes.md.
Cplx spectral_amplitude(const PhysicsConfig& cfg, int branch, double w,
                        double t);

// Closed form of the photon-state contraction
//   O(t) = int dw conj(C'_1w) C'_2w   (branch weights 1/sqrt2 included)
// obtained by contour integration; continuous across t = tau, identically
// zero for t < tau (the wavepackets are still disjoint), and equal to
// overlap_quadrature to better than 1e-8.
Cplx photon_overlap(const PhysicsConfig& cfg, double t);

AmplitudeState amplitude_state(const PhysicsConfig& cfg, double t);

// Interferometric visibility at time t,
//   V(t) = 2 | e^{i Delta w0 t} conj(C'_1) C'_2 + O(t) |,
// with the global phase dropped so only the relative phase Delta*w0*t between
// the excited-state term and the photon term remains.
double visibility_time(const PhysicsConfig& cfg, double t);

// t -> infinity limit of visibility_time (the convention consistent with the
// amplitude dynamics and the mode-discretized oracle):
//   2 lam1 lam2 exp(-lam_d^2 kt / 2) / sqrt((lam1^2+lam2^2)^2 + (2 w0 D)^2),
// lam_d = lam1 for Upward emission, lam2 for Downward.
double visibility_time_limit(const PhysicsConfig& cfg);

// Asymptotic visibility in the published full-width convention,
//   2 lam1 lam2 exp(-lam_d^2 kt) / sqrt((lam1^2+lam2^2)^2 + (w0 D)^2).
// This is the form behind the reference-frame scans; it differs from
// visibility_time_limit by the spectral-width convention (see
// docs/derivation_notes.md).
double visibility_asymptotic(const PhysicsConfig& cfg);

// Same closed form parameterized by (lambda1, Delta) at fixed position
// difference; lambda1 picks the reference frame.
double visibility_frame(double lambda1, double delta, double w0,
                        double kappa_tau);

// Frame with the zero potential point at the center of the two positions:
// lambda1 = 1 - Delta/2, lambda2 = 1 + Delta/2. Requires |Delta| < 2.
double visibility_center(double delta, double w0, double kappa_tau);

struct DominanceMargin {
    double ratio = 1.0;            // V_asymptotic / exp(-kappa_tau)
    bool dominant = false;         // ratio <= threshold
    double necessary_factor = 1.0; // exp[(lam1^2 - 1) kappa_tau]
};

// Dilation-dominance diagnostic: how far the visibility sits below the pure
// spontaneous-emission baseline exp(-kappa_tau).
DominanceMargin dominance_margin(const PhysicsConfig& cfg,
                                 double threshold = 0.1);

}  // namespace dilacoh
