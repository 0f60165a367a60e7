#pragma once

#include <complex>

#include "dilacoh/config.hpp"

namespace dilacoh {

using Cplx = std::complex<double>;

// Angular kernel F(k) = int_0^1 u^2 e^{k u} du
//                     = [-2 + e^k (2 - 2k + k^2)] / k^3.
// Below |k| = kernel_series_threshold the closed form cancels catastrophically
// in double precision, so the Taylor series sum_m k^m / (m! (m+3)) is used.
inline constexpr double kernel_series_threshold = 0.25;

Cplx kernel_f(Cplx k);

struct AngularKernelValue {
    Cplx k;
    Cplx f;
};

AngularKernelValue angular_kernel(Cplx k);

// Emission into all spatial directions, coupling weight ~ cos(theta).
// Closed form in the published full-width convention:
//   V3 = 3 lam1 lam2 / sqrt((lam1^2+lam2^2)^2 + (w0 D)^2) * |F(k1) + F(k2)|,
//   k_j = [(-1)^j i w0 lam_j - lam_j^2] tau.
double visibility_3d_closed(const PhysicsConfig& cfg);

// Same quantity by adaptive angular quadrature of
//   int_0^{pi/2} dtheta sin(theta) cos^2(theta) [e^{k1 cos} + e^{k2 cos}]
// (u = cos(theta) substitution); agrees with the closed form to ~1e-12.
double visibility_3d_quadrature(const PhysicsConfig& cfg, double tol = 1e-10);

// Dynamics-consistent variant (half-width decay inside k_j and 2 w0 D in the
// prefactor); this is the t->infinity visibility the mode-discretized oracle
// reproduces. See docs/derivation_notes.md.
double visibility_3d_time_limit(const PhysicsConfig& cfg);

enum class ThreeDRegime { Small, Large, Neither };

struct ThreeDLimits {
    double small_limit = 0.0;  // prefactor * (1 - lam1^2 kt - lam2^2 kt)
    double large_limit = 0.0;  // prefactor * |cos 3phi| * (3/|k1|^3 + 3/|k2|^3)
    ThreeDRegime applicable = ThreeDRegime::Neither;
};

// The two printed limit approximations plus a regime classification based on
// w0*lam*tau and lam^2*kappa*tau against thresholds 0.1 and 10. Diagnostics
// only; they track the exact value loosely in their own regime.
ThreeDLimits visibility_3d_limits(const PhysicsConfig& cfg);

}  // namespace dilacoh
