#include "dilacoh/quadrature.hpp"

#include <cmath>

namespace dilacoh {
namespace {

// 15-point Kronrod nodes/weights on [-1,1] with the embedded 7-point Gauss
// rule (Gauss weights on the odd Kronrod nodes).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
    Cplx value;
    double error;
    double resabs;  // integral of |f|, the local rounding floor scale
};

PanelResult gk15(const std::function<Cplx(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Cplx resg = 0.0, resk = 0.0;
    double resabs = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = h * kXgk[i];
        Cplx fv;
        double fabs_sum;
        if (i == 7) {
            fv = f(c);
            fabs_sum = std::abs(fv);
        } else {
            const Cplx lo = f(c - dx);
            const Cplx hi = f(c + dx);
            fv = lo + hi;
            fabs_sum = std::abs(lo) + std::abs(hi);
        }
        resk += kWgk[i] * fv;
        resabs += kWgk[i] * fabs_sum;
        if (i % 2 == 1) resg += kWg[i / 2] * fv;
    }
    resk *= h;
    resg *= h;
    resabs *= h;
    return {resk, std::abs(resk - resg), resabs};
}

Cplx adapt(const std::function<Cplx(double)>& f, double a, double b,
           double tol, int depth, int max_depth) {
    const PanelResult r = gk15(f, a, b);
    // the rounding floor: no bisection can do better than ~eps * int |f|
    const double floor = 50.0 * 2.220446049250313e-16 * r.resabs;
    if (r.error <= std::max(tol, floor)) return r.value;
    if (depth >= max_depth)
        throw ConvergenceError("quadrature: tolerance not reached within max refinement depth");
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * tol, depth + 1, max_depth) +
           adapt(f, c, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

Cplx integrate_gk(const std::function<Cplx(double)>& f, double a, double b,
                  double tol_abs, int max_depth) {
    if (a == b) return 0.0;
    return adapt(f, a, b, tol_abs, 0, max_depth);
}

double integrate_gk_real(const std::function<double(double)>& f, double a,
                         double b, double tol_abs, int max_depth) {
    return integrate_gk([&f](double x) { return Cplx(f(x), 0.0); }, a, b,
                        tol_abs, max_depth)
        .real();
}

}  // namespace dilacoh
