#include "dilacoh/frame_explorer.hpp"

#include <cmath>

namespace dilacoh {

VisibilityCurve sweep_lambda(double delta, double w0, double kappa_tau,
                             double lambda_lo, double lambda_hi,
                             std::size_t steps) {
    if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo))
        throw ConfigError("lambda range must satisfy 0 < lo < hi");
    if (steps < 2) throw ConfigError("steps must be >= 2");

    VisibilityCurve curve;
    curve.source = VisibilityCurve::Source::ClosedForm;
    curve.abscissa_name = "lambda1";
    curve.points.resize(steps);
    const double h = (lambda_hi - lambda_lo) / static_cast<double>(steps - 1);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(steps); ++i) {
        const double lam = lambda_lo + h * static_cast<double>(i);
        curve.points[i] = {lam, visibility_frame(lam, delta, w0, kappa_tau)};
    }
    return curve;
}

OptimalFrame optimal_frame(double delta, double w0, double kappa_tau) {
    if (!(delta >= 0.0) || !(w0 > 0.0) || !(kappa_tau > 0.0))
        throw ConfigError("optimal_frame requires delta >= 0, w0 > 0, kappa_tau > 0");

    const double lambda_hi = std::sqrt(std::log(1e4) / kappa_tau);
    constexpr std::size_t n = 2000;
    const VisibilityCurve grid =
        sweep_lambda(delta, w0, kappa_tau, lambda_hi / n, lambda_hi, n);

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (grid.points[i].v > grid.points[best].v) best = i;

    OptimalFrame out;
    // count separated interior maxima to validate the unimodality assumption
    std::size_t maxima = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (grid.points[i].v > grid.points[i - 1].v + 1e-14 &&
            grid.points[i].v > grid.points[i + 1].v + 1e-14)
            ++maxima;
    }
    out.unimodal_warning = maxima > 1;

    if (best == 0 || best == n - 1) {
        out.boundary = true;
        out.lambda_star = grid.points[best].abscissa;
        out.v_star = grid.points[best].v;
        return out;
    }

    // golden-section refinement inside the bracketing grid cells
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = grid.points[best - 1].abscissa;
    double b = grid.points[best + 1].abscissa;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = visibility_frame(c, delta, w0, kappa_tau);
    double fd = visibility_frame(d, delta, w0, kappa_tau);
    while (b - a > 1e-8) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = visibility_frame(c, delta, w0, kappa_tau);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = visibility_frame(d, delta, w0, kappa_tau);
        }
    }
    out.lambda_star = 0.5 * (a + b);
    out.v_star = visibility_frame(out.lambda_star, delta, w0, kappa_tau);
    return out;
}

DominanceRegion dominance_region(double w0, double kappa_tau,
                                 const std::vector<double>& lambda_grid,
                                 const std::vector<double>& delta_grid,
                                 double threshold) {
    if (lambda_grid.empty() || delta_grid.empty())
        throw ConfigError("dominance_region grids must be non-empty");
    DominanceRegion region;
    region.rows = lambda_grid.size();
    region.cols = delta_grid.size();
    region.dominant.assign(region.rows * region.cols, 0);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(region.rows); ++i) {
        for (std::size_t j = 0; j < region.cols; ++j) {
            const PhysicsConfig cfg = make_config_delta(
                lambda_grid[i], delta_grid[j], w0, kappa_tau);
            region.dominant[i * region.cols + j] =
                dominance_margin(cfg, threshold).dominant ? 1 : 0;
        }
    }
    return region;
}

}  // namespace dilacoh
