#pragma once

#include <cstdint>
#include <vector>

#include "dilacoh/model_core.hpp"

namespace dilacoh {

// Uniform scan of visibility_frame over lambda1, Fig.-2 style.
VisibilityCurve sweep_lambda(double delta, double w0, double kappa_tau,
                             double lambda_lo, double lambda_hi,
                             std::size_t steps);

struct OptimalFrame {
    double lambda_star = 0.0;
    double v_star = 0.0;
    bool boundary = false;          // maximum sits on the grid edge
    bool unimodal_warning = false;  // coarse grid saw separated maxima
};

// Coarse 2000-point grid on (0, lambda_hi] with lambda_hi fixed by
// exp(-lambda_hi^2 kt) < 1e-4, then golden-section refinement of the argmax
// to |lambda error| < 1e-8.
OptimalFrame optimal_frame(double delta, double w0, double kappa_tau);

// Row-major |lambda_grid| x |delta_grid| matrix of dominance flags.
struct DominanceRegion {
    std::size_t rows = 0;  // lambda grid
    std::size_t cols = 0;  // delta grid
    std::vector<std::uint8_t> dominant;
    bool at(std::size_t i, std::size_t j) const {
        return dominant[i * cols + j] != 0;
    }
};

DominanceRegion dominance_region(double w0, double kappa_tau,
                                 const std::vector<double>& lambda_grid,
                                 const std::vector<double>& delta_grid,
                                 double threshold = 0.1);

}  // namespace dilacoh
