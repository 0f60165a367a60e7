#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace dilacoh {

class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what)
        : std::runtime_error(what) {}
};

using Cplx = std::complex<double>;

// Adaptive bisection with an embedded Gauss7/Kronrod15 error estimate.
// Absolute tolerance; throws ConvergenceError when max_depth is exhausted on
// a subinterval whose error estimate is still above its share of the budget.
Cplx integrate_gk(const std::function<Cplx(double)>& f, double a, double b,
                  double tol_abs, int max_depth = 40);

double integrate_gk_real(const std::function<double(double)>& f, double a,
                         double b, double tol_abs, int max_depth = 40);

}  // namespace dilacoh
