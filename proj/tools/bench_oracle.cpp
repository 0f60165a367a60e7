// Timing comparison of the mode-integration kernels: naive reference,
// blocked serial, and the OpenMP path.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dilacoh/oracle.hpp"

using namespace dilacoh;

namespace {

template <typename F>
double time_run(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n_modes = 16400;
    double t_max = 4.0;
    if (argc > 1) n_modes = std::strtoull(argv[1], nullptr, 10);
    if (argc > 2) t_max = std::strtod(argv[2], nullptr);

    const auto cfg = make_config_delta(1.0, 5e-3, 200.0, 1e-2);
    const auto grid = build_grid(cfg, t_max, n_modes);
    const double half = 0.5 * (grid.w_hi - grid.w_lo);
    const double dt_lim = 0.05 / std::max(cfg.gamma2(), half);
    const double dt = t_max / std::ceil(t_max / dt_lim);
    const double updates = 8.0 * (t_max / dt) * static_cast<double>(n_modes);

    std::printf("modes %zu, t_max %.1f, dt %.3e, %.2e mode-stage updates/run\n",
                n_modes, t_max, dt, updates);

    double v_ref = 0.0, v_ser = 0.0, v_par = 0.0;
    const double s_ref = time_run([&] {
        v_ref = integrate_reference(cfg, grid, t_max, dt).samples.back().norm1;
    });
    std::printf("reference   : %7.2f s  (%6.1f Mupd/s)\n", s_ref,
                updates / s_ref / 1e6);

    const double s_ser = time_run([&] {
        v_ser = integrate(cfg, grid, t_max, dt, {0, Execution::Serial})
                    .samples.back()
                    .norm1;
    });
    std::printf("blocked     : %7.2f s  (%6.1f Mupd/s, %.2fx reference)\n",
                s_ser, updates / s_ser / 1e6, s_ref / s_ser);

    const double s_par = time_run([&] {
        v_par = integrate(cfg, grid, t_max, dt, {0, Execution::Parallel})
                    .samples.back()
                    .norm1;
    });
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("openmp (%2d) : %7.2f s  (%6.1f Mupd/s, %.2fx blocked)\n",
                threads, s_par, updates / s_par / 1e6, s_ser / s_par);

    // keep the results alive and honest
    std::printf("norm checks: %.12f %.12f %.12f\n", v_ref, v_ser, v_par);
    return 0;
}
