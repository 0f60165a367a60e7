#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dilacoh/model_core.hpp"
#include "dilacoh/oracle.hpp"
#include "dilacoh/three_d.hpp"
#include "test_support.hpp"

using namespace dilacoh;

namespace {

double pick_dt(const ModeGrid& grid, const PhysicsConfig& cfg, double t_max) {
    const double half = 0.5 * (grid.w_hi - grid.w_lo);
    const double dt_max =
        0.05 / std::max(std::max(cfg.gamma1(), cfg.gamma2()), half);
    return t_max / std::ceil(t_max / dt_max);
}

}  // namespace

TEST_CASE("grid construction and the recurrence guard") {
    const auto cfg = make_config(1.0, 1.0, 100.0, 0.0);
    CHECK_THROWS_AS(build_grid(cfg, 50.0, 4000), GuardError);

    const auto grid = build_grid(cfg, 50.0, 40000);  // spacing*t_max = 0.1
    CHECK(grid.w_lo == doctest::Approx(60.0));
    CHECK(grid.w_hi == doctest::Approx(140.0));
    CHECK(grid.spacing == doctest::Approx(0.002));
    CHECK(grid.n_modes() == 40000);

    // Lorentzian weight captured by the +-40 gamma window; the analytic CDF
    // value for a half-width gamma/2 profile is (2/pi) atan(80) ~ 0.9920
    double weight = 0.0;
    const double gamma_half = 0.5;
    for (double w : grid.freq) {
        const double d = w - 100.0;
        weight += grid.spacing * (gamma_half / 3.14159265358979323846) /
                  (gamma_half * gamma_half + d * d);
    }
    CHECK(weight >= 0.99);
    CHECK(weight == doctest::Approx(2.0 / 3.14159265358979323846 *
                                    std::atan(80.0)).epsilon(1e-4));

    CHECK_THROWS_AS(build_grid(cfg, 50.0, 1), ConfigError);
}

TEST_CASE("initial state and step-size guard") {
    const auto cfg = make_config(1.0, 1.001, 100.0, 1e-2);
    const auto grid = build_grid(cfg, 2.0, 4200);
    CHECK_THROWS_AS(integrate(cfg, grid, 2.0, 0.5), GuardError);

    auto run = integrate(cfg, grid, 2.0, pick_dt(grid, cfg, 2.0));
    const OracleSample& first = run.samples.front();
    CHECK(first.t == 0.0);
    CHECK(first.c1.real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(first.c2.real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::abs(first.overlap) == 0.0);
    CHECK(first.norm1 == doctest::Approx(0.5));
}

TEST_CASE("optimized kernel reproduces the reference integrator") {
    const auto cfg = make_config(1.0, 1.1, 50.0, 0.2);
    const auto grid = build_grid(cfg, 2.0, 2100);
    const double dt = pick_dt(grid, cfg, 2.0);
    const auto fast = integrate(cfg, grid, 2.0, dt, {50, Execution::Parallel});
    const auto ref = integrate_reference(cfg, grid, 2.0, dt, 50);
    REQUIRE(fast.samples.size() == ref.samples.size());
    for (std::size_t i = 0; i < fast.samples.size(); ++i) {
        CHECK(std::abs(fast.samples[i].c1 - ref.samples[i].c1) < 1e-10);
        CHECK(std::abs(fast.samples[i].c2 - ref.samples[i].c2) < 1e-10);
        CHECK(std::abs(fast.samples[i].overlap - ref.samples[i].overlap) <
              1e-10);
    }
}

TEST_CASE("block reduction keeps results independent of the thread count") {
    const auto cfg = make_config(1.0, 1.1, 50.0, 0.2);
    const auto grid = build_grid(cfg, 1.0, 2100);
    const double dt = pick_dt(grid, cfg, 1.0);
#ifdef _OPENMP
    const int initial_threads = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    const auto a = integrate(cfg, grid, 1.0, dt, {25, Execution::Parallel});
#ifdef _OPENMP
    omp_set_num_threads(2);
#endif
    const auto b = integrate(cfg, grid, 1.0, dt, {25, Execution::Parallel});
#ifdef _OPENMP
    omp_set_num_threads(initial_threads);
#endif
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].c1 == b.samples[i].c1);
        CHECK(a.samples[i].c2 == b.samples[i].c2);
        CHECK(a.samples[i].overlap == b.samples[i].overlap);
    }
    for (std::size_t k = 0; k < a.b1.size(); ++k) {
        CHECK(a.b1[k] == b.b1[k]);
        CHECK(a.b2[k] == b.b2[k]);
    }
    const auto s = integrate(cfg, grid, 1.0, dt, {25, Execution::Serial});
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].c1 == s.samples[i].c1);
        CHECK(a.samples[i].overlap == s.samples[i].overlap);
    }
}

TEST_CASE("free-space run: decay rate, norms, visibility against closed forms") {
    // rescaled groups: w0 Delta = 1, kappa tau = 1e-2
    const auto cfg = make_config_delta(1.0, 5e-3, 200.0, 1e-2);
    const double t_max = 16.0;
    const auto grid = build_grid(cfg, t_max, 13100);
    const auto run = integrate(cfg, grid, t_max, pick_dt(grid, cfg, t_max));

    // per-branch norm conservation
    for (const auto& s : run.samples) {
        CHECK(std::fabs(s.norm1 - 0.5) < 1e-7);
        CHECK(std::fabs(s.norm2 - 0.5) < 1e-7);
    }

    // |C1| decays at lambda1^2/2 within 1%
    const double rate = fit_decay_rate(run, 1, 1.0, 5.0);
    CHECK(rate == doctest::Approx(0.5 * cfg.gamma1()).epsilon(0.01));

    // identical-branch sanity: V = 1 for all samples
    const auto same = make_config(1.0, 1.0, 200.0, 0.0);
    const auto grid0 = build_grid(same, 4.0, 13100);
    const auto run0 = integrate(same, grid0, 4.0, pick_dt(grid0, same, 4.0));
    for (const auto& p : visibility_numeric(run0, same).points)
        CHECK(p.v == doctest::Approx(1.0).epsilon(1e-6));

    // long-time visibility matches the closed forms in the dynamics convention
    const auto curve = visibility_numeric(run, cfg);
    const double v_end = curve.points.back().v;
    CHECK(v_end == doctest::Approx(visibility_time(cfg, t_max)).epsilon(0.01));
    CHECK(v_end == doctest::Approx(visibility_time_limit(cfg)).epsilon(0.01));

    // and sits far from the published full-width value
    CHECK(std::fabs(v_end - visibility_asymptotic(cfg)) /
              visibility_asymptotic(cfg) > 0.15);

    // final mode occupation is the finite-t Lorentzian of the closed form
    std::size_t peak = 0;
    for (std::size_t k = 0; k < run.b1.size(); ++k)
        if (std::abs(run.b1[k]) > std::abs(run.b1[peak])) peak = k;
    CHECK(std::fabs(grid.freq[peak] - cfg.nu1()) <= grid.spacing);
    for (double off : {-2.0, -0.5, 0.5, 2.0}) {
        const double w = cfg.nu1() + off;
        const auto k = static_cast<std::size_t>(
            std::round((w - grid.w_lo) / grid.spacing - 0.5));
        const double expected =
            0.5 * std::norm(spectral_amplitude(cfg, 1, grid.freq[k], t_max)) *
            grid.spacing;
        CHECK(std::norm(run.b1[k]) ==
              doctest::Approx(expected).epsilon(0.02));
    }
}

TEST_CASE("reversed emission direction in the oracle") {
    // downward emission swaps the surviving retardation exponent; the grid
    // phases must follow the direction flag
    const auto cfg = make_config_delta(1.0, 1e-2, 100.0, 0.15,
                                       Direction::Downward);
    const double t_max = 10.0;
    const auto grid = build_grid(cfg, t_max, 8300);
    const auto run = integrate(cfg, grid, t_max, pick_dt(grid, cfg, t_max));
    const double v = visibility_numeric(run, cfg).points.back().v;
    CHECK(v == doctest::Approx(visibility_time(cfg, t_max)).epsilon(0.015));

    auto up = cfg;
    up.direction = Direction::Upward;
    // at these parameters the two directions differ measurably
    CHECK(std::fabs(visibility_time_limit(up) - visibility_time_limit(cfg)) /
              visibility_time_limit(cfg) > 1e-3);
}

TEST_CASE("discretization and step-size convergence") {
    const auto cfg = make_config_delta(1.0, 1e-2, 100.0, 1e-2);
    const double t_max = 8.0;
    const auto grid1 = build_grid(cfg, t_max, 6700);
    const auto grid2 = build_grid(cfg, t_max, 13400);
    const double dt = pick_dt(grid1, cfg, t_max);

    const double v1 = visibility_numeric(integrate(cfg, grid1, t_max, dt), cfg)
                          .points.back()
                          .v;
    const double v2 = visibility_numeric(integrate(cfg, grid2, t_max, dt), cfg)
                          .points.back()
                          .v;
    CHECK(std::fabs(v2 - v1) / v1 < 0.002);

    const double v_half =
        visibility_numeric(integrate(cfg, grid1, t_max, 0.5 * dt), cfg)
            .points.back()
            .v;
    CHECK(std::fabs(v_half - v1) / v1 < 5e-4);
}

TEST_CASE("lab-frame evolution agrees with the rotating-frame stepper") {
    // small w0 so the absolute phases are resolvable
    const auto cfg = make_config(1.0, 1.2, 5.0, 0.3);
    const double t_max = 2.0;
    const auto grid = build_grid(cfg, t_max, 2400);

    const auto rot = integrate(cfg, grid, t_max, pick_dt(grid, cfg, t_max),
                               {0, Execution::Parallel});

    // direct integration with all absolute phases kept: w1 = 2 w0, w2 = w0,
    // E_i = offset + lam_i (w1+w2)/2
    const std::size_t n = grid.n_modes();
    const double offset = 7.0;
    struct Lab {
        Cplx c;
        std::vector<Cplx> b;
        double e_atom;                 // E + nu/2
        std::vector<double> e_field;   // E - nu/2 + w
    };
    Lab lab[2];
    double fastest = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double lam = i == 0 ? cfg.lambda1 : cfg.lambda2;
        const double nu = lam * cfg.w0;
        const double e = offset + 1.5 * lam * cfg.w0;
        lab[i].c = Cplx(1.0 / std::sqrt(2.0), 0.0);
        lab[i].b.assign(n, Cplx(0.0, 0.0));
        lab[i].e_atom = e + 0.5 * nu;
        lab[i].e_field.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            lab[i].e_field[k] = e - 0.5 * nu + grid.freq[k];
            fastest = std::max(fastest, std::fabs(lab[i].e_field[k]));
        }
        fastest = std::max(fastest, lab[i].e_atom);
    }
    const double dt = t_max / std::ceil(t_max * fastest / 0.05);
    const auto steps = static_cast<std::size_t>(std::round(t_max / dt));
    const Cplx im(0.0, 1.0);
    for (int i = 0; i < 2; ++i) {
        const auto& g = i == 0 ? grid.g1 : grid.g2;
        auto deriv = [&](const Cplx& c, const std::vector<Cplx>& b, Cplx& dc,
                         std::vector<Cplx>& db) {
            Cplx sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                sum += g[k] * b[k];
                db[k] = -im * (lab[i].e_field[k] * b[k] + std::conj(g[k]) * c);
            }
            dc = -im * (lab[i].e_atom * c + sum);
        };
        std::vector<Cplx> db1(n), db2(n), db3(n), db4(n), tmp(n);
        Cplx dc1, dc2, dc3, dc4;
        for (std::size_t s = 0; s < steps; ++s) {
            deriv(lab[i].c, lab[i].b, dc1, db1);
            for (std::size_t k = 0; k < n; ++k)
                tmp[k] = lab[i].b[k] + 0.5 * dt * db1[k];
            deriv(lab[i].c + 0.5 * dt * dc1, tmp, dc2, db2);
            for (std::size_t k = 0; k < n; ++k)
                tmp[k] = lab[i].b[k] + 0.5 * dt * db2[k];
            deriv(lab[i].c + 0.5 * dt * dc2, tmp, dc3, db3);
            for (std::size_t k = 0; k < n; ++k)
                tmp[k] = lab[i].b[k] + dt * db3[k];
            deriv(lab[i].c + dt * dc3, tmp, dc4, db4);
            lab[i].c += dt / 6.0 * (dc1 + 2.0 * dc2 + 2.0 * dc3 + dc4);
            for (std::size_t k = 0; k < n; ++k)
                lab[i].b[k] +=
                    dt / 6.0 * (db1[k] + 2.0 * db2[k] + 2.0 * db3[k] + db4[k]);
        }
    }

    const OracleSample& last = rot.samples.back();
    CHECK(std::abs(lab[0].c) == doctest::Approx(std::abs(last.c1)).epsilon(1e-6));
    CHECK(std::abs(lab[1].c) == doctest::Approx(std::abs(last.c2)).epsilon(1e-6));

    Cplx contr = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        contr += std::conj(lab[0].b[k]) * lab[1].b[k];
    const double v_lab = 2.0 * std::abs(std::conj(lab[0].c) * lab[1].c + contr);
    const double v_rot = visibility_numeric(rot, cfg).points.back().v;
    CHECK(v_lab == doctest::Approx(v_rot).epsilon(1e-6));
}

TEST_CASE("overlap quadrature: limits and branch-switch scan") {
    const auto same = make_config(1.0, 1.0, 10.0, 0.0);
    const Cplx inf = overlap_quadrature(same, 1e3, 1e-10);
    CHECK(inf.real() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(overlap_quadrature(same, 0.0, 1e-10)) < 1e-10);

    const auto cfg = make_config(0.8, 1.3, 5.0, 0.3);
    for (double t : {0.15, 0.3, 0.6}) {  // 0.5 tau, tau, 2 tau
        const Cplx q = overlap_quadrature(cfg, t, 1e-10);
        CHECK(std::abs(q - photon_overlap(cfg, t)) < 1e-8);
    }
    CHECK_THROWS_AS(overlap_quadrature(cfg, 1.0, -1.0), ConfigError);
}

TEST_CASE("overlap quadrature against a single windowed integral") {
    // blunt cross-check: integrate conj(C1w) C2w over one wide window with the
    // product form, away from the wavefront where tails decay fast
    const auto cfg = make_config(0.8, 1.3, 5.0, 0.3);
    const double t = 1.7;
    const Cplx direct =
        0.5 * integrate_gk(
                  [&](double w) {
                      return std::conj(spectral_amplitude(cfg, 1, w, t)) *
                             spectral_amplitude(cfg, 2, w, t);
                  },
                  -3000.0, 3000.0, 1e-8) ;
    CHECK(std::abs(direct - photon_overlap(cfg, t)) < 1e-5);
    CHECK(std::abs(direct - overlap_quadrature(cfg, t, 1e-10)) < 1e-5);
}

TEST_CASE("all-direction grid resolves the width convention") {
    const auto cfg = make_config(1.0, 1.05, 200.0, 0.05);
    const double t_max = 8.0;
    const auto grid = build_grid_3d(cfg, t_max, 3500, 16, 15.0);
    const double dt = pick_dt(grid, cfg, t_max);
    const auto run = integrate(cfg, grid, t_max, dt);
    const double v = visibility_numeric(run, cfg).points.back().v;

    const double dyn = visibility_3d_time_limit(cfg);
    const double printed = visibility_3d_closed(cfg);
    CHECK(std::fabs(v - dyn) / dyn < 0.06);
    CHECK(std::fabs(v - printed) / printed > 0.2);
}
