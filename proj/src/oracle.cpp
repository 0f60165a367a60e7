#include "dilacoh/oracle.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dilacoh/quadrature.hpp"

namespace dilacoh {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr Cplx kI{0.0, 1.0};
constexpr std::size_t kBlock = 2048;  // reduction block; fixes the summation order

double max_gamma(const PhysicsConfig& cfg) {
    return std::max(cfg.gamma1(), cfg.gamma2());
}

void check_grid_guard(double spacing, double t_max) {
    if (spacing * t_max > 0.1 + 1e-12)
        throw GuardError(
            "mode spacing too coarse for t_max (recurrence guard "
            "spacing*t_max <= 0.1); increase n_modes");
}

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration.
void gauss_legendre_01(std::size_t n, std::vector<double>& x,
                       std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = std::cos(kPi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double p0 = 0.0, p1 = 0.0;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            const double dp = n * (t * p0 - p1) / (t * t - 1.0);
            const double t_old = t;
            t = t_old - p0 / dp;
            if (std::fabs(t - t_old) < 1e-15) break;
        }
        p0 = 1.0;
        p1 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
        }
        const double dp = n * (t * p0 - p1) / (t * t - 1.0);
        x[i] = 0.5 * (1.0 - t);  // descending cos order -> ascending in [0,1]
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

// State of one branch in structure-of-arrays layout for the RK4 kernel.
struct BranchState {
    std::vector<double> br, bi;      // current mode amplitudes
    std::vector<double> tr, ti;      // stage input / scratch
    std::vector<double> ar, ai;      // accumulator
    std::vector<double> delta;       // nu - w_k
    std::vector<double> gr, gi;      // couplings
    Cplx c, ctmp, cacc;
    std::size_t n = 0;

    void init(const PhysicsConfig& cfg, int branch, const ModeGrid& grid) {
        n = grid.n_modes();
        br.assign(n, 0.0);
        bi.assign(n, 0.0);
        tr.assign(n, 0.0);
        ti.assign(n, 0.0);
        ar.assign(n, 0.0);
        ai.assign(n, 0.0);
        delta.resize(n);
        gr.resize(n);
        gi.resize(n);
        const double nu = branch == 1 ? cfg.nu1() : cfg.nu2();
        const auto& g = branch == 1 ? grid.g1 : grid.g2;
        for (std::size_t k = 0; k < n; ++k) {
            delta[k] = nu - grid.freq[k];
            gr[k] = g[k].real();
            gi[k] = g[k].imag();
        }
        c = Cplx(1.0 / std::sqrt(2.0), 0.0);
    }

    double mode_norm() const {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += br[k] * br[k] + bi[k] * bi[k];
        return s;
    }
};

// Stage control shared by both branches of one RK4 step. The scalar stage
// inputs live here so a worker thread can process blocks of either branch.
struct StageControl {
    const double* in_r[2];
    const double* in_i[2];
    double cr[2], ci[2];
    double acc_w = 0.0, step_w = 0.0;
    bool make_next = true;
};

constexpr double kAccW[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
constexpr double kStepW[4] = {0.5, 0.5, 1.0, 0.0};

// One block of one RK4 stage: accumulates acc_w * dB, writes the next stage
// input B0 + step_w * dB, and returns the block's coupling sum (for dC).
// Block-sequential summation downstream keeps results independent of the
// thread count.
Cplx stage_block(BranchState& s, const StageControl& ctl, int b,
                 std::size_t k0, std::size_t k1) {
    const double* in_r = ctl.in_r[b];
    const double* in_i = ctl.in_i[b];
    const double cr = ctl.cr[b], ci = ctl.ci[b];
    const double acc_w = ctl.acc_w, step_w = ctl.step_w;
    const bool make_next = ctl.make_next;
    double sr = 0.0, si = 0.0;
    for (std::size_t k = k0; k < k1; ++k) {
        const double xr = in_r[k], xi = in_i[k];
        const double d = s.delta[k];
        const double a = s.gr[k], bb = s.gi[k];
        // dB = i*delta*B - i*conj(G)*C
        const double dbr = -d * xi - bb * cr + a * ci;
        const double dbi = d * xr - bb * ci - a * cr;
        s.ar[k] += acc_w * dbr;
        s.ai[k] += acc_w * dbi;
        if (make_next) {
            s.tr[k] = s.br[k] + step_w * dbr;
            s.ti[k] = s.bi[k] + step_w * dbi;
        }
        // sum G * B_stage
        sr += a * xr - bb * xi;
        si += a * xi + bb * xr;
    }
    return {sr, si};
}

void load_stage(StageControl& ctl, BranchState* const br[2], int st,
                double dt) {
    ctl.acc_w = kAccW[st] * dt;
    ctl.step_w = kStepW[st] * dt;
    ctl.make_next = st < 3;
    for (int b = 0; b < 2; ++b) {
        BranchState* s = br[b];
        ctl.in_r[b] = st == 0 ? s->br.data() : s->tr.data();
        ctl.in_i[b] = st == 0 ? s->bi.data() : s->ti.data();
        ctl.cr[b] = s->ctmp.real();
        ctl.ci[b] = s->ctmp.imag();
    }
}

// Sums the block partials in fixed order, advances the scalar amplitudes and
// either prepares the next stage or finalizes the step.
void finish_stage(BranchState* const br[2], StageControl& ctl,
                  const std::vector<Cplx>& partials, std::size_t nb1, int st,
                  double dt) {
    for (int b = 0; b < 2; ++b) {
        BranchState* s = br[b];
        const std::size_t lo = b == 0 ? 0 : nb1;
        const std::size_t hi = b == 0 ? nb1 : partials.size();
        Cplx sum(0.0, 0.0);
        for (std::size_t blk = lo; blk < hi; ++blk) sum += partials[blk];
        const Cplx dc = -kI * sum;
        s->cacc += kAccW[st] * dt * dc;
        if (st < 3) {
            s->ctmp = s->c + kStepW[st] * dt * dc;
        } else {
            s->br.swap(s->ar);
            s->bi.swap(s->ai);
            std::copy(s->br.begin(), s->br.end(), s->ar.begin());
            std::copy(s->bi.begin(), s->bi.end(), s->ai.begin());
            s->c = s->cacc;
            // next step's stage 1 starts from the fresh state
            s->cacc = s->c;
            s->ctmp = s->c;
        }
    }
    if (st < 3) load_stage(ctl, br, st + 1, dt);
}

Cplx contraction(const BranchState& s1, const BranchState& s2) {
    const std::size_t n = s1.n;
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    Cplx total(0.0, 0.0);
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
        const std::size_t k0 = blk * kBlock;
        const std::size_t k1 = std::min(k0 + kBlock, n);
        double sr = 0.0, si = 0.0;
        for (std::size_t k = k0; k < k1; ++k) {
            // conj(B1) * B2
            sr += s1.br[k] * s2.br[k] + s1.bi[k] * s2.bi[k];
            si += s1.br[k] * s2.bi[k] - s1.bi[k] * s2.br[k];
        }
        total += Cplx(sr, si);
    }
    return total;
}

OracleRun run_integration(const PhysicsConfig& cfg, const ModeGrid& grid,
                          double t_max, double dt, std::size_t sample_stride,
                          Execution exec, double norm_drift_guard) {
    cfg.validate();
    if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    const double half_window = 0.5 * (grid.w_hi - grid.w_lo);
    const double dt_max = 0.05 / std::max(max_gamma(cfg), half_window);
    if (dt > dt_max * (1.0 + 1e-12))
        throw GuardError("dt too large to resolve the fastest phase; need dt <= " +
                         std::to_string(dt_max));
    check_grid_guard(grid.spacing, t_max);

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
    if (sample_stride == 0)
        sample_stride = std::max<std::size_t>(1, n_steps / 1000);

    BranchState s1, s2;
    s1.init(cfg, 1, grid);
    s2.init(cfg, 2, grid);
    BranchState* branches[2] = {&s1, &s2};
    const std::size_t nb1 = (s1.n + kBlock - 1) / kBlock;
    const std::size_t nblocks = 2 * nb1;
    std::vector<Cplx> partials(nblocks);

    const bool parallel = exec == Execution::Parallel;
    const double dw0 = cfg.delta() * cfg.w0;

    OracleRun run;
    run.dt = dt;
    run.samples.reserve(n_steps / sample_stride + 2);

    const auto record = [&](double t) {
        OracleSample smp;
        smp.t = t;
        smp.c1 = s1.c;
        smp.c2 = s2.c;
        // conj(C1k) C2k = e^{i(nu1-nu2)t} conj(B1k) B2k
        smp.overlap = std::exp(-kI * (dw0 * t)) * contraction(s1, s2);
        smp.norm1 = std::norm(s1.c) + s1.mode_norm();
        smp.norm2 = std::norm(s2.c) + s2.mode_norm();
        run.samples.push_back(smp);
    };

    s1.cacc = s1.ctmp = s1.c;
    s2.cacc = s2.ctmp = s2.c;
    record(0.0);

    StageControl ctl;
    bool stop = false;
    std::string guard_message;

    // One parallel region for the whole integration; every thread executes
    // the same step/stage sequence, blocks of both branches are shared work.
    const auto sample_and_guard = [&](std::size_t i) {
        const double t = static_cast<double>(i + 1) * dt;
        if ((i + 1) % sample_stride == 0 || i + 1 == n_steps) {
            record(t);
            const OracleSample& smp = run.samples.back();
            const double drift = std::max(std::fabs(smp.norm1 - 0.5),
                                          std::fabs(smp.norm2 - 0.5));
            if (drift > norm_drift_guard * std::max(t, 1.0)) {
                stop = true;
                guard_message = "norm drift exceeds guard; reduce dt";
            }
        }
    };

    if (parallel) {
#pragma omp parallel
        {
            for (std::size_t i = 0; i < n_steps; ++i) {
#pragma omp single
                load_stage(ctl, branches, 0, dt);
                for (int st = 0; st < 4; ++st) {
#pragma omp for schedule(static)
                    for (long long blk = 0;
                         blk < static_cast<long long>(nblocks); ++blk) {
                        const int b = blk < static_cast<long long>(nb1) ? 0 : 1;
                        const auto local = static_cast<std::size_t>(
                            b == 0 ? blk : blk - static_cast<long long>(nb1));
                        const std::size_t k0 = local * kBlock;
                        const std::size_t k1 =
                            std::min(k0 + kBlock, branches[b]->n);
                        partials[blk] =
                            stage_block(*branches[b], ctl, b, k0, k1);
                    }
#pragma omp single
                    finish_stage(branches, ctl, partials, nb1, st, dt);
                }
#pragma omp single
                sample_and_guard(i);
                if (stop) break;
            }
        }
    } else {
        for (std::size_t i = 0; i < n_steps && !stop; ++i) {
            load_stage(ctl, branches, 0, dt);
            for (int st = 0; st < 4; ++st) {
                for (std::size_t blk = 0; blk < nblocks; ++blk) {
                    const int b = blk < nb1 ? 0 : 1;
                    const std::size_t local = b == 0 ? blk : blk - nb1;
                    const std::size_t k0 = local * kBlock;
                    const std::size_t k1 =
                        std::min(k0 + kBlock, branches[b]->n);
                    partials[blk] = stage_block(*branches[b], ctl, b, k0, k1);
                }
                finish_stage(branches, ctl, partials, nb1, st, dt);
            }
            sample_and_guard(i);
        }
    }
    if (stop) throw GuardError(guard_message);

    run.b1.resize(s1.n);
    run.b2.resize(s2.n);
    for (std::size_t k = 0; k < s1.n; ++k) {
        run.b1[k] = Cplx(s1.br[k], s1.bi[k]);
        run.b2[k] = Cplx(s2.br[k], s2.bi[k]);
    }
    return run;
}

}  // namespace

ModeGrid build_grid(const PhysicsConfig& cfg, double t_max,
                    std::size_t n_modes) {
    cfg.validate();
    if (n_modes < 2) throw ConfigError("n_modes must be >= 2");
    if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");

    ModeGrid grid;
    const double margin = 40.0 * max_gamma(cfg);
    grid.w_lo = std::min(cfg.nu1(), cfg.nu2()) - margin;
    grid.w_hi = std::max(cfg.nu1(), cfg.nu2()) + margin;
    grid.spacing = (grid.w_hi - grid.w_lo) / static_cast<double>(n_modes);
    check_grid_guard(grid.spacing, t_max);

    const double s = cfg.direction == Direction::Upward ? 1.0 : -1.0;
    const double g0 = std::sqrt(grid.spacing / (2.0 * kPi));
    grid.freq.resize(n_modes);
    grid.g1.resize(n_modes);
    grid.g2.resize(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double w = grid.w_lo + (static_cast<double>(k) + 0.5) * grid.spacing;
        grid.freq[k] = w;
        grid.g1[k] = Cplx(cfg.lambda1 * g0, 0.0);
        // C2k must carry e^{+i s w tau}; couplings enter conjugated
        grid.g2[k] = cfg.lambda2 * g0 * std::exp(-kI * (s * w * cfg.kappa_tau));
    }
    return grid;
}

ModeGrid build_grid_3d(const PhysicsConfig& cfg, double t_max,
                       std::size_t n_freq, std::size_t n_angles,
                       double window_widths) {
    cfg.validate();
    if (n_freq < 2 || n_angles < 2)
        throw ConfigError("grid sizes must be >= 2");

    const double margin = window_widths * max_gamma(cfg);
    const double w_lo = std::min(cfg.nu1(), cfg.nu2()) - margin;
    const double w_hi = std::max(cfg.nu1(), cfg.nu2()) + margin;
    const double dw = (w_hi - w_lo) / static_cast<double>(n_freq);
    check_grid_guard(dw, t_max);

    std::vector<double> u, uw;
    gauss_legendre_01(n_angles, u, uw);

    ModeGrid grid;
    grid.spacing = dw;
    grid.w_lo = w_lo;
    grid.w_hi = w_hi;
    const std::size_t total = 2 * n_angles * n_freq;
    grid.freq.reserve(total);
    grid.g1.reserve(total);
    grid.g2.reserve(total);
    const double g0 = std::sqrt(dw / (2.0 * kPi));
    for (int hemi = 0; hemi < 2; ++hemi) {
        const double s = hemi == 0 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < n_angles; ++j) {
            // angular coupling weight: 3 u^2 du per hemisphere pair sums to 1
            const double ang = std::sqrt(1.5 * u[j] * u[j] * uw[j]);
            for (std::size_t k = 0; k < n_freq; ++k) {
                const double w = w_lo + (static_cast<double>(k) + 0.5) * dw;
                grid.freq.push_back(w);
                grid.g1.push_back(Cplx(cfg.lambda1 * g0 * ang, 0.0));
                grid.g2.push_back(cfg.lambda2 * g0 * ang *
                                  std::exp(-kI * (s * w * u[j] * cfg.kappa_tau)));
            }
        }
    }
    return grid;
}

OracleRun integrate(const PhysicsConfig& cfg, const ModeGrid& grid,
                    double t_max, double dt, IntegrateOptions opts) {
    return run_integration(cfg, grid, t_max, dt, opts.sample_stride, opts.exec,
                           opts.norm_drift_guard);
}

// Textbook RK4 on std::complex state, no blocking, no reuse of the kernel
// code path. Slow; exists to validate the optimized stepper.
OracleRun integrate_reference(const PhysicsConfig& cfg, const ModeGrid& grid,
                              double t_max, double dt,
                              std::size_t sample_stride) {
    cfg.validate();
    const double half_window = 0.5 * (grid.w_hi - grid.w_lo);
    const double dt_max = 0.05 / std::max(max_gamma(cfg), half_window);
    if (dt > dt_max * (1.0 + 1e-12))
        throw GuardError("dt too large to resolve the fastest phase");
    check_grid_guard(grid.spacing, t_max);

    const std::size_t n = grid.n_modes();
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
    if (sample_stride == 0)
        sample_stride = std::max<std::size_t>(1, n_steps / 1000);

    struct State {
        Cplx c;
        std::vector<Cplx> b;
    };
    std::vector<double> delta1(n), delta2(n);
    for (std::size_t k = 0; k < n; ++k) {
        delta1[k] = cfg.nu1() - grid.freq[k];
        delta2[k] = cfg.nu2() - grid.freq[k];
    }

    const auto deriv = [&](const State& s, const std::vector<double>& delta,
                           const std::vector<Cplx>& g) {
        State d;
        d.b.resize(n);
        Cplx sum(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            d.b[k] = kI * delta[k] * s.b[k] - kI * std::conj(g[k]) * s.c;
            sum += g[k] * s.b[k];
        }
        d.c = -kI * sum;
        return d;
    };
    const auto advance = [&](State& s, const std::vector<double>& delta,
                             const std::vector<Cplx>& g) {
        const State k1 = deriv(s, delta, g);
        State y2{s.c + 0.5 * dt * k1.c, {}};
        y2.b.resize(n);
        for (std::size_t k = 0; k < n; ++k) y2.b[k] = s.b[k] + 0.5 * dt * k1.b[k];
        const State k2 = deriv(y2, delta, g);
        State y3{s.c + 0.5 * dt * k2.c, {}};
        y3.b.resize(n);
        for (std::size_t k = 0; k < n; ++k) y3.b[k] = s.b[k] + 0.5 * dt * k2.b[k];
        const State k3 = deriv(y3, delta, g);
        State y4{s.c + dt * k3.c, {}};
        y4.b.resize(n);
        for (std::size_t k = 0; k < n; ++k) y4.b[k] = s.b[k] + dt * k3.b[k];
        const State k4 = deriv(y4, delta, g);
        s.c += dt / 6.0 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c);
        for (std::size_t k = 0; k < n; ++k)
            s.b[k] += dt / 6.0 * (k1.b[k] + 2.0 * k2.b[k] + 2.0 * k3.b[k] +
                                  k4.b[k]);
    };

    State s1{Cplx(1.0 / std::sqrt(2.0), 0.0), std::vector<Cplx>(n, 0.0)};
    State s2 = s1;
    const double dw0 = cfg.delta() * cfg.w0;

    OracleRun run;
    run.dt = dt;
    const auto record = [&](double t) {
        OracleSample smp;
        smp.t = t;
        smp.c1 = s1.c;
        smp.c2 = s2.c;
        Cplx contr(0.0, 0.0);
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            contr += std::conj(s1.b[k]) * s2.b[k];
            m1 += std::norm(s1.b[k]);
            m2 += std::norm(s2.b[k]);
        }
        smp.overlap = std::exp(-kI * (dw0 * t)) * contr;
        smp.norm1 = std::norm(s1.c) + m1;
        smp.norm2 = std::norm(s2.c) + m2;
        run.samples.push_back(smp);
    };

    record(0.0);
    for (std::size_t i = 0; i < n_steps; ++i) {
        advance(s1, delta1, grid.g1);
        advance(s2, delta2, grid.g2);
        if ((i + 1) % sample_stride == 0 || i + 1 == n_steps)
            record(static_cast<double>(i + 1) * dt);
    }
    run.b1 = s1.b;
    run.b2 = s2.b;
    return run;
}

VisibilityCurve visibility_numeric(const OracleRun& run,
                                   const PhysicsConfig& cfg) {
    VisibilityCurve curve;
    curve.source = VisibilityCurve::Source::Oracle;
    curve.abscissa_name = "t";
    curve.points.reserve(run.samples.size());
    const double dw0 = cfg.delta() * cfg.w0;
    for (const OracleSample& s : run.samples) {
        const Cplx atom =
            std::exp(-kI * (dw0 * s.t)) * std::conj(s.c1) * s.c2;
        curve.points.push_back({s.t, 2.0 * std::abs(atom + s.overlap)});
    }
    return curve;
}

double fit_decay_rate(const OracleRun& run, int branch, double t_lo,
                      double t_hi) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (const OracleSample& s : run.samples) {
        if (s.t < t_lo || s.t > t_hi) continue;
        const double a = std::abs(branch == 1 ? s.c1 : s.c2);
        if (a <= 0.0) continue;
        const double y = std::log(a);
        sx += s.t;
        sy += y;
        sxx += s.t * s.t;
        sxy += s.t * y;
        ++n;
    }
    if (n < 2) throw ConfigError("fit window contains fewer than two samples");
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    return -(static_cast<double>(n) * sxy - sx * sy) / denom;
}

Cplx overlap_quadrature(const PhysicsConfig& cfg, double t, double tol) {
    cfg.validate();
    if (!(t >= 0.0)) throw ConfigError("time must be non-negative");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");

    const double g1 = cfg.gamma1(), g2 = cfg.gamma2();
    const double nu1 = cfg.nu1(), nu2 = cfg.nu2();
    const double s = cfg.direction == Direction::Upward ? 1.0 : -1.0;
    const double tau = cfg.kappa_tau;

    // conj(C'_1w) C'_2w expands into four single-frequency terms
    //   c_j e^{i w s_j} / (conj(D1) D2),
    // with D_i = gamma_i/2 + i(nu_i - w); the w-free factors follow from
    // expanding (1 - e^{-conj(D1) t})(1 - e^{-D2 t}).
    const Cplx decay1 = std::exp(Cplx(-0.5 * g1 * t, nu1 * t));
    const Cplx decay2 = std::exp(Cplx(-0.5 * g2 * t, -nu2 * t));
    const Cplx both = decay1 * decay2;
    const double amp = cfg.lambda1 * cfg.lambda2 / (4.0 * kPi);

    struct Term {
        Cplx coeff;
        double freq;
    };
    const Term terms[3] = {{1.0 + both, s * tau},
                           {-decay1, s * tau - t},
                           {-decay2, s * tau + t}};

    const auto rational = [&](double w) {
        const Cplx d1c(0.5 * g1, -(nu1 - w));  // conj(D1)
        const Cplx d2(0.5 * g2, nu2 - w);
        return 1.0 / (d1c * d2);
    };

    const double center = 0.5 * (nu1 + nu2);
    const double r0 =
        64.0 * std::max(g1, g2) + 2.0 * std::fabs(nu1 - nu2) + 1.0;

    // e^{i s w} is evaluated relative to each interval's midpoint; at
    // w ~ 1e6 the raw phase argument would drown the tolerance in rounding
    // noise of sin/cos.
    const auto piece = [&](double s, double a, double b, double tol_piece) {
        const double mid = 0.5 * (a + b);
        const Cplx carrier = std::exp(kI * (s * mid));
        return carrier *
               integrate_gk(
                   [&](double w) {
                       return rational(w) * std::exp(kI * (s * (w - mid)));
                   },
                   a, b, tol_piece);
    };

    Cplx total(0.0, 0.0);
    for (const Term& term : terms) {
        const double budget = tol / (4.0 * amp * std::max(std::abs(term.coeff), 1e-300));
        Cplx val = piece(term.freq, center - r0, center + r0, budget / 8.0);
        double r = r0;
        bool converged = false;
        for (int shell = 0; shell < 64; ++shell) {
            // analytic tail bound past radius r: |integrand| <= 4/d^2
            const double tail =
                std::min(8.0 / r, 16.0 / (std::fabs(term.freq) * r * r + 1e-300));
            if (tail < budget) {
                converged = true;
                break;
            }
            val += piece(term.freq, center - 2.0 * r, center - r, budget / 16.0);
            val += piece(term.freq, center + r, center + 2.0 * r, budget / 16.0);
            r *= 2.0;
        }
        if (!converged)
            throw ConvergenceError("overlap_quadrature: tail did not converge");
        total += term.coeff * val;
    }
    return amp * total;
}

}  // namespace dilacoh
