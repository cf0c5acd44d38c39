// Acceptance gate: ten checks tying the laboratory to its closed-form
// oracles and cross-method references. Each criterion prints exactly one
// [PASS]/[FAIL] line with the measured numbers and the pinned tolerance;
// the binary exits nonzero if any line reads FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mol_reference.hpp"
#include "rhs/analytic.hpp"
#include "rhs/core.hpp"
#include "rhs/diagnostics.hpp"
#include "rhs/dynamics.hpp"
#include "rhs/reference.hpp"
#include "rhs/scenario.hpp"
#include "rhs/velocity_solver.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSlopeCap = 1e3;  // blow-up cap shared by the runs below

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string text(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

double sine_u0(double x) { return std::sin(2.0 * kPi * x); }
double sine_w0(double x) { return 2.0 * kPi * std::cos(2.0 * kPi * x); }

// 1. The damped-Newton solver against the coordinate-descent minimizer
//    on random small instances.
Outcome criterion_solver_oracle() {
    constexpr double kTol = 1e-6;
    constexpr double kBudgetSeconds = 60.0;
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(4242);
    const int r_cycle[] = {2, 4, 6};
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
        const rhs::Exponent r(r_cycle[k % 3]);
        const rhs::ParticleState state = rhs::random_instance(rng, n);
        const auto sol = rhs::solve_velocity(state.p, state, r);
        const rhs::BruteForceResult ref = rhs::brute_force_velocity(state, r);
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst,
                             std::fabs(sol.profile.values[i + 1] - ref.u[i]));
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    Outcome out;
    out.pass = worst <= kTol && seconds < kBudgetSeconds;
    out.detail = text("max |u_newton - u_brute| %.3g (tol %g), "
                      "50 instances in %.2f s (budget %g s)",
                      worst, kTol, seconds, kBudgetSeconds);
    return out;
}

// 2. Relative energy drift within the moderate-slope window for every
//    scenario/exponent pair of the experiment suite at dt = 1e-3.
Outcome criterion_energy_conservation() {
    constexpr double kTol = 1e-6;
    constexpr double kWindow = 1e2;
    struct Case {
        const char* scenario;
        int r;
    };
    const Case cases[] = {{"one_point", 2},  {"symmetric", 2},
                          {"chasing", 2},    {"asymmetric", 2},
                          {"chasing", 4},    {"smooth_sine", 2}};
    double worst = 0.0;
    const char* worst_name = "";
    for (const Case& c : cases) {
        const rhs::Scenario scn = rhs::make_scenario(c.scenario);
        rhs::IntegratorConfig cfg;
        cfg.t_end = scn.default_t_end;
        cfg.blowup_slope_cap = kSlopeCap;
        const rhs::Exponent r(c.r);
        const rhs::Trajectory traj =
            rhs::integrate(rhs::initial_state(scn, r), r, cfg);
        const double drift = rhs::energy_drift(traj, kWindow);
        if (drift > worst) {
            worst = drift;
            worst_name = c.scenario;
        }
    }
    Outcome out;
    out.pass = worst <= kTol;
    out.detail = text("worst relative drift %.3g (tol %g) over 6 runs at "
                      "dt=1e-3, |s| <= %g (worst: %s)",
                      worst, kTol, kWindow, worst_name);
    return out;
}

// 3. The per-interval weak-form quantity stays flat across intervals away
//    from blow-up, and its spread shrinks at the order of the centered
//    time differencing when the recording interval is refined.
Outcome criterion_weak_form() {
    constexpr double kTol = 1e-4;
    constexpr double kMinOrder = 1.5;
    struct Case {
        const char* scenario;
        int r;
        double dt;
        double window;  // max |s| over which the spread must stay tight
    };
    // The sine run steepens from max|s| ~ 6.3, so its window must sit
    // above that; the finer recording step keeps the centered-difference
    // truncation of d/dt s^(r-1) well below the spread budget there.
    const Case cases[] = {{"one_point", 2, 1e-3, 4.0},
                          {"symmetric", 2, 1e-3, 4.0},
                          {"chasing", 2, 1e-3, 4.0},
                          {"asymmetric", 2, 1e-3, 4.0},
                          {"chasing", 4, 1e-3, 2.5},
                          {"smooth_sine", 2, 2.5e-4, 10.0}};
    double worst = 0.0;
    const char* worst_name = "";
    for (const Case& c : cases) {
        const rhs::Scenario scn = rhs::make_scenario(c.scenario);
        rhs::IntegratorConfig cfg;
        cfg.dt = c.dt;
        cfg.t_end = scn.default_t_end;
        cfg.record_every = 1;
        cfg.blowup_slope_cap = kSlopeCap;
        const rhs::Exponent r(c.r);
        const rhs::Trajectory traj =
            rhs::integrate(rhs::initial_state(scn, r), r, cfg);
        const rhs::WeakFormReport report = rhs::weak_constant_check(traj);
        int used = 0;
        for (std::size_t j = 0; j < report.size(); ++j) {
            if (traj.samples[j + 1].max_abs_slope > c.window) continue;
            ++used;
            const double rel = report[j].spread /
                               std::max(1.0, std::fabs(report[j].c_estimate));
            if (rel > worst) {
                worst = rel;
                worst_name = c.scenario;
            }
        }
        if (used == 0) {
            Outcome out;
            out.detail = text("no samples inside the |s| window for %s",
                              c.scenario);
            return out;
        }
    }
    // Refinement leg: same trajectory, recording stride halved; the
    // differencing of s^(r-1) is centered, so the spread should drop by
    // about 2^2.
    auto spread_at_stride = [](int stride) {
        const rhs::Scenario scn = rhs::make_scenario("chasing");
        rhs::IntegratorConfig cfg;
        cfg.t_end = 0.8;
        cfg.record_every = stride;
        cfg.blowup_slope_cap = kSlopeCap;
        const rhs::Exponent r(4);
        const rhs::Trajectory traj =
            rhs::integrate(rhs::initial_state(scn, r), r, cfg);
        const rhs::WeakFormReport report = rhs::weak_constant_check(traj);
        double worst_spread = 0.0;
        for (const rhs::WeakFormSample& s : report) {
            worst_spread = std::max(worst_spread, s.spread);
        }
        return worst_spread;
    };
    const double coarse = spread_at_stride(8);
    const double fine = spread_at_stride(4);
    const double order = std::log2(coarse / fine);
    Outcome out;
    out.pass = worst <= kTol && order >= kMinOrder;
    out.detail = text("worst spread/max(1,|c|) %.3g (tol %g) over 6 runs "
                      "(worst: %s); refinement order %.2f (>= %g)",
                      worst, kTol, worst_name, order, kMinOrder);
    return out;
}

// 4. At r = 2 the general momentum derivative and the classical
//    Hunter-Saxton form agree to roundoff on random solved states.
Outcome criterion_r2_equivalence() {
    constexpr double kTol = 1e-13;
    std::mt19937 rng(2025);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 6);
        const rhs::ParticleState state = rhs::random_instance(rng, n);
        const rhs::Exponent r(2);
        const auto sol = rhs::solve_velocity(state.p, state, r);
        worst = std::max(worst,
                         rhs::r2_equivalence_check(state, sol.profile, r));
    }
    Outcome out;
    out.pass = worst <= kTol;
    out.detail =
        text("max formula gap %.3g (tol %g) on 100 solved states", worst, kTol);
    return out;
}

// 5. The integrated one-particle trajectory stays on the closed-form
//    energy level set u(Q), including the hand-derived midpoint value 1/6.
Outcome criterion_one_point() {
    constexpr double kTrajTol = 1e-6;
    constexpr double kFormulaTol = 1e-12;
    const rhs::Exponent r(2);
    const rhs::OnePointModel model = rhs::onepoint_model(0.1, 0.1, r);
    const rhs::Scenario scn = rhs::make_scenario("one_point");
    rhs::IntegratorConfig cfg;
    cfg.t_end = scn.default_t_end;
    cfg.record_every = 1;
    cfg.blowup_slope_cap = kSlopeCap;
    const rhs::Trajectory traj =
        rhs::integrate(rhs::initial_state(scn, r), r, cfg);
    double worst = 0.0;
    int used = 0;
    for (const rhs::Sample& s : traj.samples) {
        if (s.max_abs_slope >= kSlopeCap) continue;
        ++used;
        worst = std::max(worst,
                         std::fabs(s.u[0] - rhs::onepoint_velocity(s.q[0], model)));
    }
    // Midpoint value: formula directly, and the trajectory interpolated
    // in Q across the bracketing samples.
    const double mid_formula =
        std::fabs(rhs::onepoint_velocity(0.5, model) - 1.0 / 6.0);
    double mid_traj = -1.0;
    for (std::size_t k = 0; k + 1 < traj.samples.size(); ++k) {
        const double q0 = traj.samples[k].q[0];
        const double q1 = traj.samples[k + 1].q[0];
        if (q0 <= 0.5 && 0.5 < q1) {
            const double w = (0.5 - q0) / (q1 - q0);
            const double u =
                traj.samples[k].u[0] +
                w * (traj.samples[k + 1].u[0] - traj.samples[k].u[0]);
            mid_traj = std::fabs(u - 1.0 / 6.0);
            break;
        }
    }
    Outcome out;
    out.pass = worst <= kTrajTol && mid_formula <= kFormulaTol &&
               mid_traj >= 0.0 && mid_traj <= kTrajTol;
    out.detail = text("max |u - u(Q)| %.3g (tol %g) on %d samples; "
                      "u(1/2)-1/6: formula %.2g, trajectory %.2g",
                      worst, kTrajTol, used, mid_formula, mid_traj);
    return out;
}

// 6. Gradient blow-up times: the Eulerian grid estimates land near
//    r / (2 pi) for the sine data, and the particle cap-crossing times
//    grow strictly with r.
Outcome criterion_blowup_times() {
    constexpr double kRelTol = 0.10;
    double worst_rel = 0.0;
    for (int r : {2, 4, 8}) {
        rhs::testing::MolConfig cfg;
        cfg.x_lo = -0.75;
        cfg.x_hi = 2.0;
        cfg.dx = 5e-4;
        cfg.r = r;
        const double expected = r / (2.0 * kPi);
        const rhs::testing::MolBlowupFit fit = rhs::testing::mol_blowup_estimate(
            sine_w0, cfg, 0.375 * expected, 20);
        worst_rel =
            std::max(worst_rel, std::fabs(fit.t_estimate - expected) / expected);
    }
    const rhs::Scenario scn = rhs::make_scenario("one_point");
    rhs::PointData data{scn.q, scn.u, scn.domain};
    rhs::IntegratorConfig cfg;
    cfg.t_end = 50.0;
    cfg.blowup_slope_cap = kSlopeCap;
    const std::vector<int> r_list = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    const rhs::BlowupSweepResult sweep =
        rhs::blowup_scaling_sweep(data, r_list, cfg);
    bool all_blew = true;
    bool increasing = true;
    for (std::size_t k = 0; k < sweep.rows.size(); ++k) {
        all_blew = all_blew && sweep.rows[k].blew_up;
        if (k > 0 && !(sweep.rows[k].t_blowup > sweep.rows[k - 1].t_blowup)) {
            increasing = false;
        }
    }
    Outcome out;
    out.pass = worst_rel <= kRelTol && all_blew && increasing;
    out.detail = text("grid estimate off by %.2f%% (tol %.0f%%) for r in "
                      "{2,4,8}; particle times %s over {2,..,20}",
                      100.0 * worst_rel, 100.0 * kRelTol,
                      (all_blew && increasing) ? "strictly increasing"
                                               : "NOT strictly increasing");
    return out;
}

// 7. The characteristic construction against an independent Eulerian
//    solve, and x-independence of the pointwise evolution form at the
//    order of the stencils.
Outcome criterion_characteristics_vs_grid() {
    constexpr double kTol = 1e-4;
    constexpr double kMinOrder = 3.5;
    const rhs::Exponent r(4);
    const rhs::CharacteristicSolution sol(
        sine_u0, sine_w0, r, rhs::Domain{0.0, 1.0});
    const double u_char = rhs::classical_evaluate(sol, 0.25, 0.1);
    rhs::testing::MolConfig cfg;
    cfg.r = 4;
    const rhs::testing::MolState state =
        rhs::testing::mol_integrate(sine_w0, cfg, 0.1);
    const double u_grid = rhs::testing::mol_velocity_at(state, 0.25);
    const double gap = std::fabs(u_char - u_grid);

    const auto u_fun = [&sol](double x, double t) {
        return rhs::classical_evaluate(sol, x, t);
    };
    const double xs[] = {0.2, 0.35, 0.55, 0.7};
    const auto spread_at = [&](double h) {
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (double x : xs) {
            const double v = rhs::evolution_lhs_fd(u_fun, r, x, 0.1, h);
            lo = first ? v : std::min(lo, v);
            hi = first ? v : std::max(hi, v);
            first = false;
        }
        return hi - lo;
    };
    const double coarse = spread_at(0.04);
    const double fine = spread_at(0.02);
    const double order = std::log2(coarse / fine);
    Outcome out;
    out.pass = gap <= kTol && order >= kMinOrder;
    out.detail = text("u(0.25, 0.1) gap %.3g (tol %g); residual spread "
                      "%.2g -> %.2g, order %.2f (>= %g)",
                      gap, kTol, coarse, fine, order, kMinOrder);
    return out;
}

// 8. Convergence to the limiting tent dynamics as r grows, and the limit
//    trajectory never reaching the boundary.
Outcome criterion_infinity_limit() {
    rhs::IntegratorConfig cfg;
    cfg.blowup_slope_cap = kSlopeCap;
    const std::vector<int> r_list = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    const auto rows =
        rhs::infinity_convergence_sweep(0.1, 0.1, r_list, 5.0, cfg);
    bool decreasing = true;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (!(rows[k].deviation < rows[k - 1].deviation)) decreasing = false;
    }
    // Q(t) < 1 is decided on the boundary gap 1 - Q(t), which stays
    // representable long after the position itself rounds to 1.0.
    const double z = rhs::infinity_onepoint_slope(0.1, 0.1);
    double min_gap = 1.0;
    for (double t = 0.0; t <= 50.0; t += 0.5) {
        min_gap =
            std::min(min_gap, rhs::infinity_onepoint_boundary_gap(z, 0.1, t));
    }
    Outcome out;
    out.pass = decreasing && min_gap > 0.0;
    out.detail = text("deviation %.3g -> %.3g over r in {2,..,20} (%s); "
                      "boundary gap stays >= %.3g through t = 50",
                      rows.front().deviation, rows.back().deviation,
                      decreasing ? "monotone" : "NOT monotone", min_gap);
    return out;
}

// 9. Finite-difference residuals of the closed-form invariant families
//    converge at the stencil order and sit below the floor at h = 1e-3.
Outcome criterion_symmetry_residuals() {
    constexpr double kMinOrder = 3.5;
    constexpr double kExactFloor = 1e-12;
    constexpr double kFloor = 1e-8;
    const rhs::Exponent r(2);
    const rhs::SymmetryFamily families[] = {
        rhs::SymmetryFamily::x1, rhs::SymmetryFamily::x2,
        rhs::SymmetryFamily::x3, rhs::SymmetryFamily::x6};
    const char* names[] = {"x1", "x2", "x3", "x6"};
    double worst_order = 1e9;
    double worst_floor = 0.0;
    const char* worst_name = "";
    bool ok = true;
    for (std::size_t k = 0; k < 4; ++k) {
        // x6 needs c1 > 0 for a nontrivial profile; the others keep
        // c1 = 0 so their validity windows contain the probe grids.
        rhs::SymmetryConstants c;
        c.c1 = families[k] == rhs::SymmetryFamily::x6 ? 1.0 : 0.0;
        c.c2 = 1.0;
        const double coarse = rhs::symmetry_residual(families[k], c, r, 0.04);
        const double fine = rhs::symmetry_residual(families[k], c, r, 0.02);
        const double floor = rhs::symmetry_residual(families[k], c, r, 1e-3);
        const bool exact = coarse <= kExactFloor && fine <= kExactFloor;
        if (!exact) {
            const double order = std::log2(coarse / fine);
            if (order < worst_order) worst_order = order;
            ok = ok && order >= kMinOrder;
        }
        if (floor > worst_floor) {
            worst_floor = floor;
            worst_name = names[k];
        }
        ok = ok && floor <= kFloor;
    }
    Outcome out;
    out.pass = ok;
    out.detail = text("worst refinement order %.2f (>= %g); worst residual "
                      "at h=1e-3: %.3g (tol %g, family %s)",
                      worst_order, kMinOrder, worst_floor, kFloor, worst_name);
    return out;
}

// 10. RK4 order against the one-particle reduction: halving dt divides
//     the endpoint error by about 16.
Outcome criterion_rk4_order() {
    constexpr double kLo = 12.8;  // 16 - 20%
    constexpr double kHi = 19.2;  // 16 + 20%
    const double t_end = 4.0;  // well before the one-point blow-up (~7.5)
    const rhs::Exponent r(2);
    const rhs::OnePointModel model = rhs::onepoint_model(0.1, 0.1, r);
    // Reference: the reduced scalar ODE dQ/dt = u(Q) integrated with the
    // same classical RK4 at a step 100x finer than the finest run below,
    // making the reference error negligible against the measured ones.
    const auto level_set = [&model](double q) {
        return rhs::onepoint_velocity(q, model);
    };
    const auto scalar_rk4 = [&level_set](double q, double t_final, double dt) {
        const long long steps = std::llround(t_final / dt);
        for (long long k = 0; k < steps; ++k) {
            const double k1 = level_set(q);
            const double k2 = level_set(q + 0.5 * dt * k1);
            const double k3 = level_set(q + 0.5 * dt * k2);
            const double k4 = level_set(q + dt * k3);
            q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        return q;
    };
    const double q_ref = scalar_rk4(0.1, t_end, 5e-4);
    const rhs::Scenario scn = rhs::make_scenario("one_point");
    const auto particle_q = [&](double dt) {
        rhs::IntegratorConfig cfg;
        cfg.dt = dt;
        cfg.t_end = t_end;
        cfg.record_every = 1000000;  // initial + final samples suffice
        cfg.blowup_slope_cap = kSlopeCap;
        const rhs::Trajectory traj =
            rhs::integrate(rhs::initial_state(scn, r), r, cfg);
        return traj.samples.back().q[0];
    };
    const double e_coarse = std::fabs(particle_q(0.1) - q_ref);
    const double e_fine = std::fabs(particle_q(0.05) - q_ref);
    const double ratio = e_coarse / e_fine;
    Outcome out;
    out.pass = ratio >= kLo && ratio <= kHi;
    out.detail = text("endpoint error %.3g -> %.3g for dt 0.1 -> 0.05, "
                      "ratio %.2f (window [%g, %g])",
                      e_coarse, e_fine, ratio, kLo, kHi);
    return out;
}

}  // namespace

int main() {
    struct Entry {
        const char* title;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {"velocity solver vs brute-force minimizer", criterion_solver_oracle},
        {"energy conservation across the scenario suite",
         criterion_energy_conservation},
        {"weak-form constant flat across intervals", criterion_weak_form},
        {"r=2 momentum-equation equivalence", criterion_r2_equivalence},
        {"one-point closed form along the trajectory", criterion_one_point},
        {"gradient blow-up times", criterion_blowup_times},
        {"characteristics vs independent grid solve",
         criterion_characteristics_vs_grid},
        {"limiting tent dynamics as r grows", criterion_infinity_limit},
        {"invariant-family residual convergence", criterion_symmetry_residuals},
        {"RK4 convergence order", criterion_rk4_order},
    };
    bool all_pass = true;
    for (std::size_t k = 0; k < sizeof entries / sizeof entries[0]; ++k) {
        Outcome out;
        try {
            out = entries[k].fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = text("exception: %s", e.what());
        }
        std::printf("[%s] %2zu. %s: %s\n", out.pass ? "PASS" : "FAIL", k + 1,
                    entries[k].title, out.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && out.pass;
    }
    if (!all_pass) {
        std::printf("acceptance: FAIL\n");
        return 1;
    }
    std::printf("acceptance: PASS\n");
    return 0;
}
