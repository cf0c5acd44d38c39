#include "rhs/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "rhs/analytic.hpp"

namespace rhs {
namespace {

// Interval slopes of a recorded sample (boundary velocities are zero).
std::vector<double> sample_slopes(const Sample& smp, Domain domain) {
    const std::size_t n = smp.q.size();
    std::vector<double> s(n + 1);
    double x_prev = domain.a, u_prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = (smp.u[i] - u_prev) / (smp.q[i] - x_prev);
        x_prev = smp.q[i];
        u_prev = smp.u[i];
    }
    s[n] = (0.0 - u_prev) / (domain.b - x_prev);
    return s;
}

double median(std::vector<double> v) {
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2 == 0) {
        const double lo = *std::max_element(v.begin(), v.begin() + m);
        return 0.5 * (lo + hi);
    }
    return hi;
}

void run_parallel(std::size_t jobs, int threads,
                  const std::function<void(std::size_t)>& body) {
    unsigned workers = threads > 0
                           ? static_cast<unsigned>(threads)
                           : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, jobs == 0 ? 1 : jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < jobs;
                 i = next.fetch_add(1)) {
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

WeakFormReport weak_constant_check(const Trajectory& traj) {
    if (traj.samples.size() < 3) {
        throw std::invalid_argument(
            "weak-form check needs at least 3 recorded samples");
    }
    const int r = traj.exponent;
    WeakFormReport report;
    report.reserve(traj.samples.size() - 2);
    std::vector<double> s_prev = sample_slopes(traj.samples.front(), traj.domain);
    std::vector<double> s_mid = sample_slopes(traj.samples[1], traj.domain);
    for (std::size_t j = 1; j + 1 < traj.samples.size(); ++j) {
        const std::vector<double> s_next =
            sample_slopes(traj.samples[j + 1], traj.domain);
        const double dt2 = traj.samples[j + 1].t - traj.samples[j - 1].t;
        WeakFormSample out;
        out.t = traj.samples[j].t;
        out.w.resize(s_mid.size());
        for (std::size_t i = 0; i < s_mid.size(); ++i) {
            out.w[i] = (signed_power(s_next[i], r - 1) -
                        signed_power(s_prev[i], r - 1)) /
                           dt2 +
                       (r - 1.0) / r * abs_power(s_mid[i], r);
        }
        const auto [mn, mx] = std::minmax_element(out.w.begin(), out.w.end());
        out.spread = *mx - *mn;
        out.c_estimate = median(out.w);
        report.push_back(std::move(out));
        s_prev = std::move(s_mid);
        s_mid = s_next;
    }
    return report;
}

double r2_equivalence_check(const ParticleState& state,
                            const VelocityProfile& vel, Exponent r) {
    if (r.value() != 2) {
        throw std::invalid_argument(
            "the classical reduction only holds for r = 2");
    }
    const SlopeVector s = slopes(state, vel);
    const std::vector<double> p = momentum_from_velocity(state, vel, r);
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double sl = s[i], sr = s[i + 1];
        const double general = 0.5 * (sr * sr - sl * sl);
        const double classical = -p[i] * (sl + sr) / 2.0;
        worst = std::max(worst, std::fabs(general - classical));
    }
    return worst;
}

BlowupExtraction extract_blowup_time(const Trajectory& traj, double cap) {
    for (std::size_t j = 0; j < traj.samples.size(); ++j) {
        const double m = traj.samples[j].max_abs_slope;
        if (m < cap) continue;
        if (j == 0) return {true, traj.samples[0].t};
        const Sample& a = traj.samples[j - 1];
        const Sample& b = traj.samples[j];
        const double dm = b.max_abs_slope - a.max_abs_slope;
        const double frac = dm > 0 ? (cap - a.max_abs_slope) / dm : 1.0;
        return {true, a.t + frac * (b.t - a.t)};
    }
    if (traj.termination == Termination::blowup && !traj.samples.empty()) {
        // Died by interval collapse below the cap; the final sample is
        // the best available estimate.
        return {true, traj.samples.back().t};
    }
    return {false, 0.0};
}

BlowupSweepResult blowup_scaling_sweep(const PointData& data,
                                       const std::vector<int>& r_list,
                                       const IntegratorConfig& config,
                                       const SolverConfig& solver,
                                       int threads) {
    if (r_list.empty()) throw std::invalid_argument("empty exponent list");
    BlowupSweepResult result;
    result.rows.resize(r_list.size());
    run_parallel(r_list.size(), threads, [&](std::size_t k) {
        const Exponent r(r_list[k]);
        const ParticleState initial =
            state_from_point_data(data.q, data.u, data.domain, r);
        const Trajectory traj = integrate(initial, r, config, solver);
        const BlowupExtraction ext =
            extract_blowup_time(traj, config.blowup_slope_cap);
        result.rows[k] = {r_list[k], ext.blew_up, ext.t_blowup,
                          energy_drift(traj, 100.0)};
    });
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& row : result.rows) {
        if (!row.blew_up) continue;
        sx += row.r;
        sy += row.t_blowup;
        sxx += static_cast<double>(row.r) * row.r;
        sxy += row.r * row.t_blowup;
        ++m;
    }
    if (m >= 2) {
        const double det = m * sxx - sx * sx;
        result.slope = (m * sxy - sx * sy) / det;
        result.intercept = (sy * sxx - sx * sxy) / det;
    } else {
        result.slope = std::numeric_limits<double>::quiet_NaN();
        result.intercept = std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

std::vector<InfinityDeviationRow> infinity_convergence_sweep(
    double q0, double u0, const std::vector<int>& r_list, double t_horizon,
    const IntegratorConfig& config, const SolverConfig& solver, int threads) {
    if (r_list.empty()) throw std::invalid_argument("empty exponent list");
    const double z = infinity_onepoint_slope(q0, u0);
    std::vector<InfinityDeviationRow> rows(r_list.size());
    IntegratorConfig cfg = config;
    cfg.t_end = t_horizon;
    run_parallel(r_list.size(), threads, [&](std::size_t k) {
        const Exponent r(r_list[k]);
        ParticleState initial;
        initial.q = {q0};
        initial.p = {signed_power(z, r.value() - 1)};
        const Trajectory traj = integrate(initial, r, cfg, solver);
        double dev = 0.0;
        for (const Sample& smp : traj.samples) {
            if (smp.t > t_horizon) break;
            const double q_inf = infinity_onepoint_position(z, q0, smp.t);
            const double u_inf = infinity_onepoint_velocity(z, q0, smp.t);
            dev = std::max(dev, std::fabs(smp.q[0] - q_inf));
            dev = std::max(dev, std::fabs(smp.u[0] - u_inf));
        }
        rows[k] = {r_list[k], dev};
    });
    return rows;
}

}  // namespace rhs
