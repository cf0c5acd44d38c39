#include "rhs/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace rhs {
namespace {

void accumulate(SolverStats* stats, const SolveReport& rep) {
    if (!stats) return;
    stats->solves += 1;
    stats->newton_iterations += rep.iterations;
    stats->max_newton_iterations =
        std::max(stats->max_newton_iterations, rep.iterations);
    if (!rep.continuation_path.empty()) stats->continuation_runs += 1;
}

double max_abs_slope(const VelocityProfile& vel) {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < vel.nodes.size(); ++i) {
        m = std::max(m, std::fabs((vel.values[i + 1] - vel.values[i]) /
                                  (vel.nodes[i + 1] - vel.nodes[i])));
    }
    return m;
}

double min_gap(const ParticleState& state) {
    double g = std::numeric_limits<double>::infinity();
    double prev = state.domain.a;
    for (double qi : state.q) {
        g = std::min(g, qi - prev);
        prev = qi;
    }
    return std::min(g, state.domain.b - prev);
}

void sample_slopes(const Sample& smp, const Domain& dom,
                   std::vector<double>* out) {
    const std::size_t n = smp.q.size();
    out->resize(n + 1);
    double prev_q = dom.a, prev_u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        (*out)[i] = (smp.u[i] - prev_u) / (smp.q[i] - prev_q);
        prev_q = smp.q[i];
        prev_u = smp.u[i];
    }
    (*out)[n] = (0.0 - prev_u) / (dom.b - prev_q);
}

// Fills c_spread per sample: the spread of the per-interval weak-form
// values w_i = d/dt(s_i^(r-1)) + (r-1)/r |s_i|^r, with the time derivative
// from centered differences over neighbouring samples. End samples keep
// NaN (no centered neighbour).
void finalize_weak_spread(Trajectory* traj, const Domain& dom) {
    const int r = traj->exponent;
    auto& smp = traj->samples;
    if (smp.size() < 3) return;
    std::vector<double> s_prev, s_mid, s_next;
    for (std::size_t j = 1; j + 1 < smp.size(); ++j) {
        sample_slopes(smp[j - 1], dom, &s_prev);
        sample_slopes(smp[j], dom, &s_mid);
        sample_slopes(smp[j + 1], dom, &s_next);
        const double dt2 = smp[j + 1].t - smp[j - 1].t;
        double wmin = std::numeric_limits<double>::infinity();
        double wmax = -wmin;
        for (std::size_t i = 0; i < s_mid.size(); ++i) {
            const double dm = (signed_power(s_next[i], r - 1) -
                               signed_power(s_prev[i], r - 1)) /
                              dt2;
            const double w =
                dm + (static_cast<double>(r - 1) / r) * abs_power(s_mid[i], r);
            wmin = std::min(wmin, w);
            wmax = std::max(wmax, w);
        }
        smp[j].c_spread = wmax - wmin;
    }
}

}  // namespace

PhaseDerivative hamiltonian_rhs(const ParticleState& state, Exponent r,
                                const SolverConfig& solver,
                                const std::vector<double>* warm_interior,
                                SolverStats* stats) {
    SolveResult sol = solve_velocity(state.p, state, r, solver, warm_interior);
    accumulate(stats, sol.report);
    const SlopeVector s = slopes(state, sol.profile);
    const std::size_t n = state.q.size();
    PhaseDerivative d;
    d.u.assign(sol.profile.values.begin() + 1, sol.profile.values.end() - 1);
    d.qdot = d.u;
    d.pdot.resize(n);
    // dP_i/dt = ((r-1)/r)(|s_right|^r - |s_left|^r). The sign is fixed by
    // energy conservation and by the r = 2 reduction
    // dP_i/dt = -P_i (s_left + s_right)/2 of classical Hunter-Saxton.
    const double factor = static_cast<double>(r.value() - 1) / r.value();
    for (std::size_t i = 0; i < n; ++i) {
        d.pdot[i] = factor * (abs_power(s[i + 1], r.value()) -
                              abs_power(s[i], r.value()));
    }
    return d;
}

StepResult rk4_step(const ParticleState& state, Exponent r, double dt,
                    const SolverConfig& solver,
                    std::vector<double>* warm_interior,
                    SolverStats* stats) {
    const std::size_t n = state.q.size();
    StepResult out;
    out.state = state;

    std::vector<double> local_warm;
    std::vector<double>* warm = warm_interior ? warm_interior : &local_warm;

    auto stage_state = [&](const std::vector<double>& kq,
                           const std::vector<double>& kp, double scale) {
        ParticleState st = state;
        for (std::size_t i = 0; i < n; ++i) {
            st.q[i] = state.q[i] + scale * kq[i];
            st.p[i] = state.p[i] + scale * kp[i];
        }
        st.t = state.t + scale;
        return st;
    };

    try {
        const std::vector<double>* w0 = warm->empty() ? nullptr : warm;
        PhaseDerivative k1 = hamiltonian_rhs(state, r, solver, w0, stats);
        *warm = k1.u;

        ParticleState s2 = stage_state(k1.qdot, k1.pdot, dt / 2);
        if (!ordering_ok(s2)) return {StepOutcome::ordering_violation, state};
        PhaseDerivative k2 = hamiltonian_rhs(s2, r, solver, warm, stats);
        *warm = k2.u;

        ParticleState s3 = stage_state(k2.qdot, k2.pdot, dt / 2);
        if (!ordering_ok(s3)) return {StepOutcome::ordering_violation, state};
        PhaseDerivative k3 = hamiltonian_rhs(s3, r, solver, warm, stats);
        *warm = k3.u;

        ParticleState s4 = stage_state(k3.qdot, k3.pdot, dt);
        if (!ordering_ok(s4)) return {StepOutcome::ordering_violation, state};
        PhaseDerivative k4 = hamiltonian_rhs(s4, r, solver, warm, stats);
        *warm = k4.u;

        for (std::size_t i = 0; i < n; ++i) {
            out.state.q[i] =
                state.q[i] + dt / 6 * (k1.qdot[i] + 2 * k2.qdot[i] +
                                       2 * k3.qdot[i] + k4.qdot[i]);
            out.state.p[i] =
                state.p[i] + dt / 6 * (k1.pdot[i] + 2 * k2.pdot[i] +
                                       2 * k3.pdot[i] + k4.pdot[i]);
        }
        out.state.t = state.t + dt;
        if (!ordering_ok(out.state)) {
            return {StepOutcome::ordering_violation, state};
        }
        out.outcome = StepOutcome::accepted;
        return out;
    } catch (const solver_error&) {
        return {StepOutcome::solver_failure, state};
    } catch (const degenerate_geometry_error&) {
        return {StepOutcome::ordering_violation, state};
    }
}

Trajectory integrate(const ParticleState& initial, Exponent r,
                     const IntegratorConfig& config,
                     const SolverConfig& solver) {
    validate_state(initial);
    if (!(config.dt != 0.0)) throw std::invalid_argument("dt must be nonzero");
    if (config.record_every < 1) {
        throw std::invalid_argument("record_every must be >= 1");
    }

    Trajectory traj;
    traj.exponent = r.value();
    traj.domain = initial.domain;
    std::vector<double> warm;

    auto record = [&](const ParticleState& st) {
        SolveResult sol = solve_velocity(st.p, st, r, solver,
                                         warm.empty() ? nullptr : &warm);
        accumulate(&traj.stats, sol.report);
        warm.assign(sol.profile.values.begin() + 1, sol.profile.values.end() - 1);
        Sample smp;
        smp.t = st.t;
        smp.q = st.q;
        smp.p = st.p;
        smp.u = warm;
        smp.energy = energy(st, sol.profile, r);
        smp.max_abs_slope = max_abs_slope(sol.profile);
        smp.c_spread = std::numeric_limits<double>::quiet_NaN();
        traj.samples.push_back(std::move(smp));
        return traj.samples.back().max_abs_slope;
    };

    ParticleState state = initial;
    double cap_hit = record(state);
    const double gap_floor = config.blowup_gap_floor * initial.domain.length();
    if (cap_hit > config.blowup_slope_cap || min_gap(state) < gap_floor) {
        traj.termination = Termination::blowup;
        finalize_weak_spread(&traj, initial.domain);
        return traj;
    }

    const double span = config.t_end - initial.t;
    if (span * config.dt < 0.0) {
        throw std::invalid_argument("t_end is behind the start for this dt");
    }
    // Fixed-step loop over the nearest whole number of steps; times are
    // recomputed from the step index so they carry no accumulated rounding.
    const long long total_steps = std::llround(span / config.dt);
    Termination term = Termination::completed;
    for (long long step = 1; step <= total_steps; ++step) {
        StepResult res = rk4_step(state, r, config.dt, solver, &warm, &traj.stats);
        if (res.outcome != StepOutcome::accepted) {
            term = res.outcome == StepOutcome::solver_failure
                       ? Termination::solver_failure
                       : Termination::blowup;
            break;
        }
        state = res.state;
        state.t = initial.t + static_cast<double>(step) * config.dt;
        const bool due = (step % config.record_every) == 0;
        // Blow-up checks run every step; recording may add the crossing
        // sample even off-schedule so the cap crossing is bracketed.
        double ms;
        if (due) {
            ms = record(state);
        } else {
            SolveResult sol = solve_velocity(state.p, state, r, solver,
                                             warm.empty() ? nullptr : &warm);
            accumulate(&traj.stats, sol.report);
            warm.assign(sol.profile.values.begin() + 1,
                        sol.profile.values.end() - 1);
            ms = max_abs_slope(sol.profile);
        }
        if (ms > config.blowup_slope_cap || min_gap(state) < gap_floor) {
            if (!due) record(state);
            term = Termination::blowup;
            break;
        }
    }
    traj.termination = term;
    if (traj.samples.back().t != state.t) {
        try {
            record(state);
        } catch (const solver_error&) {
            // The last reachable state could not be re-solved for
            // recording; the trajectory up to the previous sample stands.
        }
    }
    finalize_weak_spread(&traj, initial.domain);
    return traj;
}

double energy_drift(const Trajectory& traj, double slope_window) {
    if (traj.samples.empty()) return 0.0;
    const double e0 = traj.samples.front().energy;
    const double scale = std::max(e0, 1e-30);
    double drift = 0.0;
    for (const Sample& s : traj.samples) {
        if (s.max_abs_slope > slope_window) continue;
        drift = std::max(drift, std::fabs(s.energy - e0) / scale);
    }
    return drift;
}

}  // namespace rhs
