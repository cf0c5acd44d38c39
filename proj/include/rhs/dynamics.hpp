#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "rhs/core.hpp"
#include "rhs/velocity_solver.hpp"

// Hamiltonian particle dynamics: dq_i/dt = u_i and
// dp_i/dt = (r-1)/r (|s_i|^r - |s_{i-1}|^r) (right slope minus left;
// the sign that conserves the energy), advanced with classical
// fixed-step RK4. Every stage re-solves the velocity profile with a warm
// start. Blow-up (interval collapse / slope explosion) is detected and
// terminates the run; it is never regularized away.

namespace rhs {

struct IntegratorConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int record_every = 10;          // steps between recorded samples
    double blowup_slope_cap = 1e6;  // max |s| that counts as blow-up
    double blowup_gap_floor = 1e-8;  // min interval width, relative to b - a
};

enum class Termination { completed, blowup, solver_failure };

struct Sample {
    double t = 0.0;
    std::vector<double> q, p, u;  // interior positions, momenta, velocities
    double energy = 0.0;
    double c_spread = 0.0;        // weak-form constant spread (centered
                                  // differences over neighbours; NaN at ends)
    double max_abs_slope = 0.0;
};

struct SolverStats {
    long long solves = 0;
    long long newton_iterations = 0;
    int max_newton_iterations = 0;
    long long continuation_runs = 0;
};

struct Trajectory {
    std::vector<Sample> samples;
    Termination termination = Termination::completed;
    int exponent = 2;
    Domain domain;
    SolverStats stats;
};

struct PhaseDerivative {
    std::vector<double> qdot;  // = interior velocities
    std::vector<double> pdot;
    std::vector<double> u;     // interior velocities from the solve
};

// Evaluates the Hamiltonian vector field at a state. `warm_interior`
// seeds the velocity solve; `stats`, when given, accumulates solver work.
PhaseDerivative hamiltonian_rhs(const ParticleState& state, Exponent r,
                                const SolverConfig& solver = {},
                                const std::vector<double>* warm_interior = nullptr,
                                SolverStats* stats = nullptr);

enum class StepOutcome { accepted, ordering_violation, solver_failure };

struct StepResult {
    StepOutcome outcome = StepOutcome::accepted;
    ParticleState state;  // advanced state when accepted
};

// One classical RK4 step. A stage that breaks the position ordering or
// fails to solve rejects the whole step. `warm_interior` is updated to
// the last stage's velocities on any progress.
StepResult rk4_step(const ParticleState& state, Exponent r, double dt,
                    const SolverConfig& solver = {},
                    std::vector<double>* warm_interior = nullptr,
                    SolverStats* stats = nullptr);

// Integrates from `initial` until t_end, blow-up, or solver failure.
// Samples are recorded every record_every steps plus always the initial
// and final states; blow-up caps are checked every accepted step.
Trajectory integrate(const ParticleState& initial, Exponent r,
                     const IntegratorConfig& config,
                     const SolverConfig& solver = {});

// Max relative energy deviation from the initial sample, restricted to
// samples with max |s| <= slope_window (the whole trajectory by default).
double energy_drift(const Trajectory& traj,
                    double slope_window = std::numeric_limits<double>::infinity());

}  // namespace rhs
