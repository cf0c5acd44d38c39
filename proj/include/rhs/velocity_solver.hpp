#pragma once

#include <optional>
#include <vector>

#include "rhs/core.hpp"

// Inverts the momentum map: given momenta p and geometry q, recovers the
// nodal velocities as the unique minimizer of the strictly convex
// functional  sum_i dq_i |s_i|^r / r - sum_i p_i u_i.  Newton's method on
// the stationarity residual
//     F_i(u) = p_i + s_i^(r-1) - s_{i-1}^(r-1)
// with a symmetric positive tridiagonal Jacobian, Armijo backtracking,
// and an even-r continuation ladder for hard cold starts. For r > 2 the
// Jacobian vanishes at u = 0, so a zero start is a genuine failure mode,
// not an implementation bug; continuation exists for exactly that case.

namespace rhs {

struct SolverConfig {
    // Residual tolerance, max norm. Each component is measured against
    // the scale at which it can be evaluated in double arithmetic:
    // 1 + |p_i| + the neighbouring powers s^(r-1) + the noise those
    // powers inherit from the slope subtraction. For O(1) states this
    // is an absolute tolerance, while near blow-up — where the power
    // terms dwarf any representable absolute residual — it asks for the
    // smallest residual the arithmetic can certify.
    double tol = 1e-12;
    int max_iter = 100;        // Newton iterations per exponent stage
    double backtrack = 0.5;    // Armijo step-halving factor in (0, 1]
    double regularization = 0.0;  // extra Jacobian diagonal shift
    bool continuation = true;  // enable the r = 2,4,...,r ladder on stalls
};

struct SolveReport {
    int iterations = 0;            // Newton iterations across all stages
    double final_residual = 0.0;   // scaled max-norm residual at exit
                                   // (<= tol whenever converged)
    std::vector<int> continuation_path;  // exponent ladder, empty if direct
    bool converged = false;
};

struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& what, SolveReport rep)
        : std::runtime_error(what), report(std::move(rep)) {}
    SolveReport report;
};

struct SolveResult {
    VelocityProfile profile;
    SolveReport report;
};

// Solves for the velocity profile. `warm_interior`, when given, seeds
// Newton with interior velocities from a nearby state; otherwise the
// start is the r = 2 solution (a single linear solve).
// Throws solver_error on non-convergence and degenerate_geometry_error /
// std::invalid_argument on malformed input.
SolveResult solve_velocity(const std::vector<double>& p,
                           const ParticleState& geometry, Exponent r,
                           const SolverConfig& config = {},
                           const std::vector<double>* warm_interior = nullptr);

enum class NewtonStatus {
    ok,
    singular,  // tridiagonal pivot collapsed; caller must regularize or
               // switch to continuation
};

struct NewtonStepResult {
    NewtonStatus status = NewtonStatus::ok;
    std::vector<double> u;        // updated interior velocities
    double residual_before = 0.0;  // absolute max-norm residuals
    double residual_after = 0.0;
    double step_scale = 0.0;      // accepted Armijo step length
};

// One damped Newton step from the given interior velocities. Exposed so
// tests can probe monotonicity and the singular cold-start behaviour.
NewtonStepResult newton_step(const std::vector<double>& u,
                             const std::vector<double>& p,
                             const ParticleState& geometry, Exponent r,
                             double regularization = 0.0,
                             double backtrack = 0.5);

}  // namespace rhs
