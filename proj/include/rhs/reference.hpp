#pragma once

#include <random>

#include "rhs/core.hpp"

// Slow-but-sure reference minimizer of the convex velocity functional
//   g(u) = sum_i dq_i |s_i|^r / r - sum_i p_i u_i,
// kept deliberately independent of the Newton solver: no Jacobian, no
// tridiagonal structure, no damping heuristics. Cyclic coordinate
// descent where each coordinate update is an exact bisection on the
// per-coordinate derivative, which is strictly increasing in u_i. Used
// only as a test oracle; runtime is polynomial but comfortable at the
// tiny sizes it is called with.

namespace rhs {

struct BruteForceResult {
    std::vector<double> u;   // interior velocities at the minimum
    double objective = 0.0;  // g at the returned point
    int sweeps = 0;          // coordinate sweeps actually performed
};

// Minimizes g for the state's momenta. Stops when a full sweep moves no
// coordinate by more than `tol`, or after max_sweeps sweeps.
BruteForceResult brute_force_velocity(const ParticleState& state, Exponent r,
                                      double tol = 1e-12,
                                      int max_sweeps = 5000);

// The objective g itself (exposed for tests comparing minimizers).
double velocity_objective(const ParticleState& state,
                          const std::vector<double>& interior_u, Exponent r);

// Deterministic random test instance: n positions uniform-ordered well
// inside (a, b) (pairwise gaps at least 1% of the domain), momenta
// uniform in [-2, 2].
ParticleState random_instance(std::mt19937& rng, std::size_t n,
                              Domain domain = {});

}  // namespace rhs
