#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rhs/core.hpp"

// Named initial conditions for the experiment suite. Point scenarios
// carry explicit (position, velocity) pairs; smooth scenarios carry an
// initial profile sampled on an equispaced node set.

namespace rhs {

struct Scenario {
    std::string name;
    Domain domain;
    std::vector<double> q, u;           // point data (empty for smooth runs)
    std::function<double(double)> u0;   // smooth initial profile, or null
    std::size_t total_nodes = 101;      // node count (incl. boundary) when
                                        // sampling u0
    double default_t_end = 20.0;
};

// Built-in scenarios:
//   one_point   (0.1, 0.1)                       t_end 50
//   symmetric   (0.1, 0.1), (0.9, -0.1)          t_end 20
//   chasing     (0.1, 0.2), (0.2, 0.1)           t_end 20
//   asymmetric  (0.1, 0.2), (0.2, -0.125)        t_end 20
//   smooth_sine sin(2 pi x) on total_nodes nodes t_end 10
// Throws std::invalid_argument for unknown names. `total_nodes` only
// affects smooth scenarios.
Scenario make_scenario(const std::string& name, std::size_t total_nodes = 101);

const std::vector<std::string>& scenario_names();

// Builds the particle state (momenta from the profile) for exponent r.
ParticleState initial_state(const Scenario& scenario, Exponent r);

}  // namespace rhs
