#include "rhs/scenario.hpp"

#include <cmath>

namespace rhs {

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "one_point", "symmetric", "chasing", "asymmetric", "smooth_sine"};
    return names;
}

Scenario make_scenario(const std::string& name, std::size_t total_nodes) {
    Scenario s;
    s.name = name;
    s.total_nodes = total_nodes;
    if (name == "one_point") {
        s.q = {0.1};
        s.u = {0.1};
        s.default_t_end = 50.0;
    } else if (name == "symmetric") {
        s.q = {0.1, 0.9};
        s.u = {0.1, -0.1};
    } else if (name == "chasing") {
        s.q = {0.1, 0.2};
        s.u = {0.2, 0.1};
    } else if (name == "asymmetric") {
        s.q = {0.1, 0.2};
        s.u = {0.2, -0.125};
    } else if (name == "smooth_sine") {
        s.u0 = [](double x) { return std::sin(2.0 * M_PI * x); };
        s.default_t_end = 10.0;
    } else {
        throw std::invalid_argument("unknown scenario: " + name);
    }
    return s;
}

ParticleState initial_state(const Scenario& scenario, Exponent r) {
    if (scenario.u0) {
        if (scenario.total_nodes < 3) {
            throw std::invalid_argument("smooth scenarios need >= 3 nodes");
        }
        return interpolate_initial(scenario.u0, scenario.total_nodes - 2,
                                   scenario.domain, r)
            .state;
    }
    return state_from_point_data(scenario.q, scenario.u, scenario.domain, r);
}

}  // namespace rhs
