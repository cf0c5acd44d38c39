#include "rhs/core.hpp"

#include <cmath>
#include <cstdio>

namespace rhs {

Exponent::Exponent(int r) : r_(r) {
    if (r < 2 || r % 2 != 0) {
        throw std::invalid_argument(
            "exponent must be an even integer >= 2, got " + std::to_string(r));
    }
}

double VelocityProfile::evaluate(double x) const {
    if (x <= nodes.front()) return values.front();
    if (x >= nodes.back()) return values.back();
    // Nodes are few and sorted; a linear scan keeps this trivially correct.
    std::size_t i = 1;
    while (nodes[i] < x) ++i;
    const double w = (x - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

double abs_power(double x, int k) {
    double base = std::fabs(x);
    double acc = 1.0;
    while (k > 0) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

double signed_power(double x, int k) {
    const double mag = abs_power(x, k);
    return (k % 2 == 1) ? std::copysign(mag, x) : mag;
}

bool ordering_ok(const ParticleState& state) {
    const double floor = kMinIntervalFraction * state.domain.length();
    double prev = state.domain.a;
    for (double qi : state.q) {
        if (!(qi - prev > floor)) return false;
        prev = qi;
    }
    return state.domain.b - prev > floor;
}

void validate_state(const ParticleState& state) {
    if (state.q.size() != state.p.size()) {
        throw std::invalid_argument("state has " + std::to_string(state.q.size()) +
                                    " positions but " +
                                    std::to_string(state.p.size()) + " momenta");
    }
    if (state.q.empty()) {
        throw std::invalid_argument("state must hold at least one particle");
    }
    if (!(state.domain.a < state.domain.b)) {
        throw std::invalid_argument("domain must satisfy a < b");
    }
    if (!ordering_ok(state)) {
        throw degenerate_geometry_error(
            "positions must be strictly increasing inside (a, b) with gaps "
            "above the degeneracy threshold");
    }
}

VelocityProfile make_profile(const ParticleState& state,
                             std::vector<double> interior_values) {
    if (interior_values.size() != state.q.size()) {
        throw std::invalid_argument("interior velocity count mismatch");
    }
    VelocityProfile vel;
    vel.nodes.reserve(state.q.size() + 2);
    vel.values.reserve(state.q.size() + 2);
    vel.nodes.push_back(state.domain.a);
    vel.nodes.insert(vel.nodes.end(), state.q.begin(), state.q.end());
    vel.nodes.push_back(state.domain.b);
    vel.values.push_back(0.0);
    vel.values.insert(vel.values.end(), interior_values.begin(),
                      interior_values.end());
    vel.values.push_back(0.0);
    return vel;
}

SlopeVector slopes(const ParticleState& state, const VelocityProfile& vel) {
    validate_state(state);
    if (vel.nodes.size() != state.q.size() + 2) {
        throw std::invalid_argument("profile node count mismatch");
    }
    SlopeVector s(vel.nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < vel.nodes.size(); ++i) {
        s[i] = (vel.values[i + 1] - vel.values[i]) /
               (vel.nodes[i + 1] - vel.nodes[i]);
    }
    return s;
}

double energy(const ParticleState& state, const VelocityProfile& vel,
              Exponent r) {
    const SlopeVector s = slopes(state, vel);
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        e += (vel.nodes[i + 1] - vel.nodes[i]) * abs_power(s[i], r.value());
    }
    return e / r.value();
}

std::vector<double> momentum_from_velocity(const ParticleState& state,
                                           const VelocityProfile& vel,
                                           Exponent r) {
    const SlopeVector s = slopes(state, vel);
    std::vector<double> p(state.q.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = -signed_power(s[i + 1], r.value() - 1) +
               signed_power(s[i], r.value() - 1);
    }
    return p;
}

ParticleState state_from_point_data(const std::vector<double>& q,
                                    const std::vector<double>& u,
                                    Domain domain, Exponent r) {
    if (q.size() != u.size()) {
        throw std::invalid_argument("position/velocity count mismatch");
    }
    ParticleState state;
    state.domain = domain;
    state.q = q;
    state.p.assign(q.size(), 0.0);
    validate_state(state);
    state.p = momentum_from_velocity(state, make_profile(state, u), r);
    return state;
}

InterpolationResult interpolate_initial(
    const std::function<double(double)>& u0, std::size_t n, Domain domain,
    Exponent r) {
    if (n == 0) throw std::invalid_argument("need at least one interior node");
    InterpolationResult out;
    out.state.domain = domain;
    out.state.q.resize(n);
    std::vector<double> u(n);
    const double h = domain.length() / static_cast<double>(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        out.state.q[i] = domain.a + static_cast<double>(i + 1) * h;
        u[i] = u0(out.state.q[i]);
    }
    out.clamped_boundary =
        std::fabs(u0(domain.a)) > 1e-12 || std::fabs(u0(domain.b)) > 1e-12;
    out.state.p.assign(n, 0.0);  // placeholder so the state validates
    out.profile = make_profile(out.state, std::move(u));
    out.state.p = momentum_from_velocity(out.state, out.profile, r);
    return out;
}

}  // namespace rhs
