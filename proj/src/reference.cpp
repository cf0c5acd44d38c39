#include "rhs/reference.hpp"

#include <algorithm>
#include <cmath>

namespace rhs {
namespace {

// d g / d u_i with neighbours held fixed:
//   s_left^(r-1) - s_right^(r-1) - p_i,
// strictly increasing in u_i.
double coordinate_derivative(double ui, double u_left, double u_right,
                             double dq_left, double dq_right, double p,
                             int r) {
    const double sl = (ui - u_left) / dq_left;
    const double sr = (u_right - ui) / dq_right;
    return signed_power(sl, r - 1) - signed_power(sr, r - 1) - p;
}

}  // namespace

double velocity_objective(const ParticleState& state,
                          const std::vector<double>& interior_u, Exponent r) {
    validate_state(state);
    if (interior_u.size() != state.q.size()) {
        throw std::invalid_argument("interior velocity count mismatch");
    }
    const std::size_t n = state.q.size();
    double g = 0.0;
    double x_prev = state.domain.a, u_prev = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = i < n ? state.q[i] : state.domain.b;
        const double u = i < n ? interior_u[i] : 0.0;
        const double dq = x - x_prev;
        g += dq * abs_power((u - u_prev) / dq, r.value()) / r.value();
        x_prev = x;
        u_prev = u;
    }
    for (std::size_t i = 0; i < n; ++i) g -= state.p[i] * interior_u[i];
    return g;
}

BruteForceResult brute_force_velocity(const ParticleState& state, Exponent r,
                                      double tol, int max_sweeps) {
    validate_state(state);
    const std::size_t n = state.q.size();
    const int rv = r.value();
    std::vector<double> u(n, 0.0);
    std::vector<double> dq(n + 1);
    double x_prev = state.domain.a;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = i < n ? state.q[i] : state.domain.b;
        dq[i] = x - x_prev;
        x_prev = x;
    }

    BruteForceResult out;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double u_left = i == 0 ? 0.0 : u[i - 1];
            const double u_right = i + 1 == n ? 0.0 : u[i + 1];
            auto deriv = [&](double v) {
                return coordinate_derivative(v, u_left, u_right, dq[i],
                                             dq[i + 1], state.p[i], rv);
            };
            // Expand a bracket around the current value, then bisect.
            double lo = u[i], hi = u[i];
            double width = 1.0;
            while (deriv(lo) > 0.0) {
                lo -= width;
                width *= 2.0;
            }
            width = 1.0;
            while (deriv(hi) < 0.0) {
                hi += width;
                width *= 2.0;
            }
            for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::fabs(lo));
                 ++it) {
                const double mid = 0.5 * (lo + hi);
                if (deriv(mid) < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            const double updated = 0.5 * (lo + hi);
            moved = std::max(moved, std::fabs(updated - u[i]));
            u[i] = updated;
        }
        out.sweeps = sweep + 1;
        if (moved <= tol) break;
    }
    out.objective = velocity_objective(state, u, r);
    out.u = std::move(u);
    return out;
}

ParticleState random_instance(std::mt19937& rng, std::size_t n,
                              Domain domain) {
    if (n == 0) throw std::invalid_argument("need at least one particle");
    const double len = domain.length();
    std::uniform_real_distribution<double> pos(domain.a + 0.05 * len,
                                               domain.b - 0.05 * len);
    std::uniform_real_distribution<double> mom(-2.0, 2.0);
    ParticleState state;
    state.domain = domain;
    state.q.resize(n);
    for (;;) {
        for (double& qi : state.q) qi = pos(rng);
        std::sort(state.q.begin(), state.q.end());
        double gap = state.q.front() - domain.a;
        for (std::size_t i = 1; i < n; ++i) {
            gap = std::min(gap, state.q[i] - state.q[i - 1]);
        }
        gap = std::min(gap, domain.b - state.q.back());
        if (gap >= 0.01 * len) break;
    }
    state.p.resize(n);
    for (double& pi : state.p) pi = mom(rng);
    return state;
}

}  // namespace rhs
