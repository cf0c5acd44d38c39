#include "mol_reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rhs::testing {
namespace {

// Trapezoid prefix integral of w, shifted so u = 0 at the node nearest
// x = 0.
std::vector<double> velocity_from_slope(const std::vector<double>& x,
                                        const std::vector<double>& w) {
    const double dx = x[1] - x[0];
    std::vector<double> u(x.size());
    u[0] = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        u[i] = u[i - 1] + 0.5 * dx * (w[i - 1] + w[i]);
    }
    const std::size_t zero_node = static_cast<std::size_t>(
        std::llround((0.0 - x.front()) / dx));
    const double shift = u[zero_node];
    for (double& v : u) v -= shift;
    return u;
}

// dw/dt = -u w_x - w^2 / r.
void rhs_eval(const std::vector<double>& x, const std::vector<double>& w,
              int r, std::vector<double>& out) {
    const std::size_t n = w.size();
    const double dx = x[1] - x[0];
    const std::vector<double> u = velocity_from_slope(x, w);
    out.resize(n);
    auto wx_at = [&](std::size_t i) {
        if (i >= 2 && i + 2 < n) {
            return (w[i - 2] - 8 * w[i - 1] + 8 * w[i + 1] - w[i + 2]) /
                   (12 * dx);
        }
        if (i == 0) return (-3 * w[0] + 4 * w[1] - w[2]) / (2 * dx);
        if (i == n - 1) {
            return (3 * w[n - 1] - 4 * w[n - 2] + w[n - 3]) / (2 * dx);
        }
        return (w[i + 1] - w[i - 1]) / (2 * dx);
    };
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = -u[i] * wx_at(i) - w[i] * w[i] / r;
    }
}

double max_abs_velocity(const std::vector<double>& x,
                        const std::vector<double>& w) {
    const std::vector<double> u = velocity_from_slope(x, w);
    double m = 0.0;
    for (double v : u) m = std::max(m, std::fabs(v));
    return m;
}

void rk4_advance(const std::vector<double>& x, std::vector<double>& w, int r,
                 double dt) {
    static thread_local std::vector<double> k1, k2, k3, k4, tmp;
    const std::size_t n = w.size();
    tmp.resize(n);
    rhs_eval(x, w, r, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] + 0.5 * dt * k1[i];
    rhs_eval(x, tmp, r, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] + 0.5 * dt * k2[i];
    rhs_eval(x, tmp, r, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] + dt * k3[i];
    rhs_eval(x, tmp, r, k4);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
}

MolState init_state(const std::function<double(double)>& w0,
                    const MolConfig& config) {
    if (!(config.x_lo < 0.0 && config.x_hi > 0.0)) {
        throw std::invalid_argument("grid must contain the gauge point x = 0");
    }
    const auto n = static_cast<std::size_t>(
        std::llround((config.x_hi - config.x_lo) / config.dx)) + 1;
    MolState state;
    state.x.resize(n);
    state.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        state.x[i] = config.x_lo + static_cast<double>(i) * config.dx;
        state.w[i] = w0(state.x[i]);
    }
    return state;
}

double cfl_step(const MolState& state, const MolConfig& config) {
    return config.cfl * config.dx /
           std::max(1.0, max_abs_velocity(state.x, state.w));
}

// Vertex of the parabola through the grid minimum and its neighbours.
double refined_minimum(const std::vector<double>& w) {
    const std::size_t m =
        std::min_element(w.begin(), w.end()) - w.begin();
    if (m == 0 || m + 1 == w.size()) return w[m];
    const double denom = w[m + 1] - 2 * w[m] + w[m - 1];
    if (denom <= 0.0) return w[m];
    const double delta = w[m + 1] - w[m - 1];
    return w[m] - delta * delta / (8.0 * denom);
}

}  // namespace

MolState mol_integrate(const std::function<double(double)>& w0,
                       const MolConfig& config, double t_target) {
    MolState state = init_state(w0, config);
    while (state.t < t_target) {
        const double dt = std::min(cfl_step(state, config),
                                   t_target - state.t);
        rk4_advance(state.x, state.w, config.r, dt);
        state.t += dt;
        if (dt <= 1e-15 * std::max(1.0, t_target)) break;
    }
    return state;
}

double mol_velocity_at(const MolState& state, double x_query) {
    const double dx = state.x[1] - state.x[0];
    const auto i = static_cast<std::size_t>(
        std::llround((x_query - state.x.front()) / dx));
    if (i >= state.x.size() ||
        std::fabs(state.x[i] - x_query) > 0.5 * dx + 1e-12) {
        throw std::invalid_argument("query point off the grid");
    }
    return velocity_from_slope(state.x, state.w)[i];
}

MolBlowupFit mol_blowup_estimate(const std::function<double(double)>& w0,
                                 const MolConfig& config, double t_max,
                                 int stride) {
    MolState state = init_state(w0, config);
    std::vector<double> ts, ys;
    ts.push_back(state.t);
    ys.push_back(1.0 / std::fabs(refined_minimum(state.w)));
    int step = 0;
    while (state.t < t_max) {
        const double dt = std::min(cfl_step(state, config), t_max - state.t);
        rk4_advance(state.x, state.w, config.r, dt);
        state.t += dt;
        if (++step % stride == 0 || state.t >= t_max) {
            ts.push_back(state.t);
            ys.push_back(1.0 / std::fabs(refined_minimum(state.w)));
        }
        if (dt <= 1e-15 * std::max(1.0, t_max)) break;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto m = static_cast<double>(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        sx += ts[k];
        sy += ys[k];
        sxx += ts[k] * ts[k];
        sxy += ts[k] * ys[k];
    }
    MolBlowupFit fit;
    fit.points = ts.size();
    const double det = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / det;
    const double intercept = (sy * sxx - sx * sxy) / det;
    fit.t_estimate = -intercept / fit.slope;
    return fit;
}

}  // namespace rhs::testing
