#include "rhs/velocity_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rhs {
namespace {

constexpr double kPivotFloor = 1e-14;
constexpr double kFallbackShift = 1e-10;
constexpr int kMaxBacktracks = 60;

struct Workspace {
    int n = 0;
    std::vector<double> dq;    // n + 1 interval widths
    std::vector<double> s;     // n + 1 slopes
    std::vector<double> w;     // n + 1 Jacobian weights
    std::vector<double> diag, off, rhs;  // tridiagonal system
    std::vector<double> trial;

    explicit Workspace(const ParticleState& geo) {
        n = static_cast<int>(geo.q.size());
        dq.resize(n + 1);
        double prev = geo.domain.a;
        for (int i = 0; i < n; ++i) {
            dq[i] = geo.q[i] - prev;
            prev = geo.q[i];
        }
        dq[n] = geo.domain.b - prev;
        s.resize(n + 1);
        w.resize(n + 1);
        diag.resize(n);
        off.assign(std::max(n - 1, 0), 0.0);
        rhs.resize(n);
        trial.resize(n);
    }

    void compute_slopes(const std::vector<double>& u) {
        s[0] = u[0] / dq[0];
        for (int i = 1; i < n; ++i) s[i] = (u[i] - u[i - 1]) / dq[i];
        s[n] = -u[n - 1] / dq[n];
    }

    struct ResidualNorms {
        double absolute = 0.0;
        double scaled = 0.0;  // per component, relative to its data scale
    };

    // Residual F_i = p_i + s_i^(r-1) - s_{i-1}^(r-1). The scaled norm
    // divides each |F_i| by the scale at which F_i can be evaluated at
    // all: 1 + |p_i| + the power terms themselves (near blow-up they
    // reach 1e50 and beyond, where an absolute residual below the
    // rounding error of its own evaluation does not exist) plus the
    // noise the powers inherit from the slope subtraction,
    // (r-1)|s|^(r-2) (|u_left| + |u_right|) / dq, which dominates when
    // the velocities are large but nearly equal.
    ResidualNorms residual(const std::vector<double>& u,
                           const std::vector<double>& p, int r,
                           std::vector<double>* out) {
        compute_slopes(u);
        const auto slope_noise = [&](int j) {
            const double mag = (j > 0 ? std::fabs(u[j - 1]) : 0.0) +
                               (j < n ? std::fabs(u[j]) : 0.0);
            return (r - 1) * abs_power(s[j], r - 2) * mag / dq[j];
        };
        ResidualNorms norms;
        for (int i = 0; i < n; ++i) {
            const double vl = signed_power(s[i], r - 1);
            const double vr = signed_power(s[i + 1], r - 1);
            const double f = p[i] + vr - vl;
            (*out)[i] = f;
            norms.absolute = std::max(norms.absolute, std::fabs(f));
            const double scale = 1.0 + std::fabs(p[i]) + std::fabs(vr) +
                                 std::fabs(vl) + slope_noise(i) +
                                 slope_noise(i + 1);
            norms.scaled = std::max(norms.scaled, std::fabs(f) / scale);
        }
        return norms;
    }

    // Magnitude scale of the objective's terms (all taken positively):
    // differences of the objective below ~eps times this are pure
    // rounding, which is what decides when a line-search comparison
    // stops meaning anything.
    double objective_magnitude(const std::vector<double>& u,
                               const std::vector<double>& p, int r) {
        compute_slopes(u);
        double m = 0.0;
        for (int i = 0; i <= n; ++i) m += dq[i] * abs_power(s[i], r) / r;
        for (int i = 0; i < n; ++i) m += std::fabs(p[i] * u[i]);
        return m;
    }

    // Convex objective  sum dq |s|^r / r - p . u  used by the line search.
    double objective(const std::vector<double>& u, const std::vector<double>& p,
                     int r) {
        compute_slopes(u);
        double e = 0.0;
        for (int i = 0; i <= n; ++i) e += dq[i] * abs_power(s[i], r);
        e /= r;
        for (int i = 0; i < n; ++i) e -= p[i] * u[i];
        return e;
    }

    // Assembles the SPD Jacobian at the current slopes (weights
    // w_i = (r-1)|s_i|^(r-2)/dq_i, diagonal w_{i-1}+w_i+shift, off-diagonal
    // -w_i) and solves J d = f by the Thomas algorithm. False on pivot
    // collapse.
    bool solve_tridiagonal(int r, double shift, const std::vector<double>& f,
                           std::vector<double>* d) {
        for (int i = 0; i <= n; ++i) {
            w[i] = (r - 1) * abs_power(s[i], r - 2) / dq[i];
        }
        for (int i = 0; i < n; ++i) {
            diag[i] = w[i] + w[i + 1] + shift;
            if (i + 1 < n) off[i] = -w[i + 1];
        }
        rhs = f;
        for (int i = 1; i < n; ++i) {
            if (std::fabs(diag[i - 1]) < kPivotFloor) return false;
            const double m = off[i - 1] / diag[i - 1];
            diag[i] -= m * off[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        if (std::fabs(diag[n - 1]) < kPivotFloor) return false;
        (*d)[n - 1] = rhs[n - 1] / diag[n - 1];
        for (int i = n - 2; i >= 0; --i) {
            (*d)[i] = (rhs[i] - off[i] * (*d)[i + 1]) / diag[i];
        }
        return true;
    }
};

// Solves the r = 2 problem exactly (the residual is linear in u).
std::vector<double> linear_r2_start(const std::vector<double>& p,
                                    Workspace* ws) {
    const int n = ws->n;
    std::vector<double> u(n, 0.0), f(n);
    ws->compute_slopes(u);
    ws->residual(u, p, 2, &f);  // = p at u = 0
    std::vector<double> d(n);
    if (!ws->solve_tridiagonal(2, 0.0, f, &d)) {
        // Geometry already validated, so the r = 2 matrix is SPD; reaching
        // this means pathological widths. Fall back to zero start.
        return u;
    }
    for (int i = 0; i < n; ++i) u[i] = d[i];
    return u;
}

// Cold start for r > 2: the r = 2 solution, shrunk when its slopes are
// far above the scale the momenta imply (|s| ~ |p|^{1/(r-1)}), so the
// first objective evaluation stays in range even for huge momenta.
std::vector<double> cold_start(const std::vector<double>& p, int r,
                               Workspace* ws) {
    std::vector<double> u = linear_r2_start(p, ws);
    if (r <= 2) return u;
    ws->compute_slopes(u);
    double smax = 0.0;
    for (double v : ws->s) smax = std::max(smax, std::fabs(v));
    double pinf = 0.0;
    for (double v : p) pinf = std::max(pinf, std::fabs(v));
    const double target =
        std::max(1.0, std::pow(pinf, 1.0 / (r - 1)));
    if (smax > 10.0 * target) {
        const double c = target / smax;
        for (double& v : u) v *= c;
    }
    return u;
}

struct StageResult {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

// Scale-free fallback for momenta whose dynamic range exceeds what the
// global objective can resolve in doubles: with rows near 1e24 next to
// rows near 1e0, any useful step on a small row changes the objective by
// less than one ulp of it, so an Armijo guard can neither accept nor
// reject meaningfully and the damped iteration freezes. Cyclic
// per-coordinate bisection on the sign of F_i (strictly decreasing in
// u_i) compares each row only against its own scale.
void coordinate_rescue(std::vector<double>* u, const std::vector<double>& p,
                       int r, Workspace* ws, int sweeps) {
    const int n = ws->n;
    const auto row_residual = [&](int i, double ui) {
        const double ul = i > 0 ? (*u)[i - 1] : 0.0;
        const double ur = i + 1 < n ? (*u)[i + 1] : 0.0;
        const double sl = (ui - ul) / ws->dq[i];
        const double sr = (ur - ui) / ws->dq[i + 1];
        return p[i] + signed_power(sr, r - 1) - signed_power(sl, r - 1);
    };
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double moved = 0.0;
        for (int i = 0; i < n; ++i) {
            const double f0 = row_residual(i, (*u)[i]);
            if (f0 == 0.0) continue;
            double lo = (*u)[i], hi = (*u)[i];
            double step = 1.0 + std::fabs((*u)[i]);
            if (f0 > 0.0) {  // the zero lies above u_i
                for (int k = 0; k < 200 && row_residual(i, hi) > 0.0; ++k) {
                    lo = hi;
                    hi += step;
                    step *= 2.0;
                }
            } else {
                for (int k = 0; k < 200 && row_residual(i, lo) < 0.0; ++k) {
                    hi = lo;
                    lo -= step;
                    step *= 2.0;
                }
            }
            for (int k = 0; k < 200; ++k) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                if (row_residual(i, mid) > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            const double next = 0.5 * (lo + hi);
            moved = std::max(moved, std::fabs(next - (*u)[i]));
            (*u)[i] = next;
        }
        if (moved == 0.0) break;
    }
}

// Damped Newton at a fixed exponent. Mutates u in place.
StageResult newton_stage(std::vector<double>* u, const std::vector<double>& p,
                         int r, const SolverConfig& cfg, Workspace* ws) {
    const int n = ws->n;
    std::vector<double> f(n), d(n), ftrial(n);
    StageResult out;
    Workspace::ResidualNorms norm = ws->residual(*u, p, r, &f);
    for (int it = 0; it < cfg.max_iter; ++it) {
        if (norm.scaled <= cfg.tol) {
            out.converged = true;
            out.residual = norm.scaled;
            return out;
        }
        double shift = cfg.regularization;
        if (!ws->solve_tridiagonal(r, shift, f, &d)) {
            double pinf = 0.0;
            for (double v : p) pinf = std::max(pinf, std::fabs(v));
            shift = cfg.regularization + kFallbackShift * std::max(1.0, pinf);
            if (!ws->solve_tridiagonal(r, shift, f, &d)) {
                out.residual = norm.scaled;
                return out;  // stalled: singular even with the fallback shift
            }
        }
        const double g0 = ws->objective(*u, p, r);
        // Below this the Armijo comparison is deciding on rounding noise of
        // the objective, not on actual decrease.
        const double g_noise = 64.0 * std::numeric_limits<double>::epsilon() *
                               ws->objective_magnitude(*u, p, r);
        double descent = 0.0;
        for (int i = 0; i < n; ++i) descent += f[i] * d[i];
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            for (int i = 0; i < n; ++i) ws->trial[i] = (*u)[i] + alpha * d[i];
            if (ws->objective(ws->trial, p, r) <= g0 - 1e-4 * alpha * descent) {
                accepted = true;
                break;
            }
            if (1e-4 * alpha * descent <= g_noise &&
                ws->residual(ws->trial, p, r, &ftrial).scaled < norm.scaled) {
                // The requested decrease is smaller than the objective can
                // resolve, so the test above is a coin flip; fall back to
                // demanding strict decrease of the scale-aware residual,
                // which stays meaningful at any magnitude mix.
                accepted = true;
                break;
            }
            alpha *= cfg.backtrack;
        }
        if (!accepted) {
            out.residual = norm.scaled;
            out.iterations = it;
            return out;  // stalled: no Armijo decrease
        }
        u->swap(ws->trial);
        norm = ws->residual(*u, p, r, &f);
        out.iterations = it + 1;
    }
    out.converged = norm.scaled <= cfg.tol;
    out.residual = norm.scaled;
    return out;
}

}  // namespace

NewtonStepResult newton_step(const std::vector<double>& u,
                             const std::vector<double>& p,
                             const ParticleState& geometry, Exponent r,
                             double regularization, double backtrack) {
    validate_state(geometry);
    if (u.size() != geometry.q.size() || p.size() != geometry.q.size()) {
        throw std::invalid_argument("newton_step size mismatch");
    }
    Workspace ws(geometry);
    const int n = ws.n;
    std::vector<double> f(n), d(n);
    NewtonStepResult out;
    out.u = u;
    out.residual_before = ws.residual(u, p, r.value(), &f).absolute;
    if (!ws.solve_tridiagonal(r.value(), regularization, f, &d)) {
        out.status = NewtonStatus::singular;
        out.residual_after = out.residual_before;
        return out;
    }
    const double g0 = ws.objective(u, p, r.value());
    double descent = 0.0;
    for (int i = 0; i < n; ++i) descent += f[i] * d[i];
    double alpha = 1.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        for (int i = 0; i < n; ++i) ws.trial[i] = u[i] + alpha * d[i];
        if (ws.objective(ws.trial, p, r.value()) <= g0 - 1e-4 * alpha * descent)
            break;
        alpha *= backtrack;
    }
    out.u = ws.trial;
    out.step_scale = alpha;
    out.residual_after = ws.residual(out.u, p, r.value(), &f).absolute;
    return out;
}

SolveResult solve_velocity(const std::vector<double>& p,
                           const ParticleState& geometry, Exponent r,
                           const SolverConfig& config,
                           const std::vector<double>* warm_interior) {
    validate_state(geometry);
    if (p.size() != geometry.q.size()) {
        throw std::invalid_argument("momentum count mismatch");
    }
    if (warm_interior && warm_interior->size() != geometry.q.size()) {
        throw std::invalid_argument("warm start size mismatch");
    }
    if (!(config.tol > 0.0) || config.max_iter < 1 ||
        !(config.backtrack > 0.0 && config.backtrack <= 1.0) ||
        config.regularization < 0.0) {
        throw std::invalid_argument("invalid solver configuration");
    }
    Workspace ws(geometry);
    SolveReport report;

    const bool all_zero =
        std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; });
    if (all_zero) {
        report.converged = true;
        return {make_profile(geometry, std::vector<double>(p.size(), 0.0)),
                report};
    }

    std::vector<double> u =
        warm_interior ? *warm_interior : cold_start(p, r.value(), &ws);

    StageResult stage = newton_stage(&u, p, r.value(), config, &ws);
    report.iterations += stage.iterations;
    report.final_residual = stage.residual;

    if (!stage.converged && config.continuation && r.value() > 2) {
        // Restart from the r = 2 solution and walk the even ladder up to r.
        u = cold_start(p, 2, &ws);
        report.continuation_path.clear();
        report.continuation_path.push_back(2);
        bool ok = true;
        for (int rc = 4; rc <= r.value(); rc += 2) {
            report.continuation_path.push_back(rc);
            StageResult st = newton_stage(&u, p, rc, config, &ws);
            report.iterations += st.iterations;
            report.final_residual = st.residual;
            if (!st.converged) {
                ok = false;
                break;
            }
        }
        stage.converged = ok;
    }

    if (!stage.converged) {
        // Last resort for extreme momentum dynamic range, where the
        // objective-guarded steps freeze below its rounding floor; the
        // per-row bisection lands in the Newton basin scale by scale.
        coordinate_rescue(&u, p, r.value(), &ws, 60);
        const StageResult st = newton_stage(&u, p, r.value(), config, &ws);
        report.iterations += st.iterations;
        report.final_residual = st.residual;
        stage.converged = st.converged;
    }

    report.converged = stage.converged;
    if (!report.converged) {
        char msg[96];
        std::snprintf(msg, sizeof msg,
                      "velocity solve did not converge (residual %.3g)",
                      report.final_residual);
        throw solver_error(msg, report);
    }
    return {make_profile(geometry, std::move(u)), report};
}

}  // namespace rhs
