#include "rhs/analytic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace rhs {
namespace {

constexpr double kQuadTol = 1e-12;        // relative quadrature target
constexpr int kQuadDepth = 15;            // adaptive bisection depth
constexpr int kBlowupSamples = 100000;    // dense scan of -u0'

double integrate_gk(const std::function<double(double)>& f, double a,
                    double b) {
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, kQuadDepth, kQuadTol);
}

double binomial(int n, int k) {
    double acc = 1.0;
    for (int i = 1; i <= k; ++i) {
        acc *= static_cast<double>(n - k + i) / i;
    }
    return acc;
}

// ---- generic 4th-order finite-difference residual of the evolution
// equation in its pointwise form
//     |u_x|^(r-2) u_xt + (1/r)|u_x|^r + |u_x|^(r-2) u u_xx
// (equal to a spatially uniform c(t) on solutions).

template <typename F>
double stencil_d1(const F& f, double x, double h) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) /
           (12 * h);
}

template <typename F>
double stencil_d2(const F& f, double x, double h) {
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) -
            f(x + 2 * h)) /
           (12 * h * h);
}

}  // namespace

double evolution_lhs_fd(const std::function<double(double, double)>& u,
                        Exponent r, double x, double t, double h) {
    auto ux_at = [&](double tt) {
        return stencil_d1([&](double xx) { return u(xx, tt); }, x, h);
    };
    const double ux = ux_at(t);
    const double uxt = stencil_d1(ux_at, t, h);
    const double uxx = stencil_d2([&](double xx) { return u(xx, t); }, x, h);
    const double w = std::fabs(ux);
    const double w_rm2 = std::pow(w, r.value() - 2);
    return w_rm2 * uxt + std::pow(w, r.value()) / r.value() +
           w_rm2 * u(x, t) * uxx;
}

double blowup_time(const std::function<double(double)>& u0_prime, Exponent r,
                   Domain domain) {
    if (!(domain.a < domain.b)) throw std::invalid_argument("empty domain");
    const double h = domain.length() / kBlowupSamples;
    double best = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i <= kBlowupSamples; ++i) {
        const double v = -u0_prime(domain.a + i * h);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    // Golden-section refinement inside the bracketing cells.
    double lo = domain.a + std::max(best_i - 1, 0) * h;
    double hi = domain.a + std::min(best_i + 1, kBlowupSamples) * h;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = -u0_prime(x1), f2 = -u0_prime(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = -u0_prime(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = -u0_prime(x1);
        }
    }
    best = std::max(best, std::max(f1, f2));
    if (best <= 0.0) return std::numeric_limits<double>::infinity();
    return r.value() / best;
}

CharacteristicSolution::CharacteristicSolution(
    std::function<double(double)> u0_in,
    std::function<double(double)> u0_prime_in, Exponent r_in, Domain domain_in)
    : u0(std::move(u0_in)),
      u0_prime(std::move(u0_prime_in)),
      r(r_in.value()),
      domain(domain_in),
      T(blowup_time(u0_prime, r_in, domain_in)) {}

CharacteristicPoint characteristic_map(const CharacteristicSolution& sol,
                                       double xi, double t) {
    if (xi < sol.domain.a || xi > sol.domain.b) {
        throw std::domain_error("label outside the domain");
    }
    if (t < 0.0 || t >= sol.T) {
        throw std::domain_error("time outside [0, T)");
    }
    const int r = sol.r;
    const auto& up = sol.u0_prime;
    CharacteristicPoint out;
    out.v = signed_power(1.0 + t * up(xi) / r, r);
    out.x = xi + integrate_gk(
                     [&](double s) {
                         return signed_power(1.0 + t * up(s) / r, r) - 1.0;
                     },
                     sol.domain.a, xi);
    out.u = integrate_gk(
        [&](double s) {
            return up(s) * signed_power(1.0 + t * up(s) / r, r - 1);
        },
        sol.domain.a, xi);
    return out;
}

CharacteristicPoint characteristic_map_series(const CharacteristicSolution& sol,
                                              double xi, double t) {
    if (xi < sol.domain.a || xi > sol.domain.b) {
        throw std::domain_error("label outside the domain");
    }
    const int r = sol.r;
    const auto& up = sol.u0_prime;
    CharacteristicPoint out;
    out.x = xi;
    out.u = 0.0;
    out.v = 1.0;
    double tkm1 = 1.0;  // t^(k-1)
    for (int k = 1; k <= r; ++k) {
        const double tk = tkm1 * t;
        const double ck = binomial(r, k) / abs_power(static_cast<double>(r), k);
        const double gk = integrate_gk(
            [&](double s) { return signed_power(up(s), k); }, sol.domain.a, xi);
        out.x += ck * tk * gk;
        out.u += k * ck * tkm1 * gk;
        out.v += ck * tk * signed_power(up(xi), k);
        tkm1 = tk;
    }
    return out;
}

double classical_evaluate(const CharacteristicSolution& sol, double x,
                          double t) {
    if (t < 0.0 || t >= sol.T) {
        throw std::domain_error("time outside [0, T)");
    }
    const double xa = sol.domain.a;  // X(a, t) = a in this gauge
    const CharacteristicPoint right = characteristic_map(sol, sol.domain.b, t);
    if (x < xa - 1e-12 || x > right.x + 1e-12) {
        throw std::domain_error("position outside the transported domain");
    }
    double lo = sol.domain.a, hi = sol.domain.b;
    double xi = std::clamp(x, lo, hi);  // decent start: labels move mildly
    for (int it = 0; it < 200; ++it) {
        const CharacteristicPoint pt = characteristic_map(sol, xi, t);
        const double f = pt.x - x;
        if (std::fabs(f) <= 1e-12 * std::max(1.0, std::fabs(x)) ||
            hi - lo <= 1e-14) {
            return pt.u;
        }
        if (f > 0) {
            hi = xi;
        } else {
            lo = xi;
        }
        double next = xi - f / std::max(pt.v, 1e-300);  // Newton, dX/dxi = V
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        xi = next;
    }
    return characteristic_map(sol, xi, t).u;
}

OnePointModel onepoint_model(double q0, double u0, Exponent r) {
    if (!(q0 > 0.0 && q0 < 1.0)) {
        throw std::invalid_argument("particle must sit inside (0, 1)");
    }
    OnePointModel m;
    m.r = r.value();
    m.energy = abs_power(u0, m.r) *
               (std::pow(q0, 1 - m.r) + std::pow(1 - q0, 1 - m.r)) / m.r;
    return m;
}

double onepoint_velocity(double q1, const OnePointModel& model) {
    if (!(q1 > 0.0 && q1 < 1.0)) {
        throw std::invalid_argument("position must lie inside (0, 1)");
    }
    const int r = model.r;
    const double denom = std::pow(q1, 1 - r) + std::pow(1 - q1, 1 - r);
    return std::pow(r * model.energy / denom, 1.0 / r);
}

double onepoint_vanishing_time(double eps0, const OnePointModel& model) {
    const int r = model.r;
    return r * std::pow(eps0, 1.0 / r) / std::pow(model.energy * r, 1.0 / r);
}

EpsilonValue onepoint_epsilon(double t, double eps0,
                              const OnePointModel& model) {
    const int r = model.r;
    const double root =
        std::pow(eps0, 1.0 / r) - std::pow(model.energy * r, 1.0 / r) * t / r;
    if (root <= 0.0) return {0.0, true};
    return {abs_power(root, r), false};
}

double infinity_onepoint_slope(double q0, double u0) {
    if (!(q0 > 0.0 && q0 < 1.0) || !(u0 > 0.0)) {
        throw std::invalid_argument(
            "limit profile needs 0 < q0 < 1 and u0 > 0");
    }
    return std::max(u0 / q0, u0 / (1.0 - q0));
}

double infinity_onepoint_boundary_gap(double z, double q0, double t) {
    if (!(z > 0.0) || !(q0 > 0.0 && q0 < 1.0)) {
        throw std::invalid_argument("need z > 0 and 0 < q0 < 1");
    }
    if (q0 >= 0.5) return (1.0 - q0) * std::exp(-z * t);
    const double t_half = std::log(0.5 / q0) / z;
    if (t < t_half) return 1.0 - q0 * std::exp(z * t);
    return 0.5 * std::exp(-z * (t - t_half));
}

double infinity_onepoint_position(double z, double q0, double t) {
    return 1.0 - infinity_onepoint_boundary_gap(z, q0, t);
}

double infinity_onepoint_velocity(double z, double q0, double t) {
    const double gap = infinity_onepoint_boundary_gap(z, q0, t);
    return z * std::min(1.0 - gap, gap);
}

namespace {

double x2_profile(const SymmetryConstants& c, int r, double x) {
    const double arg = (1.0 + r) * x - r * c.c1;
    return c.c2 * std::pow(arg, static_cast<double>(r) / (1 + r));
}

double x6_profile(const SymmetryConstants& c, int r, double xi) {
    return c.c2 * std::pow(c.c1 + std::pow(xi, r), static_cast<double>(r) / (r + 1)) *
           std::pow(xi, -static_cast<double>(r + 2) / (r + 1));
}

}  // namespace

double symmetry_value(SymmetryFamily family, const SymmetryConstants& c,
                      Exponent r, double x, double t) {
    switch (family) {
        case SymmetryFamily::x1:
            return c.c1;
        case SymmetryFamily::x2:
            return x2_profile(c, r.value(), x);
        case SymmetryFamily::x3:
            if (t == 0.0) throw std::domain_error("x3 form is singular at t = 0");
            return x / t + c.c1 + c.c2 * t;
        case SymmetryFamily::x6: {
            if (x <= 0.0) throw std::domain_error("x6 form needs x > 0");
            const double xi = t * std::pow(x, -1.0 / r.value());
            return x6_profile(c, r.value(), xi);
        }
        case SymmetryFamily::x5:
            throw unsupported_family_error(
                "x5 has no closed-form solution in this laboratory");
    }
    throw std::logic_error("unreachable");
}

double symmetry_residual(SymmetryFamily family, const SymmetryConstants& c,
                         Exponent r, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
    const int rv = r.value();
    double worst = 0.0;

    switch (family) {
        case SymmetryFamily::x1: {
            auto u = [&](double x, double t) {
                (void)x;
                (void)t;
                return c.c1;
            };
            for (double x = 0.1; x <= 0.91; x += 0.2) {
                for (double t = 1.0; t <= 2.01; t += 0.5) {
                    worst = std::max(worst,
                                     std::fabs(evolution_lhs_fd(u, r, x, t, h)));
                }
            }
            return worst;
        }
        case SymmetryFamily::x2: {
            // Steady reduction: f'^2 + r f f'' = 0.
            auto f = [&](double x) { return x2_profile(c, rv, x); };
            for (double x = 0.5; x <= 2.001; x += 0.125) {
                const double fp = stencil_d1(f, x, h);
                const double fpp = stencil_d2(f, x, h);
                worst = std::max(worst, std::fabs(fp * fp + rv * f(x) * fpp));
            }
            return worst;
        }
        case SymmetryFamily::x3: {
            // The form solves the evolution equation with the spatially
            // uniform constant (1/r - 1) t^(-r).
            auto u = [&](double x, double t) { return x / t + c.c1 + c.c2 * t; };
            for (double x = 0.2; x <= 0.81; x += 0.15) {
                for (double t = 1.0; t <= 2.01; t += 0.25) {
                    const double expected =
                        (1.0 / rv - 1.0) * std::pow(t, -rv);
                    worst = std::max(
                        worst,
                        std::fabs(evolution_lhs_fd(u, r, x, t, h) - expected));
                }
            }
            return worst;
        }
        case SymmetryFamily::x6: {
            // Reduced ODE in the similarity variable xi = t x^(-1/r):
            // -xi f ((-r^2+3r+4) f' + xi r f'') + (r^2-4) f^2 - xi^2 f'^2 = 0.
            auto f = [&](double xi) { return x6_profile(c, rv, xi); };
            for (double xi = 0.5; xi <= 2.001; xi += 0.125) {
                const double fp = stencil_d1(f, xi, h);
                const double fpp = stencil_d2(f, xi, h);
                const double res = -xi * f(xi) *
                                       ((-rv * rv + 3 * rv + 4) * fp +
                                        xi * rv * fpp) +
                                   (rv * rv - 4) * f(xi) * f(xi) -
                                   xi * xi * fp * fp;
                worst = std::max(worst, std::fabs(res));
            }
            return worst;
        }
        case SymmetryFamily::x5:
            throw unsupported_family_error(
                "x5 has no closed-form solution in this laboratory");
    }
    throw std::logic_error("unreachable");
}

}  // namespace rhs
