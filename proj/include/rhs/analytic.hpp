#pragma once

#include <functional>
#include <vector>

#include "rhs/core.hpp"

// Closed-form machinery for classical (smooth) solutions: the blow-up
// time of the gradient, the characteristic representation of the Cauchy
// solution, the one-particle reduction, the r -> infinity limit, and the
// explicit symmetry-reduction families. These are the reference answers
// the particle code is tested against.

namespace rhs {

// Finite-difference evaluation (4th-order central stencils, step h) of
// the pointwise form of the evolution equation,
//   |u_x|^(r-2) u_xt + (1/r) |u_x|^r + |u_x|^(r-2) u u_xx.
// On a genuine solution this equals an x-independent c(t); probing its
// spread across x is the generic "is this a solution?" diagnostic.
double evolution_lhs_fd(const std::function<double(double, double)>& u,
                        Exponent r, double x, double t, double h);

// T = r / sup(-u0'); +infinity when u0 is non-decreasing. The sup is
// located by dense sampling followed by local refinement.
double blowup_time(const std::function<double(double)>& u0_prime, Exponent r,
                   Domain domain);

// Classical Cauchy solution transported along characteristics, in the
// gauge that keeps the point x = a fixed with u(a, t) = 0:
//   V(xi, t) = (1 + t u0'(xi)/r)^r            (stretch dX/dxi)
//   X(xi, t) = xi + int_a^xi (V(s, t) - 1) ds  (particle position)
//   U(xi, t) = int_a^xi u0'(s)(1 + t u0'(s)/r)^(r-1) ds  (velocity)
struct CharacteristicSolution {
    CharacteristicSolution(std::function<double(double)> u0,
                           std::function<double(double)> u0_prime, Exponent r,
                           Domain domain);

    std::function<double(double)> u0;
    std::function<double(double)> u0_prime;
    int r;
    Domain domain;
    double T;  // gradient blow-up time of the classical solution
};

struct CharacteristicPoint {
    double x = 0.0;  // position of the label at time t
    double u = 0.0;  // velocity there
    double v = 0.0;  // stretch factor V = dX/dxi
};

// Evaluates the characteristic map at label xi in [a, b] and time
// t in [0, T). Quadrature is adaptive Gauss-Kronrod to 1e-10.
CharacteristicPoint characteristic_map(const CharacteristicSolution& sol,
                                       double xi, double t);

// Same map evaluated through the truncated binomial series
//   X = xi + sum_k C_k t^k G_k(xi),  C_k = binom(r, k)/r^k,
//   G_k(xi) = int_a^xi u0'(s)^k ds,
// kept as an independent cross-check of characteristic_map at small r.
CharacteristicPoint characteristic_map_series(const CharacteristicSolution& sol,
                                              double xi, double t);

// u(x, t) by inverting X(., t) (bisection-safeguarded Newton; X is
// strictly increasing for t < T). Throws std::domain_error when x lies
// outside [X(a,t), X(b,t)] or t >= T.
double classical_evaluate(const CharacteristicSolution& sol, double x,
                          double t);

// ---- one-particle reduction on [0, 1] -------------------------------

// Conserved data of a single-particle solution: energy and exponent.
struct OnePointModel {
    double energy = 0.0;
    int r = 2;
};

// Builds the model from initial position/velocity (0 < q0 < 1).
OnePointModel onepoint_model(double q0, double u0, Exponent r);

// Velocity as a function of position along the energy level set:
//   u(q) = ( r E / (q^(1-r) + (1-q)^(1-r)) )^(1/r).
double onepoint_velocity(double q1, const OnePointModel& model);

struct EpsilonValue {
    double eps = 0.0;
    bool past_blowup = false;  // t beyond the vanishing time; eps clamped to 0
};

// Closed-form gap to the boundary, eps(t) = (eps0^(1/r) - (E r)^(1/r) t / r)^r.
EpsilonValue onepoint_epsilon(double t, double eps0, const OnePointModel& model);

// Time at which eps(t) reaches zero.
double onepoint_vanishing_time(double eps0, const OnePointModel& model);

// ---- r -> infinity limit on [0, 1] -----------------------------------

// Limiting slope z = max(u0/q0, u0/(1-q0)) of the tent profile
// u = z min(q, 1-q); requires u0 > 0.
double infinity_onepoint_slope(double q0, double u0);

// Position of the single particle under the limiting dynamics: exponential
// approach to the far boundary, switching branch when the particle crosses
// the midpoint. Never reaches 1 in finite time, though the returned double
// saturates to 1.0 once the true gap drops below one ulp.
double infinity_onepoint_position(double z, double q0, double t);

// Distance 1 - Q(t) to the far boundary, computed directly so it stays
// strictly positive for every finite t (until exp itself underflows near
// z t ~ 745). Use this, not 1 - position, to decide boundary questions.
double infinity_onepoint_boundary_gap(double z, double q0, double t);

// Velocity of that particle, z * min(q, 1 - q).
double infinity_onepoint_velocity(double z, double q0, double t);

// ---- symmetry-reduction families --------------------------------------

enum class SymmetryFamily { x1, x2, x3, x5, x6 };

struct SymmetryConstants {
    double c1 = 0.0;
    double c2 = 1.0;
};

struct unsupported_family_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed-form value of the invariant solution:
//   x1: u = c1                                  (uniform flow)
//   x2: u = c2 ((1+r) x - r c1)^(r/(1+r))       (steady profile)
//   x3: u = x/t + c1 + c2 t                     (expansion wave)
//   x6: u = f(t x^(-1/r)) with
//       f(xi) = c2 (c1 + xi^r)^(r/(r+1)) xi^(-(r+2)/(r+1))  (scaling form)
// x5 has no closed form here and throws unsupported_family_error.
double symmetry_value(SymmetryFamily family, const SymmetryConstants& c,
                      Exponent r, double x, double t);

// Max finite-difference residual of the family's defining equation over
// its validity window, using 4th-order central stencils with step h:
//   x1: residual of the evolution equation (identically zero),
//   x2: f'^2 + r f f''  on x in [0.5, 2],
//   x3: evolution-equation residual minus its exact constant
//       (1/r - 1) t^(-r)  on a grid with t in [1, 2],
//   x6: the reduced second-order ODE in xi on [0.5, 2].
double symmetry_residual(SymmetryFamily family, const SymmetryConstants& c,
                         Exponent r, double h);

}  // namespace rhs
