#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

// Core state types and algebraic maps for piecewise-linear singular
// solutions: slopes, energy, and the momentum map linking particle
// momenta to nodal velocities.

namespace rhs {

// Even integrability exponent r >= 2 of the W^{1,r} particle energy.
class Exponent {
public:
    explicit Exponent(int r);
    int value() const { return r_; }

private:
    int r_;
};

// Spatial interval [a, b]; velocities vanish at both ends.
struct Domain {
    double a = 0.0;
    double b = 1.0;

    double length() const { return b - a; }
};

// Intervals narrower than this fraction of the domain are treated as
// degenerate geometry rather than fed to the solver.
inline constexpr double kMinIntervalFraction = 1e-12;

struct degenerate_geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Phase-space state of n interior particles. Positions are strictly
// increasing inside (a, b); boundary nodes are not part of the state.
struct ParticleState {
    std::vector<double> q;  // interior positions, strictly increasing
    std::vector<double> p;  // conjugate momenta, same length as q
    Domain domain;
    double t = 0.0;

    std::size_t size() const { return q.size(); }
};

// Piecewise-linear velocity field on the full node set a, q_1..q_n, b.
// Boundary values are identically zero.
struct VelocityProfile {
    std::vector<double> nodes;   // n + 2 positions including a and b
    std::vector<double> values;  // velocities at the nodes

    std::size_t interior_count() const { return nodes.size() - 2; }

    // Piecewise-linear interpolant; clamps x to [a, b].
    double evaluate(double x) const;
};

using SlopeVector = std::vector<double>;  // n + 1 interval slopes

// sign(x) * |x|^k for integer k >= 0, by exponentiation by squaring.
// Used for the odd power s^(r-1) and the even power |s|^(r-2) so that
// integer exponents never go through pow().
double signed_power(double x, int k);

// |x|^k for integer k >= 0.
double abs_power(double x, int k);

// Throws std::invalid_argument / degenerate_geometry_error if the state
// is malformed (size mismatch, ordering violation, interval below the
// minimum width).
void validate_state(const ParticleState& state);

// True iff a < q_1 < ... < q_n < b with every gap above the degeneracy
// threshold.
bool ordering_ok(const ParticleState& state);

// Assembles the full profile from interior velocities (boundary zeros
// added automatically).
VelocityProfile make_profile(const ParticleState& state,
                             std::vector<double> interior_values);

// Interval slopes s_i = (u_{i+1} - u_i) / (q_{i+1} - q_i), i = 0..n.
SlopeVector slopes(const ParticleState& state, const VelocityProfile& vel);

// Discrete energy  sum_i dq_i |s_i|^r / r.
double energy(const ParticleState& state, const VelocityProfile& vel,
              Exponent r);

// Momentum map  p_i = -s_i^(r-1) + s_{i-1}^(r-1)  (jump of the momentum
// density across node i).
std::vector<double> momentum_from_velocity(const ParticleState& state,
                                           const VelocityProfile& vel,
                                           Exponent r);

// Builds a state directly from interior (position, velocity) pairs: the
// momenta are those induced by the piecewise-linear profile through the
// given velocities. Throws on malformed geometry.
ParticleState state_from_point_data(const std::vector<double>& q,
                                    const std::vector<double>& u,
                                    Domain domain, Exponent r);

struct InterpolationResult {
    ParticleState state;
    VelocityProfile profile;
    bool clamped_boundary = false;  // u0 did not vanish at a or b
};

// Samples u0 at n equispaced interior nodes q_i = a + i (b-a)/(n+1) and
// builds the matching momenta. Boundary values are clamped to zero when
// |u0(a)| or |u0(b)| exceeds 1e-12 (flagged in the result).
InterpolationResult interpolate_initial(
    const std::function<double(double)>& u0, std::size_t n, Domain domain,
    Exponent r);

}  // namespace rhs
