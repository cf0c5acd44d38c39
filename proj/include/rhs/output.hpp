#pragma once

#include <ostream>
#include <string>

#include "rhs/dynamics.hpp"

// Deterministic artifact writers: fixed 17-significant-digit formatting,
// '\n' line endings, '.' decimal separator, "nan" for undefined values.

namespace rhs {

// %.17g rendering (shortest text that round-trips a double).
std::string format_g17(double v);

const char* termination_name(Termination t);

// Columns: t, Q_1..Q_n, P_1..P_n, u_1..u_n, E, c_spread, max_abs_slope.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// u(x) of one recorded sample on a uniform grid over the domain.
// Columns: x, u.
void write_snapshot_csv(std::ostream& os, const Sample& smp, Domain domain,
                        std::size_t grid_points = 1001);

// Pretty-printed JSON run summary: termination, sample count, final time,
// cap-crossing blow-up estimate, energy drift (full and |s| <= 100
// window), solver statistics, and the integrator configuration.
std::string run_summary_json(const Trajectory& traj,
                             const std::string& scenario,
                             const IntegratorConfig& config);

// Full run as JSON: the summary plus every recorded sample.
std::string run_full_json(const Trajectory& traj, const std::string& scenario,
                          const IntegratorConfig& config);

}  // namespace rhs
