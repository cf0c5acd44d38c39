#include "rhs/output.hpp"

#include <cstdio>

#include "json.hpp"
#include "rhs/diagnostics.hpp"

namespace rhs {
namespace {

using nlohmann::json;

json sample_json(const Sample& smp) {
    json j;
    j["t"] = smp.t;
    j["q"] = smp.q;
    j["p"] = smp.p;
    j["u"] = smp.u;
    j["energy"] = smp.energy;
    j["c_spread"] = smp.c_spread;
    j["max_abs_slope"] = smp.max_abs_slope;
    return j;
}

json summary_body(const Trajectory& traj, const std::string& scenario,
                  const IntegratorConfig& config) {
    json j;
    j["scenario"] = scenario;
    j["r"] = traj.exponent;
    j["termination"] = termination_name(traj.termination);
    j["samples"] = traj.samples.size();
    j["t_final"] = traj.samples.empty() ? 0.0 : traj.samples.back().t;
    const BlowupExtraction ext =
        extract_blowup_time(traj, config.blowup_slope_cap);
    j["blowup"] = {{"blew_up", ext.blew_up},
                   {"slope_cap", config.blowup_slope_cap}};
    if (ext.blew_up) j["blowup"]["t"] = ext.t_blowup;
    j["energy"] = {
        {"initial", traj.samples.empty() ? 0.0 : traj.samples.front().energy},
        {"final", traj.samples.empty() ? 0.0 : traj.samples.back().energy},
        {"drift", energy_drift(traj)},
        {"drift_slope_window_100", energy_drift(traj, 100.0)}};
    j["solver"] = {{"solves", traj.stats.solves},
                   {"newton_iterations", traj.stats.newton_iterations},
                   {"max_newton_iterations", traj.stats.max_newton_iterations},
                   {"continuation_runs", traj.stats.continuation_runs}};
    j["config"] = {{"dt", config.dt},
                   {"t_end", config.t_end},
                   {"record_every", config.record_every},
                   {"blowup_slope_cap", config.blowup_slope_cap},
                   {"blowup_gap_floor", config.blowup_gap_floor}};
    j["domain"] = {{"a", traj.domain.a}, {"b", traj.domain.b}};
    return j;
}

}  // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::blowup: return "blowup";
        case Termination::solver_failure: return "solver_failure";
    }
    return "unknown";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const std::size_t n =
        traj.samples.empty() ? 0 : traj.samples.front().q.size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) os << ",Q_" << i;
    for (std::size_t i = 1; i <= n; ++i) os << ",P_" << i;
    for (std::size_t i = 1; i <= n; ++i) os << ",u_" << i;
    os << ",E,c_spread,max_abs_slope\n";
    for (const Sample& smp : traj.samples) {
        os << format_g17(smp.t);
        for (double v : smp.q) os << ',' << format_g17(v);
        for (double v : smp.p) os << ',' << format_g17(v);
        for (double v : smp.u) os << ',' << format_g17(v);
        os << ',' << format_g17(smp.energy) << ','
           << format_g17(smp.c_spread) << ','
           << format_g17(smp.max_abs_slope) << '\n';
    }
}

void write_snapshot_csv(std::ostream& os, const Sample& smp, Domain domain,
                        std::size_t grid_points) {
    VelocityProfile vel;
    vel.nodes.reserve(smp.q.size() + 2);
    vel.values.reserve(smp.q.size() + 2);
    vel.nodes.push_back(domain.a);
    vel.nodes.insert(vel.nodes.end(), smp.q.begin(), smp.q.end());
    vel.nodes.push_back(domain.b);
    vel.values.push_back(0.0);
    vel.values.insert(vel.values.end(), smp.u.begin(), smp.u.end());
    vel.values.push_back(0.0);
    os << "x,u\n";
    for (std::size_t k = 0; k < grid_points; ++k) {
        const double x =
            domain.a + domain.length() * static_cast<double>(k) /
                           static_cast<double>(grid_points - 1);
        os << format_g17(x) << ',' << format_g17(vel.evaluate(x)) << '\n';
    }
}

std::string run_summary_json(const Trajectory& traj,
                             const std::string& scenario,
                             const IntegratorConfig& config) {
    return summary_body(traj, scenario, config).dump(2) + "\n";
}

std::string run_full_json(const Trajectory& traj, const std::string& scenario,
                          const IntegratorConfig& config) {
    json j = summary_body(traj, scenario, config);
    json arr = json::array();
    for (const Sample& smp : traj.samples) arr.push_back(sample_json(smp));
    j["trajectory"] = std::move(arr);
    return j.dump(2) + "\n";
}

}  // namespace rhs
