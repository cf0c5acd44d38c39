// Command-line laboratory: named scenarios, integration runs, exponent
// sweeps, and self-check suites, emitting deterministic CSV/JSON.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rhs/analytic.hpp"
#include "rhs/diagnostics.hpp"
#include "rhs/dynamics.hpp"
#include "rhs/output.hpp"
#include "rhs/reference.hpp"
#include "rhs/scenario.hpp"
#include "rhs/velocity_solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// Slope magnitude at which artifacts call a run blown up. Kept well
// below 1/dt so the cap is crossed by an accepted step (and can be
// interpolated) instead of being jumped over by interval collapse.
constexpr double kArtifactSlopeCap = 1e3;

struct CommonOptions {
    std::string scenario = "one_point";
    int r = 2;
    double dt = 1e-3;
    double t_end = std::numeric_limits<double>::quiet_NaN();
    int record_every = 10;
    std::string output = ".";
    std::string format = "csv";
    std::string snapshots;
    std::size_t points = 101;
    bool expect_completion = false;
};

int thread_cap() {
    if (const char* env = std::getenv("RHS_LAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // auto
}

void add_common_options(CLI::App& cmd, CommonOptions& opt) {
    cmd.add_option("--scenario", opt.scenario, "Scenario name")
        ->check(CLI::IsMember(rhs::scenario_names()))
        ->capture_default_str();
    cmd.add_option("--dt", opt.dt, "Fixed RK4 time step")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--t-end", opt.t_end,
                   "Integration horizon (default: scenario preset)");
    cmd.add_option("--record-every", opt.record_every,
                   "Steps between recorded samples")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--output", opt.output, "Output directory")
        ->capture_default_str();
    cmd.add_option("--format", opt.format, "Trajectory artifact format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd.add_option("--snapshots", opt.snapshots,
                   "Comma-separated times; writes u(x) snapshot CSVs at the "
                   "nearest recorded samples");
    cmd.add_option("--points", opt.points,
                   "Total node count (incl. boundary) for smooth scenarios")
        ->check(CLI::Range(std::size_t{3}, std::size_t{100001}))
        ->capture_default_str();
    cmd.add_flag("--expect-completion", opt.expect_completion,
                 "Exit with status 3 unless the run reaches t_end");
}

rhs::IntegratorConfig integrator_config(const CommonOptions& opt,
                                        const rhs::Scenario& scn) {
    rhs::IntegratorConfig cfg;
    cfg.dt = opt.dt;
    cfg.t_end = std::isnan(opt.t_end) ? scn.default_t_end : opt.t_end;
    cfg.record_every = opt.record_every;
    cfg.blowup_slope_cap = kArtifactSlopeCap;
    return cfg;
}

std::vector<double> parse_times(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << text;
}

// Writes the per-run artifacts and returns the summary exit decision.
void write_run_artifacts(const rhs::Trajectory& traj,
                         const rhs::Scenario& scn,
                         const rhs::IntegratorConfig& cfg,
                         const CommonOptions& opt, int r) {
    fs::create_directories(opt.output);
    const std::string base = scn.name + "_r" + std::to_string(r);
    const fs::path dir(opt.output);
    if (opt.format == "json") {
        write_file(dir / (base + "_run.json"),
                   rhs::run_full_json(traj, scn.name, cfg));
    } else {
        std::ostringstream csv;
        rhs::write_trajectory_csv(csv, traj);
        write_file(dir / (base + "_trajectory.csv"), csv.str());
        write_file(dir / (base + "_summary.json"),
                   rhs::run_summary_json(traj, scn.name, cfg));
    }
    for (double t_req : parse_times(opt.snapshots)) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < traj.samples.size(); ++j) {
            if (std::fabs(traj.samples[j].t - t_req) <
                std::fabs(traj.samples[best].t - t_req)) {
                best = j;
            }
        }
        std::ostringstream csv;
        rhs::write_snapshot_csv(csv, traj.samples[best], traj.domain);
        write_file(dir / (base + "_snapshot_t" + time_tag(t_req) + ".csv"),
                   csv.str());
    }
}

int cmd_run(const CommonOptions& opt) {
    const rhs::Scenario scn = rhs::make_scenario(opt.scenario, opt.points);
    const rhs::Exponent r(opt.r);
    const rhs::IntegratorConfig cfg = integrator_config(opt, scn);
    const rhs::Trajectory traj =
        rhs::integrate(rhs::initial_state(scn, r), r, cfg);
    write_run_artifacts(traj, scn, cfg, opt, opt.r);
    std::cout << "scenario=" << scn.name << " r=" << opt.r
              << " termination=" << rhs::termination_name(traj.termination)
              << " t_final=" << rhs::format_g17(traj.samples.back().t)
              << " samples=" << traj.samples.size() << " output="
              << opt.output << "\n";
    if (opt.expect_completion &&
        traj.termination != rhs::Termination::completed) {
        std::cerr << "run did not complete: "
                  << rhs::termination_name(traj.termination) << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

void run_pool(std::size_t jobs, const std::function<void(std::size_t)>& body) {
    int threads = thread_cap();
    unsigned workers =
        threads > 0 ? static_cast<unsigned>(threads)
                    : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, jobs == 0 ? 1 : jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < jobs;
                 i = next.fetch_add(1)) {
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

int cmd_sweep(const CommonOptions& opt, const std::vector<int>& r_list) {
    if (r_list.empty()) {
        std::cerr << "empty exponent list\n";
        return kExitUsage;
    }
    for (int r : r_list) rhs::Exponent check(r);  // validate before spawning
    const rhs::Scenario scn = rhs::make_scenario(opt.scenario, opt.points);
    const rhs::IntegratorConfig cfg = integrator_config(opt, scn);

    struct Row {
        rhs::Termination termination = rhs::Termination::completed;
        rhs::BlowupExtraction blowup;
        double drift100 = 0.0;
    };
    std::vector<Row> rows(r_list.size());
    std::vector<std::string> errors(r_list.size());
    run_pool(r_list.size(), [&](std::size_t k) {
        try {
            const rhs::Exponent r(r_list[k]);
            const rhs::Trajectory traj =
                rhs::integrate(rhs::initial_state(scn, r), r, cfg);
            write_run_artifacts(traj, scn, cfg, opt, r_list[k]);
            rows[k].termination = traj.termination;
            rows[k].blowup = rhs::extract_blowup_time(traj, kArtifactSlopeCap);
            rows[k].drift100 = rhs::energy_drift(traj, 100.0);
        } catch (const std::exception& ex) {
            errors[k] = ex.what();
        }
    });

    // Limit comparison column for single-particle sweeps.
    std::vector<rhs::InfinityDeviationRow> inf_rows;
    if (scn.q.size() == 1 && scn.u[0] > 0.0) {
        inf_rows = rhs::infinity_convergence_sweep(
            scn.q[0], scn.u[0], r_list, 5.0, cfg, {}, thread_cap());
    }

    std::ostringstream agg;
    agg << "r,termination,blew_up,t_blowup,energy_drift_window100";
    if (!inf_rows.empty()) agg << ",infinity_deviation";
    agg << "\n";
    bool any_failure = false;
    bool all_completed = true;
    for (std::size_t k = 0; k < r_list.size(); ++k) {
        if (!errors[k].empty()) {
            std::cerr << "r=" << r_list[k] << " failed: " << errors[k] << "\n";
            any_failure = true;
            continue;
        }
        const Row& row = rows[k];
        if (row.termination == rhs::Termination::solver_failure) {
            any_failure = true;
        }
        if (row.termination != rhs::Termination::completed) {
            all_completed = false;
        }
        agg << r_list[k] << ',' << rhs::termination_name(row.termination)
            << ',' << (row.blowup.blew_up ? 1 : 0) << ','
            << (row.blowup.blew_up ? rhs::format_g17(row.blowup.t_blowup)
                                   : "nan")
            << ',' << rhs::format_g17(row.drift100);
        if (!inf_rows.empty()) {
            agg << ',' << rhs::format_g17(inf_rows[k].deviation);
        }
        agg << '\n';
    }
    fs::create_directories(opt.output);
    const fs::path agg_path =
        fs::path(opt.output) / (scn.name + "_sweep.csv");
    write_file(agg_path, agg.str());
    std::cout << "sweep scenario=" << scn.name << " runs=" << r_list.size()
              << " aggregate=" << agg_path.string() << "\n";
    if (any_failure) return kExitNumerical;
    if (opt.expect_completion && !all_completed) return kExitNumerical;
    return kExitOk;
}

// ---- check suites ------------------------------------------------------

json check_entry(const std::string& name, double value, double threshold,
                 bool pass) {
    return json{{"name", name},
                {"value", value},
                {"threshold", threshold},
                {"pass", pass}};
}

json suite_conservation() {
    struct Case {
        const char* scenario;
        int r;
    };
    const Case cases[] = {{"one_point", 2}, {"symmetric", 2}, {"chasing", 2},
                          {"asymmetric", 2}, {"chasing", 4},
                          {"smooth_sine", 2}};
    json checks = json::array();
    for (const Case& c : cases) {
        const rhs::Scenario scn = rhs::make_scenario(c.scenario);
        rhs::IntegratorConfig cfg;
        cfg.t_end = scn.default_t_end;
        cfg.blowup_slope_cap = kArtifactSlopeCap;
        const rhs::Exponent r(c.r);
        const rhs::Trajectory traj =
            rhs::integrate(rhs::initial_state(scn, r), r, cfg);
        const double drift = rhs::energy_drift(traj, 100.0);
        checks.push_back(check_entry(std::string(c.scenario) + "_r" +
                                         std::to_string(c.r) + "_drift",
                                     drift, 1e-6, drift <= 1e-6));
    }
    return checks;
}

json suite_weak_form() {
    struct Case {
        const char* scenario;
        int r;
        double window;  // max |s| over which the spread must stay tight
    };
    const Case cases[] = {{"one_point", 2, 4.0}, {"symmetric", 2, 4.0},
                          {"chasing", 2, 4.0}, {"asymmetric", 2, 4.0},
                          {"chasing", 4, 2.5}};
    json checks = json::array();
    for (const Case& c : cases) {
        const rhs::Scenario scn = rhs::make_scenario(c.scenario);
        rhs::IntegratorConfig cfg;
        cfg.t_end = scn.default_t_end;
        cfg.record_every = 1;
        cfg.blowup_slope_cap = kArtifactSlopeCap;
        const rhs::Exponent r(c.r);
        const rhs::Trajectory traj =
            rhs::integrate(rhs::initial_state(scn, r), r, cfg);
        const rhs::WeakFormReport report = rhs::weak_constant_check(traj);
        double worst = 0.0;
        for (std::size_t j = 0; j < report.size(); ++j) {
            if (traj.samples[j + 1].max_abs_slope > c.window) continue;
            worst = std::max(worst,
                             report[j].spread /
                                 std::max(1.0, std::fabs(report[j].c_estimate)));
        }
        checks.push_back(check_entry(std::string(c.scenario) + "_r" +
                                         std::to_string(c.r) + "_spread",
                                     worst, 1e-4, worst <= 1e-4));
    }
    return checks;
}

json suite_r2_equiv() {
    std::mt19937 rng(2025);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 1 + k % 6;
        const rhs::ParticleState state = rhs::random_instance(rng, n);
        const rhs::Exponent r(2);
        const auto sol = rhs::solve_velocity(state.p, state, r);
        worst = std::max(worst,
                         rhs::r2_equivalence_check(state, sol.profile, r));
    }
    json checks = json::array();
    checks.push_back(
        check_entry("max_formula_difference", worst, 1e-13, worst <= 1e-13));
    return checks;
}

json suite_oracle() {
    std::mt19937 rng(4242);
    const int r_cycle[] = {2, 4, 6};
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 1 + k % 4;
        const rhs::Exponent r(r_cycle[k % 3]);
        const rhs::ParticleState state = rhs::random_instance(rng, n);
        const auto sol = rhs::solve_velocity(state.p, state, r);
        const rhs::BruteForceResult ref = rhs::brute_force_velocity(state, r);
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst,
                             std::fabs(sol.profile.values[i + 1] - ref.u[i]));
        }
    }
    json checks = json::array();
    checks.push_back(
        check_entry("max_solver_oracle_gap", worst, 1e-6, worst <= 1e-6));
    return checks;
}

json suite_blowup_scaling() {
    const rhs::Scenario scn = rhs::make_scenario("one_point");
    rhs::PointData data{scn.q, scn.u, scn.domain};
    rhs::IntegratorConfig cfg;
    cfg.t_end = 50.0;
    cfg.blowup_slope_cap = kArtifactSlopeCap;
    const std::vector<int> r_list = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    const rhs::BlowupSweepResult sweep = rhs::blowup_scaling_sweep(
        data, r_list, cfg, {}, thread_cap());
    bool increasing = true;
    bool all_blew_up = true;
    for (std::size_t k = 0; k < sweep.rows.size(); ++k) {
        all_blew_up = all_blew_up && sweep.rows[k].blew_up;
        if (k > 0 &&
            !(sweep.rows[k].t_blowup > sweep.rows[k - 1].t_blowup)) {
            increasing = false;
        }
    }
    json checks = json::array();
    checks.push_back(check_entry("all_runs_blow_up", all_blew_up ? 1.0 : 0.0,
                                 1.0, all_blew_up));
    checks.push_back(check_entry("t_blowup_strictly_increasing_in_r",
                                 increasing ? 1.0 : 0.0, 1.0, increasing));
    checks.push_back(check_entry("fitted_slope_dt_per_dr", sweep.slope, 0.0,
                                 sweep.slope > 0.0));
    return checks;
}

json suite_infinity() {
    rhs::IntegratorConfig cfg;
    cfg.blowup_slope_cap = kArtifactSlopeCap;
    const std::vector<int> r_list = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    const auto rows = rhs::infinity_convergence_sweep(0.1, 0.1, r_list, 5.0,
                                                      cfg, {}, thread_cap());
    bool decreasing = true;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (!(rows[k].deviation < rows[k - 1].deviation)) decreasing = false;
    }
    // position < 1 is decided on the boundary gap, which stays strictly
    // positive long after the position itself rounds to 1.0
    const double z = rhs::infinity_onepoint_slope(0.1, 0.1);
    double min_gap = 1.0;
    for (double t = 0.0; t <= 50.0; t += 0.5) {
        min_gap =
            std::min(min_gap, rhs::infinity_onepoint_boundary_gap(z, 0.1, t));
    }
    json checks = json::array();
    checks.push_back(check_entry("deviation_monotone_decreasing_in_r",
                                 decreasing ? 1.0 : 0.0, 1.0, decreasing));
    checks.push_back(check_entry("limit_boundary_gap_stays_positive", min_gap,
                                 0.0, min_gap > 0.0));
    return checks;
}

int cmd_check(const std::string& suite) {
    json checks;
    if (suite == "conservation") {
        checks = suite_conservation();
    } else if (suite == "weak_form") {
        checks = suite_weak_form();
    } else if (suite == "r2_equiv") {
        checks = suite_r2_equiv();
    } else if (suite == "oracle") {
        checks = suite_oracle();
    } else if (suite == "blowup_scaling") {
        checks = suite_blowup_scaling();
    } else if (suite == "infinity") {
        checks = suite_infinity();
    } else {
        std::cerr << "unknown suite: " << suite << "\n";
        return kExitUsage;
    }
    bool pass = true;
    for (const json& c : checks) pass = pass && c.at("pass").get<bool>();
    json report{{"suite", suite}, {"pass", pass}, {"checks", checks}};
    std::cout << report.dump(2) << "\n";
    return pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Numerical laboratory for piecewise-linear particle solutions of a "
        "family of higher-exponent Hunter-Saxton equations"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "Integrate one scenario");
    add_common_options(*run, run_opt);
    run->add_option("--r", run_opt.r, "Even exponent r >= 2")
        ->capture_default_str();

    CommonOptions sweep_opt;
    std::vector<int> r_list = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    CLI::App* sweep =
        app.add_subcommand("sweep", "Integrate a scenario across exponents");
    add_common_options(*sweep, sweep_opt);
    sweep->add_option("--r-list", r_list, "Exponents to sweep")
        ->delimiter(',')
        ->capture_default_str();

    std::string suite;
    CLI::App* check = app.add_subcommand("check", "Run a self-check suite");
    check->add_option("suite", suite,
                      "One of: conservation, weak_form, r2_equiv, oracle, "
                      "blowup_scaling, infinity")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_opt);
        if (sweep->parsed()) return cmd_sweep(sweep_opt, r_list);
        return cmd_check(suite);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitNumerical;
    }
}
