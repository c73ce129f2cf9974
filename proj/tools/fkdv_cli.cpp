// Command-line front end for the fractional KdV spectral solver.
//
// Subcommands: solve, converge, zdl, invariants, reference. Configuration
// precedence is flags > config file > defaults; every run emits a JSON
// manifest that can be fed back through --config to reproduce it exactly.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fkdv/experiments.hpp"
#include "fkdv/invariants.hpp"
#include "fkdv/io.hpp"
#include "fkdv/reference.hpp"
#include "fkdv/solver.hpp"
#include "fkdv/version.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Resolved run description
// ---------------------------------------------------------------------------

struct RunSpec {
    fkdv::ModelParams model;
    fkdv::SolverConfig solver;
    std::string initial = "sine(0.5,1)";
    std::vector<double> snapshot_times;
    std::string out_dir = "out";
    int jobs = 0;
    bool full = false;
    // converge
    std::string setup_name = "example-5.3";
    std::vector<int> n_list{128, 256};
    int self_ref_n = 0;
    // zdl
    std::vector<double> eps_list;
    double t_eval = 0.2;
    std::string reference_kind = "hopf";
    std::string beta_file;
    double q_value = 0.0;
    // reference
    std::string solution = "kdv-soliton";
    double ref_t = 0.0;
    double ref_xmin = -15.0, ref_xmax = 15.0;
    int ref_npoints = 1001;
};

// Optional flag values; only what the user actually passed overrides the file.
struct FlagOverrides {
    std::optional<double> alpha, eps, lambda, half_length, dt, tfinal;
    std::optional<int> nmodes, jobs, fp_max_iters, self_ref_n, ref_npoints;
    std::optional<double> fp_tolerance, zeta, t_eval, q_value, ref_t, ref_xmin, ref_xmax;
    std::optional<bool> enforce_cfl;
    std::optional<std::string> initial, out_dir, setup_name, reference_kind, beta_file,
        solution;
    std::optional<std::vector<int>> n_list;
    std::optional<std::vector<double>> eps_list, snapshot_times;
    bool full = false;
};

template <typename T>
void take(std::optional<T>& dst, const json& j, const char* key) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

void apply_json(RunSpec& spec, const json& j) {
    if (j.contains("model")) {
        const auto& m = j.at("model");
        if (m.contains("alpha")) spec.model.alpha = m.at("alpha").get<double>();
        if (m.contains("eps")) spec.model.eps = m.at("eps").get<double>();
        if (m.contains("lambda")) spec.model.lambda = m.at("lambda").get<double>();
        if (m.contains("half_length"))
            spec.model.half_length = m.at("half_length").get<double>();
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        if (s.contains("nmodes")) spec.solver.n_modes = s.at("nmodes").get<int>();
        if (s.contains("dt")) spec.solver.dt = s.at("dt").get<double>();
        if (s.contains("tfinal")) spec.solver.t_final = s.at("tfinal").get<double>();
        if (s.contains("fp_tolerance"))
            spec.solver.fp_tolerance = s.at("fp_tolerance").get<double>();
        if (s.contains("fp_max_iters"))
            spec.solver.fp_max_iters = s.at("fp_max_iters").get<int>();
        if (s.contains("zeta")) spec.solver.zeta = s.at("zeta").get<double>();
        if (s.contains("enforce_cfl"))
            spec.solver.enforce_cfl = s.at("enforce_cfl").get<bool>();
    }
    if (j.contains("initial")) spec.initial = j.at("initial").get<std::string>();
    if (j.contains("snapshot_times"))
        spec.snapshot_times = j.at("snapshot_times").get<std::vector<double>>();
    if (j.contains("out_dir")) spec.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("jobs")) spec.jobs = j.at("jobs").get<int>();
    if (j.contains("setup")) spec.setup_name = j.at("setup").get<std::string>();
    if (j.contains("n_list")) spec.n_list = j.at("n_list").get<std::vector<int>>();
    if (j.contains("self_ref_n")) spec.self_ref_n = j.at("self_ref_n").get<int>();
    if (j.contains("eps_list")) spec.eps_list = j.at("eps_list").get<std::vector<double>>();
    if (j.contains("t_eval")) spec.t_eval = j.at("t_eval").get<double>();
    if (j.contains("reference")) spec.reference_kind = j.at("reference").get<std::string>();
    if (j.contains("beta_file")) spec.beta_file = j.at("beta_file").get<std::string>();
    if (j.contains("q")) spec.q_value = j.at("q").get<double>();
    if (j.contains("solution")) spec.solution = j.at("solution").get<std::string>();
    if (j.contains("ref_t")) spec.ref_t = j.at("ref_t").get<double>();
    if (j.contains("ref_xmin")) spec.ref_xmin = j.at("ref_xmin").get<double>();
    if (j.contains("ref_xmax")) spec.ref_xmax = j.at("ref_xmax").get<double>();
    if (j.contains("ref_npoints")) spec.ref_npoints = j.at("ref_npoints").get<int>();
}

void apply_flags(RunSpec& spec, const FlagOverrides& f) {
    auto set = [](auto& dst, const auto& src) {
        if (src) dst = *src;
    };
    set(spec.model.alpha, f.alpha);
    set(spec.model.eps, f.eps);
    set(spec.model.lambda, f.lambda);
    set(spec.model.half_length, f.half_length);
    set(spec.solver.n_modes, f.nmodes);
    set(spec.solver.dt, f.dt);
    set(spec.solver.t_final, f.tfinal);
    set(spec.solver.fp_tolerance, f.fp_tolerance);
    set(spec.solver.fp_max_iters, f.fp_max_iters);
    set(spec.solver.zeta, f.zeta);
    set(spec.solver.enforce_cfl, f.enforce_cfl);
    set(spec.initial, f.initial);
    set(spec.snapshot_times, f.snapshot_times);
    set(spec.out_dir, f.out_dir);
    set(spec.jobs, f.jobs);
    set(spec.setup_name, f.setup_name);
    set(spec.n_list, f.n_list);
    set(spec.self_ref_n, f.self_ref_n);
    set(spec.eps_list, f.eps_list);
    set(spec.t_eval, f.t_eval);
    set(spec.reference_kind, f.reference_kind);
    set(spec.beta_file, f.beta_file);
    set(spec.q_value, f.q_value);
    set(spec.solution, f.solution);
    set(spec.ref_t, f.ref_t);
    set(spec.ref_xmin, f.ref_xmin);
    set(spec.ref_xmax, f.ref_xmax);
    set(spec.ref_npoints, f.ref_npoints);
    spec.full = spec.full || f.full;
}

/// Desk-scale sweep defaults: the sech^2 catastrophe setup on [-6, 6].
RunSpec zdl_defaults() {
    RunSpec spec;
    spec.model.alpha = 1.999;
    spec.model.lambda = 6.0;
    spec.model.half_length = 6.0;
    spec.solver.n_modes = 1 << 12;
    spec.initial = "sech2";
    spec.t_eval = 0.2;
    return spec;
}

RunSpec resolve_spec(RunSpec spec, const std::string& config_path,
                     const FlagOverrides& flags) {
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw fkdv::ConfigError("cannot open config file " + config_path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw fkdv::ConfigError("malformed JSON in " + config_path + ": " + e.what());
        }
        apply_json(spec, j);
    }
    apply_flags(spec, flags);
    return spec;
}

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

struct InitialDatum {
    std::function<double(double)> fn; // null when given as raw samples
    std::vector<double> samples;
};

std::vector<double> parse_args_list(const std::string& name, const std::string& text,
                                    size_t expected) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    if (out.size() != expected)
        throw fkdv::ConfigError("initial '" + name + "' expects " + std::to_string(expected) +
                                " parameters, got " + std::to_string(out.size()));
    return out;
}

InitialDatum make_initial(const std::string& text, const fkdv::ModelParams& model,
                          const fkdv::PeriodicGrid& grid,
                          std::vector<std::string>& issues) {
    InitialDatum d;
    std::string name = text, args;
    if (const auto open = text.find('('); open != std::string::npos) {
        if (text.back() != ')') {
            issues.push_back("initial: unbalanced parentheses in '" + text + "'");
            return d;
        }
        name = text.substr(0, open);
        args = text.substr(open + 1, text.size() - open - 2);
    }

    try {
        if (name == "sech2") {
            d.fn = [](double x) { return -1.0 / std::pow(std::cosh(x), 2); };
        } else if (name == "sine") {
            const auto a = parse_args_list(name, args, 2);
            const double amp = a[0];
            const double mode = a[1];
            if (mode < 1.0 || mode != std::floor(mode))
                issues.push_back("initial: sine mode must be a positive integer, got " +
                                 fkdv::format_full(mode));
            const double kap = mode * std::numbers::pi / model.half_length;
            d.fn = [amp, kap](double x) { return amp * std::sin(kap * x); };
        } else if (name == "kdv-soliton") {
            d.fn = [](double x) { return fkdv::kdv_one_soliton(x, 0.0); };
        } else if (name == "bo-soliton") {
            const auto a = parse_args_list(name, args, 2);
            const double c = a[0], L = a[1];
            if (c * L < std::numbers::pi)
                issues.push_back("initial: bo-soliton needs c*L >= pi");
            else
                d.fn = [c, L](double x) { return fkdv::bo_soliton(x, 0.0, c, L); };
        } else if (name == "samples") {
            if (!fs::exists(args)) {
                issues.push_back("initial: samples file '" + args + "' does not exist");
                return d;
            }
            std::ifstream in(args);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                // last comma-separated column is the value; a leading x column is allowed
                const auto pos = line.find_last_of(',');
                const std::string cell = pos == std::string::npos ? line : line.substr(pos + 1);
                try {
                    d.samples.push_back(std::stod(cell));
                } catch (const std::exception&) {
                    if (d.samples.empty()) continue; // header row
                    issues.push_back("initial: cannot parse sample line '" + line + "'");
                    return d;
                }
            }
            if (static_cast<int>(d.samples.size()) != grid.n_points())
                issues.push_back("initial: samples file has " +
                                 std::to_string(d.samples.size()) + " values but the grid has " +
                                 std::to_string(grid.n_points()) + " points");
        } else {
            issues.push_back("initial: unknown datum '" + name +
                             "' (expected sech2, sine(a,k), kdv-soliton, bo-soliton(c,L) or "
                             "samples:<file> as samples(<file>))");
        }
    } catch (const std::exception& e) {
        issues.push_back(std::string("initial: ") + e.what());
    }
    return d;
}

// ---------------------------------------------------------------------------
// Manifest helpers
// ---------------------------------------------------------------------------

json spec_to_json(const RunSpec& spec, const std::string& command) {
    json j;
    j["artifact"] = {{"name", "fkdv"}, {"version", fkdv::kVersion},
                     {"revision", fkdv::kGitRevision}};
    j["command"] = command;
    j["model"] = {{"alpha", spec.model.alpha},
                  {"eps", spec.model.eps},
                  {"lambda", spec.model.lambda},
                  {"half_length", spec.model.half_length}};
    j["solver"] = {{"nmodes", spec.solver.n_modes},
                   {"dt", spec.solver.dt},
                   {"tfinal", spec.solver.t_final},
                   {"fp_tolerance", spec.solver.fp_tolerance},
                   {"fp_max_iters", spec.solver.fp_max_iters},
                   {"zeta", spec.solver.zeta},
                   {"enforce_cfl", spec.solver.enforce_cfl}};
    j["initial"] = spec.initial;
    j["snapshot_times"] = spec.snapshot_times;
    j["out_dir"] = spec.out_dir;
    j["jobs"] = spec.jobs;
    if (command == "converge") {
        j["setup"] = spec.setup_name;
        j["n_list"] = spec.n_list;
        j["self_ref_n"] = spec.self_ref_n;
    }
    if (command == "zdl") {
        j["eps_list"] = spec.eps_list;
        j["t_eval"] = spec.t_eval;
        j["reference"] = spec.reference_kind;
        j["beta_file"] = spec.beta_file;
        j["q"] = spec.q_value;
        j["full"] = spec.full;
    }
    if (command == "reference") {
        j["solution"] = spec.solution;
        j["ref_t"] = spec.ref_t;
        j["ref_xmin"] = spec.ref_xmin;
        j["ref_xmax"] = spec.ref_xmax;
        j["ref_npoints"] = spec.ref_npoints;
    }
    return j;
}

void write_manifest(const RunSpec& spec, const std::string& command,
                    const std::vector<std::string>& files, const json& extra = {}) {
    json j = spec_to_json(spec, command);
    j["outputs"] = files;
    if (!extra.is_null()) j["results"] = extra;
    const auto path = (fs::path(spec.out_dir) / "manifest.json").string();
    fkdv::atomic_write_file(path, j.dump(2) + "\n");
    std::cout << "wrote " << path << "\n";
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_solve(const RunSpec& spec, bool invariants_only) {
    std::vector<std::string> issues = fkdv::validate(spec.model);
    for (auto& s : fkdv::validate(spec.solver)) issues.push_back(s);
    for (double s : spec.snapshot_times)
        if (s < 0.0 || s > spec.solver.t_final)
            issues.push_back("snapshot time " + fkdv::format_full(s) +
                             " outside [0, tfinal]");
    std::optional<fkdv::PeriodicGrid> grid;
    InitialDatum datum;
    if (issues.empty()) {
        grid.emplace(fkdv::solver_grid(spec.model, spec.solver));
        datum = make_initial(spec.initial, spec.model, *grid, issues);
    }
    if (!issues.empty()) {
        std::cerr << "configuration errors:\n";
        for (const auto& s : issues) std::cerr << "  - " << s << "\n";
        return 2;
    }

    auto snapshot_times = spec.snapshot_times;
    if (snapshot_times.empty()) snapshot_times = {0.0, spec.solver.t_final};

    // The contraction bound is advisory unless --enforce-cfl is set.
    if (!spec.solver.enforce_cfl) {
        const auto u0 = datum.samples.empty()
                            ? fkdv::project(datum.fn, *grid)
                            : fkdv::analyze(datum.samples, *grid);
        const double dt_max = fkdv::cfl_max_dt(u0, spec.model, spec.solver);
        if (spec.solver.dt > dt_max)
            std::cerr << "warning: dt = " << spec.solver.dt
                      << " exceeds the contraction bound " << dt_max
                      << " for the initial datum (advisory; pass --enforce-cfl to abort)\n";
    }

    fkdv::Trajectory traj;
    if (!datum.samples.empty())
        traj = fkdv::run(std::span<const double>(datum.samples), spec.model, spec.solver,
                         snapshot_times);
    else
        traj = fkdv::run(datum.fn, spec.model, spec.solver, snapshot_times);

    std::vector<std::string> files;
    if (!invariants_only) {
        for (size_t i = 0; i < traj.snapshots.size(); ++i) {
            const auto& snap = traj.snapshots[i];
            const auto s = fkdv::synthesize(snap.field);
            std::vector<std::vector<std::string>> rows;
            const auto& g = snap.field.grid();
            rows.reserve(static_cast<size_t>(g.n_points()));
            for (int j = 0; j < g.n_points(); ++j)
                rows.push_back({fkdv::format_full(g.point(j)),
                                fkdv::format_full(s[static_cast<size_t>(j)])});
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%03zu.csv", i);
            const auto path = (fs::path(spec.out_dir) / name).string();
            fkdv::write_csv(path, {"x", "u"}, rows);
            std::cout << "wrote " << path << " (t = " << snap.time << ")\n";
            files.push_back(path);
        }
    }

    const auto rep = fkdv::report(traj, spec.model);
    {
        std::vector<std::vector<std::string>> rows;
        for (size_t i = 0; i < rep.times.size(); ++i)
            rows.push_back({fkdv::format_full(rep.times[i]),
                            fkdv::format_full(rep.series[0][i]),
                            fkdv::format_full(rep.series[1][i]),
                            fkdv::format_full(rep.series[2][i])});
        const auto path = (fs::path(spec.out_dir) / "invariants.csv").string();
        fkdv::write_csv(path, {"t", "I1", "I2", "I3"}, rows);
        std::cout << "wrote " << path << "\n";
        files.push_back(path);
    }

    json extra;
    extra["snapshot_times_actual"] = json::array();
    for (const auto& s : traj.snapshots) extra["snapshot_times_actual"].push_back(s.time);
    extra["invariants"] = {{"normalized", rep.normalized},
                           {"max_drift", rep.max_drift}};
    write_manifest(spec, invariants_only ? "invariants" : "solve", files, extra);
    return 0;
}

int cmd_converge(const RunSpec& spec) {
    const auto setup = fkdv::example_setup(spec.setup_name);
    fkdv::StudyOptions opt;
    opt.jobs = spec.jobs;
    opt.self_ref_n = spec.self_ref_n;
    opt.fp_tolerance = spec.solver.fp_tolerance;
    const auto rows = fkdv::convergence_study(setup, spec.n_list, opt);

    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        cells.push_back({std::to_string(r.n_modes), fkdv::format_full(r.error),
                         r.rate ? fkdv::format_full(*r.rate) : "",
                         fkdv::format_full(r.i1), fkdv::format_full(r.i2),
                         fkdv::format_full(r.i3)});
        if (!r.note.empty())
            std::cerr << "note: N = " << r.n_modes << ": " << r.note << "\n";
    }
    const auto path = (fs::path(spec.out_dir) / "convergence.csv").string();
    fkdv::write_csv(path, {"N", "E", "R", "I1", "I2", "I3"}, cells);
    std::cout << "wrote " << path << "\n";
    write_manifest(spec, "converge", {path});
    return 0;
}

int cmd_zdl(RunSpec spec) {
    if (spec.eps_list.empty()) {
        spec.eps_list = {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5)};
        if (spec.full)
            spec.eps_list = {1e-1, 1e-2, std::pow(10.0, -2.5), 1e-3,
                             std::pow(10.0, -3.5), 1e-4};
    }
    std::vector<std::string> issues = fkdv::validate(spec.model);
    fkdv::PeriodicGrid probe(64, spec.model.half_length);
    InitialDatum datum = make_initial(spec.initial, spec.model, probe, issues);
    if (!datum.samples.empty())
        issues.push_back("zdl: raw-sample initial data is not supported for sweeps");
    if (spec.reference_kind != "hopf" && spec.reference_kind != "elliptic-file")
        issues.push_back("zdl: reference must be 'hopf' or 'elliptic-file'");
    if (spec.reference_kind == "elliptic-file" && !fs::exists(spec.beta_file))
        issues.push_back("zdl: beta file '" + spec.beta_file + "' does not exist");
    if (!issues.empty()) {
        std::cerr << "configuration errors:\n";
        for (const auto& s : issues) std::cerr << "  - " << s << "\n";
        return 2;
    }

    fkdv::SweepOptions opt;
    opt.n_modes = spec.full ? (1 << 16) : spec.solver.n_modes;
    opt.jobs = spec.jobs;
    opt.fp_tolerance = spec.solver.fp_tolerance;

    std::optional<fkdv::BetaProfile> profile;
    fkdv::ZdlReference ref = fkdv::ZdlReference::hopf();
    if (spec.reference_kind == "elliptic-file") {
        profile = fkdv::BetaProfile::load_csv(spec.beta_file);
        ref = fkdv::ZdlReference::elliptic(*profile, spec.q_value);
    }

    const auto rows =
        fkdv::zdl_sweep(datum.fn, spec.model, spec.eps_list, spec.t_eval, ref, opt);

    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        cells.push_back({fkdv::format_full(r.eps), fkdv::format_full(r.error),
                         fkdv::format_full(r.t_eval), r.reference_kind});
        if (!r.note.empty())
            std::cerr << "note: eps = " << r.eps << ": " << r.note << "\n";
    }
    const auto path = (fs::path(spec.out_dir) / "sweep.csv").string();
    fkdv::write_csv(path, {"eps", "E", "t", "reference_kind"}, cells);
    std::cout << "wrote " << path << "\n";
    write_manifest(spec, "zdl", {path});
    return 0;
}

int cmd_reference(const RunSpec& spec) {
    std::vector<std::string> issues;
    std::function<double(double)> f;
    std::optional<fkdv::HopfSolution> hopf;
    std::optional<fkdv::BetaProfile> profile;

    std::string sol_name = spec.solution, sol_args;
    if (const auto open = spec.solution.find('('); open != std::string::npos &&
                                                   spec.solution.back() == ')') {
        sol_name = spec.solution.substr(0, open);
        sol_args = spec.solution.substr(open + 1, spec.solution.size() - open - 2);
    }

    if (sol_name == "kdv-soliton") {
        f = [t = spec.ref_t](double x) { return fkdv::kdv_one_soliton(x, t); };
    } else if (sol_name == "bo-soliton") {
        double c = 0.25, L = 15.0;
        try {
            if (!sol_args.empty()) {
                const auto a = parse_args_list(sol_name, sol_args, 2);
                c = a[0];
                L = a[1];
            }
            if (c * L < std::numbers::pi)
                issues.push_back("reference: bo-soliton needs c*L >= pi");
            else
                f = [t = spec.ref_t, c, L](double x) { return fkdv::bo_soliton(x, t, c, L); };
        } catch (const fkdv::Error& e) {
            issues.push_back(e.what());
        }
    } else if (sol_name == "hopf") {
        InitialDatum datum = make_initial(spec.initial, spec.model,
                                          fkdv::PeriodicGrid(64, spec.model.half_length),
                                          issues);
        if (issues.empty() && datum.fn) {
            hopf.emplace(datum.fn, spec.model.lambda, -spec.model.half_length,
                         spec.model.half_length);
            if (spec.ref_t >= hopf->break_time())
                issues.push_back("hopf reference: t = " + fkdv::format_full(spec.ref_t) +
                                 " is at or past t_c = " +
                                 fkdv::format_full(hopf->break_time()));
            else
                f = [&h = *hopf, t = spec.ref_t](double x) { return h(x, t); };
        }
    } else if (sol_name == "elliptic-file") {
        if (!fs::exists(spec.beta_file))
            issues.push_back("reference: beta file '" + spec.beta_file + "' does not exist");
        else {
            profile = fkdv::BetaProfile::load_csv(spec.beta_file);
            f = [&, t = spec.ref_t, eps = spec.model.eps, q = spec.q_value](double x) {
                return fkdv::elliptic_asymptotic_u(x, t, eps, profile->at(x), q);
            };
        }
    } else {
        issues.push_back("reference: unknown solution '" + spec.solution +
                         "' (kdv-soliton, bo-soliton(c,L), hopf, elliptic-file)");
    }
    if (!issues.empty()) {
        std::cerr << "configuration errors:\n";
        for (const auto& s : issues) std::cerr << "  - " << s << "\n";
        return 2;
    }

    std::vector<std::vector<std::string>> cells;
    for (int i = 0; i < spec.ref_npoints; ++i) {
        const double x = spec.ref_xmin +
                         (spec.ref_xmax - spec.ref_xmin) * i /
                             std::max(1, spec.ref_npoints - 1);
        cells.push_back({fkdv::format_full(x), fkdv::format_full(f(x))});
    }
    const auto path = (fs::path(spec.out_dir) / "reference.csv").string();
    fkdv::write_csv(path, {"x", "u"}, cells);
    std::cout << "wrote " << path << "\n";
    write_manifest(spec, "reference", {path});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier spectral Galerkin solver for the fractional KdV equation"};
    app.require_subcommand(1);

    std::string config_path;
    FlagOverrides flags;
    std::string snapshots_text, n_list_text, eps_list_text;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (flags override it)");
        cmd->add_option("--alpha", flags.alpha, "fractional exponent in [1,2]");
        cmd->add_option("--eps", flags.eps, "dispersion coefficient (enters as eps^2)");
        cmd->add_option("--lambda", flags.lambda, "nonlinearity coefficient");
        cmd->add_option("--half-length", flags.half_length, "domain half length L");
        cmd->add_option("--nmodes", flags.nmodes, "number of retained modes N");
        cmd->add_option("--dt", flags.dt, "time step");
        cmd->add_option("--tfinal", flags.tfinal, "final time T");
        cmd->add_option("--fp-tolerance", flags.fp_tolerance, "inner iteration tolerance");
        cmd->add_option("--fp-max-iters", flags.fp_max_iters, "inner iteration cap");
        cmd->add_option("--zeta", flags.zeta, "contraction parameter in (0,1)");
        cmd->add_flag("--enforce-cfl", [&](int64_t) { flags.enforce_cfl = true; },
                      "abort steps violating the contraction bound");
        cmd->add_option("--initial", flags.initial,
                        "initial datum: sech2 | sine(a,k) | kdv-soliton | bo-soliton(c,L) | "
                        "samples(<file>)");
        cmd->add_option("--out-dir", flags.out_dir, "output directory");
        cmd->add_option("--jobs", flags.jobs, "worker pool size (FKDV_NUM_THREADS caps it)");
        cmd->add_flag("--full", flags.full, "paper-scale settings instead of desk scale");
        return cmd;
    };

    auto* solve = add_common(app.add_subcommand("solve", "integrate and write snapshots"));
    solve->add_option("--snapshots", snapshots_text, "comma-separated snapshot times");

    auto* invs = add_common(
        app.add_subcommand("invariants", "integrate and write the invariant report only"));
    invs->add_option("--snapshots", snapshots_text, "comma-separated report times");

    auto* conv = add_common(app.add_subcommand("converge", "convergence table for a named "
                                                           "example setup"));
    conv->add_option("--setup", flags.setup_name, "example-5.1 | example-5.2 | example-5.3");
    conv->add_option("--n-list", n_list_text, "comma-separated mode counts");
    conv->add_option("--self-ref-n", flags.self_ref_n,
                     "reference resolution for self-referencing setups (0: 8x largest N)");

    auto* zdl = add_common(app.add_subcommand("zdl", "zero-dispersion sweep over eps"));
    zdl->add_option("--t-eval", flags.t_eval, "evaluation time");
    zdl->add_option("--eps-list", eps_list_text, "comma-separated dispersion coefficients");
    zdl->add_option("--reference", flags.reference_kind, "hopf | elliptic-file");
    zdl->add_option("--beta-file", flags.beta_file, "CSV x,beta1,beta2,beta3 profile");
    zdl->add_option("--q", flags.q_value, "phase q for the elliptic reference");

    auto* refc = add_common(app.add_subcommand("reference", "evaluate a named solution on "
                                                            "a grid"));
    refc->add_option("--solution", flags.solution,
                     "kdv-soliton | bo-soliton | hopf | elliptic-file");
    refc->add_option("--t", flags.ref_t, "evaluation time");
    refc->add_option("--xmin", flags.ref_xmin, "grid start");
    refc->add_option("--xmax", flags.ref_xmax, "grid end");
    refc->add_option("--npoints", flags.ref_npoints, "grid size");
    refc->add_option("--beta-file", flags.beta_file, "CSV profile for elliptic-file");
    refc->add_option("--q", flags.q_value, "phase q for elliptic-file");

    CLI11_PARSE(app, argc, argv);

    try {
        auto parse_list = [](const std::string& text) {
            std::vector<double> out;
            std::istringstream ss(text);
            std::string cell;
            while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
            return out;
        };
        if (!snapshots_text.empty()) flags.snapshot_times = parse_list(snapshots_text);
        if (!eps_list_text.empty()) flags.eps_list = parse_list(eps_list_text);
        if (!n_list_text.empty()) {
            std::vector<int> ns;
            for (double v : parse_list(n_list_text)) ns.push_back(static_cast<int>(v));
            flags.n_list = ns;
        }

        if (solve->parsed()) return cmd_solve(resolve_spec(RunSpec{}, config_path, flags), false);
        if (invs->parsed()) return cmd_solve(resolve_spec(RunSpec{}, config_path, flags), true);
        if (conv->parsed()) return cmd_converge(resolve_spec(RunSpec{}, config_path, flags));
        if (zdl->parsed()) return cmd_zdl(resolve_spec(zdl_defaults(), config_path, flags));
        if (refc->parsed()) return cmd_reference(resolve_spec(RunSpec{}, config_path, flags));
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const fkdv::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const fkdv::ParameterError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const fkdv::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
