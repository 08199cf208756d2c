#include "cli.hpp"

#include "bssplan/analytics.hpp"
#include "bssplan/errors.hpp"
#include "bssplan/io.hpp"
#include "bssplan/saa.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>

namespace bssplan::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
    std::string network;
    std::string catalog;
    std::string scenarios;
    std::string output = "out";
    double cap_mw = kUnbounded;
    std::optional<double> voll;
    std::optional<double> carbon_price;
    PlanningEconomics econ;
    SaaConfig saa;
    int jobs = 1;
    lp::SolverConfig solver;
    std::vector<double> caps{0, 5, 10, 20};
    std::string allocation;
    std::string baseline;
    std::string with_bss;
    std::string mps;
};

struct Inputs {
    NetworkModel net;
    Catalog cat;
    ScenarioSet set;
};

void require_path(const std::string& p, const char* what) {
    if (p.empty()) throw ConfigError(fmt::format("missing --{}", what));
    if (!fs::exists(p)) throw InputError(fmt::format("{} not found: '{}'", what, p));
}

Inputs load(const RunConfig& c) {
    require_path(c.network, "network");
    require_path(c.catalog, "catalog");
    require_path(c.scenarios, "scenarios");
    validate_economics(c.econ);
    Inputs in;
    in.net = load_network(c.network);
    if (c.voll) in.net.voll = *c.voll;
    if (c.carbon_price) in.net.carbon_price = *c.carbon_price;
    const auto report = validate_network(in.net);
    if (!report.ok()) {
        std::string msg = fmt::format("network '{}' is invalid:", c.network);
        for (const auto& v : report.violations) msg += "\n  " + v;
        throw InputError(msg);
    }
    in.cat = load_catalog(c.catalog);
    in.set = load_scenarios(c.scenarios);
    in.set.validate();
    return in;
}

RunOptions options(const RunConfig& c) {
    if (c.jobs < 1) throw ConfigError(fmt::format("--jobs must be >= 1 (got {})", c.jobs));
    if (!(c.cap_mw >= 0.0)) throw ConfigError(fmt::format("--cap-mw must be >= 0 (got {})", c.cap_mw));
    return {c.cap_mw, c.jobs, c.solver};
}

ProgramMode plan_mode(const RunConfig& c) {
    if (!c.allocation.empty()) {
        require_path(c.allocation, "allocation");
        return ProgramMode::fixed_first_stage(read_allocation(c.allocation));
    }
    return ProgramMode::two_stage(c.cap_mw);
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
    const auto in = load(c);
    // building the program cross-checks scenario series against the network
    build(in.net, in.cat, c.econ, in.set, ProgramMode::two_stage(0.0));
    fmt::print(out, "ok: {} buses, {} lines, {} technologies, {} scenarios x {} h\n", in.net.buses.size(),
               in.net.lines.size(), in.cat.size(), in.set.size(), in.set.horizon());
    return 0;
}

int cmd_plan(const RunConfig& c, std::ostream& out) {
    const auto in = load(c);
    const auto opts = options(c);
    const Program prog = build(in.net, in.cat, c.econ, in.set, plan_mode(c));
    const auto result = lp::solve(prog.lp, opts.solver);
    const fs::path dir = c.output;
    nlohmann::json summary = {{"status", lp::to_string(result.status)},
                              {"iterations", result.iterations},
                              {"rows", prog.lp.num_rows()},
                              {"columns", prog.lp.num_cols()}};
    if (result.status != lp::Status::Optimal) {
        write_text(dir / "summary.json", summary.dump(2) + "\n");
        throw SolverError(fmt::format("plan: solver status {}", lp::to_string(result.status)));
    }
    const auto sol = extract_solution(result, prog, in.net, in.cat, c.econ, in.set);
    summary["objective"] = sol.objective;
    summary["installed_mw"] = sol.allocation.total();
    write_plan(dir, sol, in.net, in.cat, in.set);
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    fmt::print(out, "objective {:.10g}, installed {:.6g} MW, written to {}\n", sol.objective, sol.allocation.total(),
               dir.string());
    return 0;
}

int cmd_saa(const RunConfig& c, std::ostream& out) {
    const auto in = load(c);
    const auto report = run_saa(in.net, in.cat, c.econ, in.set, c.saa, options(c));
    write_text(fs::path(c.output) / "saa_report.json", to_json(report));
    write_text(fs::path(c.output) / "saa_summary.tsv", summary_table(report));
    write_text(fs::path(c.output) / "allocation.json", allocation_to_json(report.allocation));
    out << summary_table(report);
    return 0;
}

int cmd_evpi(const RunConfig& c, std::ostream& out) {
    const auto in = load(c);
    const auto v = compute_evpi_vss(in.net, in.cat, c.econ, in.set, options(c));
    write_text(fs::path(c.output) / "decision_values.json", to_json(v));
    fmt::print(out, "RP\tWS\tEVPI\tEEV\tVSS\n{:.10g}\t{:.10g}\t{:.10g}\t{:.10g}\t{:.10g}\n", v.rp, v.ws, v.evpi, v.eev,
               v.vss);
    return 0;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
    const auto in = load(c);
    const auto table = capacity_sweep(in.net, in.cat, c.econ, in.set, c.caps, options(c));
    write_text(fs::path(c.output) / "sweep.csv", table.csv());
    out << table.csv();
    return 0;
}

int cmd_metrics(const RunConfig& c, std::ostream& out) {
    const auto in = load(c);
    require_path(c.baseline, "baseline");
    require_path(c.with_bss, "with-bss");
    const auto without = read_plan(c.baseline, in.net, in.cat, c.econ, in.set);
    const auto with = read_plan(c.with_bss, in.net, in.cat, c.econ, in.set);
    const auto m = compute_metrics(with, without, in.net, in.set, c.econ);
    const fs::path dir = c.output;
    write_text(dir / "metrics_scenarios.csv", m.per_scenario_csv());
    write_text(dir / "metrics_summary.json", m.summary_json());
    write_text(dir / "normalized_load.csv", m.normalized_load_csv());
    out << m.per_scenario_csv();
    for (const auto& id : m.pi.negative_lambda) fmt::print(out, "note: negative lambda in scenario '{}'\n", id);
    return 0;
}

int cmd_export_mps(const RunConfig& c, std::ostream& out) {
    const auto in = load(c);
    options(c);
    const Program prog = build(in.net, in.cat, c.econ, in.set, plan_mode(c));
    const fs::path path = c.mps.empty() ? fs::path(c.output) / "model.mps" : fs::path(c.mps);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    export_mps(prog, path);
    fmt::print(out, "{} rows, {} columns written to {}\n", prog.lp.num_rows(), prog.lp.num_cols(), path.string());
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Battery storage siting and sizing under uncertainty", "bssplan"};
    app.set_config("--config", "", "TOML file with the same keys as the long options");
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--network", c.network, "Network JSON file or CSV directory");
    app.add_option("--catalog", c.catalog, "Technology catalog CSV");
    app.add_option("--scenarios", c.scenarios, "Scenario directory or manifest CSV");
    app.add_option("--output", c.output, "Output directory")->capture_default_str();
    app.add_option("--cap-mw", c.cap_mw, "Total rated power cap (MW), inf for none");
    app.add_option("--voll", c.voll, "Value of lost load ($/MWh), overrides the network");
    app.add_option("--carbon-price", c.carbon_price, "Carbon price ($/tCO2), overrides the network");
    app.add_option("--interest-rate", c.econ.interest_rate)->capture_default_str();
    app.add_option("--planning-horizon", c.econ.planning_horizon, "Years")->capture_default_str();
    app.add_option("--reference-dod", c.econ.reference_dod)->capture_default_str();
    app.add_option("--operating-scale", c.econ.operating_scale, "Scenario horizons per year")->capture_default_str();
    app.add_option("--saa-w", c.saa.replications, "SAA replications")->capture_default_str();
    app.add_option("--saa-m", c.saa.sample_size, "Scenarios per SAA replication")->capture_default_str();
    app.add_option("--alpha", c.saa.alpha)->capture_default_str();
    app.add_option("--seed", c.saa.seed)->capture_default_str();
    app.add_option("--jobs", c.jobs, "Worker threads")->capture_default_str();
    app.add_option("--feas-tol", c.solver.feas_tol)->capture_default_str();
    app.add_option("--opt-tol", c.solver.opt_tol)->capture_default_str();
    app.add_option("--max-iterations", c.solver.max_iterations)->capture_default_str();
    app.add_option("--caps", c.caps, "Sweep caps in MW, comma separated")->delimiter(',');
    app.add_option("--allocation", c.allocation, "Fixed allocation JSON for plan and export-mps");
    app.add_option("--baseline", c.baseline, "Plan directory solved without storage");
    app.add_option("--with-bss", c.with_bss, "Plan directory solved with storage");
    app.add_option("--mps", c.mps, "MPS output path");

    int (*action)(const RunConfig&, std::ostream&) = nullptr;
    auto sub = [&](const char* name, const char* help, int (*fn)(const RunConfig&, std::ostream&)) {
        app.add_subcommand(name, help)->callback([&action, fn] { action = fn; });
    };
    sub("validate", "Check all inputs", cmd_validate);
    sub("plan", "Solve the two-stage program over the scenario set", cmd_plan);
    sub("saa", "Sample average approximation with confidence bounds", cmd_saa);
    sub("evpi", "RP, WS, EVPI, EEV and VSS", cmd_evpi);
    sub("sweep", "Capacity sweep over --caps", cmd_sweep);
    sub("metrics", "Cost effectiveness from a baseline and a storage plan", cmd_metrics);
    sub("export-mps", "Write the LP as MPS", cmd_export_mps);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return 3;
    }

    try {
        return action(c, out);
    } catch (const SolverError& e) {
        fmt::print(err, "solver error: {}\n", e.what());
        return 1;
    } catch (const InputError& e) {
        fmt::print(err, "input error: {}\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        fmt::print(err, "config error: {}\n", e.what());
        return 3;
    } catch (const fs::filesystem_error& e) {
        fmt::print(err, "input error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(err, "solver error: {}\n", e.what());
        return 1;
    }
}

} // namespace bssplan::cli
