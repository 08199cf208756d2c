// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "bssplan/analytics.hpp"
#include "bssplan/errors.hpp"
#include "bssplan/saa.hpp"

#include "support/checks.hpp"
#include "support/quantile_oracle.hpp"
#include "support/random_lp.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <unistd.h>

using namespace bssplan;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = BSSPLAN_FIXTURES;

// pinned tolerances
constexpr double kOracleRel = 1e-5;
constexpr double kOracleSeconds = 60;
constexpr double kFormulaRel = 1e-9;
constexpr double kFormulaSolverRel = 1e-6;
constexpr double kDecisionRel = 1e-6;
constexpr double kSaaEqualRel = 1e-9;
constexpr double kCriticalAbs = 1e-3;
constexpr double kBalanceRel = 1e-6;
constexpr double kCyclicAbs = 1e-6;
constexpr double kBoundAbs = 1e-6;
constexpr double kSimultaneousRel = 1e-7;
constexpr double kCurtailmentAbs = 1e-7;
constexpr double kMonotoneRel = 1e-7;
constexpr double kSweepSeconds = 300;
constexpr double kBruteRel = 1e-8;
constexpr int kBruteCount = 200;
constexpr double kVollAbs = 1e-6;

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    fmt::print("{} {} ({:.1f} s){}{}\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.empty() ? "" : ": ", o.detail);
    std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PlanningEconomics annual() {
    PlanningEconomics e;
    e.operating_scale = 365;
    return e;
}

struct Inputs {
    NetworkModel net = load_network(kFixtures + "/network_5bus.json");
    Catalog cat = load_catalog(kFixtures + "/catalog.csv");
    PlanningEconomics econ = annual();
};

ScenarioSet scenarios(const std::string& rel_path) { return load_scenarios(kFixtures + "/" + rel_path); }

std::optional<double> external_objective(const fs::path& mps) {
    const std::string cmd = fmt::format("'{}' '{}' '{}' 2>&1", BSSPLAN_PYTHON, BSSPLAN_ORACLE_SCRIPT, mps.string());
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) return std::nullopt;
    std::string text;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe.get())) text += buf;
    double v = 0;
    if (std::sscanf(text.c_str(), "optimal %lf", &v) == 1) return v;
    throw std::runtime_error("external solver: " + text);
}

Outcome oracle_equivalence(const Inputs& in) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto set = scenarios("scenarios_24h/manifest_3.csv");
    const auto dir = fs::temp_directory_path() / fmt::format("bssplan_accept_{}", ::getpid());
    fs::create_directories(dir);
    for (double cap : {0.0, 10.0}) {
        const auto prog = build(in.net, in.cat, in.econ, set, ProgramMode::two_stage(cap));
        const auto res = lp::solve(prog.lp);
        o.require(res.status == lp::Status::Optimal, fmt::format("cap {}: internal status {}", cap, lp::to_string(res.status)));
        const auto path = dir / fmt::format("cap{}.mps", cap);
        export_mps(prog, path);
        const auto ext = external_objective(path);
        if (!ext) {
            o.require(false, "external solver could not be started");
            continue;
        }
        const double r = std::abs(res.objective - *ext) / std::abs(*ext);
        o.detail += fmt::format("{}cap {} MW: internal {:.10g} external {:.10g} rel {:.1e}", o.detail.empty() ? "" : "; ",
                                cap, res.objective, *ext, r);
        o.require(r <= kOracleRel, "relative difference above tolerance");
    }
    fs::remove_all(dir);
    const double secs = seconds_since(t0);
    o.require(secs < kOracleSeconds, fmt::format("runtime {:.1f} s", secs));
    return o;
}

Outcome formulas(const Inputs& in) {
    Outcome o;
    int count = 0;
    auto check = [&](const char* what, double got, double want, double tol) {
        ++count;
        o.require(rel(got, want) <= tol, fmt::format("{}: {} vs {}", what, got, want));
    };
    const auto table = load_catalog(kFixtures + "/catalog_variants.csv");
    auto variant = [&](const std::string& name, double d) {
        for (const auto& t : table)
            if (t.name == name && t.duration == d) return t;
        throw std::runtime_error("variant missing: " + name);
    };
    auto annuity = [](double i, int n) {
        double pv = 0;
        for (int k = 1; k <= n; ++k) pv += std::pow(1 + i, -k);
        return 1 / pv;
    };
    auto sinking = [](double i, int n) {
        double fv = 0;
        for (int k = 0; k < n; ++k) fv += std::pow(1 + i, k);
        return 1 / fv;
    };

    BssTechnology leak;
    leak.self_discharge_daily = 0.24;
    check("energy update, self discharge", step_energy(100, 0, 0, leak), 99.0, kFormulaRel);
    const auto nasb = variant("NaSB", 8);
    check("energy update, charge", step_energy(0, 10, 0, nasb), 10.0 * 0.75 / 0.85, kFormulaRel);

    PlanningEconomics econ;
    check("annual discharge cap", annual_discharge_cap(nasb, econ, 10), 4000.0 * 0.8 * 8 * 10 / 13, kFormulaRel);
    check("capital cost", annualized_capital_cost(nasb, econ, 1), 5'042'000.0 * annuity(0.05, 20), kFormulaRel);
    check("replacement cost", annualized_replacement_cost(variant("VRFB", 12), econ, 1),
          144'300.0 * 12 * sinking(0.05, 15), kFormulaRel);
    check("fixed O&M", fixed_om_cost(variant("LAB", 4), 100), 374'000.0, kFormulaRel);
    auto lib = variant("LiB", 4);
    std::vector<double> ch(24, 0.0), dc(24, 0.0);
    ch[3] = 10;
    check("variable O&M", variable_om_and_degradation_cost(lib, ch, dc).first, 23.10, kFormulaRel);
    lib.degradation_cost = 1;
    ch[3] = 40;
    dc[0] = 60;
    check("degradation", variable_om_and_degradation_cost(lib, ch, dc).second, 100 * 0.005 / 0.85, kFormulaRel);

    // one bus, demand 5 then 15 MW, 10 $/MWh up to 10 MW, 100 $/MWh beyond
    NetworkModel net;
    net.zones = {{"Z", false, -kUnbounded, kUnbounded}};
    net.buses = {{"1", "Z", true}};
    ThermalGenerator a;
    a.id = "A";
    a.bus = "1";
    a.p_max = 10;
    a.marginal_cost = {10};
    ThermalGenerator b = a;
    b.id = "B";
    b.p_max = 20;
    b.marginal_cost = {100};
    net.generators = {a, b};
    BssTechnology t;
    t.name = "B";
    t.duration = t.min_duration = t.max_duration = 2;
    t.energy_capacity_cost = 100;
    t.variable_om = 1;
    t.cycle_limit = 10'000;
    t.lifetime_years = 10;
    Scenario s;
    s.id = "s";
    s.horizon = 2;
    s.load["1"] = {5, 15};
    const auto set = ScenarioSet::uniform({s});
    const auto with = solve_program(net, {t}, econ, set, ProgramMode::two_stage(5));
    const auto without = solve_program(net, {t}, econ, set, ProgramMode::two_stage(0));
    const double hand = 100 * 2 * 5 * annuity(0.05, 20) + 1.0 * 10 + 200 - 650;
    check("operational planning cost", bss_operational_planning_cost(with, without, econ).at(0), hand,
          kFormulaSolverRel);

    auto synthetic = [](std::vector<double> re, std::vector<double> ls) {
        PlanSolution p;
        DispatchSolution d;
        d.scenario_id = "x";
        d.horizon = static_cast<int>(re.size());
        d.sources = d.buses = 1;
        d.renewable = std::move(re);
        d.shedding = std::move(ls);
        p.dispatch = {d};
        return p;
    };
    const auto red = reduction_metrics(synthetic({60, 90}, {1, 2}), synthetic({20, 30}, {4, 5}), econ);
    check("curtailment reduction", red[0].curtailment, 100.0, kFormulaRel);
    check("shedding term", red[0].shedding, -6.0, kFormulaRel);
    const auto pi = cost_effectiveness({50, 50}, {{100, -10}, {200, -30}}, {"a", "b"});
    check("RCRCE", pi.rc, 3.0, kFormulaRel);
    check("LSRCE", pi.ls, -0.4, kFormulaRel);
    o.detail = fmt::format("{} checks", count) + (o.pass ? "" : "; " + o.detail);
    (void)in;
    return o;
}

Outcome decision_values(const Inputs& in) {
    Outcome o;
    RunOptions opts;
    opts.cap = 10;
    for (const char* name : {"scenarios_24h", "scenarios_24h/manifest_3.csv", "scenarios_single", "scenarios_24h_dup",
                             "scenarios_168h"}) {
        auto econ = in.econ;
        if (std::string(name) == "scenarios_168h") econ.operating_scale = 365.0 / 7.0;
        const auto set = scenarios(name);
        const auto v = compute_evpi_vss(in.net, in.cat, econ, set, opts);
        const double tol = kDecisionRel * std::abs(v.rp);
        o.require(v.evpi >= -tol, fmt::format("{}: EVPI {}", name, v.evpi));
        o.require(v.vss >= -tol, fmt::format("{}: VSS {}", name, v.vss));
        if (std::string(name) == "scenarios_24h_dup") {
            o.require(std::abs(v.evpi) <= tol, fmt::format("{}: EVPI {} not zero", name, v.evpi));
            o.require(std::abs(v.vss) <= tol, fmt::format("{}: VSS {} not zero", name, v.vss));
        }
        if (o.pass) o.detail += fmt::format("{}{}: EVPI/RP {:.2e} VSS/RP {:.2e}", o.detail.empty() ? "" : "; ", name,
                                            v.evpi / v.rp, v.vss / v.rp);
    }
    return o;
}

Outcome saa_correctness(const Inputs& in) {
    Outcome o;
    const double t = t_quantile(0.025, 19);
    const double z = z_quantile(0.025);
    o.require(std::abs(t - oracle::t_critical(0.025, 19)) <= kCriticalAbs, fmt::format("t {} vs oracle", t));
    o.require(std::abs(t - 2.0930) <= kCriticalAbs, fmt::format("t {} vs 2.0930", t));
    o.require(std::abs(z - oracle::z_critical(0.025)) <= kCriticalAbs, fmt::format("z {} vs oracle", z));
    o.require(std::abs(z - 1.9600) <= kCriticalAbs, fmt::format("z {} vs 1.9600", z));

    RunOptions opts;
    opts.cap = 10;
    const auto full = scenarios("scenarios_24h/manifest_3.csv");
    SaaConfig cfg;
    cfg.replications = 3;
    cfg.sample_size = full.size();
    const auto r = run_saa(in.net, in.cat, in.econ, full, cfg, opts);
    o.require(r.sigma_lower <= kSaaEqualRel * std::abs(r.mu_lower), fmt::format("sigma_L {}", r.sigma_lower));
    for (const auto& rep : r.replications)
        o.require(std::abs(rep.objective - r.mu_lower) <= kSaaEqualRel * std::abs(r.mu_lower),
                  fmt::format("h {} differs from mean {}", rep.objective, r.mu_lower));

    const auto four = scenarios("scenarios_24h");
    cfg.replications = 4;
    cfg.sample_size = 2;
    cfg.seed = 2024;
    opts.jobs = 1;
    const auto serial = to_json(run_saa(in.net, in.cat, in.econ, four, cfg, opts));
    opts.jobs = 8;
    const auto parallel = to_json(run_saa(in.net, in.cat, in.econ, four, cfg, opts));
    o.require(serial == parallel, "report differs between 1 and 8 jobs");
    if (o.pass) o.detail = fmt::format("t {:.4f} z {:.4f} sigma_L {:.1e}, {} byte report", t, z, r.sigma_lower, serial.size());
    return o;
}

Outcome physical(const Inputs& in) {
    Outcome o;
    int solves = 0;
    auto inspect = [&](const std::string& name, const ScenarioSet& set, const PlanningEconomics& econ, double cap) {
        const auto sol = solve_program(in.net, in.cat, econ, set, ProgramMode::two_stage(cap));
        ++solves;
        const auto r = checks::inspect(sol, in.net, in.cat, econ, set);
        const auto tag = fmt::format("{} cap {}", name, cap);
        o.require(r.worst_balance <= kBalanceRel, fmt::format("{}: balance {}", tag, r.worst_balance));
        o.require(r.worst_cyclic <= kCyclicAbs, fmt::format("{}: cyclic {}", tag, r.worst_cyclic));
        o.require(r.worst_energy_bound <= kBoundAbs, fmt::format("{}: energy bound {}", tag, r.worst_energy_bound));
        o.require(r.worst_cycle_cap <= kBoundAbs, fmt::format("{}: cycle cap {}", tag, r.worst_cycle_cap));
        o.require(r.worst_simultaneous <= kSimultaneousRel, fmt::format("{}: simultaneous {}", tag, r.worst_simultaneous));
        o.require(r.worst_curtailment >= -kCurtailmentAbs, fmt::format("{}: curtailment {}", tag, r.worst_curtailment));
    };
    const auto three = scenarios("scenarios_24h/manifest_3.csv");
    for (double cap : {0.0, 5.0, 10.0, 20.0, kUnbounded}) inspect("manifest_3", three, in.econ, cap);
    inspect("scenarios_24h", scenarios("scenarios_24h"), in.econ, 10);
    inspect("scenarios_24h_dup", scenarios("scenarios_24h_dup"), in.econ, 10);
    inspect("scenarios_single", scenarios("scenarios_single"), in.econ, 10);
    auto weekly = in.econ;
    weekly.operating_scale = 365.0 / 7.0;
    inspect("scenarios_168h", scenarios("scenarios_168h"), weekly, 10);
    if (o.pass) o.detail = fmt::format("{} solves", solves);
    return o;
}

Outcome sweep(const Inputs& in) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto set = scenarios("scenarios_24h/manifest_3.csv");
    const auto table = capacity_sweep(in.net, in.cat, in.econ, set, {0, 5, 10, 20}, {});
    const auto& rows = table.rows;
    auto non_increasing = [&](const char* what, auto get, std::size_t from) {
        for (std::size_t k = from + 1; k < rows.size(); ++k) {
            const double prev = get(rows[k - 1]);
            const double cur = get(rows[k]);
            o.require(cur <= prev + kMonotoneRel * std::max(1.0, std::abs(prev)),
                      fmt::format("{} rises from {} to {} at cap {}", what, prev, cur, rows[k].cap));
        }
    };
    non_increasing("shedding", [](const SweepRow& r) { return r.shedding; }, 0);
    non_increasing("curtailment", [](const SweepRow& r) { return r.curtailment; }, 0);
    non_increasing("objective", [](const SweepRow& r) { return r.objective; }, 0);
    non_increasing("RCRCE", [](const SweepRow& r) { return r.pi_rc; }, 1);
    non_increasing("LSRCE", [](const SweepRow& r) { return r.pi_ls_reduction; }, 1);
    const double secs = seconds_since(t0);
    o.require(secs < kSweepSeconds, fmt::format("runtime {:.1f} s", secs));
    if (o.pass) {
        std::string shed, rc, ls;
        for (const auto& r : rows) {
            shed += fmt::format(" {:.0f}", r.shedding);
            if (r.cap > 0) {
                rc += fmt::format(" {:.3e}", r.pi_rc);
                ls += fmt::format(" {:.3e}", r.pi_ls_reduction);
            }
        }
        o.detail = fmt::format("shedding{} MWh; RCRCE{}; LSRCE{}; saturation {:.3f} MW", shed, rc, ls,
                               table.unconstrained.installed);
    }
    return o;
}

Outcome brute_force() {
    Outcome o;
    std::mt19937_64 rng(31337);
    int verdicts[3] = {0, 0, 0};
    for (int k = 0; k < kBruteCount; ++k) {
        const auto p = oracle::random_lp(rng);
        const auto want = oracle::brute_force(p);
        const auto got = lp::solve(p.to_instance());
        switch (want.verdict) {
        case oracle::Verdict::Optimal:
            ++verdicts[0];
            o.require(got.status == lp::Status::Optimal && rel(got.objective, want.objective) <= kBruteRel,
                      fmt::format("instance {}: {} {} vs {}", k, lp::to_string(got.status), got.objective, want.objective));
            break;
        case oracle::Verdict::Infeasible:
            ++verdicts[1];
            o.require(got.status == lp::Status::Infeasible, fmt::format("instance {}: {} vs Infeasible", k, lp::to_string(got.status)));
            break;
        case oracle::Verdict::Unbounded:
            ++verdicts[2];
            o.require(got.status == lp::Status::Unbounded, fmt::format("instance {}: {} vs Unbounded", k, lp::to_string(got.status)));
            break;
        }
    }
    if (o.pass) o.detail = fmt::format("{} optimal, {} infeasible, {} unbounded", verdicts[0], verdicts[1], verdicts[2]);
    return o;
}

Outcome voll(const Inputs& in) {
    Outcome o;
    const auto set = scenarios("scenarios_24h/manifest_3.csv");
    for (double cap : {0.0, 5.0}) {
        const auto base = solve_program(in.net, in.cat, in.econ, set, ProgramMode::two_stage(cap));
        const double before = expected_shedding(base, set, in.econ);
        o.require(before > 0, fmt::format("cap {}: fixture does not shed", cap));
        auto net = in.net;
        net.voll *= 10;
        const auto high = solve_program(net, in.cat, in.econ, set, ProgramMode::two_stage(cap));
        const double after = expected_shedding(high, set, in.econ);
        o.require(after <= before + kVollAbs, fmt::format("cap {}: shedding rises {} -> {}", cap, before, after));
        o.detail += fmt::format("{}cap {}: {:.6g} -> {:.6g} MWh", o.detail.empty() ? "" : "; ", cap, before, after);
    }
    return o;
}

} // namespace

int main() {
    const Inputs in;
    criterion("oracle equivalence against an external LP solver", [&] { return oracle_equivalence(in); });
    criterion("formula unit values", [&] { return formulas(in); });
    criterion("EVPI and VSS invariants", [&] { return decision_values(in); });
    criterion("SAA correctness", [&] { return saa_correctness(in); });
    criterion("physical invariants", [&] { return physical(in); });
    criterion("capacity sweep shapes", [&] { return sweep(in); });
    criterion("brute force LP oracle", [] { return brute_force(); });
    criterion("VOLL dominance", [&] { return voll(in); });
    fmt::print("{} of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
