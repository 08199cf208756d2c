#include "bssplan/errors.hpp"
#include "bssplan/program.hpp"

#include "support/checks.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace bssplan;

namespace {

const std::string kFixtures = BSSPLAN_FIXTURES;

struct Fixture {
    NetworkModel net = load_network(kFixtures + "/network_5bus.json");
    Catalog cat = load_catalog(kFixtures + "/catalog.csv");
    ScenarioSet set = load_scenarios(kFixtures + "/scenarios_24h/manifest_3.csv");
    PlanningEconomics econ = [] {
        PlanningEconomics e;
        e.operating_scale = 365.0;
        return e;
    }();
};

const Fixture& fx() {
    static const Fixture f;
    return f;
}

// One bus, one generator, flat load over two hours.
struct Tiny {
    NetworkModel net;
    Catalog cat;
    ScenarioSet set;
    PlanningEconomics econ;

    explicit Tiny(double load) {
        net.zones = {{"Z", false, -kUnbounded, kUnbounded}};
        net.buses = {{"1", "Z", true}};
        ThermalGenerator g;
        g.id = "G";
        g.bus = "1";
        g.p_min = 0;
        g.p_max = 10;
        g.marginal_cost = {20};
        net.generators = {g};
        net.voll = 10'000;
        BssTechnology t;
        t.name = "B";
        t.duration = t.min_duration = t.max_duration = 2;
        t.energy_capacity_cost = 100'000;
        t.rte = t.charge_eff = t.discharge_eff = 1;
        t.variable_om = 1;
        t.cycle_limit = 1000;
        t.lifetime_years = 10;
        cat = {t};
        Scenario s;
        s.id = "only";
        s.horizon = 2;
        s.load["1"] = {load, load};
        set = ScenarioSet::uniform({s});
    }
};

} // namespace

TEST_CASE("single generator serves a flat load") {
    Tiny m(5.0);
    const auto sol = solve_program(m.net, m.cat, m.econ, m.set, ProgramMode::two_stage(0.0));
    CHECK(sol.objective == doctest::Approx(200.0).epsilon(1e-9));
    CHECK(sol.dispatch[0].dg(0, 0) == doctest::Approx(5.0));
    CHECK(sol.dispatch[0].dg(1, 0) == doctest::Approx(5.0));
    CHECK(sol.costs.operating == doctest::Approx(200.0).epsilon(1e-9));
    CHECK(sol.costs.capital == 0.0);
    CHECK(sol.costs.replacement == 0.0);
    CHECK(sol.costs.fixed_om == 0.0);
    CHECK(sol.costs.variable_om == 0.0);
    CHECK(sol.costs.degradation == 0.0);
    CHECK(sol.costs.emission == 0.0);
    CHECK(sol.costs.shedding == 0.0);
}

TEST_CASE("load above capacity is shed at VOLL") {
    Tiny m(15.0);
    const auto sol = solve_program(m.net, m.cat, m.econ, m.set, ProgramMode::two_stage(0.0));
    CHECK(sol.objective == doctest::Approx(2.0 * (200.0 + 50'000.0)).epsilon(1e-9));
    CHECK(sol.dispatch[0].ls(0, 0) == doctest::Approx(5.0));
    CHECK(sol.dispatch[0].ls(1, 0) == doctest::Approx(5.0));
    CHECK(sol.costs.shedding == doctest::Approx(100'000.0));
}

TEST_CASE("zero load gives an all-zero dispatch") {
    Tiny m(0.0);
    const auto sol = solve_program(m.net, m.cat, m.econ, m.set, ProgramMode::two_stage(kUnbounded));
    CHECK(sol.objective == 0.0);
    for (double v : sol.dispatch[0].generation) CHECK(v == 0.0);
    for (double v : sol.dispatch[0].charge) CHECK(v == 0.0);
    CHECK(sol.allocation.total() == 0.0);
}

TEST_CASE("a zero cap matches the fixed zero allocation") {
    const auto& f = fx();
    const auto capped = solve_program(f.net, f.cat, f.econ, f.set, ProgramMode::two_stage(0.0));
    for (const auto& e : capped.allocation.entries) CHECK(e.rated_power == 0.0);
    const auto fixed = solve_program(f.net, f.cat, f.econ, f.set, ProgramMode::fixed_first_stage({}));
    CHECK(capped.objective == doctest::Approx(fixed.objective).epsilon(1e-9));
}

TEST_CASE("fixture solve satisfies the physical invariants and cost accounting") {
    const auto& f = fx();
    for (double cap : {0.0, 10.0}) {
        CAPTURE(cap);
        const auto sol = solve_program(f.net, f.cat, f.econ, f.set, ProgramMode::two_stage(cap));
        CHECK(sol.allocation.total() <= cap + 1e-7);
        CHECK(std::abs(sol.costs.total() - sol.objective) <= 1e-6 * std::abs(sol.objective));
        const auto r = checks::inspect(sol, f.net, f.cat, f.econ, f.set);
        CHECK(r.worst_balance <= 1e-6);
        CHECK(r.worst_cyclic <= 1e-6);
        CHECK(r.worst_energy_bound <= 1e-6);
        CHECK(r.worst_cycle_cap <= 1e-6);
        CHECK(r.worst_simultaneous <= 1e-7);
        CHECK(r.worst_curtailment >= -1e-7);
        CHECK(r.worst_flow <= 1e-6);
        CHECK(r.worst_bounds <= 1e-7);
    }
}

TEST_CASE("objective does not increase with the capacity cap") {
    const auto& f = fx();
    double prev = kUnbounded;
    for (double cap : {0.0, 2.5, 10.0, 40.0}) {
        const auto sol = solve_program(f.net, f.cat, f.econ, f.set, ProgramMode::two_stage(cap));
        CHECK(sol.objective <= prev + 1e-7 * std::abs(prev));
        prev = sol.objective;
    }
}

TEST_CASE("variable index is a bijection with readable names") {
    const auto& f = fx();
    const auto prog = build(f.net, f.cat, f.econ, f.set, ProgramMode::two_stage(10.0));
    const auto& ix = prog.index;
    using K = VariableIndex::Kind;
    CHECK(ix.num_units() == 3 * 6);
    const int per_hour = 3 * ix.num_units() + 3 + 4 + 5 + 5 + 5;
    CHECK(ix.num_columns() == ix.num_units() + 3 * 24 * per_hour);
    CHECK(prog.lp.num_cols() == ix.num_columns());

    std::set<std::string> names;
    for (int j = 0; j < ix.num_columns(); ++j) {
        const auto c = ix.decode(j);
        if (c.first_stage) CHECK(ix.rated(c.item) == j);
        else CHECK(ix.col(c.scenario, c.hour, c.kind, c.item) == j);
        const auto name = ix.column_name(j);
        CHECK(name.size() <= 61);
        names.insert(name);
    }
    CHECK(names.size() == static_cast<std::size_t>(ix.num_columns()));
    CHECK(names.count("pbs_zA_b1_NaSB6") == 1);
    CHECK(names.count("pbs_zA_b3_VRFB8") == 1);
    CHECK(ix.column_name(ix.col(1, 5, K::Generation, 2)) == "pdg_ss2_t5_G4");
    CHECK(ix.column_name(ix.col(0, 0, K::Flow, 3)) == "pfl_ss1_t0_L34");
}

TEST_CASE("exported MPS carries semantic names") {
    const auto& f = fx();
    const auto prog = build(f.net, f.cat, f.econ, f.set, ProgramMode::two_stage(10.0));
    std::ostringstream out;
    lp::write_mps(prog.lp, out, [&](int j) { return prog.index.column_name(j); });
    const auto text = out.str();
    CHECK(text.find("pbs_zA_b1_NaSB6") != std::string::npos);
    CHECK(text.find("bal_ss1_t0_zA") != std::string::npos);
    CHECK(text.find("bss_cap") != std::string::npos);
}

TEST_CASE("inconsistent inputs are rejected") {
    const auto& f = fx();
    CHECK_THROWS_AS(build(f.net, f.cat, f.econ, f.set, ProgramMode::wait_and_see(10.0)), InputError);

    auto set = f.set;
    set.scenarios[0].res_cap.erase("WT3");
    set.scenarios[1].res_cap.erase("WT3");
    set.scenarios[2].res_cap.erase("WT3");
    CHECK_THROWS_AS(build(f.net, f.cat, f.econ, set, ProgramMode::two_stage(10.0)), InputError);

    auto net = f.net;
    net.generators[0].marginal_cost = {1, 2, 3};
    CHECK_THROWS_AS(build(net, f.cat, f.econ, f.set, ProgramMode::two_stage(10.0)), InputError);

    BssAllocation bogus;
    bogus.entries.push_back({"A", "1", "NoSuchTech4", 3.0});
    CHECK_THROWS_AS(build(f.net, f.cat, f.econ, f.set, ProgramMode::fixed_first_stage(bogus)), InputError);

    auto econ = f.econ;
    econ.interest_rate = 0.0;
    CHECK_THROWS_AS(build(f.net, f.cat, econ, f.set, ProgramMode::two_stage(10.0)), ConfigError);
    CHECK_THROWS_AS(build(f.net, f.cat, f.econ, f.set, ProgramMode::two_stage(-1.0)), ConfigError);
}

TEST_CASE("a fixed allocation is reproduced exactly") {
    const auto& f = fx();
    const auto free = solve_program(f.net, f.cat, f.econ, f.set, ProgramMode::two_stage(10.0));
    const auto fixed = solve_program(f.net, f.cat, f.econ, f.set, ProgramMode::fixed_first_stage(free.allocation));
    CHECK(fixed.objective == doctest::Approx(free.objective).epsilon(1e-8));
    for (std::size_t u = 0; u < free.rated.size(); ++u) CHECK(fixed.rated[u] == free.rated[u]);
}
