#include "bssplan/io.hpp"

#include "bssplan/errors.hpp"
#include "csv.hpp"
#include "json_util.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace bssplan {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> dispatch_columns(const VariableIndex& ix, const NetworkModel& model) {
    std::vector<std::string> cols{"hour"};
    for (const char* p : {"e_", "ch_", "dc_"})
        for (int u = 0; u < ix.num_units(); ++u) cols.push_back(p + ix.unit_label(u));
    for (const auto& r : model.renewables) cols.push_back("pre_" + r.id);
    for (const auto& g : model.generators) cols.push_back("pdg_" + g.id);
    for (const auto& b : model.buses) cols.push_back("pls_" + b.id);
    for (const auto& l : model.lines) cols.push_back("pfl_" + l.id);
    for (const auto& b : model.buses) cols.push_back("th_" + b.id);
    return cols;
}

std::vector<const std::vector<double>*> series_of(const DispatchSolution& d) {
    return {&d.energy, &d.charge, &d.discharge, &d.renewable, &d.generation, &d.shedding, &d.flow, &d.angle};
}

} // namespace

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
}

std::string allocation_to_json(const BssAllocation& a) { return detail::allocation_json(a).dump(2) + "\n"; }

BssAllocation read_allocation(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open allocation '{}'", path.string()));
    BssAllocation a;
    try {
        const auto doc = nlohmann::json::parse(in);
        for (const auto& e : doc.at("entries"))
            a.entries.push_back({e.value("zone", std::string{}), e.at("bus").get<std::string>(),
                                 e.at("technology").get<std::string>(), e.at("rated_power_mw").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw InputError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return a;
}

std::string costs_to_json(const PlanSolution& sol) {
    nlohmann::json per = nlohmann::json::object();
    for (const auto& d : sol.dispatch) per[d.scenario_id] = detail::costs_json(d.costs);
    nlohmann::json doc = {{"objective", sol.objective},
                          {"first_stage", sol.costs.first_stage()},
                          {"second_stage", sol.costs.second_stage()},
                          {"expected", detail::costs_json(sol.costs)},
                          {"scenarios", per}};
    return doc.dump(2) + "\n";
}

std::string dispatch_csv(const DispatchSolution& d, const VariableIndex& ix, const NetworkModel& model) {
    const auto cols = dispatch_columns(ix, model);
    std::string out;
    for (std::size_t k = 0; k < cols.size(); ++k) out += (k ? "," : "") + cols[k];
    out += '\n';
    const int counts[] = {d.units, d.units, d.units, d.sources, d.generators, d.buses, d.lines, d.buses};
    const auto series = series_of(d);
    for (int t = 0; t < d.horizon; ++t) {
        out += std::to_string(t);
        for (std::size_t k = 0; k < series.size(); ++k)
            for (int i = 0; i < counts[k]; ++i) out += fmt::format(",{:.17g}", (*series[k])[static_cast<std::size_t>(t * counts[k] + i)]);
        out += '\n';
    }
    return out;
}

void write_plan(const fs::path& dir, const PlanSolution& sol, const NetworkModel& model, const Catalog& catalog,
                const ScenarioSet& set) {
    const VariableIndex ix(model, catalog, set);
    write_text(dir / "allocation.json", allocation_to_json(sol.allocation));
    write_text(dir / "costs.json", costs_to_json(sol));
    for (const auto& d : sol.dispatch) write_text(dir / "dispatch" / (d.scenario_id + ".csv"), dispatch_csv(d, ix, model));
}

PlanSolution read_plan(const fs::path& dir, const NetworkModel& model, const Catalog& catalog,
                       const PlanningEconomics& econ, const ScenarioSet& set) {
    const VariableIndex ix(model, catalog, set);
    PlanSolution sol;
    sol.units = ix.units();
    sol.allocation = read_allocation(dir / "allocation.json");
    sol.rated.assign(static_cast<std::size_t>(ix.num_units()), 0.0);
    for (const auto& e : sol.allocation.entries) {
        bool found = false;
        for (int u = 0; u < ix.num_units() && !found; ++u) {
            const auto& unit = ix.units()[u];
            if (model.buses[unit.bus].id == e.bus && catalog[unit.tech].label() == e.tech &&
                (e.zone.empty() || model.zones[unit.zone].id == e.zone)) {
                sol.rated[u] = e.rated_power;
                found = true;
            }
        }
        if (!found) throw InputError(fmt::format("{}: unknown storage site bus '{}' tech '{}'", dir.string(), e.bus, e.tech));
    }
    sol.costs = allocation_costs(sol.rated, sol.units, catalog, econ);

    const auto cols = dispatch_columns(ix, model);
    for (std::size_t s = 0; s < set.size(); ++s) {
        const auto& sc = set.scenarios[s];
        const fs::path path = dir / "dispatch" / (sc.id + ".csv");
        if (!fs::exists(path)) throw InputError(fmt::format("missing dispatch file '{}'", path.string()));
        const auto table = csv::read(path);
        if (table.header != cols) throw InputError(fmt::format("{}: columns do not match the network and catalog", path.string()));
        if (static_cast<int>(table.rows.size()) != sc.horizon)
            throw InputError(fmt::format("{}: {} rows, expected {}", path.string(), table.rows.size(), sc.horizon));
        DispatchSolution d;
        d.scenario_id = sc.id;
        d.horizon = sc.horizon;
        d.units = ix.num_units();
        d.sources = static_cast<int>(model.renewables.size());
        d.generators = static_cast<int>(model.generators.size());
        d.buses = static_cast<int>(model.buses.size());
        d.lines = static_cast<int>(model.lines.size());
        std::vector<double>* series[] = {&d.energy, &d.charge, &d.discharge, &d.renewable,
                                         &d.generation, &d.shedding, &d.flow, &d.angle};
        const int counts[] = {d.units, d.units, d.units, d.sources, d.generators, d.buses, d.lines, d.buses};
        for (int t = 0; t < d.horizon; ++t) {
            std::size_t c = 1;
            for (std::size_t k = 0; k < 8; ++k)
                for (int i = 0; i < counts[k]; ++i, ++c) series[k]->push_back(table.number(static_cast<std::size_t>(t), static_cast<int>(c)));
        }
        d.costs = scenario_costs(d, sol.units, model, catalog, econ);
        sol.costs += d.costs.scaled(set.weights[s]);
        sol.dispatch.push_back(std::move(d));
    }
    sol.objective = sol.costs.total();
    return sol;
}

} // namespace bssplan
