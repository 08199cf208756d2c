#include "bssplan/program.hpp"

#include "bssplan/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace bssplan {

namespace {

constexpr int kKinds = 8;
const char* const kKindPrefix[kKinds] = {"e", "ch", "dc", "pre", "pdg", "pls", "pfl", "th"};

} // namespace

double BssAllocation::total() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.rated_power;
    return s;
}

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& o) {
    capital += o.capital;
    replacement += o.replacement;
    fixed_om += o.fixed_om;
    variable_om += o.variable_om;
    degradation += o.degradation;
    operating += o.operating;
    emission += o.emission;
    shedding += o.shedding;
    return *this;
}

CostBreakdown CostBreakdown::scaled(double f) const {
    CostBreakdown c = *this;
    for (double* v : {&c.capital, &c.replacement, &c.fixed_om, &c.variable_om, &c.degradation, &c.operating,
                      &c.emission, &c.shedding})
        *v *= f;
    return c;
}

// ------------------------------------------------------------------ index

VariableIndex::VariableIndex(const NetworkModel& model, const Catalog& catalog, const ScenarioSet& set) {
    for (std::size_t b = 0; b < model.buses.size(); ++b) {
        const int z = model.zone_of_bus(static_cast<int>(b));
        if (z < 0 || model.zones[z].is_external) continue;
        for (std::size_t n = 0; n < catalog.size(); ++n) {
            units_.push_back({z, static_cast<int>(b), static_cast<int>(n)});
            unit_labels_.push_back(fmt::format("z{}_b{}_{}", model.zones[z].id, model.buses[b].id, catalog[n].label()));
        }
    }
    for (const auto& s : set.scenarios) scenario_ids_.push_back(s.id);
    for (const auto& r : model.renewables) source_ids_.push_back(r.id);
    for (const auto& g : model.generators) generator_ids_.push_back(g.id);
    for (const auto& b : model.buses) bus_ids_.push_back(b.id);
    for (const auto& l : model.lines) line_ids_.push_back(l.id);
    horizon_ = set.horizon();

    const int sizes[kKinds] = {num_units(),
                               num_units(),
                               num_units(),
                               static_cast<int>(source_ids_.size()),
                               static_cast<int>(generator_ids_.size()),
                               static_cast<int>(bus_ids_.size()),
                               static_cast<int>(line_ids_.size()),
                               static_cast<int>(bus_ids_.size())};
    int acc = 0;
    for (int k = 0; k < kKinds; ++k) {
        offset_[k] = acc;
        acc += sizes[k];
    }
    offset_[kKinds] = acc;
    stride_ = acc;
}

int VariableIndex::count(Kind k) const {
    const int i = static_cast<int>(k);
    return offset_[i + 1] - offset_[i];
}

VariableIndex::Coordinate VariableIndex::decode(int column) const {
    Coordinate c;
    if (column < num_units()) {
        c.first_stage = true;
        c.item = column;
        return c;
    }
    const int rel = column - num_units();
    const int block = rel / stride_;
    const int within = rel % stride_;
    c.scenario = block / horizon_;
    c.hour = block % horizon_;
    int k = kKinds - 1;
    while (offset_[k] > within) --k;
    c.kind = static_cast<Kind>(k);
    c.item = within - offset_[k];
    return c;
}

std::string VariableIndex::column_name(int column) const {
    const auto c = decode(column);
    if (c.first_stage) return "pbs_" + unit_labels_[c.item];
    const std::string head = fmt::format("{}_s{}_t{}_", kKindPrefix[static_cast<int>(c.kind)], scenario_ids_[c.scenario], c.hour);
    switch (c.kind) {
    case Kind::Energy:
    case Kind::Charge:
    case Kind::Discharge: return head + unit_labels_[c.item];
    case Kind::Renewable: return head + source_ids_[c.item];
    case Kind::Generation: return head + generator_ids_[c.item];
    case Kind::Shedding:
    case Kind::Angle: return head + "b" + bus_ids_[c.item];
    case Kind::Flow: return head + line_ids_[c.item];
    }
    return head;
}

// ------------------------------------------------------------------ build

namespace {

void check_inputs(const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ,
                  const ScenarioSet& set, const ProgramMode& mode) {
    const auto report = validate_network(model);
    if (!report.ok()) throw InputError("invalid network: " + report.violations.front());
    if (catalog.empty()) throw InputError("empty technology catalog");
    for (const auto& t : catalog)
        if (auto issues = validate_technology(t); !issues.empty()) throw InputError(issues.front());
    validate_economics(econ);
    set.validate();
    if (mode.kind == ProgramMode::Kind::WaitAndSee && set.size() != 1)
        throw InputError(fmt::format("wait-and-see mode needs exactly one scenario, got {}", set.size()));
    if (mode.kind != ProgramMode::Kind::FixedFirstStage && !(mode.cap >= 0.0))
        throw ConfigError(fmt::format("capacity cap must be >= 0 (got {})", mode.cap));

    const int T = set.horizon();
    for (const auto& g : model.generators)
        if (g.marginal_cost.size() != 1 && g.marginal_cost.size() != static_cast<std::size_t>(T))
            throw InputError(fmt::format("generator '{}': marginal_cost has {} entries, horizon is {}", g.id,
                                         g.marginal_cost.size(), T));
    for (const auto& s : set.scenarios) {
        for (const auto& [bus, v] : s.load)
            if (model.bus_index(bus) < 0) throw InputError(fmt::format("scenario '{}': load for unknown bus '{}'", s.id, bus));
        for (const auto& [src, v] : s.res_cap) {
            const bool known = std::any_of(model.renewables.begin(), model.renewables.end(),
                                           [&](const RenewableSource& r) { return r.id == src; });
            if (!known) throw InputError(fmt::format("scenario '{}': series for unknown renewable '{}'", s.id, src));
        }
        for (const auto& r : model.renewables)
            if (!s.res_cap.count(r.id))
                throw InputError(fmt::format("scenario '{}': missing series res_{}", s.id, r.id));
    }
}

std::vector<double> fixed_rated(const ProgramMode& mode, const VariableIndex& index, const NetworkModel& model,
                                const Catalog& catalog) {
    std::vector<double> rated(static_cast<std::size_t>(index.num_units()), 0.0);
    for (const auto& e : mode.allocation.entries) {
        if (!(e.rated_power >= 0.0) || !std::isfinite(e.rated_power))
            throw InputError(fmt::format("allocation at bus '{}' for {}: rated power must be finite and >= 0", e.bus, e.tech));
        bool found = false;
        for (int u = 0; u < index.num_units(); ++u) {
            const auto& unit = index.units()[u];
            if (model.buses[unit.bus].id == e.bus && catalog[unit.tech].label() == e.tech &&
                (e.zone.empty() || model.zones[unit.zone].id == e.zone)) {
                rated[u] += e.rated_power;
                found = true;
                break;
            }
        }
        if (!found && e.rated_power != 0.0)
            throw InputError(fmt::format("allocation names unknown storage site zone '{}' bus '{}' tech '{}'", e.zone, e.bus, e.tech));
    }
    return rated;
}

class RowBuilder {
public:
    explicit RowBuilder(lp::LpInstance& lp) : lp_(lp) {}
    RowBuilder& add(int col, double v) {
        idx_.push_back(col);
        val_.push_back(v);
        return *this;
    }
    void finish(lp::Sense s, double rhs, std::string name, double range = 0.0) {
        lp_.add_row(idx_, val_, s, rhs, std::move(name), range);
        idx_.clear();
        val_.clear();
    }

private:
    lp::LpInstance& lp_;
    std::vector<int> idx_;
    std::vector<double> val_;
};

} // namespace

Program build(const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ, const ScenarioSet& set,
              const ProgramMode& mode) {
    check_inputs(model, catalog, econ, set, mode);
    using K = VariableIndex::Kind;
    using lp::Sense;

    Program prog;
    prog.index = VariableIndex(model, catalog, set);
    const VariableIndex& ix = prog.index;
    lp::LpInstance& lp = prog.lp;
    lp.name = "BSSPLAN";

    const int U = ix.num_units();
    const int T = set.horizon();
    const int S = static_cast<int>(set.size());
    const double omega = econ.operating_scale;
    const auto& units = ix.units();

    // columns, in index order
    std::vector<double> rated_fixed;
    if (mode.kind == ProgramMode::Kind::FixedFirstStage) rated_fixed = fixed_rated(mode, ix, model, catalog);
    for (int u = 0; u < U; ++u) {
        const double c = annual_cost_per_mw(catalog[units[u].tech], econ);
        if (rated_fixed.empty()) lp.add_column(c, 0.0, mode.cap);
        else lp.add_column(c, rated_fixed[u], rated_fixed[u]);
    }
    const int ref = [&] {
        for (std::size_t b = 0; b < model.buses.size(); ++b)
            if (model.buses[b].is_reference) return static_cast<int>(b);
        return 0;
    }();
    for (int s = 0; s < S; ++s) {
        const Scenario& sc = set.scenarios[s];
        const double w = set.weights[s] * omega;
        for (int t = 0; t < T; ++t) {
            for (int u = 0; u < U; ++u) lp.add_column(0.0, 0.0, kUnbounded);
            for (int k = 0; k < 2; ++k)
                for (int u = 0; u < U; ++u) lp.add_column(w * catalog[units[u].tech].throughput_cost(), 0.0, kUnbounded);
            for (const auto& r : model.renewables) lp.add_column(0.0, 0.0, sc.res_cap_at(r.id, t));
            for (const auto& g : model.generators)
                lp.add_column(w * (g.cost_at(t) + model.carbon_price * g.emission_rate), g.p_min, g.p_max);
            for (const auto& b : model.buses) lp.add_column(w * model.voll, 0.0, sc.load_at(b.id, t));
            for (const auto& l : model.lines) lp.add_column(0.0, l.flow_min, l.flow_max);
            for (std::size_t b = 0; b < model.buses.size(); ++b) {
                if (static_cast<int>(b) == ref) lp.add_column(0.0, 0.0, 0.0);
                else lp.add_column(0.0, -kUnbounded, kUnbounded);
            }
        }
    }
    if (lp.num_cols() != ix.num_columns()) throw std::logic_error("column layout mismatch");

    // zone membership
    std::vector<int> bus_zone(model.buses.size());
    for (std::size_t b = 0; b < model.buses.size(); ++b) bus_zone[b] = model.zone_of_bus(static_cast<int>(b));
    std::vector<int> line_from(model.lines.size()), line_to(model.lines.size());
    for (std::size_t l = 0; l < model.lines.size(); ++l) {
        line_from[l] = model.bus_index(model.lines[l].from_bus);
        line_to[l] = model.bus_index(model.lines[l].to_bus);
    }
    for (std::size_t z = 0; z < model.zones.size(); ++z) {
        const auto& zone = model.zones[z];
        const bool bounded = std::isfinite(zone.exchange_min) || std::isfinite(zone.exchange_max);
        bool has_tie = false;
        for (std::size_t l = 0; l < model.lines.size(); ++l)
            has_tie = has_tie || (bus_zone[line_from[l]] != bus_zone[line_to[l]] &&
                                  (bus_zone[line_from[l]] == static_cast<int>(z) || bus_zone[line_to[l]] == static_cast<int>(z)));
        if (bounded && !has_tie && (zone.exchange_min > 0.0 || zone.exchange_max < 0.0))
            throw InputError(fmt::format("zone '{}': exchange bounds exclude zero but the zone has no tie lines", zone.id));
    }

    RowBuilder row(lp);

    for (int s = 0; s < S; ++s) {
        const Scenario& sc = set.scenarios[s];
        const std::string sid = sc.id;
        for (int t = 0; t < T; ++t) {
            const int prev = (t + T - 1) % T;

            for (int u = 0; u < U; ++u) {
                const auto& tech = catalog[units[u].tech];
                const std::string& ul = ix.unit_label(u);
                const int e = ix.col(s, t, K::Energy, u);
                const int ep = ix.col(s, prev, K::Energy, u);
                const int ch = ix.col(s, t, K::Charge, u);
                const int dc = ix.col(s, t, K::Discharge, u);
                const int pbar = ix.rated(u);

                // energy balance, hour t-1 wraps to the last hour
                const double keep = 1.0 - tech.self_discharge_daily / 24.0;
                if (prev == t) row.add(e, 1.0 - keep);
                else row.add(e, 1.0).add(ep, -keep);
                row.add(ch, -tech.charge_eff).add(dc, 1.0 / tech.discharge_eff)
                    .finish(Sense::Eq, 0.0, fmt::format("soc_s{}_t{}_{}", sid, t, ul));

                row.add(e, 1.0).add(pbar, -tech.duration).finish(Sense::Le, 0.0, fmt::format("emax_s{}_t{}_{}", sid, t, ul));
                if (tech.max_dod < 1.0)
                    row.add(e, 1.0).add(pbar, -(1.0 - tech.max_dod) * tech.duration)
                        .finish(Sense::Ge, 0.0, fmt::format("emin_s{}_t{}_{}", sid, t, ul));
                row.add(ch, 1.0).add(dc, 1.0).add(pbar, -1.0).finish(Sense::Le, 0.0, fmt::format("pcs_s{}_t{}_{}", sid, t, ul));
            }

            if (T > 1) {
                for (std::size_t g = 0; g < model.generators.size(); ++g) {
                    const auto& gen = model.generators[g];
                    const double span = gen.p_max - gen.p_min;
                    const bool up = gen.ramp_up < span;
                    const bool down = gen.ramp_down < span;
                    if (!up && !down) continue;
                    row.add(ix.col(s, t, K::Generation, static_cast<int>(g)), 1.0)
                        .add(ix.col(s, prev, K::Generation, static_cast<int>(g)), -1.0);
                    const std::string name = fmt::format("ramp_s{}_t{}_{}", sid, t, gen.id);
                    if (up && down) row.finish(Sense::Le, gen.ramp_up, name, gen.ramp_up + gen.ramp_down);
                    else if (up) row.finish(Sense::Le, gen.ramp_up, name);
                    else row.finish(Sense::Ge, -gen.ramp_down, name);
                }
            }

            for (std::size_t l = 0; l < model.lines.size(); ++l) {
                const auto& line = model.lines[l];
                row.add(ix.col(s, t, K::Flow, static_cast<int>(l)), 1.0)
                    .add(ix.col(s, t, K::Angle, line_from[l]), -line.susceptance)
                    .add(ix.col(s, t, K::Angle, line_to[l]), line.susceptance)
                    .finish(Sense::Eq, 0.0, fmt::format("dcflow_s{}_t{}_{}", sid, t, line.id));
            }

            for (std::size_t z = 0; z < model.zones.size(); ++z) {
                const auto& zone = model.zones[z];
                const int zi = static_cast<int>(z);
                auto add_imports = [&](double scale) {
                    for (std::size_t l = 0; l < model.lines.size(); ++l) {
                        const int zf = bus_zone[line_from[l]];
                        const int zt = bus_zone[line_to[l]];
                        if (zf == zt) continue;
                        if (zt == zi) row.add(ix.col(s, t, K::Flow, static_cast<int>(l)), scale);
                        else if (zf == zi) row.add(ix.col(s, t, K::Flow, static_cast<int>(l)), -scale);
                    }
                };

                if (std::isfinite(zone.exchange_min) || std::isfinite(zone.exchange_max)) {
                    add_imports(1.0);
                    const std::string name = fmt::format("exch_s{}_t{}_z{}", sid, t, zone.id);
                    if (std::isfinite(zone.exchange_min) && std::isfinite(zone.exchange_max))
                        row.finish(Sense::Le, zone.exchange_max, name, zone.exchange_max - zone.exchange_min);
                    else if (std::isfinite(zone.exchange_max)) row.finish(Sense::Le, zone.exchange_max, name);
                    else row.finish(Sense::Ge, zone.exchange_min, name);
                }

                double load = 0.0;
                for (std::size_t g = 0; g < model.generators.size(); ++g)
                    if (bus_zone[model.bus_index(model.generators[g].bus)] == zi)
                        row.add(ix.col(s, t, K::Generation, static_cast<int>(g)), 1.0);
                for (std::size_t r = 0; r < model.renewables.size(); ++r)
                    if (bus_zone[model.bus_index(model.renewables[r].bus)] == zi)
                        row.add(ix.col(s, t, K::Renewable, static_cast<int>(r)), 1.0);
                for (int u = 0; u < U; ++u)
                    if (units[u].zone == zi)
                        row.add(ix.col(s, t, K::Discharge, u), 1.0).add(ix.col(s, t, K::Charge, u), -1.0);
                add_imports(1.0);
                for (std::size_t b = 0; b < model.buses.size(); ++b)
                    if (bus_zone[b] == zi) {
                        row.add(ix.col(s, t, K::Shedding, static_cast<int>(b)), 1.0);
                        load += sc.load_at(model.buses[b].id, t);
                    }
                row.finish(Sense::Eq, load, fmt::format("bal_s{}_t{}_z{}", sid, t, zone.id));
            }
        }

        // equivalent-cycle limit over the horizon
        for (int u = 0; u < U; ++u) {
            const auto& tech = catalog[units[u].tech];
            for (int t = 0; t < T; ++t) row.add(ix.col(s, t, K::Discharge, u), 1.0);
            row.add(ix.rated(u), -tech.cycle_limit * econ.reference_dod * tech.duration / tech.lifetime_years / omega)
                .finish(Sense::Le, 0.0, fmt::format("cycles_s{}_{}", sid, ix.unit_label(u)));
        }
    }

    if (mode.kind != ProgramMode::Kind::FixedFirstStage && std::isfinite(mode.cap) && U > 0) {
        for (int u = 0; u < U; ++u) row.add(ix.rated(u), 1.0);
        row.finish(Sense::Le, mode.cap, "bss_cap");
    }
    return prog;
}

// ---------------------------------------------------------------- extract

CostBreakdown allocation_costs(const std::vector<double>& rated, const std::vector<StorageUnit>& units,
                               const Catalog& catalog, const PlanningEconomics& econ) {
    CostBreakdown c;
    for (std::size_t u = 0; u < units.size(); ++u) {
        const auto& tech = catalog[units[u].tech];
        c.capital += annualized_capital_cost(tech, econ, rated[u]);
        c.replacement += annualized_replacement_cost(tech, econ, rated[u]);
        c.fixed_om += fixed_om_cost(tech, rated[u]);
    }
    return c;
}

CostBreakdown scenario_costs(const DispatchSolution& d, const std::vector<StorageUnit>& units,
                             const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ) {
    CostBreakdown c;
    std::vector<double> ch(static_cast<std::size_t>(d.horizon)), dc(static_cast<std::size_t>(d.horizon));
    for (std::size_t u = 0; u < units.size(); ++u) {
        for (int t = 0; t < d.horizon; ++t) {
            ch[t] = d.ch(t, static_cast<int>(u));
            dc[t] = d.dc(t, static_cast<int>(u));
        }
        const auto [vo, deg] = variable_om_and_degradation_cost(catalog[units[u].tech], ch, dc);
        c.variable_om += vo;
        c.degradation += deg;
    }
    for (int t = 0; t < d.horizon; ++t) {
        for (std::size_t g = 0; g < model.generators.size(); ++g) {
            const auto& gen = model.generators[g];
            c.operating += gen.cost_at(t) * d.dg(t, static_cast<int>(g));
            c.emission += model.carbon_price * gen.emission_rate * d.dg(t, static_cast<int>(g));
        }
        for (int b = 0; b < d.buses; ++b) c.shedding += model.voll * d.ls(t, b);
    }
    return c.scaled(econ.operating_scale);
}

PlanSolution extract_solution(const lp::SolveResult& result, const Program& program, const NetworkModel& model,
                              const Catalog& catalog, const PlanningEconomics& econ, const ScenarioSet& set) {
    if (result.status != lp::Status::Optimal)
        throw SolverError(fmt::format("LP not solved to optimality: {}", lp::to_string(result.status)));
    using K = VariableIndex::Kind;
    const auto& ix = program.index;
    PlanSolution sol;
    sol.units = ix.units();
    sol.raw = result;
    sol.objective = result.objective;
    sol.rated.resize(static_cast<std::size_t>(ix.num_units()));
    for (int u = 0; u < ix.num_units(); ++u) {
        const double p = std::max(0.0, result.x[ix.rated(u)]);
        sol.rated[u] = p;
        const auto& unit = ix.units()[u];
        sol.allocation.entries.push_back({model.zones[unit.zone].id, model.buses[unit.bus].id, catalog[unit.tech].label(), p});
    }
    sol.costs = allocation_costs(sol.rated, sol.units, catalog, econ);

    for (int s = 0; s < ix.num_scenarios(); ++s) {
        DispatchSolution d;
        d.scenario_id = set.scenarios[s].id;
        d.horizon = ix.horizon();
        d.units = ix.num_units();
        d.sources = ix.count(K::Renewable);
        d.generators = ix.count(K::Generation);
        d.buses = ix.count(K::Shedding);
        d.lines = ix.count(K::Flow);
        auto grab = [&](K kind, std::vector<double>& out) {
            const int n = ix.count(kind);
            out.resize(static_cast<std::size_t>(n * d.horizon));
            for (int t = 0; t < d.horizon; ++t)
                for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(t * n + i)] = result.x[ix.col(s, t, kind, i)];
        };
        grab(K::Energy, d.energy);
        grab(K::Charge, d.charge);
        grab(K::Discharge, d.discharge);
        grab(K::Renewable, d.renewable);
        grab(K::Generation, d.generation);
        grab(K::Shedding, d.shedding);
        grab(K::Flow, d.flow);
        grab(K::Angle, d.angle);
        d.costs = scenario_costs(d, sol.units, model, catalog, econ);
        sol.costs += d.costs.scaled(set.weights[s]);
        sol.dispatch.push_back(std::move(d));
    }
    return sol;
}

PlanSolution solve_program(const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ,
                           const ScenarioSet& set, const ProgramMode& mode, const lp::SolverConfig& solver) {
    const Program prog = build(model, catalog, econ, set, mode);
    const auto result = lp::solve(prog.lp, solver);
    return extract_solution(result, prog, model, catalog, econ, set);
}

void export_mps(const Program& program, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    lp::write_mps(program.lp, out, [&](int j) { return program.index.column_name(j); });
    if (!out) throw InputError(fmt::format("write to '{}' failed", path.string()));
}

} // namespace bssplan
