#pragma once

#include "bssplan/lp.hpp"
#include "bssplan/network.hpp"
#include "bssplan/scenario.hpp"
#include "bssplan/storage.hpp"

#include <string>
#include <vector>

namespace bssplan {

/// A storage candidate: technology `tech` at `bus` (indices into the network
/// and catalog).
struct StorageUnit {
    int zone = 0;
    int bus = 0;
    int tech = 0;
};

struct BssAllocation {
    struct Entry {
        std::string zone;
        std::string bus;
        std::string tech; // variant label, e.g. "NaSB8"
        double rated_power = 0.0;
    };
    std::vector<Entry> entries;

    double total() const;
};

struct ProgramMode {
    enum class Kind { TwoStage, FixedFirstStage, WaitAndSee };
    Kind kind = Kind::TwoStage;
    /// Total rated power cap; infinite drops the cap row.
    double cap = kUnbounded;
    BssAllocation allocation;

    static ProgramMode two_stage(double cap) { return {Kind::TwoStage, cap, {}}; }
    static ProgramMode fixed_first_stage(BssAllocation a) { return {Kind::FixedFirstStage, kUnbounded, std::move(a)}; }
    static ProgramMode wait_and_see(double cap) { return {Kind::WaitAndSee, cap, {}}; }
};

/// Dense column layout: rated power per unit first, then one block per
/// scenario and hour holding e, ch, dc (per unit), re (per source), dg (per
/// generator), ls (per bus), fl (per line) and theta (per bus).
class VariableIndex {
public:
    enum class Kind { Energy, Charge, Discharge, Renewable, Generation, Shedding, Flow, Angle };

    struct Coordinate {
        bool first_stage = false;
        int scenario = 0;
        int hour = 0;
        Kind kind = Kind::Energy;
        int item = 0; // unit when first_stage
    };

    VariableIndex() = default;
    VariableIndex(const NetworkModel& model, const Catalog& catalog, const ScenarioSet& set);

    const std::vector<StorageUnit>& units() const { return units_; }
    int num_units() const { return static_cast<int>(units_.size()); }
    int horizon() const { return horizon_; }
    int num_scenarios() const { return static_cast<int>(scenario_ids_.size()); }
    int num_columns() const { return num_units() + num_scenarios() * horizon_ * stride_; }
    int count(Kind k) const;

    int rated(int unit) const { return unit; }
    int col(int scenario, int hour, Kind k, int item) const {
        return num_units() + (scenario * horizon_ + hour) * stride_ + offset_[static_cast<int>(k)] + item;
    }

    Coordinate decode(int column) const;
    std::string column_name(int column) const;
    /// "z<zone>_b<bus>_<label>"
    const std::string& unit_label(int unit) const { return unit_labels_[static_cast<std::size_t>(unit)]; }

private:
    std::vector<StorageUnit> units_;
    std::vector<std::string> unit_labels_;
    std::vector<std::string> scenario_ids_;
    std::vector<std::string> source_ids_;
    std::vector<std::string> generator_ids_;
    std::vector<std::string> bus_ids_;
    std::vector<std::string> line_ids_;
    int horizon_ = 0;
    int stride_ = 0;
    int offset_[9] = {};
};

struct Program {
    lp::LpInstance lp;
    VariableIndex index;
};

/// Deterministic equivalent over `set`. WaitAndSee requires a single
/// scenario. Throws InputError on inconsistent data, ConfigError on bad
/// economics.
Program build(const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ, const ScenarioSet& set,
              const ProgramMode& mode);

struct CostBreakdown {
    double capital = 0.0;
    double replacement = 0.0;
    double fixed_om = 0.0;
    double variable_om = 0.0;
    double degradation = 0.0;
    double operating = 0.0;
    double emission = 0.0;
    double shedding = 0.0;

    double first_stage() const { return capital + replacement + fixed_om; }
    double second_stage() const { return variable_om + degradation + operating + emission + shedding; }
    double total() const { return first_stage() + second_stage(); }
    CostBreakdown& operator+=(const CostBreakdown& o);
    CostBreakdown scaled(double f) const;
};

/// Hourly values of one scenario, flattened as [hour * count + item].
struct DispatchSolution {
    std::string scenario_id;
    int horizon = 0;
    int units = 0, sources = 0, generators = 0, buses = 0, lines = 0;
    std::vector<double> energy, charge, discharge, renewable, generation, shedding, flow, angle;
    /// Second-stage costs of this scenario (unweighted, annualised).
    CostBreakdown costs;

    double at(const std::vector<double>& series, int hour, int item, int count) const {
        return series[static_cast<std::size_t>(hour * count + item)];
    }
    double e(int t, int u) const { return at(energy, t, u, units); }
    double ch(int t, int u) const { return at(charge, t, u, units); }
    double dc(int t, int u) const { return at(discharge, t, u, units); }
    double re(int t, int r) const { return at(renewable, t, r, sources); }
    double dg(int t, int g) const { return at(generation, t, g, generators); }
    double ls(int t, int b) const { return at(shedding, t, b, buses); }
    double fl(int t, int l) const { return at(flow, t, l, lines); }
    double th(int t, int b) const { return at(angle, t, b, buses); }
};

struct PlanSolution {
    BssAllocation allocation;
    std::vector<double> rated;                 // per storage unit
    std::vector<StorageUnit> units;
    std::vector<DispatchSolution> dispatch;    // per scenario of the set
    CostBreakdown costs;                       // weighted, sums to objective
    double objective = 0.0;
    lp::SolveResult raw;
};

/// Maps an optimal LP solution back to semantic values. Throws SolverError
/// when the result is not optimal.
PlanSolution extract_solution(const lp::SolveResult& result, const Program& program, const NetworkModel& model,
                              const Catalog& catalog, const PlanningEconomics& econ, const ScenarioSet& set);

/// build + solve + extract_solution.
PlanSolution solve_program(const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ,
                           const ScenarioSet& set, const ProgramMode& mode, const lp::SolverConfig& solver = {});

/// Second-stage cost of one scenario's dispatch given the allocation.
CostBreakdown scenario_costs(const DispatchSolution& d, const std::vector<StorageUnit>& units,
                             const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ);

/// First-stage cost of an allocation.
CostBreakdown allocation_costs(const std::vector<double>& rated, const std::vector<StorageUnit>& units,
                               const Catalog& catalog, const PlanningEconomics& econ);

/// MPS with names from the variable index.
void export_mps(const Program& program, const std::filesystem::path& path);

} // namespace bssplan
