#pragma once

#include "bssplan/program.hpp"
#include "bssplan/saa.hpp"

#include <string>
#include <vector>

namespace bssplan {

/// Annual storage operational-planning cost per scenario: allocation costs
/// plus throughput costs plus the change in thermal and carbon cost against
/// the no-storage dispatch. May be negative. Throws InputError on a
/// mismatched pair.
std::vector<double> bss_operational_planning_cost(const PlanSolution& with_bss, const PlanSolution& without_bss,
                                                  const PlanningEconomics& econ);

struct Reduction {
    double curtailment = 0.0; // sum of (with - without) renewable output, MWh/yr
    double shedding = 0.0;    // sum of (with - without) shedding, MWh/yr; negative when storage helps
};

std::vector<Reduction> reduction_metrics(const PlanSolution& with_bss, const PlanSolution& without_bss,
                                         const PlanningEconomics& econ);

struct CostEffectiveness {
    double rc = 0.0;          // curtailment reduction per $
    double ls = 0.0;          // shedding term per $, as defined (with - without)
    double ls_reduction = 0.0; // shedding reduction per $, (without - with)
    std::vector<std::string> negative_lambda;
};

/// Means over scenarios of reduction / lambda. Throws InputError naming the
/// scenario when a lambda is zero.
CostEffectiveness cost_effectiveness(const std::vector<double>& lambda, const std::vector<Reduction>& reductions,
                                     const std::vector<std::string>& scenario_ids);

/// Fraction of hours each line sits at a flow limit (tolerance 1e-5 of the limit).
std::vector<double> congestion_rate(const DispatchSolution& d, const NetworkModel& model);

struct Penetration {
    double value = 0.0;
    bool clipped = false;
};

/// Renewable energy over consumed energy (load minus shedding). Throws
/// InputError when nothing is consumed.
Penetration res_penetration(const DispatchSolution& d, const Scenario& s, const NetworkModel& model);

struct NormalizedLoad {
    std::vector<double> with_bss;
    std::vector<double> without_bss;
};

/// System load plus net charging, both series divided by their common peak.
NormalizedLoad normalized_load(const DispatchSolution& with_bss, const DispatchSolution& without_bss,
                               const Scenario& s, const NetworkModel& model);

/// Expected annual totals over a solved set.
double expected_shedding(const PlanSolution& sol, const ScenarioSet& set, const PlanningEconomics& econ);
double expected_curtailment(const PlanSolution& sol, const ScenarioSet& set, const NetworkModel& model,
                            const PlanningEconomics& econ);

struct MetricsReport {
    std::vector<std::string> scenario_ids;
    std::vector<double> lambda;
    std::vector<Reduction> reductions;
    CostEffectiveness pi;
    std::vector<std::string> line_ids;
    std::vector<double> congestion;   // weighted over scenarios
    std::vector<Penetration> penetration;
    std::vector<NormalizedLoad> normalized;

    std::string per_scenario_csv() const;
    std::string summary_json() const;
    std::string normalized_load_csv() const;
};

MetricsReport compute_metrics(const PlanSolution& with_bss, const PlanSolution& without_bss, const NetworkModel& model,
                              const ScenarioSet& set, const PlanningEconomics& econ);

struct SweepRow {
    double cap = 0.0;
    double objective = 0.0;
    double shedding = 0.0;
    double curtailment = 0.0;
    double installed = 0.0;
    double penetration = 0.0;
    double pi_rc = 0.0;             // NaN at cap 0
    double pi_ls_reduction = 0.0;   // NaN at cap 0
    double pi_ls = 0.0;             // as defined, NaN at cap 0
};

struct SweepTable {
    std::vector<SweepRow> rows;
    SweepRow unconstrained;          // no cap row; installed is the saturation capacity

    std::string csv() const;
};

/// One two-stage solve per cap plus an uncapped solve. Caps must be sorted
/// ascending and non-negative. Ratios compare each cap with a zero-cap solve.
SweepTable capacity_sweep(const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ,
                          const ScenarioSet& set, const std::vector<double>& caps, const RunOptions& opts);

} // namespace bssplan
