#pragma once

#include "bssplan/program.hpp"

#include <filesystem>
#include <string>

namespace bssplan {

/// Writes allocation.json, costs.json and dispatch/<scenario>.csv under `dir`.
void write_plan(const std::filesystem::path& dir, const PlanSolution& sol, const NetworkModel& model,
                const Catalog& catalog, const ScenarioSet& set);

/// Rebuilds a solution from a plan directory written by write_plan. Costs are
/// recomputed from the series. Throws InputError on missing or mismatched files.
PlanSolution read_plan(const std::filesystem::path& dir, const NetworkModel& model, const Catalog& catalog,
                       const PlanningEconomics& econ, const ScenarioSet& set);

std::string allocation_to_json(const BssAllocation& a);
BssAllocation read_allocation(const std::filesystem::path& path);

std::string costs_to_json(const PlanSolution& sol);

/// Header plus one row per hour; columns follow the variable names used in MPS export.
std::string dispatch_csv(const DispatchSolution& d, const VariableIndex& index, const NetworkModel& model);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace bssplan
