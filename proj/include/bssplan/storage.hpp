#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bssplan {

/// One (technology, duration) variant. Costs are held in $/MWh, $/MW and
/// $/MW-yr; efficiencies, depths and rates are fractions.
struct BssTechnology {
    std::string name;
    double duration = 0.0;        // h
    double min_duration = 0.0;    // allowed range for this technology
    double max_duration = 0.0;

    double energy_capacity_cost = 0.0; // $/MWh
    double pcs_cost = 0.0;             // $/MW
    double bop_cost = 0.0;             // $/MW
    double candc_cost = 0.0;           // $/MWh
    double replacement_cost = 0.0;     // $/MWh
    double fixed_om = 0.0;             // $/MW-yr
    double variable_om = 0.0;          // $/MWh
    double degradation_cost = 0.0;     // $/MWh

    double rte = 1.0;
    double discharge_eff = 1.0;
    double charge_eff = 1.0;
    double max_dod = 1.0;
    double self_discharge_daily = 0.0;
    double rte_degradation = 0.0;
    double cycle_limit = 1.0;     // cycles at the reference depth
    double lifetime_years = 1.0;

    /// Name plus duration, e.g. "NaSB8".
    std::string label() const;
    /// $/MWh of charge or discharge throughput: variable O&M plus degradation.
    double throughput_cost() const { return variable_om + degradation_cost * rte_degradation / rte; }
};

std::vector<std::string> validate_technology(const BssTechnology& tech);

struct PlanningEconomics {
    double interest_rate = 0.05;
    double planning_horizon = 20.0; // years
    double reference_dod = 0.8;
    /// Multiplier from the scenario horizon to one year of operation. 1 treats
    /// each scenario as a full year, 8760/T rescales a shorter horizon.
    double operating_scale = 1.0;
};

/// Throws ConfigError when out of range.
void validate_economics(const PlanningEconomics& econ);

double capital_recovery_factor(double rate, double years);
double sinking_fund_factor(double rate, double years);

/// Energy after one hour.
double step_energy(double e_prev, double charge, double discharge, const BssTechnology& tech);

/// Allowed discharge energy per year (MWh).
double annual_discharge_cap(const BssTechnology& tech, const PlanningEconomics& econ, double rated_power);

double annualized_capital_cost(const BssTechnology& tech, const PlanningEconomics& econ, double rated_power);
double annualized_replacement_cost(const BssTechnology& tech, const PlanningEconomics& econ, double rated_power);
double fixed_om_cost(const BssTechnology& tech, double rated_power);

/// (variable O&M, degradation) over an hourly charge/discharge series.
std::pair<double, double> variable_om_and_degradation_cost(const BssTechnology& tech, std::span<const double> charge,
                                                           std::span<const double> discharge);

/// Capital + replacement + fixed O&M per MW of rated power, per year.
double annual_cost_per_mw(const BssTechnology& tech, const PlanningEconomics& econ);

using Catalog = std::vector<BssTechnology>;

/// Reads a catalog CSV in the usual datasheet units ($/kWh, $/kW, $/kW-yr,
/// $/MWh, percent for self discharge and efficiency fade). The `duration`
/// cell is a number, a ';' list, or '*' for every even hour in
/// [min_duration, max_duration]. Throws InputError.
Catalog load_catalog(const std::filesystem::path& path);

/// Even-hour durations inside [lo, hi].
std::vector<double> even_durations(double lo, double hi);

} // namespace bssplan
