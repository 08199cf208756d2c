#pragma once

#include "bssplan/program.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bssplan {

struct SaaConfig {
    int replications = 20;        // W
    std::size_t sample_size = 7;  // M'
    double alpha = 0.05;
    std::uint64_t seed = 1;
};

struct RunOptions {
    double cap = kUnbounded;
    int jobs = 1;
    lp::SolverConfig solver;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct Replication {
    std::uint64_t seed = 0;
    std::vector<std::string> sample;
    double objective = 0.0;            // h^w
    BssAllocation allocation;          // x^w
    std::vector<double> evaluations;   // f^{w,s} over the full set
    double response = 0.0;            // r^w
};

struct SaaReport {
    SaaConfig config;
    std::size_t scenario_count = 0;   // M
    double cap = kUnbounded;
    std::vector<Replication> replications;
    double mu_lower = 0.0, sigma_lower = 0.0;
    Interval lower_ci;
    double mu_upper = 0.0, sigma_upper = 0.0;
    Interval upper_ci;
    double t_critical = 0.0, z_critical = 0.0;
    /// (upper end of the UB interval - lower end of the LB interval) over the
    /// upper end of the UB interval, in percent.
    double gap_percent = 0.0;
    std::size_t chosen = 0;           // index of the lowest response
    BssAllocation allocation;
};

/// Upper-tail critical values: P(T_dof > t) = p and P(Z > z) = p.
/// Throws ConfigError outside 0 < p < 1 or dof < 1.
double t_quantile(double p, double dof);
double z_quantile(double p);

/// Seed of replication w, derived from the master seed only.
std::uint64_t replication_seed(std::uint64_t master, std::size_t w);

/// Throws ConfigError on an invalid configuration, SolverError naming the
/// replication when a solve fails.
SaaReport run_saa(const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ,
                  const ScenarioSet& set, const SaaConfig& cfg, const RunOptions& opts);

/// Statistics of Steps 2-3 from raw replication values.
void summarise(SaaReport& report);

/// Deterministic JSON rendering.
std::string to_json(const SaaReport& report);
/// One-row table: M', mu_U, sigma_U, CI for LB, CI for UB, Gap%.
std::string summary_table(const SaaReport& report);

struct DecisionValues {
    double rp = 0.0;
    double ws = 0.0;
    double evpi = 0.0;
    double eev = 0.0;
    double vss = 0.0;
    std::vector<double> wait_and_see;   // per scenario optimum
    std::vector<double> expected_value; // per scenario cost of the mean-value plan
    BssAllocation mean_value_allocation;
};

DecisionValues compute_evpi_vss(const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ,
                                const ScenarioSet& set, const RunOptions& opts);

std::string to_json(const DecisionValues& values);

} // namespace bssplan
