#include "bssplan/saa.hpp"

#include "bssplan/errors.hpp"
#include "json_util.hpp"
#include "parallel.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include <cmath>
#include <map>

namespace bssplan {

double t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError(fmt::format("t quantile: probability {} outside (0, 1)", p));
    if (!(dof >= 1.0)) throw ConfigError(fmt::format("t quantile: degrees of freedom {} < 1", dof));
    return boost::math::quantile(boost::math::complement(boost::math::students_t(dof), p));
}

double z_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError(fmt::format("z quantile: probability {} outside (0, 1)", p));
    return boost::math::quantile(boost::math::complement(boost::math::normal(), p));
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t w) {
    // splitmix64 finaliser over a counter offset from the master seed
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(w) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

void check_config(const SaaConfig& cfg, std::size_t m) {
    if (cfg.replications < 2) throw ConfigError(fmt::format("SAA needs W >= 2 (got {})", cfg.replications));
    if (cfg.sample_size < 1 || cfg.sample_size > m)
        throw ConfigError(fmt::format("SAA sample size M' = {} outside [1, {}]", cfg.sample_size, m));
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError(fmt::format("alpha {} outside (0, 1)", cfg.alpha));
}

ScenarioSet single(const Scenario& s) { return ScenarioSet::uniform({s}); }

} // namespace

void summarise(SaaReport& r) {
    const std::size_t W = r.replications.size();
    const double Wd = static_cast<double>(W);
    double sum = 0.0;
    for (const auto& rep : r.replications) sum += rep.objective;
    r.mu_lower = sum / Wd;
    double ss = 0.0;
    for (const auto& rep : r.replications) ss += (rep.objective - r.mu_lower) * (rep.objective - r.mu_lower);
    r.sigma_lower = std::sqrt(ss / (Wd - 1.0));
    r.t_critical = t_quantile(r.config.alpha / 2.0, Wd - 1.0);
    const double half_l = r.t_critical * r.sigma_lower / std::sqrt(Wd);
    r.lower_ci = {r.mu_lower - half_l, r.mu_lower + half_l};

    r.chosen = 0;
    for (std::size_t w = 1; w < W; ++w)
        if (r.replications[w].response < r.replications[r.chosen].response) r.chosen = w;
    const auto& best = r.replications[r.chosen];
    r.mu_upper = best.response;
    const double M = static_cast<double>(best.evaluations.size());
    double su = 0.0;
    for (double f : best.evaluations) su += (f - r.mu_upper) * (f - r.mu_upper);
    r.sigma_upper = M > 1.0 ? std::sqrt(su / (M - 1.0)) : 0.0;
    r.z_critical = z_quantile(r.config.alpha / 2.0);
    const double half_u = r.z_critical * r.sigma_upper / std::sqrt(M);
    r.upper_ci = {r.mu_upper - half_u, r.mu_upper + half_u};
    r.gap_percent = (r.upper_ci.hi - r.lower_ci.lo) / r.upper_ci.hi * 100.0;
    r.allocation = best.allocation;
}

SaaReport run_saa(const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ,
                  const ScenarioSet& set, const SaaConfig& cfg, const RunOptions& opts) {
    set.validate();
    check_config(cfg, set.size());
    const std::size_t W = static_cast<std::size_t>(cfg.replications);
    const std::size_t M = set.size();

    SaaReport report;
    report.config = cfg;
    report.scenario_count = M;
    report.cap = opts.cap;
    report.replications.resize(W);

    // Step 1a: sampled two-stage solves
    detail::parallel_for(W, opts.jobs, [&](std::size_t w) {
        auto& rep = report.replications[w];
        rep.seed = replication_seed(cfg.seed, w);
        const auto sample = sample_without_replacement(set, cfg.sample_size, rep.seed);
        for (const auto& s : sample.scenarios) rep.sample.push_back(s.id);
        try {
            const auto sol = solve_program(model, catalog, econ, sample, ProgramMode::two_stage(opts.cap), opts.solver);
            rep.objective = sol.objective;
            rep.allocation = sol.allocation;
        } catch (const SolverError& e) {
            throw SolverError(fmt::format("replication {}: {}", w + 1, e.what()));
        } catch (const std::runtime_error& e) {
            throw SolverError(fmt::format("replication {}: {}", w + 1, e.what()));
        }
    });

    // Step 1b: fix x^w and evaluate every scenario; identical allocations share work
    std::vector<std::size_t> owner(W);
    std::vector<std::size_t> distinct;
    for (std::size_t w = 0; w < W; ++w) {
        owner[w] = w;
        for (std::size_t d : distinct) {
            const auto& a = report.replications[d].allocation.entries;
            const auto& b = report.replications[w].allocation.entries;
            bool same = a.size() == b.size();
            for (std::size_t k = 0; same && k < a.size(); ++k) same = a[k].rated_power == b[k].rated_power;
            if (same) {
                owner[w] = d;
                break;
            }
        }
        if (owner[w] == w) distinct.push_back(w);
    }
    std::vector<std::vector<double>> values(W, std::vector<double>(M, 0.0));
    detail::parallel_for(distinct.size() * M, opts.jobs, [&](std::size_t task) {
        const std::size_t w = distinct[task / M];
        const std::size_t s = task % M;
        try {
            const auto sol = solve_program(model, catalog, econ, single(set.scenarios[s]),
                                           ProgramMode::fixed_first_stage(report.replications[w].allocation), opts.solver);
            values[w][s] = sol.objective;
        } catch (const std::runtime_error& e) {
            throw SolverError(fmt::format("replication {} scenario '{}': {}", w + 1, set.scenarios[s].id, e.what()));
        }
    });
    for (std::size_t w = 0; w < W; ++w) {
        auto& rep = report.replications[w];
        rep.evaluations = values[owner[w]];
        double sum = 0.0;
        for (double f : rep.evaluations) sum += f;
        rep.response = sum / static_cast<double>(M);
    }

    summarise(report);
    return report;
}

std::string to_json(const SaaReport& r) {
    using nlohmann::json;
    json reps = json::array();
    for (std::size_t w = 0; w < r.replications.size(); ++w) {
        const auto& rep = r.replications[w];
        reps.push_back({{"w", w + 1},
                        {"seed", rep.seed},
                        {"sample", rep.sample},
                        {"h", rep.objective},
                        {"r", rep.response},
                        {"f", rep.evaluations},
                        {"allocation", detail::allocation_json(rep.allocation)}});
    }
    json doc = {
        {"config",
         {{"W", r.config.replications}, {"M_prime", r.config.sample_size}, {"M", r.scenario_count},
          {"alpha", r.config.alpha}, {"seed", r.config.seed}, {"cap_mw", detail::number(r.cap)}}},
        {"lower_bound",
         {{"mu", r.mu_lower}, {"sigma", r.sigma_lower}, {"t_critical", r.t_critical},
          {"ci", {r.lower_ci.lo, r.lower_ci.hi}}}},
        {"upper_bound",
         {{"mu", r.mu_upper}, {"sigma", r.sigma_upper}, {"z_critical", r.z_critical},
          {"ci", {r.upper_ci.lo, r.upper_ci.hi}}}},
        {"gap_percent", r.gap_percent},
        {"chosen_replication", r.chosen + 1},
        {"allocation", detail::allocation_json(r.allocation)},
        {"replications", reps},
    };
    return doc.dump(2) + "\n";
}

std::string summary_table(const SaaReport& r) {
    std::string out = "M'\tmu_U\tsigma_U\tCI for LB\tCI for UB\tGap (LB-UB) (%)\n";
    out += fmt::format("{}\t{:.6e}\t{:.6e}\t({:.6e}, {:.6e})\t({:.6e}, {:.6e})\t{:.2f}%\n", r.config.sample_size,
                       r.mu_upper, r.sigma_upper, r.lower_ci.lo, r.lower_ci.hi, r.upper_ci.lo, r.upper_ci.hi,
                       r.gap_percent);
    return out;
}

DecisionValues compute_evpi_vss(const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ,
                                const ScenarioSet& set, const RunOptions& opts) {
    set.validate();
    const std::size_t S = set.size();
    DecisionValues v;
    v.wait_and_see.assign(S, 0.0);
    v.expected_value.assign(S, 0.0);

    // RP, the mean-value plan and the wait-and-see solves are independent
    BssAllocation mean_plan;
    detail::parallel_for(S + 2, opts.jobs, [&](std::size_t task) {
        if (task == 0) {
            v.rp = solve_program(model, catalog, econ, set, ProgramMode::two_stage(opts.cap), opts.solver).objective;
        } else if (task == 1) {
            mean_plan = solve_program(model, catalog, econ, single(expected_scenario(set)),
                                      ProgramMode::two_stage(opts.cap), opts.solver)
                            .allocation;
        } else {
            const std::size_t s = task - 2;
            v.wait_and_see[s] = solve_program(model, catalog, econ, single(set.scenarios[s]),
                                              ProgramMode::wait_and_see(opts.cap), opts.solver)
                                    .objective;
        }
    });
    detail::parallel_for(S, opts.jobs, [&](std::size_t s) {
        v.expected_value[s] = solve_program(model, catalog, econ, single(set.scenarios[s]),
                                            ProgramMode::fixed_first_stage(mean_plan), opts.solver)
                                  .objective;
    });
    for (std::size_t s = 0; s < S; ++s) {
        v.ws += set.weights[s] * v.wait_and_see[s];
        v.eev += set.weights[s] * v.expected_value[s];
    }
    v.evpi = v.rp - v.ws;
    v.vss = v.eev - v.rp;
    v.mean_value_allocation = mean_plan;
    return v;
}

std::string to_json(const DecisionValues& v) {
    nlohmann::json doc = {{"RP", v.rp},
                          {"WS", v.ws},
                          {"EVPI", v.evpi},
                          {"EEV", v.eev},
                          {"VSS", v.vss},
                          {"wait_and_see", v.wait_and_see},
                          {"expected_value_by_scenario", v.expected_value},
                          {"mean_value_allocation", detail::allocation_json(v.mean_value_allocation)}};
    return doc.dump(2) + "\n";
}

} // namespace bssplan
