#include "bssplan/analytics.hpp"

#include "bssplan/errors.hpp"
#include "json_util.hpp"
#include "parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bssplan {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_pair(const PlanSolution& a, const PlanSolution& b) {
    if (a.dispatch.size() != b.dispatch.size())
        throw InputError(fmt::format("mismatched pair: {} vs {} scenarios", a.dispatch.size(), b.dispatch.size()));
    for (std::size_t s = 0; s < a.dispatch.size(); ++s) {
        const auto& x = a.dispatch[s];
        const auto& y = b.dispatch[s];
        if (x.scenario_id != y.scenario_id || x.horizon != y.horizon || x.generators != y.generators ||
            x.sources != y.sources || x.buses != y.buses || x.lines != y.lines)
            throw InputError(fmt::format("mismatched pair at scenario '{}' / '{}'", x.scenario_id, y.scenario_id));
    }
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

std::string num(double v) { return std::isfinite(v) ? fmt::format("{:.10g}", v + 0.0) : std::string("nan"); }

} // namespace

std::vector<double> bss_operational_planning_cost(const PlanSolution& with_bss, const PlanSolution& without_bss,
                                                  const PlanningEconomics&) {
    check_pair(with_bss, without_bss);
    const double first = with_bss.costs.first_stage();
    std::vector<double> out;
    for (std::size_t s = 0; s < with_bss.dispatch.size(); ++s) {
        const auto& w = with_bss.dispatch[s].costs;
        const auto& o = without_bss.dispatch[s].costs;
        out.push_back(first + w.variable_om + w.degradation + (w.operating + w.emission) - (o.operating + o.emission));
    }
    return out;
}

std::vector<Reduction> reduction_metrics(const PlanSolution& with_bss, const PlanSolution& without_bss,
                                         const PlanningEconomics& econ) {
    check_pair(with_bss, without_bss);
    std::vector<Reduction> out;
    for (std::size_t s = 0; s < with_bss.dispatch.size(); ++s) {
        const auto& w = with_bss.dispatch[s];
        const auto& o = without_bss.dispatch[s];
        Reduction r;
        r.curtailment = (sum(w.renewable) - sum(o.renewable)) * econ.operating_scale;
        r.shedding = (sum(w.shedding) - sum(o.shedding)) * econ.operating_scale;
        out.push_back(r);
    }
    return out;
}

CostEffectiveness cost_effectiveness(const std::vector<double>& lambda, const std::vector<Reduction>& reductions,
                                     const std::vector<std::string>& ids) {
    if (lambda.size() != reductions.size() || lambda.empty())
        throw InputError("cost effectiveness needs one lambda per scenario");
    CostEffectiveness c;
    const double n = static_cast<double>(lambda.size());
    for (std::size_t s = 0; s < lambda.size(); ++s) {
        const std::string id = s < ids.size() ? ids[s] : std::to_string(s);
        if (lambda[s] == 0.0) throw InputError(fmt::format("undefined ratio: lambda is zero in scenario '{}'", id));
        if (lambda[s] < 0.0) c.negative_lambda.push_back(id);
        c.rc += reductions[s].curtailment / lambda[s] / n;
        c.ls += reductions[s].shedding / lambda[s] / n;
        c.ls_reduction += -reductions[s].shedding / lambda[s] / n;
    }
    return c;
}

std::vector<double> congestion_rate(const DispatchSolution& d, const NetworkModel& model) {
    std::vector<double> out(model.lines.size(), 0.0);
    for (std::size_t l = 0; l < model.lines.size(); ++l) {
        const auto& line = model.lines[l];
        int binding = 0;
        for (int t = 0; t < d.horizon; ++t) {
            const double f = d.fl(t, static_cast<int>(l));
            const bool at_max = std::isfinite(line.flow_max) && f >= line.flow_max - 1e-5 * std::abs(line.flow_max);
            const bool at_min = std::isfinite(line.flow_min) && f <= line.flow_min + 1e-5 * std::abs(line.flow_min);
            binding += (at_max || at_min) ? 1 : 0;
        }
        out[l] = static_cast<double>(binding) / static_cast<double>(d.horizon);
    }
    return out;
}

Penetration res_penetration(const DispatchSolution& d, const Scenario& s, const NetworkModel& model) {
    double res = 0.0, consumed = 0.0;
    for (int t = 0; t < d.horizon; ++t) {
        for (int r = 0; r < d.sources; ++r) res += d.re(t, r);
        for (std::size_t b = 0; b < model.buses.size(); ++b)
            consumed += s.load_at(model.buses[b].id, t) - d.ls(t, static_cast<int>(b));
    }
    if (!(consumed > 0.0)) throw InputError(fmt::format("scenario '{}': no consumed energy, penetration undefined", s.id));
    Penetration p{res / consumed, false};
    if (p.value > 1.0) p = {1.0, true};
    return p;
}

NormalizedLoad normalized_load(const DispatchSolution& with_bss, const DispatchSolution& without_bss,
                               const Scenario& s, const NetworkModel& model) {
    NormalizedLoad out;
    double peak = 0.0;
    for (int t = 0; t < s.horizon; ++t) {
        double load = 0.0;
        for (const auto& b : model.buses) load += s.load_at(b.id, t);
        double with = load, without = load;
        for (int u = 0; u < with_bss.units; ++u) with += with_bss.ch(t, u) - with_bss.dc(t, u);
        for (int u = 0; u < without_bss.units; ++u) without += without_bss.ch(t, u) - without_bss.dc(t, u);
        out.with_bss.push_back(with);
        out.without_bss.push_back(without);
        peak = std::max({peak, with, without});
    }
    if (!(peak > 0.0)) throw InputError(fmt::format("scenario '{}': zero peak load", s.id));
    for (double& v : out.with_bss) v /= peak;
    for (double& v : out.without_bss) v /= peak;
    return out;
}

double expected_shedding(const PlanSolution& sol, const ScenarioSet& set, const PlanningEconomics& econ) {
    double total = 0.0;
    for (std::size_t s = 0; s < sol.dispatch.size(); ++s) total += set.weights[s] * sum(sol.dispatch[s].shedding);
    return total * econ.operating_scale;
}

double expected_curtailment(const PlanSolution& sol, const ScenarioSet& set, const NetworkModel& model,
                            const PlanningEconomics& econ) {
    double total = 0.0;
    for (std::size_t s = 0; s < sol.dispatch.size(); ++s) {
        const auto& d = sol.dispatch[s];
        double c = 0.0;
        for (int t = 0; t < d.horizon; ++t)
            for (int r = 0; r < d.sources; ++r) c += set.scenarios[s].res_cap_at(model.renewables[r].id, t) - d.re(t, r);
        total += set.weights[s] * c;
    }
    return total * econ.operating_scale;
}

MetricsReport compute_metrics(const PlanSolution& with_bss, const PlanSolution& without_bss, const NetworkModel& model,
                              const ScenarioSet& set, const PlanningEconomics& econ) {
    check_pair(with_bss, without_bss);
    MetricsReport m;
    for (const auto& d : with_bss.dispatch) m.scenario_ids.push_back(d.scenario_id);
    m.lambda = bss_operational_planning_cost(with_bss, without_bss, econ);
    m.reductions = reduction_metrics(with_bss, without_bss, econ);
    m.pi = cost_effectiveness(m.lambda, m.reductions, m.scenario_ids);
    for (const auto& l : model.lines) m.line_ids.push_back(l.id);
    m.congestion.assign(model.lines.size(), 0.0);
    for (std::size_t s = 0; s < with_bss.dispatch.size(); ++s) {
        const auto rate = congestion_rate(with_bss.dispatch[s], model);
        for (std::size_t l = 0; l < rate.size(); ++l) m.congestion[l] += set.weights[s] * rate[l];
        m.penetration.push_back(res_penetration(with_bss.dispatch[s], set.scenarios[s], model));
        m.normalized.push_back(normalized_load(with_bss.dispatch[s], without_bss.dispatch[s], set.scenarios[s], model));
    }
    return m;
}

std::string MetricsReport::per_scenario_csv() const {
    std::string out =
        "scenario,lambda_bss,phi_rc,phi_ls_as_defined,phi_ls_reduction,res_penetration,penetration_clipped,"
        "negative_lambda\n";
    for (std::size_t s = 0; s < scenario_ids.size(); ++s)
        out += fmt::format("{},{},{},{},{},{},{},{}\n", scenario_ids[s], num(lambda[s]), num(reductions[s].curtailment),
                           num(reductions[s].shedding), num(-reductions[s].shedding), num(penetration[s].value),
                           penetration[s].clipped ? 1 : 0, lambda[s] < 0.0 ? 1 : 0);
    return out;
}

std::string MetricsReport::summary_json() const {
    nlohmann::json congestion_by_line = nlohmann::json::object();
    for (std::size_t l = 0; l < line_ids.size(); ++l) congestion_by_line[line_ids[l]] = congestion[l];
    nlohmann::json doc = {{"pi_rc", pi.rc},
                          {"pi_ls_as_defined", pi.ls},
                          {"pi_ls_reduction", pi.ls_reduction},
                          {"negative_lambda_scenarios", pi.negative_lambda},
                          {"congestion_rate", congestion_by_line}};
    return doc.dump(2) + "\n";
}

std::string MetricsReport::normalized_load_csv() const {
    std::string out = "scenario,hour,with_bss,without_bss\n";
    for (std::size_t s = 0; s < normalized.size(); ++s)
        for (std::size_t t = 0; t < normalized[s].with_bss.size(); ++t)
            out += fmt::format("{},{},{},{}\n", scenario_ids[s], t, num(normalized[s].with_bss[t]),
                               num(normalized[s].without_bss[t]));
    return out;
}

SweepTable capacity_sweep(const NetworkModel& model, const Catalog& catalog, const PlanningEconomics& econ,
                          const ScenarioSet& set, const std::vector<double>& caps, const RunOptions& opts) {
    if (caps.empty()) throw ConfigError("capacity sweep needs at least one cap");
    for (std::size_t k = 0; k < caps.size(); ++k) {
        if (!(caps[k] >= 0.0) || !std::isfinite(caps[k])) throw ConfigError(fmt::format("invalid cap {}", caps[k]));
        if (k > 0 && caps[k] < caps[k - 1]) throw ConfigError("caps must be sorted ascending");
    }
    // index 0 is the zero-cap baseline, the last is uncapped
    std::vector<double> all{0.0};
    all.insert(all.end(), caps.begin(), caps.end());
    all.push_back(kUnbounded);
    std::vector<PlanSolution> sols(all.size());
    detail::parallel_for(all.size(), opts.jobs, [&](std::size_t k) {
        if (k > 0 && all[k] == 0.0) return; // reuse the baseline
        sols[k] = solve_program(model, catalog, econ, set, ProgramMode::two_stage(all[k]), opts.solver);
    });
    for (std::size_t k = 1; k < all.size(); ++k)
        if (all[k] == 0.0) sols[k] = sols[0];

    auto row_of = [&](std::size_t k) {
        const auto& sol = sols[k];
        SweepRow r;
        r.cap = all[k];
        r.objective = sol.objective;
        r.shedding = expected_shedding(sol, set, econ);
        r.curtailment = expected_curtailment(sol, set, model, econ);
        r.installed = sol.allocation.total();
        for (std::size_t s = 0; s < sol.dispatch.size(); ++s)
            r.penetration += set.weights[s] * res_penetration(sol.dispatch[s], set.scenarios[s], model).value;
        r.pi_rc = r.pi_ls = r.pi_ls_reduction = kNaN;
        const auto lambda = bss_operational_planning_cost(sol, sols[0], econ);
        const bool defined = std::none_of(lambda.begin(), lambda.end(), [](double l) { return l == 0.0; });
        if (all[k] > 0.0 && defined) {
            std::vector<std::string> ids;
            for (const auto& d : sol.dispatch) ids.push_back(d.scenario_id);
            const auto pi = cost_effectiveness(lambda, reduction_metrics(sol, sols[0], econ), ids);
            r.pi_rc = pi.rc;
            r.pi_ls = pi.ls;
            r.pi_ls_reduction = pi.ls_reduction;
        }
        return r;
    };
    SweepTable table;
    for (std::size_t k = 1; k + 1 < all.size(); ++k) table.rows.push_back(row_of(k));
    table.unconstrained = row_of(all.size() - 1);
    return table;
}

std::string SweepTable::csv() const {
    std::string out =
        "cap_mw,objective,shedding_mwh,curtailment_mwh,installed_mw,res_penetration,rcrce,lsrce,lsrce_as_defined\n";
    auto line = [&](const SweepRow& r, const std::string& cap) {
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", cap, num(r.objective), num(r.shedding), num(r.curtailment),
                           num(r.installed), num(r.penetration), num(r.pi_rc), num(r.pi_ls_reduction), num(r.pi_ls));
    };
    for (const auto& r : rows) line(r, num(r.cap));
    line(unconstrained, "unconstrained");
    return out;
}

} // namespace bssplan
