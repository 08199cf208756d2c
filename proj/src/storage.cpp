#include "bssplan/storage.hpp"

#include "bssplan/errors.hpp"
#include "csv.hpp"

#include <fmt/format.h>

#include <cmath>

namespace bssplan {

std::string BssTechnology::label() const { return fmt::format("{}{:g}", name, duration); }

std::vector<std::string> validate_technology(const BssTechnology& t) {
    std::vector<std::string> v;
    const std::string who = t.label();
    auto bad = [&](bool cond, const char* msg) {
        if (cond) v.push_back(fmt::format("technology {}: {}", who, msg));
    };
    bad(t.name.empty(), "empty name");
    bad(!(t.charge_eff > 0.0 && t.charge_eff <= 1.0), "charge efficiency outside (0, 1]");
    bad(!(t.discharge_eff > 0.0 && t.discharge_eff <= 1.0), "discharge efficiency outside (0, 1]");
    bad(!(std::abs(t.rte - t.charge_eff * t.discharge_eff) <= 1e-9), "rte differs from charge_eff * discharge_eff");
    bad(!(t.max_dod > 0.0 && t.max_dod <= 1.0), "max_dod outside (0, 1]");
    bad(!(t.self_discharge_daily >= 0.0 && t.self_discharge_daily < 1.0), "self discharge outside [0, 1)");
    bad(!(t.rte_degradation >= 0.0), "negative rte degradation");
    bad(!(t.duration > 0.0), "duration must be positive");
    bad(!(t.duration >= t.min_duration - 1e-12 && t.duration <= t.max_duration + 1e-12), "duration outside allowed range");
    for (double c : {t.energy_capacity_cost, t.pcs_cost, t.bop_cost, t.candc_cost, t.replacement_cost, t.fixed_om,
                     t.variable_om, t.degradation_cost})
        if (!(c >= 0.0) || !std::isfinite(c)) {
            v.push_back(fmt::format("technology {}: negative or non-finite cost", who));
            break;
        }
    bad(!(t.cycle_limit > 0.0), "cycle_limit must be positive");
    bad(!(t.lifetime_years > 0.0), "lifetime_years must be positive");
    return v;
}

void validate_economics(const PlanningEconomics& e) {
    if (!(e.interest_rate > 0.0) || !std::isfinite(e.interest_rate))
        throw ConfigError(fmt::format("interest_rate must be > 0 (got {})", e.interest_rate));
    if (!(e.planning_horizon >= 1.0)) throw ConfigError(fmt::format("planning_horizon must be >= 1 (got {})", e.planning_horizon));
    if (!(e.reference_dod > 0.0 && e.reference_dod <= 1.0))
        throw ConfigError(fmt::format("reference_dod must be in (0, 1] (got {})", e.reference_dod));
    if (!(e.operating_scale > 0.0) || !std::isfinite(e.operating_scale))
        throw ConfigError(fmt::format("operating_scale must be > 0 (got {})", e.operating_scale));
}

double capital_recovery_factor(double rate, double years) {
    if (!(rate > 0.0)) throw ConfigError("capital recovery factor needs a positive interest rate");
    const double g = std::pow(1.0 + rate, years);
    return rate * g / (g - 1.0);
}

double sinking_fund_factor(double rate, double years) {
    if (!(rate > 0.0)) throw ConfigError("sinking fund factor needs a positive interest rate");
    return rate / (std::pow(1.0 + rate, years) - 1.0);
}

double step_energy(double e_prev, double charge, double discharge, const BssTechnology& t) {
    return e_prev + (t.charge_eff * charge - discharge / t.discharge_eff) - t.self_discharge_daily / 24.0 * e_prev;
}

double annual_discharge_cap(const BssTechnology& t, const PlanningEconomics& econ, double rated_power) {
    return t.cycle_limit * econ.reference_dod * t.duration * rated_power / t.lifetime_years;
}

double annualized_capital_cost(const BssTechnology& t, const PlanningEconomics& econ, double rated_power) {
    const double raw = t.energy_capacity_cost * t.duration + t.pcs_cost + t.bop_cost + t.candc_cost * t.duration;
    return raw * capital_recovery_factor(econ.interest_rate, econ.planning_horizon) * rated_power;
}

double annualized_replacement_cost(const BssTechnology& t, const PlanningEconomics& econ, double rated_power) {
    return t.replacement_cost * t.duration * sinking_fund_factor(econ.interest_rate, t.lifetime_years) * rated_power;
}

double fixed_om_cost(const BssTechnology& t, double rated_power) { return t.fixed_om * rated_power; }

std::pair<double, double> variable_om_and_degradation_cost(const BssTechnology& t, std::span<const double> charge,
                                                           std::span<const double> discharge) {
    double throughput = 0.0;
    for (double c : charge) throughput += c;
    for (double d : discharge) throughput += d;
    return {t.variable_om * throughput, t.degradation_cost * (t.rte_degradation / t.rte) * throughput};
}

double annual_cost_per_mw(const BssTechnology& t, const PlanningEconomics& econ) {
    return annualized_capital_cost(t, econ, 1.0) + annualized_replacement_cost(t, econ, 1.0) + fixed_om_cost(t, 1.0);
}

std::vector<double> even_durations(double lo, double hi) {
    std::vector<double> out;
    for (double d = 2.0 * std::ceil(lo / 2.0 - 1e-12); d <= hi + 1e-12; d += 2.0)
        if (d > 0.0) out.push_back(d);
    return out;
}

Catalog load_catalog(const std::filesystem::path& path) {
    const auto t = csv::read(path);
    const int name = t.require("name");
    const int duration = t.require("duration");
    const int dmin = t.require("min_duration");
    const int dmax = t.require("max_duration");
    const int ec = t.require("energy_capacity_cost");
    const int pc = t.require("pcs_cost");
    const int bp = t.require("bop_cost");
    const int cc = t.require("candc_cost");
    const int br = t.require("replacement_cost");
    const int bf = t.require("fixed_om");
    const int bv = t.require("variable_om");
    const int bd = t.find("degradation_cost");
    const int rte = t.require("rte");
    const int dc = t.require("discharge_eff");
    const int ch = t.find("charge_eff");
    const int dod = t.require("max_dod");
    const int sd = t.require("self_discharge_daily");
    const int df = t.require("rte_degradation");
    const int cl = t.require("cycle_limit");
    const int lt = t.require("lifetime_years");

    constexpr double kPerK = 1000.0;   // $/kWh -> $/MWh, $/kW -> $/MW
    constexpr double kPercent = 0.01;

    Catalog out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        BssTechnology base;
        base.name = t.cell(r, name);
        base.min_duration = t.number(r, dmin);
        base.max_duration = t.number(r, dmax);
        base.energy_capacity_cost = t.number(r, ec) * kPerK;
        base.pcs_cost = t.number(r, pc) * kPerK;
        base.bop_cost = t.number(r, bp) * kPerK;
        base.candc_cost = t.number(r, cc) * kPerK;
        base.replacement_cost = t.number(r, br) * kPerK;
        base.fixed_om = t.number(r, bf) * kPerK;
        base.variable_om = t.number(r, bv);
        base.degradation_cost = t.number_or(r, bd, 5.0);
        base.rte = t.number(r, rte);
        base.discharge_eff = t.number(r, dc);
        base.charge_eff = ch >= 0 && !t.cell(r, ch).empty() ? t.number(r, ch) : base.rte / base.discharge_eff;
        base.max_dod = t.number(r, dod);
        base.self_discharge_daily = t.number(r, sd) * kPercent;
        base.rte_degradation = t.number(r, df) * kPercent;
        base.cycle_limit = t.number(r, cl);
        base.lifetime_years = t.number(r, lt);

        std::vector<double> durations;
        const std::string& spec = t.cell(r, duration);
        if (spec == "*") {
            durations = even_durations(base.min_duration, base.max_duration);
        } else {
            for (const auto& part : csv::split(spec, ';')) {
                auto v = csv::parse_double(part);
                if (!v) t.fail(r, fmt::format("duration '{}' is not a number, ';' list or '*'", spec));
                durations.push_back(*v);
            }
        }
        for (double d : durations) {
            BssTechnology tech = base;
            tech.duration = d;
            if (auto issues = validate_technology(tech); !issues.empty()) t.fail(r, issues.front());
            for (const auto& other : out)
                if (other.label() == tech.label()) t.fail(r, fmt::format("duplicate technology variant {}", tech.label()));
            out.push_back(tech);
        }
    }
    if (out.empty()) throw InputError(fmt::format("{}: catalog has no technologies", path.string()));
    return out;
}

} // namespace bssplan
