#pragma once

#include "bssplan/program.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace bssplan::detail {

// JSON has no infinity; unbounded values become null.
inline nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json allocation_json(const BssAllocation& a) {
    auto entries = nlohmann::json::array();
    for (const auto& e : a.entries)
        entries.push_back({{"zone", e.zone}, {"bus", e.bus}, {"technology", e.tech}, {"rated_power_mw", e.rated_power}});
    return {{"total_mw", a.total()}, {"entries", entries}};
}

inline nlohmann::json costs_json(const CostBreakdown& c) {
    return {{"capital", c.capital},           {"replacement", c.replacement}, {"fixed_om", c.fixed_om},
            {"variable_om", c.variable_om},   {"degradation", c.degradation}, {"operating", c.operating},
            {"co2_emission", c.emission},     {"load_shedding", c.shedding},  {"total", c.total()}};
}

} // namespace bssplan::detail
