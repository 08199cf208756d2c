#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace bssplan {

/// One realisation of hourly loads and renewable availability.
struct Scenario {
    std::string id;
    int horizon = 0;
    std::map<std::string, std::vector<double>> load;    // bus id -> MW per hour
    std::map<std::string, std::vector<double>> res_cap; // source id -> MW per hour

    double load_at(const std::string& bus, int hour) const;
    double res_cap_at(const std::string& source, int hour) const;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    std::vector<double> weights;

    std::size_t size() const { return scenarios.size(); }
    int horizon() const { return scenarios.empty() ? 0 : scenarios.front().horizon; }
    /// Throws InputError on the first broken invariant.
    void validate() const;
    static ScenarioSet uniform(std::vector<Scenario> scenarios);
};

/// `path` is a directory or a manifest CSV. A directory with manifest.csv
/// uses it; otherwise every *.csv in it is a scenario, ordered by id. The
/// manifest has an `id` column and an optional `weight` column; scenario
/// `<id>` is read from `<id>.csv` next to the manifest. Each scenario file
/// has an `hour` column, `load_<bus>` columns and `res_<source>` columns.
ScenarioSet load_scenarios(const std::filesystem::path& path);

Scenario read_scenario_csv(const std::filesystem::path& file, const std::string& id);

/// m distinct scenarios in their original order with weights 1/m,
/// deterministic in `seed`. Throws
/// ConfigError unless 1 <= m <= |set|.
ScenarioSet sample_without_replacement(const ScenarioSet& set, std::size_t m, std::uint64_t seed);

/// Weighted mean of every load and renewable cell.
Scenario expected_scenario(const ScenarioSet& set);

} // namespace bssplan
