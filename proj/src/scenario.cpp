#include "bssplan/scenario.hpp"

#include "bssplan/errors.hpp"
#include "csv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace bssplan {

double Scenario::load_at(const std::string& bus, int hour) const {
    auto it = load.find(bus);
    return it == load.end() ? 0.0 : it->second[static_cast<std::size_t>(hour)];
}

double Scenario::res_cap_at(const std::string& source, int hour) const {
    auto it = res_cap.find(source);
    return it == res_cap.end() ? 0.0 : it->second[static_cast<std::size_t>(hour)];
}

ScenarioSet ScenarioSet::uniform(std::vector<Scenario> scenarios) {
    ScenarioSet s;
    s.weights.assign(scenarios.size(), scenarios.empty() ? 0.0 : 1.0 / static_cast<double>(scenarios.size()));
    s.scenarios = std::move(scenarios);
    return s;
}

void ScenarioSet::validate() const {
    if (scenarios.empty()) throw InputError("scenario set is empty");
    if (weights.size() != scenarios.size()) throw InputError("scenario weights do not match the scenario count");
    std::set<std::string> ids;
    double total = 0.0;
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
        const auto& s = scenarios[k];
        if (!ids.insert(s.id).second) throw InputError(fmt::format("duplicate scenario id '{}'", s.id));
        if (!(weights[k] >= 0.0) || !std::isfinite(weights[k]))
            throw InputError(fmt::format("scenario '{}': weight must be finite and >= 0", s.id));
        total += weights[k];
        if (s.horizon != scenarios.front().horizon)
            throw InputError(fmt::format("ragged horizon: scenario '{}' has {} hours, scenario '{}' has {}", s.id,
                                         s.horizon, scenarios.front().id, scenarios.front().horizon));
        if (s.horizon <= 0) throw InputError(fmt::format("scenario '{}' has no hours", s.id));
        auto check = [&](const std::map<std::string, std::vector<double>>& series, const char* kind) {
            for (const auto& [name, values] : series) {
                if (values.size() != static_cast<std::size_t>(s.horizon))
                    throw InputError(fmt::format("scenario '{}': {} series '{}' has {} hours, expected {}", s.id, kind,
                                                 name, values.size(), s.horizon));
                for (std::size_t h = 0; h < values.size(); ++h)
                    if (!(values[h] >= 0.0) || !std::isfinite(values[h]))
                        throw InputError(fmt::format("scenario '{}': negative value at ({},{}) in {} series", s.id,
                                                     name, h, kind));
            }
        };
        check(s.load, "load");
        check(s.res_cap, "res");
        auto same_keys = [&](const auto& a, const auto& b, const char* kind) {
            for (const auto& [name, values] : b)
                if (!a.count(name))
                    throw InputError(fmt::format("scenario '{}': missing {} series '{}' present in scenario '{}'", s.id,
                                                 kind, name, scenarios.front().id));
            for (const auto& [name, values] : a)
                if (!b.count(name))
                    throw InputError(fmt::format("scenario '{}': missing {} series '{}' present in scenario '{}'",
                                                 scenarios.front().id, kind, name, s.id));
        };
        same_keys(s.load, scenarios.front().load, "load");
        same_keys(s.res_cap, scenarios.front().res_cap, "res");
    }
    if (std::abs(total - 1.0) > 1e-9) throw InputError(fmt::format("scenario weights sum to {}, not 1", total));
}

Scenario read_scenario_csv(const std::filesystem::path& file, const std::string& id) {
    if (!std::filesystem::exists(file)) throw InputError(fmt::format("missing scenario file '{}'", file.string()));
    const auto t = csv::read(file);
    const int hour = t.require("hour");
    Scenario s;
    s.id = id;
    s.horizon = static_cast<int>(t.rows.size());
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        const std::string& h = t.header[c];
        if (static_cast<int>(c) == hour) continue;
        std::vector<double>* target = nullptr;
        if (h.rfind("load_", 0) == 0) target = &s.load[h.substr(5)];
        else if (h.rfind("res_", 0) == 0) target = &s.res_cap[h.substr(4)];
        else throw InputError(fmt::format("{}: column '{}' is neither load_<bus> nor res_<source>", file.string(), h));
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            const double v = t.number(r, static_cast<int>(c));
            if (!(v >= 0.0) || !std::isfinite(v))
                t.fail(r, fmt::format("negative value at ({},{})", h.substr(h.find('_') + 1), r));
            target->push_back(v);
        }
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double hv = t.number(r, hour);
        if (hv != static_cast<double>(r) && hv != static_cast<double>(r + 1))
            t.fail(r, fmt::format("hour column out of sequence at row {}", r));
    }
    return s;
}

ScenarioSet load_scenarios(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    if (!fs::exists(path)) throw InputError(fmt::format("scenario path '{}' does not exist", path.string()));
    fs::path manifest;
    fs::path dir = path;
    if (fs::is_directory(path)) {
        if (fs::exists(path / "manifest.csv")) manifest = path / "manifest.csv";
    } else {
        manifest = path;
        dir = path.parent_path();
    }

    ScenarioSet set;
    if (!manifest.empty()) {
        const auto t = csv::read(manifest);
        const int id = t.require("id");
        const int w = t.find("weight");
        bool any_weight = false;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            set.scenarios.push_back(read_scenario_csv(dir / (t.cell(r, id) + ".csv"), t.cell(r, id)));
            const bool has = w >= 0 && !t.cell(r, w).empty();
            any_weight = any_weight || has;
            set.weights.push_back(has ? t.number(r, w) : 0.0);
        }
        if (!any_weight) set = ScenarioSet::uniform(std::move(set.scenarios));
    } else {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        std::vector<Scenario> scenarios;
        for (const auto& f : files) scenarios.push_back(read_scenario_csv(f, f.stem().string()));
        set = ScenarioSet::uniform(std::move(scenarios));
    }
    set.validate();
    return set;
}

namespace {

// unbiased draw in [0, n) by rejection, independent of the library's distributions
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    for (;;) {
        const std::uint64_t v = rng();
        if (v < limit) return v % n;
    }
}

} // namespace

ScenarioSet sample_without_replacement(const ScenarioSet& set, std::size_t m, std::uint64_t seed) {
    if (m < 1 || m > set.size())
        throw ConfigError(fmt::format("sample size {} outside [1, {}]", m, set.size()));
    std::vector<std::size_t> order(set.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < m; ++k) std::swap(order[k], order[k + bounded(rng, order.size() - k)]);
    // keep the set's order so equal subsets build identical programs
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<Scenario> picked;
    picked.reserve(m);
    for (std::size_t k = 0; k < m; ++k) picked.push_back(set.scenarios[order[k]]);
    return ScenarioSet::uniform(std::move(picked));
}

Scenario expected_scenario(const ScenarioSet& set) {
    if (set.scenarios.empty()) throw InputError("expected_scenario of an empty set");
    Scenario out;
    out.id = "expected";
    out.horizon = set.horizon();
    const std::size_t T = static_cast<std::size_t>(out.horizon);
    for (std::size_t k = 0; k < set.size(); ++k) {
        const double w = set.weights[k];
        for (const auto& [bus, v] : set.scenarios[k].load) {
            auto& acc = out.load[bus];
            acc.resize(T, 0.0);
            for (std::size_t h = 0; h < T; ++h) acc[h] += w * v[h];
        }
        for (const auto& [src, v] : set.scenarios[k].res_cap) {
            auto& acc = out.res_cap[src];
            acc.resize(T, 0.0);
            for (std::size_t h = 0; h < T; ++h) acc[h] += w * v[h];
        }
    }
    return out;
}

} // namespace bssplan
