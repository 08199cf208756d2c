#include "bssplan/network.hpp"

#include "bssplan/errors.hpp"
#include "csv.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace bssplan {

using nlohmann::json;

const char* to_string(GeneratorKind k) { return k == GeneratorKind::FFG ? "FFG" : "NPG"; }

const char* to_string(RenewableKind k) {
    switch (k) {
    case RenewableKind::BHD: return "BHD";
    case RenewableKind::SHD: return "SHD";
    case RenewableKind::UPV: return "UPV";
    case RenewableKind::DPV: return "DPV";
    case RenewableKind::UWT: return "UWT";
    }
    return "?";
}

double ThermalGenerator::max_cost() const {
    return *std::max_element(marginal_cost.begin(), marginal_cost.end());
}

int NetworkModel::zone_index(const std::string& id) const {
    for (std::size_t z = 0; z < zones.size(); ++z)
        if (zones[z].id == id) return static_cast<int>(z);
    return -1;
}

int NetworkModel::bus_index(const std::string& id) const {
    for (std::size_t b = 0; b < buses.size(); ++b)
        if (buses[b].id == id) return static_cast<int>(b);
    return -1;
}

int NetworkModel::zone_of_bus(int bus) const {
    return bus < 0 ? -1 : zone_index(buses[static_cast<std::size_t>(bus)].zone);
}

bool NetworkModel::is_tie(const TransmissionLine& line) const {
    return zone_of_bus(bus_index(line.from_bus)) != zone_of_bus(bus_index(line.to_bus));
}

bool NetworkModel::is_external(const TransmissionLine& line) const {
    if (!is_tie(line)) return false;
    const int a = zone_of_bus(bus_index(line.from_bus));
    const int b = zone_of_bus(bus_index(line.to_bus));
    return (a >= 0 && zones[a].is_external) || (b >= 0 && zones[b].is_external);
}

namespace {

template <typename T>
void check_unique(const std::vector<T>& items, const char* what, std::vector<std::string>& out) {
    std::set<std::string> seen;
    for (const auto& item : items) {
        if (item.id.empty()) out.push_back(fmt::format("{} with empty id", what));
        else if (!seen.insert(item.id).second) out.push_back(fmt::format("duplicate {} id '{}'", what, item.id));
    }
}

} // namespace

ValidationReport validate_network(const NetworkModel& m) {
    ValidationReport report;
    auto& v = report.violations;

    check_unique(m.zones, "zone", v);
    check_unique(m.buses, "bus", v);
    check_unique(m.lines, "line", v);
    check_unique(m.generators, "generator", v);
    check_unique(m.renewables, "renewable", v);

    if (m.buses.empty()) v.push_back("network has no buses");

    for (const auto& z : m.zones)
        if (std::isnan(z.exchange_min) || std::isnan(z.exchange_max) || z.exchange_min > z.exchange_max)
            v.push_back(fmt::format("zone '{}': exchange_min > exchange_max", z.id));

    int references = 0;
    for (const auto& b : m.buses) {
        if (m.zone_index(b.zone) < 0) v.push_back(fmt::format("bus '{}': unknown zone '{}'", b.id, b.zone));
        references += b.is_reference ? 1 : 0;
    }
    if (!m.buses.empty() && references != 1)
        v.push_back(fmt::format("expected exactly one reference bus, found {}", references));

    for (const auto& l : m.lines) {
        const bool from_ok = m.bus_index(l.from_bus) >= 0;
        const bool to_ok = m.bus_index(l.to_bus) >= 0;
        if (!from_ok) v.push_back(fmt::format("line '{}': unknown from_bus '{}'", l.id, l.from_bus));
        if (!to_ok) v.push_back(fmt::format("line '{}': unknown to_bus '{}'", l.id, l.to_bus));
        if (l.from_bus == l.to_bus) v.push_back(fmt::format("line '{}': from_bus equals to_bus", l.id));
        if (!(l.susceptance > 0.0) || !std::isfinite(l.susceptance))
            v.push_back(fmt::format("line '{}': susceptance must be positive", l.id));
        if (std::isnan(l.flow_min) || std::isnan(l.flow_max) || l.flow_min > l.flow_max)
            v.push_back(fmt::format("line '{}': flow_min > flow_max", l.id));
    }

    for (const auto& g : m.generators) {
        if (m.bus_index(g.bus) < 0) v.push_back(fmt::format("generator '{}': unknown bus '{}'", g.id, g.bus));
        if (!(g.p_min >= 0.0) || !(g.p_min <= g.p_max) || !std::isfinite(g.p_max))
            v.push_back(fmt::format("generator '{}': need 0 <= p_min <= p_max", g.id));
        if (!(g.ramp_up >= 0.0) || !(g.ramp_down >= 0.0))
            v.push_back(fmt::format("generator '{}': negative ramp limit", g.id));
        if (!(g.emission_rate >= 0.0)) v.push_back(fmt::format("generator '{}': negative emission_rate", g.id));
        if (g.kind == GeneratorKind::NPG && g.emission_rate != 0.0)
            v.push_back(fmt::format("generator '{}': NPG must have zero emission_rate", g.id));
        if (g.marginal_cost.empty() ||
            std::any_of(g.marginal_cost.begin(), g.marginal_cost.end(), [](double c) { return !std::isfinite(c); }))
            v.push_back(fmt::format("generator '{}': marginal_cost missing or not finite", g.id));
    }

    for (const auto& r : m.renewables)
        if (m.bus_index(r.bus) < 0) v.push_back(fmt::format("renewable '{}': unknown bus '{}'", r.id, r.bus));

    if (!(m.carbon_price >= 0.0) || !std::isfinite(m.carbon_price)) v.push_back("carbon_price must be finite and >= 0");
    if (!std::isfinite(m.voll)) v.push_back("voll must be finite");

    double worst = -kUnbounded;
    std::string worst_id;
    for (const auto& g : m.generators) {
        if (g.marginal_cost.empty()) continue;
        const double c = g.max_cost() + m.carbon_price * g.emission_rate;
        if (c > worst) {
            worst = c;
            worst_id = g.id;
        }
    }
    if (!m.generators.empty() && !(m.voll > worst))
        v.push_back(fmt::format("VOLL dominance: voll {} does not exceed the total marginal cost {} of generator '{}'",
                                m.voll, worst, worst_id));

    // connectivity over lines whose endpoints exist
    if (!m.buses.empty()) {
        std::vector<int> parent(m.buses.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto root = [&](int a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        for (const auto& l : m.lines) {
            const int a = m.bus_index(l.from_bus);
            const int b = m.bus_index(l.to_bus);
            if (a >= 0 && b >= 0) parent[root(a)] = root(b);
        }
        std::set<int> components;
        for (std::size_t b = 0; b < m.buses.size(); ++b) components.insert(root(static_cast<int>(b)));
        if (components.size() > 1)
            v.push_back(fmt::format("network is not connected ({} islands)", components.size()));
    }
    return report;
}

std::map<std::string, ZonePartition> zonal_partition(const NetworkModel& m) {
    const auto report = validate_network(m);
    if (!report.ok()) throw InputError("zonal_partition on an invalid network: " + report.violations.front());
    std::map<std::string, ZonePartition> out;
    for (const auto& z : m.zones) out[z.id];
    for (const auto& b : m.buses) out[b.zone].buses.push_back(b.id);
    for (const auto& l : m.lines) {
        const std::string& za = m.buses[m.bus_index(l.from_bus)].zone;
        const std::string& zb = m.buses[m.bus_index(l.to_bus)].zone;
        if (za == zb) {
            out[za].internal_lines.push_back(l.id);
        } else {
            out[za].external_lines.push_back(l.id);
            out[zb].external_lines.push_back(l.id);
        }
    }
    return out;
}

// ---------------------------------------------------------------- ingestion

namespace {

GeneratorKind generator_kind(const std::string& s, const std::string& where) {
    if (s == "FFG") return GeneratorKind::FFG;
    if (s == "NPG") return GeneratorKind::NPG;
    throw InputError(fmt::format("{}: generator kind '{}' is not FFG or NPG", where, s));
}

RenewableKind renewable_kind(const std::string& s, const std::string& where) {
    static const std::pair<const char*, RenewableKind> kinds[] = {{"BHD", RenewableKind::BHD},
                                                                  {"SHD", RenewableKind::SHD},
                                                                  {"UPV", RenewableKind::UPV},
                                                                  {"DPV", RenewableKind::DPV},
                                                                  {"UWT", RenewableKind::UWT}};
    for (const auto& [name, kind] : kinds)
        if (s == name) return kind;
    throw InputError(fmt::format("{}: renewable kind '{}' is not one of BHD, SHD, UPV, DPV, UWT", where, s));
}

std::string id_of(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw InputError(fmt::format("{}: missing '{}'", where, key));
    const auto& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw InputError(fmt::format("{}: '{}' must be a string or integer", where, key));
}

double num_of(const json& j, const char* key, double fallback, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    const auto& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        if (auto d = csv::parse_double(v.get<std::string>())) return *d;
    }
    throw InputError(fmt::format("{}: '{}' must be a number", where, key));
}

double required_num(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw InputError(fmt::format("{}: missing '{}'", where, key));
    return num_of(j, key, 0.0, where);
}

NetworkModel from_json(const json& doc, const std::string& src) {
    NetworkModel m;
    m.carbon_price = num_of(doc, "carbon_price", 0.0, src);
    m.voll = num_of(doc, "voll", m.voll, src);
    auto list = [&](const char* key) -> const json& {
        static const json empty = json::array();
        if (!doc.contains(key)) return empty;
        if (!doc.at(key).is_array()) throw InputError(fmt::format("{}: '{}' must be an array", src, key));
        return doc.at(key);
    };
    for (const auto& j : list("zones")) {
        const std::string where = src + ": zone";
        Zone z;
        z.id = id_of(j, "id", where);
        z.is_external = j.value("is_external", false);
        z.exchange_min = num_of(j, "exchange_min", -kUnbounded, where);
        z.exchange_max = num_of(j, "exchange_max", kUnbounded, where);
        m.zones.push_back(z);
    }
    for (const auto& j : list("buses")) {
        const std::string where = src + ": bus";
        m.buses.push_back({id_of(j, "id", where), id_of(j, "zone", where), j.value("is_reference", false)});
    }
    for (const auto& j : list("lines")) {
        const std::string where = src + ": line";
        TransmissionLine l;
        l.id = id_of(j, "id", where);
        l.from_bus = id_of(j, "from_bus", where);
        l.to_bus = id_of(j, "to_bus", where);
        l.susceptance = required_num(j, "susceptance", where);
        l.flow_min = num_of(j, "flow_min", -kUnbounded, where);
        l.flow_max = num_of(j, "flow_max", kUnbounded, where);
        m.lines.push_back(l);
    }
    for (const auto& j : list("generators")) {
        const std::string where = src + ": generator";
        ThermalGenerator g;
        g.id = id_of(j, "id", where);
        g.bus = id_of(j, "bus", where);
        g.kind = generator_kind(j.value("kind", std::string("FFG")), where + " " + g.id);
        g.p_min = num_of(j, "p_min", 0.0, where);
        g.p_max = required_num(j, "p_max", where);
        g.ramp_up = num_of(j, "ramp_up", kUnbounded, where);
        g.ramp_down = num_of(j, "ramp_down", kUnbounded, where);
        g.emission_rate = num_of(j, "emission_rate", 0.0, where);
        if (j.contains("marginal_cost") && j.at("marginal_cost").is_array()) {
            g.marginal_cost.clear();
            for (const auto& c : j.at("marginal_cost")) {
                if (!c.is_number()) throw InputError(where + " " + g.id + ": marginal_cost entries must be numbers");
                g.marginal_cost.push_back(c.get<double>());
            }
        } else {
            g.marginal_cost = {num_of(j, "marginal_cost", 0.0, where)};
        }
        m.generators.push_back(g);
    }
    for (const auto& j : list("renewables")) {
        const std::string where = src + ": renewable";
        RenewableSource r;
        r.id = id_of(j, "id", where);
        r.bus = id_of(j, "bus", where);
        r.kind = renewable_kind(j.value("kind", std::string("UPV")), where + " " + r.id);
        m.renewables.push_back(r);
    }
    return m;
}

std::vector<double> cost_series(const csv::Table& t, std::size_t row, int col) {
    std::vector<double> out;
    for (const auto& part : csv::split(t.cell(row, col), ';')) {
        auto v = csv::parse_double(part);
        if (!v) t.fail(row, fmt::format("marginal_cost '{}' is not a number or ';' list", t.cell(row, col)));
        out.push_back(*v);
    }
    return out;
}

NetworkModel from_csv_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    NetworkModel m;
    {
        const auto t = csv::read(dir / "zones.csv");
        const int id = t.require("id");
        const int ext = t.find("is_external");
        const int lo = t.find("exchange_min");
        const int hi = t.find("exchange_max");
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            m.zones.push_back(
                {t.cell(r, id), t.flag(r, ext), t.number_or(r, lo, -kUnbounded), t.number_or(r, hi, kUnbounded)});
    }
    {
        const auto t = csv::read(dir / "buses.csv");
        const int id = t.require("id");
        const int zone = t.require("zone");
        const int ref = t.find("is_reference");
        for (std::size_t r = 0; r < t.rows.size(); ++r) m.buses.push_back({t.cell(r, id), t.cell(r, zone), t.flag(r, ref)});
    }
    if (fs::exists(dir / "lines.csv")) {
        const auto t = csv::read(dir / "lines.csv");
        const int id = t.require("id"), from = t.require("from_bus"), to = t.require("to_bus");
        const int b = t.require("susceptance"), lo = t.find("flow_min"), hi = t.find("flow_max");
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            m.lines.push_back({t.cell(r, id), t.cell(r, from), t.cell(r, to), t.number(r, b),
                               t.number_or(r, lo, -kUnbounded), t.number_or(r, hi, kUnbounded)});
    }
    if (fs::exists(dir / "generators.csv")) {
        const auto t = csv::read(dir / "generators.csv");
        const int id = t.require("id"), bus = t.require("bus"), kind = t.find("kind");
        const int pmin = t.find("p_min"), pmax = t.require("p_max");
        const int ru = t.find("ramp_up"), rd = t.find("ramp_down");
        const int mc = t.require("marginal_cost"), em = t.find("emission_rate");
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            ThermalGenerator g;
            g.id = t.cell(r, id);
            g.bus = t.cell(r, bus);
            g.kind = kind < 0 ? GeneratorKind::FFG
                              : generator_kind(t.cell(r, kind), fmt::format("{}:{}", t.path.string(), t.line_of_row[r]));
            g.p_min = t.number_or(r, pmin, 0.0);
            g.p_max = t.number(r, pmax);
            g.ramp_up = t.number_or(r, ru, kUnbounded);
            g.ramp_down = t.number_or(r, rd, kUnbounded);
            g.marginal_cost = cost_series(t, r, mc);
            g.emission_rate = t.number_or(r, em, 0.0);
            m.generators.push_back(g);
        }
    }
    if (fs::exists(dir / "renewables.csv")) {
        const auto t = csv::read(dir / "renewables.csv");
        const int id = t.require("id"), bus = t.require("bus"), kind = t.require("kind");
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            m.renewables.push_back({t.cell(r, id), t.cell(r, bus),
                                    renewable_kind(t.cell(r, kind), fmt::format("{}:{}", t.path.string(), t.line_of_row[r]))});
    }
    if (fs::exists(dir / "system.csv")) {
        // optional key,value table for carbon_price and voll
        const auto t = csv::read(dir / "system.csv");
        const int key = t.require("key"), value = t.require("value");
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (t.cell(r, key) == "carbon_price") m.carbon_price = t.number(r, value);
            else if (t.cell(r, key) == "voll") m.voll = t.number(r, value);
            else t.fail(r, "unknown key '" + t.cell(r, key) + "'");
        }
    }
    return m;
}

} // namespace

NetworkModel load_network(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    if (!fs::exists(path)) throw InputError(fmt::format("network path '{}' does not exist", path.string()));
    if (fs::is_directory(path)) return from_csv_dir(path);
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(fmt::format("{}: {}", path.string(), e.what()));
    }
    try {
        return from_json(doc, path.string());
    } catch (const json::exception& e) {
        throw InputError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

} // namespace bssplan
