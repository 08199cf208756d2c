#include "bssplan/errors.hpp"
#include "bssplan/network.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace bssplan;

namespace {

const std::string kFixtures = BSSPLAN_FIXTURES;

NetworkModel fixture() { return load_network(kFixtures + "/network_5bus.json"); }

bool mentions(const ValidationReport& r, const std::string& text) {
    return std::any_of(r.violations.begin(), r.violations.end(),
                       [&](const std::string& v) { return v.find(text) != std::string::npos; });
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

} // namespace

TEST_CASE("bundled 5-bus network validates cleanly") {
    const auto m = fixture();
    CHECK(m.buses.size() == 5);
    CHECK(m.zones.size() == 2);
    const auto r = validate_network(m);
    CHECK(r.ok());
    for (const auto& v : r.violations) MESSAGE(v);
}

TEST_CASE("CSV directory and JSON document describe the same network") {
    const auto a = fixture();
    const auto b = load_network(kFixtures + "/network_5bus_csv");
    REQUIRE(a.zones.size() == b.zones.size());
    for (std::size_t z = 0; z < a.zones.size(); ++z) {
        CHECK(a.zones[z].id == b.zones[z].id);
        CHECK(a.zones[z].is_external == b.zones[z].is_external);
        CHECK(a.zones[z].exchange_min == b.zones[z].exchange_min);
        CHECK(a.zones[z].exchange_max == b.zones[z].exchange_max);
    }
    REQUIRE(a.lines.size() == b.lines.size());
    for (std::size_t l = 0; l < a.lines.size(); ++l) {
        CHECK(a.lines[l].id == b.lines[l].id);
        CHECK(a.lines[l].susceptance == b.lines[l].susceptance);
        CHECK(a.lines[l].flow_max == b.lines[l].flow_max);
    }
    REQUIRE(a.generators.size() == b.generators.size());
    for (std::size_t g = 0; g < a.generators.size(); ++g) {
        CHECK(a.generators[g].marginal_cost == b.generators[g].marginal_cost);
        CHECK(a.generators[g].kind == b.generators[g].kind);
        CHECK(a.generators[g].emission_rate == b.generators[g].emission_rate);
    }
    CHECK(a.renewables.size() == b.renewables.size());
    CHECK(a.carbon_price == b.carbon_price);
    CHECK(a.voll == b.voll);
    CHECK(validate_network(b).ok());
}

TEST_CASE("self loop is reported once, naming the line") {
    auto m = fixture();
    m.lines[1].to_bus = m.lines[1].from_bus;
    const auto r = validate_network(m);
    int hits = 0;
    for (const auto& v : r.violations) hits += v.find("L13") != std::string::npos ? 1 : 0;
    CHECK(hits == 1);
    CHECK(mentions(r, "from_bus equals to_bus"));
}

TEST_CASE("VOLL must exceed every generator's total marginal cost") {
    auto m = fixture();
    // independent scan of the fixture's generators
    double worst = 0.0;
    for (const auto& g : m.generators)
        for (double c : g.marginal_cost) worst = std::max(worst, c + m.carbon_price * g.emission_rate);
    REQUIRE(worst > 0.0);

    m.voll = 0.0;
    CHECK(mentions(validate_network(m), "VOLL dominance"));
    m.voll = worst;
    CHECK(mentions(validate_network(m), "VOLL dominance"));
    m.voll = worst * (1.0 + 1e-12) + 1e-9;
    CHECK_FALSE(mentions(validate_network(m), "VOLL dominance"));

    // time-varying cost: the hourly maximum counts
    m.generators[0].marginal_cost = {10.0, 20.0, worst + 5.0};
    CHECK(mentions(validate_network(m), "VOLL dominance"));
}

TEST_CASE("structural violations are reported") {
    auto m = fixture();
    m.buses[2].is_reference = true;
    CHECK(mentions(validate_network(m), "exactly one reference bus"));

    m = fixture();
    m.lines.erase(std::remove_if(m.lines.begin(), m.lines.end(), [](const auto& l) { return l.id == "L34"; }), m.lines.end());
    CHECK(mentions(validate_network(m), "not connected"));

    m = fixture();
    m.generators[3].emission_rate = 0.1; // NPG
    CHECK(mentions(validate_network(m), "NPG"));

    m = fixture();
    m.generators[0].bus = "99";
    CHECK(mentions(validate_network(m), "unknown bus '99'"));

    m = fixture();
    m.lines[0].susceptance = 0.0;
    m.lines[2].flow_min = 50.0;
    const auto r = validate_network(m);
    CHECK(mentions(r, "susceptance"));
    CHECK(mentions(r, "flow_min > flow_max"));

    m = fixture();
    m.zones[0].exchange_min = 30.0;
    CHECK(mentions(validate_network(m), "exchange_min > exchange_max"));

    m = fixture();
    m.buses.push_back(m.buses[0]);
    CHECK(mentions(validate_network(m), "duplicate bus id"));

    m = fixture();
    m.generators[1].p_min = 20.0; // above p_max of 15
    CHECK(mentions(validate_network(m), "p_min <= p_max"));
}

TEST_CASE("fixture partition matches hand enumeration") {
    const auto parts = zonal_partition(fixture());
    REQUIRE(parts.size() == 2);
    const auto& a = parts.at("A");
    const auto& b = parts.at("B");
    CHECK(as_set(a.buses) == std::set<std::string>{"1", "2", "3"});
    CHECK(as_set(b.buses) == std::set<std::string>{"4", "5"});
    CHECK(as_set(a.internal_lines) == std::set<std::string>{"L12", "L13", "L23"});
    CHECK(as_set(b.internal_lines) == std::set<std::string>{"L45"});
    CHECK(as_set(a.external_lines) == std::set<std::string>{"L34"});
    CHECK(as_set(b.external_lines) == std::set<std::string>{"L34"});
}

TEST_CASE("single zone grid has only internal lines") {
    auto m = fixture();
    m.zones = {{"Z", false, -kUnbounded, kUnbounded}};
    for (auto& b : m.buses) b.zone = "Z";
    const auto parts = zonal_partition(m);
    REQUIRE(parts.size() == 1);
    CHECK(parts.at("Z").internal_lines.size() == m.lines.size());
    CHECK(parts.at("Z").external_lines.empty());
}

TEST_CASE("partition of an invalid model is rejected") {
    auto m = fixture();
    m.lines[0].to_bus = m.lines[0].from_bus;
    CHECK_THROWS_AS(zonal_partition(m), InputError);
}

TEST_CASE("partition is exhaustive on random connected networks") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int nb = 2 + static_cast<int>(rng() % 9);
        const int nz = 1 + static_cast<int>(rng() % 4);
        NetworkModel m;
        for (int z = 0; z < nz; ++z) m.zones.push_back({"Z" + std::to_string(z), z > 0 && rng() % 2 == 0, -kUnbounded, kUnbounded});
        for (int b = 0; b < nb; ++b)
            m.buses.push_back({std::to_string(b), "Z" + std::to_string(rng() % nz), b == 0});
        int next = 0;
        // spanning tree plus extra edges
        for (int b = 1; b < nb; ++b)
            m.lines.push_back({"L" + std::to_string(next++), std::to_string(rng() % b), std::to_string(b), 1.0, -10.0, 10.0});
        const int extra = static_cast<int>(rng() % 5);
        for (int k = 0; k < extra; ++k) {
            const int a = static_cast<int>(rng() % nb);
            const int c = static_cast<int>(rng() % nb);
            if (a != c) m.lines.push_back({"L" + std::to_string(next++), std::to_string(a), std::to_string(c), 2.0, -5.0, 5.0});
        }
        REQUIRE(validate_network(m).ok());
        const auto parts = zonal_partition(m);
        std::size_t internal = 0, external = 0, buses = 0;
        for (const auto& [z, p] : parts) {
            internal += p.internal_lines.size();
            external += p.external_lines.size();
            buses += p.buses.size();
        }
        CHECK(external % 2 == 0);
        CHECK(internal + external / 2 == m.lines.size());
        CHECK(buses == m.buses.size());
    }
}

TEST_CASE("malformed network files raise input errors") {
    CHECK_THROWS_AS(load_network(kFixtures + "/does_not_exist.json"), InputError);
    CHECK_THROWS_AS(load_network(kFixtures + "/catalog.csv"), InputError);
}
