#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace bssplan {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct Zone {
    std::string id;
    bool is_external = false;
    /// Bounds on net import into the zone over its tie lines (MW).
    double exchange_min = -kUnbounded;
    double exchange_max = kUnbounded;
};

struct Bus {
    std::string id;
    std::string zone;
    bool is_reference = false;
};

struct TransmissionLine {
    std::string id;
    std::string from_bus;
    std::string to_bus;
    double susceptance = 0.0;
    double flow_min = -kUnbounded;
    double flow_max = kUnbounded;
};

enum class GeneratorKind { FFG, NPG };

struct ThermalGenerator {
    std::string id;
    std::string bus;
    GeneratorKind kind = GeneratorKind::FFG;
    double p_min = 0.0;
    double p_max = 0.0;
    double ramp_up = kUnbounded;
    double ramp_down = kUnbounded;
    /// $/MWh; one entry means constant over the horizon.
    std::vector<double> marginal_cost{0.0};
    double emission_rate = 0.0;

    double cost_at(int hour) const {
        return marginal_cost.size() == 1 ? marginal_cost.front() : marginal_cost.at(static_cast<std::size_t>(hour));
    }
    double max_cost() const;
};

enum class RenewableKind { BHD, SHD, UPV, DPV, UWT };

struct RenewableSource {
    std::string id;
    std::string bus;
    RenewableKind kind = RenewableKind::UPV;
};

const char* to_string(GeneratorKind k);
const char* to_string(RenewableKind k);

struct NetworkModel {
    std::vector<Zone> zones;
    std::vector<Bus> buses;
    std::vector<TransmissionLine> lines;
    std::vector<ThermalGenerator> generators;
    std::vector<RenewableSource> renewables;
    double carbon_price = 0.0;
    double voll = 10'000.0;

    int zone_index(const std::string& id) const;
    int bus_index(const std::string& id) const;
    /// Zone index of a bus, or -1.
    int zone_of_bus(int bus) const;
    /// Lines whose endpoints sit in different zones.
    bool is_tie(const TransmissionLine& line) const;
    /// A tie line touching an external zone.
    bool is_external(const TransmissionLine& line) const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_network(const NetworkModel& model);

struct ZonePartition {
    std::vector<std::string> buses;
    std::vector<std::string> internal_lines;
    std::vector<std::string> external_lines;
};

/// Throws InputError if the model does not validate.
std::map<std::string, ZonePartition> zonal_partition(const NetworkModel& model);

/// JSON document, or a directory holding zones.csv, buses.csv, lines.csv,
/// generators.csv and renewables.csv. Throws InputError on parse failures; the
/// result is not validated.
NetworkModel load_network(const std::filesystem::path& path);

} // namespace bssplan
