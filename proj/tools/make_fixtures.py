#!/usr/bin/env python3
"""Regenerates the bundled fixtures under fixtures/.

Deterministic: profiles are closed-form shapes with scenario multipliers, so
re-running produces byte-identical files.
"""
import csv
import json
import math
import os
import shutil
import sys

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")

NETWORK = {
    "carbon_price": 50.0,
    "voll": 10000.0,
    "zones": [
        {"id": "A", "is_external": False, "exchange_min": -20.0, "exchange_max": 20.0},
        {"id": "B", "is_external": True},
    ],
    "buses": [
        {"id": "1", "zone": "A", "is_reference": True},
        {"id": "2", "zone": "A", "is_reference": False},
        {"id": "3", "zone": "A", "is_reference": False},
        {"id": "4", "zone": "B", "is_reference": False},
        {"id": "5", "zone": "B", "is_reference": False},
    ],
    "lines": [
        {"id": "L12", "from_bus": "1", "to_bus": "2", "susceptance": 10.0, "flow_min": -60.0, "flow_max": 60.0},
        {"id": "L13", "from_bus": "1", "to_bus": "3", "susceptance": 8.0, "flow_min": -40.0, "flow_max": 40.0},
        {"id": "L23", "from_bus": "2", "to_bus": "3", "susceptance": 12.0, "flow_min": -30.0, "flow_max": 30.0},
        {"id": "L34", "from_bus": "3", "to_bus": "4", "susceptance": 6.0, "flow_min": -30.0, "flow_max": 30.0},
        {"id": "L45", "from_bus": "4", "to_bus": "5", "susceptance": 10.0, "flow_min": -80.0, "flow_max": 80.0},
    ],
    "generators": [
        {"id": "G1", "bus": "1", "kind": "FFG", "p_min": 0.0, "p_max": 55.0, "ramp_up": 25.0, "ramp_down": 25.0,
         "marginal_cost": 28.0, "emission_rate": 0.45},
        {"id": "G2", "bus": "2", "kind": "FFG", "p_min": 0.0, "p_max": 15.0, "ramp_up": 15.0, "ramp_down": 15.0,
         "marginal_cost": 85.0, "emission_rate": 0.6},
        {"id": "G4", "bus": "4", "kind": "FFG", "p_min": 0.0, "p_max": 70.0, "ramp_up": 35.0, "ramp_down": 35.0,
         "marginal_cost": 45.0, "emission_rate": 0.5},
        {"id": "N5", "bus": "5", "kind": "NPG", "p_min": 0.0, "p_max": 20.0, "ramp_up": 5.0, "ramp_down": 5.0,
         "marginal_cost": 10.0, "emission_rate": 0.0},
    ],
    "renewables": [
        {"id": "PV3", "bus": "3", "kind": "UPV"},
        {"id": "WT3", "bus": "3", "kind": "UWT"},
        {"id": "PV2", "bus": "2", "kind": "DPV"},
    ],
}

# name, duration, min, max, ec $/kWh, pcs $/kW, bop $/kW, c&c $/kWh, replacement $/kWh,
# fixed O&M $/kW-yr, variable O&M $/MWh, rte, discharge eff, max dod, self discharge %/day,
# rte degradation %, cycles, lifetime
VARIANTS = [
    ("NaSB", 2, 8, 465, 211, 95, 127, 199.8, 3.96, 1.98, 0.75, 0.85, 0.9, 0.05, 0.34, 4000, 13),
    ("LiB", 2, 8, 189, 211, 95, 96, 409.59, 7.59, 2.31, 0.85, 0.85, 0.8, 0.2, 0.5, 3500, 10),
    ("LAB", 2, 8, 220, 211, 95, 167, 190.92, 3.74, 0.407, 0.72, 0.85, 0.65, 0.08, 5.4, 900, 3),
    ("ZEBRA", 2, 8, 482, 211, 95, 110, 202.02, 6.05, 0.66, 0.83, 0.85, 0.9, 0.3, 0.35, 3500, 12),
    ("ZnBrB", 2, 10, 192, 211, 95, 164, 216.45, 4.73, 0.66, 0.72, 0.78, 1.0, 0.0, 1.5, 3500, 10),
    ("VRFB", 2, 12, 393, 211, 95, 180, 144.3, 9.35, 0.99, 0.7, 0.7, 1.0, 0.15, 0.4, 10000, 15),
]
CATALOG_HEADER = ["name", "duration", "min_duration", "max_duration", "energy_capacity_cost", "pcs_cost", "bop_cost",
                  "candc_cost", "replacement_cost", "fixed_om", "variable_om", "degradation_cost", "rte",
                  "discharge_eff", "max_dod", "self_discharge_daily", "rte_degradation", "cycle_limit",
                  "lifetime_years"]
DEFAULT_DURATIONS = {"NaSB": "6", "LiB": "4", "LAB": "4", "ZEBRA": "6", "ZnBrB": "4", "VRFB": "8"}

# (load scale, solar scale, wind scale, wind phase)
SCENARIOS_24 = {
    "s1": (1.00, 1.00, 0.60, 0.0),
    "s2": (1.08, 0.85, 0.35, 1.5),
    "s3": (0.94, 1.15, 0.80, 3.0),
    "s4": (1.04, 0.95, 0.50, 4.5),
}


def fmt(x):
    return f"{x:.4f}".rstrip("0").rstrip(".") if x != 0 else "0"


def solar(h):
    # daylight 6..19 with a noon peak
    return max(0.0, math.sin(math.pi * (h - 6) / 13.0)) if 6 <= h <= 19 else 0.0


def load_shape(h):
    # morning shoulder and an evening peak around 19h
    base = 0.62 + 0.18 * math.exp(-((h - 9) ** 2) / 8.0) + 0.38 * math.exp(-((h - 19) ** 2) / 5.0)
    return base


def wind(h, phase):
    return 0.5 + 0.4 * math.cos(2 * math.pi * (h + phase) / 24.0)


def scenario_rows(hours, load_k, solar_k, wind_k, phase, day_mod=None):
    rows = []
    for t in range(hours):
        h = t % 24
        day = t // 24
        dk = 1.0 if day_mod is None else day_mod[day]
        shape = load_shape(h) * load_k * dk
        rows.append({
            "hour": t,
            "load_1": 44.0 * shape,
            "load_2": 34.0 * shape,
            "load_3": 25.0 * shape,
            "load_4": 40.0 * (0.8 + 0.2 * load_shape(h)) * load_k,
            "res_PV3": 80.0 * solar_k * solar(h) * (1.0 if day_mod is None else 2.0 - dk),
            "res_WT3": 25.0 * wind_k * wind(h, phase + day),
            "res_PV2": 12.0 * solar_k * solar(h),
        })
    return rows


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([r[h] if isinstance(r[h], str) else fmt(r[h]) if isinstance(r[h], float) else r[h] for h in header])


SCEN_HEADER = ["hour", "load_1", "load_2", "load_3", "load_4", "res_PV3", "res_WT3", "res_PV2"]


def main():
    if os.path.isdir(ROOT):
        for sub in ("scenarios_24h", "scenarios_168h", "scenarios_24h_dup", "scenarios_single", "bad", "network_5bus_csv"):
            shutil.rmtree(os.path.join(ROOT, sub), ignore_errors=True)
    os.makedirs(ROOT, exist_ok=True)

    with open(os.path.join(ROOT, "network_5bus.json"), "w") as f:
        json.dump(NETWORK, f, indent=2)
        f.write("\n")

    csv_dir = os.path.join(ROOT, "network_5bus_csv")
    write_csv(os.path.join(csv_dir, "zones.csv"), ["id", "is_external", "exchange_min", "exchange_max"],
              [{"id": z["id"], "is_external": "true" if z["is_external"] else "false",
                "exchange_min": fmt(z.get("exchange_min", -math.inf)) if "exchange_min" in z else "",
                "exchange_max": fmt(z.get("exchange_max", math.inf)) if "exchange_max" in z else ""}
               for z in NETWORK["zones"]])
    write_csv(os.path.join(csv_dir, "buses.csv"), ["id", "zone", "is_reference"],
              [{"id": b["id"], "zone": b["zone"], "is_reference": "true" if b["is_reference"] else "false"}
               for b in NETWORK["buses"]])
    write_csv(os.path.join(csv_dir, "lines.csv"), ["id", "from_bus", "to_bus", "susceptance", "flow_min", "flow_max"],
              NETWORK["lines"])
    write_csv(os.path.join(csv_dir, "generators.csv"),
              ["id", "bus", "kind", "p_min", "p_max", "ramp_up", "ramp_down", "marginal_cost", "emission_rate"],
              NETWORK["generators"])
    write_csv(os.path.join(csv_dir, "renewables.csv"), ["id", "bus", "kind"], NETWORK["renewables"])
    write_csv(os.path.join(csv_dir, "system.csv"), ["key", "value"],
              [{"key": "carbon_price", "value": NETWORK["carbon_price"]}, {"key": "voll", "value": NETWORK["voll"]}])

    def catalog_rows(durations):
        rows = []
        for rec in VARIANTS:
            name, lo, hi, ec, pc, bp, cc, br, bf, bv, rte, dc, dod, sd, df, cl, lt = rec
            rows.append({"name": name, "duration": durations(name), "min_duration": lo, "max_duration": hi,
                         "energy_capacity_cost": ec, "pcs_cost": pc, "bop_cost": bp, "candc_cost": cc,
                         "replacement_cost": br, "fixed_om": bf, "variable_om": bv, "degradation_cost": 5,
                         "rte": rte, "discharge_eff": dc, "max_dod": dod, "self_discharge_daily": sd,
                         "rte_degradation": df, "cycle_limit": cl, "lifetime_years": lt})
        return rows

    write_csv(os.path.join(ROOT, "catalog_variants.csv"), CATALOG_HEADER, catalog_rows(lambda n: "*"))
    write_csv(os.path.join(ROOT, "catalog.csv"), CATALOG_HEADER, catalog_rows(lambda n: DEFAULT_DURATIONS[n]))

    d24 = os.path.join(ROOT, "scenarios_24h")
    for sid, (lk, sk, wk, ph) in SCENARIOS_24.items():
        write_csv(os.path.join(d24, sid + ".csv"), SCEN_HEADER, scenario_rows(24, lk, sk, wk, ph))
    write_csv(os.path.join(d24, "manifest.csv"), ["id"], [{"id": s} for s in SCENARIOS_24])
    write_csv(os.path.join(d24, "manifest_3.csv"), ["id"], [{"id": s} for s in ("s1", "s2", "s3")])

    d168 = os.path.join(ROOT, "scenarios_168h")
    weekly = [1.00, 1.03, 0.97, 1.05, 1.02, 0.90, 0.88]
    for k, (sid, (lk, sk, wk, ph)) in enumerate(SCENARIOS_24.items()):
        mod = weekly[k:] + weekly[:k]
        write_csv(os.path.join(d168, "w" + sid[1:] + ".csv"), SCEN_HEADER, scenario_rows(168, lk, sk, wk, ph, mod))

    dup = os.path.join(ROOT, "scenarios_24h_dup")
    rows = scenario_rows(24, *SCENARIOS_24["s2"])
    for sid in ("d1", "d2", "d3"):
        write_csv(os.path.join(dup, sid + ".csv"), SCEN_HEADER, rows)

    single = os.path.join(ROOT, "scenarios_single")
    write_csv(os.path.join(single, "s2.csv"), SCEN_HEADER, scenario_rows(24, *SCENARIOS_24["s2"]))

    ragged = os.path.join(ROOT, "bad", "ragged")
    write_csv(os.path.join(ragged, "r1.csv"), SCEN_HEADER, scenario_rows(24, *SCENARIOS_24["s1"]))
    write_csv(os.path.join(ragged, "r2.csv"), SCEN_HEADER, scenario_rows(24, *SCENARIOS_24["s2"])[:23])
    negative = os.path.join(ROOT, "bad", "negative")
    rows = scenario_rows(24, *SCENARIOS_24["s1"])
    rows[5]["load_2"] = -3.0
    write_csv(os.path.join(negative, "n1.csv"), SCEN_HEADER, rows)
    missing = os.path.join(ROOT, "bad", "missing")
    write_csv(os.path.join(missing, "manifest.csv"), ["id"], [{"id": "s1"}, {"id": "nowhere"}])
    write_csv(os.path.join(missing, "s1.csv"), SCEN_HEADER, scenario_rows(24, *SCENARIOS_24["s1"]))
    return 0


if __name__ == "__main__":
    sys.exit(main())
