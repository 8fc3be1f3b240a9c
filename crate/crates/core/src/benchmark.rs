//! Bundled campus benchmark: a synthetic radial grid built on the bus names of
//! a university campus feeder map, with the campus parking-lot capacities and
//! its three PV sites.
//!
//! Capacities of lots and PV sites are real; impedances, ratings and building
//! loads are synthetic. Ratings were set by a calibration pass against the
//! published congestion table.

use crate::error::{Error, Result};
use crate::congestion::CongestionReport;
use crate::network::{Branch, Bus, BusKind, CableType, Generator, NominalLoad, Network};
use crate::powerflow::PowerFlowSolution;
use crate::scenario::{
    ev_step_profile, pv_half_sine_profile, run_sweep, Bindings, ControllerKind, LoadProfile, ParkingLot,
    ProfileSet, Scenario, SweepMode, SLOTS_PER_DAY,
};

pub const S_BASE_MVA: f64 = 10.0;
const HV: f64 = 34.5;
const MV: f64 = 4.16;
const LV: f64 = 0.48;

/// 09:00, when most vehicles are plugged in.
pub const ANALYSIS_SLOT: usize = 36;

pub const SLACK_BUS: &str = "DWP Pole";
pub const BUILDING_PROFILE: &str = "campus_building";
pub const EV_PROFILE: &str = "ev_step";
pub const PV_PROFILE: &str = "pv_half_sine";

/// Parking lot, stall count, attachment bus. Structures share the bus of the
/// surface lot with the same letter where the map shows a single node.
pub const PARKING_LOTS: [(&str, u32, &str); 18] = [
    ("B5", 420, "Parking B5"),
    ("B5 Structure", 1290, "Parking B5"),
    ("E5", 100, "Parking E5"),
    ("F5", 230, "Parking F5"),
    ("G6", 50, "Parking G6"),
    ("B6", 460, "Parking B6"),
    ("E6", 590, "E6 Mathador Hall"),
    ("G6 Structure", 1300, "Parking G6"),
    ("B1", 480, "Parking B1"),
    ("B2", 460, "Parking B2"),
    ("F2", 50, "Parking F2"),
    ("G1", 90, "Parking G1"),
    ("G3 Structure", 1370, "Parking G3"),
    ("G3", 450, "Parking G3"),
    ("B3 Structure", 1760, "Parking B3"),
    ("B4", 300, "Parking B4"),
    ("G4", 170, "Parking G4"),
    ("B3", 500, "Parking B3"),
];

/// PV sites: bus and capacity in kW.
pub const PV_SITES: [(&str, f64); 3] = [
    ("Parking B2", 467.0),
    // Lot E6 has no node of its own; its array sits on the hall it adjoins.
    ("E6 Mathador Hall", 225.0),
    ("Student REC", 1200.0),
];

/// Bus id, base kV, nominal building load in kW (0.95 lagging).
const BUSES: [(&str, f64, f64); 56] = [
    ("DWP Pole", HV, 0.0),
    ("Tampa DWP Pole", HV, 0.0),
    ("Sub C (HV)", HV, 0.0),
    ("Sub A", MV, 0.0),
    ("SubB", MV, 0.0),
    ("Sub C", MV, 0.0),
    ("Sub A (LV)", LV, 0.0),
    ("SubB (LV)", LV, 0.0),
    // Sub A feeders
    // Street LTS and SU (As) are drawn near Sub A (LV); placement assumed.
    ("Street LTS", LV, 40.0),
    ("SU (As)", LV, 150.0),
    ("Student REC", MV, 350.0),
    ("SU (AE)", MV, 120.0),
    ("SU Center", MV, 300.0),
    ("SU Admin", MV, 90.0),
    ("Oviatt library", MV, 420.0),
    ("SEQUOIA Hall", MV, 180.0),
    ("Byramian", MV, 160.0),
    ("University Hall", MV, 220.0),
    ("Jerome Richfield", MV, 260.0),
    ("Seirra Center", MV, 140.0),
    ("Seirra Hall", MV, 200.0),
    ("Parking B2", LV, 25.0),
    ("Parking B1", LV, 20.0),
    ("Parking B5", LV, 30.0),
    ("Parking B6", LV, 20.0),
    // Sub C feeders
    ("Sattelite Plant", MV, 400.0),
    ("Chapparal Hall", MV, 170.0),
    ("Health Center", MV, 210.0),
    ("Bookstore", MV, 150.0),
    ("Monterey Hall", MV, 140.0),
    ("Chrisholm Hall", MV, 130.0),
    ("Soraya Hall", MV, 260.0),
    ("Cypress Hall", MV, 110.0),
    ("Nordhoff Hall", MV, 190.0),
    ("Manzanita Hall", MV, 200.0),
    ("Parking G3", LV, 30.0),
    ("Parking G1", LV, 15.0),
    ("Parking G4", LV, 15.0),
    ("Parking B3", LV, 35.0),
    ("Parking B4", LV, 20.0),
    // SubB feeders
    ("SU(AN)", LV, 90.0),
    ("SU(CP)", LV, 70.0),
    ("Athletic Field", MV, 120.0),
    ("Sustainability Center", MV, 60.0),
    ("E6 Mathador Hall", MV, 230.0),
    ("Art Design Center", MV, 150.0),
    ("Physical Plant", MV, 180.0),
    ("Extended Learning", MV, 80.0),
    ("Juniper Hall", MV, 170.0),
    ("Redwood Hall", MV, 200.0),
    ("Jacaranda Hall", MV, 240.0),
    ("Education", MV, 130.0),
    ("Parking G6", LV, 25.0),
    ("Parking E5", LV, 10.0),
    ("Parking F5", LV, 15.0),
    ("Parking F2", LV, 10.0),
];

const HV_TIE: &str = "HV-tie-795";
const FEEDER: &str = "MV-feeder-A";
const FEEDER_2X: &str = "MV-feeder-A-2x";
const FEEDER_3X: &str = "MV-feeder-A-3x";
const LATERAL: &str = "MV-lateral-4/0";
const SERVICE: &str = "LV-service-4x500";

/// Cable catalog: name, ohm/mile resistance, ohm/mile reactance. The 2x and
/// 3x feeders are parallel sets of the single feeder cable.
const CABLES: [(&str, f64, f64); 6] = [
    (HV_TIE, 0.117, 0.6),
    (FEEDER, 0.136, 0.16),
    (FEEDER_2X, 0.068, 0.08),
    (FEEDER_3X, 0.136 / 3.0, 0.16 / 3.0),
    (LATERAL, 0.592, 0.21),
    (SERVICE, 0.0325, 0.03),
];

// Cable ratings from ampacity: sqrt(3) * kV * A, rounded.
/// 795 kcmil overhead at 34.5 kV, 900 A.
const HV_TIE_KVA: f64 = 53_800.0;
/// One set of 500 kcmil at 4.16 kV, 450 A.
const FEEDER_KVA: f64 = 3_240.0;
/// 4/0 aluminium at 4.16 kV, 230 A.
const LATERAL_KVA: f64 = 1_660.0;
/// Four parallel 500 kcmil at 0.48 kV, 4 x 380 A.
const SERVICE_KVA: f64 = 1_260.0;

enum Link {
    Cable(&'static str, f64),
    /// Nameplate percent impedance.
    Xfmr(f64),
}

use Link::{Cable, Xfmr};

/// From, to, construction, rating in kVA.
const BRANCHES: [(&str, &str, Link, f64); 55] = [
    ("DWP Pole", "Tampa DWP Pole", Cable(HV_TIE, 1.2), HV_TIE_KVA),
    ("DWP Pole", "Sub C (HV)", Cable(HV_TIE, 0.8), HV_TIE_KVA),
    ("DWP Pole", "Sub A", Xfmr(7.0), 10_000.0),
    ("Tampa DWP Pole", "SubB", Xfmr(7.0), 10_000.0),
    ("Sub C (HV)", "Sub C", Xfmr(7.0), 10_000.0),
    // Sub A
    ("Sub A", "Sub A (LV)", Xfmr(5.75), 300.0),
    ("Sub A (LV)", "Street LTS", Cable(SERVICE, 0.02), SERVICE_KVA),
    ("Sub A (LV)", "SU (As)", Cable(SERVICE, 0.02), SERVICE_KVA),
    ("Sub A", "Student REC", Cable(FEEDER, 0.3), FEEDER_KVA),
    ("Student REC", "SU (AE)", Cable(LATERAL, 0.1), LATERAL_KVA),
    ("Student REC", "SU Center", Cable(LATERAL, 0.15), LATERAL_KVA),
    ("SU Center", "SU Admin", Cable(LATERAL, 0.1), LATERAL_KVA),
    ("Sub A", "Oviatt library", Cable(FEEDER_3X, 0.35), 3.0 * FEEDER_KVA),
    ("Oviatt library", "SEQUOIA Hall", Cable(LATERAL, 0.12), LATERAL_KVA),
    ("Oviatt library", "Byramian", Cable(FEEDER_2X, 0.2), 2.0 * FEEDER_KVA),
    ("Byramian", "University Hall", Cable(LATERAL, 0.15), LATERAL_KVA),
    ("Byramian", "Jerome Richfield", Cable(FEEDER, 0.25), FEEDER_KVA),
    ("Jerome Richfield", "Seirra Center", Cable(LATERAL, 0.1), LATERAL_KVA),
    ("Jerome Richfield", "Seirra Hall", Cable(FEEDER, 0.2), FEEDER_KVA),
    ("Seirra Hall", "Parking B2", Xfmr(5.75), 1_000.0),
    ("Seirra Hall", "Parking B1", Xfmr(5.75), 1_000.0),
    ("University Hall", "Parking B5", Xfmr(5.75), 2_500.0),
    ("Jerome Richfield", "Parking B6", Xfmr(5.75), 750.0),
    // Sub C
    ("Sub C", "Sattelite Plant", Cable(FEEDER, 0.1), FEEDER_KVA),
    ("Sub C", "Chapparal Hall", Cable(LATERAL, 0.2), LATERAL_KVA),
    ("Sub C", "Health Center", Cable(FEEDER_2X, 0.25), 2.0 * FEEDER_KVA),
    ("Sub C", "Bookstore", Cable(FEEDER_3X, 0.3), 3.0 * FEEDER_KVA),
    ("Health Center", "Monterey Hall", Cable(LATERAL, 0.1), LATERAL_KVA),
    ("Health Center", "Chrisholm Hall", Cable(LATERAL, 0.2), LATERAL_KVA),
    ("Bookstore", "Soraya Hall", Cable(LATERAL, 0.15), LATERAL_KVA),
    ("Bookstore", "Cypress Hall", Cable(FEEDER_2X, 0.2), 2.0 * FEEDER_KVA),
    ("Cypress Hall", "Nordhoff Hall", Cable(LATERAL, 0.1), LATERAL_KVA),
    ("Cypress Hall", "Manzanita Hall", Cable(FEEDER_2X, 0.2), 2.0 * FEEDER_KVA),
    ("Chrisholm Hall", "Parking G3", Xfmr(5.75), 2_500.0),
    ("Chrisholm Hall", "Parking G1", Xfmr(5.75), 300.0),
    ("Chrisholm Hall", "Parking G4", Xfmr(5.75), 500.0),
    ("Manzanita Hall", "Parking B3", Xfmr(5.75), 2_000.0),
    ("Manzanita Hall", "Parking B4", Xfmr(5.75), 750.0),
    // SubB
    ("SubB", "SubB (LV)", Xfmr(5.75), 300.0),
    ("SubB (LV)", "SU(AN)", Cable(SERVICE, 0.02), SERVICE_KVA),
    ("SubB (LV)", "SU(CP)", Cable(SERVICE, 0.02), SERVICE_KVA),
    ("SubB", "Athletic Field", Cable(FEEDER, 0.4), FEEDER_KVA),
    ("Athletic Field", "Parking G6", Xfmr(5.75), 2_000.0),
    ("SubB", "Sustainability Center", Cable(FEEDER, 0.25), FEEDER_KVA),
    ("Sustainability Center", "E6 Mathador Hall", Cable(FEEDER, 0.15), FEEDER_KVA),
    ("E6 Mathador Hall", "Parking E5", Xfmr(5.75), 300.0),
    ("E6 Mathador Hall", "Parking F5", Xfmr(5.75), 750.0),
    ("E6 Mathador Hall", "Parking F2", Xfmr(5.75), 150.0),
    ("E6 Mathador Hall", "Art Design Center", Cable(LATERAL, 0.1), LATERAL_KVA),
    ("SubB", "Physical Plant", Cable(FEEDER, 0.2), FEEDER_KVA),
    ("Physical Plant", "Extended Learning", Cable(LATERAL, 0.1), LATERAL_KVA),
    ("Physical Plant", "Juniper Hall", Cable(FEEDER, 0.2), FEEDER_KVA),
    ("Juniper Hall", "Redwood Hall", Cable(LATERAL, 0.1), LATERAL_KVA),
    ("Juniper Hall", "Jacaranda Hall", Cable(FEEDER, 0.15), FEEDER_KVA),
    ("Jacaranda Hall", "Education", Cable(LATERAL, 0.1), LATERAL_KVA),
];

/// Hourly shape of the aggregate campus building load, peak at noon.
const BUILDING_HOURLY: [f64; 24] = [
    0.45, 0.43, 0.42, 0.42, 0.43, 0.47, 0.55, 0.68, 0.80, 0.88, 0.94, 0.98, 1.00, 0.99, 0.97, 0.93, 0.86, 0.77,
    0.69, 0.62, 0.57, 0.52, 0.49, 0.46,
];

pub fn benchmark_network() -> Network {
    let catalog = CABLES
        .iter()
        .map(|&(name, r, x)| CableType::new(name, r, x))
        .collect();
    let buses = BUSES
        .iter()
        .map(|&(id, kv, kw)| {
            let kind = if id == SLACK_BUS { BusKind::Slack } else { BusKind::Load };
            Bus::new(id, kind, kv, NominalLoad::new(kw))
        })
        .collect();
    let branches = BRANCHES
        .iter()
        .map(|(from, to, link, rating)| match *link {
            Cable(cable, miles) => Branch::cable(*from, *to, cable, miles, *rating),
            Xfmr(pct) => Branch::transformer(*from, *to, pct, *rating),
        })
        .collect();
    let mut generators = vec![Generator::grid_supply(SLACK_BUS, 40_000.0)];
    generators.extend(PV_SITES.iter().map(|&(bus, kw)| Generator::pv_site(bus, kw)));
    Network::new(S_BASE_MVA, catalog, buses, branches, generators)
}

/// Synthetic weekday building profile: hourly values held for four slots.
pub fn campus_building_profile() -> LoadProfile {
    let coefficients = (0..SLOTS_PER_DAY).map(|slot| BUILDING_HOURLY[slot / 4]).collect();
    LoadProfile::from_coefficients(BUILDING_PROFILE, coefficients).expect("static profile")
}

pub fn benchmark_profiles() -> ProfileSet {
    [campus_building_profile(), ev_step_profile(), pv_half_sine_profile()]
        .into_iter()
        .map(|p| (p.id().to_string(), p))
        .collect()
}

pub fn benchmark_bindings() -> Bindings {
    Bindings {
        building_profile: Some(BUILDING_PROFILE.into()),
        bus_profiles: Default::default(),
        ev_profile: Some(EV_PROFILE.into()),
        pv_profile: Some(PV_PROFILE.into()),
        parking_lots: PARKING_LOTS
            .iter()
            .map(|&(name, capacity, bus)| ParkingLot::new(name, capacity, bus))
            .collect(),
    }
}

/// Stall count of a parking lot by name.
pub fn lot_capacity(name: &str) -> Option<u32> {
    PARKING_LOTS.iter().find(|l| l.0 == name).map(|l| l.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkScenario {
    /// Short key, used for file names.
    pub key: &'static str,
    /// Row label in the summary table.
    pub label: &'static str,
    pub scenario: Scenario,
}

/// Base grid, 10 % EV, 25 % EV, 25 % EV with PV, and 25 % EV with PV and
/// one-third load management.
pub fn benchmark_scenarios() -> Vec<BenchmarkScenario> {
    let s = |pen, pv, ctl| Scenario::new(pen, pv, ctl, benchmark_bindings());
    vec![
        BenchmarkScenario {
            key: "base",
            label: "Current Grid",
            scenario: s(0.0, false, ControllerKind::Null),
        },
        BenchmarkScenario {
            key: "ev10",
            label: "Current Grid & 10% EV Load",
            scenario: s(0.10, false, ControllerKind::Null),
        },
        BenchmarkScenario {
            key: "ev25",
            label: "Current Grid with 25% EV Load",
            scenario: s(0.25, false, ControllerKind::Null),
        },
        BenchmarkScenario {
            key: "ev25_pv",
            label: "Current Grid & 25% EV Load & PV Generation",
            scenario: s(0.25, true, ControllerKind::Null),
        },
        BenchmarkScenario {
            key: "ev25_pv_lm",
            label: "Current Grid & 25% EV Load & PV Generation & Load Management",
            scenario: s(0.25, true, ControllerKind::OneThirdStagger),
        },
    ]
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub network: Network,
    pub profiles: ProfileSet,
    pub scenarios: Vec<BenchmarkScenario>,
}

pub fn build_benchmark() -> Benchmark {
    Benchmark {
        network: benchmark_network(),
        profiles: benchmark_profiles(),
        scenarios: benchmark_scenarios(),
    }
}

/// Solved state of one scenario at one slot.
#[derive(Debug, Clone)]
pub struct SlotOutcome {
    pub solution: PowerFlowSolution,
    pub report: CongestionReport,
}

/// Solves `scenario` at `slot`. Stateless scenarios solve the slot alone; a
/// stateful controller is run from midnight so its queues reflect the day so
/// far.
pub fn evaluate_at(net: &Network, scenario: &Scenario, profiles: &ProfileSet, slot: usize) -> Result<SlotOutcome> {
    if slot >= SLOTS_PER_DAY {
        return Err(Error::InvalidInput(format!("slot {slot} outside 0..{SLOTS_PER_DAY}")));
    }
    let intervals: Vec<usize> = match scenario.controller {
        ControllerKind::Null => vec![slot],
        ControllerKind::OneThirdStagger => (0..=slot).collect(),
    };
    let sweep = run_sweep(net, scenario, profiles, &intervals)?;
    debug_assert!(scenario.controller == ControllerKind::Null || sweep.mode == SweepMode::Sequential);
    let solution = sweep
        .intervals
        .into_iter()
        .last()
        .map(|r| r.solution)
        .expect("one interval per request");
    let report = CongestionReport::from_solution(net, &solution)?;
    Ok(SlotOutcome { solution, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::validate_network;

    #[test]
    fn fixture_is_valid() {
        let net = benchmark_network();
        let report = validate_network(&net);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert!(net.bus_count() >= 40);
    }

    #[test]
    fn base_case_loads_only_the_service_transformers() {
        let b = build_benchmark();
        let out = evaluate_at(&b.network, &b.scenarios[0].scenario, &b.profiles, ANALYSIS_SLOT).unwrap();
        assert!(out.solution.converged);
        let loaded: Vec<&str> = out
            .report
            .branches
            .iter()
            .filter(|l| l.loading_percent >= 40.0)
            .map(|l| l.branch.as_str())
            .collect();
        assert_eq!(loaded, ["Sub A -> Sub A (LV)", "SubB -> SubB (LV)"]);
    }

    #[test]
    fn every_scenario_converges_at_the_analysis_slot() {
        let b = build_benchmark();
        for s in &b.scenarios {
            let out = evaluate_at(&b.network, &s.scenario, &b.profiles, ANALYSIS_SLOT).unwrap();
            assert!(out.solution.converged, "{}", s.key);
            assert!(out.solution.min_voltage() > 0.8, "{}", s.key);
        }
    }

    #[test]
    fn evaluate_rejects_slots_past_midnight() {
        let b = build_benchmark();
        assert!(evaluate_at(&b.network, &b.scenarios[0].scenario, &b.profiles, 96).is_err());
    }
}
