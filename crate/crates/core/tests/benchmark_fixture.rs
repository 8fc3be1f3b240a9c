mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use gridstress::benchmark::{
    benchmark_network, build_benchmark, evaluate_at, lot_capacity, Benchmark, ANALYSIS_SLOT, PARKING_LOTS, PV_SITES,
};
use gridstress::cli::write_benchmark_files;
use gridstress::congestion::{congested_elements, BinDeltas, CongestionHistogram, CongestionReport};
use gridstress::io::{
    emit_network, emit_profile_csv, emit_scenario, parse_detail, parse_network_file, parse_profile_csv,
    parse_scenario_file, parse_summary, ReportFormat,
};
use gridstress::network::{validate_network, Branch, BranchKind, ElementKind, GeneratorKind};
use num_complex::Complex64;

fn outcome(b: &Benchmark, key: &str) -> CongestionReport {
    let s = b.scenarios.iter().find(|s| s.key == key).expect("scenario key");
    let out = evaluate_at(&b.network, &s.scenario, &b.profiles, ANALYSIS_SLOT).unwrap();
    assert!(out.solution.converged, "{key} did not converge");
    out.report
}

fn branch<'a>(b: &'a Benchmark, id: &str) -> &'a Branch {
    b.network.branches().iter().find(|br| br.id() == id).expect("branch id")
}

#[test]
fn lot_capacities_match_the_parking_table() {
    let expected = [
        ("B5", 420),
        ("B5 Structure", 1290),
        ("E5", 100),
        ("F5", 230),
        ("G6", 50),
        ("B6", 460),
        ("E6", 590),
        ("G6 Structure", 1300),
        ("B1", 480),
        ("B2", 460),
        ("F2", 50),
        ("G1", 90),
        ("G3 Structure", 1370),
        ("G3", 450),
        ("B3 Structure", 1760),
        ("B4", 300),
        ("G4", 170),
        ("B3", 500),
    ];
    assert_eq!(PARKING_LOTS.len(), expected.len());
    for (name, stalls) in expected {
        assert_eq!(lot_capacity(name), Some(stalls), "{name}");
    }
    let total: u32 = PARKING_LOTS.iter().map(|l| l.1).sum();
    assert_eq!(total, 10_070);
}

#[test]
fn three_pv_sites_with_published_ratings() {
    let net = benchmark_network();
    let pv: Vec<_> = net.generators().iter().filter(|g| g.kind == GeneratorKind::PvSite).collect();
    assert_eq!(pv.len(), 3);
    for (bus, kw) in PV_SITES {
        assert!(pv.iter().any(|g| g.bus == bus && g.capacity == kw), "{bus}");
    }
    let total: f64 = pv.iter().map(|g| g.capacity).sum();
    assert_eq!(total, 1892.0);
}

#[test]
fn every_lot_sits_on_a_network_bus() {
    let net = benchmark_network();
    for (name, _, bus) in PARKING_LOTS {
        assert!(net.bus_index(bus).is_some(), "{name} -> {bus}");
    }
    assert!(validate_network(&net).is_valid());
}

#[test]
fn cable_impedance_matches_hand_calculation() {
    // 0.3 mi of 0.136 + j0.16 ohm/mi on a 4.16 kV, 10 MVA base.
    let b = build_benchmark();
    let br = branch(&b, "Sub A -> Student REC");
    assert!(matches!(&br.kind, BranchKind::Cable { length_miles, .. } if *length_miles == 0.3));
    let z = b.network.series_impedance_pu(br).unwrap();
    let expected = Complex64::new(0.02357618343195266, 0.027736686390532544);
    assert!((z - expected).norm() < 1e-15, "{z}");
}

#[test]
fn transformer_impedance_matches_hand_calculation() {
    let b = build_benchmark();
    let sub = b.network.series_impedance_pu(branch(&b, "DWP Pole -> Sub A")).unwrap();
    assert!((sub - Complex64::new(0.0, 0.07)).norm() < 1e-15, "{sub}");
    let lot = b.network.series_impedance_pu(branch(&b, "Manzanita Hall -> Parking B3")).unwrap();
    assert!((lot - Complex64::new(0.0, 0.2875)).norm() < 1e-15, "{lot}");
}

#[test]
fn frozen_histograms_at_nine_am() {
    let b = build_benchmark();
    let expected = [
        ("base", [2, 0, 0, 0]),
        ("ev10", [20, 0, 3, 0]),
        ("ev25", [7, 7, 10, 7]),
        ("ev25_pv", [7, 9, 8, 7]),
        ("ev25_pv_lm", [7, 4, 0, 2]),
    ];
    for (key, counts) in expected {
        let report = outcome(&b, key);
        assert_eq!(report.histogram.reported(), counts, "{key}");
        assert_eq!(report.histogram.total(), b.network.branches().len(), "{key}");
    }
}

#[test]
fn congestion_trends() {
    let b = build_benchmark();
    let h: Vec<CongestionHistogram> = ["base", "ev10", "ev25", "ev25_pv", "ev25_pv_lm"]
        .iter()
        .map(|k| outcome(&b, k).histogram)
        .collect();
    assert_eq!(h[0].at_or_above_80(), 0);
    assert!(h[0].overloaded() < h[1].overloaded());
    assert!(h[1].overloaded() < h[2].overloaded());
    assert!(h[3].overloaded() < h[2].overloaded());
    assert_eq!(h[4].bin_100_150, 0);
    assert!(h[4].overloaded() < h[3].overloaded());
}

#[test]
fn overloads_never_fall_as_penetration_rises() {
    let b = build_benchmark();
    let base = &b.scenarios[0].scenario;
    let mut last = 0;
    for pen in [0.0, 0.05, 0.10, 0.15, 0.20, 0.25] {
        let mut s = base.clone();
        s.penetration = pen;
        let out = evaluate_at(&b.network, &s, &b.profiles, ANALYSIS_SLOT).unwrap();
        let n = out.report.histogram.overloaded();
        assert!(n >= last, "{pen}: {n} < {last}");
        last = n;
    }
}

#[test]
fn ten_percent_overloads_two_lines_and_a_transformer() {
    let report = outcome(&build_benchmark(), "ev10");
    let over = congested_elements(&report.branches, 100.0).unwrap();
    let ids: BTreeSet<&str> = over.iter().map(|b| b.branch.as_str()).collect();
    assert_eq!(
        ids,
        BTreeSet::from([
            "Health Center -> Chrisholm Hall",
            "Byramian -> University Hall",
            "Manzanita Hall -> Parking B3",
        ])
    );
    let kinds: Vec<ElementKind> = over.iter().map(|b| b.kind).collect();
    assert_eq!(kinds.iter().filter(|k| **k == ElementKind::Line).count(), 2);
    assert_eq!(kinds.iter().filter(|k| **k == ElementKind::Transformer).count(), 1);
}

#[test]
fn pv_does_not_add_overloads() {
    let b = build_benchmark();
    let d = BinDeltas::between(&outcome(&b, "ev25").histogram, &outcome(&b, "ev25_pv").histogram);
    let [_, _, d100, d150] = d.reported();
    assert!(d100 <= 0 && d150 <= 0, "{d:?}");
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn committed_inputs_match_generated_inputs() {
    let dir = tempfile::tempdir().unwrap();
    write_benchmark_files(dir.path()).unwrap();
    let committed = common::fixtures().join("benchmark");
    let mut files = vec!["network.json".to_string()];
    for s in build_benchmark().scenarios {
        files.push(format!("scenarios/{}.json", s.key));
    }
    for id in ["campus_building", "ev_step", "pv_half_sine"] {
        files.push(format!("profiles/{id}.csv"));
    }
    for f in files {
        assert_eq!(read(&committed.join(&f)), read(&dir.path().join(&f)), "{f}");
    }
}

#[test]
fn committed_inputs_reemit_identically() {
    let root = common::fixtures().join("benchmark");
    let net_text = read(&root.join("network.json"));
    assert_eq!(emit_network(&parse_network_file(&net_text).unwrap()), net_text);
    for s in build_benchmark().scenarios {
        let text = read(&root.join(format!("scenarios/{}.json", s.key)));
        let parsed = parse_scenario_file(&text).unwrap();
        assert_eq!(parsed, s.scenario);
        assert_eq!(emit_scenario(&parsed), text);
    }
    for (id, profile) in build_benchmark().profiles {
        let text = read(&root.join(format!("profiles/{id}.csv")));
        let parsed = parse_profile_csv(&id, &text).unwrap();
        assert_eq!(parsed, profile);
        assert_eq!(emit_profile_csv(&parsed), text);
    }
}

#[test]
fn committed_reports_match_a_fresh_run() {
    let b = build_benchmark();
    let root = common::fixtures().join("benchmark").join("report");
    let summary = parse_summary(&read(&root.join("summary.csv")), ReportFormat::Csv).unwrap();
    let summary_json = parse_summary(&read(&root.join("summary.json")), ReportFormat::JsonText).unwrap();
    assert_eq!(summary.len(), b.scenarios.len());
    for (i, s) in b.scenarios.iter().enumerate() {
        let fresh = outcome(&b, s.key);
        let detail = parse_detail(&read(&root.join(format!("detail_{}.csv", s.key))), ReportFormat::Csv).unwrap();
        assert_eq!(detail.histogram, fresh.histogram, "{}", s.key);
        for (a, f) in detail.branches.iter().zip(&fresh.branches) {
            assert_eq!(a.branch, f.branch);
            assert_eq!(a.kind, f.kind);
            assert!((a.loading_percent - f.loading_percent).abs() < 1e-9, "{}", a.branch);
        }
        assert_eq!(summary[i].scenario, s.key);
        assert_eq!(summary[i].histogram.reported(), fresh.histogram.reported());
        assert_eq!(summary_json[i].histogram, fresh.histogram);
    }
}
