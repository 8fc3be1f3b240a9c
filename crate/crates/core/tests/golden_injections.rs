//! Per-bus injections of the 25 % EV scenario at 09:00, frozen to a file.
//! Set `GRIDSTRESS_BLESS=1` to rewrite the file after an intended change.

mod common;

use gridstress::benchmark::{build_benchmark, ANALYSIS_SLOT};
use gridstress::io::{emit_injections, parse_injections};
use gridstress::scenario::build_injections;

fn current() -> String {
    let b = build_benchmark();
    let s = b.scenarios.iter().find(|s| s.key == "ev25").unwrap();
    let inj = build_injections(&b.network, &s.scenario, &b.profiles, ANALYSIS_SLOT).unwrap();
    emit_injections(&b.network, &inj)
}

#[test]
fn injections_match_golden_file() {
    let path = common::fixtures().join("golden_injections_slot36_ev25.csv");
    let text = current();
    if std::env::var_os("GRIDSTRESS_BLESS").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let golden = std::fs::read_to_string(&path).expect("golden file present");
    let want = parse_injections(&golden).unwrap();
    let got = parse_injections(&text).unwrap();
    assert_eq!(want.keys().collect::<Vec<_>>(), got.keys().collect::<Vec<_>>());
    for (bus, (p, q)) in &want {
        let (gp, gq) = got[bus];
        assert!((p - gp).abs() < 1e-12 && (q - gq).abs() < 1e-12, "{bus}: ({gp}, {gq}) vs ({p}, {q})");
    }
}

/// Three rows recomputed by hand from the lot table and building loads.
#[test]
fn audited_rows() {
    let rows = parse_injections(&current()).unwrap();
    let check = |bus: &str, p: f64, q: f64| {
        let (gp, gq) = rows[bus];
        assert!((gp - p).abs() < 1e-12, "{bus} P {gp}");
        assert!((gq - q).abs() < 1e-12, "{bus} Q {gq}");
    };
    // B3 500 + B3 Structure 1760 stalls at 25 % and 10 kW, plus building load.
    check("Parking B3", -0.56808, -0.0010123470439508985);
    check("E6 Mathador Hall", -0.16774, -0.00665256628882019);
    check("Student REC", -0.0308, -0.010123470439508985);
    check("DWP Pole", 0.0, 0.0);
}
