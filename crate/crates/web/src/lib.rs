//! WebAssembly bindings for the browser demo. Every export takes plain
//! numbers and returns a JSON string; the page in `www/` renders it.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use gridstress::benchmark::{build_benchmark, evaluate_at, Benchmark};
use gridstress::congestion::{congested_elements, CongestionHistogram};
use gridstress::network::{Branch, Bus, BusKind, CableType, Generator, Network, NominalLoad};
use gridstress::powerflow::{solve_newton_raphson, total_losses, InjectionSet, SolveOptions};
use gridstress::scenario::{run_sweep, ControllerKind, Scenario, SLOTS_PER_DAY};
use num_complex::Complex64;
use serde::Serialize;
use wasm_bindgen::prelude::*;

thread_local! {
    static BENCH: Benchmark = build_benchmark();
}

fn scenario(b: &Benchmark, penetration_percent: f64, pv: bool, load_management: bool) -> Result<Scenario, String> {
    if !(0.0..=100.0).contains(&penetration_percent) {
        return Err(format!("penetration {penetration_percent}% outside 0-100"));
    }
    let controller = if load_management {
        ControllerKind::OneThirdStagger
    } else {
        ControllerKind::Null
    };
    Ok(Scenario::new(
        penetration_percent / 100.0,
        pv,
        controller,
        b.scenarios[0].scenario.bindings.clone(),
    ))
}

#[derive(Debug, Serialize)]
struct Hot {
    branch: String,
    kind: &'static str,
    loading_percent: f64,
}

#[derive(Debug, Serialize)]
struct Snapshot {
    converged: bool,
    iterations: usize,
    min_voltage_pu: f64,
    slack_kw: f64,
    losses_kw: f64,
    histogram: CongestionHistogram,
    /// Branches at or above 80 %, most loaded first.
    congested: Vec<Hot>,
}

/// Solves the benchmark campus at one slot and bins its branch loadings.
pub fn snapshot_json(penetration_percent: f64, pv: bool, load_management: bool, slot: usize) -> Result<String, String> {
    BENCH.with(|b| {
        let s = scenario(b, penetration_percent, pv, load_management)?;
        let out = evaluate_at(&b.network, &s, &b.profiles, slot).map_err(|e| e.to_string())?;
        let kva = b.network.s_base_mva() * 1000.0;
        let congested = congested_elements(&out.report.branches, 80.0)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|l| Hot {
                branch: l.branch,
                kind: l.kind.as_str(),
                loading_percent: l.loading_percent,
            })
            .collect();
        let snap = Snapshot {
            converged: out.solution.converged,
            iterations: out.solution.iterations,
            min_voltage_pu: out.solution.min_voltage(),
            slack_kw: out.solution.slack_injection.re * kva,
            losses_kw: total_losses(&out.solution).re * kva,
            histogram: out.report.histogram,
            congested,
        };
        serde_json::to_string(&snap).map_err(|e| e.to_string())
    })
}

#[derive(Debug, Serialize)]
struct DayPoint {
    slot: usize,
    converged: bool,
    max_loading_percent: f64,
    overloaded: usize,
    ev_demand_kw: f64,
    ev_served_kw: f64,
}

/// Runs the whole day and returns one point per 15-minute slot.
pub fn daily_curve_json(penetration_percent: f64, pv: bool, load_management: bool) -> Result<String, String> {
    BENCH.with(|b| {
        let s = scenario(b, penetration_percent, pv, load_management)?;
        let day: Vec<usize> = (0..SLOTS_PER_DAY).collect();
        let sweep = run_sweep(&b.network, &s, &b.profiles, &day).map_err(|e| e.to_string())?;
        let points: Vec<DayPoint> = sweep
            .intervals
            .iter()
            .map(|r| DayPoint {
                slot: r.interval,
                converged: r.solution.converged,
                max_loading_percent: r.solution.max_loading(),
                overloaded: r.solution.flows.iter().filter(|f| f.loading_percent >= 100.0).count(),
                ev_demand_kw: r.ev_demand_kw,
                ev_served_kw: r.ev_served_kw,
            })
            .collect();
        serde_json::to_string(&points).map_err(|e| e.to_string())
    })
}

#[derive(Debug, Serialize)]
struct CurvePoint {
    load_pu: f64,
    voltage_pu: f64,
}

/// Receiving-end voltage of a single line (`r + jx` pu) as its load grows
/// from zero to `max_load_pu` at power factor `pf`, in `steps` steps. Stops
/// at the first load the solver cannot converge on.
pub fn voltage_curve_json(r: f64, x: f64, pf: f64, max_load_pu: f64, steps: usize) -> Result<String, String> {
    if !(r >= 0.0 && x > 0.0 && r.is_finite() && x.is_finite()) {
        return Err("line impedance needs r >= 0 and x > 0".into());
    }
    if !(pf > 0.0 && pf <= 1.0) {
        return Err(format!("power factor {pf} outside (0, 1]"));
    }
    if !(max_load_pu > 0.0 && max_load_pu.is_finite()) || steps == 0 || steps > 2000 {
        return Err("load range needs a positive maximum and 1-2000 steps".into());
    }
    // 1 kV, 1 MVA base: one mile of this cable is exactly `r + jx` pu.
    let net = Network::new(
        1.0,
        vec![CableType::new("line", r, x)],
        vec![
            Bus::new("source", BusKind::Slack, 1.0, NominalLoad::default()),
            Bus::new("load", BusKind::Load, 1.0, NominalLoad::default()),
        ],
        vec![Branch::cable("source", "load", "line", 1.0, 1000.0)],
        vec![Generator::grid_supply("source", 1000.0)],
    );
    let tan = (1.0 - pf * pf).sqrt() / pf;
    let mut points = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let p = max_load_pu * k as f64 / steps as f64;
        let inj = InjectionSet::new(vec![Complex64::new(0.0, 0.0), -Complex64::new(p, p * tan)])
            .map_err(|e| e.to_string())?;
        let sol = solve_newton_raphson(&net, &inj, &SolveOptions::newton()).map_err(|e| e.to_string())?;
        if !sol.converged {
            break;
        }
        points.push(CurvePoint {
            load_pu: p,
            voltage_pu: sol.voltages[1].norm(),
        });
    }
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn scenario_snapshot(penetration_percent: f64, pv: bool, load_management: bool, slot: usize) -> Result<String, JsValue> {
    snapshot_json(penetration_percent, pv, load_management, slot).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn daily_curve(penetration_percent: f64, pv: bool, load_management: bool) -> Result<String, JsValue> {
    daily_curve_json(penetration_percent, pv, load_management).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn voltage_curve(r: f64, x: f64, pf: f64, max_load_pu: f64, steps: usize) -> Result<String, JsValue> {
    voltage_curve_json(r, x, pf, max_load_pu, steps).map_err(|e| JsValue::from_str(&e))
}
