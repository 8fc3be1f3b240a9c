use gridstress::benchmark::{build_benchmark, Benchmark};
use gridstress::powerflow::{solve_newton_raphson, SolveOptions};
use gridstress::scenario::{
    build_injections, ev_connected_kw, ev_load_kw, run_sweep, ControllerKind, Scenario, StaggerController, SweepMode,
    SLOTS_PER_DAY,
};
use proptest::prelude::*;
use std::sync::OnceLock;

fn bench() -> &'static Benchmark {
    static B: OnceLock<Benchmark> = OnceLock::new();
    B.get_or_init(build_benchmark)
}

fn scenario(pen: f64, pv: bool, ctl: ControllerKind) -> Scenario {
    let mut s = bench().scenarios[0].scenario.clone();
    s.penetration = pen;
    s.pv_enabled = pv;
    s.controller = ctl;
    s
}

fn direct_slack_p(s: &Scenario, slot: usize) -> f64 {
    let b = bench();
    let inj = build_injections(&b.network, s, &b.profiles, slot).unwrap();
    let sol = solve_newton_raphson(&b.network, &inj, &SolveOptions::newton()).unwrap();
    assert!(sol.converged);
    sol.slack_injection.re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pv_never_raises_slack_import(slot in 0..SLOTS_PER_DAY, pen in 0.0..=0.25f64) {
        let without = direct_slack_p(&scenario(pen, false, ControllerKind::Null), slot);
        let with = direct_slack_p(&scenario(pen, true, ControllerKind::Null), slot);
        prop_assert!(with <= without + 1e-12, "slot {slot}: {with} > {without}");
    }

    #[test]
    fn null_sweep_matches_direct_solves(slots in proptest::collection::btree_set(0..SLOTS_PER_DAY, 1..6)) {
        let b = bench();
        let s = scenario(0.0, false, ControllerKind::Null);
        let slots: Vec<usize> = slots.into_iter().collect();
        let sweep = run_sweep(&b.network, &s, &b.profiles, &slots).unwrap();
        prop_assert_eq!(sweep.mode, SweepMode::Independent);
        prop_assert_eq!(sweep.intervals.len(), slots.len());
        for r in &sweep.intervals {
            let inj = build_injections(&b.network, &s, &b.profiles, r.interval).unwrap();
            let direct = solve_newton_raphson(&b.network, &inj, &SolveOptions::newton()).unwrap();
            for (a, d) in r.solution.voltages.iter().zip(&direct.voltages) {
                prop_assert!((a - d).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn ev_load_is_linear(a in 0.0..=0.5f64, b in 0.0..=0.5f64, cap in 0u32..2000, kw in 7.0..=19.0f64) {
        let sum = ev_load_kw(a + b, cap, kw).unwrap();
        let parts = ev_load_kw(a, cap, kw).unwrap() + ev_load_kw(b, cap, kw).unwrap();
        prop_assert!((sum - parts).abs() <= 1e-9 * sum.max(1.0));
        let doubled = ev_load_kw(a, 2 * cap, kw).unwrap();
        prop_assert!((doubled - 2.0 * ev_load_kw(a, cap, kw).unwrap()).abs() <= 1e-9 * doubled.max(1.0));
    }

    #[test]
    fn stagger_respects_group_cap_on_the_benchmark(pen in 0.01..=0.25f64, scale in proptest::collection::vec(0.0..=1.0f64, 12)) {
        let s = scenario(pen, false, ControllerKind::OneThirdStagger);
        let connected = ev_connected_kw(&s).unwrap();
        let mut c = StaggerController::new(&connected);
        for (t, f) in scale.iter().enumerate() {
            let demand = connected.iter().map(|(bus, kw)| (bus.clone(), kw * f)).collect();
            let step = c.step(t, &demand);
            prop_assert!(step.total_active() <= step.cap);
            for (bus, p) in &step.active {
                prop_assert_eq!(c.group_of(bus), Some(step.active_group));
                prop_assert!(p.kw() <= connected[bus] + 1e-6);
            }
            prop_assert!(c.ledger().is_balanced());
        }
    }
}

#[test]
fn one_interval_sweep_is_a_single_solve() {
    let b = bench();
    let s = scenario(0.25, true, ControllerKind::Null);
    let sweep = run_sweep(&b.network, &s, &b.profiles, &[36]).unwrap();
    let inj = build_injections(&b.network, &s, &b.profiles, 36).unwrap();
    let direct = solve_newton_raphson(&b.network, &inj, &SolveOptions::newton()).unwrap();
    assert_eq!(sweep.intervals.len(), 1);
    assert_eq!(sweep.intervals[0].solution, direct);
}

#[test]
fn stagger_sweep_is_sequential_and_balanced() {
    let b = bench();
    let s = scenario(0.25, true, ControllerKind::OneThirdStagger);
    let day: Vec<usize> = (0..SLOTS_PER_DAY).collect();
    let sweep = run_sweep(&b.network, &s, &b.profiles, &day).unwrap();
    assert_eq!(sweep.mode, SweepMode::Sequential);
    assert!(sweep.ledger.is_balanced());
    assert!(sweep.ledger.served_kwh() > 0.0);
    for r in &sweep.intervals {
        assert!(r.ev_served_kw <= r.ev_demand_kw.max(0.0) + ev_connected_kw(&s).unwrap().values().sum::<f64>());
    }
    // The step profile asks for 9 h of charging; a third of the lots at a
    // time cannot serve it all before midnight.
    assert!(sweep.ledger.served < sweep.ledger.demanded);
}

#[test]
fn stagger_lowers_peak_ev_draw() {
    let b = bench();
    let day: Vec<usize> = (0..SLOTS_PER_DAY).collect();
    let peak = |ctl| {
        let sweep = run_sweep(&b.network, &scenario(0.25, false, ctl), &b.profiles, &day).unwrap();
        sweep.intervals.iter().map(|r| r.ev_served_kw).fold(0.0, f64::max)
    };
    let null = peak(ControllerKind::Null);
    let staggered = peak(ControllerKind::OneThirdStagger);
    assert!(staggered < 0.5 * null, "{staggered} vs {null}");
}
