use std::collections::BTreeMap;

use super::{
    build_injections_with_ev, ev_connected_kw, ev_demand_kw, ControllerKind, DeferralLedger, Milliwatts,
    ProfileSet, Scenario, StaggerController,
};
use crate::error::Result;
use crate::network::Network;
use crate::powerflow::{solve_newton_raphson, PowerFlowSolution, SolveOptions};

#[derive(Debug, Clone, PartialEq)]
pub enum ControllerAction {
    /// EV power connected at a bus this interval.
    Connect { bus: String, kw: f64 },
    /// Demand pushed to later intervals.
    Defer { bus: String, kw: f64 },
    /// Previously deferred demand served this interval.
    Drain { bus: String, kw: f64 },
}

/// Replacement EV power per bus plus a log of what the controller did.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Intervention {
    pub ev_kw: BTreeMap<String, f64>,
    pub actions: Vec<ControllerAction>,
}

/// Decision step of the loop: sees the EV demand and the solved state for an
/// interval, and may replace the EV demand.
pub trait Controller {
    /// A stateful controller carries information between intervals, which
    /// forces sequential evaluation.
    fn is_stateful(&self) -> bool;

    fn intervene(
        &mut self,
        interval: usize,
        ev_demand_kw: &BTreeMap<String, f64>,
        solution: &PowerFlowSolution,
    ) -> Option<Intervention>;

    /// Energy ledger so far, if the controller keeps one.
    fn ledger(&self) -> Option<DeferralLedger> {
        None
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NullController;

impl Controller for NullController {
    fn is_stateful(&self) -> bool {
        false
    }

    fn intervene(&mut self, _: usize, _: &BTreeMap<String, f64>, _: &PowerFlowSolution) -> Option<Intervention> {
        None
    }
}

impl Controller for StaggerController {
    fn is_stateful(&self) -> bool {
        true
    }

    fn intervene(
        &mut self,
        interval: usize,
        ev_demand_kw: &BTreeMap<String, f64>,
        _solution: &PowerFlowSolution,
    ) -> Option<Intervention> {
        let step = self.step(interval, ev_demand_kw);
        let mut actions = Vec::new();
        for (bus, p) in &step.active {
            actions.push(ControllerAction::Connect {
                bus: bus.clone(),
                kw: p.kw(),
            });
        }
        for (bus, p) in &step.drained {
            actions.push(ControllerAction::Drain {
                bus: bus.clone(),
                kw: p.kw(),
            });
        }
        for (bus, p) in &step.deferred {
            actions.push(ControllerAction::Defer {
                bus: bus.clone(),
                kw: p.kw(),
            });
        }
        let ev_kw = ev_demand_kw
            .keys()
            .map(|bus| (bus.clone(), step.active.get(bus).map(|p| p.kw()).unwrap_or(0.0)))
            .collect();
        Some(Intervention { ev_kw, actions })
    }

    fn ledger(&self) -> Option<DeferralLedger> {
        Some(StaggerController::ledger(self))
    }
}

/// Whether intervals were free to be evaluated independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// No state crosses intervals; evaluation order does not matter.
    Independent,
    /// The controller carries state between intervals; evaluated in order.
    Sequential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalResult {
    pub interval: usize,
    /// Final solution for the interval (after any intervention).
    pub solution: PowerFlowSolution,
    /// Solution before the intervention, kept when the interval was re-solved.
    pub before_intervention: Option<PowerFlowSolution>,
    pub actions: Vec<ControllerAction>,
    /// Total EV demand the profiles asked for, kW.
    pub ev_demand_kw: f64,
    /// Total EV power actually connected, kW.
    pub ev_served_kw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub mode: SweepMode,
    pub intervals: Vec<IntervalResult>,
    pub ledger: DeferralLedger,
}

impl SweepResult {
    pub fn diverged(&self) -> Vec<usize> {
        self.intervals
            .iter()
            .filter(|r| !r.solution.converged)
            .map(|r| r.interval)
            .collect()
    }

    pub fn get(&self, interval: usize) -> Option<&IntervalResult> {
        self.intervals.iter().find(|r| r.interval == interval)
    }
}

/// Runs the loop over `intervals` with the controller named by the scenario
/// and default Newton-Raphson settings. Divergence is recorded per interval
/// and does not stop the sweep.
pub fn run_sweep(net: &Network, scenario: &Scenario, profiles: &ProfileSet, intervals: &[usize]) -> Result<SweepResult> {
    let opts = SolveOptions::newton();
    match scenario.controller {
        ControllerKind::Null => run_independent(net, scenario, profiles, intervals, &opts),
        ControllerKind::OneThirdStagger => {
            let mut controller = StaggerController::new(&ev_connected_kw(scenario)?);
            run_sweep_with(net, scenario, profiles, intervals, &mut controller, &opts)
        }
    }
}

fn total(map: &BTreeMap<String, f64>) -> f64 {
    map.values().sum()
}

fn served_ledger(ev: &BTreeMap<String, f64>) -> i64 {
    ev.values().map(|&kw| Milliwatts::from_kw(kw).0).sum()
}

fn solve_plain(
    net: &Network,
    scenario: &Scenario,
    profiles: &ProfileSet,
    interval: usize,
    opts: &SolveOptions,
) -> Result<(IntervalResult, i64)> {
    let ev = ev_demand_kw(scenario, profiles, interval)?;
    let inj = build_injections_with_ev(net, scenario, profiles, interval, &ev)?;
    let solution = solve_newton_raphson(net, &inj, opts)?;
    let demand = total(&ev);
    Ok((
        IntervalResult {
            interval,
            solution,
            before_intervention: None,
            actions: Vec::new(),
            ev_demand_kw: demand,
            ev_served_kw: demand,
        },
        served_ledger(&ev),
    ))
}

fn run_independent(
    net: &Network,
    scenario: &Scenario,
    profiles: &ProfileSet,
    intervals: &[usize],
    opts: &SolveOptions,
) -> Result<SweepResult> {
    #[cfg(feature = "parallel")]
    let results: Vec<Result<(IntervalResult, i64)>> = {
        use rayon::prelude::*;
        intervals
            .par_iter()
            .map(|&t| solve_plain(net, scenario, profiles, t, opts))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<(IntervalResult, i64)>> = intervals
        .iter()
        .map(|&t| solve_plain(net, scenario, profiles, t, opts))
        .collect();

    let mut ledger = DeferralLedger::default();
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        let (result, energy) = r?;
        ledger.demanded += energy;
        ledger.served += energy;
        out.push(result);
    }
    Ok(SweepResult {
        mode: SweepMode::Independent,
        intervals: out,
        ledger,
    })
}

/// Runs the loop in interval order with an explicit controller.
pub fn run_sweep_with(
    net: &Network,
    scenario: &Scenario,
    profiles: &ProfileSet,
    intervals: &[usize],
    controller: &mut dyn Controller,
    opts: &SolveOptions,
) -> Result<SweepResult> {
    let mode = if controller.is_stateful() {
        SweepMode::Sequential
    } else {
        SweepMode::Independent
    };
    let mut ledger = DeferralLedger::default();
    let mut out = Vec::with_capacity(intervals.len());
    for &interval in intervals {
        let ev = ev_demand_kw(scenario, profiles, interval)?;
        let inj = build_injections_with_ev(net, scenario, profiles, interval, &ev)?;
        let first = solve_newton_raphson(net, &inj, opts)?;
        let demand = total(&ev);

        let result = match controller.intervene(interval, &ev, &first) {
            Some(intervention) if intervention.ev_kw != ev => {
                if controller.ledger().is_none() {
                    // Stateless curtailment: whatever is not served is lost.
                    let asked = served_ledger(&ev);
                    let given = served_ledger(&intervention.ev_kw);
                    ledger.demanded += asked;
                    ledger.served += given;
                    ledger.queued += asked - given;
                }
                let inj = build_injections_with_ev(net, scenario, profiles, interval, &intervention.ev_kw)?;
                let solution = solve_newton_raphson(net, &inj, opts)?;
                IntervalResult {
                    interval,
                    solution,
                    before_intervention: Some(first),
                    actions: intervention.actions,
                    ev_demand_kw: demand,
                    ev_served_kw: total(&intervention.ev_kw),
                }
            }
            other => {
                if controller.ledger().is_none() {
                    let energy = served_ledger(&ev);
                    ledger.demanded += energy;
                    ledger.served += energy;
                }
                IntervalResult {
                    interval,
                    solution: first,
                    before_intervention: None,
                    actions: other.map(|i| i.actions).unwrap_or_default(),
                    ev_demand_kw: demand,
                    ev_served_kw: demand,
                }
            }
        };
        out.push(result);
    }
    if let Some(l) = controller.ledger() {
        ledger = l;
    }
    Ok(SweepResult {
        mode,
        intervals: out,
        ledger,
    })
}
