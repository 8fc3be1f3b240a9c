//! One-third stagger: EV buses are split into three fixed groups and only
//! one group charges per interval. Demand from the other groups is queued
//! and drained first-in first-out when their group's turn comes.
//!
//! Accounting is done in integer milliwatts so that
//! `served + unserved == demanded` holds exactly over any horizon.

use std::collections::{BTreeMap, VecDeque};

use super::SLOT_HOURS;

pub const STAGGER_GROUPS: usize = 3;

/// Power in integer milliwatts. One slot at this power is the unit of
/// energy in the stagger ledger.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Milliwatts(pub i64);

impl Milliwatts {
    /// Rounds a non-negative kW value to the nearest milliwatt.
    pub fn from_kw(kw: f64) -> Self {
        assert!(kw.is_finite() && kw >= 0.0, "EV demand must be a non-negative finite kW value, got {kw}");
        Milliwatts((kw * 1e6).round() as i64)
    }

    pub fn kw(self) -> f64 {
        self.0 as f64 / 1e6
    }

    /// Energy of this power held for `slots` 15-minute slots, in kWh.
    pub fn kwh_over(self, slots: usize) -> f64 {
        self.kw() * SLOT_HOURS * slots as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Deferral {
    origin: usize,
    remaining: i64,
}

/// Cumulative energy totals in milliwatt-slots.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeferralLedger {
    pub demanded: i64,
    pub served: i64,
    /// Energy still queued; unserved if the horizon ends here.
    pub queued: i64,
}

impl DeferralLedger {
    pub fn is_balanced(&self) -> bool {
        self.served + self.queued == self.demanded
    }

    pub fn demanded_kwh(&self) -> f64 {
        Milliwatts(self.demanded).kwh_over(1)
    }

    pub fn served_kwh(&self) -> f64 {
        Milliwatts(self.served).kwh_over(1)
    }

    pub fn queued_kwh(&self) -> f64 {
        Milliwatts(self.queued).kwh_over(1)
    }
}

/// Outcome of one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggerStep {
    pub interval: usize,
    pub active_group: usize,
    /// Power each EV bus draws this interval. Buses outside the active group draw zero.
    pub active: BTreeMap<String, Milliwatts>,
    /// Demand newly queued this interval per bus.
    pub deferred: BTreeMap<String, Milliwatts>,
    /// Queued energy served this interval per bus (from earlier intervals).
    pub drained: BTreeMap<String, Milliwatts>,
    /// Upper bound on total active power: the connected power of the active group.
    pub cap: Milliwatts,
}

impl StaggerStep {
    pub fn total_active(&self) -> Milliwatts {
        Milliwatts(self.active.values().map(|m| m.0).sum())
    }

    pub fn active_kw(&self) -> BTreeMap<String, f64> {
        self.active.iter().map(|(b, m)| (b.clone(), m.kw())).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaggerController {
    groups: BTreeMap<String, usize>,
    caps: BTreeMap<String, Milliwatts>,
    queues: BTreeMap<String, VecDeque<Deferral>>,
    ledger: DeferralLedger,
}

impl StaggerController {
    /// `connected_kw` is each EV bus's power with all chargers running; it
    /// caps what the bus may draw when its group is active. Groups are
    /// assigned round-robin over bus ids in sorted order.
    pub fn new(connected_kw: &BTreeMap<String, f64>) -> Self {
        let groups = connected_kw
            .keys()
            .enumerate()
            .map(|(k, bus)| (bus.clone(), k % STAGGER_GROUPS))
            .collect();
        let caps = connected_kw
            .iter()
            .map(|(bus, &kw)| (bus.clone(), Milliwatts::from_kw(kw)))
            .collect();
        let queues = connected_kw.keys().map(|bus| (bus.clone(), VecDeque::new())).collect();
        Self {
            groups,
            caps,
            queues,
            ledger: DeferralLedger::default(),
        }
    }

    pub fn group_of(&self, bus: &str) -> Option<usize> {
        self.groups.get(bus).copied()
    }

    pub fn ledger(&self) -> DeferralLedger {
        self.ledger
    }

    /// Queued energy per bus, oldest first, as `(origin interval, mW-slots)`.
    pub fn queue(&self, bus: &str) -> Vec<(usize, Milliwatts)> {
        self.queues
            .get(bus)
            .map(|q| q.iter().map(|d| (d.origin, Milliwatts(d.remaining))).collect())
            .unwrap_or_default()
    }

    /// Demand for buses not registered at construction is ignored: it has
    /// no group and no cap.
    pub fn step(&mut self, interval: usize, demand_kw: &BTreeMap<String, f64>) -> StaggerStep {
        let active_group = interval % STAGGER_GROUPS;
        let mut step = StaggerStep {
            interval,
            active_group,
            active: BTreeMap::new(),
            deferred: BTreeMap::new(),
            drained: BTreeMap::new(),
            cap: Milliwatts(0),
        };

        for (bus, group) in &self.groups {
            let queue = self.queues.get_mut(bus).expect("queue per bus");
            let demand = demand_kw.get(bus).map(|&kw| Milliwatts::from_kw(kw)).unwrap_or_default();
            if demand.0 > 0 {
                queue.push_back(Deferral {
                    origin: interval,
                    remaining: demand.0,
                });
                self.ledger.demanded += demand.0;
                self.ledger.queued += demand.0;
            }

            let mut served_now = 0i64;
            let mut served_old = 0i64;
            if *group == active_group {
                let cap = self.caps[bus].0;
                step.cap.0 += cap;
                let mut budget = cap;
                while budget > 0 {
                    let Some(front) = queue.front_mut() else { break };
                    let take = front.remaining.min(budget);
                    front.remaining -= take;
                    budget -= take;
                    if front.origin == interval {
                        served_now += take;
                    } else {
                        served_old += take;
                    }
                    if front.remaining == 0 {
                        queue.pop_front();
                    }
                }
            }
            let served = served_now + served_old;
            self.ledger.served += served;
            self.ledger.queued -= served;

            if served > 0 {
                step.active.insert(bus.clone(), Milliwatts(served));
            }
            if served_old > 0 {
                step.drained.insert(bus.clone(), Milliwatts(served_old));
            }
            let deferred = demand.0 - served_now;
            if deferred > 0 {
                step.deferred.insert(bus.clone(), Milliwatts(deferred));
            }
        }
        step
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kw_map(items: &[(&str, f64)]) -> BTreeMap<String, f64> {
        items.iter().map(|(b, kw)| (b.to_string(), *kw)).collect()
    }

    #[test]
    fn groups_are_round_robin_over_sorted_ids() {
        let c = StaggerController::new(&kw_map(&[("d", 1.0), ("a", 1.0), ("c", 1.0), ("b", 1.0)]));
        assert_eq!(c.group_of("a"), Some(0));
        assert_eq!(c.group_of("b"), Some(1));
        assert_eq!(c.group_of("c"), Some(2));
        assert_eq!(c.group_of("d"), Some(0));
    }

    #[test]
    fn three_buses_one_rotation() {
        // Each bus demands 100 kW every interval and is capped at 100 kW.
        let demand = kw_map(&[("a", 100.0), ("b", 100.0), ("c", 100.0)]);
        let mut c = StaggerController::new(&demand);
        for t in 0..3 {
            let step = c.step(t, &demand);
            assert_eq!(step.total_active(), Milliwatts::from_kw(100.0));
            assert_eq!(step.active.len(), 1);
            assert_eq!(step.cap, Milliwatts::from_kw(100.0));
        }
        // Served over one rotation: one interval's worth of demand from each bus.
        let l = c.ledger();
        assert_eq!(l.served, 3 * Milliwatts::from_kw(100.0).0);
        assert_eq!(l.demanded, 9 * Milliwatts::from_kw(100.0).0);
        assert_eq!(l.queued, 6 * Milliwatts::from_kw(100.0).0);
        assert!(l.is_balanced());
    }

    #[test]
    fn single_bus_is_active_every_third_interval() {
        let demand = kw_map(&[("only", 90.0)]);
        let mut c = StaggerController::new(&demand);
        let mut active_at = Vec::new();
        for t in 0..9 {
            let step = c.step(t, &demand);
            if step.total_active().0 > 0 {
                active_at.push(t);
                assert_eq!(step.total_active(), Milliwatts::from_kw(90.0));
            }
        }
        assert_eq!(active_at, vec![0, 3, 6]);
        let l = c.ledger();
        // Two thirds of the demand is still queued, i.e. unserved at the horizon.
        assert_eq!(l.queued * 3, l.demanded * 2);
        assert!(l.is_balanced());
    }

    #[test]
    fn queue_drains_oldest_first_once_demand_stops() {
        let cap = kw_map(&[("a", 100.0)]);
        let mut c = StaggerController::new(&cap);
        c.step(1, &cap); // inactive: queued, origin 1
        c.step(2, &cap); // inactive: queued, origin 2
        let idle = kw_map(&[("a", 0.0)]);
        let step = c.step(3, &idle);
        assert_eq!(step.total_active(), Milliwatts::from_kw(100.0));
        assert_eq!(step.drained["a"], Milliwatts::from_kw(100.0));
        assert_eq!(c.queue("a"), vec![(2, Milliwatts::from_kw(100.0))]);
    }

    #[test]
    fn zero_demand_produces_no_actions() {
        let mut c = StaggerController::new(&kw_map(&[("a", 100.0), ("b", 50.0)]));
        for t in 0..6 {
            let step = c.step(t, &kw_map(&[("a", 0.0), ("b", 0.0)]));
            assert!(step.active.is_empty() && step.deferred.is_empty() && step.drained.is_empty());
        }
        assert_eq!(c.ledger(), DeferralLedger::default());
    }

    proptest! {
        #[test]
        fn conservation_and_cap(
            caps in prop::collection::vec(0.0..5000.0f64, 1..8),
            table in prop::collection::vec(prop::collection::vec(0.0..5000.0f64, 8), 1..40),
        ) {
            let buses: Vec<String> = (0..caps.len()).map(|i| format!("bus{i}")).collect();
            let connected: BTreeMap<String, f64> = buses.iter().cloned().zip(caps.iter().copied()).collect();
            let mut c = StaggerController::new(&connected);
            for (t, row) in table.iter().enumerate() {
                let demand: BTreeMap<String, f64> = buses.iter().cloned().zip(row.iter().copied()).collect();
                let step = c.step(t, &demand);
                prop_assert!(step.total_active() <= step.cap);
                for (bus, p) in &step.active {
                    prop_assert!(*p <= Milliwatts::from_kw(connected[bus]));
                    prop_assert_eq!(c.group_of(bus), Some(t % STAGGER_GROUPS));
                }
                prop_assert!(c.ledger().is_balanced());
            }
        }
    }
}
