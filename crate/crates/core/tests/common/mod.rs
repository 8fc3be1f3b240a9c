#![allow(dead_code)]

use std::path::PathBuf;

use gridstress::network::{Branch, Bus, BusKind, CableType, Generator, NominalLoad, Network};
use gridstress::powerflow::InjectionSet;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5EED_2024;

/// Seed for generated test inputs; `GRIDSTRESS_SEED` overrides the default.
pub fn seed() -> u64 {
    std::env::var("GRIDSTRESS_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

/// A random radial case: network on a 1 kV / 1 MVA base (so ohms equal
/// per-unit) and its load injections.
pub struct RadialCase {
    pub net: Network,
    pub inj: InjectionSet,
}

/// Radial network of `3..=10` buses. Each bus after the first hangs off a
/// uniformly chosen earlier bus; series R and X are drawn from
/// `[0.005, 0.1]` pu and loads P and Q from `[0, 0.5]` pu.
pub fn random_radial(rng: &mut impl Rng) -> RadialCase {
    let n = rng.random_range(3..=10);
    let mut catalog = Vec::new();
    let mut branches = Vec::new();
    let mut buses = vec![Bus::new("b0", BusKind::Slack, 1.0, NominalLoad::default())];
    let mut loads = vec![Complex64::new(0.0, 0.0)];
    for k in 1..n {
        let parent = rng.random_range(0..k);
        let r = rng.random_range(0.005..=0.1);
        let x = rng.random_range(0.005..=0.1);
        catalog.push(CableType::new(format!("c{k}"), r, x));
        branches.push(Branch::cable(format!("b{parent}"), format!("b{k}"), format!("c{k}"), 1.0, 1000.0));
        buses.push(Bus::new(format!("b{k}"), BusKind::Load, 1.0, NominalLoad::default()));
        let p = rng.random_range(0.0..=0.5);
        let q = rng.random_range(0.0..=0.5);
        loads.push(-Complex64::new(p, q));
    }
    let net = Network::new(1.0, catalog, buses, branches, vec![Generator::grid_supply("b0", 1000.0)]);
    RadialCase {
        net,
        inj: InjectionSet::new(loads).expect("finite"),
    }
}

/// Largest differences in voltage magnitude and angle between two solutions.
pub fn max_deviation(a: &[Complex64], b: &[Complex64]) -> (f64, f64) {
    a.iter().zip(b).fold((0.0f64, 0.0f64), |(dv, da), (x, y)| {
        (dv.max((x.norm() - y.norm()).abs()), da.max((x.arg() - y.arg()).abs()))
    })
}

/// `slack + sum of other injections - losses`; zero when power balances.
pub fn balance_residual(net: &Network, inj: &InjectionSet, sol: &gridstress::powerflow::PowerFlowSolution) -> f64 {
    let slack = net.slack_index().expect("slack bus");
    let others: Complex64 = inj
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != slack)
        .map(|(_, s)| *s)
        .sum();
    (sol.slack_injection + others - gridstress::powerflow::total_losses(sol)).norm()
}
