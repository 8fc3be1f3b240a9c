use std::collections::BTreeMap;

use super::{LoadProfile, ProfileSet, Scenario};
use crate::error::{Error, Result};
use crate::network::{reactive_for_power_factor, Generator, GeneratorKind, Network};
use crate::powerflow::InjectionSet;

/// Aggregate EV demand of a lot: `penetration * capacity * per_charger_kw`,
/// continuous (no rounding to whole chargers).
pub fn ev_load_kw(penetration: f64, capacity: u32, per_charger_kw: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&penetration) {
        return Err(Error::InvalidInput(format!("penetration {penetration} outside [0, 1]")));
    }
    if !per_charger_kw.is_finite() || per_charger_kw < 0.0 {
        return Err(Error::InvalidInput(format!("per-charger power {per_charger_kw} kW is invalid")));
    }
    Ok(penetration * capacity as f64 * per_charger_kw)
}

/// PV output of `site` in kW at `slot`: capacity times the profile coefficient.
pub fn pv_injection_kw(site: &Generator, profile: &LoadProfile, slot: usize) -> Result<f64> {
    if site.kind != GeneratorKind::PvSite {
        return Err(Error::InvalidInput(format!("generator at `{}` is not a PV site", site.bus)));
    }
    Ok(site.capacity * profile.at(slot)?)
}

fn lookup<'a>(profiles: &'a ProfileSet, id: &str, what: &str) -> Result<&'a LoadProfile> {
    profiles
        .get(id)
        .ok_or_else(|| Error::Configuration(format!("{what} is bound to unknown profile `{id}`")))
}

/// EV power per bus with every charger drawing full power.
pub fn ev_connected_kw(scenario: &Scenario) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for lot in &scenario.bindings.parking_lots {
        let kw = ev_load_kw(scenario.penetration, lot.capacity, scenario.per_charger_kw)?;
        *out.entry(lot.bus.clone()).or_insert(0.0) += kw;
    }
    Ok(out)
}

/// Reactive-to-active ratio of the EV load at each bus, from lot power factors.
fn ev_reactive_ratio(scenario: &Scenario) -> Result<BTreeMap<String, f64>> {
    let mut sums: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for lot in &scenario.bindings.parking_lots {
        let p = ev_load_kw(scenario.penetration, lot.capacity, scenario.per_charger_kw)?;
        let q = reactive_for_power_factor(p, lot.power_factor.unwrap_or(1.0));
        let entry = sums.entry(lot.bus.clone()).or_insert((0.0, 0.0));
        entry.0 += p;
        entry.1 += q;
    }
    Ok(sums
        .into_iter()
        .map(|(bus, (p, q))| (bus, if p > 0.0 { q / p } else { 0.0 }))
        .collect())
}

/// EV demand per bus at `interval`: connected power times the EV profile.
pub fn ev_demand_kw(scenario: &Scenario, profiles: &ProfileSet, interval: usize) -> Result<BTreeMap<String, f64>> {
    let connected = ev_connected_kw(scenario)?;
    if connected.values().all(|&kw| kw == 0.0) {
        return Ok(connected);
    }
    let id = scenario
        .bindings
        .ev_profile
        .as_deref()
        .ok_or_else(|| Error::Configuration("EV load present but no EV profile is bound".into()))?;
    let coeff = lookup(profiles, id, "EV load")?.at(interval)?;
    Ok(connected.into_iter().map(|(bus, kw)| (bus, kw * coeff)).collect())
}

/// Net per-bus injections for `interval` with the EV demand the profiles call for.
pub fn build_injections(net: &Network, scenario: &Scenario, profiles: &ProfileSet, interval: usize) -> Result<InjectionSet> {
    let ev = ev_demand_kw(scenario, profiles, interval)?;
    build_injections_with_ev(net, scenario, profiles, interval, &ev)
}

/// Net per-bus injections with an explicit EV power per bus (kW), as left
/// after a controller intervention:
/// `-(building load * coefficient) - EV + PV`, in per-unit.
pub fn build_injections_with_ev(
    net: &Network,
    scenario: &Scenario,
    profiles: &ProfileSet,
    interval: usize,
    ev_kw: &BTreeMap<String, f64>,
) -> Result<InjectionSet> {
    scenario.validate()?;
    let bindings = &scenario.bindings;
    for bus in bindings.bus_profiles.keys() {
        if net.bus_index(bus).is_none() {
            return Err(Error::Configuration(format!("profile binding names unknown bus `{bus}`")));
        }
    }

    let mut inj = InjectionSet::zeros(net.bus_count());
    for (i, bus) in net.buses().iter().enumerate() {
        let load = bus.nominal_load;
        if load.is_zero() {
            continue;
        }
        let id = bindings
            .bus_profiles
            .get(&bus.id)
            .or(bindings.building_profile.as_ref())
            .ok_or_else(|| Error::Configuration(format!("no profile bound for the load at bus `{}`", bus.id)))?;
        let coeff = lookup(profiles, id, &format!("load at bus `{}`", bus.id))?.at(interval)?;
        inj.add(i, -net.kw_to_pu(load.p_kw * coeff, load.reactive_kvar() * coeff));
    }

    let ratios = ev_reactive_ratio(scenario)?;
    for (bus, &kw) in ev_kw {
        let i = net
            .bus_index(bus)
            .ok_or_else(|| Error::Configuration(format!("EV load attached to unknown bus `{bus}`")))?;
        if !kw.is_finite() || kw < 0.0 {
            return Err(Error::InvalidInput(format!("EV power {kw} kW at `{bus}` is invalid")));
        }
        let ratio = ratios.get(bus).copied().unwrap_or(0.0);
        inj.add(i, -net.kw_to_pu(kw, kw * ratio));
    }

    if scenario.pv_enabled {
        for gen in net.generators().iter().filter(|g| g.kind == GeneratorKind::PvSite) {
            let i = net
                .bus_index(&gen.bus)
                .ok_or_else(|| Error::Configuration(format!("PV site at unknown bus `{}`", gen.bus)))?;
            let id = gen.profile.as_ref().or(bindings.pv_profile.as_ref()).ok_or_else(|| {
                Error::Configuration(format!("missing profile binding for the PV site at `{}`", gen.bus))
            })?;
            let profile = lookup(profiles, id, &format!("PV site at `{}`", gen.bus))?;
            let kw = pv_injection_kw(gen, profile, interval)?;
            let kvar = reactive_for_power_factor(kw, gen.power_factor.unwrap_or(1.0));
            inj.add(i, net.kw_to_pu(kw, kvar));
        }
    }

    Ok(inj)
}
