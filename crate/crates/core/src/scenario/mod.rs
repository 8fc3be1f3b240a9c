//! Scenario definition and the per-interval simulation loop.
//!
//! Each interval: injections are built from normalized building, EV and PV
//! profiles; the power flow is solved; the controller sees the solution and
//! may replace the EV demand; if it did, the interval is solved once more.

mod injections;
mod profile;
mod stagger;
mod sweep;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use injections::{
    build_injections, build_injections_with_ev, ev_connected_kw, ev_demand_kw, ev_load_kw, pv_injection_kw,
};
pub use profile::{
    ev_step_profile, normalize_profile, pv_half_sine_profile, slot_of_time, LoadProfile, SLOTS_PER_DAY, SLOT_HOURS,
};
pub use stagger::{DeferralLedger, Milliwatts, StaggerController, StaggerStep, STAGGER_GROUPS};
pub use sweep::{
    run_sweep, run_sweep_with, Controller, ControllerAction, Intervention, IntervalResult,
    NullController, SweepMode, SweepResult,
};

/// Allowed per-charger power range in kW.
pub const CHARGER_KW_RANGE: (f64, f64) = (7.0, 19.0);
pub const DEFAULT_CHARGER_KW: f64 = 10.0;

/// Profiles by id.
pub type ProfileSet = BTreeMap<String, LoadProfile>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    #[default]
    Null,
    OneThirdStagger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParkingLot {
    pub name: String,
    /// Stall count.
    pub capacity: u32,
    pub bus: String,
    /// Unity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_factor: Option<f64>,
}

impl ParkingLot {
    pub fn new(name: impl Into<String>, capacity: u32, bus: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            capacity,
            bus: bus.into(),
            power_factor: None,
        }
    }
}

/// Which profile drives which element.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bindings {
    /// Profile for every building load without a per-bus override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub building_profile: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bus_profiles: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ev_profile: Option<String>,
    /// Profile for PV sites that do not name their own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pv_profile: Option<String>,
    #[serde(default)]
    pub parking_lots: Vec<ParkingLot>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Fraction of parking stalls with an active charger.
    pub penetration: f64,
    pub per_charger_kw: f64,
    pub pv_enabled: bool,
    #[serde(default)]
    pub controller: ControllerKind,
    #[serde(default)]
    pub bindings: Bindings,
    /// Lifts the [`CHARGER_KW_RANGE`] check.
    #[serde(default, skip_serializing_if = "is_false")]
    pub allow_any_charger_kw: bool,
}

impl Scenario {
    pub fn new(penetration: f64, pv_enabled: bool, controller: ControllerKind, bindings: Bindings) -> Self {
        Self {
            penetration,
            per_charger_kw: DEFAULT_CHARGER_KW,
            pv_enabled,
            controller,
            bindings,
            allow_any_charger_kw: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.penetration) {
            return Err(Error::InvalidInput(format!(
                "penetration {} outside [0, 1]",
                self.penetration
            )));
        }
        let kw = self.per_charger_kw;
        let (lo, hi) = CHARGER_KW_RANGE;
        if !kw.is_finite() || kw < 0.0 {
            return Err(Error::InvalidInput(format!("per-charger power {kw} kW is not a valid power")));
        }
        if !self.allow_any_charger_kw && !(lo..=hi).contains(&kw) {
            return Err(Error::InvalidInput(format!(
                "per-charger power {kw} kW outside [{lo}, {hi}] kW; set allow_any_charger_kw to override"
            )));
        }
        for lot in &self.bindings.parking_lots {
            if lot.capacity == 0 {
                return Err(Error::InvalidInput(format!("parking lot `{}` has zero capacity", lot.name)));
            }
            if let Some(pf) = lot.power_factor {
                if !(pf > 0.0 && pf <= 1.0) {
                    return Err(Error::InvalidInput(format!(
                        "parking lot `{}` power factor {pf} outside (0, 1]",
                        lot.name
                    )));
                }
            }
        }
        Ok(())
    }
}
