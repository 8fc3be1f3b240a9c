//! Electrical network data model.
//!
//! A [`Network`] holds buses, branches (cables and transformers), generators
//! and the system MVA base. Cable impedances are derived from a catalog of
//! per-mile values; transformer impedances from nameplate percent impedance
//! on the transformer's own rating. Everything is converted to per-unit on
//! the system base before it reaches the solver.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power factor applied to building loads that do not state a reactive part.
pub const DEFAULT_BUILDING_POWER_FACTOR: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BusKind {
    Slack,
    Load,
}

/// Metered building demand at a bus. When `q_kvar` is absent the reactive part
/// follows [`DEFAULT_BUILDING_POWER_FACTOR`] lagging.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NominalLoad {
    pub p_kw: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_kvar: Option<f64>,
}

impl NominalLoad {
    pub fn new(p_kw: f64) -> Self {
        Self { p_kw, q_kvar: None }
    }

    pub fn with_reactive(p_kw: f64, q_kvar: f64) -> Self {
        Self {
            p_kw,
            q_kvar: Some(q_kvar),
        }
    }

    pub fn reactive_kvar(&self) -> f64 {
        self.q_kvar
            .unwrap_or_else(|| reactive_for_power_factor(self.p_kw, DEFAULT_BUILDING_POWER_FACTOR))
    }

    pub fn is_zero(&self) -> bool {
        self.p_kw == 0.0 && self.reactive_kvar() == 0.0
    }
}

/// Reactive power (lagging) drawn alongside `p` at power factor `pf`.
pub fn reactive_for_power_factor(p: f64, pf: f64) -> f64 {
    if pf >= 1.0 {
        return 0.0;
    }
    p * (1.0 - pf * pf).sqrt() / pf
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: String,
    pub kind: BusKind,
    /// Line-to-line kV.
    pub base_voltage: f64,
    #[serde(default)]
    pub nominal_load: NominalLoad,
}

impl Bus {
    pub fn new(id: impl Into<String>, kind: BusKind, base_voltage: f64, load: NominalLoad) -> Self {
        Self {
            id: id.into(),
            kind,
            base_voltage,
            nominal_load: load,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CableType {
    pub name: String,
    pub ohms_per_mile: f64,
    pub reactance_per_mile: f64,
}

impl CableType {
    pub fn new(name: impl Into<String>, ohms_per_mile: f64, reactance_per_mile: f64) -> Self {
        Self {
            name: name.into(),
            ohms_per_mile,
            reactance_per_mile,
        }
    }
}

fn unit_tap() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BranchKind {
    Cable {
        cable_type: String,
        length_miles: f64,
    },
    Transformer {
        impedance_percent: f64,
        #[serde(default = "unit_tap")]
        tap: f64,
    },
}

/// Lines and transformers share one congestion histogram but keep their kind
/// in detail listings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementKind {
    Line,
    Transformer,
}

impl ElementKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ElementKind::Line => "line",
            ElementKind::Transformer => "transformer",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "line" => Some(ElementKind::Line),
            "transformer" => Some(ElementKind::Transformer),
            _ => None,
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub from: String,
    pub to: String,
    pub kind: BranchKind,
    /// Apparent-power limit in kVA.
    pub rating: f64,
}

impl Branch {
    pub fn cable(
        from: impl Into<String>,
        to: impl Into<String>,
        cable_type: impl Into<String>,
        length_miles: f64,
        rating_kva: f64,
    ) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            kind: BranchKind::Cable {
                cable_type: cable_type.into(),
                length_miles,
            },
            rating: rating_kva,
        }
    }

    pub fn transformer(
        from: impl Into<String>,
        to: impl Into<String>,
        impedance_percent: f64,
        rating_kva: f64,
    ) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            kind: BranchKind::Transformer {
                impedance_percent,
                tap: 1.0,
            },
            rating: rating_kva,
        }
    }

    /// Identifier used in reports: `"<from> -> <to>"`.
    pub fn id(&self) -> String {
        format!("{} -> {}", self.from, self.to)
    }

    pub fn element_kind(&self) -> ElementKind {
        match self.kind {
            BranchKind::Cable { .. } => ElementKind::Line,
            BranchKind::Transformer { .. } => ElementKind::Transformer,
        }
    }

    pub fn tap(&self) -> f64 {
        match self.kind {
            BranchKind::Cable { .. } => 1.0,
            BranchKind::Transformer { tap, .. } => tap,
        }
    }

    pub fn rating_mva(&self) -> f64 {
        self.rating / 1000.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    GridSupply,
    PvSite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub bus: String,
    pub kind: GeneratorKind,
    /// kW
    pub capacity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    /// Unity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_factor: Option<f64>,
}

impl Generator {
    pub fn grid_supply(bus: impl Into<String>, capacity_kw: f64) -> Self {
        Self {
            bus: bus.into(),
            kind: GeneratorKind::GridSupply,
            capacity: capacity_kw,
            profile: None,
            power_factor: None,
        }
    }

    pub fn pv_site(bus: impl Into<String>, capacity_kw: f64) -> Self {
        Self {
            bus: bus.into(),
            kind: GeneratorKind::PvSite,
            capacity: capacity_kw,
            profile: None,
            power_factor: None,
        }
    }
}

/// Immutable network container. Invalid content is representable so that
/// [`validate_network`] can report on it; solvers reject what they cannot use.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    s_base_mva: f64,
    cable_catalog: Vec<CableType>,
    buses: Vec<Bus>,
    branches: Vec<Branch>,
    generators: Vec<Generator>,
    bus_index: HashMap<String, usize>,
}

impl Network {
    pub fn new(
        s_base_mva: f64,
        cable_catalog: Vec<CableType>,
        buses: Vec<Bus>,
        branches: Vec<Branch>,
        generators: Vec<Generator>,
    ) -> Self {
        let mut bus_index = HashMap::with_capacity(buses.len());
        for (i, bus) in buses.iter().enumerate() {
            bus_index.entry(bus.id.clone()).or_insert(i);
        }
        Self {
            s_base_mva,
            cable_catalog,
            buses,
            branches,
            generators,
            bus_index,
        }
    }

    pub fn s_base_mva(&self) -> f64 {
        self.s_base_mva
    }

    pub fn cable_catalog(&self) -> &[CableType] {
        &self.cable_catalog
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    pub fn bus_index(&self, id: &str) -> Option<usize> {
        self.bus_index.get(id).copied()
    }

    pub fn bus(&self, id: &str) -> Option<&Bus> {
        self.bus_index(id).map(|i| &self.buses[i])
    }

    pub fn cable_type(&self, name: &str) -> Option<&CableType> {
        self.cable_catalog.iter().find(|c| c.name == name)
    }

    /// Index of the first slack bus.
    pub fn slack_index(&self) -> Option<usize> {
        self.buses.iter().position(|b| b.kind == BusKind::Slack)
    }

    /// Endpoint indices of a branch, or an error naming the missing bus.
    pub fn branch_endpoints(&self, branch: &Branch) -> Result<(usize, usize)> {
        let lookup = |id: &str| {
            self.bus_index(id).ok_or_else(|| {
                Error::InvalidInput(format!("branch `{}` references unknown bus `{id}`", branch.id()))
            })
        };
        Ok((lookup(&branch.from)?, lookup(&branch.to)?))
    }

    /// Series impedance of a branch in per-unit on the system base.
    pub fn series_impedance_pu(&self, branch: &Branch) -> Result<Complex64> {
        let (from, _) = self.branch_endpoints(branch)?;
        to_per_unit(branch, &self.cable_catalog, self.buses[from].base_voltage, self.s_base_mva)
    }

    /// Converts kW/kvar to a per-unit complex power on the system base.
    pub fn kw_to_pu(&self, p_kw: f64, q_kvar: f64) -> Complex64 {
        Complex64::new(p_kw, q_kvar) / (1000.0 * self.s_base_mva)
    }
}

/// Series impedance `R + jX` in ohms of `length_miles` of `cable`.
pub fn cable_impedance(cable: &CableType, length_miles: f64) -> Result<Complex64> {
    if !(length_miles >= 0.0) || !length_miles.is_finite() {
        return Err(Error::InvalidInput(format!(
            "cable length must be a non-negative number of miles, got {length_miles}"
        )));
    }
    Ok(Complex64::new(
        cable.ohms_per_mile * length_miles,
        cable.reactance_per_mile * length_miles,
    ))
}

/// Impedance base in ohms for a line-to-line kV and three-phase MVA base.
pub fn base_impedance_ohms(base_kv: f64, s_base_mva: f64) -> f64 {
    base_kv * base_kv / s_base_mva
}

pub fn ohms_to_per_unit(z_ohms: Complex64, base_kv: f64, s_base_mva: f64) -> Complex64 {
    z_ohms / base_impedance_ohms(base_kv, s_base_mva)
}

pub fn per_unit_to_ohms(z_pu: Complex64, base_kv: f64, s_base_mva: f64) -> Complex64 {
    z_pu * base_impedance_ohms(base_kv, s_base_mva)
}

/// Nameplate percent impedance on the transformer's own rating, re-expressed
/// on the system base as a pure reactance.
pub fn transformer_impedance_pu(impedance_percent: f64, rating_kva: f64, s_base_mva: f64) -> Complex64 {
    let rating_mva = rating_kva / 1000.0;
    Complex64::new(0.0, impedance_percent / 100.0 * s_base_mva / rating_mva)
}

/// Per-unit series impedance of `branch` given the base voltage of its
/// from-bus and the system MVA base.
pub fn to_per_unit(
    branch: &Branch,
    catalog: &[CableType],
    bus_base_kv: f64,
    s_base_mva: f64,
) -> Result<Complex64> {
    if !(s_base_mva > 0.0) {
        return Err(Error::InvalidInput(format!("system base must be positive, got {s_base_mva} MVA")));
    }
    if !(bus_base_kv > 0.0) {
        return Err(Error::InvalidInput(format!("bus base voltage must be positive, got {bus_base_kv} kV")));
    }
    match &branch.kind {
        BranchKind::Cable {
            cable_type,
            length_miles,
        } => {
            let cable = catalog.iter().find(|c| &c.name == cable_type).ok_or_else(|| {
                Error::InvalidInput(format!("branch `{}` uses unknown cable type `{cable_type}`", branch.id()))
            })?;
            let z = cable_impedance(cable, *length_miles)?;
            Ok(ohms_to_per_unit(z, bus_base_kv, s_base_mva))
        }
        BranchKind::Transformer { impedance_percent, .. } => {
            if !(branch.rating > 0.0) {
                return Err(Error::InvalidTransformer(branch.id()));
            }
            Ok(transformer_impedance_pu(*impedance_percent, branch.rating, s_base_mva))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    NoSlack,
    MultipleSlack,
    DuplicateBus,
    InvalidBaseVoltage,
    InvalidLoad,
    DanglingEndpoint,
    SelfLoop,
    DuplicateBranch,
    InvalidRating,
    UnknownCableType,
    InvalidCableType,
    NegativeLength,
    VoltageMismatch,
    InvalidTap,
    ZeroImpedance,
    Disconnected,
    InvalidSystemBase,
    InvalidGenerator,
    GridSupplyOffSlack,
}

impl ViolationKind {
    pub fn label(&self) -> &'static str {
        match self {
            ViolationKind::NoSlack => "no slack",
            ViolationKind::MultipleSlack => "multiple slack",
            ViolationKind::DuplicateBus => "duplicate bus",
            ViolationKind::InvalidBaseVoltage => "invalid base voltage",
            ViolationKind::InvalidLoad => "invalid load",
            ViolationKind::DanglingEndpoint => "dangling endpoint",
            ViolationKind::SelfLoop => "self loop",
            ViolationKind::DuplicateBranch => "duplicate branch",
            ViolationKind::InvalidRating => "invalid rating",
            ViolationKind::UnknownCableType => "unknown cable type",
            ViolationKind::InvalidCableType => "invalid cable type",
            ViolationKind::NegativeLength => "negative length",
            ViolationKind::VoltageMismatch => "voltage mismatch",
            ViolationKind::InvalidTap => "invalid tap",
            ViolationKind::ZeroImpedance => "zero impedance",
            ViolationKind::Disconnected => "disconnected",
            ViolationKind::InvalidSystemBase => "invalid system base",
            ViolationKind::InvalidGenerator => "invalid generator",
            ViolationKind::GridSupplyOffSlack => "grid supply off slack",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Offending element (bus id, branch id, cable name or generator label).
    pub element: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: `{}`", self.kind.label(), self.element)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Validation(self.violations.iter().map(|v| v.to_string()).collect()))
        }
    }

    fn push(&mut self, kind: ViolationKind, element: impl Into<String>, detail: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            element: element.into(),
            detail: detail.into(),
        });
    }
}

/// Checks every network invariant and lists the violations in a fixed order:
/// system base, cable catalog, buses, branches, generators, connectivity.
pub fn validate_network(net: &Network) -> ValidationReport {
    let mut report = ValidationReport::default();

    if !(net.s_base_mva > 0.0) || !net.s_base_mva.is_finite() {
        report.push(ViolationKind::InvalidSystemBase, "s_base_mva", format!("{} MVA", net.s_base_mva));
    }

    for cable in &net.cable_catalog {
        let r = cable.ohms_per_mile;
        let x = cable.reactance_per_mile;
        if !(r >= 0.0 && x >= 0.0) || (r == 0.0 && x == 0.0) || !r.is_finite() || !x.is_finite() {
            report.push(
                ViolationKind::InvalidCableType,
                &cable.name,
                format!("r = {r} ohm/mi, x = {x} ohm/mi"),
            );
        }
    }

    let slacks: Vec<&str> = net
        .buses
        .iter()
        .filter(|b| b.kind == BusKind::Slack)
        .map(|b| b.id.as_str())
        .collect();
    match slacks.len() {
        0 => report.push(ViolationKind::NoSlack, "network", ""),
        1 => {}
        _ => report.push(ViolationKind::MultipleSlack, slacks.join(", "), format!("{} slack buses", slacks.len())),
    }

    let mut seen = HashMap::new();
    for bus in &net.buses {
        if seen.insert(bus.id.as_str(), ()).is_some() {
            report.push(ViolationKind::DuplicateBus, &bus.id, "");
        }
        if !(bus.base_voltage > 0.0) || !bus.base_voltage.is_finite() {
            report.push(ViolationKind::InvalidBaseVoltage, &bus.id, format!("{} kV", bus.base_voltage));
        }
        let load = bus.nominal_load;
        if !load.p_kw.is_finite() || !load.reactive_kvar().is_finite() {
            report.push(ViolationKind::InvalidLoad, &bus.id, "non-finite load");
        }
    }

    let mut branch_ids = HashMap::new();
    for branch in &net.branches {
        let id = branch.id();
        let from = net.bus(&branch.from);
        let to = net.bus(&branch.to);
        for (end, bus) in [(&branch.from, from), (&branch.to, to)] {
            if bus.is_none() {
                report.push(ViolationKind::DanglingEndpoint, &id, format!("unknown bus `{end}`"));
            }
        }
        if branch.from == branch.to {
            report.push(ViolationKind::SelfLoop, &id, "");
        }
        let key = if branch.from <= branch.to {
            (branch.from.as_str(), branch.to.as_str())
        } else {
            (branch.to.as_str(), branch.from.as_str())
        };
        if branch_ids.insert(key, ()).is_some() {
            report.push(ViolationKind::DuplicateBranch, &id, "");
        }
        if !(branch.rating > 0.0) || !branch.rating.is_finite() {
            report.push(ViolationKind::InvalidRating, &id, format!("{} kVA", branch.rating));
        }
        match &branch.kind {
            BranchKind::Cable {
                cable_type,
                length_miles,
            } => {
                if !(*length_miles >= 0.0) || !length_miles.is_finite() {
                    report.push(ViolationKind::NegativeLength, &id, format!("{length_miles} mi"));
                }
                match net.cable_type(cable_type) {
                    None => report.push(ViolationKind::UnknownCableType, &id, cable_type.clone()),
                    Some(_) if *length_miles == 0.0 => {
                        report.push(ViolationKind::ZeroImpedance, &id, "zero length");
                    }
                    Some(_) => {}
                }
                if let (Some(f), Some(t)) = (from, to) {
                    if f.base_voltage != t.base_voltage {
                        report.push(
                            ViolationKind::VoltageMismatch,
                            &id,
                            format!("{} kV vs {} kV", f.base_voltage, t.base_voltage),
                        );
                    }
                }
            }
            BranchKind::Transformer { impedance_percent, tap } => {
                if !(*tap > 0.0) || !tap.is_finite() {
                    report.push(ViolationKind::InvalidTap, &id, format!("{tap}"));
                }
                if !(*impedance_percent > 0.0) || !impedance_percent.is_finite() {
                    report.push(ViolationKind::ZeroImpedance, &id, format!("{impedance_percent} %"));
                }
            }
        }
    }

    for (i, gen) in net.generators.iter().enumerate() {
        let label = format!("generator #{i} at `{}`", gen.bus);
        let Some(bus) = net.bus(&gen.bus) else {
            report.push(ViolationKind::DanglingEndpoint, label, format!("unknown bus `{}`", gen.bus));
            continue;
        };
        match gen.kind {
            GeneratorKind::PvSite => {
                if !(gen.capacity > 0.0) || !gen.capacity.is_finite() {
                    report.push(ViolationKind::InvalidGenerator, label, format!("capacity {} kW", gen.capacity));
                }
            }
            GeneratorKind::GridSupply => {
                if bus.kind != BusKind::Slack {
                    report.push(ViolationKind::GridSupplyOffSlack, label, "");
                }
            }
        }
        if let Some(pf) = gen.power_factor {
            if !(pf > 0.0 && pf <= 1.0) {
                report.push(ViolationKind::InvalidGenerator, format!("generator #{i} at `{}`", gen.bus), format!("power factor {pf}"));
            }
        }
    }

    for id in unreachable_buses(net) {
        report.push(ViolationKind::Disconnected, id, "not reachable from the first bus");
    }

    report
}

/// Buses not reachable from bus 0 through branches with known endpoints.
fn unreachable_buses(net: &Network) -> Vec<String> {
    let n = net.buses.len();
    if n == 0 {
        return Vec::new();
    }
    let mut adjacency = vec![Vec::new(); n];
    for branch in &net.branches {
        if let (Some(f), Some(t)) = (net.bus_index(&branch.from), net.bus_index(&branch.to)) {
            adjacency[f].push(t);
            adjacency[t].push(f);
        }
    }
    let mut visited = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    visited[0] = true;
    while let Some(i) = queue.pop_front() {
        for &j in &adjacency[i] {
            if !visited[j] {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    net.buses
        .iter()
        .enumerate()
        .filter(|(i, _)| !visited[*i])
        .map(|(_, b)| b.id.clone())
        .collect()
}
