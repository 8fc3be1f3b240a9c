//! AC power flow on a single-phase-equivalent network.
//!
//! Buses other than the slack are PQ buses with a specified net injection.
//! Two solvers are provided: a full-Jacobian polar Newton-Raphson used for
//! production runs, and a Gauss-Seidel fixed-point iteration kept as an
//! independent reference.

mod flows;
mod gauss_seidel;
mod newton;
mod ybus;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::Network;

pub use flows::{branch_flows, total_losses, BranchFlow};
pub use gauss_seidel::solve_gauss_seidel;
pub use newton::solve_newton_raphson;
pub use ybus::{build_ybus, Ybus};

/// Net complex power injection (generation minus load) per bus, in per-unit
/// on the system base, indexed like [`Network::buses`]. The slack entry is
/// ignored by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectionSet {
    values: Vec<Complex64>,
}

impl InjectionSet {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::InvalidInput(format!("injection at bus index {i} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, bus: usize) -> Complex64 {
        self.values[bus]
    }

    pub fn set(&mut self, bus: usize, value: Complex64) {
        self.values[bus] = value;
    }

    pub fn add(&mut self, bus: usize, value: Complex64) {
        self.values[bus] += value;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Newton-Raphson: max |ΔP|,|ΔQ| in pu. Gauss-Seidel: max |ΔV| between sweeps.
    pub tol: f64,
    pub max_iter: usize,
    pub flat_start: bool,
    /// Starting voltages used when `flat_start` is false.
    pub initial_voltages: Option<Vec<Complex64>>,
}

impl SolveOptions {
    pub fn newton() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 30,
            flat_start: true,
            initial_voltages: None,
        }
    }

    pub fn gauss_seidel() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200_000,
            flat_start: true,
            initial_voltages: None,
        }
    }

    fn start(&self, n: usize, slack: usize) -> Result<Vec<Complex64>> {
        let one = Complex64::new(1.0, 0.0);
        match (&self.initial_voltages, self.flat_start) {
            (Some(v0), false) => {
                if v0.len() != n {
                    return Err(Error::InvalidInput(format!(
                        "initial voltage vector has {} entries for {n} buses",
                        v0.len()
                    )));
                }
                let mut v = v0.clone();
                v[slack] = one;
                Ok(v)
            }
            _ => Ok(vec![one; n]),
        }
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self::newton()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerFlowSolution {
    pub voltages: Vec<Complex64>,
    pub flows: Vec<BranchFlow>,
    pub slack_injection: Complex64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest |ΔP| or |ΔQ| over non-slack buses at the returned voltages.
    pub max_mismatch: f64,
}

impl PowerFlowSolution {
    pub fn voltage_magnitude(&self, bus: usize) -> f64 {
        self.voltages[bus].norm()
    }

    pub fn voltage_angle(&self, bus: usize) -> f64 {
        self.voltages[bus].arg()
    }

    pub fn loadings(&self) -> Vec<f64> {
        self.flows.iter().map(|f| f.loading_percent).collect()
    }

    pub fn max_loading(&self) -> f64 {
        self.flows.iter().map(|f| f.loading_percent).fold(0.0, f64::max)
    }

    pub fn min_voltage(&self) -> f64 {
        self.voltages.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min)
    }
}

/// Shared entry checks for both solvers. Returns the slack index.
fn check_inputs(net: &Network, inj: &InjectionSet) -> Result<usize> {
    if inj.len() != net.bus_count() {
        return Err(Error::InvalidInput(format!(
            "injection set has {} entries for {} buses",
            inj.len(),
            net.bus_count()
        )));
    }
    net.slack_index()
        .ok_or_else(|| Error::InvalidInput("network has no slack bus".into()))
}

/// Computed injection `V ∘ conj(Y V)`.
fn computed_power(ybus: &Ybus, v: &[Complex64]) -> Vec<Complex64> {
    let current = ybus.multiply(v);
    v.iter().zip(&current).map(|(vi, ii)| vi * ii.conj()).collect()
}

fn max_mismatch(ybus: &Ybus, v: &[Complex64], inj: &InjectionSet, slack: usize) -> f64 {
    computed_power(ybus, v)
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != slack)
        .map(|(i, s)| {
            let d = s - inj.get(i);
            d.re.abs().max(d.im.abs())
        })
        .fold(0.0, f64::max)
}

fn assemble(
    net: &Network,
    ybus: &Ybus,
    inj: &InjectionSet,
    slack: usize,
    voltages: Vec<Complex64>,
    iterations: usize,
    converged: bool,
) -> Result<PowerFlowSolution> {
    let s = computed_power(ybus, &voltages);
    let flows = branch_flows(net, &voltages)?;
    let max_mismatch = max_mismatch(ybus, &voltages, inj, slack);
    Ok(PowerFlowSolution {
        slack_injection: s[slack],
        voltages,
        flows,
        iterations,
        converged,
        max_mismatch,
    })
}
