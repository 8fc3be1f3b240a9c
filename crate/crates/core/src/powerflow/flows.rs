use num_complex::Complex64;

use super::PowerFlowSolution;
use crate::error::{Error, Result};
use crate::network::Network;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchFlow {
    /// Complex power entering the branch at its from end, pu.
    pub s_from: Complex64,
    /// Complex power entering the branch at its to end, pu.
    pub s_to: Complex64,
    /// `100 * max(|S_from|, |S_to|) / rating`, rating in pu on the system base.
    pub loading_percent: f64,
}

/// Terminal flows `S = V conj(I)` at both ends of every branch.
pub fn branch_flows(net: &Network, voltages: &[Complex64]) -> Result<Vec<BranchFlow>> {
    if voltages.len() != net.bus_count() {
        return Err(Error::InvalidInput(format!(
            "{} voltages for {} buses",
            voltages.len(),
            net.bus_count()
        )));
    }
    net.branches()
        .iter()
        .map(|branch| {
            let (f, t) = net.branch_endpoints(branch)?;
            let y = net.series_impedance_pu(branch)?.inv();
            let tap = branch.tap();
            let (vf, vt) = (voltages[f], voltages[t]);
            let i_from = y * (vf / (tap * tap) - vt / tap);
            let i_to = y * (vt - vf / tap);
            let s_from = vf * i_from.conj();
            let s_to = vt * i_to.conj();
            let rating_pu = branch.rating_mva() / net.s_base_mva();
            let loading_percent = 100.0 * s_from.norm().max(s_to.norm()) / rating_pu;
            Ok(BranchFlow {
                s_from,
                s_to,
                loading_percent,
            })
        })
        .collect()
}

/// Series losses `Σ (S_from + S_to)` in pu. Multiply by the system base for MW/Mvar.
pub fn total_losses(solution: &PowerFlowSolution) -> Complex64 {
    solution.flows.iter().map(|f| f.s_from + f.s_to).sum()
}
