use num_complex::Complex64;

use super::{assemble, check_inputs, InjectionSet, PowerFlowSolution, SolveOptions};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::powerflow::build_ybus;

/// Gauss-Seidel fixed-point iteration
/// `V_i <- (conj(S_i)/conj(V_i) - Σ_{k≠i} Y_ik V_k) / Y_ii`,
/// sweeping buses in index order and using updated values immediately.
/// Converges when the largest voltage change in a sweep is at most
/// `opts.tol`.
pub fn solve_gauss_seidel(net: &Network, inj: &InjectionSet, opts: &SolveOptions) -> Result<PowerFlowSolution> {
    let slack = check_inputs(net, inj)?;
    let ybus = build_ybus(net)?;
    let n = net.bus_count();
    for i in (0..n).filter(|&i| i != slack) {
        if ybus.get(i, i).norm() == 0.0 {
            return Err(Error::InvalidInput(format!(
                "bus `{}` has no incident branches",
                net.buses()[i].id
            )));
        }
    }

    let mut v = opts.start(n, slack)?;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let mut largest_step: f64 = 0.0;
        for i in (0..n).filter(|&i| i != slack) {
            let coupled: Complex64 = (0..n).filter(|&k| k != i).map(|k| ybus.get(i, k) * v[k]).sum();
            let updated = (inj.get(i).conj() / v[i].conj() - coupled) / ybus.get(i, i);
            largest_step = largest_step.max((updated - v[i]).norm());
            v[i] = updated;
        }
        iterations += 1;
        if !largest_step.is_finite() {
            break;
        }
        if largest_step <= opts.tol {
            converged = true;
            break;
        }
    }
    if v.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        v = vec![Complex64::new(1.0, 0.0); n];
    }
    assemble(net, &ybus, inj, slack, v, iterations, converged)
}
