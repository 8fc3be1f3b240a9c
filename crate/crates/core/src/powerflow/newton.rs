use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{assemble, check_inputs, computed_power, InjectionSet, PowerFlowSolution, SolveOptions, Ybus};
use crate::error::Result;
use crate::network::Network;
use crate::powerflow::build_ybus;

/// Newton-Raphson in polar coordinates with the full Jacobian.
///
/// Unknowns are the angle and magnitude of every non-slack bus. Stops when
/// the largest active or reactive mismatch is at most `opts.tol`. When the
/// iteration limit is hit, or the Jacobian turns singular, the iterate with
/// the smallest mismatch seen is returned with `converged = false`.
pub fn solve_newton_raphson(net: &Network, inj: &InjectionSet, opts: &SolveOptions) -> Result<PowerFlowSolution> {
    let slack = check_inputs(net, inj)?;
    let ybus = build_ybus(net)?;
    let n = net.bus_count();
    let pq: Vec<usize> = (0..n).filter(|&i| i != slack).collect();
    let m = pq.len();

    let v0 = opts.start(n, slack)?;
    let mut va: Vec<f64> = v0.iter().map(|v| v.arg()).collect();
    let mut vm: Vec<f64> = v0.iter().map(|v| v.norm()).collect();
    let mut v = v0;

    let mut best = (f64::INFINITY, v.clone(), 0usize);
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let s = computed_power(&ybus, &v);
        let mut mismatch = DVector::zeros(2 * m);
        for (k, &i) in pq.iter().enumerate() {
            let d = s[i] - inj.get(i);
            mismatch[k] = d.re;
            mismatch[m + k] = d.im;
        }
        let norm = mismatch.amax();
        if !norm.is_finite() {
            break;
        }
        if norm < best.0 {
            best = (norm, v.clone(), iterations);
        }
        if norm <= opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }

        let jac = jacobian(&ybus, &v, &pq);
        let Some(dx) = jac.lu().solve(&mismatch) else {
            break;
        };
        for (k, &i) in pq.iter().enumerate() {
            va[i] -= dx[k];
            vm[i] -= dx[m + k];
        }
        v = vm
            .iter()
            .zip(&va)
            .map(|(&mag, &ang)| Complex64::from_polar(mag, ang))
            .collect();
        iterations += 1;
    }

    if converged {
        assemble(net, &ybus, inj, slack, v, iterations, true)
    } else {
        let (_, v_best, _) = best;
        assemble(net, &ybus, inj, slack, v_best, iterations, false)
    }
}

/// Real Jacobian `[[dP/dθ, dP/d|V|], [dQ/dθ, dQ/d|V|]]` restricted to the
/// PQ buses, built from the complex partials
/// `dS/dθ = j diag(V) conj(diag(I) - Y diag(V))` and
/// `dS/d|V| = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)`.
fn jacobian(ybus: &Ybus, v: &[Complex64], pq: &[usize]) -> DMatrix<f64> {
    let m = pq.len();
    let current = ybus.multiply(v);
    let unit: Vec<Complex64> = v.iter().map(|x| x / x.norm()).collect();
    let j = Complex64::new(0.0, 1.0);
    let mut jac = DMatrix::zeros(2 * m, 2 * m);
    for (r, &i) in pq.iter().enumerate() {
        for (c, &k) in pq.iter().enumerate() {
            let y = ybus.get(i, k);
            let mut ds_dva = -(y * v[k]).conj();
            let mut ds_dvm = v[i] * (y * unit[k]).conj();
            if i == k {
                ds_dva += current[i].conj();
                ds_dvm += current[i].conj() * unit[i];
            }
            let ds_dva = j * v[i] * ds_dva;
            jac[(r, c)] = ds_dva.re;
            jac[(r, m + c)] = ds_dvm.re;
            jac[(m + r, c)] = ds_dva.im;
            jac[(m + r, m + c)] = ds_dvm.im;
        }
    }
    jac
}
