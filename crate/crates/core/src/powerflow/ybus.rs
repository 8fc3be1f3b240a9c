use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::Network;

/// Dense bus admittance matrix, indexed like [`Network::buses`].
#[derive(Debug, Clone, PartialEq)]
pub struct Ybus {
    matrix: DMatrix<Complex64>,
}

impl Ybus {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Bus current injections `Y V`.
    pub fn multiply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect()
    }
}

/// Assembles the admittance matrix from branch series admittances. An
/// off-nominal transformer tap `t` sits on the from side: `y/t²` on the
/// from diagonal, `-y/t` off-diagonal.
pub fn build_ybus(net: &Network) -> Result<Ybus> {
    let n = net.bus_count();
    let mut matrix = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for branch in net.branches() {
        let (f, t) = net.branch_endpoints(branch)?;
        let z = net.series_impedance_pu(branch)?;
        if z.norm() == 0.0 {
            return Err(Error::SingularBranch(branch.id()));
        }
        let y = z.inv();
        let tap = branch.tap();
        matrix[(f, f)] += y / (tap * tap);
        matrix[(t, t)] += y;
        matrix[(f, t)] -= y / tap;
        matrix[(t, f)] -= y / tap;
    }
    Ok(Ybus { matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Branch, Bus, BusKind, CableType, Network, NominalLoad};
    use crate::powerflow::test_support::pu_network;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_bus_pure_reactance() {
        let y = build_ybus(&pu_network(2, &[(0, 1, c(0.0, 0.1))], 1000.0)).unwrap();
        let expect = [[c(0.0, -10.0), c(0.0, 10.0)], [c(0.0, 10.0), c(0.0, -10.0)]];
        for (i, row) in expect.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert!((y.get(i, j) - want).norm() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn single_bus_without_branches() {
        let y = build_ybus(&pu_network(1, &[], 1000.0)).unwrap();
        assert_eq!(y.size(), 1);
        assert_eq!(y.get(0, 0), c(0.0, 0.0));
    }

    #[test]
    fn triangle_with_equal_impedances() {
        // y = 1/(0.01 + j0.05) = (0.01 - j0.05)/0.0026 = 3.846153846... - j19.230769230...
        // diagonal = 2y, off-diagonal = -y
        let z = c(0.01, 0.05);
        let net = pu_network(3, &[(0, 1, z), (1, 2, z), (2, 0, z)], 1000.0);
        let y = build_ybus(&net).unwrap();
        let series = c(3.846_153_846_153_846, -19.230_769_230_769_23);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { series * 2.0 } else { -series };
                assert!((y.get(i, j) - expect).norm() < 1e-9, "({i},{j}): {}", y.get(i, j));
            }
        }
    }

    #[test]
    fn zero_impedance_branch_is_singular() {
        let net = Network::new(
            10.0,
            vec![CableType::new("c", 0.5, 0.1)],
            vec![
                Bus::new("a", BusKind::Slack, 4.16, NominalLoad::default()),
                Bus::new("b", BusKind::Load, 4.16, NominalLoad::default()),
            ],
            vec![Branch::cable("a", "b", "c", 0.0, 1000.0)],
            vec![],
        );
        assert_eq!(build_ybus(&net), Err(Error::SingularBranch("a -> b".into())));
    }

    #[test]
    fn off_nominal_tap_breaks_symmetry_of_diagonal_only() {
        let mut branch = Branch::transformer("a", "b", 10.0, 10_000.0);
        branch.kind = crate::network::BranchKind::Transformer {
            impedance_percent: 10.0,
            tap: 1.05,
        };
        let net = Network::new(
            10.0,
            vec![],
            vec![
                Bus::new("a", BusKind::Slack, 4.16, NominalLoad::default()),
                Bus::new("b", BusKind::Load, 4.16, NominalLoad::default()),
            ],
            vec![branch],
            vec![],
        );
        let y = build_ybus(&net).unwrap();
        assert_eq!(y.get(0, 1), y.get(1, 0));
        assert!((y.get(1, 1) - c(0.0, -10.0)).norm() < 1e-12);
        assert!((y.get(0, 0) - c(0.0, -10.0 / 1.1025)).norm() < 1e-12);
    }
}
