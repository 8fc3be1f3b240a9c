//! Binning of branch loadings into the 40/80/100/150 % classes, congested
//! element listings and scenario-to-scenario comparison.
//!
//! Bins are left-inclusive: 80.0 % falls in `[80, 100)`. Branches below
//! 40 % are counted separately and are not part of the four reported bins.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{ElementKind, Network};
use crate::powerflow::PowerFlowSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LoadingBin {
    Below40,
    From40To80,
    From80To100,
    From100To150,
    Above150,
}

impl LoadingBin {
    pub const REPORTED: [LoadingBin; 4] = [
        LoadingBin::From40To80,
        LoadingBin::From80To100,
        LoadingBin::From100To150,
        LoadingBin::Above150,
    ];

    pub fn of(loading_percent: f64) -> Self {
        match loading_percent {
            l if l < 40.0 => LoadingBin::Below40,
            l if l < 80.0 => LoadingBin::From40To80,
            l if l < 100.0 => LoadingBin::From80To100,
            l if l < 150.0 => LoadingBin::From100To150,
            _ => LoadingBin::Above150,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            LoadingBin::Below40 => "lt_40",
            LoadingBin::From40To80 => "40_80",
            LoadingBin::From80To100 => "80_100",
            LoadingBin::From100To150 => "100_150",
            LoadingBin::Above150 => "gt_150",
        }
    }

    pub fn parse(label: &str) -> Option<Self> {
        [
            LoadingBin::Below40,
            LoadingBin::From40To80,
            LoadingBin::From80To100,
            LoadingBin::From100To150,
            LoadingBin::Above150,
        ]
        .into_iter()
        .find(|b| b.label() == label)
    }
}

impl fmt::Display for LoadingBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CongestionHistogram {
    pub below_40: usize,
    pub bin_40_80: usize,
    pub bin_80_100: usize,
    pub bin_100_150: usize,
    pub bin_gt_150: usize,
}

impl CongestionHistogram {
    /// Histogram of the four reported bins only (below-40 unknown or zero).
    pub fn from_reported(counts: [usize; 4]) -> Self {
        Self {
            below_40: 0,
            bin_40_80: counts[0],
            bin_80_100: counts[1],
            bin_100_150: counts[2],
            bin_gt_150: counts[3],
        }
    }

    pub fn reported(&self) -> [usize; 4] {
        [self.bin_40_80, self.bin_80_100, self.bin_100_150, self.bin_gt_150]
    }

    pub fn count(&self, bin: LoadingBin) -> usize {
        match bin {
            LoadingBin::Below40 => self.below_40,
            LoadingBin::From40To80 => self.bin_40_80,
            LoadingBin::From80To100 => self.bin_80_100,
            LoadingBin::From100To150 => self.bin_100_150,
            LoadingBin::Above150 => self.bin_gt_150,
        }
    }

    fn increment(&mut self, bin: LoadingBin) {
        match bin {
            LoadingBin::Below40 => self.below_40 += 1,
            LoadingBin::From40To80 => self.bin_40_80 += 1,
            LoadingBin::From80To100 => self.bin_80_100 += 1,
            LoadingBin::From100To150 => self.bin_100_150 += 1,
            LoadingBin::Above150 => self.bin_gt_150 += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.below_40 + self.reported().iter().sum::<usize>()
    }

    /// Branches at or above 100 %.
    pub fn overloaded(&self) -> usize {
        self.bin_100_150 + self.bin_gt_150
    }

    /// Branches at or above 80 %.
    pub fn at_or_above_80(&self) -> usize {
        self.bin_80_100 + self.overloaded()
    }
}

/// Loading of one branch, with its report id and element kind.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchLoading {
    pub branch: String,
    pub kind: ElementKind,
    pub loading_percent: f64,
}

impl BranchLoading {
    pub fn from_solution(net: &Network, solution: &PowerFlowSolution) -> Vec<Self> {
        net.branches()
            .iter()
            .zip(&solution.flows)
            .map(|(b, f)| BranchLoading {
                branch: b.id(),
                kind: b.element_kind(),
                loading_percent: f.loading_percent,
            })
            .collect()
    }

    pub fn bin(&self) -> LoadingBin {
        LoadingBin::of(self.loading_percent)
    }
}

/// Histogram plus the per-branch detail it was built from. Histograms taken
/// from summary tables carry no detail.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CongestionReport {
    pub histogram: CongestionHistogram,
    pub branches: Vec<BranchLoading>,
}

impl CongestionReport {
    pub fn from_histogram(histogram: CongestionHistogram) -> Self {
        Self {
            histogram,
            branches: Vec::new(),
        }
    }

    pub fn from_solution(net: &Network, solution: &PowerFlowSolution) -> Result<Self> {
        bin_branches(BranchLoading::from_solution(net, solution))
    }
}

fn check_loading(value: f64) -> Result<()> {
    if !(value >= 0.0) {
        return Err(Error::InvalidInput(format!("loading {value} % is not a non-negative number")));
    }
    Ok(())
}

pub fn bin_loadings(loadings: &[f64]) -> Result<CongestionHistogram> {
    let mut h = CongestionHistogram::default();
    for &l in loadings {
        check_loading(l)?;
        h.increment(LoadingBin::of(l));
    }
    Ok(h)
}

pub fn bin_branches(branches: Vec<BranchLoading>) -> Result<CongestionReport> {
    let mut histogram = CongestionHistogram::default();
    for b in &branches {
        check_loading(b.loading_percent)?;
        histogram.increment(b.bin());
    }
    Ok(CongestionReport { histogram, branches })
}

/// Branches loaded at or above `threshold_percent`, heaviest first. Ties
/// keep their input order.
pub fn congested_elements(branches: &[BranchLoading], threshold_percent: f64) -> Result<Vec<BranchLoading>> {
    if !(threshold_percent > 0.0) {
        return Err(Error::InvalidInput(format!("threshold {threshold_percent} % must be positive")));
    }
    let mut out: Vec<BranchLoading> = branches
        .iter()
        .filter(|b| b.loading_percent >= threshold_percent)
        .cloned()
        .collect();
    out.sort_by(|a, b| b.loading_percent.total_cmp(&a.loading_percent));
    Ok(out)
}

/// Per-bin `b - a` differences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BinDeltas {
    pub below_40: i64,
    pub bin_40_80: i64,
    pub bin_80_100: i64,
    pub bin_100_150: i64,
    pub bin_gt_150: i64,
}

impl BinDeltas {
    pub fn between(a: &CongestionHistogram, b: &CongestionHistogram) -> Self {
        let d = |x: usize, y: usize| y as i64 - x as i64;
        Self {
            below_40: d(a.below_40, b.below_40),
            bin_40_80: d(a.bin_40_80, b.bin_40_80),
            bin_80_100: d(a.bin_80_100, b.bin_80_100),
            bin_100_150: d(a.bin_100_150, b.bin_100_150),
            bin_gt_150: d(a.bin_gt_150, b.bin_gt_150),
        }
    }

    pub fn reported(&self) -> [i64; 4] {
        [self.bin_40_80, self.bin_80_100, self.bin_100_150, self.bin_gt_150]
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinChange {
    pub branch: String,
    pub kind: ElementKind,
    pub from: LoadingBin,
    pub to: LoadingBin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioComparison {
    pub deltas: BinDeltas,
    /// Branches whose bin differs between the two scenarios, in `a`'s order.
    pub changed: Vec<BinChange>,
}

/// Compares scenario `b` against baseline `a`. When both carry per-branch
/// detail the branch sets must match; summary-only reports compare by counts.
pub fn compare_scenarios(a: &CongestionReport, b: &CongestionReport) -> Result<ScenarioComparison> {
    let deltas = BinDeltas::between(&a.histogram, &b.histogram);
    match (a.branches.is_empty(), b.branches.is_empty()) {
        (true, true) => Ok(ScenarioComparison {
            deltas,
            changed: Vec::new(),
        }),
        (false, false) => {
            let index: BTreeMap<&str, &BranchLoading> = b.branches.iter().map(|x| (x.branch.as_str(), x)).collect();
            if index.len() != b.branches.len() || a.branches.len() != b.branches.len() {
                return Err(Error::InvalidComparison("branch sets differ in size or repeat ids".into()));
            }
            let mut changed = Vec::new();
            for x in &a.branches {
                let y = index
                    .get(x.branch.as_str())
                    .ok_or_else(|| Error::InvalidComparison(format!("branch `{}` missing from the second scenario", x.branch)))?;
                if x.bin() != y.bin() {
                    changed.push(BinChange {
                        branch: x.branch.clone(),
                        kind: x.kind,
                        from: x.bin(),
                        to: y.bin(),
                    });
                }
            }
            Ok(ScenarioComparison { deltas, changed })
        }
        _ => Err(Error::InvalidComparison(
            "one scenario has per-branch detail and the other does not".into(),
        )),
    }
}
