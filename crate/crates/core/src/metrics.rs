//! Threshold detection and separability metrics for ID/OOD score sets.
//!
//! Scores follow the "higher means more in-distribution" convention: a sample
//! is accepted as ID when `score >= gamma`.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Id,
    Ood,
}

/// Inclusive threshold rule: ID iff `score >= gamma`.
pub fn detect(score: f64, gamma: f64) -> Decision {
    if score >= gamma {
        Decision::Id
    } else {
        Decision::Ood
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    pub id: Vec<f64>,
    pub ood: Vec<f64>,
}

impl ScoreSet {
    pub fn new(id: Vec<f64>, ood: Vec<f64>) -> Result<Self> {
        let set = Self { id, ood };
        set.check()?;
        Ok(set)
    }

    fn check(&self) -> Result<()> {
        if self.id.is_empty() || self.ood.is_empty() {
            return Err(Error::InvalidInput(format!(
                "need non-empty ID and OOD scores (got {} and {})",
                self.id.len(),
                self.ood.len()
            )));
        }
        if self.id.iter().chain(&self.ood).any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("scores"));
        }
        Ok(())
    }

    /// Swaps the roles of the two sets.
    pub fn flipped(&self) -> Self {
        Self {
            id: self.ood.clone(),
            ood: self.id.clone(),
        }
    }
}

/// Smallest `k` with `k / n >= target`, i.e. how many ID samples must be accepted.
fn required_accepts(n: usize, target: f64) -> usize {
    let nf = n as f64;
    let mut k = ((target * nf).ceil() as usize).clamp(1, n);
    while k > 1 && (k - 1) as f64 / nf >= target {
        k -= 1;
    }
    while k < n && (k as f64) / nf < target {
        k += 1;
    }
    k
}

/// False-positive rate at the largest threshold that still accepts at least
/// `tpr_target` of the ID scores. Returns `(fpr, gamma)`.
///
/// `gamma` is the `k`-th largest ID score with `k` the smallest count meeting
/// the target, so ties at `gamma` are all accepted.
pub fn fpr_at_tpr(set: &ScoreSet, tpr_target: f64) -> Result<(f64, f64)> {
    set.check()?;
    if !(tpr_target > 0.0 && tpr_target <= 1.0) {
        return Err(Error::param(format!(
            "TPR target {tpr_target} outside (0, 1]"
        )));
    }
    let mut id = set.id.clone();
    id.sort_by(|a, b| b.total_cmp(a));
    let k = required_accepts(id.len(), tpr_target);
    let gamma = id[k - 1];
    let accepted = set
        .ood
        .iter()
        .filter(|&&o| detect(o, gamma) == Decision::Id)
        .count();
    Ok((accepted as f64 / set.ood.len() as f64, gamma))
}

/// Area under the ROC curve as the Mann–Whitney statistic with half credit
/// for ties, computed from one sort of the pooled scores.
pub fn auroc(set: &ScoreSet) -> Result<f64> {
    set.check()?;
    let mut pooled: Vec<(f64, bool)> = set
        .id
        .iter()
        .map(|&s| (s, true))
        .chain(set.ood.iter().map(|&s| (s, false)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (mut wins, mut ties) = (0u64, 0u64);
    let mut ood_below = 0u64;
    let mut i = 0;
    while i < pooled.len() {
        let v = pooled[i].0;
        let (mut id_here, mut ood_here) = (0u64, 0u64);
        while i < pooled.len() && pooled[i].0 == v {
            if pooled[i].1 {
                id_here += 1;
            } else {
                ood_here += 1;
            }
            i += 1;
        }
        wins += id_here * ood_below;
        ties += id_here * ood_here;
        ood_below += ood_here;
    }
    Ok(mann_whitney_ratio(wins, ties, set.id.len(), set.ood.len()))
}

/// `(wins + ties/2) / (n_id·n_ood)`, evaluated in one division.
pub fn mann_whitney_ratio(wins: u64, ties: u64, n_id: usize, n_ood: usize) -> f64 {
    (2 * wins + ties) as f64 / (2 * n_id as u64 * n_ood as u64) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub fpr95: f64,
    pub auroc: f64,
    pub gamma: f64,
    pub n_id: usize,
    pub n_ood: usize,
}

pub const TPR_TARGET: f64 = 0.95;

impl EvalReport {
    pub fn compute(set: &ScoreSet) -> Result<Self> {
        let (fpr95, gamma) = fpr_at_tpr(set, TPR_TARGET)?;
        Ok(Self {
            fpr95,
            auroc: auroc(set)?,
            gamma,
            n_id: set.id.len(),
            n_ood: set.ood.len(),
        })
    }

    /// `key<TAB>value` lines, reals at six decimals.
    pub fn to_tsv(&self) -> String {
        format!(
            "fpr95\t{}\nauroc\t{}\ngamma\t{}\nn_id\t{}\nn_ood\t{}\n",
            fmt6(self.fpr95),
            fmt6(self.auroc),
            fmt6(self.gamma),
            self.n_id,
            self.n_ood
        )
    }
}

/// Fixed six-decimal rendering used by every text output.
/// Negative values that round to zero print as `0.000000`.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        s[1..].to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// One `edge_lo<TAB>edge_hi<TAB>count` row per bin.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.counts.iter().enumerate() {
            let _ = writeln!(
                out,
                "{}\t{}\t{c}",
                fmt6(self.edges[i]),
                fmt6(self.edges[i + 1])
            );
        }
        out
    }
}

/// Equal-width histogram over `range` (default: data min..max). The last bin
/// includes its right edge; values outside an explicit range are counted in
/// the nearest end bin so the total always equals the sample count.
pub fn histogram(scores: &[f64], n_bins: usize, range: Option<(f64, f64)>) -> Result<Histogram> {
    if n_bins == 0 {
        return Err(Error::param("histogram needs at least one bin"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("histogram input"));
    }
    let (lo, hi) = match range {
        Some((lo, hi)) => {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::param(format!(
                    "histogram range ({lo}, {hi}) is empty"
                )));
            }
            (lo, hi)
        }
        None => {
            if scores.is_empty() {
                return Err(Error::InvalidInput(
                    "empty scores and no histogram range".into(),
                ));
            }
            let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo == hi {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        }
    };
    let width = (hi - lo) / n_bins as f64;
    let mut edges: Vec<f64> = (0..n_bins).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    let mut counts = vec![0u64; n_bins];
    for &s in scores {
        // Bins are closed on the right: (e_i, e_{i+1}], with the first bin also closing at lo.
        let bin = if s >= hi {
            n_bins - 1
        } else if s <= lo {
            0
        } else {
            (((s - lo) / width).ceil() as usize).clamp(1, n_bins) - 1
        };
        counts[bin] += 1;
    }
    Ok(Histogram { edges, counts })
}
