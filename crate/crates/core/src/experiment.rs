//! Whole-dataset runs: evaluation, stage ablation, hyperparameter grids and
//! distribution diagnostics. The CLI is a thin wrapper around these.

use std::fmt::Write as _;

use crate::detector::{DetectorConfig, FittedDetector, ReactMode, ScoreMethod};
use crate::error::Result;
use crate::metrics::{fmt6, histogram, EvalReport, Histogram, ScoreSet};
use crate::model::{ClassifierHead, FeatureMatrix};

pub fn score_sets(
    det: &FittedDetector,
    id: &FeatureMatrix,
    ood: &FeatureMatrix,
) -> Result<ScoreSet> {
    let score = |f: &FeatureMatrix| -> Result<Vec<f64>> {
        f.rows().map(|h| det.score(h).map(|r| r.score)).collect()
    };
    ScoreSet::new(score(id)?, score(ood)?)
}

pub fn evaluate(
    det: &FittedDetector,
    id: &FeatureMatrix,
    ood: &FeatureMatrix,
) -> Result<EvalReport> {
    EvalReport::compute(&score_sets(det, id, ood)?)
}

/// Evaluates a baseline score on unmodified features, ignoring the stage toggles.
pub fn evaluate_baseline(
    det: &FittedDetector,
    method: ScoreMethod,
    id: &FeatureMatrix,
    ood: &FeatureMatrix,
) -> Result<EvalReport> {
    let score = |f: &FeatureMatrix| -> Result<Vec<f64>> {
        f.rows().map(|h| det.score_baseline(h, method)).collect()
    };
    EvalReport::compute(&ScoreSet::new(score(id)?, score(ood)?)?)
}

/// Stage combinations `(react, mask, smoothing)` compared in the ablation table.
pub const ABLATION_STAGES: [(bool, bool, bool); 6] = [
    (false, false, false),
    (true, false, false),
    (true, true, false),
    (true, false, true),
    (false, true, true),
    (true, true, true),
];

pub fn stage_label(react: bool, mask: bool, smoothing: bool) -> String {
    let parts: Vec<&str> = [(react, "R"), (mask, "FM"), (smoothing, "LS")]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
    if parts.is_empty() {
        "none".to_string()
    } else {
        parts.join("+")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub react: bool,
    pub mask: bool,
    pub smoothing: bool,
    pub report: EvalReport,
}

impl AblationRow {
    pub fn label(&self) -> String {
        stage_label(self.react, self.mask, self.smoothing)
    }
}

/// Re-scores with each stage combination; masks, prototypes and λ are shared.
pub fn ablate(
    det: &FittedDetector,
    id: &FeatureMatrix,
    ood: &FeatureMatrix,
) -> Result<Vec<AblationRow>> {
    ABLATION_STAGES
        .iter()
        .map(|&(react, mask, smoothing)| {
            let report = evaluate(&det.with_stages(react, mask, smoothing), id, ood)?;
            Ok(AblationRow {
                react,
                mask,
                smoothing,
                report,
            })
        })
        .collect()
}

pub fn ablation_tsv(rows: &[AblationRow]) -> String {
    let mut out = String::from("stages\treact\tfm\tls\tfpr95\tauroc\tgamma\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.label(),
            u8::from(r.react),
            u8::from(r.mask),
            u8::from(r.smoothing),
            fmt6(r.report.fpr95),
            fmt6(r.report.auroc),
            fmt6(r.report.gamma)
        );
    }
    out
}

/// Training data and evaluation splits shared by every cell of a grid.
#[derive(Debug, Clone, Copy)]
pub struct Benchmark<'a> {
    pub head: &'a ClassifierHead,
    pub train: &'a FeatureMatrix,
    pub labels: &'a [usize],
    pub id: &'a FeatureMatrix,
    pub ood: &'a FeatureMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub p: f64,
    pub lambda: f64,
    pub report: EvalReport,
}

/// Fits with `(p, λ)` substituted into `base` and evaluates.
pub fn sweep_cell(
    bench: &Benchmark<'_>,
    base: DetectorConfig,
    p: f64,
    lambda: f64,
) -> Result<SweepCell> {
    let config = DetectorConfig {
        masking_percentile: p,
        react_mode: ReactMode::Explicit(lambda),
        ..base
    };
    let det = FittedDetector::fit(bench.train, bench.labels, bench.head, config)?;
    Ok(SweepCell {
        p,
        lambda,
        report: evaluate(&det, bench.id, bench.ood)?,
    })
}

pub fn sweep_tsv(baseline: &EvalReport, cells: &[SweepCell]) -> String {
    let mut out = String::from("row\tp\tlambda\tfpr95\tauroc\tgamma\n");
    let mut row = |name: &str, p: &str, l: &str, r: &EvalReport| {
        let _ = writeln!(
            out,
            "{name}\t{p}\t{l}\t{}\t{}\t{}",
            fmt6(r.fpr95),
            fmt6(r.auroc),
            fmt6(r.gamma)
        );
    };
    row("baseline", "-", "-", baseline);
    for c in cells {
        row("cell", &fmt6(c.p), &fmt6(c.lambda), &c.report);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub cosine_id: Histogram,
    pub cosine_ood: Histogram,
    pub score_id: Histogram,
    pub score_ood: Histogram,
}

/// Cosine histograms over `[-1, 1]` and score histograms over the pooled
/// score range, so the ID and OOD curves share bin edges.
pub fn diagnostics(
    det: &FittedDetector,
    id: &FeatureMatrix,
    ood: &FeatureMatrix,
    bins: usize,
) -> Result<Diagnostics> {
    let id_rec = det.score_batch(id)?;
    let ood_rec = det.score_batch(ood)?;
    let cos = |r: &[crate::detector::ScoreRecord]| r.iter().map(|x| x.cosine).collect::<Vec<_>>();
    let sc = |r: &[crate::detector::ScoreRecord]| r.iter().map(|x| x.score).collect::<Vec<_>>();
    let (sid, sood) = (sc(&id_rec), sc(&ood_rec));
    let all = sid.iter().chain(&sood);
    let lo = all.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = all.copied().fold(f64::NEG_INFINITY, f64::max);
    let range = match (lo.is_finite(), lo < hi) {
        (false, _) => (0.0, 1.0),
        (true, true) => (lo, hi),
        (true, false) => (lo - 0.5, lo + 0.5),
    };
    Ok(Diagnostics {
        cosine_id: histogram(&cos(&id_rec), bins, Some((-1.0, 1.0)))?,
        cosine_ood: histogram(&cos(&ood_rec), bins, Some((-1.0, 1.0)))?,
        score_id: histogram(&sid, bins, Some(range))?,
        score_ood: histogram(&sood, bins, Some(range))?,
    })
}
