//! Fitting and scoring.
//!
//! A [`FittedDetector`] bundles everything the scoring path needs: the
//! classifier head, a per-class binary mask over penultimate channels chosen
//! from the head's own weights, per-class prototypes (mean training feature),
//! and a resolved ReAct clipping threshold.
//!
//! Scoring a feature vector `h`:
//!
//! 1. raw logits `f = Wᵀh + b`, predicted class `c = argmax f`;
//! 2. `h_m = m_c ⊙ h` (mask), then `min(h_m, λ)` elementwise (ReAct);
//! 3. `f_m = Wᵀ·clip(mask(h)) + b`;
//! 4. `s = cos(h, v_c)` and `f̂ = s·f_m`;
//! 5. score = `log Σ exp(f̂_k)` (or another logit score, see [`ScoreMethod`]).
//!
//! The class, the cosine and the prototypes are all computed from raw features,
//! so the three stages can be toggled independently without ever changing the
//! predicted class. Ties in argmax and top-k resolve toward the lower index.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{ClassifierHead, FeatureMatrix};
use crate::numcore::{argmax, cosine, logsumexp, softmax, Matrix};

/// Binary `L×C` mask with exactly `k` ones per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskMatrix {
    width: usize,
    classes: usize,
    k: usize,
    bits: Vec<bool>,
}

impl MaskMatrix {
    /// Rebuilds a mask from row-major bits, checking the per-column count.
    pub fn from_bits(width: usize, classes: usize, k: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || classes == 0 {
            return Err(Error::dim("mask needs at least one row and column"));
        }
        if bits.len() != width * classes {
            return Err(Error::dim(format!(
                "{} mask bits for a {width}x{classes} mask",
                bits.len()
            )));
        }
        if k == 0 || k > width {
            return Err(Error::param(format!("mask k={k} outside [1, {width}]")));
        }
        let mask = Self {
            width,
            classes,
            k,
            bits,
        };
        for c in 0..classes {
            let ones = mask.column(c).filter(|&b| b).count();
            if ones != k {
                return Err(Error::param(format!(
                    "mask column {c} has {ones} ones, expected {k}"
                )));
            }
        }
        Ok(mask)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, row: usize, class: usize) -> bool {
        self.bits[row * self.classes + class]
    }

    pub fn column(&self, class: usize) -> impl Iterator<Item = bool> + '_ {
        (0..self.width).map(move |r| self.get(r, class))
    }

    /// Row-major bits.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Keeps, per column of `W`, the `k` largest weights; equal weights prefer the lower row.
pub fn build_masks(weights: &Matrix, k: usize) -> Result<MaskMatrix> {
    let (width, classes) = weights.shape();
    if k == 0 || k > width {
        return Err(Error::param(format!("mask k={k} outside [1, {width}]")));
    }
    let mut bits = vec![false; width * classes];
    let mut order: Vec<usize> = Vec::with_capacity(width);
    for c in 0..classes {
        order.clear();
        order.extend(0..width);
        // Stable sort on descending weight keeps lower rows first among equals.
        order.sort_by(|&a, &b| weights.get(b, c).total_cmp(&weights.get(a, c)));
        for &row in &order[..k] {
            bits[row * classes + c] = true;
        }
    }
    Ok(MaskMatrix {
        width,
        classes,
        k,
        bits,
    })
}

/// `m_c ⊙ h`.
pub fn apply_mask(h: &[f64], masks: &MaskMatrix, class: usize) -> Result<Vec<f64>> {
    if class >= masks.classes {
        return Err(Error::param(format!(
            "class {class} out of range for {} classes",
            masks.classes
        )));
    }
    if h.len() != masks.width {
        return Err(Error::dim(format!(
            "feature length {} for mask width {}",
            h.len(),
            masks.width
        )));
    }
    Ok(h.iter()
        .enumerate()
        .map(|(row, &x)| if masks.get(row, class) { x } else { 0.0 })
        .collect())
}

/// Elementwise `min(h, λ)`. `λ = +∞` leaves `h` untouched.
pub fn react_clip(h: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    Ok(h.iter().map(|&x| x.min(lambda)).collect())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::param(format!(
            "clip threshold must be >= 0, got {lambda}"
        )));
    }
    Ok(())
}

/// Percentile with linear interpolation between order statistics at
/// position `(n−1)·q/100`.
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("percentile of an empty set".into()));
    }
    if !(0.0..=100.0).contains(&q) {
        return Err(Error::param(format!("percentile {q} outside [0, 100]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = (sorted.len() - 1) as f64 * q / 100.0;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// Per-class mean training features.
#[derive(Debug, Clone, PartialEq)]
pub struct Prototypes {
    vectors: Matrix,
    counts: Vec<usize>,
}

impl Prototypes {
    pub fn new(vectors: Matrix, counts: Vec<usize>) -> Result<Self> {
        if counts.len() != vectors.rows() {
            return Err(Error::dim(format!(
                "{} counts for {} prototypes",
                counts.len(),
                vectors.rows()
            )));
        }
        if let Some(c) = counts.iter().position(|&n| n == 0) {
            return Err(Error::Fit(format!("class {c} has no training samples")));
        }
        Ok(Self { vectors, counts })
    }

    pub fn compute(features: &FeatureMatrix, labels: &[usize], classes: usize) -> Result<Self> {
        let width = features.width();
        if labels.len() != features.len() {
            return Err(Error::dim(format!(
                "{} labels for {} samples",
                labels.len(),
                features.len()
            )));
        }
        let mut sums = vec![0.0; classes * width];
        let mut counts = vec![0usize; classes];
        for (row, &y) in features.rows().zip(labels) {
            if y >= classes {
                return Err(Error::Fit(format!(
                    "label {y} out of range for {classes} classes"
                )));
            }
            counts[y] += 1;
            for (s, x) in sums[y * width..(y + 1) * width].iter_mut().zip(row) {
                *s += x;
            }
        }
        if let Some(c) = counts.iter().position(|&n| n == 0) {
            return Err(Error::Fit(format!("class {c} has no training samples")));
        }
        for (c, &n) in counts.iter().enumerate() {
            for s in &mut sums[c * width..(c + 1) * width] {
                *s /= n as f64;
            }
        }
        Self::new(Matrix::new(classes, width, sums)?, counts)
    }

    pub fn vector(&self, class: usize) -> &[f64] {
        self.vectors.row(class)
    }

    /// `C×L`.
    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReactMode {
    /// Fixed threshold, `λ ≥ 0` or `+∞`.
    Explicit(f64),
    /// `q`-th percentile (0 < q < 100) of every activation in the training set.
    Percentile(f64),
}

impl ReactMode {
    fn validate(&self) -> Result<()> {
        match *self {
            ReactMode::Explicit(l) => check_lambda(l),
            ReactMode::Percentile(q) if q > 0.0 && q < 100.0 => Ok(()),
            ReactMode::Percentile(q) => Err(Error::param(format!(
                "react percentile {q} outside (0, 100)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoreMethod {
    /// `log Σ exp(f_k)`.
    Energy,
    /// Maximum softmax probability.
    Msp,
    /// Maximum softmax probability at temperature `T` (no input perturbation).
    OdinTemp(f64),
    /// Negative squared Mahalanobis distance to the closest class mean.
    Mahalanobis,
    /// Energy on logits of clipped raw features. In the full pipeline this is
    /// the same as `Energy`, since clipping is governed by the stage toggle.
    EnergyReAct,
}

pub const DEFAULT_ODIN_TEMPERATURE: f64 = 1000.0;

impl ScoreMethod {
    fn validate(&self) -> Result<()> {
        match *self {
            ScoreMethod::OdinTemp(t) if !(t > 0.0 && t.is_finite()) => Err(Error::param(format!(
                "ODIN temperature must be finite and > 0, got {t}"
            ))),
            _ => Ok(()),
        }
    }

    /// Scores a logit vector. Not defined for `Mahalanobis`.
    pub fn score_logits(&self, logits: &[f64]) -> Result<f64> {
        match *self {
            ScoreMethod::Energy | ScoreMethod::EnergyReAct => logsumexp(logits),
            ScoreMethod::Msp => max_prob(logits, 1.0),
            ScoreMethod::OdinTemp(t) => max_prob(logits, t),
            ScoreMethod::Mahalanobis => Err(Error::InvalidState(
                "mahalanobis does not score logits".into(),
            )),
        }
    }
}

fn max_prob(logits: &[f64], tau: f64) -> Result<f64> {
    Ok(softmax(logits, tau)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max))
}

impl fmt::Display for ScoreMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreMethod::Energy => f.write_str("energy"),
            ScoreMethod::Msp => f.write_str("msp"),
            ScoreMethod::OdinTemp(t) => write!(f, "odin:{t}"),
            ScoreMethod::Mahalanobis => f.write_str("mahalanobis"),
            ScoreMethod::EnergyReAct => f.write_str("energy-react"),
        }
    }
}

impl FromStr for ScoreMethod {
    type Err = Error;

    /// Accepts `energy`, `msp`, `odin`, `odin:<T>`, `mahalanobis`, `energy-react`.
    fn from_str(s: &str) -> Result<Self> {
        let method = match s {
            "energy" => ScoreMethod::Energy,
            "msp" => ScoreMethod::Msp,
            "odin" => ScoreMethod::OdinTemp(DEFAULT_ODIN_TEMPERATURE),
            "mahalanobis" => ScoreMethod::Mahalanobis,
            "energy-react" => ScoreMethod::EnergyReAct,
            other => match other.strip_prefix("odin:") {
                Some(t) => ScoreMethod::OdinTemp(
                    t.parse()
                        .map_err(|_| Error::param(format!("bad ODIN temperature {t:?}")))?,
                ),
                None => return Err(Error::param(format!("unknown score method {other:?}"))),
            },
        };
        method.validate()?;
        Ok(method)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Percent of channels masked per class, `p = (L−k)/L·100`, in `[0, 100)`.
    pub masking_percentile: f64,
    pub react_mode: ReactMode,
    pub enable_mask: bool,
    pub enable_react: bool,
    pub enable_smoothing: bool,
    pub score_method: ScoreMethod,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Preset::CifarDensenet.config()
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let p = self.masking_percentile;
        if !(0.0..100.0).contains(&p) {
            return Err(Error::param(format!(
                "masking percentile {p} outside [0, 100)"
            )));
        }
        self.react_mode.validate()?;
        self.score_method.validate()
    }

    /// `k = round(L·(1 − p/100))`, required to land in `[1, L]`.
    pub fn resolve_k(&self, width: usize) -> Result<usize> {
        self.validate()?;
        let k = (width as f64 * (1.0 - self.masking_percentile / 100.0)).round() as usize;
        if k == 0 || k > width {
            return Err(Error::param(format!(
                "masking percentile {} keeps {k} of {width} channels",
                self.masking_percentile
            )));
        }
        Ok(k)
    }

    /// Same configuration with the three pipeline stages set explicitly.
    pub fn with_stages(mut self, react: bool, mask: bool, smoothing: bool) -> Self {
        self.enable_react = react;
        self.enable_mask = mask;
        self.enable_smoothing = smoothing;
        self
    }
}

/// Operating points selected on noise validation data for common backbones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    CifarDensenet,
    CifarResnet18,
    ImagenetResnet50,
    ImagenetMobilenet,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::CifarDensenet,
        Preset::CifarResnet18,
        Preset::ImagenetResnet50,
        Preset::ImagenetMobilenet,
    ];

    /// `(p, λ)`.
    pub fn operating_point(self) -> (f64, f64) {
        match self {
            Preset::CifarDensenet => (60.0, 1.6),
            Preset::CifarResnet18 => (60.0, 1.0),
            Preset::ImagenetResnet50 => (30.0, 0.8),
            Preset::ImagenetMobilenet => (30.0, 0.2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::CifarDensenet => "cifar-densenet",
            Preset::CifarResnet18 => "cifar-resnet18",
            Preset::ImagenetResnet50 => "imagenet-resnet50",
            Preset::ImagenetMobilenet => "imagenet-mobilenet",
        }
    }

    pub fn config(self) -> DetectorConfig {
        let (p, lambda) = self.operating_point();
        DetectorConfig {
            masking_percentile: p,
            react_mode: ReactMode::Explicit(lambda),
            enable_mask: true,
            enable_react: true,
            enable_smoothing: true,
            score_method: ScoreMethod::Energy,
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param(format!("unknown preset {s:?}")))
    }
}

/// Class-conditional Gaussians with one shared precision matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    means: Matrix,
    precision: Matrix,
}

impl GaussianModel {
    pub fn new(means: Matrix, precision: Matrix) -> Result<Self> {
        let width = means.cols();
        if precision.shape() != (width, width) {
            return Err(Error::dim(format!(
                "precision is {:?}, expected {width}x{width}",
                precision.shape()
            )));
        }
        for i in 0..width {
            for j in 0..i {
                let (a, b) = (precision.get(i, j), precision.get(j, i));
                if (a - b).abs() > 1e-9 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidState(format!(
                        "precision not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let p = DMatrix::from_row_slice(width, width, precision.as_slice());
        if p.cholesky().is_none() {
            return Err(Error::InvalidState(
                "precision is not positive definite".into(),
            ));
        }
        Ok(Self { means, precision })
    }

    /// Class means plus the inverse of the pooled within-class covariance,
    /// shrunk by `ε·I` with `ε = 1e-3·tr(Σ)/L`.
    pub fn fit(features: &FeatureMatrix, labels: &[usize], means: &Matrix) -> Result<Self> {
        let width = features.width();
        let n = features.len();
        if n == 0 {
            return Err(Error::Fit("no samples for covariance".into()));
        }
        let mut centered = DMatrix::<f64>::zeros(n, width);
        for (i, (row, &y)) in features.rows().zip(labels).enumerate() {
            let mu = means.row(y);
            for j in 0..width {
                centered[(i, j)] = row[j] - mu[j];
            }
        }
        let mut cov = centered.transpose() * &centered / n as f64;
        let mut eps = 1e-3 * cov.trace() / width as f64;
        if eps.is_nan() || eps <= 0.0 {
            // Zero within-class spread; fall back to a unit-scale ridge.
            eps = 1e-3;
        }
        for i in 0..width {
            cov[(i, i)] += eps;
        }
        let chol = cov
            .cholesky()
            .ok_or_else(|| Error::Fit("shrunk covariance is not positive definite".into()))?;
        let inv = chol.inverse();
        let sym = (&inv + inv.transpose()) * 0.5;
        // nalgebra is column-major; `sym` is symmetric so the layout does not matter.
        let precision = Matrix::new(width, width, sym.as_slice().to_vec())?;
        Self::new(means.clone(), precision)
    }

    pub fn means(&self) -> &Matrix {
        &self.means
    }

    pub fn precision(&self) -> &Matrix {
        &self.precision
    }

    pub fn squared_distance(&self, h: &[f64], class: usize) -> f64 {
        let mu = self.means.row(class);
        let d: Vec<f64> = h.iter().zip(mu).map(|(a, b)| a - b).collect();
        let mut q = 0.0;
        for (i, di) in d.iter().enumerate() {
            let row = self.precision.row(i);
            let inner: f64 = row.iter().zip(&d).map(|(p, dj)| p * dj).sum();
            q += di * inner;
        }
        q
    }

    /// `−min_c (h−μ_c)ᵀ P (h−μ_c)`.
    pub fn score(&self, h: &[f64]) -> Result<f64> {
        if h.len() != self.means.cols() {
            return Err(Error::dim(format!(
                "feature length {} for gaussian width {}",
                h.len(),
                self.means.cols()
            )));
        }
        let best = (0..self.means.rows())
            .map(|c| self.squared_distance(h, c))
            .fold(f64::INFINITY, f64::min);
        Ok(-best)
    }
}

/// Per-sample trace through the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub predicted_class: usize,
    pub cosine: f64,
    pub raw_logits: Vec<f64>,
    pub modulated_logits: Vec<f64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedDetector {
    head: ClassifierHead,
    masks: MaskMatrix,
    prototypes: Prototypes,
    lambda: f64,
    config: DetectorConfig,
    gaussian: Option<GaussianModel>,
}

impl FittedDetector {
    /// Builds masks from the head, prototypes from raw training features and
    /// resolves λ. The Gaussian model is fitted only for `Mahalanobis`.
    pub fn fit(
        features: &FeatureMatrix,
        labels: &[usize],
        head: &ClassifierHead,
        config: DetectorConfig,
    ) -> Result<Self> {
        let width = head.width();
        if features.width() != width {
            return Err(Error::dim(format!(
                "features have width {} but head expects {width}",
                features.width()
            )));
        }
        let k = config.resolve_k(width)?;
        let prototypes = Prototypes::compute(features, labels, head.classes())?;
        let lambda = match config.react_mode {
            ReactMode::Explicit(l) => l,
            ReactMode::Percentile(q) => {
                let l = percentile(features.as_slice(), q)?;
                if l < 0.0 {
                    return Err(Error::Fit(format!(
                        "percentile {q} of training activations is negative ({l})"
                    )));
                }
                l
            }
        };
        let masks = build_masks(head.weights(), k)?;
        let gaussian = match config.score_method {
            ScoreMethod::Mahalanobis => {
                Some(GaussianModel::fit(features, labels, prototypes.vectors())?)
            }
            _ => None,
        };
        Ok(Self {
            head: head.clone(),
            masks,
            prototypes,
            lambda,
            config,
            gaussian,
        })
    }

    /// Reassembles a detector from stored parts, checking that dimensions agree.
    pub fn from_parts(
        head: ClassifierHead,
        masks: MaskMatrix,
        prototypes: Prototypes,
        lambda: f64,
        config: DetectorConfig,
        gaussian: Option<GaussianModel>,
    ) -> Result<Self> {
        config.validate()?;
        check_lambda(lambda)?;
        let (l, c) = (head.width(), head.classes());
        if (masks.width(), masks.classes()) != (l, c) {
            return Err(Error::dim(format!(
                "mask is {}x{}, head is {l}x{c}",
                masks.width(),
                masks.classes()
            )));
        }
        if prototypes.vectors().shape() != (c, l) {
            return Err(Error::dim(format!(
                "prototypes are {:?}, expected {c}x{l}",
                prototypes.vectors().shape()
            )));
        }
        if let Some(g) = &gaussian {
            if g.means().shape() != (c, l) {
                return Err(Error::dim("gaussian means do not match head"));
            }
        }
        if config.score_method == ScoreMethod::Mahalanobis && gaussian.is_none() {
            return Err(Error::InvalidState(
                "mahalanobis detector without gaussian".into(),
            ));
        }
        Ok(Self {
            head,
            masks,
            prototypes,
            lambda,
            config,
            gaussian,
        })
    }

    pub fn head(&self) -> &ClassifierHead {
        &self.head
    }

    pub fn masks(&self) -> &MaskMatrix {
        &self.masks
    }

    pub fn prototypes(&self) -> &Prototypes {
        &self.prototypes
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn gaussian(&self) -> Option<&GaussianModel> {
        self.gaussian.as_ref()
    }

    pub fn width(&self) -> usize {
        self.head.width()
    }

    pub fn classes(&self) -> usize {
        self.head.classes()
    }

    /// Copy with different stage toggles; masks, prototypes and λ are shared.
    pub fn with_stages(&self, react: bool, mask: bool, smoothing: bool) -> Self {
        let mut d = self.clone();
        d.config = d.config.with_stages(react, mask, smoothing);
        d
    }

    /// Copy with a different score method. Fits nothing new, so switching to
    /// `Mahalanobis` requires a detector that already carries a Gaussian.
    pub fn with_method(&self, method: ScoreMethod) -> Result<Self> {
        method.validate()?;
        if method == ScoreMethod::Mahalanobis && self.gaussian.is_none() {
            return Err(Error::InvalidState(
                "mahalanobis requires a fitted gaussian".into(),
            ));
        }
        let mut d = self.clone();
        d.config.score_method = method;
        Ok(d)
    }

    pub fn score(&self, h: &[f64]) -> Result<ScoreRecord> {
        if h.len() != self.width() {
            return Err(Error::dim(format!(
                "feature length {} for detector width {}",
                h.len(),
                self.width()
            )));
        }
        if h.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("feature vector"));
        }
        let raw_logits = self.head.forward(h)?;
        let class = argmax(&raw_logits).expect("head has at least one class");
        let cos = cosine(h, self.prototypes.vector(class))?;

        let mut feat = if self.config.enable_mask {
            apply_mask(h, &self.masks, class)?
        } else {
            h.to_vec()
        };
        if self.config.enable_react {
            for x in &mut feat {
                *x = x.min(self.lambda);
            }
        }
        let mut logits = self.head.forward(&feat)?;
        if self.config.enable_smoothing {
            for f in &mut logits {
                *f *= cos;
            }
        }
        let score = match self.config.score_method {
            ScoreMethod::Mahalanobis => self.mahalanobis(h)?,
            m => m.score_logits(&logits)?,
        };
        Ok(ScoreRecord {
            predicted_class: class,
            cosine: cos,
            raw_logits,
            modulated_logits: logits,
            score,
        })
    }

    pub fn score_batch(&self, features: &FeatureMatrix) -> Result<Vec<ScoreRecord>> {
        features.rows().map(|h| self.score(h)).collect()
    }

    /// Baseline score on unmodified logits, ignoring the stage toggles.
    pub fn score_baseline(&self, h: &[f64], method: ScoreMethod) -> Result<f64> {
        method.validate()?;
        match method {
            ScoreMethod::Mahalanobis => self.mahalanobis(h),
            ScoreMethod::EnergyReAct => {
                let clipped = react_clip(h, self.lambda)?;
                logsumexp(&self.head.forward(&clipped)?)
            }
            m => m.score_logits(&self.head.forward(h)?),
        }
    }

    fn mahalanobis(&self, h: &[f64]) -> Result<f64> {
        self.gaussian
            .as_ref()
            .ok_or_else(|| Error::InvalidState("mahalanobis requires a fitted gaussian".into()))?
            .score(h)
    }
}
