//! Post-hoc out-of-distribution scoring on penultimate-layer features.
//!
//! Given exported features `h(x)` and the affine classifier head `(W, b)`,
//! [`FittedDetector`] applies three independent stages before an energy (or
//! other logit-based) score:
//!
//! * **feature masking**: keep only the `k` channels with the largest head
//!   weights for the predicted class;
//! * **ReAct**: clip activations at `λ`;
//! * **logit smoothing**: scale logits by the cosine between `h(x)` and the
//!   predicted class prototype.
//!
//! [`metrics`] provides FPR at 95% TPR and AUROC, [`dataio`] the OODF binary
//! container and a seeded synthetic benchmark.

pub mod dataio;
pub mod detector;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod model;
pub mod numcore;

pub use detector::{
    apply_mask, build_masks, percentile, react_clip, DetectorConfig, FittedDetector, GaussianModel,
    MaskMatrix, Preset, Prototypes, ReactMode, ScoreMethod, ScoreRecord,
};
pub use error::{Error, Result};
pub use metrics::{
    auroc, detect, fpr_at_tpr, histogram, Decision, EvalReport, Histogram, ScoreSet,
};
pub use model::{ClassifierHead, FeatureMatrix};
pub use numcore::{cosine, head_forward, logsumexp, softmax, Matrix, Vector};
