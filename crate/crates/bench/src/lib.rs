//! Shared fixtures for the criterion benches.

use oodgate::dataio::{gen_synthetic, SyntheticDataset, SyntheticSpec};
use oodgate::{DetectorConfig, FittedDetector, ReactMode};

/// The reference benchmark scaled down by `shrink` in sample counts.
pub fn dataset(shrink: usize) -> SyntheticDataset {
    let base = SyntheticSpec::benchmark();
    gen_synthetic(&SyntheticSpec {
        n_id_per_class: (base.n_id_per_class / shrink).max(1),
        n_ood: (base.n_ood / shrink).max(1),
        ..base
    })
    .expect("benchmark spec is valid")
}

pub fn full_method_config() -> DetectorConfig {
    DetectorConfig {
        react_mode: ReactMode::Percentile(90.0),
        ..DetectorConfig::default()
    }
}

pub fn fitted(data: &SyntheticDataset) -> FittedDetector {
    let labels = data.train.labels().expect("generator labels training data");
    FittedDetector::fit(&data.train, labels, &data.head, full_method_config()).expect("fit")
}
