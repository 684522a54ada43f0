//! File formats and the synthetic benchmark generator.

pub mod csv;
pub mod oodf;
pub mod rng;
pub mod synth;

pub use self::csv::read_csv_features;
pub use self::oodf::{read_oodf, write_oodf, DetectorSection, FeatureSet, OodfContainer};
pub use self::rng::{NormalStream, SplitMix64};
pub use self::synth::{gen_synthetic, OodMode, SyntheticDataset, SyntheticSpec};

/// Conventional feature-set names used by the generator and the CLI.
pub mod split {
    pub const TRAIN: &str = "train";
    pub const TEST_ID: &str = "test_id";
    pub const TEST_OOD: &str = "test_ood";
}

impl SyntheticDataset {
    /// Head plus the three splits, tagged with the generator parameters.
    pub fn to_container(&self, spec: &SyntheticSpec) -> OodfContainer {
        let mut c = OodfContainer::with_head(self.head.clone());
        c.push_features(split::TRAIN, self.train.clone());
        c.push_features(split::TEST_ID, self.test_id.clone());
        c.push_features(split::TEST_OOD, self.test_ood.clone());
        c.meta.insert("source".into(), "synthetic".into());
        c.meta.insert("synthetic_spec".into(), spec.to_string());
        c
    }
}
