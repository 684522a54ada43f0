//! Run manifests: enough to re-run a command and get byte-identical outputs.

use std::path::{Path, PathBuf};

use oodgate::{DetectorConfig, ReactMode};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Arguments after the program name, as given. Relative paths resolve
    /// against the working directory of the replay.
    pub argv: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub config: Option<ConfigRecord>,
    pub seed: Option<u64>,
}

/// `DetectorConfig` in plain fields. `react_mode` is `explicit:<λ>` or
/// `percentile:<q>` so that `λ = inf` survives JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub masking_percentile: f64,
    pub react_mode: String,
    pub enable_mask: bool,
    pub enable_react: bool,
    pub enable_smoothing: bool,
    pub score_method: String,
}

impl From<&DetectorConfig> for ConfigRecord {
    fn from(c: &DetectorConfig) -> Self {
        let react_mode = match c.react_mode {
            ReactMode::Explicit(l) => format!("explicit:{l}"),
            ReactMode::Percentile(q) => format!("percentile:{q}"),
        };
        Self {
            masking_percentile: c.masking_percentile,
            react_mode,
            enable_mask: c.enable_mask,
            enable_react: c.enable_react,
            enable_smoothing: c.enable_smoothing,
            score_method: c.score_method.to_string(),
        }
    }
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// `<out>.manifest.json` beside a file output, `<dir>/manifest.json` for a directory.
pub fn manifest_path(primary_output: &Path, is_dir: bool) -> PathBuf {
    if is_dir {
        primary_output.join("manifest.json")
    } else {
        let mut name = primary_output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_keeps_infinite_lambda() {
        let config = DetectorConfig {
            react_mode: ReactMode::Explicit(f64::INFINITY),
            ..DetectorConfig::default()
        };
        let m = RunManifest {
            subcommand: "fit".into(),
            argv: vec!["fit".into(), "--lambda".into(), "inf".into()],
            inputs: vec!["x.oodf".into()],
            outputs: vec!["d.oodf".into()],
            config: Some(ConfigRecord::from(&config)),
            seed: None,
        };
        let json = m.to_json();
        assert!(json.contains("explicit:inf"));
        assert_eq!(RunManifest::from_json(&json).unwrap(), m);
    }

    #[test]
    fn paths() {
        assert_eq!(
            manifest_path(Path::new("a/r.tsv"), false),
            Path::new("a/r.tsv.manifest.json")
        );
        assert_eq!(
            manifest_path(Path::new("d"), true),
            Path::new("d/manifest.json")
        );
    }
}
