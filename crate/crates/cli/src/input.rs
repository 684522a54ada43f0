//! Loading OODF and CSV inputs named as `PATH[#SET]`.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use oodgate::dataio::{read_csv_features, read_oodf, OodfContainer};
use oodgate::{ClassifierHead, Error, FeatureMatrix, FittedDetector};

use crate::CliError;

/// Splits `path#set`. The last `#` wins, so paths may contain `#` when a set is named.
pub fn split_spec(spec: &str) -> (&str, Option<&str>) {
    match spec.rsplit_once('#') {
        Some((path, name)) if !name.is_empty() => (path, Some(name)),
        _ => (spec, None),
    }
}

pub fn read_container(path: &Path) -> Result<OodfContainer, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_oodf(BufReader::new(file)).map_err(|e| CliError::at(path, e))
}

pub fn read_detector(path: &Path) -> Result<FittedDetector, CliError> {
    read_container(path)?
        .fitted_detector()
        .map_err(|e| CliError::at(path, e))
}

/// Features plus the head stored alongside them, if any.
pub fn read_features(
    spec: &str,
    default_set: &str,
) -> Result<(FeatureMatrix, Option<ClassifierHead>), CliError> {
    let (path, name) = split_spec(spec);
    let path = Path::new(path);
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let features =
            read_csv_features(BufReader::new(file)).map_err(|e| CliError::at(path, e))?;
        return Ok((features, None));
    }
    let container = read_container(path)?;
    let set = match name {
        Some(n) => container.feature_sets.iter().find(|s| s.name == n),
        None if container.feature_sets.len() == 1 => container.feature_sets.first(),
        None => container
            .feature_sets
            .iter()
            .find(|s| s.name == default_set),
    };
    let Some(set) = set else {
        let names: Vec<&str> = container
            .feature_sets
            .iter()
            .map(|s| s.name.as_str())
            .collect();
        let wanted = name.unwrap_or(default_set);
        return Err(CliError::at(
            path,
            Error::InvalidInput(format!("no feature set {wanted:?}; available: {names:?}")),
        ));
    };
    Ok((set.features.clone(), container.head))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_splitting() {
        assert_eq!(split_spec("x.oodf"), ("x.oodf", None));
        assert_eq!(split_spec("x.oodf#train"), ("x.oodf", Some("train")));
        assert_eq!(
            split_spec("a#b.oodf#test_id"),
            ("a#b.oodf", Some("test_id"))
        );
        assert_eq!(split_spec("x.oodf#"), ("x.oodf#", None));
    }
}
