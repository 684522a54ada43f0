//! Plain-text fixture importer.
//!
//! Header `l0,l1,…,l{L-1}` with an optional trailing `label` column, then one
//! sample per line.

use std::io::Read;

use crate::error::{Error, Result};
use crate::model::FeatureMatrix;

pub fn read_csv_features<R: Read>(source: R) -> Result<FeatureMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .clone();
    let mut names: Vec<&str> = header.iter().collect();
    let has_label = names.last() == Some(&"label");
    if has_label {
        names.pop();
    }
    if names.is_empty() {
        return Err(Error::Csv("header declares no feature columns".into()));
    }
    for (i, name) in names.iter().enumerate() {
        if *name != format!("l{i}") {
            return Err(Error::Csv(format!(
                "column {i} is {name:?}, expected \"l{i}\""
            )));
        }
    }
    let width = names.len();

    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        let row = line + 2;
        if record.len() != header.len() {
            return Err(Error::Csv(format!("row {row} has {} fields", record.len())));
        }
        for field in record.iter().take(width) {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Csv(format!("row {row}: {field:?} is not a number")))?;
            data.push(v);
        }
        if has_label {
            let field = &record[width];
            labels.push(
                field
                    .parse::<usize>()
                    .map_err(|_| Error::Csv(format!("row {row}: bad label {field:?}")))?,
            );
        }
    }
    FeatureMatrix::new(width, data, has_label.then_some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_labelled_fixture() {
        let text = "l0,l1,label\n1.0,2.5,0\n-3, 0.25 ,1\n";
        let f = read_csv_features(text.as_bytes()).unwrap();
        assert_eq!(f.width(), 2);
        assert_eq!(f.row(1), &[-3.0, 0.25]);
        assert_eq!(f.labels(), Some(&[0usize, 1][..]));
    }

    #[test]
    fn reads_unlabelled_and_empty() {
        let f = read_csv_features("l0,l1,l2\n1,2,3\n".as_bytes()).unwrap();
        assert!(f.labels().is_none());
        assert_eq!(f.len(), 1);
        let e = read_csv_features("l0\n".as_bytes()).unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_csv_features("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_csv_features("l0,l1\n1\n".as_bytes()).is_err());
        assert!(read_csv_features("l0,label\nx,0\n".as_bytes()).is_err());
        assert!(read_csv_features("l0,label\n1,-1\n".as_bytes()).is_err());
        assert!(read_csv_features("label\n1\n".as_bytes()).is_err());
    }
}
