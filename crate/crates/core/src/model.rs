use crate::error::{Error, Result};
use crate::numcore::{head_forward, Matrix};

/// Final affine layer of a classifier: `W` is `L×C`, `b` has `C` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierHead {
    weights: Matrix,
    bias: Vec<f64>,
}

impl ClassifierHead {
    pub fn new(weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if bias.len() != weights.cols() {
            return Err(Error::dim(format!(
                "bias has {} entries but head has {} classes",
                bias.len(),
                weights.cols()
            )));
        }
        if bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("bias"));
        }
        Ok(Self { weights, bias })
    }

    /// Feature width `L`.
    pub fn width(&self) -> usize {
        self.weights.rows()
    }

    /// Class count `C`.
    pub fn classes(&self) -> usize {
        self.weights.cols()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn forward(&self, h: &[f64]) -> Result<Vec<f64>> {
        head_forward(&self.weights, &self.bias, h)
    }
}

/// `N×L` penultimate activations, optionally labelled. `N` may be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    width: usize,
    data: Vec<f64>,
    labels: Option<Vec<usize>>,
}

impl FeatureMatrix {
    pub fn new(width: usize, data: Vec<f64>, labels: Option<Vec<usize>>) -> Result<Self> {
        if width == 0 {
            return Err(Error::dim("feature width must be at least 1"));
        }
        if !data.len().is_multiple_of(width) {
            return Err(Error::dim(format!(
                "{} values do not form rows of width {width}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        let n = data.len() / width;
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::dim(format!(
                    "{} labels for {n} samples",
                    labels.len()
                )));
            }
        }
        Ok(Self {
            width,
            data,
            labels,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Option<Vec<usize>>) -> Result<Self> {
        let width = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::dim("cannot infer width from zero rows"))?;
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::dim("ragged feature rows"));
        }
        Self::new(width, rows.concat(), labels)
    }

    pub fn empty(width: usize) -> Result<Self> {
        Self::new(width, Vec::new(), None)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.width)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Option<Vec<usize>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != self.len() {
                return Err(Error::dim(format!(
                    "{} labels for {} samples",
                    l.len(),
                    self.len()
                )));
            }
        }
        self.labels = labels;
        Ok(self)
    }
}
