//! Dense kernels shared by the detector, metrics and generator.
//!
//! Everything here works in `f64` regardless of how the data was stored on
//! disk. The scalar kernels take plain slices so that callers can pass either
//! a [`Vector`] or a borrowed row of a [`Matrix`].

use std::ops::Deref;

use crate::error::{Error, Result};

/// A non-empty vector of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::dim("vector must have at least one entry"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(Self(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// Row-major dense matrix with at least one row and one column.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim(format!(
                "matrix shape {rows}x{cols} has an empty axis"
            )));
        }
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::dim(format!(
                "matrix shape {rows}x{cols} does not match {} stored elements",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dim("ragged rows"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |r| self.get(r, col))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            data.extend(self.column(c));
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }
}

/// `log Σ exp(v_k)`, shifted by the maximum so large logits do not overflow.
pub fn logsumexp(v: &[f64]) -> Result<f64> {
    let max = max_value(v)?;
    if max.is_infinite() {
        return Ok(max);
    }
    let sum: f64 = v.iter().map(|x| (x - max).exp()).sum();
    Ok(max + sum.ln())
}

/// Softmax of `v / tau`.
pub fn softmax(v: &[f64], tau: f64) -> Result<Vec<f64>> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::param(format!(
            "softmax temperature must be > 0, got {tau}"
        )));
    }
    let max = max_value(v)?;
    let mut out: Vec<f64> = v.iter().map(|x| ((x - max) / tau).exp()).collect();
    let sum: f64 = out.iter().sum();
    for p in &mut out {
        *p /= sum;
    }
    Ok(out)
}

/// Shannon entropy (nats) of a probability vector; zero entries contribute 0.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

pub fn dot(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::dim(format!(
            "dot of lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    Ok(u.iter().zip(v).map(|(a, b)| a * b).sum())
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine similarity. A zero-norm argument yields exactly 0.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    let d = dot(u, v)?;
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((d / (nu * nv)).clamp(-1.0, 1.0))
}

/// Affine classifier head: `out_c = Σ_l W[l][c]·h[l] + b[c]` with `W` stored `L×C`.
pub fn head_forward(weights: &Matrix, bias: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    let (l, c) = weights.shape();
    if bias.len() != c {
        return Err(Error::dim(format!(
            "bias length {} for {c} classes",
            bias.len()
        )));
    }
    if h.len() != l {
        return Err(Error::dim(format!(
            "feature length {} for head width {l}",
            h.len()
        )));
    }
    let mut out = bias.to_vec();
    for (row, &x) in h.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (o, w) in out.iter_mut().zip(weights.row(row)) {
            *o += w * x;
        }
    }
    Ok(out)
}

/// Index of the maximum; ties go to the lowest index.
pub fn argmax(v: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &x) in v.iter().enumerate() {
        match best {
            Some((_, b)) if x <= b => {}
            _ => best = Some((i, x)),
        }
    }
    best.map(|(i, _)| i)
}

fn max_value(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::dim("empty vector"));
    }
    Ok(v.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn logsumexp_examples() {
        assert!((logsumexp(&[0.0, 0.0]).unwrap() - LN2).abs() < 1e-15);
        assert!((logsumexp(&[1000.0, 1000.0]).unwrap() - (1000.0 + LN2)).abs() < 1e-12);
        // e + e^2 + e^3 summed directly: all terms are small enough not to overflow.
        let direct = (1f64.exp() + 2f64.exp() + 3f64.exp()).ln();
        assert!((direct - 3.407606).abs() < 1e-6);
        assert!((logsumexp(&[1.0, 2.0, 3.0]).unwrap() - direct).abs() < 1e-14);
        assert!(matches!(logsumexp(&[]), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn logsumexp_does_not_overflow() {
        let v = [1e4, -1e4, 9999.0];
        let r = logsumexp(&v).unwrap();
        assert!(r.is_finite());
        assert!(r >= 1e4 && r <= 1e4 + 3f64.ln());
    }

    #[test]
    fn softmax_examples() {
        let e2 = 2f64.exp();
        let p = softmax(&[2.0, 0.0], 1.0).unwrap();
        assert!((p[0] - e2 / (e2 + 1.0)).abs() < 1e-15);
        assert!((p[0] - 0.880797).abs() < 1e-6 && (p[1] - 0.119203).abs() < 1e-6);

        let p = softmax(&[5.0, -3.0, 7.0], 1e12).unwrap();
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-9);
        }

        let half = softmax(&[2.0, 0.0], 0.5).unwrap();
        let scaled = softmax(&[4.0, 0.0], 1.0).unwrap();
        assert!((half[0] - scaled[0]).abs() < 1e-15);
        assert!((half[0] - 0.982014).abs() < 1e-6 && (half[1] - 0.017986).abs() < 1e-6);
    }

    #[test]
    fn softmax_rejects_bad_temperature() {
        assert!(matches!(
            softmax(&[1.0], 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            softmax(&[1.0], -2.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            softmax(&[1.0], f64::NAN),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn cosine_examples() {
        assert!((cosine(&[3.0, 4.0], &[3.0, 4.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine(&[2.0, 1.0], &[1.0, 0.0]).unwrap() - 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((cosine(&[2.0, 1.0], &[1.0, 0.0]).unwrap() - 0.894427).abs() < 1e-6);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(matches!(
            cosine(&[1.0], &[1.0, 2.0]),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn head_forward_examples() {
        let eye = Matrix::identity(2).unwrap();
        assert_eq!(
            head_forward(&eye, &[0.0, 0.0], &[2.0, 1.0]).unwrap(),
            vec![2.0, 1.0]
        );
        assert_eq!(
            head_forward(&eye, &[1.0, -1.0], &[0.0, 0.0]).unwrap(),
            vec![1.0, -1.0]
        );
        let col = Matrix::new(3, 1, vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(
            head_forward(&col, &[0.5], &[1.0, 2.0, 3.0]).unwrap(),
            vec![6.5]
        );
        assert!(head_forward(&col, &[0.5, 0.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(head_forward(&col, &[0.5], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn construction_rejects_non_finite() {
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            Vector::new(vec![]),
            Err(Error::InvalidDimension(_))
        ));
        assert!(Matrix::new(2, 2, vec![0.0, 1.0, f64::INFINITY, 0.0]).is_err());
        assert!(Matrix::new(2, 3, vec![0.0; 5]).is_err());
        assert!(Matrix::new(0, 3, vec![]).is_err());
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), Some(1));
        assert_eq!(argmax(&[0.0, 0.0]), Some(0));
        assert_eq!(argmax(&[]), None);
    }

    fn vec_strategy(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-50.0f64..50.0, 1..=max_len)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn logsumexp_shift_invariant(v in vec_strategy(64), c in -1e3f64..1e3) {
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            let lhs = logsumexp(&shifted).unwrap();
            let rhs = logsumexp(&v).unwrap() + c;
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }

        #[test]
        fn logsumexp_bounds(v in vec_strategy(64)) {
            let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let r = logsumexp(&v).unwrap();
            prop_assert!(r >= m);
            prop_assert!(r <= m + (v.len() as f64).ln() + 1e-12);
        }

        #[test]
        fn softmax_sums_to_one(v in vec_strategy(512), tau in 0.5f64..100.0) {
            let p = softmax(&v, tau).unwrap();
            let s: f64 = p.iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|&x| x > 0.0));
        }

        #[test]
        fn softmax_temperature_is_rescaling(v in vec_strategy(32), tau in 0.1f64..10.0) {
            let a = softmax(&v, tau).unwrap();
            let scaled: Vec<f64> = v.iter().map(|x| x / tau).collect();
            let b = softmax(&scaled, 1.0).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn cosine_scale_invariant(
            pair in (1usize..32).prop_flat_map(|n| (
                prop::collection::vec(-10.0f64..10.0, n),
                prop::collection::vec(-10.0f64..10.0, n),
            )),
            a in 0.01f64..100.0,
        ) {
            let (u, v) = pair;
            let au: Vec<f64> = u.iter().map(|x| a * x).collect();
            let lhs = cosine(&au, &v).unwrap();
            let rhs = cosine(&u, &v).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&lhs));
        }
    }

    #[test]
    fn entropy_decreases_with_logit_scale() {
        let v = [1.0, -0.5, 2.0, 0.3];
        let mut last = f64::INFINITY;
        for s in [0.01, 0.1, 0.5, 1.0, 2.0, 5.0] {
            let scaled: Vec<f64> = v.iter().map(|x| s * x).collect();
            let h = entropy(&softmax(&scaled, 1.0).unwrap());
            assert!(h <= last);
            last = h;
        }
    }

    #[test]
    fn head_forward_matches_triple_loop() {
        // Deterministic pseudo-random fill; independent of the generator module.
        let (l, c) = (64, 16);
        let mut x: u64 = 0x1234_5678;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x % 2001) as f64 / 1000.0 - 1.0
        };
        for _ in 0..20 {
            let w: Vec<f64> = (0..l * c).map(|_| next()).collect();
            let b: Vec<f64> = (0..c).map(|_| next()).collect();
            let h: Vec<f64> = (0..l).map(|_| next()).collect();
            let m = Matrix::new(l, c, w.clone()).unwrap();
            let out = head_forward(&m, &b, &h).unwrap();
            for j in 0..c {
                let mut acc = b[j];
                for i in 0..l {
                    acc += w[i * c + j] * h[i];
                }
                assert!((acc - out[j]).abs() < 1e-9);
            }
        }
    }
}
