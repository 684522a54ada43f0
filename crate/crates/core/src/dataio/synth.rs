//! Seeded Gaussian-blob benchmark with a known mask structure.
//!
//! Class `c` owns the channel block `[c·B, (c+1)·B)` with `B = ⌊L/C⌋`; its
//! mean is `cluster_sep` on that block and zero elsewhere, and the head column
//! is the unit-normalised mean with zero bias. Everything is drawn from one
//! SplitMix64 stream in a fixed order: training samples class by class, then
//! ID test samples in the same order, then OOD samples.

use std::fmt;
use std::str::FromStr;

use crate::dataio::rng::{NormalStream, SplitMix64};
use crate::error::{Error, Result};
use crate::model::{ClassifierHead, FeatureMatrix};
use crate::numcore::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OodMode {
    /// i.i.d. uniform `[lo, hi)` per coordinate.
    UniformNoise { lo: f64, hi: f64 },
    /// A noisy copy of a random class mean with `strength` added to every
    /// channel outside that class's block.
    OffMaskActivation { strength: f64 },
    /// `alpha·μ_c + (1−alpha)·u` with `u` uniform on `[0, cluster_sep)` per coordinate.
    PrototypeBlend { alpha: f64 },
}

impl fmt::Display for OodMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OodMode::UniformNoise { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            OodMode::OffMaskActivation { strength } => write!(f, "off-mask:{strength}"),
            OodMode::PrototypeBlend { alpha } => write!(f, "blend:{alpha}"),
        }
    }
}

impl FromStr for OodMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::param(format!("ood mode {s:?} is missing a parameter")))?
                .parse()
                .map_err(|_| Error::param(format!("bad number in ood mode {s:?}")))
        };
        let mode = match parts[0] {
            "uniform" if parts.len() == 3 => OodMode::UniformNoise {
                lo: num(1)?,
                hi: num(2)?,
            },
            "off-mask" if parts.len() == 2 => OodMode::OffMaskActivation { strength: num(1)? },
            "blend" if parts.len() == 2 => OodMode::PrototypeBlend { alpha: num(1)? },
            _ => return Err(Error::param(format!("unknown ood mode {s:?}"))),
        };
        Ok(mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub width: usize,
    pub classes: usize,
    pub n_id_per_class: usize,
    pub n_ood: usize,
    pub cluster_sep: f64,
    pub cluster_std: f64,
    pub ood_mode: OodMode,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Reference benchmark: 512 channels, 10 classes, off-mask OOD at strength 2.
    pub fn benchmark() -> Self {
        Self {
            width: 512,
            classes: 10,
            n_id_per_class: 200,
            n_ood: 2000,
            cluster_sep: 4.0,
            cluster_std: 0.25,
            ood_mode: OodMode::OffMaskActivation { strength: 2.0 },
            seed: 42,
        }
    }

    pub fn block_size(&self) -> usize {
        self.width / self.classes.max(1)
    }

    /// Channels owned by `class`.
    pub fn block(&self, class: usize) -> std::ops::Range<usize> {
        let b = self.block_size();
        class * b..(class + 1) * b
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.classes == 0 || self.n_id_per_class == 0 || self.n_ood == 0 {
            return Err(Error::param("synthetic counts must all be >= 1"));
        }
        if self.classes > self.width {
            return Err(Error::param(format!(
                "{} classes cannot own disjoint blocks of {} channels",
                self.classes, self.width
            )));
        }
        if !(self.cluster_sep > 0.0 && self.cluster_sep.is_finite()) {
            return Err(Error::param("cluster_sep must be finite and > 0"));
        }
        if !(self.cluster_std >= 0.0 && self.cluster_std.is_finite()) {
            return Err(Error::param("cluster_std must be finite and >= 0"));
        }
        match self.ood_mode {
            OodMode::UniformNoise { lo, hi } if !(lo < hi && lo.is_finite() && hi.is_finite()) => {
                Err(Error::param("uniform OOD range must satisfy lo < hi"))
            }
            OodMode::OffMaskActivation { strength } if !strength.is_finite() => {
                Err(Error::param("off-mask strength must be finite"))
            }
            OodMode::PrototypeBlend { alpha } if !(0.0..=1.0).contains(&alpha) => {
                Err(Error::param("blend alpha must lie in [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// Class mean `μ_c`.
    pub fn mean(&self, class: usize) -> Vec<f64> {
        let mut mu = vec![0.0; self.width];
        for x in &mut mu[self.block(class)] {
            *x = self.cluster_sep;
        }
        mu
    }
}

impl fmt::Display for SyntheticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "l={},c={},n-id={},n-ood={},sep={},std={},ood={},seed={}",
            self.width,
            self.classes,
            self.n_id_per_class,
            self.n_ood,
            self.cluster_sep,
            self.cluster_std,
            self.ood_mode,
            self.seed
        )
    }
}

impl FromStr for SyntheticSpec {
    type Err = Error;

    /// Comma-separated `key=value` overrides on top of [`SyntheticSpec::benchmark`].
    /// Keys: `l`, `c`, `n-id`, `n-ood`, `sep`, `std`, `ood`, `seed`.
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = Self::benchmark();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::param(format!("expected key=value, got {item:?}")))?;
            let bad = || Error::param(format!("bad value for {key}: {value:?}"));
            match key {
                "l" => spec.width = value.parse().map_err(|_| bad())?,
                "c" => spec.classes = value.parse().map_err(|_| bad())?,
                "n-id" => spec.n_id_per_class = value.parse().map_err(|_| bad())?,
                "n-ood" => spec.n_ood = value.parse().map_err(|_| bad())?,
                "sep" => spec.cluster_sep = value.parse().map_err(|_| bad())?,
                "std" => spec.cluster_std = value.parse().map_err(|_| bad())?,
                "ood" => spec.ood_mode = value.parse()?,
                "seed" => spec.seed = value.parse().map_err(|_| bad())?,
                _ => return Err(Error::param(format!("unknown synthetic key {key:?}"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub head: ClassifierHead,
    pub train: FeatureMatrix,
    pub test_id: FeatureMatrix,
    pub test_ood: FeatureMatrix,
}

pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let (l, c) = (spec.width, spec.classes);
    let means: Vec<Vec<f64>> = (0..c).map(|k| spec.mean(k)).collect();

    let mut w = vec![0.0; l * c];
    for (k, mu) in means.iter().enumerate() {
        let norm = mu.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (row, x) in mu.iter().enumerate() {
            w[row * c + k] = x / norm;
        }
    }
    let head = ClassifierHead::new(Matrix::new(l, c, w)?, vec![0.0; c])?;

    let mut normals = NormalStream::new(SplitMix64::new(spec.seed));
    let id_split = |normals: &mut NormalStream| -> Result<FeatureMatrix> {
        let mut data = Vec::with_capacity(c * spec.n_id_per_class * l);
        let mut labels = Vec::with_capacity(c * spec.n_id_per_class);
        for (k, mu) in means.iter().enumerate() {
            for _ in 0..spec.n_id_per_class {
                data.extend(
                    mu.iter()
                        .map(|m| m + spec.cluster_std * normals.next_normal()),
                );
                labels.push(k);
            }
        }
        FeatureMatrix::new(l, data, Some(labels))
    };
    let train = id_split(&mut normals)?;
    let test_id = id_split(&mut normals)?;

    let mut data = Vec::with_capacity(spec.n_ood * l);
    for _ in 0..spec.n_ood {
        match spec.ood_mode {
            OodMode::UniformNoise { lo, hi } => {
                for _ in 0..l {
                    data.push(lo + (hi - lo) * (1.0 - normals.rng().next_unit()));
                }
            }
            OodMode::OffMaskActivation { strength } => {
                let k = normals.rng().next_below(c as u64) as usize;
                let block = spec.block(k);
                for (row, m) in means[k].iter().enumerate() {
                    let mut x = m + spec.cluster_std * normals.next_normal();
                    if !block.contains(&row) {
                        x += strength;
                    }
                    data.push(x);
                }
            }
            OodMode::PrototypeBlend { alpha } => {
                let k = normals.rng().next_below(c as u64) as usize;
                for m in &means[k] {
                    let u = spec.cluster_sep * (1.0 - normals.rng().next_unit());
                    data.push(alpha * m + (1.0 - alpha) * u);
                }
            }
        }
    }
    let test_ood = FeatureMatrix::new(l, data, None)?;
    Ok(SyntheticDataset {
        head,
        train,
        test_id,
        test_ood,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SyntheticSpec {
        SyntheticSpec {
            width: 20,
            classes: 4,
            n_id_per_class: 5,
            n_ood: 7,
            seed: 9,
            ..SyntheticSpec::benchmark()
        }
    }

    #[test]
    fn shapes_and_head() {
        let d = gen_synthetic(&small()).unwrap();
        assert_eq!(d.train.len(), 20);
        assert_eq!(d.test_id.len(), 20);
        assert_eq!(d.test_ood.len(), 7);
        assert!(d.test_ood.labels().is_none());
        assert_eq!(d.train.labels().unwrap()[..6], [0, 0, 0, 0, 0, 1]);
        let w = d.head.weights();
        // Block of 5 channels at 1/sqrt(5).
        assert!((w.get(5, 1) - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(w.get(0, 1), 0.0);
        assert!(d.head.bias().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn zero_std_collapses_to_means() {
        let spec = SyntheticSpec {
            cluster_std: 0.0,
            ..small()
        };
        let d = gen_synthetic(&spec).unwrap();
        for (row, &y) in d.train.rows().zip(d.train.labels().unwrap()) {
            assert_eq!(row, spec.mean(y).as_slice());
        }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = gen_synthetic(&small()).unwrap();
        let b = gen_synthetic(&small()).unwrap();
        assert_eq!(a, b);
        let firsts: Vec<Vec<f64>> = (0..20u64)
            .map(|seed| {
                gen_synthetic(&SyntheticSpec { seed, ..small() })
                    .unwrap()
                    .train
                    .row(0)
                    .to_vec()
            })
            .collect();
        for i in 0..firsts.len() {
            for j in 0..i {
                assert_ne!(firsts[i], firsts[j]);
            }
        }
    }

    #[test]
    fn other_modes_generate() {
        let u = SyntheticSpec {
            ood_mode: OodMode::UniformNoise { lo: -1.0, hi: 1.0 },
            ..small()
        };
        let d = gen_synthetic(&u).unwrap();
        assert!(d
            .test_ood
            .as_slice()
            .iter()
            .all(|&x| (-1.0..1.0).contains(&x)));
        let b = SyntheticSpec {
            ood_mode: OodMode::PrototypeBlend { alpha: 1.0 },
            ..small()
        };
        let d = gen_synthetic(&b).unwrap();
        for row in d.test_ood.rows() {
            assert!((0..4).any(|k| row == b.mean(k).as_slice()));
        }
    }

    #[test]
    fn off_mask_lifts_out_of_block_channels() {
        let spec = SyntheticSpec {
            width: 40,
            classes: 4,
            n_id_per_class: 250,
            n_ood: 1000,
            cluster_std: 0.1,
            ood_mode: OodMode::OffMaskActivation { strength: 2.0 },
            ..SyntheticSpec::benchmark()
        };
        let d = gen_synthetic(&spec).unwrap();
        // Recover the impersonated class as the block with the largest mean.
        let block_mean = |row: &[f64], k: usize| {
            spec.block(k).map(|i| row[i]).sum::<f64>() / spec.block_size() as f64
        };
        let off_mean = |row: &[f64], k: usize| {
            let r = spec.block(k);
            let vals: Vec<f64> = row
                .iter()
                .enumerate()
                .filter(|(i, _)| !r.contains(i))
                .map(|(_, &x)| x)
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        let mut ood_off = vec![Vec::new(); 4];
        for row in d.test_ood.rows() {
            let k = (0..4)
                .max_by(|&a, &b| block_mean(row, a).total_cmp(&block_mean(row, b)))
                .unwrap();
            ood_off[k].push(off_mean(row, k));
        }
        let mut id_off = vec![Vec::new(); 4];
        for (row, &y) in d.test_id.rows().zip(d.test_id.labels().unwrap()) {
            id_off[y].push(off_mean(row, y));
        }
        let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        for k in 0..4 {
            assert!(!ood_off[k].is_empty());
            assert!(avg(&ood_off[k]) - avg(&id_off[k]) >= 1.5);
        }
    }

    #[test]
    fn spec_parsing() {
        let s: SyntheticSpec = "l=64,c=4,n-id=3,ood=uniform:-1:1,seed=5".parse().unwrap();
        assert_eq!(
            (s.width, s.classes, s.n_id_per_class, s.seed),
            (64, 4, 3, 5)
        );
        assert_eq!(s.ood_mode, OodMode::UniformNoise { lo: -1.0, hi: 1.0 });
        let round: SyntheticSpec = s.to_string().parse().unwrap();
        assert_eq!(round, s);
        assert!("c=0".parse::<SyntheticSpec>().is_err());
        assert!("l=4,c=8".parse::<SyntheticSpec>().is_err());
        assert!("bogus=1".parse::<SyntheticSpec>().is_err());
        assert!("ood=blend:2".parse::<SyntheticSpec>().is_err());
    }
}
