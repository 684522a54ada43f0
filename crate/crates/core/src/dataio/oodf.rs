//! OODF: little-endian container for heads, feature sets and fitted detectors.
//!
//! ```text
//! "OODF" | u32 version=1 | u32 L | u32 C | u32 section count
//! per section: [u8; 4] tag | u64 payload length | payload
//! ```
//!
//! Arrays are row-major `f32`, labels and counts `u32`, configuration scalars
//! `f64`. Section payloads:
//!
//! * `HEAD`: `u32 L, u32 C, f32 W[L·C], f32 b[C]`
//! * `FEAT`: `u32 name_len, name, u32 width, u64 N, u32 has_labels, f32 X[N·width], u32 y[N]?`
//! * `DTCT`: `u32 L, u32 C, u32 k, f64 p, u32 react_tag, f64 react_value,
//!   u32 method_tag, f64 method_param, u32 stage_flags, f64 lambda,
//!   mask bits (row-major, LSB first, ⌈L·C/8⌉ bytes), f32 prototypes[C·L],
//!   u32 counts[C], u32 has_gaussian, [f32 means[C·L], f32 precision[L·L]]`
//! * `META`: `u32 n`, then `n` × (`u32 len, key, u32 len, value`)
//!
//! Sections are written in the order HEAD, FEAT…, DTCT, META. Readers skip
//! tags they do not know.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::detector::{
    DetectorConfig, FittedDetector, GaussianModel, MaskMatrix, Prototypes, ReactMode, ScoreMethod,
};
use crate::error::{Error, Result};
use crate::model::{ClassifierHead, FeatureMatrix};
use crate::numcore::Matrix;

pub const MAGIC: [u8; 4] = *b"OODF";
pub const VERSION: u32 = 1;

const TAG_HEAD: [u8; 4] = *b"HEAD";
const TAG_FEAT: [u8; 4] = *b"FEAT";
const TAG_DTCT: [u8; 4] = *b"DTCT";
const TAG_META: [u8; 4] = *b"META";

const STAGE_MASK: u32 = 1;
const STAGE_REACT: u32 = 2;
const STAGE_SMOOTH: u32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub name: String,
    pub features: FeatureMatrix,
}

/// The detector payload, everything except the head.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSection {
    pub masks: MaskMatrix,
    pub prototypes: Prototypes,
    pub lambda: f64,
    pub config: DetectorConfig,
    pub gaussian: Option<GaussianModel>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OodfContainer {
    pub width: usize,
    pub classes: usize,
    pub head: Option<ClassifierHead>,
    pub feature_sets: Vec<FeatureSet>,
    pub detector: Option<DetectorSection>,
    pub meta: BTreeMap<String, String>,
}

impl OodfContainer {
    pub fn new(width: usize, classes: usize) -> Self {
        Self {
            width,
            classes,
            ..Self::default()
        }
    }

    pub fn with_head(head: ClassifierHead) -> Self {
        let mut c = Self::new(head.width(), head.classes());
        c.head = Some(head);
        c
    }

    pub fn from_detector(det: &FittedDetector) -> Self {
        let mut c = Self::with_head(det.head().clone());
        c.detector = Some(DetectorSection {
            masks: det.masks().clone(),
            prototypes: det.prototypes().clone(),
            lambda: det.lambda(),
            config: *det.config(),
            gaussian: det.gaussian().cloned(),
        });
        c
    }

    pub fn push_features(&mut self, name: impl Into<String>, features: FeatureMatrix) {
        self.feature_sets.push(FeatureSet {
            name: name.into(),
            features,
        });
    }

    pub fn feature_set(&self, name: &str) -> Option<&FeatureMatrix> {
        self.feature_sets
            .iter()
            .find(|s| s.name == name)
            .map(|s| &s.features)
    }

    pub fn fitted_detector(&self) -> Result<FittedDetector> {
        let det = self
            .detector
            .as_ref()
            .ok_or_else(|| Error::InvalidContainer("no detector section".into()))?;
        let head = self
            .head
            .clone()
            .ok_or_else(|| Error::InvalidContainer("detector without head".into()))?;
        FittedDetector::from_parts(
            head,
            det.masks.clone(),
            det.prototypes.clone(),
            det.lambda,
            det.config,
            det.gaussian.clone(),
        )
        .map_err(|e| Error::InvalidContainer(e.to_string()))
    }

    /// Checks that every section agrees with the header dimensions.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidContainer(m));
        let (l, c) = (self.width, self.classes);
        if l == 0 {
            return bad("feature width must be >= 1".into());
        }
        if let Some(h) = &self.head {
            if (h.width(), h.classes()) != (l, c) {
                return bad(format!(
                    "head is {}x{} but container declares {l}x{c}",
                    h.width(),
                    h.classes()
                ));
            }
        }
        for (i, set) in self.feature_sets.iter().enumerate() {
            if set.features.width() != l {
                return bad(format!(
                    "feature set {:?} has width {} but container declares {l}",
                    set.name,
                    set.features.width()
                ));
            }
            if self.feature_sets[..i].iter().any(|s| s.name == set.name) {
                return bad(format!("duplicate feature set {:?}", set.name));
            }
            if let Some(labels) = set.features.labels() {
                if let Some(&y) = labels.iter().find(|&&y| y >= c) {
                    return bad(format!(
                        "label {y} in {:?} out of range for {c} classes",
                        set.name
                    ));
                }
            }
        }
        if let Some(d) = &self.detector {
            if self.head.is_none() {
                return bad("detector section requires a head".into());
            }
            if (d.masks.width(), d.masks.classes()) != (l, c)
                || d.prototypes.vectors().shape() != (c, l)
            {
                return bad("detector dimensions do not match container".into());
            }
            if let Some(g) = &d.gaussian {
                if g.means().shape() != (c, l) {
                    return bad("gaussian dimensions do not match container".into());
                }
            }
        }
        for (k, v) in &self.meta {
            if k.len() > u32::MAX as usize || v.len() > u32::MAX as usize {
                return bad("meta entry too long".into());
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.validate()?;
        let mut sections: Vec<([u8; 4], Vec<u8>)> = Vec::new();
        if let Some(h) = &self.head {
            sections.push((TAG_HEAD, encode_head(h)?));
        }
        for set in &self.feature_sets {
            sections.push((TAG_FEAT, encode_features(set)?));
        }
        if let Some(d) = &self.detector {
            sections.push((TAG_DTCT, encode_detector(d, self.width, self.classes)?));
        }
        if !self.meta.is_empty() {
            sections.push((TAG_META, encode_meta(&self.meta)));
        }

        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        put_u32(&mut out, VERSION);
        put_u32(&mut out, dim32(self.width)?);
        put_u32(&mut out, dim32(self.classes)?);
        put_u32(&mut out, dim32(sections.len())?);
        for (tag, payload) in sections {
            out.extend_from_slice(&tag);
            out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
            out.extend_from_slice(&payload);
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || bytes[..4] != MAGIC {
            return Err(Error::NotOodf);
        }
        let mut r = Cursor::new(&bytes[4..]);
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let width = r.u32()? as usize;
        let classes = r.u32()? as usize;
        let n_sections = r.u32()?;
        let mut c = Self::new(width, classes);
        for _ in 0..n_sections {
            let tag: [u8; 4] = r.take(4)?.try_into().expect("4 bytes");
            let len = usize::try_from(r.u64()?)
                .map_err(|_| Error::Corrupt("section length overflows usize".into()))?;
            let payload = r.take(len)?;
            let mut p = Cursor::new(payload);
            match tag {
                TAG_HEAD => {
                    if c.head.is_some() {
                        return Err(Error::InvalidContainer("duplicate HEAD section".into()));
                    }
                    c.head = Some(decode_head(&mut p)?);
                }
                TAG_FEAT => c.feature_sets.push(decode_features(&mut p)?),
                TAG_DTCT => {
                    if c.detector.is_some() {
                        return Err(Error::InvalidContainer("duplicate DTCT section".into()));
                    }
                    c.detector = Some(decode_detector(&mut p)?);
                }
                TAG_META => c.meta = decode_meta(&mut p)?,
                _ => continue,
            }
            if !p.is_done() {
                return Err(Error::Corrupt(format!(
                    "{} section has {} unparsed bytes",
                    String::from_utf8_lossy(&tag),
                    p.remaining()
                )));
            }
        }
        if !r.is_done() {
            return Err(Error::Corrupt(format!("{} trailing bytes", r.remaining())));
        }
        c.validate()?;
        Ok(c)
    }
}

/// Writes the container and returns the number of bytes emitted.
pub fn write_oodf<W: Write>(container: &OodfContainer, mut sink: W) -> Result<usize> {
    let bytes = container.to_bytes()?;
    sink.write_all(&bytes)?;
    Ok(bytes.len())
}

pub fn read_oodf<R: Read>(mut source: R) -> Result<OodfContainer> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    OodfContainer::from_bytes(&bytes)
}

fn dim32(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::InvalidContainer(format!("{n} does not fit in u32")))
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f32s(out: &mut Vec<u8>, values: &[f64]) -> Result<()> {
    out.reserve(values.len() * 4);
    for &v in values {
        let x = v as f32;
        if !x.is_finite() {
            return Err(Error::InvalidContainer(format!(
                "{v} is not representable as f32"
            )));
        }
        out.extend_from_slice(&x.to_le_bytes());
    }
    Ok(())
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_u32(out, s.len() as u32);
    out.extend_from_slice(s.as_bytes());
}

fn encode_head(h: &ClassifierHead) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    put_u32(&mut out, dim32(h.width())?);
    put_u32(&mut out, dim32(h.classes())?);
    put_f32s(&mut out, h.weights().as_slice())?;
    put_f32s(&mut out, h.bias())?;
    Ok(out)
}

fn encode_features(set: &FeatureSet) -> Result<Vec<u8>> {
    let f = &set.features;
    let mut out = Vec::new();
    put_str(&mut out, &set.name);
    put_u32(&mut out, dim32(f.width())?);
    out.extend_from_slice(&(f.len() as u64).to_le_bytes());
    put_u32(&mut out, u32::from(f.labels().is_some()));
    put_f32s(&mut out, f.as_slice())?;
    if let Some(labels) = f.labels() {
        for &y in labels {
            put_u32(&mut out, dim32(y)?);
        }
    }
    Ok(out)
}

fn react_parts(mode: ReactMode) -> (u32, f64) {
    match mode {
        ReactMode::Explicit(l) => (0, l),
        ReactMode::Percentile(q) => (1, q),
    }
}

fn method_parts(method: ScoreMethod) -> (u32, f64) {
    match method {
        ScoreMethod::Energy => (0, 0.0),
        ScoreMethod::Msp => (1, 0.0),
        ScoreMethod::OdinTemp(t) => (2, t),
        ScoreMethod::Mahalanobis => (3, 0.0),
        ScoreMethod::EnergyReAct => (4, 0.0),
    }
}

fn encode_detector(d: &DetectorSection, l: usize, c: usize) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    put_u32(&mut out, dim32(l)?);
    put_u32(&mut out, dim32(c)?);
    put_u32(&mut out, dim32(d.masks.k())?);
    put_f64(&mut out, d.config.masking_percentile);
    let (rt, rv) = react_parts(d.config.react_mode);
    put_u32(&mut out, rt);
    put_f64(&mut out, rv);
    let (mt, mv) = method_parts(d.config.score_method);
    put_u32(&mut out, mt);
    put_f64(&mut out, mv);
    let mut flags = 0;
    if d.config.enable_mask {
        flags |= STAGE_MASK;
    }
    if d.config.enable_react {
        flags |= STAGE_REACT;
    }
    if d.config.enable_smoothing {
        flags |= STAGE_SMOOTH;
    }
    put_u32(&mut out, flags);
    put_f64(&mut out, d.lambda);
    let mut packed = vec![0u8; d.masks.bits().len().div_ceil(8)];
    for (i, &b) in d.masks.bits().iter().enumerate() {
        if b {
            packed[i / 8] |= 1 << (i % 8);
        }
    }
    out.extend_from_slice(&packed);
    put_f32s(&mut out, d.prototypes.vectors().as_slice())?;
    for &n in d.prototypes.counts() {
        put_u32(&mut out, dim32(n)?);
    }
    match &d.gaussian {
        Some(g) => {
            put_u32(&mut out, 1);
            put_f32s(&mut out, g.means().as_slice())?;
            put_f32s(&mut out, g.precision().as_slice())?;
        }
        None => put_u32(&mut out, 0),
    }
    Ok(out)
}

fn encode_meta(meta: &BTreeMap<String, String>) -> Vec<u8> {
    let mut out = Vec::new();
    put_u32(&mut out, meta.len() as u32);
    for (k, v) in meta {
        put_str(&mut out, k);
        put_str(&mut out, v);
    }
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn is_done(&self) -> bool {
        self.pos == self.buf.len()
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(Error::Corrupt(format!(
                "need {n} bytes at offset {}, only {} left",
                self.pos,
                self.remaining()
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = n
            .checked_mul(4)
            .ok_or_else(|| Error::Corrupt("array length overflows".into()))?;
        let raw = self.take(bytes)?;
        raw.chunks_exact(4)
            .map(|b| {
                let x = f32::from_le_bytes(b.try_into().expect("4 bytes"));
                if x.is_finite() {
                    Ok(f64::from(x))
                } else {
                    Err(Error::Corrupt("non-finite value in array".into()))
                }
            })
            .collect()
    }

    fn str(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| Error::Corrupt("string is not UTF-8".into()))
    }
}

fn corrupt(e: Error) -> Error {
    match e {
        Error::Corrupt(_) => e,
        other => Error::Corrupt(other.to_string()),
    }
}

fn decode_head(p: &mut Cursor<'_>) -> Result<ClassifierHead> {
    let l = p.u32()? as usize;
    let c = p.u32()? as usize;
    let w = p.f32s(
        l.checked_mul(c)
            .ok_or_else(|| Error::Corrupt("head too large".into()))?,
    )?;
    let b = p.f32s(c)?;
    ClassifierHead::new(Matrix::new(l, c, w).map_err(corrupt)?, b).map_err(corrupt)
}

fn decode_features(p: &mut Cursor<'_>) -> Result<FeatureSet> {
    let name = p.str()?;
    let width = p.u32()? as usize;
    let n = usize::try_from(p.u64()?).map_err(|_| Error::Corrupt("sample count".into()))?;
    let has_labels = match p.u32()? {
        0 => false,
        1 => true,
        other => return Err(Error::Corrupt(format!("label flag {other}"))),
    };
    let count = n
        .checked_mul(width)
        .ok_or_else(|| Error::Corrupt("feature block too large".into()))?;
    let data = p.f32s(count)?;
    let labels = if has_labels {
        Some(
            (0..n)
                .map(|_| p.u32().map(|y| y as usize))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let features = FeatureMatrix::new(width, data, labels).map_err(corrupt)?;
    Ok(FeatureSet { name, features })
}

fn decode_detector(p: &mut Cursor<'_>) -> Result<DetectorSection> {
    let l = p.u32()? as usize;
    let c = p.u32()? as usize;
    let k = p.u32()? as usize;
    let masking_percentile = p.f64()?;
    let react_mode = match (p.u32()?, p.f64()?) {
        (0, v) => ReactMode::Explicit(v),
        (1, v) => ReactMode::Percentile(v),
        (t, _) => return Err(Error::Corrupt(format!("react mode tag {t}"))),
    };
    let score_method = match (p.u32()?, p.f64()?) {
        (0, _) => ScoreMethod::Energy,
        (1, _) => ScoreMethod::Msp,
        (2, t) => ScoreMethod::OdinTemp(t),
        (3, _) => ScoreMethod::Mahalanobis,
        (4, _) => ScoreMethod::EnergyReAct,
        (t, _) => return Err(Error::Corrupt(format!("score method tag {t}"))),
    };
    let flags = p.u32()?;
    if flags & !(STAGE_MASK | STAGE_REACT | STAGE_SMOOTH) != 0 {
        return Err(Error::Corrupt(format!("stage flags {flags:#x}")));
    }
    let config = DetectorConfig {
        masking_percentile,
        react_mode,
        enable_mask: flags & STAGE_MASK != 0,
        enable_react: flags & STAGE_REACT != 0,
        enable_smoothing: flags & STAGE_SMOOTH != 0,
        score_method,
    };
    config.validate().map_err(corrupt)?;
    let lambda = p.f64()?;
    let n_bits = l
        .checked_mul(c)
        .ok_or_else(|| Error::Corrupt("mask too large".into()))?;
    let packed = p.take(n_bits.div_ceil(8))?;
    let bits: Vec<bool> = (0..n_bits)
        .map(|i| packed[i / 8] & (1 << (i % 8)) != 0)
        .collect();
    let masks = MaskMatrix::from_bits(l, c, k, bits).map_err(corrupt)?;
    let protos = p.f32s(n_bits)?;
    let counts = (0..c)
        .map(|_| p.u32().map(|n| n as usize))
        .collect::<Result<Vec<_>>>()?;
    let prototypes =
        Prototypes::new(Matrix::new(c, l, protos).map_err(corrupt)?, counts).map_err(corrupt)?;
    let gaussian = match p.u32()? {
        0 => None,
        1 => {
            let means = Matrix::new(c, l, p.f32s(n_bits)?).map_err(corrupt)?;
            let square = l
                .checked_mul(l)
                .ok_or_else(|| Error::Corrupt("precision".into()))?;
            let precision = Matrix::new(l, l, p.f32s(square)?).map_err(corrupt)?;
            Some(GaussianModel::new(means, precision).map_err(corrupt)?)
        }
        other => return Err(Error::Corrupt(format!("gaussian flag {other}"))),
    };
    Ok(DetectorSection {
        masks,
        prototypes,
        lambda,
        config,
        gaussian,
    })
}

fn decode_meta(p: &mut Cursor<'_>) -> Result<BTreeMap<String, String>> {
    let n = p.u32()?;
    let mut meta = BTreeMap::new();
    for _ in 0..n {
        let k = p.str()?;
        let v = p.str()?;
        meta.insert(k, v);
    }
    Ok(meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_container() -> OodfContainer {
        let head = ClassifierHead::new(
            Matrix::from_rows(&[vec![0.5, -0.25], vec![1.0, 2.0], vec![0.0, 0.125]]).unwrap(),
            vec![0.5, -1.0],
        )
        .unwrap();
        let mut c = OodfContainer::with_head(head);
        c.push_features(
            "train",
            FeatureMatrix::from_rows(
                &[vec![1.0, 2.0, 3.0], vec![0.0, 0.5, 0.25]],
                Some(vec![0, 1]),
            )
            .unwrap(),
        );
        c.meta.insert("source".into(), "unit-test".into());
        c
    }

    #[test]
    fn header_layout() {
        let bytes = sample_container().to_bytes().unwrap();
        assert_eq!(&bytes[..4], b"OODF");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 3);
        assert_eq!(&bytes[20..24], b"HEAD");
        let len = u64::from_le_bytes(bytes[24..32].try_into().unwrap());
        assert_eq!(len, 8 + 4 * (6 + 2));
        // W[0][0] = 0.5 as f32 LE.
        assert_eq!(&bytes[40..44], &0.5f32.to_le_bytes());
    }

    #[test]
    fn roundtrip_and_determinism() {
        let c = sample_container();
        let a = c.to_bytes().unwrap();
        let b = c.to_bytes().unwrap();
        assert_eq!(a, b);
        let back = OodfContainer::from_bytes(&a).unwrap();
        assert_eq!(back, c);

        let mut sink = Vec::new();
        let n = write_oodf(&c, &mut sink).unwrap();
        assert_eq!(n, sink.len());
        assert_eq!(read_oodf(sink.as_slice()).unwrap(), c);
    }

    #[test]
    fn empty_feature_set() {
        let mut c = OodfContainer::new(4, 0);
        c.push_features("empty", FeatureMatrix::empty(4).unwrap());
        let back = OodfContainer::from_bytes(&c.to_bytes().unwrap()).unwrap();
        let f = back.feature_set("empty").unwrap();
        assert_eq!(f.len(), 0);
        assert_eq!(f.width(), 4);
    }

    #[test]
    fn rejects_bad_magic() {
        assert!(matches!(
            OodfContainer::from_bytes(b"XXXXrest"),
            Err(Error::NotOodf)
        ));
        assert!(matches!(
            OodfContainer::from_bytes(b"OO"),
            Err(Error::NotOodf)
        ));
    }

    #[test]
    fn rejects_unknown_version() {
        let mut bytes = sample_container().to_bytes().unwrap();
        bytes[4] = 2;
        assert!(matches!(
            OodfContainer::from_bytes(&bytes),
            Err(Error::UnsupportedVersion(2))
        ));
    }

    #[test]
    fn rejects_truncation() {
        let bytes = sample_container().to_bytes().unwrap();
        for cut in [bytes.len() - 1, bytes.len() - 10, 30, 18] {
            assert!(
                matches!(
                    OodfContainer::from_bytes(&bytes[..cut]),
                    Err(Error::Corrupt(_))
                ),
                "cut at {cut}"
            );
        }
    }

    #[test]
    fn rejects_cross_section_mismatch() {
        // HEAD declares L=4, features have width 5.
        let head =
            ClassifierHead::new(Matrix::new(4, 1, vec![1.0; 4]).unwrap(), vec![0.0]).unwrap();
        let mut c = OodfContainer::with_head(head);
        c.push_features("x", FeatureMatrix::new(5, vec![0.0; 10], None).unwrap());
        assert!(matches!(c.to_bytes(), Err(Error::InvalidContainer(_))));

        // Same thing forged at the byte level.
        let mut ok = OodfContainer::with_head(
            ClassifierHead::new(Matrix::new(4, 1, vec![1.0; 4]).unwrap(), vec![0.0]).unwrap(),
        );
        ok.push_features("x", FeatureMatrix::new(4, vec![0.0; 8], None).unwrap());
        let mut forged = OodfContainer::new(5, 1);
        forged.push_features("x", FeatureMatrix::new(5, vec![0.0; 10], None).unwrap());
        let head_bytes = ok.to_bytes().unwrap();
        let feat_bytes = forged.to_bytes().unwrap();
        let head_len = 4 + 8 + 8 + 4 * 5;
        let mut bytes = head_bytes[..20 + head_len].to_vec();
        bytes[16..20].copy_from_slice(&2u32.to_le_bytes());
        bytes.extend_from_slice(&feat_bytes[20..]);
        assert!(matches!(
            OodfContainer::from_bytes(&bytes),
            Err(Error::InvalidContainer(_))
        ));
    }

    #[test]
    fn rejects_label_out_of_range_and_duplicates() {
        let mut c = sample_container();
        c.push_features(
            "bad",
            FeatureMatrix::new(3, vec![0.0; 3], Some(vec![2])).unwrap(),
        );
        assert!(matches!(c.to_bytes(), Err(Error::InvalidContainer(_))));
        let mut c = sample_container();
        c.push_features("train", FeatureMatrix::empty(3).unwrap());
        assert!(matches!(c.to_bytes(), Err(Error::InvalidContainer(_))));
    }

    #[test]
    fn rejects_values_outside_f32() {
        let mut c = OodfContainer::new(1, 0);
        c.push_features("big", FeatureMatrix::new(1, vec![1e300], None).unwrap());
        assert!(matches!(c.to_bytes(), Err(Error::InvalidContainer(_))));
    }

    #[test]
    fn skips_unknown_sections() {
        let mut bytes = sample_container().to_bytes().unwrap();
        let n = u32::from_le_bytes(bytes[16..20].try_into().unwrap());
        bytes[16..20].copy_from_slice(&(n + 1).to_le_bytes());
        bytes.extend_from_slice(b"XTRA");
        bytes.extend_from_slice(&3u64.to_le_bytes());
        bytes.extend_from_slice(&[1, 2, 3]);
        assert_eq!(
            OodfContainer::from_bytes(&bytes).unwrap(),
            sample_container()
        );
    }

    #[test]
    fn rejects_trailing_garbage() {
        let mut bytes = sample_container().to_bytes().unwrap();
        bytes.push(0);
        assert!(matches!(
            OodfContainer::from_bytes(&bytes),
            Err(Error::Corrupt(_))
        ));
    }
}
