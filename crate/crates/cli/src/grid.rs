//! `--grid` parsing for `sweep`.

/// Cell values are snapped to this resolution so `0.2:2.0:0.2` yields 0.6
/// rather than 0.6000000000000001.
const SNAP: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub p: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Self, String> {
        let mut grid = Grid {
            p: None,
            lambda: None,
        };
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (key, axis) = item
                .split_once('=')
                .ok_or_else(|| format!("grid entry {item:?} is not key=axis"))?;
            let values = parse_axis(axis)?;
            let slot = match key {
                "p" => &mut grid.p,
                "lambda" => &mut grid.lambda,
                _ => return Err(format!("unknown grid key {key:?} (expected p or lambda)")),
            };
            if slot.replace(values).is_some() {
                return Err(format!("grid key {key:?} given twice"));
            }
        }
        if grid.p.is_none() && grid.lambda.is_none() {
            return Err("empty grid".into());
        }
        Ok(grid)
    }

    /// Row-major cells: `p` outer, `λ` inner.
    pub fn cells(
        &self,
        default_p: f64,
        default_lambda: Option<f64>,
    ) -> Result<Vec<(f64, f64)>, String> {
        let ps = self.p.clone().unwrap_or_else(|| vec![default_p]);
        let ls = match (&self.lambda, default_lambda) {
            (Some(ls), _) => ls.clone(),
            (None, Some(l)) => vec![l],
            (None, None) => {
                return Err("grid has no lambda axis and the config uses a percentile λ".into())
            }
        };
        Ok(ps
            .iter()
            .flat_map(|&p| ls.iter().map(move |&l| (p, l)))
            .collect())
    }
}

pub fn parse_axis(axis: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| -> Result<f64, String> {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad grid value {t:?}"))
    };
    if axis.contains('|') {
        return axis.split('|').map(num).collect();
    }
    let parts: Vec<&str> = axis.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
                return Err(format!("range {axis:?} must be finite"));
            }
            if step <= 0.0 || stop < start {
                return Err(format!("range {axis:?} needs step > 0 and start <= stop"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..n)
                .map(|i| ((start + i as f64 * step) * SNAP).round() / SNAP)
                .collect())
        }
        _ => Err(format!(
            "axis {axis:?} is not start:stop:step, a|b|c or a single value"
        )),
    }
}
