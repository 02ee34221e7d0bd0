//! Empirical distributions of interval data (p-boxes), Kolmogorov–Smirnov
//! confidence bands and the thin-layer horizontal width metric.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::interval::IntervalDataset;
use crate::kernels::{ks_critical, Alpha};

/// A right-continuous nondecreasing step function with values in [0, 1].
///
/// `values[i]` holds on `[jumps[i], jumps[i + 1])`; `floor` holds below the
/// first jump.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    jumps: Vec<f64>,
    values: Vec<f64>,
    floor: f64,
}

impl StepFunction {
    fn from_parts(jumps: Vec<f64>, values: Vec<f64>, floor: f64) -> Self {
        debug_assert_eq!(jumps.len(), values.len());
        StepFunction { jumps, values, floor }
    }

    pub fn jump_points(&self) -> &[f64] {
        &self.jumps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Supremum of the function.
    pub fn ceiling(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.floor)
    }

    /// Value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match self.jumps.partition_point(|&j| j <= x) {
            0 => self.floor,
            i => self.values[i - 1],
        }
    }

    /// Left limit at `x`.
    pub fn eval_left(&self, x: f64) -> f64 {
        match self.jumps.partition_point(|&j| j < x) {
            0 => self.floor,
            i => self.values[i - 1],
        }
    }

    fn map_values(&self, f: impl Fn(f64) -> f64) -> StepFunction {
        StepFunction::from_parts(self.jumps.clone(), self.values.iter().map(|&v| f(v)).collect(), f(self.floor))
    }

    /// Two-column `x,p` CSV with one row per jump point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,p\n");
        for (x, p) in self.jumps.iter().zip(&self.values) {
            let _ = writeln!(out, "{x},{p}");
        }
        out
    }
}

/// Empirical CDF with step `1/N` at each point; tied points stack.
pub fn ecdf(points: &[f64]) -> Result<StepFunction> {
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("ECDF points must be finite".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut jumps = Vec::new();
    let mut values = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        if i + 1 < sorted.len() && sorted[i + 1] == x {
            continue;
        }
        jumps.push(x);
        values.push((i + 1) as f64 / n);
    }
    Ok(StepFunction::from_parts(jumps, values, 0.0))
}

/// Bounds on every empirical CDF compatible with interval data.
#[derive(Debug, Clone, PartialEq)]
pub struct PBox {
    /// Left bound, the ECDF of the lower endpoints.
    pub upper: StepFunction,
    /// Right bound, the ECDF of the upper endpoints.
    pub lower: StepFunction,
    pub n: usize,
}

pub fn pbox_from_intervals(ds: &IntervalDataset) -> Result<PBox> {
    ds.require_non_empty()?;
    let lows: Vec<f64> = ds.lows().collect();
    let highs: Vec<f64> = ds.highs().collect();
    Ok(PBox { upper: ecdf(&lows)?, lower: ecdf(&highs)?, n: ds.len() })
}

/// A p-box widened vertically by the Smirnov critical value.
#[derive(Debug, Clone, PartialEq)]
pub struct KsBand {
    pub upper: StepFunction,
    pub lower: StepFunction,
    pub d_crit: f64,
    pub n: usize,
    pub alpha: Alpha,
}

impl KsBand {
    /// True when `cdf` (continuous, nondecreasing) lies inside the band
    /// everywhere.
    pub fn encloses_cdf(&self, cdf: impl Fn(f64) -> f64) -> bool {
        // Between jumps both edges are flat, so the worst case for the upper
        // edge is the left limit at each jump and for the lower edge the
        // value at each jump.
        let upper_ok =
            self.upper.jump_points().iter().all(|&x| cdf(x) <= self.upper.eval_left(x)) && self.upper.ceiling() >= 1.0;
        let lower_ok =
            self.lower.jump_points().iter().all(|&x| cdf(x) >= self.lower.eval(x)) && self.lower.floor() <= 0.0;
        upper_ok && lower_ok
    }
}

/// Builds the band `[min(1, F̄ + D), max(0, F̲ - D)]` with `D = D_α(n)`.
pub fn ks_band(pb: &PBox, n: usize, alpha: Alpha) -> Result<KsBand> {
    let d = ks_critical(n, alpha)?;
    Ok(ks_band_with_offset(pb, d, n, alpha))
}

/// Band with an explicit offset `d`.
pub fn ks_band_with_offset(pb: &PBox, d: f64, n: usize, alpha: Alpha) -> KsBand {
    KsBand {
        upper: pb.upper.map_values(|v| (v + d).min(1.0)),
        lower: pb.lower.map_values(|v| (v - d).max(0.0)),
        d_crit: d,
        n,
        alpha,
    }
}

/// Generalized inverse `inf {x : f(x) >= p}`, with `-∞` when the floor
/// already reaches `p` and `+∞` when `f` never does.
pub fn band_inverse(f: &StepFunction, p: f64) -> f64 {
    if f.floor >= p {
        return f64::NEG_INFINITY;
    }
    match f.values.iter().position(|&v| v >= p) {
        Some(i) => f.jumps[i],
        None => f64::INFINITY,
    }
}

/// Horizontal distance between the band edges at probability `p`.
pub fn band_width_at(band: &KsBand, p: f64) -> f64 {
    band_inverse(&band.lower, p) - band_inverse(&band.upper, p)
}

/// Effective horizontal width of `band` in a thin layer around `p0`.
///
/// The layer height is `h = 2 / n_pooled` (two ECDF steps of the pooled
/// data). It is split into `slices` equal slices and the widths at the slice
/// midpoints are averaged. Any unbounded slice makes the result `+∞`.
pub fn horizontal_width(band: &KsBand, p0: f64, n_pooled: usize, slices: usize) -> Result<f64> {
    if n_pooled == 0 || slices == 0 {
        return Err(Error::InvalidParameter("layer needs n_pooled >= 1 and slices >= 1".into()));
    }
    let h = 2.0 / n_pooled as f64;
    let a = p0 - 0.5 * h;
    let b = p0 + 0.5 * h;
    if !(a > 0.0 && b < 1.0) {
        return Err(Error::InvalidParameter(format!("layer [{a}, {b}] around p0 = {p0} must lie inside (0, 1)")));
    }
    let dp = h / slices as f64;
    let mut total = 0.0;
    for i in 0..slices {
        let p = a + (i as f64 + 0.5) * dp;
        let w = band_width_at(band, p);
        if !w.is_finite() {
            return Ok(f64::INFINITY);
        }
        total += w * dp;
    }
    Ok(total / h)
}

/// CSV of a band and its p-box at every jump point:
/// `x,B_lower,F_lower,F_upper,B_upper`.
pub fn band_csv(pb: &PBox, band: &KsBand) -> String {
    let mut xs: Vec<f64> = pb.upper.jump_points().iter().chain(pb.lower.jump_points()).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut out = String::from("x,B_lower,F_lower,F_upper,B_upper\n");
    for x in xs {
        let _ = writeln!(
            out,
            "{x},{},{},{},{}",
            band.lower.eval(x),
            pb.lower.eval(x),
            pb.upper.eval(x),
            band.upper.eval(x)
        );
    }
    out
}
