//! Confidence intervals on the mean of interval data.
//!
//! The outer bounds follow the endpoint-configuration sweep for no-nesting
//! data: after a lexicographic sort, configuration `k` takes the lower
//! endpoints of the first `k` intervals and the upper endpoints of the rest.
//! Each of the `N + 1` configurations yields a Student-t interval
//! `[L_k, U_k]`; the outer bound is `[min L_k, max U_k]`.

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalDataset};
use crate::kernels::{student_t_quantile, Alpha};

/// A confidence interval whose two ends are only known to within intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertainCI {
    /// Attainable values of the lower confidence limit.
    pub lower_end: Interval,
    /// Attainable values of the upper confidence limit.
    pub upper_end: Interval,
}

impl UncertainCI {
    pub fn new(lower_end: Interval, upper_end: Interval) -> Self {
        UncertainCI { lower_end, upper_end }
    }

    /// Ordinary confidence interval `[lo, hi]` with point ends.
    pub fn precise(lo: f64, hi: f64) -> Self {
        UncertainCI::new(Interval::from_ordered(lo, lo), Interval::from_ordered(hi, hi))
    }

    /// `[lower_end.lo, upper_end.hi]`, the reported bound.
    pub fn hull(&self) -> Interval {
        Interval::from_ordered(self.lower_end.lo(), self.upper_end.hi())
    }

    /// `[lower_end.hi, upper_end.lo]` when non-empty.
    pub fn inner(&self) -> Option<Interval> {
        let (lo, hi) = (self.lower_end.hi(), self.upper_end.lo());
        (lo <= hi).then(|| Interval::from_ordered(lo, hi))
    }

    /// Width of the hull.
    pub fn width(&self) -> f64 {
        self.upper_end.hi() - self.lower_end.lo()
    }
}

/// Summary statistics of one sweep configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Configuration {
    /// Number of leading intervals taken at their lower endpoint.
    pub k: usize,
    /// Mean `E_k`.
    pub mean: f64,
    /// Second moment `M_k`.
    pub second_moment: f64,
    /// `V_k = M_k - E_k^2`.
    pub variance: f64,
}

impl Configuration {
    /// The point values `x^k` for a lexicographically sorted dataset.
    pub fn values(sorted: &IntervalDataset, k: usize) -> Vec<f64> {
        sorted.iter().enumerate().map(|(i, x)| if i < k { x.lo() } else { x.hi() }).collect()
    }

    fn limits(&self, t: f64, n: usize) -> (f64, f64) {
        let half = t * (self.variance / (n as f64 - 1.0)).sqrt();
        (self.mean - half, self.mean + half)
    }
}

/// `[Σlo / N, Σhi / N]`.
pub fn interval_mean(ds: &IntervalDataset) -> Result<Interval> {
    ds.require_non_empty()?;
    let n = ds.len() as f64;
    let s = ds.sum();
    Ok(Interval::from_ordered(s.lo() / n, s.hi() / n))
}

fn require_two(ds: &IntervalDataset) -> Result<()> {
    if ds.len() < 2 {
        Err(Error::TooFewIntervals { need: 2, got: ds.len() })
    } else {
        Ok(())
    }
}

/// Computes the `N + 1` sweep configurations of the sorted dataset with
/// O(N) incremental updates of the first two moments.
///
/// Values are centred on the mean of the interval midpoints before
/// accumulating, which keeps `M_k - E_k^2` well conditioned.
pub fn sweep_configurations(ds: &IntervalDataset) -> Result<Vec<Configuration>> {
    ds.require_non_empty()?;
    let sorted = ds.lex_sort();
    let n = sorted.len() as f64;
    let centre = sorted.iter().map(Interval::midpoint).sum::<f64>() / n;

    let mut sum: f64 = sorted.highs().map(|h| h - centre).sum();
    let mut sum_sq: f64 = sorted.highs().map(|h| (h - centre).powi(2)).sum();
    let mut out = Vec::with_capacity(sorted.len() + 1);
    let mut push = |k: usize, sum: f64, sum_sq: f64| {
        let e = sum / n;
        let m = sum_sq / n;
        out.push(Configuration {
            k,
            mean: e + centre,
            second_moment: m + 2.0 * centre * e + centre * centre,
            variance: (m - e * e).max(0.0),
        });
    };
    push(0, sum, sum_sq);
    for (i, x) in sorted.iter().enumerate() {
        let (l, h) = (x.lo() - centre, x.hi() - centre);
        sum += l - h;
        sum_sq += l * l - h * h;
        push(i + 1, sum, sum_sq);
    }
    Ok(out)
}

fn t_critical(n: usize, alpha: Alpha) -> Result<f64> {
    student_t_quantile((n - 1) as u32, 1.0 - alpha.value() / 2.0)
}

fn sweep_limits(ds: &IntervalDataset, alpha: Alpha) -> Result<Vec<(f64, f64)>> {
    require_two(ds)?;
    let t = t_critical(ds.len(), alpha)?;
    Ok(sweep_configurations(ds)?.iter().map(|c| c.limits(t, ds.len())).collect())
}

/// Outer bounds on the `1 - α` Student-t confidence interval for the mean.
///
/// `lower_end = [min L_k, max L_k]` and `upper_end = [min U_k, max U_k]`
/// over the sweep configurations.
pub fn outer_ci(ds: &IntervalDataset, alpha: Alpha) -> Result<UncertainCI> {
    let limits = sweep_limits(ds, alpha)?;
    let (mut l_min, mut l_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut u_min, mut u_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(l, u) in &limits {
        l_min = l_min.min(l);
        l_max = l_max.max(l);
        u_min = u_min.min(u);
        u_max = u_max.max(u);
    }
    Ok(UncertainCI::new(Interval::from_ordered(l_min, l_max), Interval::from_ordered(u_min, u_max)))
}

/// Inner bounds `[max L_k, min U_k]` over the same sweep, or `None` when empty.
///
/// Only the sweep configurations are consulted, so for data with nesting
/// this is an interpretation rather than an exact inner bound.
pub fn inner_ci(ds: &IntervalDataset, alpha: Alpha) -> Result<Option<Interval>> {
    let limits = sweep_limits(ds, alpha)?;
    let l_max = limits.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let u_min = limits.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok((l_max <= u_min).then(|| Interval::from_ordered(l_max, u_min)))
}

/// Width `D` of the outer bound.
pub fn ci_width(ci: &UncertainCI) -> f64 {
    ci.width()
}

/// Classical Student-t interval on point values.
pub fn point_t_interval(xs: &[f64], alpha: Alpha) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::TooFewIntervals { need: 2, got: xs.len() });
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let s2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = t_critical(xs.len(), alpha)? * (s2 / n).sqrt();
    Ok((mean - half, mean + half))
}
