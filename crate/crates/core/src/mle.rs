//! Maximum likelihood fits for interval-censored data.
//!
//! Two approaches are provided. The traditional one treats each interval as
//! a censoring window and maximizes `Σ ln(F(hi) - F(lo))`, giving a single
//! point estimate. The interval approach fits every point configuration
//! inside the intervals at once and reports the resulting set of estimates,
//! with confidence limits that are themselves intervals.

use std::fmt;

use crate::ci::UncertainCI;
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalDataset};
use crate::kernels::{chi_square_quantile, student_t_quantile, Alpha};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Exponential,
    Uniform,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Exponential => "exponential",
            Family::Uniform => "uniform",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    Traditional,
    Interval,
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMethod::Traditional => "traditional",
            FitMethod::Interval => "interval",
        })
    }
}

/// Outcome of a fit. Traditional fits carry a degenerate estimate and the
/// log-likelihood at the optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub estimate: Interval,
    pub ci: Option<UncertainCI>,
    pub family: Family,
    pub method: FitMethod,
    pub loglik: Option<f64>,
}

impl FitResult {
    pub fn with_ci(mut self, ci: UncertainCI) -> Self {
        self.ci = Some(ci);
        self
    }

    /// `key=value` lines: family, method, estimate and CI hull endpoints, loglik.
    pub fn to_record(&self) -> String {
        let mut out = format!(
            "family={}\nmethod={}\nestimate_lo={}\nestimate_hi={}\n",
            self.family,
            self.method,
            self.estimate.lo(),
            self.estimate.hi()
        );
        if let Some(ci) = &self.ci {
            out.push_str(&format!(
                "ci_lower_end_lo={}\nci_lower_end_hi={}\nci_upper_end_lo={}\nci_upper_end_hi={}\nci_lo={}\nci_hi={}\n",
                ci.lower_end.lo(),
                ci.lower_end.hi(),
                ci.upper_end.lo(),
                ci.upper_end.hi(),
                ci.hull().lo(),
                ci.hull().hi()
            ));
        }
        if let Some(ll) = self.loglik {
            out.push_str(&format!("loglik={ll}\n"));
        }
        out
    }
}

fn check_censored_exponential(ds: &IntervalDataset) -> Result<()> {
    ds.require_non_empty()?;
    for (i, x) in ds.iter().enumerate() {
        if x.lo() < 0.0 {
            return Err(Error::OutsideSupport(x.lo()));
        }
        if x.width() <= 0.0 {
            return Err(Error::ZeroWidth(i));
        }
    }
    Ok(())
}

fn loglik_unchecked(ds: &IntervalDataset, lambda: f64) -> f64 {
    // ln(e^{-λa} - e^{-λb}) = -λa + ln(1 - e^{-λ(b - a)})
    ds.iter().map(|x| -lambda * x.lo() + (-(-lambda * x.width()).exp_m1()).ln()).sum()
}

/// Censored exponential log-likelihood `Σ ln(e^{-λ lo} - e^{-λ hi})`.
pub fn exp_loglik_interval(ds: &IntervalDataset, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("rate must be positive, got {lambda}")));
    }
    check_censored_exponential(ds)?;
    Ok(loglik_unchecked(ds, lambda))
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_section_maximize(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

const RATE_FLOOR: f64 = 1e-8;
const RATE_TOL: f64 = 1e-10;

/// Traditional censored-likelihood fit of an exponential rate.
///
/// The log-likelihood is concave in λ, so a golden-section search over
/// `[1e-8, 1e3 / mean(midpoints)]` finds the unique maximum.
pub fn exp_mle_traditional(ds: &IntervalDataset) -> Result<FitResult> {
    check_censored_exponential(ds)?;
    let mean_mid = ds.iter().map(Interval::midpoint).sum::<f64>() / ds.len() as f64;
    let upper = 1e3 / mean_mid;
    if !(upper.is_finite() && upper > RATE_FLOOR) {
        return Err(Error::Numeric(format!("cannot bracket the rate (mean midpoint {mean_mid})")));
    }
    let lambda = golden_section_maximize(|l| loglik_unchecked(ds, l), RATE_FLOOR, upper, RATE_TOL);
    let best = loglik_unchecked(ds, lambda);
    let at_edge = upper - lambda <= 10.0 * RATE_TOL || lambda - RATE_FLOOR <= 10.0 * RATE_TOL;
    if at_edge || loglik_unchecked(ds, upper) >= best || loglik_unchecked(ds, RATE_FLOOR) >= best {
        return Err(Error::Numeric(format!(
            "likelihood maximum at the bracket edge (lambda = {lambda}); the data do not identify the rate"
        )));
    }
    Ok(FitResult {
        estimate: Interval::from_ordered(lambda, lambda),
        ci: None,
        family: Family::Exponential,
        method: FitMethod::Traditional,
        loglik: Some(best),
    })
}

/// Observed information `-l''(λ)` by a central difference.
pub fn observed_information(ds: &IntervalDataset, lambda: f64) -> Result<f64> {
    check_censored_exponential(ds)?;
    let h = (1e-5f64).max(1e-5 * lambda).min(0.5 * lambda);
    let f0 = loglik_unchecked(ds, lambda);
    let fp = loglik_unchecked(ds, lambda + h);
    let fm = loglik_unchecked(ds, lambda - h);
    Ok(-(fp - 2.0 * f0 + fm) / (h * h))
}

/// Wald-type interval `λ̂ ∓ t_{N-1, 1-α/2} / sqrt(observed information)`.
pub fn exp_ci_traditional(fit: &FitResult, ds: &IntervalDataset, alpha: Alpha) -> Result<UncertainCI> {
    if fit.method != FitMethod::Traditional || fit.family != Family::Exponential {
        return Err(Error::InvalidParameter("expected a traditional exponential fit".into()));
    }
    if ds.len() < 2 {
        return Err(Error::TooFewIntervals { need: 2, got: ds.len() });
    }
    let lambda = fit.estimate.lo();
    let info = observed_information(ds, lambda)?;
    if !(info > 0.0 && info.is_finite()) {
        return Err(Error::Numeric(format!("non-positive observed information {info}")));
    }
    let t = student_t_quantile((ds.len() - 1) as u32, 1.0 - alpha.value() / 2.0)?;
    let half = t * (1.0 / info).sqrt();
    Ok(UncertainCI::precise(lambda - half, lambda + half))
}

/// Interval MLE of the exponential rate, `[N / Σhi, N / Σlo]`.
pub fn exp_mle_interval(ds: &IntervalDataset) -> Result<FitResult> {
    Ok(FitResult {
        estimate: ds.scale_recip_sum()?,
        ci: None,
        family: Family::Exponential,
        method: FitMethod::Interval,
        loglik: None,
    })
}

/// Chi-square confidence interval on the rate with interval-valued ends.
pub fn exp_ci_interval(ds: &IntervalDataset, alpha: Alpha) -> Result<UncertainCI> {
    // Same positivity precondition as the estimator.
    ds.scale_recip_sum()?;
    let df = (2 * ds.len()) as u32;
    let lo_q = chi_square_quantile(df, alpha.value() / 2.0)?;
    let hi_q = chi_square_quantile(df, 1.0 - alpha.value() / 2.0)?;
    let s = ds.sum();
    let end = |q: f64| Interval::from_ordered(q / (2.0 * s.hi()), q / (2.0 * s.lo()));
    Ok(UncertainCI::new(end(lo_q), end(hi_q)))
}

fn check_uniform_support(ds: &IntervalDataset) -> Result<()> {
    ds.require_non_empty()?;
    match ds.iter().find(|x| x.lo() < 0.0) {
        Some(x) => Err(Error::OutsideSupport(x.lo())),
        None => Ok(()),
    }
}

/// Interval MLE of `θ` for `U(0, θ)`: `[max lo, max hi]`.
pub fn unif_mle_interval(ds: &IntervalDataset) -> Result<FitResult> {
    check_uniform_support(ds)?;
    Ok(FitResult {
        estimate: ds.interval_max()?,
        ci: None,
        family: Family::Uniform,
        method: FitMethod::Interval,
        loglik: None,
    })
}

/// `[θ̂ / (1 - α/2)^{1/N}, θ̂ / (α/2)^{1/N}]` with interval `θ̂`.
pub fn unif_ci_interval(ds: &IntervalDataset, alpha: Alpha) -> Result<UncertainCI> {
    check_uniform_support(ds)?;
    let theta = ds.interval_max()?;
    let inv_n = 1.0 / ds.len() as f64;
    let a = alpha.value();
    let scale = |d: f64| Interval::from_ordered(theta.lo() / d, theta.hi() / d);
    Ok(UncertainCI::new(scale((1.0 - 0.5 * a).powf(inv_n)), scale((0.5 * a).powf(inv_n))))
}

/// Width of the reported hull `upper_end.hi - lower_end.lo`.
pub fn mle_ci_width(ci: &UncertainCI) -> f64 {
    ci.width()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Label;

    fn ds(pairs: &[(f64, f64)]) -> IntervalDataset {
        IntervalDataset::from_pairs(pairs, Label::default()).unwrap()
    }

    fn a05() -> Alpha {
        Alpha::new(0.05).unwrap()
    }

    #[test]
    fn loglik_single_interval() {
        let l = exp_loglik_interval(&ds(&[(1.0, 2.0)]), std::f64::consts::LN_2).unwrap();
        assert!((l - 0.25f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn loglik_additive_and_boundaries() {
        let a = ds(&[(1.0, 2.0), (0.5, 0.7)]);
        let b = ds(&[(3.0, 4.5)]);
        let pooled = crate::synth::pool(&a, &b);
        let l = |d: &IntervalDataset| exp_loglik_interval(d, 0.9).unwrap();
        assert!((l(&pooled) - l(&a) - l(&b)).abs() < 1e-12);
        assert!(exp_loglik_interval(&a, 1e-12).unwrap() < -40.0);
        assert!(exp_loglik_interval(&a, 1e4).unwrap() < -1e3);
    }

    #[test]
    fn loglik_errors() {
        assert_eq!(exp_loglik_interval(&ds(&[(1.0, 2.0), (3.0, 3.0)]), 1.0), Err(Error::ZeroWidth(1)));
        assert!(exp_loglik_interval(&ds(&[(-1.0, 2.0)]), 1.0).is_err());
        assert!(exp_loglik_interval(&ds(&[(1.0, 2.0)]), 0.0).is_err());
    }

    #[test]
    fn traditional_single_interval() {
        let fit = exp_mle_traditional(&ds(&[(1.0, 2.0)])).unwrap();
        assert!((fit.estimate.lo() - std::f64::consts::LN_2).abs() < 1e-8);
        assert!(fit.estimate.is_degenerate());
    }

    #[test]
    fn traditional_point_limit() {
        let w = 1e-6;
        let d = ds(&[(1.0 - w / 2.0, 1.0 + w / 2.0), (3.0 - w / 2.0, 3.0 + w / 2.0)]);
        let fit = exp_mle_traditional(&d).unwrap();
        assert!((fit.estimate.lo() - 0.5).abs() < 1e-4);
    }

    #[test]
    fn traditional_local_max_certificate() {
        let d = ds(&[(0.2, 0.4), (1.0, 1.5), (2.2, 2.4), (0.0, 0.3), (4.0, 6.0)]);
        let fit = exp_mle_traditional(&d).unwrap();
        let l = fit.estimate.lo();
        let ll = fit.loglik.unwrap();
        assert!(ll >= exp_loglik_interval(&d, l * (1.0 + 1e-3)).unwrap());
        assert!(ll >= exp_loglik_interval(&d, l * (1.0 - 1e-3)).unwrap());
    }

    #[test]
    fn traditional_unbounded_rate_errors() {
        // Every interval starts at zero: likelihood increases without bound in λ.
        assert!(matches!(exp_mle_traditional(&ds(&[(0.0, 1.0), (0.0, 2.0)])), Err(Error::Numeric(_))));
    }

    #[test]
    fn traditional_ci_point_limit() {
        let xs = [0.3, 1.1, 2.7, 0.8, 1.9, 0.05, 3.3, 1.4, 0.6, 2.2];
        let w = 1e-6;
        let pairs: Vec<_> = xs.iter().map(|&x| (x, x + w)).collect();
        let d = ds(&pairs);
        let fit = exp_mle_traditional(&d).unwrap();
        let lam = fit.estimate.lo();
        let n = xs.len() as f64;
        let info = observed_information(&d, lam).unwrap();
        assert!((info / (n / (lam * lam)) - 1.0).abs() < 1e-2);
        let ci = exp_ci_traditional(&fit, &d, a05()).unwrap();
        let t = student_t_quantile(9, 0.975).unwrap();
        assert!((ci.hull().lo() / (lam * (1.0 - t / n.sqrt())) - 1.0).abs() < 1e-2);
        assert!((ci.hull().hi() / (lam * (1.0 + t / n.sqrt())) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn interval_exponential_estimates() {
        let f = exp_mle_interval(&ds(&[(2.0, 4.0)])).unwrap();
        assert_eq!((f.estimate.lo(), f.estimate.hi()), (0.25, 0.5));
        let f = exp_mle_interval(&ds(&[(1.0, 2.0), (3.0, 4.0)])).unwrap();
        assert!((f.estimate.lo() - 1.0 / 3.0).abs() < 1e-15 && f.estimate.hi() == 0.5);
        assert!(exp_mle_interval(&ds(&[(0.0, 1.0)])).is_err());
    }

    #[test]
    fn interval_exponential_ci_single_point() {
        let ci = exp_ci_interval(&ds(&[(1.0, 1.0)]), a05()).unwrap();
        assert!((ci.hull().lo() - 0.0253).abs() < 5e-5);
        assert!((ci.hull().hi() - 3.689).abs() < 5e-4);
        let q = |p: f64| -2.0 * (1.0 - p).ln() / 2.0;
        assert!((ci.hull().lo() - q(0.025)).abs() < 1e-9);
        assert!((ci.hull().hi() - q(0.975)).abs() < 1e-9);
    }

    #[test]
    fn uniform_estimates_and_ci() {
        let f = unif_mle_interval(&ds(&[(1.0, 2.0), (3.0, 4.0), (2.0, 5.0)])).unwrap();
        assert_eq!(f.estimate, Interval::new(3.0, 5.0).unwrap());
        let ci = unif_ci_interval(&ds(&[(9.0, 10.0)]), a05()).unwrap();
        assert!((ci.lower_end.lo() - 9.2308).abs() < 5e-5);
        assert!((ci.lower_end.hi() - 10.2564).abs() < 5e-5);
        assert!((ci.upper_end.lo() - 360.0).abs() < 1e-9);
        assert!((ci.upper_end.hi() - 400.0).abs() < 1e-9);
        assert!((mle_ci_width(&ci) - 390.7692).abs() < 5e-4);
        assert!(unif_mle_interval(&ds(&[(-0.1, 1.0)])).is_err());
    }

    #[test]
    fn record_format() {
        let fit = exp_mle_interval(&ds(&[(1.0, 2.0), (3.0, 4.0)])).unwrap();
        let rec = fit.to_record();
        assert!(rec.starts_with("family=exponential\nmethod=interval\n"));
        assert!(rec.contains("estimate_hi=0.5\n"));
    }
}
