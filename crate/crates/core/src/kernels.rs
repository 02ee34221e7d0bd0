//! Critical values: Student-t and chi-square quantiles, and the
//! Kolmogorov–Smirnov (Smirnov) critical value `D_α(n)`.

use statrs::function::beta::beta_reg;
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};

/// A significance level in (0, 1).
///
/// Each consumer states how it reads the level: the t, chi-square and
/// uniform confidence intervals are two-sided at `1 - α`, while the K–S band
/// uses `α = (1 - c) / 2` for confidence level `c`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::InvalidParameter(format!("significance level must lie in (0, 1), got {value}")))
        }
    }

    /// K–S band level for confidence `c`, i.e. `(1 - c) / 2`.
    pub fn ks_for_confidence(c: f64) -> Result<Self> {
        Alpha::new((1.0 - c) / 2.0)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

const MAX_ITER: usize = 100;

/// Solves `cdf(x) = p` for an increasing `cdf` on a bracket `[lo, hi]`
/// using Newton steps guarded by bisection.
fn invert_increasing(
    cdf: impl Fn(f64) -> f64,
    pdf: impl Fn(f64) -> f64,
    p: f64,
    mut lo: f64,
    mut hi: f64,
    what: &str,
) -> Result<f64> {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let g = cdf(x) - p;
        if g == 0.0 {
            return Ok(x);
        }
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = pdf(x);
        let newton = if d > 0.0 { x - g / d } else { f64::NAN };
        let next = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 1e-13 * x.abs().max(1.0) || hi - lo <= 1e-13 * hi.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Numeric(format!("{what} quantile did not converge in {MAX_ITER} iterations")))
}

fn check_quantile_args(df: u32, p: f64) -> Result<()> {
    if df == 0 {
        return Err(Error::InvalidParameter("degrees of freedom must be at least 1".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("probability must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// CDF of Student's t with `df` degrees of freedom.
pub fn student_t_cdf(df: u32, t: f64) -> f64 {
    let nu = df as f64;
    let tail = 0.5 * beta_reg(0.5 * nu, 0.5, nu / (nu + t * t));
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

fn student_t_pdf(df: u32, t: f64) -> f64 {
    let nu = df as f64;
    let ln_norm = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * std::f64::consts::PI).ln();
    (ln_norm - 0.5 * (nu + 1.0) * (1.0 + t * t / nu).ln()).exp()
}

/// Quantile of Student's t distribution.
pub fn student_t_quantile(df: u32, p: f64) -> Result<f64> {
    check_quantile_args(df, p)?;
    if p == 0.5 {
        return Ok(0.0);
    }
    // Solve on the upper half and reflect.
    let q = if p > 0.5 { p } else { 1.0 - p };
    let mut hi = 2.0;
    while student_t_cdf(df, hi) < q {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numeric("t quantile bracket overflow".into()));
        }
    }
    let t = invert_increasing(|t| student_t_cdf(df, t), |t| student_t_pdf(df, t), q, 0.0, hi, "t")?;
    Ok(if p > 0.5 { t } else { -t })
}

/// CDF of the chi-square distribution.
pub fn chi_square_cdf(df: u32, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_lr(0.5 * df as f64, 0.5 * x)
    }
}

fn chi_square_pdf(df: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let k = 0.5 * df as f64;
    ((k - 1.0) * x.ln() - 0.5 * x - k * std::f64::consts::LN_2 - ln_gamma(k)).exp()
}

/// Quantile of the chi-square distribution.
pub fn chi_square_quantile(df: u32, p: f64) -> Result<f64> {
    check_quantile_args(df, p)?;
    let mut hi = 2.0 * (df as f64).max(1.0);
    while chi_square_cdf(df, hi) < p {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numeric("chi-square quantile bracket overflow".into()));
        }
    }
    invert_increasing(|x| chi_square_cdf(df, x), |x| chi_square_pdf(df, x), p, 0.0, hi, "chi-square")
}

/// Supported K–S levels and their `A(α)` correction constants.
pub const KS_LEVELS: [(f64, f64); 3] = [(0.1, 0.00256), (0.05, 0.05256), (0.025, 0.11282)];

/// Smirnov critical values for n = 1..=20, columns α = 0.1, 0.05, 0.025.
/// Source: L. H. Miller, "Table of percentage points of Kolmogorov
/// statistics", JASA 51 (1956), 111–121.
pub const KS_TABLE: [[f64; 3]; 20] = [
    [0.90000, 0.95000, 0.97500],
    [0.68377, 0.77639, 0.84189],
    [0.56481, 0.63604, 0.70760],
    [0.49265, 0.56522, 0.62394],
    [0.44698, 0.50945, 0.56328],
    [0.41037, 0.46799, 0.51926],
    [0.38148, 0.43607, 0.48342],
    [0.35831, 0.40962, 0.45427],
    [0.33910, 0.38746, 0.43001],
    [0.32260, 0.36866, 0.40925],
    [0.30829, 0.35242, 0.39122],
    [0.29577, 0.33815, 0.37543],
    [0.28470, 0.32549, 0.36143],
    [0.27481, 0.31417, 0.34890],
    [0.26588, 0.30397, 0.33760],
    [0.25778, 0.29472, 0.32733],
    [0.25039, 0.28627, 0.31796],
    [0.24360, 0.27851, 0.30936],
    [0.23735, 0.27136, 0.30143],
    [0.23156, 0.26473, 0.29408],
];

/// Largest `n` served from the table.
pub const KS_TABLE_MAX_N: usize = 20;

fn ks_level_index(alpha: Alpha) -> Result<usize> {
    KS_LEVELS.iter().position(|(a, _)| (a - alpha.value()).abs() < 1e-12).ok_or(Error::UnsupportedAlpha(alpha.value()))
}

/// Asymptotic Smirnov formula with Miller's corrections, valid for `n > 20`.
pub fn ks_critical_asymptotic(n: usize, alpha: Alpha) -> Result<f64> {
    let (a, correction) = KS_LEVELS[ks_level_index(alpha)?];
    let nf = n as f64;
    Ok(((1.0 / a).ln() / (2.0 * nf)).sqrt() - 0.16693 / nf - correction * nf.powf(-1.5))
}

/// Smirnov critical value `D_α(n)`: table for `n <= 20`, asymptotic formula above.
pub fn ks_critical(n: usize, alpha: Alpha) -> Result<f64> {
    let col = ks_level_index(alpha)?;
    match n {
        0 => Err(Error::InvalidParameter("K–S critical value needs n >= 1".into())),
        1..=KS_TABLE_MAX_N => Ok(KS_TABLE[n - 1][col]),
        _ => ks_critical_asymptotic(n, alpha),
    }
}
