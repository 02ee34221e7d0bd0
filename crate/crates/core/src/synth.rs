//! Seeded variate generation and intervalization of point samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalDataset, Label};

/// The generator used throughout the crate.
pub type StreamRng = ChaCha8Rng;

/// Identifies one reproducible random stream.
///
/// Distinct `(master_seed, stream_index)` pairs select distinct ChaCha
/// streams under the same key, so they never overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedStream { master_seed, stream_index }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Source distributions for the underlying true values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceDistribution {
    Normal {
        mu: f64,
        sigma: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Exponential {
        lambda: f64,
    },
    /// Shape `k`, scale `theta`.
    Gamma {
        k: f64,
        theta: f64,
    },
    /// Two normal components with deterministic counts `n1` and `n2`.
    NormalMixture {
        mu1: f64,
        sigma1: f64,
        n1: usize,
        mu2: f64,
        sigma2: f64,
        n2: usize,
    },
}

impl SourceDistribution {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            SourceDistribution::Normal { mu, sigma } => {
                if !finite(&[mu, sigma]) || sigma <= 0.0 {
                    return bad(format!("normal requires finite mu and sigma > 0, got mu={mu}, sigma={sigma}"));
                }
            }
            SourceDistribution::Uniform { a, b } => {
                if !finite(&[a, b]) || b <= a {
                    return bad(format!("uniform requires b > a, got a={a}, b={b}"));
                }
            }
            SourceDistribution::Exponential { lambda } => {
                if !lambda.is_finite() || lambda <= 0.0 {
                    return bad(format!("exponential requires lambda > 0, got {lambda}"));
                }
            }
            SourceDistribution::Gamma { k, theta } => {
                if !finite(&[k, theta]) || k <= 0.0 || theta <= 0.0 {
                    return bad(format!("gamma requires k > 0 and theta > 0, got k={k}, theta={theta}"));
                }
            }
            SourceDistribution::NormalMixture { mu1, sigma1, n1, mu2, sigma2, n2 } => {
                if !finite(&[mu1, sigma1, mu2, sigma2]) || sigma1 <= 0.0 || sigma2 <= 0.0 {
                    return bad("mixture requires finite means and positive sigmas".to_string());
                }
                if n1 + n2 == 0 {
                    return bad("mixture requires n1 + n2 > 0".to_string());
                }
            }
        }
        Ok(())
    }

    /// Same distribution, resized for a sample of `n`. Mixture counts are
    /// rescaled in proportion, other families are unchanged.
    pub fn for_size(&self, n: usize) -> SourceDistribution {
        match *self {
            SourceDistribution::NormalMixture { mu1, sigma1, n1, mu2, sigma2, n2 } => {
                let total = (n1 + n2).max(1);
                let m1 = ((n as f64) * (n1 as f64) / (total as f64)).round() as usize;
                let m1 = m1.min(n);
                SourceDistribution::NormalMixture { mu1, sigma1, n1: m1, mu2, sigma2, n2: n - m1 }
            }
            other => other,
        }
    }

    /// Replaces the dispersion parameter: `sigma` for normals, shape `k` for gamma.
    pub fn with_dispersion(&self, d: f64) -> Result<SourceDistribution> {
        let out = match *self {
            SourceDistribution::Normal { mu, .. } => SourceDistribution::Normal { mu, sigma: d },
            SourceDistribution::Gamma { theta, .. } => SourceDistribution::Gamma { k: d, theta },
            _ => {
                return Err(Error::InvalidParameter(
                    "dispersion sweeps are defined for normal (sigma) and gamma (shape k) sources".into(),
                ))
            }
        };
        out.validate()?;
        Ok(out)
    }

    /// Lowest value of the support, when bounded below.
    pub fn support_floor(&self) -> Option<f64> {
        match *self {
            SourceDistribution::Uniform { a, .. } => Some(a),
            SourceDistribution::Exponential { .. } | SourceDistribution::Gamma { .. } => Some(0.0),
            _ => None,
        }
    }

    /// Cumulative distribution function of the source.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            SourceDistribution::Normal { mu, sigma } => normal_cdf((x - mu) / sigma),
            SourceDistribution::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            SourceDistribution::Exponential { lambda } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-lambda * x).exp_m1()
                }
            }
            SourceDistribution::Gamma { k, theta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    statrs::function::gamma::gamma_lr(k, x / theta)
                }
            }
            SourceDistribution::NormalMixture { mu1, sigma1, n1, mu2, sigma2, n2 } => {
                let w1 = n1 as f64 / (n1 + n2) as f64;
                w1 * normal_cdf((x - mu1) / sigma1) + (1.0 - w1) * normal_cdf((x - mu2) / sigma2)
            }
        }
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Uniform on the open interval (0, 1).
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// Standard normal variate by the Marsaglia polar method. The second variate
/// of each accepted pair is discarded so every call consumes a whole pair.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u = 2.0 * rng.gen::<f64>() - 1.0;
        let v = 2.0 * rng.gen::<f64>() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

/// Gamma(k, 1) by Marsaglia–Tsang squeeze/rejection; `k < 1` is boosted
/// through `G(k) = G(k + 1) * U^(1/k)`.
pub fn standard_gamma<R: Rng + ?Sized>(rng: &mut R, k: f64) -> f64 {
    if k < 1.0 {
        let g = standard_gamma(rng, k + 1.0);
        return g * open_unit(rng).powf(1.0 / k);
    }
    let d = k - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = standard_normal(rng);
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = open_unit(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

fn draw_one<R: Rng + ?Sized>(dist: &SourceDistribution, rng: &mut R) -> f64 {
    match *dist {
        SourceDistribution::Normal { mu, sigma } => mu + sigma * standard_normal(rng),
        SourceDistribution::Uniform { a, b } => a + (b - a) * rng.gen::<f64>(),
        SourceDistribution::Exponential { lambda } => -open_unit(rng).ln() / lambda,
        SourceDistribution::Gamma { k, theta } => theta * standard_gamma(rng, k),
        SourceDistribution::NormalMixture { .. } => unreachable!("mixtures are drawn by component"),
    }
}

/// Draws `n` variates from `dist` using an existing generator.
///
/// For mixtures, `n1 + n2` must equal `n`; the first `n1` draws come from
/// component 1 and the remaining `n2` from component 2.
pub fn sample_with<R: Rng + ?Sized>(dist: &SourceDistribution, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    dist.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    match *dist {
        SourceDistribution::NormalMixture { mu1, sigma1, n1, mu2, sigma2, n2 } => {
            if n1 + n2 != n {
                return Err(Error::InvalidParameter(format!(
                    "mixture counts n1 + n2 = {} do not match the requested size {n}",
                    n1 + n2
                )));
            }
            let c1 = SourceDistribution::Normal { mu: mu1, sigma: sigma1 };
            let c2 = SourceDistribution::Normal { mu: mu2, sigma: sigma2 };
            let mut out = Vec::with_capacity(n);
            out.extend((0..n1).map(|_| draw_one(&c1, rng)));
            out.extend((0..n2).map(|_| draw_one(&c2, rng)));
            Ok(out)
        }
        _ => Ok((0..n).map(|_| draw_one(dist, rng)).collect()),
    }
}

/// Draws `n` variates from `dist` on the stream selected by `seed`.
pub fn sample(dist: &SourceDistribution, n: usize, seed: SeedStream) -> Result<Vec<f64>> {
    sample_with(dist, n, &mut seed.rng())
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("imprecision delta must be > 0, got {delta}")))
    }
}

fn around(m: f64, delta: f64) -> Result<Interval> {
    Interval::new(m - delta, m + delta)
}

/// `x -> [x - Δ, x + Δ]`.
pub fn intervalize_central(xs: &[f64], delta: f64) -> Result<IntervalDataset> {
    check_delta(delta)?;
    let items = xs.iter().map(|&x| around(x, delta)).collect::<Result<Vec<_>>>()?;
    Ok(IntervalDataset::new(items, Label::default()))
}

/// Uniformly biased intervals: an independent `r ~ U(-1, 1)` per datum,
/// centre `m = x + rΔ`, interval `[m - Δ, m + Δ]`.
pub fn intervalize_uniform_bias_with<R: Rng + ?Sized>(xs: &[f64], delta: f64, rng: &mut R) -> Result<IntervalDataset> {
    check_delta(delta)?;
    let items = xs
        .iter()
        .map(|&x| {
            let r = 2.0 * rng.gen::<f64>() - 1.0;
            around(x + r * delta, delta)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalDataset::new(items, Label::default()))
}

pub fn intervalize_uniform_bias(xs: &[f64], delta: f64, seed: SeedStream) -> Result<IntervalDataset> {
    intervalize_uniform_bias_with(xs, delta, &mut seed.rng())
}

/// Systematically biased intervals with a fixed offset `C ∈ [-1, 1]`.
pub fn intervalize_systematic(xs: &[f64], delta: f64, c: f64) -> Result<IntervalDataset> {
    check_delta(delta)?;
    if !(-1.0..=1.0).contains(&c) {
        return Err(Error::InvalidParameter(format!("systematic bias C must lie in [-1, 1], got {c}")));
    }
    let items =
        xs.iter().map(|&x| Interval::new(x + (c - 1.0) * delta, x + (c + 1.0) * delta)).collect::<Result<Vec<_>>>()?;
    Ok(IntervalDataset::new(items, Label::default()))
}

/// How point samples are turned into intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Intervalization {
    Central,
    UniformBias,
    Systematic(f64),
}

impl Intervalization {
    pub fn apply<R: Rng + ?Sized>(&self, xs: &[f64], delta: f64, rng: &mut R) -> Result<IntervalDataset> {
        match *self {
            Intervalization::Central => intervalize_central(xs, delta),
            Intervalization::UniformBias => intervalize_uniform_bias_with(xs, delta, rng),
            Intervalization::Systematic(c) => intervalize_systematic(xs, delta, c),
        }
    }
}

/// Concatenation of two datasets, labelled pooled.
pub fn pool(a: &IntervalDataset, b: &IntervalDataset) -> IntervalDataset {
    let mut items = Vec::with_capacity(a.len() + b.len());
    items.extend_from_slice(a.items());
    items.extend_from_slice(b.items());
    IntervalDataset::new(items, Label::Pooled)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn rejects_invalid_parameters() {
        let bad = SourceDistribution::Uniform { a: 5.0, b: 5.0 };
        assert!(sample(&bad, 10, SeedStream::new(1, 0)).is_err());
        assert!(sample(&SourceDistribution::Normal { mu: 0.0, sigma: 0.0 }, 10, SeedStream::new(1, 0)).is_err());
        assert!(sample(&SourceDistribution::Exponential { lambda: 1.0 }, 0, SeedStream::new(1, 0)).is_err());
        assert!(intervalize_central(&[1.0], 0.0).is_err());
        assert!(intervalize_systematic(&[1.0], 0.5, 1.5).is_err());
    }

    #[test]
    fn exponential_mean() {
        let xs = sample(&SourceDistribution::Exponential { lambda: 0.4 }, 1_000_000, SeedStream::new(7, 0)).unwrap();
        let (mean, _) = mean_var(&xs);
        assert!((mean - 2.5).abs() < 3.0 * 2.5 / 1000.0, "mean {mean}");
    }

    #[test]
    fn normal_variance() {
        let xs = sample(&SourceDistribution::Normal { mu: 0.0, sigma: 2.0 }, 1_000_000, SeedStream::new(8, 3)).unwrap();
        let (mean, var) = mean_var(&xs);
        assert!(mean.abs() < 0.01);
        assert!((var - 4.0).abs() < 0.04, "var {var}");
    }

    #[test]
    fn gamma_moments() {
        for &(k, theta) in &[(0.5, 2.0), (1.0, 1.0), (3.5, 2.0)] {
            let xs = sample(&SourceDistribution::Gamma { k, theta }, 400_000, SeedStream::new(9, 1)).unwrap();
            let (mean, var) = mean_var(&xs);
            let sd_mean = (k * theta * theta / 400_000.0).sqrt();
            assert!((mean - k * theta).abs() < 5.0 * sd_mean, "k={k} mean {mean}");
            assert!((var / (k * theta * theta) - 1.0).abs() < 0.03, "k={k} var {var}");
        }
    }

    #[test]
    fn mixture_layout() {
        let m = SourceDistribution::NormalMixture { mu1: 0.0, sigma1: 1.0, n1: 500, mu2: 100.0, sigma2: 1.0, n2: 500 };
        let xs = sample(&m, 1000, SeedStream::new(1, 0)).unwrap();
        assert!(xs[..500].iter().all(|&x| x < 50.0));
        assert!(xs[500..].iter().all(|&x| x > 50.0));
        assert!(sample(&m, 999, SeedStream::new(1, 0)).is_err());
        match m.for_size(30) {
            SourceDistribution::NormalMixture { n1, n2, .. } => assert_eq!((n1, n2), (15, 15)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn streams_reproducible_and_distinct() {
        let d = SourceDistribution::Normal { mu: 0.0, sigma: 1.0 };
        let a = sample(&d, 50, SeedStream::new(42, 3)).unwrap();
        let b = sample(&d, 50, SeedStream::new(42, 3)).unwrap();
        let c = sample(&d, 50, SeedStream::new(42, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn central_intervals() {
        let ds = intervalize_central(&[5.0], 0.5).unwrap();
        assert_eq!(ds.items()[0], Interval::new(4.5, 5.5).unwrap());
    }

    #[test]
    fn systematic_intervals() {
        let ds = intervalize_systematic(&[5.0], 0.5, 1.0).unwrap();
        assert_eq!(ds.items()[0], Interval::new(5.0, 6.0).unwrap());
        let xs = [1.25, -3.0, 7.125, 0.1];
        assert_eq!(intervalize_systematic(&xs, 0.3, 0.0).unwrap(), intervalize_central(&xs, 0.3).unwrap());
    }

    #[test]
    fn uniform_bias_containment_and_centering() {
        let xs = sample(&SourceDistribution::Normal { mu: 5.0, sigma: 2.0 }, 20_000, SeedStream::new(3, 0)).unwrap();
        let ds = intervalize_uniform_bias(&xs, 0.5, SeedStream::new(3, 1)).unwrap();
        let mut offset = 0.0;
        for (x, iv) in xs.iter().zip(ds.iter()) {
            assert!(iv.contains(*x));
            assert!((iv.width() - 1.0).abs() < 1e-12);
            offset += iv.midpoint() - x;
        }
        // r ~ U(-1, 1): sd of the mean offset is 0.5 / sqrt(3 * 20000)
        let mean_offset = offset / xs.len() as f64;
        assert!(mean_offset.abs() < 4.0 * 0.5 / (3.0f64 * 20_000.0).sqrt(), "{mean_offset}");
    }

    #[test]
    fn pooling() {
        let a = intervalize_central(&[1.0; 10], 0.1).unwrap();
        let b = intervalize_central(&[2.0; 10], 0.5).unwrap();
        let p = pool(&a, &b);
        assert_eq!(p.len(), 20);
        assert_eq!(p.label(), &Label::Pooled);
        assert_eq!(pool(&a, &IntervalDataset::default()).items(), a.items());
    }
}
