//! Monte Carlo experiments comparing a precise ("skinny") dataset with the
//! same data pooled with an imprecise ("puffy") one.
//!
//! Trial `i` of a scenario draws everything from `SeedStream(master_seed, i)`,
//! so a trial's outcome depends only on the scenario and its index. Trials
//! run in parallel and are reduced by counting, which makes every result
//! independent of scheduling and thread count.

use rayon::prelude::*;

use crate::ci::{ci_width, outer_ci};
use crate::error::{Error, Result};
use crate::interval::{IntervalDataset, Label};
use crate::kernels::Alpha;
use crate::mle::{exp_ci_interval, exp_ci_traditional, exp_mle_traditional, mle_ci_width, unif_ci_interval, Family};
use crate::pbox::{horizontal_width, ks_band, pbox_from_intervals};
use crate::synth::{pool, sample_with, Intervalization, SeedStream, SourceDistribution};

/// Uncertainty measure compared between skinny and pooled data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Width of the outer bounds on the t confidence interval for the mean.
    OuterCiWidth,
    /// Thin-layer horizontal width of the K–S band.
    KsHorizontalWidth,
    /// Hull width of the interval-MLE confidence interval.
    MleCiWidth(Family),
    /// Width of the traditional censored-likelihood Wald interval (exponential).
    TraditionalMle,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::OuterCiWidth => "outer_ci_width",
            Metric::KsHorizontalWidth => "ks_horizontal_width",
            Metric::MleCiWidth(Family::Exponential) => "mle_ci_width_exponential",
            Metric::MleCiWidth(Family::Uniform) => "mle_ci_width_uniform",
            Metric::TraditionalMle => "traditional_mle",
        }
    }

    pub fn parse(s: &str) -> Option<Metric> {
        Some(match s {
            "outer_ci_width" => Metric::OuterCiWidth,
            "ks_horizontal_width" => Metric::KsHorizontalWidth,
            "mle_ci_width_exponential" => Metric::MleCiWidth(Family::Exponential),
            "mle_ci_width_uniform" => Metric::MleCiWidth(Family::Uniform),
            "traditional_mle" => Metric::TraditionalMle,
            _ => return None,
        })
    }

    /// Conventional significance level for the metric: 0.025 for the 95% K–S
    /// band, 0.05 (two-sided 95%) otherwise.
    pub fn default_alpha(&self) -> Alpha {
        match self {
            Metric::KsHorizontalWidth => Alpha::new(0.025),
            _ => Alpha::new(0.05),
        }
        .expect("constant level")
    }

    fn is_likelihood(&self) -> bool {
        matches!(self, Metric::MleCiWidth(_) | Metric::TraditionalMle)
    }
}

/// Full parameterization of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub source: SourceDistribution,
    pub n_skinny: usize,
    pub n_puffy: usize,
    pub delta_skinny: f64,
    /// Imprecision factor `Δ_puffy / Δ_skinny`.
    pub f: f64,
    pub alpha: Alpha,
    pub metric: Metric,
    pub intervalization: Intervalization,
    pub replications: usize,
    pub master_seed: u64,
    /// Slices per K–S thin layer.
    pub slices: usize,
    /// Probability level of the K–S thin layer.
    pub p0: f64,
}

impl Scenario {
    /// Scenario with the conventional defaults: Δ_skinny = 0.1, f = 1,
    /// uniformly biased intervals, 101 slices at p0 = 0.5, and the metric's
    /// default level.
    pub fn new(source: SourceDistribution, n_skinny: usize, n_puffy: usize, metric: Metric) -> Self {
        Scenario {
            source,
            n_skinny,
            n_puffy,
            delta_skinny: 0.1,
            f: 1.0,
            alpha: metric.default_alpha(),
            metric,
            intervalization: Intervalization::UniformBias,
            replications: 1000,
            master_seed: 0,
            slices: 101,
            p0: 0.5,
        }
    }

    pub fn with_f(&self, f: f64) -> Scenario {
        Scenario { f, ..self.clone() }
    }

    pub fn delta_puffy(&self) -> f64 {
        self.f * self.delta_skinny
    }

    /// Every violated constraint, in a stable order.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = self.source.validate() {
            out.push(e.to_string());
        }
        if self.n_skinny == 0 {
            out.push("n_skinny must be at least 1".into());
        }
        if !(self.delta_skinny.is_finite() && self.delta_skinny > 0.0) {
            out.push(format!("delta_skinny must be > 0, got {}", self.delta_skinny));
        }
        if !(self.f.is_finite() && self.f >= 1.0) {
            out.push(format!("imprecision factor f must be >= 1, got {}", self.f));
        }
        if self.replications == 0 {
            out.push("M must be at least 1".into());
        }
        if self.slices == 0 {
            out.push("slices must be at least 1".into());
        }
        if !(self.p0 > 0.0 && self.p0 < 1.0) {
            out.push(format!("p0 must lie in (0, 1), got {}", self.p0));
        }
        if let Intervalization::Systematic(c) = self.intervalization {
            if !(-1.0..=1.0).contains(&c) {
                out.push(format!("systematic bias C must lie in [-1, 1], got {c}"));
            }
        }
        match self.metric {
            Metric::OuterCiWidth if self.n_skinny < 2 => {
                out.push("outer_ci_width needs n_skinny >= 2".into());
            }
            Metric::TraditionalMle if self.n_skinny < 2 => {
                out.push("traditional_mle needs n_skinny >= 2".into());
            }
            Metric::KsHorizontalWidth => {
                if let Err(e) = crate::kernels::ks_critical(1, self.alpha) {
                    out.push(e.to_string());
                }
            }
            _ => {}
        }
        if matches!(self.metric, Metric::TraditionalMle | Metric::MleCiWidth(Family::Exponential))
            && self.source.support_floor() != Some(0.0)
        {
            out.push("exponential likelihood metrics need a nonnegative source (exponential or gamma)".into());
        }
        if self.metric == Metric::MleCiWidth(Family::Uniform)
            && !matches!(self.source.support_floor(), Some(a) if a >= 0.0)
        {
            out.push("uniform likelihood metric needs a uniform source on [a, b] with a >= 0".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Variates drawn from the source per trial.
    pub fn draws_per_trial(&self) -> u64 {
        (self.n_skinny + self.n_puffy) as u64
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub width_skinny: f64,
    pub width_pooled: f64,
    /// `width_pooled < width_skinny`, strictly.
    pub success: bool,
}

impl TrialResult {
    fn new(width_skinny: f64, width_pooled: f64) -> Self {
        TrialResult { width_skinny, width_pooled, success: width_pooled < width_skinny }
    }
}

/// Skinny and pooled datasets of one trial.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub skinny: IntervalDataset,
    pub pooled: IntervalDataset,
}

/// Generates the skinny and pooled datasets for `trial_index`.
///
/// Likelihood metrics clamp lower endpoints to the source support, because
/// uniformly biased intervals can reach below it; exponential data are
/// floored at the smallest positive double so that rate bounds stay finite.
pub fn trial_data(sc: &Scenario, trial_index: u64) -> Result<TrialData> {
    let mut rng = SeedStream::new(sc.master_seed, trial_index).rng();
    let xs_skinny = sample_with(&sc.source.for_size(sc.n_skinny), sc.n_skinny, &mut rng)?;
    let xs_puffy =
        if sc.n_puffy > 0 { sample_with(&sc.source.for_size(sc.n_puffy), sc.n_puffy, &mut rng)? } else { Vec::new() };
    let mut skinny = sc.intervalization.apply(&xs_skinny, sc.delta_skinny, &mut rng)?.with_label(Label::Skinny);
    let mut puffy = sc.intervalization.apply(&xs_puffy, sc.delta_puffy(), &mut rng)?.with_label(Label::Puffy);
    if sc.metric.is_likelihood() {
        if let Some(floor) = sc.source.support_floor() {
            let floor = if floor == 0.0 && sc.metric != Metric::MleCiWidth(Family::Uniform) {
                f64::MIN_POSITIVE
            } else {
                floor
            };
            skinny = skinny.clamp_lower(floor);
            puffy = puffy.clamp_lower(floor);
        }
    }
    let pooled = pool(&skinny, &puffy);
    Ok(TrialData { skinny, pooled })
}

/// Uncertainty width of `ds` under the scenario's metric. `n_pooled` sets the
/// K–S layer height so skinny and pooled bands are measured alike.
pub fn metric_width(sc: &Scenario, ds: &IntervalDataset, n_pooled: usize) -> Result<f64> {
    match sc.metric {
        Metric::OuterCiWidth => Ok(ci_width(&outer_ci(ds, sc.alpha)?)),
        Metric::KsHorizontalWidth => {
            let band = ks_band(&pbox_from_intervals(ds)?, ds.len(), sc.alpha)?;
            horizontal_width(&band, sc.p0, n_pooled, sc.slices)
        }
        Metric::MleCiWidth(Family::Exponential) => Ok(mle_ci_width(&exp_ci_interval(ds, sc.alpha)?)),
        Metric::MleCiWidth(Family::Uniform) => Ok(mle_ci_width(&unif_ci_interval(ds, sc.alpha)?)),
        Metric::TraditionalMle => {
            let fit = exp_mle_traditional(ds)?;
            Ok(exp_ci_traditional(&fit, ds, sc.alpha)?.width())
        }
    }
}

/// Runs one trial.
pub fn run_trial(sc: &Scenario, trial_index: u64) -> Result<TrialResult> {
    let data = trial_data(sc, trial_index)?;
    let n_pooled = data.pooled.len();
    let ws = metric_width(sc, &data.skinny, n_pooled)?;
    let wp = metric_width(sc, &data.pooled, n_pooled)?;
    Ok(TrialResult::new(ws, wp))
}

fn trial_error(index: u64, e: Error) -> Error {
    match e {
        Error::Numeric(m) => Error::Numeric(format!("trial {index}: {m}")),
        other => Error::InvalidParameter(format!("trial {index}: {other}")),
    }
}

/// Success tally at one imprecision factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub f: f64,
    pub percent: f64,
    pub successes: usize,
    pub trials: usize,
    /// Trials where both widths were infinite (counted as failures).
    pub both_infinite: usize,
}

fn tally(sc: &Scenario) -> Result<CurvePoint> {
    sc.validate()?;
    let results: Vec<TrialResult> = (0..sc.replications as u64)
        .into_par_iter()
        .map(|i| run_trial(sc, i).map_err(|e| trial_error(i, e)))
        .collect::<Result<_>>()?;
    let successes = results.iter().filter(|r| r.success).count();
    let both_infinite = results.iter().filter(|r| r.width_skinny.is_infinite() && r.width_pooled.is_infinite()).count();
    Ok(CurvePoint {
        f: sc.f,
        percent: 100.0 * successes as f64 / sc.replications as f64,
        successes,
        trials: sc.replications,
        both_infinite,
    })
}

/// Percent success as a function of the imprecision factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    /// Source variates drawn in total.
    pub draws: u64,
}

impl Curve {
    pub fn percents(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.percent).collect()
    }

    /// Largest deviation of the curve from its nonincreasing isotonic fit.
    pub fn isotonic_residual(&self) -> f64 {
        let ys = self.percents();
        let fit = isotonic_nonincreasing(&ys);
        ys.iter().zip(&fit).map(|(y, z)| (y - z).abs()).fold(0.0, f64::max)
    }

    /// `f,percent` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("f,percent\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.f, p.percent));
        }
        out
    }
}

/// Runs `sc.replications` trials at each `f` in `f_grid`.
pub fn success_curve(sc: &Scenario, f_grid: &[f64]) -> Result<Curve> {
    let points = f_grid.iter().map(|&f| tally(&sc.with_f(f))).collect::<Result<Vec<_>>>()?;
    let draws = sc.draws_per_trial() * sc.replications as u64 * f_grid.len() as u64;
    Ok(Curve { points, draws })
}

/// Percent success over imprecision factor and source dispersion.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourGrid {
    pub f_grid: Vec<f64>,
    pub dispersion_grid: Vec<f64>,
    /// `percent[i][j]` at `dispersion_grid[i]` and `f_grid[j]`.
    pub percent: Vec<Vec<f64>>,
    pub draws: u64,
}

impl ContourGrid {
    /// For each dispersion, the imprecision factor where the success percent
    /// first falls below `level`, linearly interpolated between grid points.
    /// `None` when the row never drops below `level` (or starts below it).
    pub fn iso_line(&self, level: f64) -> Vec<(f64, Option<f64>)> {
        self.dispersion_grid
            .iter()
            .zip(&self.percent)
            .map(|(&d, row)| {
                let crossing = row.windows(2).zip(self.f_grid.windows(2)).find_map(|(p, f)| {
                    (p[0] >= level && p[1] < level).then(|| f[0] + (p[0] - level) / (p[0] - p[1]) * (f[1] - f[0]))
                });
                (d, crossing)
            })
            .collect()
    }

    /// `f,disp,percent` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("f,disp,percent\n");
        for (d, row) in self.dispersion_grid.iter().zip(&self.percent) {
            for (f, p) in self.f_grid.iter().zip(row) {
                out.push_str(&format!("{f},{d},{p}\n"));
            }
        }
        out
    }
}

/// Success percentages over `f_grid × dispersion_grid`; dispersion is `σ`
/// for normal sources and the shape `k` for gamma sources.
pub fn contour_grid(sc: &Scenario, f_grid: &[f64], dispersion_grid: &[f64]) -> Result<ContourGrid> {
    let mut percent = Vec::with_capacity(dispersion_grid.len());
    for &d in dispersion_grid {
        let row_sc = Scenario { source: sc.source.with_dispersion(d)?, ..sc.clone() };
        percent.push(success_curve(&row_sc, f_grid)?.percents());
    }
    Ok(ContourGrid {
        f_grid: f_grid.to_vec(),
        dispersion_grid: dispersion_grid.to_vec(),
        percent,
        draws: sc.draws_per_trial() * (sc.replications * f_grid.len() * dispersion_grid.len()) as u64,
    })
}

/// Equal-width histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let mut counts = vec![0; bins];
        let width = (hi - lo) / bins as f64;
        for &v in values {
            let i = if width > 0.0 { ((v - lo) / width).floor() as isize } else { 0 };
            counts[i.clamp(0, bins as isize - 1) as usize] += 1;
        }
        Histogram { lo, hi, counts }
    }

    pub fn bin_centres(&self) -> Vec<f64> {
        let w = (self.hi - self.lo) / self.counts.len() as f64;
        (0..self.counts.len()).map(|i| self.lo + (i as f64 + 0.5) * w).collect()
    }
}

/// Sampling distribution of the traditional rate estimate for skinny and
/// pooled data.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySummary {
    pub n_skinny: usize,
    pub n_pooled: usize,
    pub f: f64,
    pub mean_skinny: f64,
    pub mean_pooled: f64,
    pub hist_skinny: Histogram,
    pub hist_pooled: Histogram,
    pub draws: u64,
}

pub const STUDY_BINS: usize = 40;

/// Fits the traditional exponential MLE to skinny and pooled data in every
/// replication and summarizes the estimates.
pub fn mle_sampling_study(sc: &Scenario) -> Result<StudySummary> {
    sc.validate()?;
    if sc.metric != Metric::TraditionalMle || !matches!(sc.source, SourceDistribution::Exponential { .. }) {
        return Err(Error::InvalidParameter(
            "the sampling study needs an exponential source and the traditional_mle metric".into(),
        ));
    }
    let fits: Vec<(f64, f64)> = (0..sc.replications as u64)
        .into_par_iter()
        .map(|i| {
            let data = trial_data(sc, i)?;
            let s = exp_mle_traditional(&data.skinny)?.estimate.lo();
            let p = exp_mle_traditional(&data.pooled)?.estimate.lo();
            Ok((s, p))
        })
        .map(|r: Result<(f64, f64)>| r)
        .collect::<Result<_>>()?;
    let m = fits.len() as f64;
    let skinny: Vec<f64> = fits.iter().map(|p| p.0).collect();
    let pooled: Vec<f64> = fits.iter().map(|p| p.1).collect();
    let lo = skinny.iter().chain(&pooled).copied().fold(f64::INFINITY, f64::min);
    let hi = skinny.iter().chain(&pooled).copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(StudySummary {
        n_skinny: sc.n_skinny,
        n_pooled: sc.n_skinny + sc.n_puffy,
        f: sc.f,
        mean_skinny: skinny.iter().sum::<f64>() / m,
        mean_pooled: pooled.iter().sum::<f64>() / m,
        hist_skinny: Histogram::new(&skinny, lo, hi, STUDY_BINS),
        hist_pooled: Histogram::new(&pooled, lo, hi, STUDY_BINS),
        draws: sc.draws_per_trial() * sc.replications as u64,
    })
}

/// Least-squares nonincreasing fit (pool-adjacent-violators).
pub fn isotonic_nonincreasing(ys: &[f64]) -> Vec<f64> {
    // Blocks of (sum, count); merge while a later block exceeds an earlier one.
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(ys.len());
    for &y in ys {
        blocks.push((y, 1));
        while blocks.len() > 1 {
            let (s2, c2) = blocks[blocks.len() - 1];
            let (s1, c1) = blocks[blocks.len() - 2];
            if s2 / c2 as f64 > s1 / c1 as f64 {
                blocks.pop();
                *blocks.last_mut().unwrap() = (s1 + s2, c1 + c2);
            } else {
                break;
            }
        }
    }
    blocks.iter().flat_map(|&(s, c)| std::iter::repeat_n(s / c as f64, c)).collect()
}
