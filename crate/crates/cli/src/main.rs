use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ipool::io::{parse_dataset, parse_scenario, study_csv, study_histogram_csv, write_dataset, SimulationPlan};
use ipool::mle::{
    exp_ci_interval, exp_ci_traditional, exp_mle_interval, exp_mle_traditional, unif_ci_interval, unif_mle_interval,
};
use ipool::pbox::band_csv;
use ipool::sim::{contour_grid, mle_sampling_study, success_curve};
use ipool::synth::sample_with;
use ipool::{
    horizontal_width, inner_ci, interval_mean, ks_band, outer_ci, pbox_from_intervals, Alpha, Family, FitMethod,
    IntervalDataset, Intervalization, Label, SeedStream, SourceDistribution,
};

#[derive(Parser)]
#[command(name = "ipool", version, about = "Interval statistics for pooled precise and imprecise data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a distribution and intervalize the draws.
    Synth(SynthArgs),
    /// Interval mean and inner/outer confidence bounds on the mean.
    Describe(DescribeArgs),
    /// p-box, Kolmogorov–Smirnov band and its horizontal width.
    Ks(KsArgs),
    /// Fit an exponential or uniform model.
    Mle(MleArgs),
    /// Run a Monte Carlo scenario file.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyArg {
    Normal,
    Uniform,
    Exponential,
    Gamma,
    NormalMixture,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum MethodArg {
    Central,
    UniformBias,
    Systematic,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SynthArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    mu1: Option<f64>,
    #[arg(long)]
    sigma1: Option<f64>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    mu2: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long)]
    n2: Option<usize>,
    /// Sample size (defaults to n1 + n2 for mixtures).
    #[arg(long)]
    n: Option<usize>,
    /// Half-width of each interval.
    #[arg(long)]
    delta: f64,
    #[arg(long, value_enum, default_value = "uniform_bias")]
    method: MethodArg,
    /// Systematic bias in [-1, 1].
    #[arg(long = "C")]
    c: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add a `truth` column with the generating values.
    #[arg(long)]
    emit_truth: bool,
    #[arg(long, default_value = "user")]
    label: String,
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Args)]
struct DescribeArgs {
    dataset: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

#[derive(Args)]
struct KsArgs {
    dataset: PathBuf,
    #[arg(long, default_value_t = 0.025)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    p0: f64,
    #[arg(long, default_value_t = 101)]
    slices: usize,
    /// Layer height is set by this sample size (defaults to the dataset size).
    #[arg(long)]
    n_pooled: Option<usize>,
    /// Band CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyChoice {
    Exponential,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitChoice {
    Interval,
    Traditional,
}

#[derive(Args)]
struct MleArgs {
    dataset: PathBuf,
    #[arg(long, value_enum)]
    family: FamilyChoice,
    #[arg(long, value_enum, default_value = "interval")]
    method: FitChoice,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

#[derive(Args)]
struct SimulateArgs {
    scenario: PathBuf,
    #[arg(long, default_value = "-")]
    out: PathBuf,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Histogram CSV destination for sampling studies.
    #[arg(long)]
    hist: Option<PathBuf>,
    /// Success level for the grid iso-line report, in percent.
    #[arg(long, default_value_t = 90.0)]
    iso: f64,
}

enum Failure {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl From<ipool::Error> for Failure {
    fn from(e: ipool::Error) -> Self {
        match e {
            ipool::Error::Numeric(_) => Failure::Numeric(e.to_string()),
            ipool::Error::Validation(problems) => Failure::Data(format!(
                "invalid scenario:\n{}",
                problems.iter().map(|p| format!("  - {p}")).collect::<Vec<_>>().join("\n")
            )),
            other => Failure::Data(other.to_string()),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn is_stdout(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn write_output(path: &Path, text: &str) -> Outcome {
    if is_stdout(path) {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| Failure::Data(format!("cannot write {}: {e}", path.display())))
    }
}

/// Reports go to stdout unless stdout already carries the data.
fn report(data_on_stdout: bool, text: &str) {
    if data_on_stdout {
        eprint!("{text}");
    } else {
        print!("{text}");
    }
}

fn read_text(path: &Path) -> Outcome<String> {
    if is_stdout(path) {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Failure::Data(format!("cannot read stdin: {e}")))
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))
    }
}

fn read_dataset(path: &Path) -> Outcome<IntervalDataset> {
    let text = read_text(path)?;
    parse_dataset(&text).map(|f| f.dataset).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn alpha(a: f64) -> Outcome<Alpha> {
    Alpha::new(a).map_err(|e| Failure::Usage(e.to_string()))
}

fn source_of(args: &SynthArgs) -> Outcome<SourceDistribution> {
    let need =
        |v: Option<f64>, name: &str| v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this family")));
    let count =
        |v: Option<usize>, name: &str| v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this family")));
    let src = match args.family {
        FamilyArg::Normal => SourceDistribution::Normal { mu: need(args.mu, "mu")?, sigma: need(args.sigma, "sigma")? },
        FamilyArg::Uniform => SourceDistribution::Uniform { a: need(args.a, "a")?, b: need(args.b, "b")? },
        FamilyArg::Exponential => SourceDistribution::Exponential { lambda: need(args.lambda, "lambda")? },
        FamilyArg::Gamma => SourceDistribution::Gamma { k: need(args.k, "k")?, theta: need(args.theta, "theta")? },
        FamilyArg::NormalMixture => SourceDistribution::NormalMixture {
            mu1: need(args.mu1, "mu1")?,
            sigma1: need(args.sigma1, "sigma1")?,
            n1: count(args.n1, "n1")?,
            mu2: need(args.mu2, "mu2")?,
            sigma2: need(args.sigma2, "sigma2")?,
            n2: count(args.n2, "n2")?,
        },
    };
    src.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(src)
}

fn cmd_synth(args: SynthArgs) -> Outcome {
    let source = source_of(&args)?;
    let n = match (&source, args.n) {
        (SourceDistribution::NormalMixture { n1, n2, .. }, None) => n1 + n2,
        (SourceDistribution::NormalMixture { n1, n2, .. }, Some(n)) if n != n1 + n2 => {
            return Err(Failure::Usage(format!("--n {n} disagrees with --n1 + --n2 = {}", n1 + n2)))
        }
        (_, Some(n)) => n,
        (_, None) => return Err(Failure::Usage("--n is required".into())),
    };
    let method = match (args.method, args.c) {
        (MethodArg::Systematic, Some(c)) => Intervalization::Systematic(c),
        (MethodArg::Systematic, None) => return Err(Failure::Usage("--C is required with --method systematic".into())),
        (_, Some(_)) => return Err(Failure::Usage("--C is only valid with --method systematic".into())),
        (MethodArg::Central, None) => Intervalization::Central,
        (MethodArg::UniformBias, None) => Intervalization::UniformBias,
    };
    let mut rng = SeedStream::new(args.seed, 0).rng();
    let xs = sample_with(&source, n, &mut rng).map_err(|e| Failure::Usage(e.to_string()))?;
    let ds = method
        .apply(&xs, args.delta, &mut rng)
        .map_err(|e| Failure::Usage(e.to_string()))?
        .with_label(Label::parse(&args.label));
    write_output(&args.out, &write_dataset(&ds, args.emit_truth.then_some(xs.as_slice())))?;
    let mean_width = ds.iter().map(|x| x.width()).sum::<f64>() / n.max(1) as f64;
    report(is_stdout(&args.out), &format!("n={n}\nmean_width={mean_width}\n"));
    Ok(())
}

fn cmd_describe(args: DescribeArgs) -> Outcome {
    let ds = read_dataset(&args.dataset)?;
    let a = alpha(args.alpha)?;
    let mean = interval_mean(&ds)?;
    let outer = outer_ci(&ds, a)?;
    let inner = inner_ci(&ds, a)?;
    let mut out = String::new();
    let _ = writeln!(out, "n={}", ds.len());
    let _ = writeln!(out, "alpha={}", a.value());
    let _ = writeln!(out, "mean_lo={}\nmean_hi={}", mean.lo(), mean.hi());
    let _ = writeln!(out, "outer_lo={}\nouter_hi={}", outer.hull().lo(), outer.hull().hi());
    let _ = writeln!(out, "lower_end_lo={}\nlower_end_hi={}", outer.lower_end.lo(), outer.lower_end.hi());
    let _ = writeln!(out, "upper_end_lo={}\nupper_end_hi={}", outer.upper_end.lo(), outer.upper_end.hi());
    match inner {
        Some(i) => {
            let _ = writeln!(out, "inner_lo={}\ninner_hi={}", i.lo(), i.hi());
        }
        None => out.push_str("inner=empty\n"),
    }
    let _ = writeln!(out, "width={}", outer.width());
    print!("{out}");
    Ok(())
}

fn cmd_ks(args: KsArgs) -> Outcome {
    let ds = read_dataset(&args.dataset)?;
    let a = alpha(args.alpha)?;
    let pb = pbox_from_intervals(&ds)?;
    let band = ks_band(&pb, ds.len(), a)?;
    let h = horizontal_width(&band, args.p0, args.n_pooled.unwrap_or(ds.len()), args.slices)?;
    let data_on_stdout = match &args.out {
        Some(path) => {
            write_output(path, &band_csv(&pb, &band))?;
            is_stdout(path)
        }
        None => false,
    };
    report(data_on_stdout, &format!("n={}\nalpha={}\nd_crit={}\nH={h}\n", ds.len(), a.value(), band.d_crit));
    Ok(())
}

fn cmd_mle(args: MleArgs) -> Outcome {
    let ds = read_dataset(&args.dataset)?;
    let a = alpha(args.alpha)?;
    let fit = match (args.family, args.method) {
        (FamilyChoice::Exponential, FitChoice::Interval) => {
            let ci = exp_ci_interval(&ds, a)?;
            exp_mle_interval(&ds)?.with_ci(ci)
        }
        (FamilyChoice::Exponential, FitChoice::Traditional) => {
            let fit = exp_mle_traditional(&ds)?;
            match exp_ci_traditional(&fit, &ds, a) {
                Ok(ci) => fit.with_ci(ci),
                Err(e @ ipool::Error::TooFewIntervals { .. }) => {
                    println!("{}ci=none ({e})", fit.to_record());
                    return Ok(());
                }
                Err(e) => return Err(e.into()),
            }
        }
        (FamilyChoice::Uniform, FitChoice::Interval) => {
            let ci = unif_ci_interval(&ds, a)?;
            unif_mle_interval(&ds)?.with_ci(ci)
        }
        (FamilyChoice::Uniform, FitChoice::Traditional) => {
            return Err(Failure::Usage(format!(
                "unsupported combination: family {} with method {}",
                Family::Uniform,
                FitMethod::Traditional
            )))
        }
    };
    print!("{}", fit.to_record());
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Outcome {
    if let Some(t) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("--threads: {e}")))?;
    }
    let text = read_text(&args.scenario)?;
    let mut plan = parse_scenario(&text)?;
    if let Some(seed) = args.seed {
        match &mut plan {
            SimulationPlan::Curve { scenario, .. } | SimulationPlan::Grid { scenario, .. } => {
                scenario.master_seed = seed
            }
            SimulationPlan::Study { scenarios } => scenarios.iter_mut().for_each(|s| s.master_seed = seed),
        }
    }
    let start = Instant::now();
    let mut summary = String::new();
    let (csv, draws) = match &plan {
        SimulationPlan::Curve { scenario, f_grid } => {
            let curve = success_curve(scenario, f_grid)?;
            (curve.to_csv(), curve.draws)
        }
        SimulationPlan::Grid { scenario, f_grid, dispersion_grid } => {
            let grid = contour_grid(scenario, f_grid, dispersion_grid)?;
            for (d, f) in grid.iso_line(args.iso) {
                match f {
                    Some(f) => {
                        let _ = writeln!(summary, "iso{}: disp={d} f={f}", args.iso);
                    }
                    None => {
                        let _ = writeln!(summary, "iso{}: disp={d} f=none", args.iso);
                    }
                }
            }
            (grid.to_csv(), grid.draws)
        }
        SimulationPlan::Study { scenarios } => {
            let rows = scenarios.iter().map(mle_sampling_study).collect::<Result<Vec<_>, _>>()?;
            if let Some(path) = &args.hist {
                write_output(path, &study_histogram_csv(&rows))?;
            }
            (study_csv(&rows), rows.iter().map(|r| r.draws).sum())
        }
    };
    write_output(&args.out, &csv)?;
    let _ = writeln!(summary, "elapsed_s={:.3}\ndraws={draws}", start.elapsed().as_secs_f64());
    report(is_stdout(&args.out), &summary);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Describe(a) => cmd_describe(a),
        Command::Ks(a) => cmd_ks(a),
        Command::Mle(a) => cmd_mle(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (2, m),
                Failure::Data(m) => (3, m),
                Failure::Numeric(m) => (4, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
