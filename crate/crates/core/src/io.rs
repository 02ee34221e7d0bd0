//! Dataset and scenario file formats.
//!
//! Dataset files are CSV with a `lo,hi` header (optionally `lo,hi,truth`),
//! one interval per row and an optional `# label: <name>` comment line.
//! Numbers are written in shortest round-trip form, so parsing a written
//! file restores the exact doubles.
//!
//! Scenario files are flat TOML documents (`key = value`).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalDataset, Label};
use crate::kernels::Alpha;
use crate::sim::{Metric, Scenario, StudySummary};
use crate::synth::{Intervalization, SourceDistribution};

/// Parsed dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub dataset: IntervalDataset,
    /// Generating values, when the file carries a `truth` column.
    pub truth: Option<Vec<f64>>,
}

pub fn write_dataset(ds: &IntervalDataset, truth: Option<&[f64]>) -> String {
    let mut out = format!("# label: {}\n", ds.label().as_str());
    match truth {
        Some(t) => {
            out.push_str("lo,hi,truth\n");
            for (x, v) in ds.iter().zip(t) {
                let _ = writeln!(out, "{},{},{}", x.lo(), x.hi(), v);
            }
        }
        None => {
            out.push_str("lo,hi\n");
            for x in ds {
                let _ = writeln!(out, "{},{}", x.lo(), x.hi());
            }
        }
    }
    out
}

fn parse_number(field: &str, line: usize, what: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse { line, msg: format!("cannot parse {what} {:?} as a number", field.trim()) })
}

pub fn parse_dataset(text: &str) -> Result<DatasetFile> {
    let mut label = Label::default();
    let mut columns: Option<usize> = None;
    let mut items = Vec::new();
    let mut truth = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(name) = comment.trim().strip_prefix("label:") {
                label = Label::parse(name.trim());
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let Some(ncol) = columns else {
            columns = match fields.as_slice() {
                ["lo", "hi"] => Some(2),
                ["lo", "hi", "truth"] => Some(3),
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected header \"lo,hi\" or \"lo,hi,truth\", found {line:?}"),
                    })
                }
            };
            continue;
        };
        if fields.len() != ncol {
            return Err(Error::Parse { line: line_no, msg: format!("expected {ncol} fields, found {}", fields.len()) });
        }
        let lo = parse_number(fields[0], line_no, "lo")?;
        let hi = parse_number(fields[1], line_no, "hi")?;
        let iv = Interval::new(lo, hi).map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
        items.push(iv);
        if ncol == 3 {
            truth.push(parse_number(fields[2], line_no, "truth")?);
        }
    }
    if columns.is_none() {
        return Err(Error::Parse { line: 1, msg: "missing \"lo,hi\" header".into() });
    }
    Ok(DatasetFile { dataset: IntervalDataset::new(items, label), truth: (columns == Some(3)).then_some(truth) })
}

/// Table of mean fitted rates, one row per study.
pub fn study_csv(rows: &[StudySummary]) -> String {
    let mut out = String::from("n_skinny,n_pooled,f,mean_skinny,mean_pooled\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.n_skinny, r.n_pooled, r.f, r.mean_skinny, r.mean_pooled);
    }
    out
}

/// Histograms of each study on that study's shared bins.
pub fn study_histogram_csv(rows: &[StudySummary]) -> String {
    let mut out = String::from("row,bin_centre,count_skinny,count_pooled\n");
    for (i, s) in rows.iter().enumerate() {
        let bins = s.hist_skinny.bin_centres();
        for ((c, a), b) in bins.iter().zip(&s.hist_skinny.counts).zip(&s.hist_pooled.counts) {
            let _ = writeln!(out, "{i},{c},{a},{b}");
        }
    }
    out
}

/// What a scenario file asks the simulator to produce.
#[derive(Debug, Clone, PartialEq)]
pub enum SimulationPlan {
    /// Success percent over `f_grid`.
    Curve { scenario: Scenario, f_grid: Vec<f64> },
    /// Success percent over `f_grid × dispersion_grid`.
    Grid { scenario: Scenario, f_grid: Vec<f64>, dispersion_grid: Vec<f64> },
    /// Traditional-MLE sampling study, one scenario per row.
    Study { scenarios: Vec<Scenario> },
}

const SCENARIO_KEYS: &[&str] = &[
    "family",
    "params",
    "n_skinny",
    "n_puffy",
    "delta_skinny",
    "f",
    "f_grid",
    "alpha",
    "metric",
    "intervalization",
    "C",
    "M",
    "seed",
    "slices",
    "p0",
    "dispersion_grid",
    "rows",
];

struct Fields<'a> {
    table: &'a toml::Table,
    problems: Vec<String>,
}

impl Fields<'_> {
    fn float(&mut self, key: &str) -> Option<f64> {
        match self.table.get(key)? {
            toml::Value::Float(x) => Some(*x),
            toml::Value::Integer(i) => Some(*i as f64),
            other => {
                self.problems.push(format!("{key}: expected a number, found {}", other.type_str()));
                None
            }
        }
    }

    fn uint(&mut self, key: &str) -> Option<u64> {
        match self.table.get(key)? {
            toml::Value::Integer(i) if *i >= 0 => Some(*i as u64),
            other => {
                self.problems.push(format!("{key}: expected a nonnegative integer, found {other}"));
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.table.get(key)? {
            toml::Value::String(s) => Some(s.clone()),
            other => {
                self.problems.push(format!("{key}: expected a string, found {}", other.type_str()));
                None
            }
        }
    }

    fn floats(&mut self, key: &str) -> Option<Vec<f64>> {
        let toml::Value::Array(items) = self.table.get(key)? else {
            self.problems.push(format!("{key}: expected an array of numbers"));
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        for v in items {
            match v {
                toml::Value::Float(x) => out.push(*x),
                toml::Value::Integer(i) => out.push(*i as f64),
                _ => {
                    self.problems.push(format!("{key}: expected an array of numbers"));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn rows(&mut self) -> Option<Vec<(usize, usize, f64)>> {
        let toml::Value::Array(items) = self.table.get("rows")? else {
            self.problems.push("rows: expected an array of [n_skinny, n_puffy, f] triples".into());
            return None;
        };
        let mut out = Vec::new();
        for (i, row) in items.iter().enumerate() {
            let parsed = match row.as_array().map(Vec::as_slice) {
                Some([toml::Value::Integer(a), toml::Value::Integer(b), f]) if *a >= 0 && *b >= 0 => {
                    f.as_float().or_else(|| f.as_integer().map(|x| x as f64)).map(|f| (*a as usize, *b as usize, f))
                }
                _ => None,
            };
            match parsed {
                Some(r) => out.push(r),
                None => self.problems.push(format!("rows[{i}]: expected [n_skinny, n_puffy, f]")),
            }
        }
        Some(out)
    }
}

fn parse_source(family: &str, params: &[f64]) -> std::result::Result<SourceDistribution, String> {
    let want = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(format!("params: family {family} takes {n} parameters, found {}", params.len()))
        }
    };
    let count = |x: f64, name: &str| {
        if x >= 0.0 && x.fract() == 0.0 {
            Ok(x as usize)
        } else {
            Err(format!("params: mixture count {name} must be a nonnegative integer, found {x}"))
        }
    };
    let src = match family {
        "normal" => {
            want(2)?;
            SourceDistribution::Normal { mu: params[0], sigma: params[1] }
        }
        "uniform" => {
            want(2)?;
            SourceDistribution::Uniform { a: params[0], b: params[1] }
        }
        "exponential" => {
            want(1)?;
            SourceDistribution::Exponential { lambda: params[0] }
        }
        "gamma" => {
            want(2)?;
            SourceDistribution::Gamma { k: params[0], theta: params[1] }
        }
        "normal_mixture" => {
            want(6)?;
            SourceDistribution::NormalMixture {
                mu1: params[0],
                sigma1: params[1],
                n1: count(params[2], "n1")?,
                mu2: params[3],
                sigma2: params[4],
                n2: count(params[5], "n2")?,
            }
        }
        other => return Err(format!("family: unknown family {other:?}")),
    };
    src.validate().map_err(|e| format!("params: {e}"))?;
    Ok(src)
}

/// Parses and validates a scenario file, reporting every problem found.
pub fn parse_scenario(text: &str) -> Result<SimulationPlan> {
    let table: toml::Table =
        text.parse().map_err(|e: toml::de::Error| Error::Validation(vec![format!("syntax: {e}")]))?;
    let mut fields = Fields { table: &table, problems: Vec::new() };
    for key in table.keys() {
        if !SCENARIO_KEYS.contains(&key.as_str()) {
            fields.problems.push(format!("unknown key {key:?}"));
        }
    }

    let family = fields.string("family");
    let params = fields.floats("params").unwrap_or_default();
    let source = match &family {
        Some(fam) => match parse_source(fam, &params) {
            Ok(s) => Some(s),
            Err(msg) => {
                fields.problems.push(msg);
                None
            }
        },
        None => {
            fields.problems.push("family: required".into());
            None
        }
    };

    let metric = match fields.string("metric") {
        Some(m) => match Metric::parse(&m) {
            Some(m) => Some(m),
            None => {
                fields.problems.push(format!("metric: unknown metric {m:?}"));
                None
            }
        },
        None => {
            fields.problems.push("metric: required".into());
            None
        }
    };

    let c = fields.float("C");
    let intervalization = match fields.string("intervalization").as_deref() {
        None | Some("uniform_bias") => Intervalization::UniformBias,
        Some("central") => Intervalization::Central,
        Some("systematic") => match c {
            Some(c) => Intervalization::Systematic(c),
            None => {
                fields.problems.push("C: required for systematic intervalization".into());
                Intervalization::Systematic(0.0)
            }
        },
        Some(other) => {
            fields.problems.push(format!("intervalization: unknown method {other:?}"));
            Intervalization::UniformBias
        }
    };
    if c.is_some() && !matches!(intervalization, Intervalization::Systematic(_)) {
        fields.problems.push("C: only valid with intervalization = \"systematic\"".into());
    }

    let alpha = fields.float("alpha").and_then(|a| match Alpha::new(a) {
        Ok(a) => Some(a),
        Err(e) => {
            fields.problems.push(format!("alpha: {e}"));
            None
        }
    });
    let n_skinny = fields.uint("n_skinny");
    let n_puffy = fields.uint("n_puffy");
    let delta = fields.float("delta_skinny");
    let f = fields.float("f");
    let f_grid = fields.floats("f_grid");
    let m = fields.uint("M");
    let seed = fields.uint("seed");
    let slices = fields.uint("slices");
    let p0 = fields.float("p0");
    let dispersion_grid = fields.floats("dispersion_grid");
    let rows = fields.rows();

    if f.is_some() && f_grid.is_some() {
        fields.problems.push("f and f_grid are mutually exclusive".into());
    }
    if rows.is_none() && (n_skinny.is_none() || n_puffy.is_none()) {
        fields.problems.push("n_skinny and n_puffy are required (or give rows)".into());
    }
    if let Some(g) = &f_grid {
        if g.is_empty() {
            fields.problems.push("f_grid: must not be empty".into());
        }
    }
    if dispersion_grid.is_some() && f_grid.is_none() {
        fields.problems.push("dispersion_grid requires f_grid".into());
    }
    if rows.is_some() && metric != Some(Metric::TraditionalMle) {
        fields.problems.push("rows are only valid with metric = \"traditional_mle\"".into());
    }

    let mut problems = fields.problems;
    let (Some(source), Some(metric)) = (source, metric) else {
        return Err(Error::Validation(problems));
    };

    let mut base = Scenario::new(source, n_skinny.unwrap_or(0) as usize, n_puffy.unwrap_or(0) as usize, metric);
    base.intervalization = intervalization;
    if let Some(a) = alpha {
        base.alpha = a;
    }
    if let Some(d) = delta {
        base.delta_skinny = d;
    }
    if let Some(f) = f {
        base.f = f;
    }
    if let Some(m) = m {
        base.replications = m as usize;
    }
    if let Some(s) = seed {
        base.master_seed = s;
    }
    if let Some(s) = slices {
        base.slices = s as usize;
    }
    if let Some(p) = p0 {
        base.p0 = p;
    }

    let plan = if let Some(rows) = rows {
        let scenarios: Vec<Scenario> =
            rows.iter().map(|&(ns, np, f)| Scenario { n_skinny: ns, n_puffy: np, f, ..base.clone() }).collect();
        if scenarios.is_empty() {
            problems.push("rows: must not be empty".into());
        }
        SimulationPlan::Study { scenarios }
    } else if let Some(dispersion_grid) = dispersion_grid {
        if let Err(e) = base.source.with_dispersion(1.0) {
            problems.push(format!("dispersion_grid: {e}"));
        }
        SimulationPlan::Grid { scenario: base, f_grid: f_grid.unwrap_or_default(), dispersion_grid }
    } else if metric == Metric::TraditionalMle && f_grid.is_none() {
        SimulationPlan::Study { scenarios: vec![base] }
    } else {
        let f_grid = f_grid.unwrap_or_else(|| vec![base.f]);
        SimulationPlan::Curve { scenario: base, f_grid }
    };

    // Scenario-level checks on every scenario the plan will run.
    let mut check = |sc: &Scenario| {
        for p in sc.problems() {
            if !problems.contains(&p) {
                problems.push(p);
            }
        }
    };
    match &plan {
        SimulationPlan::Curve { scenario, f_grid } => f_grid.iter().for_each(|&f| check(&scenario.with_f(f))),
        SimulationPlan::Grid { scenario, f_grid, .. } => f_grid.iter().for_each(|&f| check(&scenario.with_f(f))),
        SimulationPlan::Study { scenarios } => scenarios.iter().for_each(check),
    }

    if problems.is_empty() {
        Ok(plan)
    } else {
        Err(Error::Validation(problems))
    }
}
