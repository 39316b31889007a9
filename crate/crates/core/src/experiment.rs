//! Seeded, repeatable experiments.
//!
//! An experiment runs one algorithm for a number of trials on a fixed
//! instance (or a freshly generated one per trial), optionally computes the
//! exact optimum, and reports one [`TrialRecord`] per trial plus a
//! [`Summary`]. Trials run in parallel but records are kept in trial order,
//! so the CSV output depends only on the configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversaries::AdversaryConfig;
use crate::error::{Error, Result};
use crate::instance::load_instance;
use crate::lattice::{LatticeParams, DEFAULT_DELTA};
use crate::online::{first_fit, ratio, ArrivalSequence, RunResult};
use crate::oracle::{exact_mis, DEFAULT_NODE_LIMIT};
use crate::randomized::{
    classify_alg, classify_expected_size, filter_alg, hr_classify_alg, hr_classify_expected_size, ClassifyConfig,
    HrClassifyConfig,
};
use crate::seed::derive_seed;

pub const CSV_HEADER: &str = "trial,seed,alg,n,alg_size,opt_size,ratio,time_ms";

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GEOMIS_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[serde(alias = "first_fit")]
    Firstfit,
    Filter,
    Classify,
    #[serde(alias = "hr-classify")]
    HrClassify,
}

impl Algorithm {
    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::Firstfit => "firstfit",
            Algorithm::Filter => "filter",
            Algorithm::Classify => "classify",
            Algorithm::HrClassify => "hr_classify",
        }
    }

    pub fn is_randomized(&self) -> bool {
        !matches!(self, Algorithm::Firstfit)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "firstfit" | "first_fit" | "first-fit" => Ok(Algorithm::Firstfit),
            "filter" => Ok(Algorithm::Filter),
            "classify" => Ok(Algorithm::Classify),
            "hr_classify" | "hr-classify" => Ok(Algorithm::HrClassify),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSource {
    File(PathBuf),
    Generator(AdversaryConfig),
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_node_limit() -> usize {
    DEFAULT_NODE_LIMIT
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub instance: InstanceSource,
    pub trials: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Width / side-length bound for Classify and HR-Classify.
    #[serde(default, rename = "M", alias = "m")]
    pub m: Option<f64>,
    /// Expected instance dimension, checked when set.
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Regenerate the instance for every trial (generator sources only).
    #[serde(default)]
    pub fresh_instance: bool,
    /// Seed for a single generated instance shared by all trials.
    #[serde(default)]
    pub instance_seed: u64,
    /// Classify / HR-Classify: average over every class instead of sampling one.
    #[serde(default)]
    pub enumerate_classes: bool,
    #[serde(default = "default_true")]
    pub compute_opt: bool,
    #[serde(default = "default_node_limit")]
    pub node_limit: usize,
    /// Fill the `time_ms` column. Off by default because wall time makes the
    /// CSV non-reproducible.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, instance: InstanceSource, trials: u64) -> Self {
        ExperimentConfig {
            algorithm,
            instance,
            trials,
            base_seed: 0,
            delta: DEFAULT_DELTA,
            m: None,
            dim: None,
            output: None,
            fresh_instance: false,
            instance_seed: 0,
            enumerate_classes: false,
            compute_opt: true,
            node_limit: DEFAULT_NODE_LIMIT,
            record_timing: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::Config(format!("delta must be positive, got {}", self.delta)));
        }
        if matches!(self.algorithm, Algorithm::Classify | Algorithm::HrClassify) {
            match self.m {
                Some(m) if m.is_finite() && m > 2.0 => {}
                Some(m) => return Err(Error::Config(format!("{} needs M > 2, got {m}", self.algorithm.id()))),
                None => return Err(Error::Config(format!("{} needs M", self.algorithm.id()))),
            }
        }
        if self.enumerate_classes && !matches!(self.algorithm, Algorithm::Classify | Algorithm::HrClassify) {
            return Err(Error::Config(
                "class enumeration applies to classify and hr_classify only".into(),
            ));
        }
        match &self.instance {
            InstanceSource::Generator(g) => g.validate()?,
            InstanceSource::File(_) if self.fresh_instance => {
                return Err(Error::Config("fresh_instance needs a generator source".into()))
            }
            InstanceSource::File(_) => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub alg: &'static str,
    pub n: usize,
    /// Accepted-set size, or the exact expectation under class enumeration.
    pub alg_size: f64,
    /// `None` when the oracle refused the instance or was not asked.
    pub opt_size: Option<usize>,
    pub ratio: Option<f64>,
    pub time_ms: Option<f64>,
}

impl TrialRecord {
    fn csv_row(&self) -> String {
        let opt = self.opt_size.map(|o| o.to_string()).unwrap_or_default();
        let ratio = self.ratio.map(|r| r.to_string()).unwrap_or_default();
        let time = self.time_ms.map(|t| format!("{t:.3}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.trial, self.seed, self.alg, self.n, self.alg_size, opt, ratio, time
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    /// Trials where the oracle refused the instance.
    pub refused: usize,
    pub mean_alg_size: f64,
    pub stderr_alg_size: f64,
    /// `mean ± 3·stderr`.
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_opt: Option<f64>,
    /// Over trials with a finite ratio.
    pub mean_ratio: Option<f64>,
    pub stderr_ratio: Option<f64>,
    pub infinite_ratios: usize,
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl Summary {
    pub fn from_records(records: &[TrialRecord]) -> Summary {
        let sizes: Vec<f64> = records.iter().map(|r| r.alg_size).collect();
        let (mean, se) = if sizes.is_empty() {
            (0.0, 0.0)
        } else {
            mean_and_stderr(&sizes)
        };
        let opts: Vec<f64> = records.iter().filter_map(|r| r.opt_size.map(|o| o as f64)).collect();
        let finite: Vec<f64> = records
            .iter()
            .filter_map(|r| r.ratio.filter(|x| x.is_finite()))
            .collect();
        let (mean_ratio, stderr_ratio) = if finite.is_empty() {
            (None, None)
        } else {
            let (m, s) = mean_and_stderr(&finite);
            (Some(m), Some(s))
        };
        Summary {
            trials: records.len(),
            refused: records.iter().filter(|r| r.opt_size.is_none()).count(),
            mean_alg_size: mean,
            stderr_alg_size: se,
            ci_low: mean - 3.0 * se,
            ci_high: mean + 3.0 * se,
            mean_opt: (!opts.is_empty()).then(|| opts.iter().sum::<f64>() / opts.len() as f64),
            mean_ratio,
            stderr_ratio,
            infinite_ratios: records.iter().filter(|r| r.ratio.is_some_and(f64::is_infinite)).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn summary_text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        writeln!(out, "trials            {}", s.trials).unwrap();
        writeln!(
            out,
            "mean accepted     {:.6} ± {:.6} (3σ: [{:.6}, {:.6}])",
            s.mean_alg_size, s.stderr_alg_size, s.ci_low, s.ci_high
        )
        .unwrap();
        match s.mean_opt {
            Some(o) => writeln!(out, "mean opt          {o:.6}").unwrap(),
            None => writeln!(out, "mean opt          -").unwrap(),
        }
        match (s.mean_ratio, s.stderr_ratio) {
            (Some(m), Some(e)) => writeln!(out, "mean ratio        {m:.6} ± {e:.6}").unwrap(),
            _ => writeln!(out, "mean ratio        -").unwrap(),
        }
        writeln!(out, "infinite ratios   {}", s.infinite_ratios).unwrap();
        writeln!(out, "oracle refusals   {}", s.refused).unwrap();
        out
    }
}

fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
}

struct Prepared {
    stream: ArrivalSequence,
    opt: Option<usize>,
}

fn prepare(config: &ExperimentConfig, stream: ArrivalSequence) -> Result<Prepared> {
    if let Some(d) = config.dim {
        if let Some(found) = stream.dim() {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
    }
    let opt = if config.compute_opt {
        match exact_mis(&stream.graph(), config.node_limit) {
            Ok(m) => Some(m.size),
            Err(Error::OracleLimit { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(Prepared { stream, opt })
}

fn check_run(run: RunResult, alg: Algorithm) -> Result<f64> {
    if !run.is_valid() {
        return Err(Error::InvalidStream(format!("{} produced an invalid run", alg.id())));
    }
    Ok(run.size() as f64)
}

fn run_algorithm(config: &ExperimentConfig, stream: &ArrivalSequence, seed: u64) -> Result<f64> {
    let alg = config.algorithm;
    match alg {
        Algorithm::Firstfit => check_run(first_fit(stream)?, alg),
        Algorithm::Filter => {
            let dim = stream
                .dim()
                .or(config.dim)
                .ok_or_else(|| Error::Config("filter needs a geometric instance".into()))?;
            check_run(filter_alg(stream, LatticeParams::new(dim, config.delta)?, seed)?, alg)
        }
        Algorithm::Classify => {
            let m = config.m.expect("validated");
            if config.enumerate_classes {
                classify_expected_size(stream, m)
            } else {
                check_run(classify_alg(stream, ClassifyConfig::new(m)?, seed)?, alg)
            }
        }
        Algorithm::HrClassify => {
            let m = config.m.expect("validated");
            let dim = stream
                .dim()
                .or(config.dim)
                .ok_or_else(|| Error::Config("hr_classify needs a geometric instance".into()))?;
            if config.enumerate_classes {
                hr_classify_expected_size(stream, m, dim)
            } else {
                check_run(hr_classify_alg(stream, HrClassifyConfig::new(m, dim)?, seed)?, alg)
            }
        }
    }
}

fn run_trial(config: &ExperimentConfig, shared: Option<&Prepared>, trial: u64) -> Result<TrialRecord> {
    let seed = derive_seed(config.base_seed, trial);
    let start = Instant::now();
    let owned;
    let prepared = match shared {
        Some(p) => p,
        None => {
            let InstanceSource::Generator(g) = &config.instance else {
                unreachable!("validated: fresh instances need a generator")
            };
            owned = prepare(config, g.generate(derive_seed(seed, 0))?)?;
            &owned
        }
    };
    let alg_size = run_algorithm(config, &prepared.stream, seed)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    Ok(TrialRecord {
        trial,
        seed,
        alg: config.algorithm.id(),
        n: prepared.stream.len(),
        alg_size,
        opt_size: prepared.opt,
        ratio: prepared.opt.map(|o| ratio(o as f64, alg_size)),
        time_ms: config.record_timing.then_some(elapsed),
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let shared = if config.fresh_instance {
        None
    } else {
        let stream = match &config.instance {
            InstanceSource::File(path) => load_instance(path)?,
            InstanceSource::Generator(g) => g.generate(config.instance_seed)?,
        };
        Some(prepare(config, stream)?)
    };

    let work = || {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, shared.as_ref(), t))
            .collect::<Result<Vec<_>>>()
    };
    let records = match thread_count() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let summary = Summary::from_records(&records);
    Ok(ExperimentReport { records, summary })
}
