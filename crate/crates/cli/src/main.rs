//! `geomis` command-line interface.
//!
//! Exit status: 0 on success, 1 for usage errors (bad flags, inconsistent
//! parameters), 2 when a check fails or an input file does not validate.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geomis::adversaries::{star_adversary, AdversaryConfig};
use geomis::experiment::{run_experiment, Algorithm, ExperimentConfig};
use geomis::instance::{format_instance, format_transcript, load_instance};
use geomis::lattice::{mc_volume_fraction, unit_ball_volume, LatticeParams, SampleBox, DEFAULT_DELTA};
use geomis::online::{run_online, FirstFit, OnlineAlgorithm};
use geomis::oracle::{exact_mis, independent_kissing_number, verify_ratio, DEFAULT_NODE_LIMIT};
use geomis::randomized::{
    filter_acceptance_probability, Classify, ClassifyConfig, Filter, HrClassify, HrClassifyConfig,
};
use geomis::seed::derive_seed;
use geomis::{Error, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser, Debug)]
#[command(
    name = "geomis",
    version,
    about = "Online independent set experiments on geometric intersection graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args, Debug)]
struct Shared {
    /// Random seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Lattice parameter delta [default: 0.01]
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Upper bound on widths / side lengths
    #[arg(long = "M", global = true)]
    m: Option<f64>,
    /// Dimension
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Number of trials
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance file
    Gen(GenArgs),
    /// Run an online algorithm on an instance
    Run(RunArgs),
    /// Exact offline quantities of an instance
    Oracle(OracleArgs),
    /// Lattice checks
    Lattice(LatticeArgs),
    /// Run a seeded experiment from a JSON config and write CSV
    Experiment(ExperimentArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GenKind {
    /// Star adversary played against FirstFit; writes the transcript
    Star,
    Levels,
    RandomBalls,
    RandomSizedBalls,
    RandomRects,
    RandomGraph,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    kind: GenKind,
    #[arg(long, default_value_t = 5)]
    zeta: usize,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 10.0)]
    box_side: f64,
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    alg: Algorithm,
    #[arg(long)]
    instance: PathBuf,
    /// Force the class (classify: `j`, hr-classify: `i1,...,id`)
    #[arg(long)]
    class: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OracleWhat {
    Mis,
    Ikn,
    Ratio,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    what: OracleWhat,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    node_limit: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LatticeCheck {
    Mindist,
    Closest,
    Volume,
    Acceptance,
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long)]
    check: LatticeCheck,
    /// Coefficient window radius for `mindist`
    #[arg(long, default_value_t = 3)]
    window: i64,
    /// Query point for `closest`, comma separated
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Box origin for `volume`, comma separated
    #[arg(long, allow_hyphen_values = true)]
    origin: Option<String>,
    /// Monte Carlo samples (`volume`; `acceptance` skips sampling when 0)
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
}

/// Outcome of a subcommand that ran to completion.
enum Status {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}

fn dispatch(cli: Cli) -> geomis::Result<Status> {
    let shared = cli.shared;
    match cli.command {
        Command::Gen(args) => gen(&shared, &args),
        Command::Run(args) => run(&shared, &args),
        Command::Oracle(args) => oracle(&shared, &args),
        Command::Lattice(args) => lattice(&shared, &args),
        Command::Experiment(args) => experiment(&shared, &args),
    }
}

fn emit(out: Option<&Path>, text: &str) -> geomis::Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn with_path(path: &Path) -> impl FnOnce(Error) -> Error + '_ {
    move |e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    }
}

fn load(path: &Path) -> geomis::Result<geomis::ArrivalSequence> {
    load_instance(path).map_err(with_path(path))
}

fn parse_list<T: std::str::FromStr>(what: &str, text: &str) -> geomis::Result<Vec<T>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid {what} `{text}`")))
        })
        .collect()
}

fn gen(shared: &Shared, args: &GenArgs) -> geomis::Result<Status> {
    let seed = shared.seed.unwrap_or(0);
    let dim = shared.dim.unwrap_or(3);
    let m = shared.m.unwrap_or(8.0);
    let text = match args.kind {
        GenKind::Star => {
            let out = star_adversary(args.zeta, &mut FirstFit::new())?;
            format_transcript(&out.sequence, &out.run.decisions)
        }
        kind => {
            let config = match kind {
                GenKind::Star => unreachable!(),
                GenKind::Levels => AdversaryConfig::Levels { zeta: args.zeta },
                GenKind::RandomBalls => AdversaryConfig::RandomBalls {
                    n: args.n,
                    dim,
                    box_side: args.box_side,
                },
                GenKind::RandomSizedBalls => AdversaryConfig::RandomSizedBalls {
                    n: args.n,
                    dim,
                    m,
                    box_side: args.box_side,
                },
                GenKind::RandomRects => AdversaryConfig::RandomRects {
                    n: args.n,
                    dim,
                    m,
                    box_side: args.box_side,
                },
                GenKind::RandomGraph => AdversaryConfig::RandomGraph {
                    n: args.n,
                    edge_prob: args.edge_prob,
                },
            };
            format_instance(&config.generate(seed)?)
        }
    };
    emit(shared.out.as_deref(), &text)?;
    Ok(Status::Ok)
}

fn run(shared: &Shared, args: &RunArgs) -> geomis::Result<Status> {
    let stream = load(&args.instance)?;
    if let (Some(want), Some(have)) = (shared.dim, stream.dim()) {
        if want != have {
            return Err(Error::DimensionMismatch {
                expected: want,
                found: have,
            });
        }
    }
    let seed = shared.seed.unwrap_or(0);
    let need_m = || {
        shared
            .m
            .ok_or_else(|| Error::Config(format!("{} needs --M", args.alg.id())))
    };
    let mut alg: Box<dyn OnlineAlgorithm> = match args.alg {
        Algorithm::Firstfit => Box::new(FirstFit::new()),
        Algorithm::Filter => {
            let dim = stream
                .dim()
                .ok_or_else(|| Error::Unsupported("filter needs a geometric instance".into()))?;
            let params = LatticeParams::new(dim, shared.delta.unwrap_or(DEFAULT_DELTA))?;
            Box::new(Filter::new(params, seed))
        }
        Algorithm::Classify => {
            let m = need_m()?;
            let config = match &args.class {
                Some(c) => ClassifyConfig::with_class(
                    m,
                    c.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid class `{c}`")))?,
                )?,
                None => ClassifyConfig::new(m)?,
            };
            Box::new(Classify::new(config, seed))
        }
        Algorithm::HrClassify => {
            let m = need_m()?;
            let dim = stream
                .dim()
                .ok_or_else(|| Error::Unsupported("hr_classify needs a geometric instance".into()))?;
            let config = match &args.class {
                Some(c) => {
                    let classes: Vec<usize> = parse_list("class", c)?;
                    if classes.len() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: classes.len(),
                        });
                    }
                    HrClassifyConfig::with_classes(m, classes)?
                }
                None => HrClassifyConfig::new(m, dim)?,
            };
            Box::new(HrClassify::new(config, seed))
        }
    };
    let result = run_online(alg.as_mut(), &stream)?;
    let ids: Vec<String> = result.accepted.iter().map(usize::to_string).collect();
    println!("{}", result.size());
    println!("alg {}", args.alg.id());
    println!("n {}", stream.len());
    println!(
        "accepted {}",
        if ids.is_empty() { "-".to_string() } else { ids.join(",") }
    );
    if let Some(path) = &shared.out {
        fs::write(path, format_transcript(&stream, &result.decisions))?;
    }
    if !result.is_valid() {
        eprintln!("run is not a valid online independent set");
        return Ok(Status::CheckFailed);
    }
    Ok(Status::Ok)
}

fn oracle(shared: &Shared, args: &OracleArgs) -> geomis::Result<Status> {
    let stream = load(&args.instance)?;
    let graph = stream.graph();
    let join = |ids: &[usize]| {
        if ids.is_empty() {
            "-".to_string()
        } else {
            ids.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
        }
    };
    let mut text = String::new();
    let status = match args.what {
        OracleWhat::Mis => {
            let r = exact_mis(&graph, args.node_limit)?;
            text += &format!("{}\nwitness {}\n", r.size, join(&r.witness));
            Status::Ok
        }
        OracleWhat::Ikn => {
            let r = independent_kissing_number(&graph, args.node_limit)?;
            let center = r.witness_center.map_or("-".to_string(), |c| c.to_string());
            text += &format!("{}\ncenter {center}\nwitness {}\n", r.zeta, join(&r.witness_set));
            Status::Ok
        }
        OracleWhat::Ratio => {
            let run = run_online(&mut FirstFit::new(), &stream)?;
            let c = verify_ratio(&stream, &run, args.node_limit)?;
            text += &format!(
                "{}\nopt {}\nalg {}\nzeta {}\nbound_satisfied {}\n",
                c.ratio, c.opt, c.alg, c.zeta, c.bound_satisfied
            );
            if c.bound_satisfied {
                Status::Ok
            } else {
                Status::CheckFailed
            }
        }
    };
    emit(shared.out.as_deref(), &text)?;
    Ok(status)
}

fn lattice(shared: &Shared, args: &LatticeArgs) -> geomis::Result<Status> {
    let delta = shared.delta.unwrap_or(DEFAULT_DELTA);
    let seed = shared.seed.unwrap_or(0);
    let point_arg = |text: &Option<String>, what: &str| -> geomis::Result<Option<Point>> {
        text.as_deref().map(|t| Point::new(parse_list(what, t)?)).transpose()
    };
    let query = point_arg(&args.point, "point")?;
    let origin = point_arg(&args.origin, "origin")?;
    let dim = shared
        .dim
        .or(query.as_ref().map(Point::dim))
        .or(origin.as_ref().map(Point::dim))
        .unwrap_or(3);
    let params = LatticeParams::new(dim, delta)?;
    let mut text = String::new();
    let status = match args.check {
        LatticeCheck::Mindist => {
            if args.window < 1 {
                return Err(Error::OutOfRange("window must be >= 1".into()));
            }
            let d = params.min_pairwise_distance(args.window)?;
            text += &format!("{d}\n");
            if d > 4.0 {
                Status::Ok
            } else {
                Status::CheckFailed
            }
        }
        LatticeCheck::Closest => {
            let q = query.ok_or_else(|| Error::Config("closest needs --point".into()))?;
            let (p, coeffs) = params.closest_lattice_point(&q)?;
            let dist = geomis::geometry::distance(&p, &q)?;
            let fmt = |xs: Vec<String>| xs.join(",");
            text += &format!(
                "{}\ncoeffs {}\ndistance {dist}\ncovered {}\n",
                fmt(p.coords().iter().map(f64::to_string).collect()),
                fmt(coeffs.0.iter().map(i64::to_string).collect()),
                params.is_covered(&q)?
            );
            Status::Ok
        }
        LatticeCheck::Volume => {
            let samples = args.samples.unwrap_or(1_000_000);
            let sample_box = SampleBox::new(&params, origin.unwrap_or_else(|| Point::origin(dim)))?;
            let est = mc_volume_fraction(&params, &sample_box, samples, seed)?;
            let target = unit_ball_volume(dim);
            let z = (est.volume() - target).abs() / est.volume_stderr();
            text += &format!(
                "{}\nstderr {}\ntarget {target}\nfraction {}\nsigmas {z:.3}\n",
                est.volume(),
                est.volume_stderr(),
                est.fraction
            );
            if z <= 3.0 {
                Status::Ok
            } else {
                Status::CheckFailed
            }
        }
        LatticeCheck::Acceptance => {
            let p = filter_acceptance_probability(&params);
            text += &format!("{p}\nreciprocal {}\n", 1.0 / p);
            let samples = args.samples.unwrap_or(0);
            if samples == 0 {
                Status::Ok
            } else {
                let mut hits = 0u64;
                for i in 0..samples {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i));
                    let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-50.0..50.0)).collect();
                    let mut f = Filter::new(params, rng.random());
                    hits += f.cell_of(&Point::new(c)?)?.is_some() as u64;
                }
                let rate = hits as f64 / samples as f64;
                let sigma = (p * (1.0 - p) / samples as f64).sqrt();
                let z = (rate - p).abs() / sigma;
                text += &format!("empirical {rate}\nsigmas {z:.3}\n");
                if z <= 3.0 {
                    Status::Ok
                } else {
                    Status::CheckFailed
                }
            }
        }
    };
    emit(shared.out.as_deref(), &text)?;
    Ok(status)
}

fn experiment(shared: &Shared, args: &ExperimentArgs) -> geomis::Result<Status> {
    let text = fs::read_to_string(&args.config).map_err(|e| with_path(&args.config)(e.into()))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(t) = shared.trials {
        config.trials = t;
    }
    if let Some(s) = shared.seed {
        config.base_seed = s;
    }
    if let Some(d) = shared.delta {
        config.delta = d;
    }
    if let Some(m) = shared.m {
        config.m = Some(m);
    }
    if let Some(d) = shared.dim {
        config.dim = Some(d);
    }
    // relative instance paths resolve against the config file
    if let geomis::experiment::InstanceSource::File(path) = &mut config.instance {
        if path.is_relative() {
            if let Some(dir) = args.config.parent() {
                *path = dir.join(&*path);
            }
        }
    }
    let report = run_experiment(&config)?;
    let out = shared.out.clone().or(config.output.clone());
    emit(out.as_deref(), &report.to_csv())?;
    eprint!("{}", report.summary_text());
    Ok(Status::Ok)
}
