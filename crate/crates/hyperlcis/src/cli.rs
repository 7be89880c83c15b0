//! Command-line interface. JSON goes to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success, 2 invalid input, 3 search budget exhausted
//! before an answer.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperlcis_core::matcher::{Existence, SearchStats};
use hyperlcis_core::theory::{self, PredictionReport};
use hyperlcis_core::{Hypergraph, LcisStrategy, MomentReport};
use serde_json::{json, Value};

use crate::hug;
use crate::lab::{self, ExperimentConfig};
use crate::parallel::{self, Limits, WallClock};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "hyperlcis",
    version,
    about = "Largest common induced subgraphs of random uniform hypergraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a uniform random d-hypergraph and write it as HUG.
    Gen {
        #[arg(short)]
        d: usize,
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stream tag; graphs with different tags are independent.
        #[arg(long, default_value_t = hyperlcis_core::hypergraph::DEFAULT_STREAM)]
        stream: u64,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the theory's predictions as JSON.
    Predict {
        #[arg(short)]
        d: usize,
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        n2: u64,
        /// Window half-width; defaults to (log2 n1)^(-1/d).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Cutoff on log2(n2) / log2(n1)^(1/(d-1)) for the regime hint.
        #[arg(long, default_value_t = theory::DEFAULT_THETA)]
        theta: f64,
    },
    /// Print first- and second-moment quantities of W as JSON.
    Moments {
        #[arg(short)]
        d: usize,
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        n2: u64,
        #[arg(long)]
        ell: u64,
    },
    /// Largest common induced subgraph of two HUG files.
    Lcis {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Strategy::BranchAndBound)]
        strategy: Strategy,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Ordered tuple pairs of length ell with equal induced subgraphs.
    CountW {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        ell: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Decide whether a common induced subgraph on k vertices exists.
    Exists {
        a: PathBuf,
        b: PathBuf,
        #[arg(short)]
        k: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// LCIS distribution against the predicted window.
    Concentration(ExperimentArgs),
    /// Frequency with which g2 embeds in g1, over a range of n2.
    InclusionScan(ExperimentArgs),
    /// Frequency of W > 0 against the first-moment bound.
    Audit(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Strategy {
    BranchAndBound,
    Descending,
    Upward,
}

impl From<Strategy> for LcisStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::BranchAndBound => LcisStrategy::BranchAndBound,
            Strategy::Descending => LcisStrategy::Descending,
            Strategy::Upward => LcisStrategy::Upward,
        }
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Node limit.
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    max_seconds: Option<f64>,
    /// Worker threads.
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
}

impl SolverArgs {
    fn limits(&self) -> Result<Limits, Failure> {
        let max_time = match self.max_seconds {
            Some(s) if s > 0.0 && s.is_finite() => Some(Duration::from_secs_f64(s)),
            Some(_) => return Err(invalid("--max-seconds must be positive")),
            None => None,
        };
        Ok(Limits {
            max_nodes: self.max_nodes,
            max_time,
        })
    }
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Flat TOML file with experiment keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short)]
    d: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    n2_min: Option<usize>,
    #[arg(long)]
    n2_max: Option<usize>,
    #[arg(long)]
    ell_min: Option<usize>,
    #[arg(long)]
    ell_max: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Nodes per search; 0 removes the limit.
    #[arg(long)]
    max_nodes: Option<u64>,
    #[arg(long)]
    max_seconds: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Directory for trials.csv, timings.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trials run concurrently.
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig, Failure> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p).map_err(|e| invalid(e.to_string()))?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { c.$f = v; })*};
        }
        macro_rules! set_opt {
            ($($f:ident),*) => {$(if self.$f.is_some() { c.$f = self.$f; })*};
        }
        set!(d, n1, n2, trials, seed, max_nodes);
        set_opt!(n2_min, n2_max, ell_min, ell_max, max_seconds, epsilon);
        if self.out.is_some() {
            c.output_dir = self.out.clone();
        }
        Ok(c)
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

impl From<hyperlcis_core::Error> for Failure {
    fn from(e: hyperlcis_core::Error) -> Self {
        invalid(e.to_string())
    }
}

impl From<lab::LabError> for Failure {
    fn from(e: lab::LabError) -> Self {
        invalid(e.to_string())
    }
}

fn read_graph(path: &Path) -> Result<Hypergraph, Failure> {
    hug::read_file(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn stats_json(s: &SearchStats) -> Value {
    json!({
        "nodes": s.nodes,
        "max_depth": s.max_depth,
        "prunes": s.prunes,
        "seconds": s.elapsed.as_secs_f64(),
    })
}

/// A JSON number, or a decimal string beyond 64 bits.
fn count_json(c: u128) -> Value {
    u64::try_from(c).map_or_else(|_| Value::String(c.to_string()), Value::from)
}

struct Reply {
    json: Option<Value>,
    raw: Option<String>,
    undecided: bool,
}

impl Reply {
    fn json(v: Value) -> Self {
        Reply {
            json: Some(v),
            raw: None,
            undecided: false,
        }
    }
}

fn execute(cmd: Command) -> Result<Reply, Failure> {
    match cmd {
        Command::Gen {
            d,
            n,
            seed,
            stream,
            output,
        } => {
            let g = Hypergraph::random_tagged(d, n, seed, stream)?;
            match output {
                Some(p) => {
                    hug::write_file(&g, &p)
                        .map_err(|e| invalid(format!("{}: {e}", p.display())))?;
                    Ok(Reply::json(json!({
                        "path": p,
                        "d": d,
                        "n": n,
                        "m": g.edge_count(),
                        "seed": seed,
                        "stream": stream,
                    })))
                }
                None => Ok(Reply {
                    json: None,
                    raw: Some(hug::to_string(&g)),
                    undecided: false,
                }),
            }
        }
        Command::Predict {
            d,
            n1,
            n2,
            epsilon,
            theta,
        } => {
            let r = PredictionReport::new(d, n1, n2, epsilon, theta)?;
            Ok(Reply::json(
                serde_json::to_value(r).expect("report serializes"),
            ))
        }
        Command::Moments { d, n1, n2, ell } => {
            let r = MomentReport::new(d, n1, n2, ell)?;
            Ok(Reply::json(
                serde_json::to_value(r).expect("report serializes"),
            ))
        }
        Command::Lcis {
            a,
            b,
            strategy,
            solver,
        } => {
            let (g1, g2) = (read_graph(&a)?, read_graph(&b)?);
            let limits = solver.limits()?;
            let out = match strategy {
                Strategy::BranchAndBound if solver.jobs > 1 => {
                    parallel::lcis_size(&g1, &g2, limits, solver.jobs)?
                }
                s => {
                    let clock = WallClock::start();
                    hyperlcis_core::lcis_size(&g1, &g2, s.into(), &limits.budget(&clock))?
                }
            };
            Ok(Reply {
                undecided: out.size.is_none(),
                json: Some(json!({
                    "size": out.size,
                    "witness": parallel::witness_json(&out.witness),
                    "stats": stats_json(&out.stats),
                })),
                raw: None,
            })
        }
        Command::CountW { a, b, ell, solver } => {
            let (g1, g2) = (read_graph(&a)?, read_graph(&b)?);
            let out = parallel::count_w(&g1, &g2, ell, solver.limits()?, solver.jobs)?;
            Ok(Reply {
                undecided: out.count.is_none(),
                json: Some(json!({
                    "ell": ell,
                    "count": out.count.map(count_json),
                    "stats": stats_json(&out.stats),
                })),
                raw: None,
            })
        }
        Command::Exists { a, b, k, solver } => {
            let (g1, g2) = (read_graph(&a)?, read_graph(&b)?);
            let out = parallel::exists_common(&g1, &g2, k, solver.limits()?, solver.jobs)?;
            let (exists, witness) = match &out.result {
                Existence::Found(w) => (Some(true), Some(parallel::witness_json(w))),
                Existence::Absent => (Some(false), None),
                Existence::Undecided => (None, None),
            };
            Ok(Reply {
                undecided: exists.is_none(),
                json: Some(json!({
                    "k": k,
                    "exists": exists,
                    "witness": witness,
                    "stats": stats_json(&out.stats),
                })),
                raw: None,
            })
        }
        Command::Concentration(args) => experiment(&args, lab::run_concentration),
        Command::InclusionScan(args) => experiment(&args, lab::run_inclusion_scan),
        Command::Audit(args) => experiment(&args, lab::run_first_moment_audit),
    }
}

fn experiment<S: serde::Serialize>(
    args: &ExperimentArgs,
    run: impl Fn(&ExperimentConfig, usize) -> Result<lab::RunOutput<S>, lab::LabError>,
) -> Result<Reply, Failure> {
    if args.jobs == 0 {
        return Err(invalid("--jobs must be at least 1"));
    }
    let cfg = args.config()?;
    let out = run(&cfg, args.jobs)?;
    if let Some(dir) = &cfg.output_dir {
        lab::write_outputs(dir, &out)?;
    }
    Ok(Reply::json(
        serde_json::to_value(&out.summary).expect("summary serializes"),
    ))
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if let Command::Lcis { solver, .. }
    | Command::CountW { solver, .. }
    | Command::Exists { solver, .. } = &cli.command
    {
        if solver.jobs == 0 {
            let _ = writeln!(stderr, "error: --jobs must be at least 1");
            return EXIT_INVALID;
        }
    }
    match execute(cli.command) {
        Ok(reply) => {
            if let Some(raw) = reply.raw {
                let _ = stdout.write_all(raw.as_bytes());
            }
            if let Some(v) = reply.json {
                let _ = writeln!(
                    stdout,
                    "{}",
                    serde_json::to_string_pretty(&v).expect("json renders")
                );
            }
            if reply.undecided {
                let _ = writeln!(stderr, "undecided: search budget exhausted");
                EXIT_UNDECIDED
            } else {
                EXIT_OK
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
