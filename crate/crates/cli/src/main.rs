//! `denjoy`: build, sample, verify and decide from the command line.
//!
//! Exit status: 0 pass/true, 1 fail/false, 2 resource budget, 3 usage error.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use denjoy_core::closedset::{IntervalQ, SkeletonSet};
use denjoy_core::derivative::rank_certify;
use denjoy_core::ppmodule::{classify_basic, classify_kernel, decide_str, parse_poly, ModuleKind, DEFAULT_BUDGET};
use denjoy_core::quadcheck::{ftc_spotcheck, verify_improper, verify_step};
use denjoy_core::rational::{parse_q, to_f64, Q};
use denjoy_core::{ConstructedFunction, DecideError, DenjoyError, FunctionDescriptor, NodeKind, Ordinal};
use serde_json::json;

const DEPTH_CAP: u32 = 16;

#[derive(Parser)]
#[command(name = "denjoy", version, about = "Denjoy-integrable functions of prescribed rank and the theory of their Q[X]-modules")]
struct Cli {
    /// Resolution depth (at most 16).
    #[arg(long, global = true, default_value_t = 6)]
    depth: u32,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Disjunct budget for the decision procedure.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a function of the given rank and print its descriptor.
    Build {
        /// Ordinal in Cantor normal form, e.g. `w^2*3+w+4`.
        #[arg(long)]
        rank: String,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true, default_values = ["0", "1"])]
        interval: Vec<String>,
        /// Oscillation of the primitive.
        #[arg(long, default_value = "1")]
        r: String,
        /// Also write the descriptor to this file.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Tabulate enclosures of f and F on a uniform grid.
    Sample {
        #[command(flatten)]
        fun: FunArgs,
        /// Number of grid steps; emits grid + 1 rows.
        #[arg(long, default_value_t = 16)]
        grid: u64,
        /// Print exact rationals instead of outward-rounded decimals.
        #[arg(long)]
        exact: bool,
    },
    /// Run a verification and print its report.
    Verify {
        #[command(flatten)]
        fun: FunArgs,
        #[arg(long, value_enum)]
        which: Which,
        /// Number of limit blocks checked by `improper`.
        #[arg(long = "N", alias = "n", default_value_t = 8)]
        big_n: u64,
        /// Sample count for `ftc`.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Difference step for `ftc`.
        #[arg(long, default_value = "1/1024")]
        h: String,
        /// Probe bound for `rank`.
        #[arg(long, default_value_t = 8)]
        probe: u64,
    },
    /// Classify `{x : p·x ∈ q·M}`, or the kernel of `p` when `q` is omitted.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
    },
    /// Decide a sentence of the module theory.
    Decide {
        #[arg(conflicts_with = "sentence_flag", required_unless_present = "sentence_flag")]
        sentence: Option<String>,
        #[arg(long = "sentence")]
        sentence_flag: Option<String>,
        #[arg(long, default_value = "Den")]
        module: String,
    },
    /// List the gaps of a closed set up to the given depth.
    Gaps {
        #[arg(long, value_enum, default_value_t = SetKind::Cantor)]
        set: SetKind,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true, default_values = ["0", "1"])]
        host: Vec<String>,
        /// Comma-separated points of a finite set.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Vec<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Step,
    Improper,
    Ftc,
    Rank,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SetKind {
    Cantor,
    Interval,
    Finite,
}

/// A function given by descriptor (inline JSON or file) or by its parts.
#[derive(Args)]
struct FunArgs {
    #[arg(long, conflicts_with = "rank")]
    descriptor: Option<String>,
    #[arg(long)]
    rank: Option<String>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    interval: Option<Vec<String>>,
    #[arg(long)]
    r: Option<String>,
}

enum Failure {
    Budget(String),
    Usage(String),
}

impl From<DenjoyError> for Failure {
    fn from(e: DenjoyError) -> Self {
        match e {
            DenjoyError::ProbeTooSmall(_) => Failure::Budget(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Self {
        match e {
            DecideError::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(String, bool), Failure>;

fn rational(s: &str) -> Result<Q, Failure> {
    parse_q(s).ok_or_else(|| Failure::Usage(format!("not a rational: `{s}`")))
}

fn interval(v: &[String]) -> Result<IntervalQ, Failure> {
    Ok(IntervalQ::new(rational(&v[0])?, rational(&v[1])?)?)
}

fn ordinal(s: &str) -> Result<Ordinal, Failure> {
    s.parse().map_err(|e| Failure::Usage(format!("{e}")))
}

impl FunArgs {
    fn build(&self) -> Result<ConstructedFunction, Failure> {
        if let Some(d) = &self.descriptor {
            let text = if d.trim_start().starts_with('{') {
                d.clone()
            } else {
                std::fs::read_to_string(d).map_err(|e| Failure::Usage(format!("{d}: {e}")))?
            };
            let desc: FunctionDescriptor =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad descriptor: {e}")))?;
            return Ok(desc.build()?);
        }
        let rank = self.rank.as_deref().ok_or_else(|| Failure::Usage("need --descriptor or --rank".into()))?;
        let host = match &self.interval {
            Some(v) => interval(v)?,
            None => IntervalQ::unit(),
        };
        let r = rational(self.r.as_deref().unwrap_or("1"))?;
        Ok(denjoy_core::build_rank(&ordinal(rank)?, &host, &r)?)
    }
}

/// Largest double not above `x`.
fn down(x: &Q) -> f64 {
    let v = to_f64(x);
    match Q::from_float(v) {
        Some(r) if &r > x => v.next_down(),
        _ => v,
    }
}

/// Smallest double not below `x`.
fn up(x: &Q) -> f64 {
    let v = to_f64(x);
    match Q::from_float(v) {
        Some(r) if &r < x => v.next_up(),
        _ => v,
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn cmd_build(rank: &str, iv: &[String], r: &str, out: Option<&std::path::Path>) -> Outcome {
    let f = denjoy_core::build_rank(&ordinal(rank)?, &interval(iv)?, &rational(r)?)?;
    let mut v = serde_json::to_value(f.descriptor()).expect("serializable");
    v["kind"] = json!(format!("{:?}", f.kind()));
    if f.kind() == NodeKind::Base {
        let a = f.amplitude();
        v["amplitude"] = json!([a.lo.to_string(), a.hi.to_string()]);
    }
    let text = pretty(&v);
    if let Some(p) = out {
        std::fs::write(p, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    }
    Ok((text, true))
}

fn cmd_sample(f: &ConstructedFunction, grid: u64, depth: u32, format: Format, exact: bool) -> Outcome {
    if grid == 0 {
        return Err(Failure::Usage("--grid must be positive".into()));
    }
    let host = f.interval();
    let mut rows = Vec::new();
    for i in 0..=grid {
        let x = host.at(&Q::new(i.into(), grid.into()));
        let fv = f.eval_f(&x, depth);
        let big = f.eval_big_f(&x, depth);
        rows.push((x, fv, big));
    }
    if format == Format::Json {
        let v: Vec<_> = rows
            .iter()
            .map(|(x, fv, big)| json!({ "x": x.to_string(), "f": fv, "F": big }))
            .collect();
        return Ok((pretty(&v), true));
    }
    let mut s = String::from("x,f_lo,f_hi,F_lo,F_hi");
    for (x, fv, big) in &rows {
        let cell = |lo: &Q, hi: &Q| {
            if exact {
                format!("{lo},{hi}")
            } else {
                format!("{},{}", down(lo), up(hi))
            }
        };
        let fx = match fv {
            Some(e) => cell(&e.lo, &e.hi),
            None => "-inf,inf".into(),
        };
        let xs = if exact { x.to_string() } else { to_f64(x).to_string() };
        write!(s, "\n{xs},{fx},{}", cell(&big.lo, &big.hi)).expect("string write");
    }
    Ok((s, true))
}

/// Per-check parameters of `verify`.
struct VerifyOpts<'a> {
    depth: u32,
    seed: u64,
    big_n: u64,
    samples: usize,
    h: &'a str,
    probe: u64,
}

fn cmd_verify(f: &ConstructedFunction, which: Which, o: &VerifyOpts) -> Outcome {
    let VerifyOpts { depth, seed, big_n, samples, h, probe } = *o;
    match which {
        Which::Step => {
            let rep = verify_step(f, depth)?;
            Ok((pretty(&rep), rep.pass()))
        }
        Which::Improper => {
            let rep = verify_improper(f, big_n)?;
            Ok((pretty(&rep), rep.pass()))
        }
        Which::Ftc => {
            let rep = ftc_spotcheck(f, samples, &rational(h)?, depth, seed)?;
            Ok((pretty(&rep), rep.pass()))
        }
        Which::Rank => {
            let cert = rank_certify(f, probe)?;
            let pass = !cert.spot_check.witness_found;
            Ok((pretty(&cert), pass))
        }
    }
}

fn cmd_classify(p: &str, q: Option<&str>, format: Format) -> Outcome {
    let pp = parse_poly(p).map_err(DecideError::from)?;
    let class = match q {
        Some(q) => classify_basic(&pp, &parse_poly(q).map_err(DecideError::from)?),
        None => classify_kernel(&pp),
    };
    let text = match format {
        Format::Json => pretty(&json!({ "class": class.to_string(), "value": class })),
        Format::Csv => class.to_string(),
    };
    Ok((text, true))
}

fn cmd_decide(sentence: &str, module: &str, budget: usize) -> Outcome {
    let m: ModuleKind = module.parse()?;
    let v = decide_str(sentence, m, budget)?;
    Ok((v.to_string(), v))
}

fn cmd_gaps(kind: SetKind, host: &[String], points: &[String], depth: u32, format: Format) -> Outcome {
    let host = interval(host)?;
    let set = match kind {
        SetKind::Cantor => SkeletonSet::cantor(host),
        SetKind::Interval => SkeletonSet::interval(host),
        SetKind::Finite => {
            let pts = points.iter().map(|p| rational(p)).collect::<Result<Vec<_>, _>>()?;
            SkeletonSet::finite(host, pts)?
        }
    };
    let text = match format {
        Format::Json => pretty(&set.to_json(depth)),
        Format::Csv => {
            let mut s = String::from("lo,hi");
            for g in set.gaps(depth) {
                write!(s, "\n{},{}", g.lo, g.hi).expect("string write");
            }
            s
        }
    };
    Ok((text, true))
}

fn run(cli: Cli) -> Outcome {
    if cli.depth > DEPTH_CAP {
        return Err(Failure::Usage(format!("--depth {} exceeds the cap {DEPTH_CAP}", cli.depth)));
    }
    let json_or = |d: Format| cli.format.unwrap_or(d);
    match &cli.cmd {
        Cmd::Build { rank, interval, r, out } => cmd_build(rank, interval, r, out.as_deref()),
        Cmd::Sample { fun, grid, exact } => cmd_sample(&fun.build()?, *grid, cli.depth, json_or(Format::Csv), *exact),
        Cmd::Verify { fun, which, big_n, samples, h, probe } => {
            let opts = VerifyOpts { depth: cli.depth, seed: cli.seed, big_n: *big_n, samples: *samples, h, probe: *probe };
            cmd_verify(&fun.build()?, *which, &opts)
        }
        Cmd::Classify { p, q } => cmd_classify(p, q.as_deref(), json_or(Format::Csv)),
        Cmd::Decide { sentence, sentence_flag, module } => {
            let s = sentence.as_deref().or(sentence_flag.as_deref()).expect("clap enforces one");
            cmd_decide(s, module, cli.budget)
        }
        Cmd::Gaps { set, host, points } => cmd_gaps(*set, host, points, cli.depth, json_or(Format::Json)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((text, pass)) => {
            println!("{text}");
            ExitCode::from(if pass { 0 } else { 1 })
        }
        Err(Failure::Budget(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
