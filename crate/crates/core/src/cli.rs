//! Command-line front end, kept in the library so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 internal invariant violation.

use std::fs;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{CostMatrix, DerivedMatrix, MAX_ABS_COST};
use crate::engine::{search, EngineConfig, PathFlavor, Policy};
use crate::error::{Error, Result};
use crate::improve::{improve, verify_trace, LoopConfig};
use crate::oracle::{min_derangement, min_tour, DEFAULT_ORACLE_LIMIT};
use crate::permutation::{CycleForm, DerangementMode, Permutation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "derange", version, about = "Minimum-cost derangements by admissible negative-cycle cancellation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the improvement loop and emit its trace.
    Improve {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunConfig,
        /// Write the line-delimited machine trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print the machine trace on stdout instead of the human one.
        #[arg(long)]
        machine: bool,
    },
    /// Exhaustive minimum derangement, plus minimum tour when small enough.
    OracleMin {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value = "assignment")]
        mode: DerangementMode,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT, value_parser = positive)]
        oracle_limit: usize,
    },
    /// One engine search on a (matrix, derangement) pair.
    Negcycle {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunConfig,
        /// Allow one revisit and extract the loop it closes.
        #[arg(long)]
        non_simple: bool,
        /// Search from this source only (default: every vertex).
        #[arg(long)]
        source: Option<usize>,
    },
    /// Dump the derived matrix; forbidden entries print as `x`.
    Derived {
        #[command(flatten)]
        input: Input,
    },
    /// Re-check a machine trace against its matrix.
    Verify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Write a random symmetric instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = -50, allow_hyphen_values = true)]
        min: i64,
        #[arg(long, default_value_t = 50, allow_hyphen_values = true)]
        max: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Input {
    #[arg(long)]
    matrix: PathBuf,
    /// One-line mapping `2 1 4 3` or cycle notation `(1 2)(3 4)`;
    /// defaults to the n-cycle `(1 2 ... n)`.
    #[arg(long)]
    derangement: Option<String>,
}

/// Search and loop settings shared by `improve` and `negcycle`.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(long, default_value = "assignment")]
    pub mode: DerangementMode,
    #[arg(long, default_value = "best")]
    pub policy: Policy,
    /// Labels kept per (source, endpoint) cell.
    #[arg(long, default_value_t = 4, value_parser = positive)]
    pub labels: usize,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 16, value_parser = positive)]
    pub retry_limit: usize,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub prune_nonnegative: bool,
    /// Only traverse arcs with a negative delta.
    #[arg(long)]
    pub negative_arcs_only: bool,
    #[arg(long)]
    pub oracle_check: bool,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT, value_parser = positive)]
    pub oracle_limit: usize,
}

impl RunConfig {
    pub fn engine(&self) -> EngineConfig {
        EngineConfig {
            policy: self.policy,
            labels: self.labels,
            prune_nonnegative: self.prune_nonnegative,
            negative_arcs_only: self.negative_arcs_only,
            flavor: PathFlavor::Simple,
        }
    }

    pub fn loop_config(&self) -> LoopConfig {
        LoopConfig {
            mode: self.mode,
            engine: self.engine(),
            max_iter: self.max_iter,
            retry_limit: self.retry_limit,
            oracle_check: self.oracle_check,
            oracle_limit: self.oracle_limit,
        }
    }
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

/// Deterministic symmetric instance: the upper triangle is drawn from
/// `[min, max]` and mirrored; the diagonal is zero.
pub fn gen_instance(n: usize, seed: u64, min: i64, max: i64) -> Result<CostMatrix> {
    if n < 3 {
        return Err(Error::Range(format!("n must be at least 3, got {n}")));
    }
    if min > max || min < -MAX_ABS_COST || max > MAX_ABS_COST {
        return Err(Error::Range(format!(
            "cost range [{min}, {max}] is empty or exceeds ±{MAX_ABS_COST}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cost = vec![0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(min..=max);
            cost[i * n + j] = v;
            cost[j * n + i] = v;
        }
    }
    CostMatrix::new(n, cost)
}

/// Reads a derangement in either text form, detected by a leading `(`.
pub fn parse_derangement(text: &str, n: usize) -> Result<Permutation> {
    let text = text.trim();
    let p = if text.starts_with('(') {
        Permutation::from_cycles(&CycleForm::parse(text, n)?)
    } else {
        text.parse()?
    };
    if p.n() != n {
        return Err(Error::SizeMismatch { left: n, right: p.n() });
    }
    Ok(p)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(input: &Input) -> Result<(CostMatrix, Permutation)> {
    let m = CostMatrix::parse(&read(&input.matrix)?)?;
    let d = match &input.derangement {
        Some(text) => parse_derangement(text, m.n())?,
        None => Permutation::n_cycle(m.n()),
    };
    Ok((m, d))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Improve {
            input,
            run,
            trace,
            machine,
        } => {
            let (m, d) = load(&input)?;
            let result = improve(&m, &d, &run.loop_config())?;
            let jsonl = result.to_jsonl();
            if let Some(path) = trace {
                write_file(&path, &jsonl)?;
            }
            if machine {
                out.write_all(jsonl.as_bytes())?;
            } else {
                out.write_all(result.render().as_bytes())?;
            }
        }
        Command::OracleMin {
            matrix,
            mode,
            oracle_limit,
        } => {
            let m = CostMatrix::parse(&read(&matrix)?)?;
            let r = min_derangement(&m, mode, oracle_limit)?;
            writeln!(
                out,
                "min {mode} derangement: {}  witness {}  examined {}",
                r.optimum_value,
                r.witness.cycles(),
                r.instances_examined
            )?;
            if m.n() >= 3 {
                let t = min_tour(&m, oracle_limit)?;
                writeln!(
                    out,
                    "min tour: {}  witness {}  examined {}",
                    t.optimum_value,
                    t.witness.cycles(),
                    t.instances_examined
                )?;
            }
        }
        Command::Negcycle {
            input,
            run,
            non_simple,
            source,
        } => {
            let (m, d) = load(&input)?;
            let dm = DerivedMatrix::new(&m, &d)?;
            let mut engine = run.engine();
            if non_simple {
                engine.flavor = PathFlavor::NonSimple;
            }
            let sources: Vec<usize> = match source {
                Some(s) if s == 0 || s > m.n() => {
                    return Err(Error::VertexOutOfRange { vertex: s, n: m.n() })
                }
                Some(s) => vec![s],
                None => (1..=m.n()).collect(),
            };
            let outcome = search(&dm, &engine, &sources, 1);
            for r in &outcome.iterations {
                writeln!(out, "{}", r.render())?;
            }
            match outcome.cycles.first() {
                Some(c) => {
                    let route: Vec<String> = c.route.iter().map(usize::to_string).collect();
                    writeln!(
                        out,
                        "cycle {}  weight {}  columns {}  route {}",
                        c.cycle,
                        c.weight,
                        c.columns_used.get(),
                        route.join(" ")
                    )?;
                }
                None => writeln!(out, "no admissible negative cycle  columns {}", outcome.columns.get())?,
            }
        }
        Command::Derived { input } => {
            let (m, d) = load(&input)?;
            out.write_all(DerivedMatrix::new(&m, &d)?.to_text().as_bytes())?;
        }
        Command::Verify { matrix, trace } => {
            let m = CostMatrix::parse(&read(&matrix)?)?;
            let report = verify_trace(&m, &read(&trace)?)?;
            writeln!(
                out,
                "ok: {} steps, final cost {}",
                report.steps, report.final_cost
            )?;
        }
        Command::Gen {
            n,
            seed,
            min,
            max,
            out: path,
        } => {
            let text = gen_instance(n, seed, min, max)?.to_text();
            match path {
                Some(p) => write_file(&p, &text)?,
                None => out.write_all(text.as_bytes())?,
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs one subcommand.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => EXIT_INPUT,
            };
        }
    };
    match panic::catch_unwind(AssertUnwindSafe(|| dispatch(cli.command, out))) {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_invariant_violation() {
                EXIT_INVARIANT
            } else {
                EXIT_INPUT
            }
        }
        Err(_) => {
            let _ = writeln!(err, "error: internal assertion failed");
            EXIT_INVARIANT
        }
    }
}
