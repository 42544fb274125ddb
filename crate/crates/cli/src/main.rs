use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qdeg::degradability::{epsilon_antidegradable_with, epsilon_degradable_with};
use qdeg::optimize::{channel_coherent_information_with, u_xi, DEFAULT_STARTS};
use qdeg::sdp::{SolveOptions, DEFAULT_TOLERANCE};
use qdeg::sweep::{emit_meta, linspace, sweep_bb84_with, sweep_depolarizing_with, SweepOptions};
use qdeg::{io, ChannelFamilySpec, Error, QuantumChannel};

const MAX_TOLERANCE: f64 = 1e-2;
/// Slack for the check that `q1` lies below every printed upper bound. The
/// `u_xi` bounds are only as exact as the degrading map, so the slack grows
/// with the solve tolerance.
const DOMINANCE_SLACK: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "qdeg", version, about = "Approximate degradability and capacity bounds for quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degradability (or anti-degradability) parameter of a channel, as JSON.
    Epsilon {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        anti: bool,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Diamond-norm distance between two channel files.
    Diamond {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Channel coherent information and a maximizing input state.
    Q1 {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = DEFAULT_STARTS)]
        starts: usize,
    },
    /// All capacity upper bounds, as JSON.
    Bounds {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_STARTS)]
        starts: usize,
    },
    /// Sweep a family over a parameter grid and write CSV.
    Sweep {
        #[arg(long, value_enum)]
        family: SweepFamily,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// `p_z / p_x` for the bb84 family.
        #[arg(long, default_value_t = 1.0)]
        ratio: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Add a `u_xi` column.
        #[arg(long)]
        u_xi: bool,
        /// Also write `<out>.meta.json`.
        #[arg(long)]
        meta: bool,
    },
    /// Write a family member to a channel JSON file.
    Export {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepFamily {
    Depolarizing,
    Bb84,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Depolarizing,
    Bb84,
    AmplitudeDamping,
    Erasure,
    RandomUnitaryComplement,
}

#[derive(Args)]
struct Source {
    /// Channel JSON file.
    #[arg(long, conflicts_with = "family")]
    channel: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p_x: Option<f64>,
    #[arg(long)]
    p_z: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    dim_a: Option<usize>,
    #[arg(long)]
    dim_b: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

const VALIDATION: u8 = 2;
const SOLVER: u8 = 3;

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: VALIDATION, message: message.into() }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NumericalFailure(_) | Error::Infeasible(_) | Error::NotOptimal(_) => SOLVER,
            _ => VALIDATION,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn need<T>(v: Option<T>, flag: &str, family: &str) -> std::result::Result<T, Failure> {
    v.ok_or_else(|| invalid(format!("--{flag} is required for --family {family}")))
}

impl Source {
    fn spec(&self, family: Family) -> std::result::Result<ChannelFamilySpec, Failure> {
        Ok(match family {
            Family::Depolarizing => ChannelFamilySpec::Depolarizing { p: need(self.p, "p", "depolarizing")? },
            Family::Erasure => ChannelFamilySpec::Erasure { p: need(self.p, "p", "erasure")? },
            Family::Bb84 => ChannelFamilySpec::Bb84 {
                p_x: need(self.p_x, "p-x", "bb84")?,
                p_z: need(self.p_z, "p-z", "bb84")?,
            },
            Family::AmplitudeDamping => {
                ChannelFamilySpec::AmplitudeDamping { gamma: need(self.gamma, "gamma", "amplitude-damping")? }
            }
            Family::RandomUnitaryComplement => ChannelFamilySpec::RandomUnitaryComplement {
                dim_a: need(self.dim_a, "dim-a", "random-unitary-complement")?,
                dim_b: need(self.dim_b, "dim-b", "random-unitary-complement")?,
                seed: self.seed,
            },
        })
    }

    fn load(&self) -> std::result::Result<QuantumChannel, Failure> {
        match (&self.channel, self.family) {
            (Some(path), None) => Ok(io::read_channel(path)?),
            (None, Some(family)) => Ok(self.spec(family)?.build()?),
            _ => Err(invalid("give exactly one of --channel or --family")),
        }
    }
}

fn check_tol(tol: f64) -> Outcome {
    if !(tol > 0.0 && tol <= MAX_TOLERANCE) {
        return Err(invalid(format!("--tol must lie in (0, {MAX_TOLERANCE}], got {tol}")));
    }
    Ok(())
}

fn print_json(value: serde_json::Result<serde_json::Value>) -> Outcome {
    let text = value.and_then(|v| serde_json::to_string_pretty(&v)).map_err(|e| invalid(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Epsilon { source, anti, tol } => {
            check_tol(tol)?;
            let ch = source.load()?;
            let opts = SolveOptions::with_tolerance(tol);
            let report = if anti { epsilon_antidegradable_with(&ch, &opts)? } else { epsilon_degradable_with(&ch, &opts)? };
            print_json(serde_json::to_value(&report))
        }
        Command::Diamond { a, b, tol } => {
            check_tol(tol)?;
            let (a, b) = (io::read_channel(&a)?, io::read_channel(&b)?);
            let (d, sol) = qdeg::degradability::diamond_norm_distance_with(&a, &b, &SolveOptions::with_tolerance(tol))?;
            print_json(Ok(json!({ "diamond_distance": d, "solver": sol })))
        }
        Command::Q1 { source, starts } => {
            let ch = source.load()?;
            let m = channel_coherent_information_with(&ch, starts);
            print_json(Ok(json!({
                "value": m.value,
                "argmax": io::encode_matrix(m.argmax.matrix()),
                "converged": m.converged,
                "iterations": m.iterations,
                "starts": m.starts,
            })))
        }
        Command::Bounds { source, tol, starts } => {
            check_tol(tol)?;
            let ch = source.load()?;
            let report = epsilon_degradable_with(&ch, &SolveOptions::with_tolerance(tol))?;
            let q1 = channel_coherent_information_with(&ch, starts).value;
            let u = u_xi(&ch, &report.degrading_map()?)?;
            let bounds = qdeg::capacity_bounds(&report, q1, u)?;
            let bad = bounds.violations(DOMINANCE_SLACK.max(10.0 * tol));
            if !bad.is_empty() {
                return Err(Failure {
                    code: SOLVER,
                    message: format!("q1 = {q1} exceeds the upper bounds {bad:?}; the solve is not trustworthy"),
                });
            }
            print_json(serde_json::to_value(&bounds))
        }
        Command::Sweep { family, from, to, steps, ratio, out, workers, tol, u_xi, meta } => {
            check_tol(tol)?;
            if !(from.is_finite() && to.is_finite() && from <= to) {
                return Err(invalid("--from must not exceed --to"));
            }
            let grid = linspace(from, to, steps);
            let opts = SweepOptions { tolerance: tol, workers: workers.max(1), warm_start: true, with_u_xi: u_xi };
            let table = match family {
                SweepFamily::Depolarizing => sweep_depolarizing_with(&grid, &opts)?,
                SweepFamily::Bb84 => sweep_bb84_with(&grid, ratio, &opts)?,
            };
            qdeg::emit_csv(&table, &out)?;
            if meta {
                emit_meta(&table, &out)?;
            }
            let failed = table.rows.iter().filter(|r| !r.ok()).count();
            if failed > 0 {
                eprintln!("warning: {failed} of {} rows failed; the hull skips them", table.rows.len());
            }
            Ok(())
        }
        Command::Export { source, out } => {
            let ch = source.load()?;
            io::write_channel(&out, &ch)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
