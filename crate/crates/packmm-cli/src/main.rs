//! Command-line front end for the packmm library.
//!
//! Five subcommands: `gen` writes random matrix files, `mul` multiplies two
//! files with a selectable engine, `verify` re-checks a product file against
//! the classical reference, `bench` sweeps sizes and engines into a table
//! plus optional CSV, and `predict` prints the analytic cost figures for a
//! single size.
//!
//! Exit status: 0 on success, 1 on any usage or runtime error, 2 when a
//! product fails verification.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use packmm::baselines;
use packmm::costmodel::{
    machine_cost, predict_ops_binet, predict_ops_closed, predict_ops_recursive,
    predict_ops_strassen, required_digits, CostReport, CostRow,
};
use packmm::packmul::{
    epsilon_exponent, mm_flat_counted, mm_flat_metered, mm_recursive, mm_recursive_metered,
    mm_signed, multiply_fixed_point, verify_exact, verify_exact_signed,
};
use packmm::{
    DigitMeter, EpsilonSchedule, FixedPointMatrix, IntMatrix, MachineModel, OpCount, SignedMatrix,
};

#[derive(Parser)]
#[command(name = "packmm", version, about = "Exact matrix multiplication via digit packing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum Engine {
    /// One packed scalar per row and column, one big multiply per cell.
    Flat,
    /// Block recursion with a squared-epsilon schedule per level.
    Recursive,
    /// Digit-plane decomposition on top of the flat engine.
    Fixedpoint,
    /// Offset transform for matrices with negative entries.
    Signed,
    /// Row-by-column reference product.
    Classical,
    /// Eight-product block recursion.
    Binet,
    /// Seven-product block recursion.
    Strassen,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::Flat => "flat",
            Engine::Recursive => "recursive",
            Engine::Fixedpoint => "fixedpoint",
            Engine::Signed => "signed",
            Engine::Classical => "classical",
            Engine::Binet => "binet",
            Engine::Strassen => "strassen",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a random N x N matrix with entries below 10^digits.
    Gen {
        /// Side length of the square matrix.
        #[arg(long)]
        n: usize,
        /// Maximum decimal digits per entry.
        #[arg(long, default_value_t = 1)]
        digits: u32,
        /// Generator seed; the same seed always writes the same file.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Multiply two matrix files and report the operation count.
    Mul {
        /// Left input file.
        #[arg(long)]
        a: PathBuf,
        /// Right input file.
        #[arg(long)]
        b: PathBuf,
        /// Where to write the product; omitted means report only.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Engine::Flat)]
        engine: Engine,
        /// Skip the classical cross-check.
        #[arg(long, default_value_t = false)]
        no_verify: bool,
        /// Zero-pad to the next power of two for the block engines.
        #[arg(long, default_value_t = false)]
        pad: bool,
        /// Override the packing exponent (flat and recursive engines only).
        #[arg(long)]
        force_e: Option<u32>,
    },
    /// Check a product file against the classical reference.
    Verify {
        /// Left input file.
        #[arg(long)]
        a: PathBuf,
        /// Right input file.
        #[arg(long)]
        b: PathBuf,
        /// Candidate product file.
        #[arg(long)]
        out: PathBuf,
        /// Number domain: `signed` reads all three files as signed matrices.
        #[arg(long, value_enum, default_value_t = Engine::Flat)]
        engine: Engine,
    },
    /// Run engines over a list of sizes and emit a cost table.
    Bench {
        /// Sizes to run, e.g. --n 4 --n 8 or --n 4,8,16.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        /// Engines to run at every size.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Engine::Recursive])]
        engine: Vec<Engine>,
        /// Maximum decimal digits per generated entry.
        #[arg(long, default_value_t = 1)]
        digits: u32,
        /// Seed for the generated inputs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Timed repetitions per cell; the fastest is reported.
        #[arg(long, default_value_t = 5)]
        trials: u32,
        /// Write the table as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Zero-pad non-power-of-two sizes for the block engines.
        #[arg(long, default_value_t = false)]
        pad: bool,
    },
    /// Print the analytic cost figures for one size.
    Predict {
        /// Matrix side length; padded up to a power of two if needed.
        #[arg(long)]
        n: u64,
        /// Assumed cost of one wide multiplication.
        #[arg(long, default_value_t = MachineModel::UnitCost)]
        model: MachineModel,
        /// Entry digit budget for the digit-requirement line.
        #[arg(long, default_value_t = 1)]
        digits: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Gen { n, digits, seed, out } => cmd_gen(n, digits, seed, &out),
        Command::Mul { a, b, out, engine, no_verify, pad, force_e } => {
            cmd_mul(&a, &b, out.as_deref(), engine, !no_verify, pad, force_e)
        }
        Command::Verify { a, b, out, engine } => cmd_verify(&a, &b, &out, engine),
        Command::Bench { n, engine, digits, seed, trials, csv, pad } => {
            cmd_bench(&n, &engine, digits, seed, trials.max(1), csv.as_deref(), pad)
        }
        Command::Predict { n, model, digits } => cmd_predict(n, model, digits),
    }
}

fn cmd_gen(n: usize, digits: u32, seed: u64, out: &Path) -> Result<ExitCode, String> {
    let matrix = IntMatrix::random(n, n, digits, seed).map_err(|e| e.to_string())?;
    matrix.write_path(out).map_err(|e| e.to_string())?;
    println!("wrote {} ({n}x{n}, digits={digits}, seed={seed})", out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_mul(
    a_path: &Path,
    b_path: &Path,
    out: Option<&Path>,
    engine: Engine,
    verify: bool,
    pad: bool,
    force_e: Option<u32>,
) -> Result<ExitCode, String> {
    if force_e.is_some() && !matches!(engine, Engine::Flat | Engine::Recursive) {
        return Err(format!("--force-e only applies to the packed engines, not {engine}"));
    }

    if engine == Engine::Signed {
        let a = SignedMatrix::read_path(a_path).map_err(|e| e.to_string())?;
        let b = SignedMatrix::read_path(b_path).map_err(|e| e.to_string())?;
        let c = mm_signed(&a, &b).map_err(|e| e.to_string())?;
        if let Some(path) = out {
            c.write_path(path).map_err(|e| e.to_string())?;
        }
        return finish_mul(None, verify.then(|| verify_exact_signed(&a, &b, &c)).transpose());
    }

    let a = IntMatrix::read_path(a_path).map_err(|e| e.to_string())?;
    let b = IntMatrix::read_path(b_path).map_err(|e| e.to_string())?;
    let (c, ops) = multiply_unsigned(&a, &b, engine, pad, force_e)?;
    if let Some(path) = out {
        c.write_path(path).map_err(|e| e.to_string())?;
    }
    finish_mul(ops, verify.then(|| verify_exact(&a, &b, &c)).transpose())
}

fn finish_mul(
    ops: Option<OpCount>,
    verification: Result<Option<packmm::VerifyOutcome>, packmm::PackMulError>,
) -> Result<ExitCode, String> {
    let verification = verification.map_err(|e| e.to_string())?;
    let count = match ops {
        Some(ops) => format!("count={}", ops.total()),
        None => "count=n/a".to_string(),
    };
    match verification {
        None => {
            println!("{count}");
            Ok(ExitCode::SUCCESS)
        }
        Some(outcome) if outcome.exact => {
            println!("{count}, verified");
            Ok(ExitCode::SUCCESS)
        }
        Some(outcome) => {
            println!("{count}, MISMATCH (max diff {})", outcome.max_abs_diff);
            Ok(ExitCode::from(2))
        }
    }
}

fn multiply_unsigned(
    a: &IntMatrix,
    b: &IntMatrix,
    engine: Engine,
    pad: bool,
    force_e: Option<u32>,
) -> Result<(IntMatrix, Option<OpCount>), String> {
    let err = |e: &dyn fmt::Display| e.to_string();
    match engine {
        Engine::Flat => {
            let e = force_e.unwrap_or_else(|| {
                epsilon_exponent(a.max_entry(), b.max_entry(), a.cols() as u64)
            });
            let (c, ops) = mm_flat_counted(a, b, e).map_err(|e| err(&e))?;
            Ok((c, Some(ops)))
        }
        Engine::Recursive => {
            let (ap, bp, original) = pad_square(a, b, pad)?;
            let sched = match force_e {
                Some(e) => EpsilonSchedule::new(e, ap.rows()).map_err(|e| err(&e))?,
                None => EpsilonSchedule::for_matrices(&ap, &bp).map_err(|e| err(&e))?,
            };
            let (c, ops) = mm_recursive(&ap, &bp, &sched).map_err(|e| err(&e))?;
            Ok((unpad(c, original)?, Some(ops)))
        }
        Engine::Fixedpoint => {
            let c = multiply_fixed_point(
                &FixedPointMatrix::new(a.clone(), 0),
                &FixedPointMatrix::new(b.clone(), 0),
            )
            .map_err(|e| err(&e))?;
            Ok((c.matrix().clone(), None))
        }
        Engine::Classical => {
            let (c, ops) = baselines::classical(a, b).map_err(|e| err(&e))?;
            Ok((c, Some(ops)))
        }
        Engine::Binet => {
            let (ap, bp, original) = pad_square(a, b, pad)?;
            let (c, ops) = baselines::binet_recursive(&ap, &bp).map_err(|e| err(&e))?;
            Ok((unpad(c, original)?, Some(ops)))
        }
        Engine::Strassen => {
            let (ap, bp, original) = pad_square(a, b, pad)?;
            let (c, ops) = baselines::strassen(&ap, &bp).map_err(|e| err(&e))?;
            Ok((unpad(c, original)?, Some(ops)))
        }
        Engine::Signed => Err("signed engine reads signed files".to_string()),
    }
}

/// Operands padded to a shared square, plus the original output shape (when
/// padding happened) so the product can be cropped back.
type PaddedPair = (IntMatrix, IntMatrix, Option<(usize, usize)>);

/// Pad both operands to a shared power-of-two square when asked to.
fn pad_square(a: &IntMatrix, b: &IntMatrix, pad: bool) -> Result<PaddedPair, String> {
    if !pad {
        return Ok((a.clone(), b.clone(), None));
    }
    let side = a
        .rows()
        .max(a.cols())
        .max(b.rows())
        .max(b.cols())
        .next_power_of_two();
    let ap = a.pad_to(side).map_err(|e| e.to_string())?;
    let bp = b.pad_to(side).map_err(|e| e.to_string())?;
    Ok((ap, bp, Some((a.rows(), b.cols()))))
}

fn unpad(c: IntMatrix, original: Option<(usize, usize)>) -> Result<IntMatrix, String> {
    match original {
        Some((rows, cols)) => c.crop(rows, cols).map_err(|e| e.to_string()),
        None => Ok(c),
    }
}

fn cmd_verify(a_path: &Path, b_path: &Path, out: &Path, engine: Engine) -> Result<ExitCode, String> {
    let outcome = if engine == Engine::Signed {
        let a = SignedMatrix::read_path(a_path).map_err(|e| e.to_string())?;
        let b = SignedMatrix::read_path(b_path).map_err(|e| e.to_string())?;
        let c = SignedMatrix::read_path(out).map_err(|e| e.to_string())?;
        verify_exact_signed(&a, &b, &c).map_err(|e| e.to_string())?
    } else {
        let a = IntMatrix::read_path(a_path).map_err(|e| e.to_string())?;
        let b = IntMatrix::read_path(b_path).map_err(|e| e.to_string())?;
        let c = IntMatrix::read_path(out).map_err(|e| e.to_string())?;
        verify_exact(&a, &b, &c).map_err(|e| e.to_string())?
    };
    if outcome.exact {
        println!("exact, max diff 0");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("MISMATCH, max diff {}", outcome.max_abs_diff);
        Ok(ExitCode::from(2))
    }
}

struct BenchCell {
    ops: u64,
    predicted: u64,
    digits: u64,
    wall_ns: u64,
}

fn cmd_bench(
    sizes: &[usize],
    engines: &[Engine],
    digits: u32,
    seed: u64,
    trials: u32,
    csv: Option<&Path>,
    pad: bool,
) -> Result<ExitCode, String> {
    let mut report = CostReport::new();
    println!(
        "{:>6}  {:<10}  {:>12}  {:>12}  {:>8}  {:>8}  {:>12}",
        "N", "engine", "ops", "predicted", "coeff", "digits", "wall_ns"
    );
    for (index, &n) in sizes.iter().enumerate() {
        let cell_seed = seed.wrapping_add((index as u64) << 32);
        for &engine in engines {
            match bench_cell(n, engine, digits, cell_seed, trials, pad) {
                Ok((run_n, cell)) => {
                    let coeff = cell.ops as f64 / (run_n * run_n) as f64;
                    println!(
                        "{:>6}  {:<10}  {:>12}  {:>12}  {:>8}  {:>8}  {:>12}",
                        run_n, engine, cell.ops, cell.predicted, coeff, cell.digits, cell.wall_ns
                    );
                    let row = CostRow {
                        n: run_n as u64,
                        algorithm: engine.name().to_string(),
                        ops: cell.ops,
                        predicted: cell.predicted,
                        digits: cell.digits,
                        wall_ns: Some(cell.wall_ns),
                    };
                    if let Err(e) = report.push(row) {
                        println!("{n:>6}  {engine:<10}  dropped from CSV: {e}");
                    }
                }
                Err(reason) => {
                    println!("{n:>6}  {engine:<10}  FAILED: {reason}");
                }
            }
        }
    }
    if let Some(path) = csv {
        std::fs::write(path, report.to_csv()).map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Run one (N, engine) cell. Returns the size actually run (padding may
/// round it up) alongside the measurements.
fn bench_cell(
    n: usize,
    engine: Engine,
    digits: u32,
    seed: u64,
    trials: u32,
    pad: bool,
) -> Result<(usize, BenchCell), String> {
    let block_engine = matches!(engine, Engine::Recursive | Engine::Binet | Engine::Strassen);
    let run_n = if block_engine && !n.is_power_of_two() {
        if !pad {
            return Err(format!("{n} is not a power of two (rerun with --pad)"));
        }
        n.next_power_of_two()
    } else {
        n
    };
    let a = IntMatrix::random(run_n, run_n, digits, seed).map_err(|e| e.to_string())?;
    let b = IntMatrix::random(run_n, run_n, digits, seed ^ 0x5DEECE66D).map_err(|e| e.to_string())?;
    let nn = run_n as u64;

    let mut best_ns = u64::MAX;
    let mut measured: Option<(u64, u64)> = None;
    for _ in 0..trials {
        let started = Instant::now();
        let (ops, observed) = match engine {
            Engine::Flat => {
                let e = epsilon_exponent(a.max_entry(), b.max_entry(), nn);
                let mut meter = DigitMeter::new();
                let (_, ops) = mm_flat_metered(&a, &b, e, &mut meter).map_err(|e| e.to_string())?;
                (ops.total(), meter.max_digits())
            }
            Engine::Recursive => {
                let sched = EpsilonSchedule::for_matrices(&a, &b).map_err(|e| e.to_string())?;
                let mut meter = DigitMeter::new();
                let (_, ops) =
                    mm_recursive_metered(&a, &b, &sched, &mut meter).map_err(|e| e.to_string())?;
                (ops.total(), meter.max_digits())
            }
            Engine::Classical => {
                let (c, ops) = baselines::classical(&a, &b).map_err(|e| e.to_string())?;
                (ops.total(), c.digits() as u64)
            }
            Engine::Binet => {
                let (c, ops) = baselines::binet_recursive(&a, &b).map_err(|e| e.to_string())?;
                (ops.total(), c.digits() as u64)
            }
            Engine::Strassen => {
                let (c, ops) = baselines::strassen(&a, &b).map_err(|e| e.to_string())?;
                (ops.total(), c.digits() as u64)
            }
            Engine::Fixedpoint | Engine::Signed => {
                return Err(format!("{engine} engine exposes no operation counts"));
            }
        };
        best_ns = best_ns.min(started.elapsed().as_nanos() as u64);
        measured = Some((ops, observed));
    }
    let (ops, observed) = measured.expect("at least one trial");

    let predicted = match engine {
        Engine::Recursive => predict_ops_closed(nn).map_err(|e| e.to_string())?,
        Engine::Classical | Engine::Binet => predict_ops_binet(nn).map_err(|e| e.to_string())?,
        Engine::Strassen => {
            let (mults, adds) = predict_ops_strassen(nn).map_err(|e| e.to_string())?;
            mults + adds
        }
        Engine::Flat => {
            // MK + KP entry packings, (M+P)(K-1) packing adds, and one
            // multiply, floor and mod per cell.
            2 * nn * nn + 2 * nn * (nn - 1) + 3 * nn * nn
        }
        Engine::Fixedpoint | Engine::Signed => unreachable!("rejected above"),
    };
    Ok((run_n, BenchCell { ops, predicted, digits: observed, wall_ns: best_ns }))
}

fn cmd_predict(n: u64, model: MachineModel, digits: u32) -> Result<ExitCode, String> {
    let padded = n.max(1).next_power_of_two();
    if padded == n {
        println!("N               {n}");
    } else {
        println!("N               {n} (padded to {padded})");
    }
    let closed = predict_ops_closed(padded).map_err(|e| e.to_string())?;
    let recurrence = predict_ops_recursive(padded).map_err(|e| e.to_string())?;
    println!("closed form     {closed}");
    println!("recurrence      {recurrence}");
    println!("required digits {}", required_digits(padded, digits));
    let cost = machine_cost(padded, model);
    if cost.fract() == 0.0 {
        println!("machine cost    {cost:.0} ({model})");
    } else {
        println!("machine cost    {cost:.2} ({model})");
    }
    Ok(ExitCode::SUCCESS)
}
