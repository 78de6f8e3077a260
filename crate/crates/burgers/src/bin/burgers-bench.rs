use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use aggad::tape::TapeKind;
use aggad_burgers::check::{gate_config, gradient_check};
use aggad_burgers::{full_matrix, run_matrix, BurgersConfig, Mode};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Output {
    Csv,
    Json,
}

/// Coupled Burgers' equation benchmark: tape memory and timing per value
/// type and tape configuration.
#[derive(Debug, Parser)]
#[command(name = "burgers-bench", version)]
struct Args {
    /// Grid points per side.
    #[arg(long, default_value_t = 61)]
    grid: usize,
    /// Explicit Euler steps.
    #[arg(long, default_value_t = 16)]
    iters: usize,
    #[arg(long, default_value_t = 100.0)]
    reynolds: f64,
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    /// real, complex-unhandled or complex-handled.
    #[arg(long, default_value = "complex-handled")]
    mode: Mode,
    /// jacobian-linear, jacobian-reuse, primal-linear or primal-reuse.
    #[arg(long, default_value = "jacobian-linear")]
    tape: TapeKind,
    /// Runs to average timings over.
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Run every mode on every tape instead of the single configuration.
    #[arg(long)]
    matrix: bool,
    #[arg(long, value_enum, default_value_t = Output::Csv)]
    output: Output,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out_file: Option<PathBuf>,
    /// Run the finite-difference gradient gate on a 9×9 instance first.
    #[arg(long)]
    seed_check: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = BurgersConfig {
        grid: args.grid,
        iterations: args.iters,
        reynolds: args.reynolds,
        dt: args.dt,
        mode: args.mode,
        tape: args.tape,
        repetitions: args.reps,
    };
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }

    if args.seed_check {
        let modes: Vec<Mode> = if args.matrix {
            Mode::ALL.to_vec()
        } else {
            vec![args.mode]
        };
        for mode in modes {
            match gradient_check(&gate_config(mode, args.tape)) {
                Ok(report) if report.passed() => eprintln!(
                    "gradient check {mode}: {} checks passed",
                    report.entries.len()
                ),
                Ok(report) => {
                    eprintln!("gradient check {mode} failed:\n{}", report.to_text());
                    return ExitCode::from(1);
                }
                Err(e) => {
                    eprintln!("gradient check {mode} failed: {e}");
                    return ExitCode::from(1);
                }
            }
        }
    }

    let configs = if args.matrix {
        full_matrix(&config)
    } else {
        vec![config]
    };
    let report = run_matrix(&configs);
    for f in &report.failures {
        eprintln!("row {}/{} failed: {}", f.mode, f.tape, f.message);
    }
    for r in &report.memory_factors {
        eprintln!(
            "memory factor {} / {} on {}: {:.3}",
            r.numerator, r.denominator, r.tape, r.value
        );
    }
    for r in &report.handled_ratios {
        eprintln!(
            "memory ratio {} / {} on {}: {:.3}",
            r.numerator, r.denominator, r.tape, r.value
        );
    }

    let text = match args.output {
        Output::Csv => match report.to_csv() {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        Output::Json => report.to_json(),
    };
    match &args.out_file {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }

    if report.succeeded() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
