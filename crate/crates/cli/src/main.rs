//! qfimeter: maximal quantum Fisher information of a two-mode interferometer.
//!
//! Exit status contract: 0 success, 1 validation failure, 2 usage or
//! configuration error.

mod axes;
mod contour;
mod emit;
mod validate;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qfimeter_core::{
    evaluate_point, fisher_eps_zero, fisher_limit_no_interaction, fisher_limit_strong_interaction,
    noon_ground_state_overlap, richardson_extrapolate, sweep, HamiltonianParams,
};

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "qfimeter",
    version,
    about = "Maximal quantum Fisher information of a nonlinear two-mode interferometer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one parameter point (N, tau, eps, u).
    Point {
        /// Number of atoms N.
        #[arg(long)]
        n: usize,
        /// Tunneling amplitude tau.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tau: f64,
        /// Well asymmetry eps (the estimated parameter).
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eps: f64,
        /// Scaled interaction u = N U.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        u: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate f_M over a (tau, u) grid at fixed eps and N.
    Sweep {
        /// Tau axis: "start:stop:count" or a comma list.
        #[arg(long, default_value = "0:4:41", allow_hyphen_values = true)]
        tau_axis: String,
        /// U axis: "start:stop:count" or a comma list.
        #[arg(long, default_value = "0:10:41", allow_hyphen_values = true)]
        u_axis: String,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eps: f64,
        /// Number of atoms N.
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Worker threads for the grid (default: one per logical CPU).
        #[arg(long)]
        parallel: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Richardson-extrapolate f_M to N -> infinity over an N series.
    Extrapolate {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        u: f64,
        /// Strictly increasing atom numbers, comma-separated.
        #[arg(long, default_value = "8,16,32,64")]
        n_series: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare closed-form limits against the full pipeline.
    Limits {
        /// Number of atoms N.
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        u: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a self-check suite; exit 0 iff every check passes.
    Validate {
        /// One of: fd, quadrature, bounds, sampling, limits, all.
        #[arg(long)]
        suite: String,
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 20240817)]
        seed: u64,
        /// Fix the atom number instead of drawing it per case.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace f_M level curves of a sweep CSV into an SVG.
    Contour {
        /// Sweep CSV produced by the sweep subcommand.
        #[arg(long)]
        input: PathBuf,
        /// Spacing between contour levels.
        #[arg(long, default_value_t = 0.1)]
        spacing: f64,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Point {
            n,
            tau,
            eps,
            u,
            format,
            out,
        } => {
            let params = HamiltonianParams::new(tau, eps, u, n).map_err(stringify)?;
            let point = evaluate_point(&params).map_err(stringify)?;
            let text = match format {
                Format::Csv => emit::point_csv(&point),
                Format::Json => pretty(&emit::point_json(&point)),
            };
            deliver(&text, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            tau_axis,
            u_axis,
            eps,
            n,
            parallel,
            format,
            out,
        } => {
            let tau_values = axes::parse_axis(&tau_axis).map_err(|e| format!("--tau-axis: {e}"))?;
            let u_values = axes::parse_axis(&u_axis).map_err(|e| format!("--u-axis: {e}"))?;
            if parallel == Some(0) {
                return Err("--parallel must be at least 1".into());
            }
            let grid = sweep(&tau_values, &u_values, eps, n, parallel).map_err(stringify)?;
            let text = match format {
                Format::Csv => emit::grid_csv(&grid),
                Format::Json => pretty(&emit::grid_json(&grid)),
            };
            deliver(&text, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Extrapolate {
            tau,
            eps,
            u,
            n_series,
            format,
            out,
        } => {
            let series = axes::parse_n_series(&n_series).map_err(|e| format!("--n-series: {e}"))?;
            let mut points = Vec::with_capacity(series.len());
            for &n in &series {
                let params = HamiltonianParams::new(tau, eps, u, n).map_err(stringify)?;
                let point = evaluate_point(&params).map_err(stringify)?;
                points.push((n, point.fisher_scaled));
            }
            let result = richardson_extrapolate(&points).map_err(stringify)?;
            let text = match format {
                Format::Csv => emit::extrapolation_csv(&result),
                Format::Json => pretty(&emit::extrapolation_json(&result, tau, eps, u)),
            };
            deliver(&text, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Limits {
            n,
            tau,
            eps,
            u,
            format,
            out,
        } => {
            let rows = limit_rows(n, tau, eps, u)?;
            let text = match format {
                Format::Csv => emit::limits_csv(&rows),
                Format::Json => pretty(&emit::limits_json(&rows)),
            };
            deliver(&text, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            suite,
            seed,
            n,
            format,
            out,
        } => {
            if n == Some(0) {
                return Err("--n must be at least 1".into());
            }
            let checks = validate::run_suite(&suite, seed, n)?;
            let text = match format {
                Format::Csv => validate::report_csv(&checks),
                Format::Json => pretty(&validate::report_json(&suite, seed, &checks)),
            };
            deliver(&text, out.as_deref())?;
            if checks.iter().all(validate::Check::pass) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Contour {
            input,
            spacing,
            out,
        } => {
            if !(spacing.is_finite() && spacing > 0.0) {
                return Err(format!(
                    "--spacing must be a positive number, got {spacing}"
                ));
            }
            let text = fs::read_to_string(&input)
                .map_err(|e| format!("cannot read {}: {e}", input.display()))?;
            let grid = contour::parse_grid_csv(&text)?;
            let svg = contour::contour_svg(&grid, spacing);
            deliver(&svg, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Rows comparing each closed-form limit with the full pipeline evaluated in
/// the corresponding regime (around the point tau, eps, u at this N).
fn limit_rows(n: usize, tau: f64, eps: f64, u: f64) -> Result<Vec<emit::LimitRow>, String> {
    let mut rows = Vec::new();

    // The tilt law holds for a large drive at fixed direction, so the
    // pipeline is evaluated far out along the (tau, eps) ray.
    let scale = 1e4;
    let params = HamiltonianParams::new(scale * tau, scale * eps, 0.0, n).map_err(stringify)?;
    rows.push(emit::LimitRow {
        name: "no_interaction_tilt_law_F_M",
        analytic: fisher_limit_no_interaction(&params).map_err(stringify)?,
        numerical: evaluate_point(&params).map_err(stringify)?.fisher_max,
    });

    let strong = fisher_limit_strong_interaction(n).map_err(stringify)?;
    for (name, sign) in [
        ("strong_repulsion_F_M", 1.0),
        ("strong_attraction_F_M", -1.0),
    ] {
        let params = HamiltonianParams::new(tau, eps, sign * 1e4, n).map_err(stringify)?;
        rows.push(emit::LimitRow {
            name,
            analytic: strong,
            numerical: evaluate_point(&params).map_err(stringify)?.fisher_max,
        });
    }

    let line = fisher_eps_zero(tau, u, n).map_err(stringify)?;
    let params = HamiltonianParams::new(tau, 1e-6, u, n).map_err(stringify)?;
    rows.push(emit::LimitRow {
        name: "eps_to_zero_line_F_M",
        analytic: line.fisher_max,
        numerical: evaluate_point(&params).map_err(stringify)?.fisher_max,
    });

    let params = HamiltonianParams::new(tau, 0.0, -1e3, n).map_err(stringify)?;
    rows.push(emit::LimitRow {
        name: "noon_overlap_attractive",
        analytic: 1.0,
        numerical: noon_ground_state_overlap(&params).map_err(stringify)?,
    });

    Ok(rows)
}

fn stringify(e: qfimeter_core::QfiError) -> String {
    e.to_string()
}

fn pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json serialization is infallible");
    text.push('\n');
    text
}

fn deliver(text: &str, out: Option<&std::path::Path>) -> Result<(), String> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
