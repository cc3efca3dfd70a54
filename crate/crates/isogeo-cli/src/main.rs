//! Command-line front end for the isogeo library.
//!
//! Exposes validation of JSON matrix files, the uncertainty bound, the
//! dispersion-length comparison, horizontal lifts, distance estimates,
//! the two-level Bures comparison, and von Neumann evolution. All file
//! exchange uses the shared JSON formats; every run is deterministic for
//! a fixed seed. Exit codes: 0 on success, 2 on domain validation
//! failures, 1 on file I/O failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use isogeo::bures_compare::example_gap_report;
use isogeo::error::Error;
use isogeo::evolution::{
    curve_length, distance_upper_bound_detailed, energy_dispersion, horizontal_lift,
    von_neumann_evolve, HamiltonianSchedule, StateCurve,
};
use isogeo::io;
use isogeo::linalg::{c, eigh_desc, herm_residual, CMatrix};
use isogeo::observables::{dispersion_bound_check, variance_decomposition, Observable};
use isogeo::state_space::{
    density_from_matrix, distinguishable, standard_purification, validate_spectrum,
    DensityOperator, Purification, Spectrum,
};
use isogeo::Tolerances;

/// Restart budget of the distance search; fixed so equal seeds give
/// byte-identical reports.
const DISTANCE_RESTARTS: usize = 8;

/// Relative window within which the dispersion-length slack counts as
/// the equality case; sized for integrator and quadrature noise.
const EQUALITY_WINDOW: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "isogeo",
    version,
    about = "Geometry of isospectral density operators: validation, uncertainty bounds, lifts, distances, and dynamics over JSON files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Reduced Planck constant used in every physical formula.
    #[arg(long, global = true, default_value_t = 1.0)]
    hbar: f64,

    /// Base tolerance for all residual checks.
    #[arg(long, global = true, env = "ISOGEO_TOL", default_value_t = 1e-9)]
    tol: f64,

    /// Seed for every pseudo-random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Number of uniform integration steps per time interval.
    #[arg(long, global = true, default_value_t = 1000)]
    steps: usize,

    /// Print the machine-readable JSON report instead of the text lines.
    #[arg(long, global = true)]
    json: bool,

    /// File that receives the command's JSON artifact.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a matrix file holds a density operator or a purification.
    Validate {
        /// Matrix JSON file.
        path: PathBuf,
    },
    /// Compare the uncertainty of an observable against its metric bound.
    Uncertainty {
        /// Hermitian observable, matrix JSON file.
        observable: PathBuf,
        /// Density operator, matrix JSON file.
        state: PathBuf,
    },
    /// Integrate a drive and compare energy dispersion with curve length.
    Dispersion {
        /// Hermitian Hamiltonian, matrix JSON file.
        hamiltonian: PathBuf,
        /// Initial density operator, matrix JSON file.
        state: PathBuf,
        /// Start of the time interval.
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        /// End of the time interval.
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
    },
    /// Horizontally lift a sampled state curve and report its residuals.
    Lift {
        /// State curve, curve JSON file.
        curve: PathBuf,
    },
    /// Estimate the distance between two isospectral states.
    Distance {
        /// First density operator, matrix JSON file.
        state0: PathBuf,
        /// Second density operator, matrix JSON file.
        state1: PathBuf,
        /// Write the Hamiltonian schedule realizing the bound and print its path.
        #[arg(long)]
        emit_hamiltonian: bool,
    },
    /// Report the gap between orbit and Bures distances for the rotation family.
    BuresExample {
        /// Larger eigenvalue of the two-level spectrum.
        p1: f64,
        /// Smaller eigenvalue of the two-level spectrum.
        p2: f64,
        /// Rotation rate of the family.
        eps: f64,
    },
    /// Integrate the von Neumann equation and save the state curve.
    Evolve {
        /// Hermitian Hamiltonian, matrix JSON file.
        hamiltonian: PathBuf,
        /// Initial density operator, matrix JSON file.
        state: PathBuf,
        /// Start of the time interval.
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        /// End of the time interval.
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::FileNotFound { .. } | Error::ParseError { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    if cli.hbar.is_nan() || cli.hbar <= 0.0 {
        return Err(Error::NotApplicable {
            reason: format!("hbar must be positive, got {}", cli.hbar),
        });
    }
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        return Err(Error::NotApplicable {
            reason: format!("tol must be positive, got {}", cli.tol),
        });
    }
    if cli.steps < 2 {
        return Err(Error::NotApplicable {
            reason: format!("steps must be at least 2, got {}", cli.steps),
        });
    }
    let tols = Tolerances::from_base(cli.tol);
    match &cli.command {
        Command::Validate { path } => cmd_validate(cli, &tols, path),
        Command::Uncertainty { observable, state } => {
            cmd_uncertainty(cli, &tols, observable, state)
        }
        Command::Dispersion {
            hamiltonian,
            state,
            t0,
            t1,
        } => cmd_dispersion(cli, &tols, hamiltonian, state, *t0, *t1),
        Command::Lift { curve } => cmd_lift(cli, &tols, curve),
        Command::Distance {
            state0,
            state1,
            emit_hamiltonian,
        } => cmd_distance(cli, &tols, state0, state1, *emit_hamiltonian),
        Command::BuresExample { p1, p2, eps } => cmd_bures_example(cli, &tols, *p1, *p2, *eps),
        Command::Evolve {
            hamiltonian,
            state,
            t0,
            t1,
        } => cmd_evolve(cli, &tols, hamiltonian, state, *t0, *t1),
    }
}

/// Twelve significant digits, the fixed print precision of the tool.
fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

fn spectrum_line(sigma: &Spectrum) -> String {
    let entries: Vec<String> = sigma.values().iter().map(|v| sig(*v)).collect();
    format!("({})", entries.join(", "))
}

fn multiplicity_line(sigma: &Spectrum) -> String {
    let entries: Vec<String> = sigma
        .multiplicities()
        .iter()
        .map(|(value, count)| format!("{} x {}", sig(*value), count))
        .collect();
    entries.join(", ")
}

fn emit_report(cli: &Cli, lines: &[String], report: &serde_json::Value) -> Result<(), Error> {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(report).expect("serializable"));
    } else {
        for line in lines {
            println!("{line}");
        }
    }
    if let Some(path) = &cli.output {
        write_json(path, report)?;
    }
    Ok(())
}

fn write_json(path: &Path, payload: &serde_json::Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(payload).expect("serializable");
    std::fs::write(path, text).map_err(|_| Error::FileNotFound {
        path: path.display().to_string(),
    })
}

fn load_density(path: &Path, tols: &Tolerances) -> Result<(DensityOperator, Spectrum), Error> {
    let m = io::load_matrix(path)?;
    density_from_matrix(&m, tols)
}

/// Interprets a rectangular or non-Hermitian matrix as a purification:
/// the Gram matrix must be diagonal with a valid spectrum on the diagonal.
fn validate_purification(m: &CMatrix, tols: &Tolerances) -> Result<Purification, Error> {
    let gram = m.adjoint() * m;
    let k = gram.nrows();
    let mut offdiag = 0.0_f64;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                offdiag += gram[(i, j)].norm_sqr();
            }
        }
    }
    let offdiag = offdiag.sqrt();
    if offdiag > tols.fiber * gram.norm().max(1.0) {
        return Err(Error::FiberViolation { residual: offdiag });
    }
    let values: Vec<f64> = (0..k).map(|i| gram[(i, i)].re).collect();
    match validate_spectrum(&values, m.nrows(), tols) {
        Ok(sigma) => Purification::new(m.clone(), sigma, tols),
        Err(_) => {
            // The Gram matrix is diagonal but not a valid rank projector
            // weighting, so the frame sits in no fiber at all; report how
            // far it is from the nearest admissible one.
            let mut sorted = values.clone();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
            let disorder: f64 = values
                .iter()
                .zip(&sorted)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let trace_gap = (values.iter().sum::<f64>() - 1.0).abs();
            Err(Error::FiberViolation {
                residual: disorder.max(trace_gap),
            })
        }
    }
}

fn cmd_validate(cli: &Cli, tols: &Tolerances, path: &Path) -> Result<(), Error> {
    let m = io::load_matrix(path)?;
    let square = m.nrows() == m.ncols();
    let hermitian = square && herm_residual(&m) <= tols.herm * m.norm().max(1.0);
    let (kind, sigma) = if hermitian {
        let (_, sigma) = density_from_matrix(&m, tols)?;
        ("density operator", sigma)
    } else {
        match validate_purification(&m, tols) {
            Ok(psi) => ("purification", psi.spectrum().clone()),
            Err(purification_err) => {
                if square {
                    density_from_matrix(&m, tols)?;
                }
                return Err(purification_err);
            }
        }
    };
    let lines = vec![
        format!("valid {kind}"),
        format!(
            "hilbert dimension: {}, rank: {}",
            sigma.hilbert_dim(),
            sigma.rank()
        ),
        format!("spectrum: {}", spectrum_line(&sigma)),
        format!("multiplicities: {}", multiplicity_line(&sigma)),
    ];
    let report = json!({
        "valid": true,
        "kind": if hermitian { "density" } else { "purification" },
        "hilbert_dim": sigma.hilbert_dim(),
        "rank": sigma.rank(),
        "spectrum": sigma.values(),
        "multiplicities": sigma
            .multiplicities()
            .iter()
            .map(|(value, count)| json!({ "value": value, "count": count }))
            .collect::<Vec<_>>(),
    });
    emit_report(cli, &lines, &report)
}

fn cmd_uncertainty(
    cli: &Cli,
    tols: &Tolerances,
    observable: &Path,
    state: &Path,
) -> Result<(), Error> {
    let a = Observable::new(io::load_matrix(observable)?, cli.hbar, tols)?;
    let (rho, _) = load_density(state, tols)?;
    let bound = dispersion_bound_check(&a, &rho, tols)?;
    let psi = standard_purification(&rho, tols)?;
    let split = variance_decomposition(&a, &psi, tols)?;
    let lines = vec![
        format!("delta_a: {}", sig(bound.lhs)),
        format!("bound: {}", sig(bound.rhs)),
        format!("equality: {}", bound.is_equality),
        format!("g_term: {}", sig(split.g_term)),
        format!("square_of_mean_term: {}", sig(split.square_of_mean_term)),
        format!("second_moment_term: {}", sig(split.second_moment_term)),
    ];
    let report = json!({
        "delta_a": bound.lhs,
        "bound": bound.rhs,
        "equality": bound.is_equality,
        "g_term": split.g_term,
        "square_of_mean_term": split.square_of_mean_term,
        "second_moment_term": split.second_moment_term,
    });
    emit_report(cli, &lines, &report)
}

fn cmd_dispersion(
    cli: &Cli,
    tols: &Tolerances,
    hamiltonian: &Path,
    state: &Path,
    t0: f64,
    t1: f64,
) -> Result<(), Error> {
    let h = io::load_matrix(hamiltonian)?;
    let (rho0, _) = load_density(state, tols)?;
    let schedule = HamiltonianSchedule::constant(&h, cli.hbar, t0, t1, cli.steps, tols)?;
    let curve = von_neumann_evolve(&schedule, &rho0, tols)?;
    let dispersion = energy_dispersion(&schedule, &curve, tols)?;
    let length = curve_length(&curve, tols)?;
    let slack = dispersion - length;
    let equality = slack.abs() <= EQUALITY_WINDOW * dispersion.max(1.0);
    let lines = vec![
        format!("dispersion: {}", sig(dispersion)),
        format!("length: {}", sig(length)),
        format!("slack: {}", sig(slack)),
        format!("equality: {equality}"),
    ];
    let report = json!({
        "dispersion": dispersion,
        "length": length,
        "slack": slack,
        "equality": equality,
    });
    emit_report(cli, &lines, &report)
}

fn cmd_lift(cli: &Cli, tols: &Tolerances, curve_path: &Path) -> Result<(), Error> {
    let (times, mats) = io::load_curve(curve_path)?;
    let states = mats
        .iter()
        .map(|m| density_from_matrix(m, tols).map(|(rho, _)| rho))
        .collect::<Result<Vec<_>, Error>>()?;
    let curve = StateCurve::new(times, states, tols)?;
    let psi0 = standard_purification(&curve.states()[0], tols)?;
    let lift = horizontal_lift(&curve, &psi0, tols)?;
    let length = lift.length();
    let fiber = lift.max_fiber_residual();
    let horizontality = lift.max_horizontality_residual();
    let projection = lift.max_projection_residual(&curve)?;
    if let Some(path) = &cli.output {
        let frames: Vec<CMatrix> = lift
            .purifications()
            .iter()
            .map(|p| p.matrix().clone())
            .collect();
        io::save_curve(path, lift.times(), &frames)?;
    }
    let lines = vec![
        format!("samples: {}", lift.times().len()),
        format!("length: {}", sig(length)),
        format!("fiber residual: {}", sig(fiber)),
        format!("horizontality residual: {}", sig(horizontality)),
        format!("projection residual: {}", sig(projection)),
    ];
    let report = json!({
        "samples": lift.times().len(),
        "length": length,
        "fiber_residual": fiber,
        "horizontality_residual": horizontality,
        "projection_residual": projection,
    });
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        for line in &lines {
            println!("{line}");
        }
    }
    Ok(())
}

fn cmd_distance(
    cli: &Cli,
    tols: &Tolerances,
    state0: &Path,
    state1: &Path,
    emit_hamiltonian: bool,
) -> Result<(), Error> {
    let (rho0, _) = load_density(state0, tols)?;
    let (rho1, _) = load_density(state1, tols)?;
    let (upper, generator) =
        distance_upper_bound_detailed(&rho0, &rho1, DISTANCE_RESTARTS, cli.seed, tols)?;
    let orthogonal = distinguishable(&rho0, &rho1, tols)?;
    let mut lines = vec![format!("distance upper bound: {}", sig(upper))];
    if orthogonal {
        lines.push(format!(
            "endpoints are distinguishable: distance is bounded below by pi/2 = {}",
            sig(std::f64::consts::FRAC_PI_2)
        ));
    }
    let mut schedule_path = None;
    if emit_hamiltonian {
        let h = (&generator * c(0.0, cli.hbar)).clone();
        let h = isogeo::linalg::hermitize(&h);
        let schedule = HamiltonianSchedule::constant(&h, cli.hbar, 0.0, 1.0, cli.steps, tols)?;
        let frames: Vec<CMatrix> = schedule
            .operators()
            .iter()
            .map(|o| o.matrix().clone())
            .collect();
        let target = cli
            .output
            .clone()
            .unwrap_or_else(|| PathBuf::from("hamiltonian_schedule.json"));
        io::save_curve(&target, schedule.times(), &frames)?;
        lines.push(format!(
            "hamiltonian schedule written to {}",
            target.display()
        ));
        schedule_path = Some(target.display().to_string());
    }
    let report = json!({
        "upper_bound": upper,
        "distinguishable": orthogonal,
        "lower_bound": if orthogonal {
            serde_json::Value::from(std::f64::consts::FRAC_PI_2)
        } else {
            serde_json::Value::Null
        },
        "schedule_path": schedule_path,
    });
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        for line in &lines {
            println!("{line}");
        }
    }
    if !emit_hamiltonian {
        if let Some(path) = &cli.output {
            write_json(path, &report)?;
        }
    }
    Ok(())
}

fn cmd_bures_example(
    cli: &Cli,
    tols: &Tolerances,
    p1: f64,
    p2: f64,
    eps: f64,
) -> Result<(), Error> {
    let report = example_gap_report(p1, p2, eps, tols)?;
    let lines = vec![
        format!("dist_g: {}", sig(report.dist_g)),
        format!("dist_B: {}", sig(report.dist_b)),
        format!("gap: {}", sig(report.gap)),
        format!("strict: {}", report.strict),
    ];
    let payload = serde_json::to_value(&report).expect("serializable");
    emit_report(cli, &lines, &payload)
}

fn cmd_evolve(
    cli: &Cli,
    tols: &Tolerances,
    hamiltonian: &Path,
    state: &Path,
    t0: f64,
    t1: f64,
) -> Result<(), Error> {
    let h = io::load_matrix(hamiltonian)?;
    let (rho0, sigma) = load_density(state, tols)?;
    let schedule = HamiltonianSchedule::constant(&h, cli.hbar, t0, t1, cli.steps, tols)?;
    let curve = von_neumann_evolve(&schedule, &rho0, tols)?;
    let drift = curve
        .states()
        .iter()
        .map(|s| {
            let (lam, _) = eigh_desc(s.matrix());
            let kept = &lam[..sigma.rank()];
            kept.iter()
                .zip(sigma.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max)
        })
        .fold(0.0_f64, f64::max);
    if let Some(path) = &cli.output {
        let mats: Vec<CMatrix> = curve.states().iter().map(|s| s.matrix().clone()).collect();
        io::save_curve(path, curve.times(), &mats)?;
    }
    let final_state = io::MatrixJson::from_matrix(
        curve.states().last().expect("curve has samples").matrix(),
    );
    let lines = vec![
        format!("samples: {}", curve.len()),
        format!("duration: {}", sig(curve.duration())),
        format!("spectrum drift: {}", sig(drift)),
    ];
    let report = json!({
        "samples": curve.len(),
        "duration": curve.duration(),
        "spectrum_drift": drift,
        "final": serde_json::to_value(&final_state).expect("serializable"),
    });
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        for line in &lines {
            println!("{line}");
        }
    }
    Ok(())
}
