//! Command-line front end. Every command produces one JSON document; exit codes
//! come from [`Error::exit_code`].

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::dicke::{build_collective_matrices, DickeState, SystemParams};
use crate::error::{Error, Result};
use crate::files::{format_float, ScheduleFile, TargetFile, Value};
use crate::fullspace::crosscheck_dicke_restriction;
use crate::linalg::{commutator, max_abs_diff, CMatrix};
use crate::propagation::{infidelity_slope, run_sequence, rwa_sweep, Mode, SimulationRecord};
use crate::synthesis::{synthesize, target_ghz_profile, target_uniform, target_w};

/// Tolerance applied by `verify` to every operator identity, relative to the
/// largest reference entry (floored at 1, so absolute for unit-sized operators).
pub const VERIFY_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "dicke-pulse",
    version,
    about = "Compile and simulate laser-pulse schedules for Dicke-state superpositions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a target file into a pulse schedule.
    Synth {
        #[arg(long)]
        target: PathBuf,
        #[arg(long = "w-over-g")]
        w_over_g: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Propagate |J,-J> through a schedule.
    Run {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Effective)]
        mode: ModeArg,
        #[arg(long)]
        target: Option<PathBuf>,
        /// Write per-pulse populations as CSV.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Full-mode fidelity of the compiled schedule versus W/g.
    Sweep {
        #[arg(long)]
        target: PathBuf,
        /// Comma-separated ascending W/g values.
        #[arg(long, value_delimiter = ',', required = true)]
        ratios: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the collective-operator algebra and the product-space restriction.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print a canned target file.
    Targets {
        #[arg(long, value_enum)]
        kind: TargetKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Effective,
    Full,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Effective => Mode::Effective,
            ModeArg::Full => Mode::Full,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetKind {
    W,
    Ghz,
    Uniform,
}

/// What a command produced. `stdout` is empty when `--output` was given.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_target(path: &Path, warnings: &mut Vec<String>) -> Result<DickeState> {
    let target = TargetFile::parse(&read(path)?)?;
    if target.renormalized() {
        warnings.push(format!(
            "{}: renormalized coefficients (sum |c|^2 was {})",
            path.display(),
            target.input_norm_sqr
        ));
    }
    Ok(target.state)
}

fn emit(doc: String, output: Option<&Path>, outcome: &mut Outcome) -> Result<()> {
    match output {
        Some(path) => fs::write(path, doc)?,
        None => outcome.stdout = doc,
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    match cli.command {
        Command::Synth {
            target,
            w_over_g,
            output,
        } => {
            let state = load_target(&target, &mut outcome.warnings)?;
            let params = SystemParams::in_units_of_g(state.n_dots(), w_over_g)
                .map_err(|e| Error::Input(format!("--w-over-g: {e}")))?;
            outcome.warnings.extend(params.rwa_warning());
            let synthesis = synthesize(&state, &params)?;
            emit(
                ScheduleFile::render(&synthesis)?,
                output.as_deref(),
                &mut outcome,
            )?;
        }
        Command::Run {
            schedule,
            mode,
            target,
            trajectory,
            output,
        } => {
            let schedule = ScheduleFile::parse(&read(&schedule)?)?;
            let target = target
                .map(|p| load_target(&p, &mut outcome.warnings))
                .transpose()?;
            let n = schedule.sequence.params().n_dots();
            if let Some(t) = &target {
                if t.n_dots() != n {
                    return Err(Error::Input(format!(
                        "target has n_dots = {} but the schedule has n_dots = {n}",
                        t.n_dots()
                    )));
                }
            }
            let record = run_sequence(
                &DickeState::ground(n)?,
                &schedule.sequence,
                mode.into(),
                target.as_ref(),
            )?;
            if let Some(path) = trajectory {
                fs::write(path, trajectory_csv(&record))?;
            }
            emit(
                run_document(&schedule, &record),
                output.as_deref(),
                &mut outcome,
            )?;
        }
        Command::Sweep {
            target,
            ratios,
            output,
        } => {
            let state = load_target(&target, &mut outcome.warnings)?;
            let base = SystemParams::in_units_of_g(state.n_dots(), 1.0)?;
            let points = rwa_sweep(&state, &base, &ratios)
                .map_err(|e| Error::Input(format!("--ratios: {e}")))?;
            let rows = points
                .iter()
                .map(|p| {
                    Value::object([
                        ("w_over_g", Value::Num(p.w_over_g)),
                        ("fidelity", Value::Num(p.fidelity)),
                        ("infidelity", Value::Num(1.0 - p.fidelity)),
                        ("total_duration_g", Value::Num(p.total_duration)),
                    ])
                })
                .collect();
            let doc = Value::object([
                ("n_dots", Value::Int(state.n_dots() as i64)),
                ("rows", Value::Array(rows)),
                (
                    "loglog_slope",
                    infidelity_slope(&points).map_or(Value::Null, Value::Num),
                ),
            ]);
            emit(doc.render(), output.as_deref(), &mut outcome)?;
        }
        Command::Verify { n, output } => {
            let (doc, pass) = verify_document(n)?;
            emit(doc, output.as_deref(), &mut outcome)?;
            if !pass {
                outcome.exit_code = Error::Invariant(String::new()).exit_code();
            }
        }
        Command::Targets { kind, n, output } => {
            let state = match kind {
                TargetKind::W => target_w(n),
                TargetKind::Ghz => target_ghz_profile(n),
                TargetKind::Uniform => target_uniform(n),
            }
            .map_err(|e| Error::Input(format!("--n: {e}")))?;
            emit(TargetFile::render(&state), output.as_deref(), &mut outcome)?;
        }
    }
    Ok(outcome)
}

fn run_document(schedule: &ScheduleFile, record: &SimulationRecord) -> String {
    let params = schedule.sequence.params();
    let fin = &record.final_state;
    Value::object([
        ("mode", Value::Str(record.mode.to_string())),
        ("n_dots", Value::Int(params.n_dots() as i64)),
        ("w_over_g", Value::Num(params.w_over_g())),
        ("pulse_count", Value::Int(schedule.sequence.len() as i64)),
        (
            "final_amplitudes",
            Value::Array(
                fin.amplitudes()
                    .iter()
                    .map(|c| Value::complex(*c))
                    .collect(),
            ),
        ),
        ("final_populations", Value::nums(fin.populations())),
        ("norm", Value::Num(fin.norm_sqr().sqrt())),
        (
            "target_fidelity",
            record.target_fidelity.map_or(Value::Null, Value::Num),
        ),
        (
            "leakage_per_pulse",
            Value::nums(record.leakage_per_pulse.iter().copied()),
        ),
    ])
    .render()
}

/// `pulse,p_0,...,p_N` with one row per snapshot.
pub fn trajectory_csv(record: &SimulationRecord) -> String {
    let dim = record.final_state.dim();
    let mut out = String::from("pulse");
    for k in 0..dim {
        out.push_str(&format!(",p_{k}"));
    }
    out.push('\n');
    for (ordinal, state) in &record.snapshots {
        out.push_str(&ordinal.to_string());
        for p in state.populations() {
            out.push(',');
            out.push_str(&format_float(p));
        }
        out.push('\n');
    }
    out
}

fn verify_document(n: usize) -> Result<(String, bool)> {
    if n == 0 {
        return Err(Error::Input("--n: must be at least 1".into()));
    }
    let report = crosscheck_dicke_restriction(n)?;
    let ops = build_collective_matrices(n)?;
    let j = n as f64 / 2.0;
    let two = Complex64::from(2.0);
    let casimir_expected = CMatrix::identity(n + 1, n + 1) * Complex64::from(j * (j + 1.0));
    let dicke_scale = j * (j + 1.0);
    let h_scale = report.hamiltonian_scale;
    // (name, absolute deviation, size of the reference entries)
    let checks = [
        (
            "dicke_jz_jplus",
            max_abs_diff(&commutator(&ops.jz, &ops.jplus), &ops.jplus),
            dicke_scale,
        ),
        (
            "dicke_jz_jminus",
            max_abs_diff(&commutator(&ops.jz, &ops.jminus), &(-&ops.jminus)),
            dicke_scale,
        ),
        (
            "dicke_jplus_jminus",
            max_abs_diff(&commutator(&ops.jplus, &ops.jminus), &(&ops.jz * two)),
            dicke_scale,
        ),
        (
            "dicke_casimir",
            max_abs_diff(&ops.casimir(), &casimir_expected),
            dicke_scale,
        ),
        ("isometry_orthonormality", report.isometry_error, 1.0),
        ("restricted_jz", report.jz_deviation, j),
        (
            "restricted_jplus",
            report.jplus_deviation,
            dicke_scale.sqrt(),
        ),
        (
            "restricted_jminus",
            report.jminus_deviation,
            dicke_scale.sqrt(),
        ),
        (
            "restricted_hamiltonian",
            report.hamiltonian_deviation,
            h_scale,
        ),
        ("projector_commutator", report.projector_commutator, h_scale),
    ];
    let passes = |dev: f64, scale: f64| dev <= VERIFY_TOL * scale.max(1.0);
    let pass = checks.iter().all(|&(_, dev, scale)| passes(dev, scale));
    let doc = Value::object([
        ("n_dots", Value::Int(n as i64)),
        ("tolerance", Value::Num(VERIFY_TOL)),
        (
            "checks",
            Value::Array(
                checks
                    .iter()
                    .map(|&(name, dev, scale)| {
                        Value::object([
                            ("name", Value::Str(name.to_string())),
                            ("deviation", Value::Num(dev)),
                            ("scale", Value::Num(scale.max(1.0))),
                            ("pass", Value::Bool(passes(dev, scale))),
                        ])
                    })
                    .collect(),
            ),
        ),
        ("pass", Value::Bool(pass)),
    ]);
    Ok((doc.render(), pass))
}
