//! Pulse-by-pulse propagation under the effective or the full Hamiltonian.
//!
//! Full mode integrates the complete resonant Hamiltonian of each pulse and
//! reports the result in the interaction picture of that pulse's diagonal:
//! every Dicke level co-rotates with its own bare energy `-W (k-i)(k-i-1)`.
//! The two resonant levels sit at zero energy so they are unaffected, and what
//! remains of the full evolution is exactly the off-resonant coupling the
//! two-level picture discards. Levels are carried between pulses unchanged.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dicke::{fidelity, DickeState, SystemParams};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_pulse_hamiltonian, effective_rabi, PulseSpec};
use crate::linalg::{expm_hermitian, CMatrix, CVector};
use crate::synthesis::{synthesize, PulseSequence};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Effective,
    Full,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Effective => "effective",
            Mode::Full => "full",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "effective" => Ok(Mode::Effective),
            "full" => Ok(Mode::Full),
            other => Err(Error::Input(format!(
                "mode must be `effective` or `full`, got `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimulationRecord {
    pub mode: Mode,
    /// `(pulses applied so far, state)`; ordinal 0 is the initial state.
    pub snapshots: Vec<(usize, DickeState)>,
    pub final_state: DickeState,
    pub target_fidelity: Option<f64>,
    /// Population pushed outside the resonant pair by each pulse. Full mode only.
    pub leakage_per_pulse: Vec<f64>,
}

fn check_dims(state: &DickeState, params: &SystemParams, pulse: &PulseSpec) -> Result<()> {
    if state.n_dots() != params.n_dots() {
        return Err(Error::domain(format!(
            "state has N = {} but the system has N = {}",
            state.n_dots(),
            params.n_dots()
        )));
    }
    pulse.validate(params.n_dots())
}

/// Closed-form `exp(-i H_eff tau)` on levels `{i, i+1}`.
pub fn evolve_effective(
    state: &DickeState,
    pulse: &PulseSpec,
    params: &SystemParams,
) -> Result<DickeState> {
    check_dims(state, params, pulse)?;
    let i = pulse.step_index;
    let omega = effective_rabi(params.n_dots(), i, pulse.amplitude)?;
    let (sin, cos) = (omega * pulse.duration).sin_cos();
    let minus_i = Complex64::new(0.0, -1.0);
    let down = minus_i * Complex64::from_polar(sin, -pulse.phase);
    let up = minus_i * Complex64::from_polar(sin, pulse.phase);

    let mut amps = state.amplitudes().clone();
    let (lo, hi) = (amps[i], amps[i + 1]);
    amps[i] = lo * cos + down * hi;
    amps[i + 1] = up * lo + hi * cos;
    DickeState::from_evolved(amps)
}

/// Single-pulse propagator of the full Hamiltonian in the level-co-rotating frame,
/// `exp(+i D tau) exp(-i H tau)` with `D` the diagonal of `H`.
pub fn full_propagator(params: &SystemParams, pulse: &PulseSpec) -> Result<CMatrix> {
    let h = build_pulse_hamiltonian(params, pulse)?.into_matrix();
    let mut u = expm_hermitian(&h, pulse.duration);
    for (k, mut row) in u.row_iter_mut().enumerate() {
        row *= Complex64::from_polar(1.0, h[(k, k)].re * pulse.duration);
    }
    Ok(u)
}

/// `exp(-i H tau)` of the full per-pulse Hamiltonian with no frame correction.
///
/// Spectator levels pick up dynamical phases of order `W tau`, so this does
/// not approach the two-level result as `W/g` grows. Kept for diagnostics.
pub fn bare_full_propagator(params: &SystemParams, pulse: &PulseSpec) -> Result<CMatrix> {
    let h = build_pulse_hamiltonian(params, pulse)?.into_matrix();
    Ok(expm_hermitian(&h, pulse.duration))
}

pub fn evolve_full(
    state: &DickeState,
    pulse: &PulseSpec,
    params: &SystemParams,
) -> Result<DickeState> {
    check_dims(state, params, pulse)?;
    let u = full_propagator(params, pulse)?;
    DickeState::from_evolved(u * state.amplitudes())
}

pub fn evolve(
    state: &DickeState,
    pulse: &PulseSpec,
    params: &SystemParams,
    mode: Mode,
) -> Result<DickeState> {
    match mode {
        Mode::Effective => evolve_effective(state, pulse, params),
        Mode::Full => evolve_full(state, pulse, params),
    }
}

fn population_outside(amps: &CVector, i: usize) -> f64 {
    amps.iter()
        .enumerate()
        .filter(|&(k, _)| k != i && k != i + 1)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

pub fn run_sequence(
    initial: &DickeState,
    seq: &PulseSequence,
    mode: Mode,
    target: Option<&DickeState>,
) -> Result<SimulationRecord> {
    let params = seq.params();
    if initial.n_dots() != params.n_dots() {
        return Err(Error::domain(format!(
            "initial state has N = {} but the schedule has N = {}",
            initial.n_dots(),
            params.n_dots()
        )));
    }
    if let Some(t) = target {
        if t.n_dots() != params.n_dots() {
            return Err(Error::domain(format!(
                "target has N = {} but the schedule has N = {}",
                t.n_dots(),
                params.n_dots()
            )));
        }
    }

    let mut snapshots = vec![(0, initial.clone())];
    let mut leakage_per_pulse = Vec::new();
    let mut state = initial.clone();
    for (ordinal, pulse) in seq.pulses().iter().enumerate() {
        let next = evolve(&state, pulse, params, mode)?;
        if mode == Mode::Full {
            let before = population_outside(state.amplitudes(), pulse.step_index);
            let after = population_outside(next.amplitudes(), pulse.step_index);
            leakage_per_pulse.push((after - before).clamp(0.0, 1.0));
        }
        snapshots.push((ordinal + 1, next.clone()));
        state = next;
    }
    let target_fidelity = target.map(|t| fidelity(t, &state)).transpose()?;
    Ok(SimulationRecord {
        mode,
        snapshots,
        final_state: state,
        target_fidelity,
        leakage_per_pulse,
    })
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub w_over_g: f64,
    pub fidelity: f64,
    /// Total interaction time `sum tau` in units of `1/g`.
    pub total_duration: f64,
}

/// Full-mode fidelity of the synthesized schedule for each `W/g` in `ratios`.
pub fn rwa_sweep(
    target: &DickeState,
    params_base: &SystemParams,
    ratios: &[f64],
) -> Result<Vec<SweepPoint>> {
    if let Some(r) = ratios.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::domain(format!(
            "W/g ratios must be positive, got {r}"
        )));
    }
    if ratios.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("W/g ratios must be strictly ascending"));
    }
    let g = params_base.g_amplitude();
    let ground = DickeState::ground(params_base.n_dots())?;
    ratios
        .par_iter()
        .map(|&ratio| {
            let params = params_base.with_coupling(ratio * g)?;
            let synthesis = synthesize(target, &params)?;
            let record = run_sequence(&ground, &synthesis.sequence, Mode::Full, Some(target))?;
            Ok(SweepPoint {
                w_over_g: ratio,
                fidelity: record.target_fidelity.unwrap_or(0.0),
                total_duration: synthesis.sequence.total_duration() * g,
            })
        })
        .collect()
}

/// Least-squares slope of `ln(1 - F)` against `ln(g/W)`.
pub fn infidelity_slope(points: &[SweepPoint]) -> Option<f64> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.fidelity < 1.0)
        .map(|p| ((1.0 / p.w_over_g).ln(), (1.0 - p.fidelity).ln()))
        .collect();
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
