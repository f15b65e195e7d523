//! Compiles a target Dicke superposition into at most `N` resonant pulses.
//!
//! Starting from `|J,-J>`, pulse `m` drives `k = m <-> m + 1`. Before it fires,
//! levels `0..m` already hold their target amplitudes and level `m` holds
//! everything that remains, with modulus `r_m`. The pulse leaves
//! `cos(theta_m) r_m` behind and hands `sin(theta_m) r_m` up the ladder, so
//! `cos(theta_m) = |C_m| / r_m`. Its phase sets the argument of the amplitude
//! handed up, which must match `arg C_{m+1}`.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use crate::dicke::{canonicalize_global_phase, DickeState, SystemParams};
use crate::error::{Error, Result};
use crate::hamiltonian::{effective_rabi, PulseSpec};

/// Remaining norms at or below this end the recursion.
pub const TAIL_TOL: f64 = 1e-12;
/// Amplitudes at or below this modulus carry no phase constraint.
const PHASE_TOL: f64 = 1e-14;
/// Slack on the `[0, pi/2]` rotation-angle window when validating sequences.
const ANGLE_SLACK: f64 = 1e-12;

/// Ordered pulses with strictly increasing step index, plus the system they drive.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    params: SystemParams,
    pulses: Vec<PulseSpec>,
}

impl PulseSequence {
    pub fn new(params: SystemParams, pulses: Vec<PulseSpec>) -> Result<Self> {
        let n = params.n_dots();
        if pulses.len() > n {
            return Err(Error::domain(format!(
                "{} pulses exceed the N = {n} pulse budget",
                pulses.len()
            )));
        }
        for (ordinal, pulse) in pulses.iter().enumerate() {
            pulse
                .validate(n)
                .map_err(|e| Error::domain(format!("pulse {ordinal}: {e}")))?;
            let angle = pulse.rotation_angle(n)?;
            if angle > FRAC_PI_2 + ANGLE_SLACK {
                return Err(Error::domain(format!(
                    "pulse {ordinal}: rotation angle {angle} exceeds pi/2"
                )));
            }
        }
        if let Some(w) = pulses
            .windows(2)
            .find(|w| w[1].step_index <= w[0].step_index)
        {
            return Err(Error::domain(format!(
                "step indices must strictly increase, found {} then {}",
                w[0].step_index, w[1].step_index
            )));
        }
        Ok(PulseSequence { params, pulses })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn pulses(&self) -> &[PulseSpec] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.pulses.iter().map(|p| p.duration).sum()
    }

    /// The same schedule driving a system with a different interdot coupling.
    /// Durations are untouched because they only depend on `g`.
    pub fn with_coupling(&self, w_coupling: f64) -> Result<Self> {
        Ok(PulseSequence {
            params: self.params.with_coupling(w_coupling)?,
            pulses: self.pulses.clone(),
        })
    }
}

/// Compiler output: the schedule plus the global phase stripped from the target.
#[derive(Clone, Debug, PartialEq)]
pub struct Synthesis {
    pub sequence: PulseSequence,
    /// `alpha` with `target = exp(i alpha) * canonical_target`.
    pub removed_global_phase: f64,
    pub canonical_target: DickeState,
}

/// `sqrt(max(0, 1 - sum_{l<m} |C_l|^2))`.
///
/// Evaluated as the norm of the unconsumed tail `C_m..C_N`, which is the same
/// quantity for a normalized target but does not cancel catastrophically when
/// the tail is small.
pub fn remaining_norm(target: &DickeState, m: usize) -> f64 {
    target
        .amplitudes()
        .iter()
        .skip(m)
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn wrap_phase(phase: f64) -> f64 {
    let wrapped = phase.rem_euclid(TAU);
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Builds the pulse schedule that takes `|J,-J>` to `target` under the
/// effective two-level dynamics `exp(-i H_eff tau)`.
pub fn synthesize(target: &DickeState, params: &SystemParams) -> Result<Synthesis> {
    let n = params.n_dots();
    if target.n_dots() != n {
        return Err(Error::domain(format!(
            "target has N = {} but the system has N = {n}",
            target.n_dots()
        )));
    }
    let (canonical, removed_global_phase) = canonicalize_global_phase(target)?;
    let coeffs = canonical.amplitudes();
    let g = params.g_amplitude();

    let mut pulses = Vec::new();
    // argument of the amplitude currently sitting on level m; |J,-J> starts real
    let mut carried_arg = 0.0;
    for m in 0..n {
        let r_m = remaining_norm(&canonical, m);
        let r_next = remaining_norm(&canonical, m + 1);
        if r_m <= TAIL_TOL || r_next <= TAIL_TOL {
            break;
        }
        let theta = (coeffs[m].norm() / r_m).clamp(0.0, 1.0).acos();
        // The pulse maps a_m -> -i e^{i phi} sin(theta) a_m on level m + 1.
        let phase = if coeffs[m + 1].norm() > PHASE_TOL {
            wrap_phase(coeffs[m + 1].arg() - carried_arg + FRAC_PI_2)
        } else {
            0.0
        };
        carried_arg = carried_arg + phase - FRAC_PI_2;
        let omega = effective_rabi(n, m, g)?;
        pulses.push(PulseSpec {
            step_index: m,
            duration: theta / omega,
            phase,
            amplitude: g,
        });
    }

    Ok(Synthesis {
        sequence: PulseSequence::new(*params, pulses)?,
        removed_global_phase,
        canonical_target: canonical,
    })
}

/// `|J,-J+1>`, the symmetric single-excitation (W) state.
pub fn target_w(n_dots: usize) -> Result<DickeState> {
    DickeState::basis(n_dots, 1)
}

/// Equal weight on the two ends of the ladder, `(|J,-J> + |J,J>)/sqrt(2)`.
pub fn target_ghz_profile(n_dots: usize) -> Result<DickeState> {
    if n_dots < 2 {
        return Err(Error::domain("the GHZ profile needs N >= 2"));
    }
    let mut amps = vec![Complex64::from(0.0); n_dots + 1];
    amps[0] = Complex64::from(1.0);
    amps[n_dots] = Complex64::from(1.0);
    DickeState::normalized(amps)
}

/// Equal real weight on every Dicke level.
pub fn target_uniform(n_dots: usize) -> Result<DickeState> {
    if n_dots == 0 {
        return Err(Error::domain("n_dots must be at least 1"));
    }
    DickeState::normalized(vec![Complex64::from(1.0); n_dots + 1])
}
