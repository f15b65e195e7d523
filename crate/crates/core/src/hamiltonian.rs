//! Rotating-frame Hamiltonians in the Dicke basis.
//!
//! The constant `W J^2` term is dropped everywhere; on the symmetric sector it is
//! a multiple of the identity.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::dicke::{build_collective_matrices, ladder_coeff, HalfInt, Ladder, SystemParams};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Tolerance for the conjugate-transpose check in [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// One rectangular laser pulse tuned to the `step_index -> step_index + 1` transition.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PulseSpec {
    pub step_index: usize,
    /// Interaction time, in inverse energy units.
    pub duration: f64,
    /// Laser phase in `[0, 2pi)`.
    pub phase: f64,
    /// Laser amplitude `g`.
    pub amplitude: f64,
}

impl PulseSpec {
    pub fn validate(&self, n_dots: usize) -> Result<()> {
        if self.step_index >= n_dots {
            return Err(Error::domain(format!(
                "step index {} out of range 0..{} for N = {n_dots}",
                self.step_index,
                n_dots.saturating_sub(1)
            )));
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return Err(Error::domain(format!(
                "pulse duration must be finite and nonnegative, got {}",
                self.duration
            )));
        }
        if !(self.phase.is_finite() && (0.0..TAU).contains(&self.phase)) {
            return Err(Error::domain(format!(
                "pulse phase must lie in [0, 2pi), got {}",
                self.phase
            )));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::domain(format!(
                "pulse amplitude must be finite and nonnegative, got {}",
                self.amplitude
            )));
        }
        Ok(())
    }

    /// Rotation angle `Omega_i tau` of this pulse on its resonant pair.
    pub fn rotation_angle(&self, n_dots: usize) -> Result<f64> {
        Ok(effective_rabi(n_dots, self.step_index, self.amplitude)? * self.duration)
    }
}

/// A dense matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::domain("Hermitian matrix must be square"));
        }
        let dev = crate::linalg::max_abs_diff(&entries, &entries.adjoint());
        if dev > HERMITIAN_TOL {
            return Err(Error::Invariant(format!(
                "matrix deviates from its adjoint by {dev:e}"
            )));
        }
        Ok(HermitianMatrix(entries))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

fn check_step(n_dots: usize, i: usize) -> Result<()> {
    if n_dots == 0 || i >= n_dots {
        return Err(Error::domain(format!(
            "step index {i} out of range for N = {n_dots}"
        )));
    }
    Ok(())
}

/// Detuning `-W (2J - 2i - 1)` that makes `|J,-J+i> <-> |J,-J+i+1>` resonant.
pub fn resonant_detuning(n_dots: usize, i: usize, w: f64) -> Result<f64> {
    check_step(n_dots, i)?;
    Ok(-w * (n_dots as f64 - 2.0 * i as f64 - 1.0))
}

/// `dw Jz + g e^{i phi} J+ + g e^{-i phi} J- - W Jz^2`.
pub fn build_generic_hamiltonian(
    params: &SystemParams,
    detuning: f64,
    phase: f64,
) -> Result<HermitianMatrix> {
    let ops = build_collective_matrices(params.n_dots())?;
    let g = params.g_amplitude();
    let w = params.w_coupling();
    let drive = Complex64::from_polar(g, phase);
    let mut h = CMatrix::zeros(ops.jz.nrows(), ops.jz.ncols());
    for k in 0..h.nrows() {
        let m = ops.jz[(k, k)].re;
        h[(k, k)] = Complex64::from(detuning * m - w * m * m);
    }
    for k in 0..h.nrows() - 1 {
        let coupling = drive * ops.jplus[(k + 1, k)];
        h[(k + 1, k)] = coupling;
        h[(k, k + 1)] = coupling.conj();
    }
    HermitianMatrix::new(h)
}

/// The resonant per-pulse Hamiltonian: diagonal `-W (k - i)(k - i - 1)` with
/// `k = m + J`, plus the drive on every ladder rung.
pub fn build_pulse_hamiltonian(
    params: &SystemParams,
    pulse: &PulseSpec,
) -> Result<HermitianMatrix> {
    let n = params.n_dots();
    pulse.validate(n)?;
    let w = params.w_coupling();
    let i = pulse.step_index as f64;
    let drive = Complex64::from_polar(pulse.amplitude, pulse.phase);
    let mut h = CMatrix::zeros(n + 1, n + 1);
    for k in 0..=n {
        let shifted = k as f64 - i;
        h[(k, k)] = Complex64::from(-w * shifted * (shifted - 1.0));
    }
    for k in 0..n {
        let m = HalfInt::from_doubled(2 * k as i64 - n as i64);
        let coupling = drive * ladder_coeff(n, m, Ladder::Raise)?;
        h[(k + 1, k)] = coupling;
        h[(k, k + 1)] = coupling.conj();
    }
    HermitianMatrix::new(h)
}

/// `Omega_i = g sqrt(J(J+1) - (J-i)(J-i-1))`.
pub fn effective_rabi(n_dots: usize, i: usize, g: f64) -> Result<f64> {
    check_step(n_dots, i)?;
    let m = HalfInt::from_doubled(2 * i as i64 - n_dots as i64);
    Ok(g * ladder_coeff(n_dots, m, Ladder::Raise)?)
}

/// Two-level coupling `Omega_i (e^{i phi}|i+1><i| + h.c.)`, zero elsewhere.
pub fn build_effective_hamiltonian(
    params: &SystemParams,
    pulse: &PulseSpec,
) -> Result<HermitianMatrix> {
    let n = params.n_dots();
    pulse.validate(n)?;
    let i = pulse.step_index;
    let coupling = Complex64::from_polar(effective_rabi(n, i, pulse.amplitude)?, pulse.phase);
    let mut h = CMatrix::zeros(n + 1, n + 1);
    h[(i + 1, i)] = coupling;
    h[(i, i + 1)] = coupling.conj();
    HermitianMatrix::new(h)
}
