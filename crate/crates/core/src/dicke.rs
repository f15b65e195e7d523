//! Dicke-basis states and collective angular-momentum matrices.
//!
//! Storage convention: index `k = M + J` with `J = N/2`, so `k = 0` is the
//! empty ladder `|J,-J>` and `k = N` is fully excited `|J,+J>`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Deviation of `sum |a_k|^2` from one tolerated without touching the amplitudes.
pub const NORM_TOL: f64 = 1e-9;
/// Largest deviation that is silently renormalized on construction.
pub const RENORMALIZE_TOL: f64 = 1e-6;

/// Amplitudes below this modulus are treated as zero when picking a phase reference.
const PHASE_REF_TOL: f64 = 1e-12;

/// A half-integer stored as twice its value.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_doubled(doubled: i64) -> Self {
        HalfInt(doubled)
    }

    pub const fn from_integer(value: i64) -> Self {
        HalfInt(2 * value)
    }

    pub const fn doubled(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// Matrix element of `J+` (or `J-`) acting on `|J,m>`:
/// `sqrt(J(J+1) - m(m+1))` for raising, `sqrt(J(J+1) - m(m-1))` for lowering.
pub fn ladder_coeff(n_dots: usize, m: HalfInt, direction: Ladder) -> Result<f64> {
    if n_dots == 0 {
        return Err(Error::domain("n_dots must be at least 1"));
    }
    let two_j = n_dots as i64;
    let two_m = m.doubled();
    if two_m.abs() > two_j || (two_j - two_m) % 2 != 0 {
        return Err(Error::domain(format!(
            "m = {m} is not on the ladder of J = {}",
            HalfInt::from_doubled(two_j)
        )));
    }
    // 4 * (J(J+1) - m(m +- 1)) in exact integer arithmetic
    let step = match direction {
        Ladder::Raise => 2,
        Ladder::Lower => -2,
    };
    let quad = two_j * (two_j + 2) - two_m * (two_m + step);
    debug_assert!(quad >= 0);
    Ok((quad as f64).sqrt() / 2.0)
}

/// Parameters of the coupled-dot system. Energies share one unit, `hbar = 1`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SystemParams {
    n_dots: usize,
    w_coupling: f64,
    g_amplitude: f64,
}

impl SystemParams {
    pub fn new(n_dots: usize, w_coupling: f64, g_amplitude: f64) -> Result<Self> {
        if n_dots == 0 {
            return Err(Error::domain("n_dots must be at least 1"));
        }
        if !(w_coupling.is_finite() && w_coupling > 0.0) {
            return Err(Error::domain(format!(
                "interdot coupling W must be positive, got {w_coupling}"
            )));
        }
        if !(g_amplitude.is_finite() && g_amplitude > 0.0) {
            return Err(Error::domain(format!(
                "laser amplitude g must be positive, got {g_amplitude}"
            )));
        }
        Ok(SystemParams {
            n_dots,
            w_coupling,
            g_amplitude,
        })
    }

    /// Dimensionless parameters with `g = 1` and `W` given as `W/g`.
    pub fn in_units_of_g(n_dots: usize, w_over_g: f64) -> Result<Self> {
        Self::new(n_dots, w_over_g, 1.0)
    }

    pub fn n_dots(&self) -> usize {
        self.n_dots
    }

    pub fn w_coupling(&self) -> f64 {
        self.w_coupling
    }

    pub fn g_amplitude(&self) -> f64 {
        self.g_amplitude
    }

    pub fn j(&self) -> f64 {
        self.n_dots as f64 / 2.0
    }

    pub fn w_over_g(&self) -> f64 {
        self.w_coupling / self.g_amplitude
    }

    /// `W / (J g)`; the effective two-level picture needs this to be large.
    pub fn rwa_ratio(&self) -> f64 {
        self.w_coupling / (self.j() * self.g_amplitude)
    }

    /// Warning text when `W / (J g) <= 10`.
    pub fn rwa_warning(&self) -> Option<String> {
        let ratio = self.rwa_ratio();
        (ratio <= 10.0).then(|| {
            format!(
                "W/(J g) = {ratio:.3} is not much larger than 1; \
                 the two-level pulse picture will be inaccurate"
            )
        })
    }

    pub fn with_coupling(&self, w_coupling: f64) -> Result<Self> {
        Self::new(self.n_dots, w_coupling, self.g_amplitude)
    }
}

/// Normalized pure state in the symmetric sector, amplitudes indexed by `k = M + J`.
#[derive(Clone, Debug, PartialEq)]
pub struct DickeState {
    amplitudes: CVector,
}

impl DickeState {
    /// Builds a state from `N + 1` amplitudes. Inputs whose squared norm is off by
    /// at most [`RENORMALIZE_TOL`] are renormalized; anything further is rejected.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::domain(format!(
                "a Dicke state needs at least 2 amplitudes (N >= 1), got {}",
                amplitudes.len()
            )));
        }
        if let Some(k) = amplitudes
            .iter()
            .position(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::domain(format!("amplitude {k} is not finite")));
        }
        let mut amplitudes = CVector::from_vec(amplitudes);
        let norm_sqr = amplitudes.norm_squared();
        let deviation = (norm_sqr - 1.0).abs();
        if deviation > RENORMALIZE_TOL {
            return Err(Error::domain(format!(
                "amplitudes are not normalized: sum |c|^2 = {norm_sqr}"
            )));
        }
        if deviation > 0.0 {
            amplitudes.unscale_mut(norm_sqr.sqrt());
        }
        Ok(DickeState { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::domain(
                "cannot normalize a zero or non-finite vector",
            ));
        }
        Self::new((v / Complex64::from(norm)).iter().copied().collect())
    }

    /// Wraps the output of a propagator. No renormalization happens here, so any
    /// drift past [`NORM_TOL`] surfaces as an invariant violation.
    pub(crate) fn from_evolved(amplitudes: CVector) -> Result<Self> {
        let drift = (amplitudes.norm_squared() - 1.0).abs();
        if drift > NORM_TOL {
            return Err(Error::Invariant(format!(
                "propagated norm drifted by {drift:e}"
            )));
        }
        Ok(DickeState { amplitudes })
    }

    /// `|J, -J + k>`.
    pub fn basis(n_dots: usize, k: usize) -> Result<Self> {
        if n_dots == 0 || k > n_dots {
            return Err(Error::domain(format!(
                "basis index {k} out of range for N = {n_dots}"
            )));
        }
        let mut amplitudes = CVector::zeros(n_dots + 1);
        amplitudes[k] = Complex64::from(1.0);
        Ok(DickeState { amplitudes })
    }

    /// `|J, -J>`, no excitons.
    pub fn ground(n_dots: usize) -> Result<Self> {
        Self::basis(n_dots, 0)
    }

    pub fn n_dots(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: usize) -> Complex64 {
        self.amplitudes[k]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DickeState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::domain(format!(
                "states have different dot counts ({} vs {})",
                self.n_dots(),
                other.n_dots()
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn into_vector(self) -> CVector {
        self.amplitudes
    }
}

/// `|<a|b>|^2`, clamped into `[0, 1]`.
pub fn fidelity(a: &DickeState, b: &DickeState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

/// Removes the global phase so the first amplitude with modulus above `1e-12` is
/// real and positive. Returns the canonical state and the removed phase `alpha`,
/// with `input = exp(i alpha) * canonical`.
pub fn canonicalize_global_phase(s: &DickeState) -> Result<(DickeState, f64)> {
    let reference = s
        .amplitudes
        .iter()
        .find(|a| a.norm() > PHASE_REF_TOL)
        .ok_or_else(|| Error::domain("cannot canonicalize the phase of a zero vector"))?;
    let alpha = reference.arg();
    let rotor = Complex64::from_polar(1.0, -alpha);
    let mut amplitudes = s.amplitudes.map(|a| a * rotor);
    // pin the reference to exactly real
    if let Some(r) = amplitudes.iter_mut().find(|a| a.norm() > PHASE_REF_TOL) {
        *r = Complex64::new(r.norm(), 0.0);
    }
    Ok((DickeState { amplitudes }, alpha))
}

/// Collective operators `Jz`, `J+`, `J-` in the `(N+1)`-dimensional Dicke basis.
#[derive(Clone, Debug)]
pub struct CollectiveOps {
    pub jz: CMatrix,
    pub jplus: CMatrix,
    pub jminus: CMatrix,
}

impl CollectiveOps {
    /// `J^2 = J- J+ + Jz^2 + Jz`.
    pub fn casimir(&self) -> CMatrix {
        &self.jminus * &self.jplus + &self.jz * &self.jz + &self.jz
    }
}

pub fn build_collective_matrices(n_dots: usize) -> Result<CollectiveOps> {
    if n_dots == 0 {
        return Err(Error::domain("n_dots must be at least 1"));
    }
    let dim = n_dots + 1;
    let two_j = n_dots as i64;
    let mut jz = CMatrix::zeros(dim, dim);
    let mut jplus = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let m = HalfInt::from_doubled(2 * k as i64 - two_j);
        jz[(k, k)] = Complex64::from(m.value());
        if k + 1 < dim {
            jplus[(k + 1, k)] = Complex64::from(ladder_coeff(n_dots, m, Ladder::Raise)?);
        }
    }
    let jminus = jplus.adjoint();
    Ok(CollectiveOps { jz, jplus, jminus })
}
