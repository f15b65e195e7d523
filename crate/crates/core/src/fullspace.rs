//! Collective operators on the `2^N`-dimensional product space of `N` two-level
//! dots, and a cross-check of the Dicke-basis matrices against them.
//!
//! Product basis state `b` has dot `p` excited iff bit `p` of `b` is set.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dicke::{build_collective_matrices, SystemParams};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_generic_hamiltonian, resonant_detuning};
use crate::linalg::{max_abs, max_abs_diff, CMatrix};

/// Largest dot count for which product-space objects are built.
pub const MAX_FULLSPACE_DOTS: usize = 12;

fn check_cap(n_dots: usize) -> Result<()> {
    if n_dots == 0 {
        return Err(Error::domain("n_dots must be at least 1"));
    }
    if n_dots > MAX_FULLSPACE_DOTS {
        return Err(Error::Resource(format!(
            "product space of N = {n_dots} dots exceeds the N <= {MAX_FULLSPACE_DOTS} cap"
        )));
    }
    Ok(())
}

/// Sparse operator in row-major triplet form, rows sorted, no duplicate entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
    row_start: Vec<usize>,
}

impl SparseOperator {
    fn from_map(dim: usize, map: BTreeMap<(usize, usize), Complex64>) -> Self {
        let entries: Vec<_> = map
            .into_iter()
            .filter(|(_, v)| *v != Complex64::from(0.0))
            .map(|((r, c), v)| (r, c, v))
            .collect();
        let mut row_start = vec![0; dim + 1];
        for &(r, _, _) in &entries {
            row_start[r + 1] += 1;
        }
        for r in 0..dim {
            row_start[r + 1] += row_start[r];
        }
        SparseOperator {
            dim,
            entries,
            row_start,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    fn row(&self, r: usize) -> &[(usize, usize, Complex64)] {
        &self.entries[self.row_start[r]..self.row_start[r + 1]]
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let map = self
            .entries
            .iter()
            .map(|&(r, c, v)| ((c, r), v.conj()))
            .collect();
        Self::from_map(self.dim, map)
    }

    /// `sum_j scale_j * op_j`.
    pub fn linear_combination(terms: &[(Complex64, &SparseOperator)]) -> Self {
        let dim = terms.first().map_or(0, |t| t.1.dim);
        let mut map = BTreeMap::new();
        for (scale, op) in terms {
            assert_eq!(op.dim, dim, "dimension mismatch");
            for &(r, c, v) in &op.entries {
                *map.entry((r, c)).or_insert(Complex64::from(0.0)) += scale * v;
            }
        }
        Self::from_map(dim, map)
    }

    pub fn compose(&self, rhs: &SparseOperator) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut map = BTreeMap::new();
        for &(r, k, a) in &self.entries {
            for &(_, c, b) in rhs.row(k) {
                *map.entry((r, c)).or_insert(Complex64::from(0.0)) += a * b;
            }
        }
        Self::from_map(self.dim, map)
    }

    /// `self * dense`.
    pub fn apply(&self, dense: &CMatrix) -> CMatrix {
        assert_eq!(dense.nrows(), self.dim, "dimension mismatch");
        let mut out = CMatrix::zeros(self.dim, dense.ncols());
        for &(r, c, v) in &self.entries {
            for col in 0..dense.ncols() {
                out[(r, col)] += v * dense[(c, col)];
            }
        }
        out
    }
}

/// `Jz`, `J+`, `J-` as sums of single-dot operators on the product space.
#[derive(Clone, Debug)]
pub struct FullspaceCollective {
    pub n_dots: usize,
    pub jz: SparseOperator,
    pub jplus: SparseOperator,
    pub jminus: SparseOperator,
}

impl FullspaceCollective {
    pub fn dim(&self) -> usize {
        1 << self.n_dots
    }

    /// `J^2 = J- J+ + Jz^2 + Jz`.
    pub fn casimir(&self) -> SparseOperator {
        let one = Complex64::from(1.0);
        SparseOperator::linear_combination(&[
            (one, &self.jminus.compose(&self.jplus)),
            (one, &self.jz.compose(&self.jz)),
            (one, &self.jz),
        ])
    }

    /// `J^2 - Jz^2`, the interdot-coupling operator.
    pub fn coupling_term(&self) -> SparseOperator {
        let one = Complex64::from(1.0);
        SparseOperator::linear_combination(&[
            (one, &self.casimir()),
            (-one, &self.jz.compose(&self.jz)),
        ])
    }

    /// `dw Jz + g e^{i phi} J+ + g e^{-i phi} J- + W (J^2 - Jz^2)`. The `W J^2`
    /// term is kept here since it is not constant outside the symmetric sector.
    pub fn hamiltonian(&self, w: f64, g: f64, phase: f64, detuning: f64) -> SparseOperator {
        self.hamiltonian_with(&self.coupling_term(), w, g, phase, detuning)
    }

    /// As [`hamiltonian`](Self::hamiltonian) with a precomputed [`coupling_term`](Self::coupling_term).
    pub fn hamiltonian_with(
        &self,
        coupling: &SparseOperator,
        w: f64,
        g: f64,
        phase: f64,
        detuning: f64,
    ) -> SparseOperator {
        SparseOperator::linear_combination(&[
            (Complex64::from(detuning), &self.jz),
            (Complex64::from_polar(g, phase), &self.jplus),
            (Complex64::from_polar(g, -phase), &self.jminus),
            (Complex64::from(w), coupling),
        ])
    }

    pub fn dense(&self) -> (CMatrix, CMatrix, CMatrix) {
        (
            self.jz.to_dense(),
            self.jplus.to_dense(),
            self.jminus.to_dense(),
        )
    }
}

pub fn build_fullspace_collective(n_dots: usize) -> Result<FullspaceCollective> {
    check_cap(n_dots)?;
    let dim = 1usize << n_dots;
    let mut jz = BTreeMap::new();
    let mut jplus = BTreeMap::new();
    for b in 0..dim {
        // (c+c - h h+)/2 = n_p - 1/2 for a dot holding at most one exciton
        let excited = b.count_ones() as f64;
        jz.insert((b, b), Complex64::from(excited - n_dots as f64 / 2.0));
        for p in 0..n_dots {
            if b & (1 << p) == 0 {
                jplus.insert((b | (1 << p), b), Complex64::from(1.0));
            }
        }
    }
    let jplus = SparseOperator::from_map(dim, jplus);
    let jminus = jplus.adjoint();
    Ok(FullspaceCollective {
        n_dots,
        jz: SparseOperator::from_map(dim, jz),
        jplus,
        jminus,
    })
}

/// Rows are the normalized symmetric Dicke vectors `|J,-J+k>` in the product basis.
#[derive(Clone, Debug)]
pub struct SymmetricIsometry {
    pub n_dots: usize,
    pub map: CMatrix,
}

impl SymmetricIsometry {
    pub fn new(n_dots: usize) -> Result<Self> {
        check_cap(n_dots)?;
        let dim = 1usize << n_dots;
        let mut counts = vec![0usize; n_dots + 1];
        for b in 0..dim {
            counts[b.count_ones() as usize] += 1;
        }
        let mut map = CMatrix::zeros(n_dots + 1, dim);
        for b in 0..dim {
            let k = b.count_ones() as usize;
            map[(k, b)] = Complex64::from(1.0 / (counts[k] as f64).sqrt());
        }
        Ok(SymmetricIsometry { n_dots, map })
    }

    /// `map O map^dagger`, the restriction of a product-space operator.
    pub fn restrict(&self, op: &SparseOperator) -> CMatrix {
        let v = self.map.adjoint();
        &self.map * op.apply(&v)
    }

    /// Largest elementwise deviation of `map map^dagger` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = &self.map * self.map.adjoint();
        max_abs_diff(&gram, &CMatrix::identity(self.n_dots + 1, self.n_dots + 1))
    }

    /// Largest elementwise modulus of `[H, P]` with `P = map^dagger map`.
    pub fn projector_commutator(&self, h: &SparseOperator) -> f64 {
        // [H, P] = X V^dagger - V X^dagger with V = map^dagger and
        // X = (1 - P) H V. Each product state b lies in exactly one Dicke row
        // k(b), so V[b, k] is nonzero only at k = k(b).
        let v = self.map.adjoint();
        let hv = h.apply(&v);
        let x = &hv - &v * (&self.map * &hv);
        let dim = v.nrows();
        let (rows, weights): (Vec<usize>, Vec<f64>) = (0..dim)
            .map(|b| {
                let k = b.count_ones() as usize;
                (k, v[(b, k)].re)
            })
            .unzip();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let entry = x[(r, rows[c])] * weights[c] - x[(c, rows[r])].conj() * weights[r];
                worst = worst.max(entry.norm());
            }
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionReport {
    pub n_dots: usize,
    pub isometry_error: f64,
    pub jz_deviation: f64,
    pub jplus_deviation: f64,
    pub jminus_deviation: f64,
    /// Restricted product-space Hamiltonian versus the Dicke-basis one plus `W J(J+1)`.
    pub hamiltonian_deviation: f64,
    /// Worst `[H, P]` over the probe Hamiltonians.
    pub projector_commutator: f64,
    /// Largest entry of the probe Hamiltonians in the Dicke basis.
    pub hamiltonian_scale: f64,
}

impl RestrictionReport {
    pub fn max_deviation(&self) -> f64 {
        [
            self.isometry_error,
            self.jz_deviation,
            self.jplus_deviation,
            self.jminus_deviation,
            self.hamiltonian_deviation,
            self.projector_commutator,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation() <= tol
    }
}

// probe drive used for the Hamiltonian checks
const PROBE_W: f64 = 2.5;
const PROBE_G: f64 = 0.7;
const PROBE_PHASE: f64 = 1.3;

pub fn crosscheck_dicke_restriction(n_dots: usize) -> Result<RestrictionReport> {
    let full = build_fullspace_collective(n_dots)?;
    let iso = SymmetricIsometry::new(n_dots)?;
    let dicke = build_collective_matrices(n_dots)?;

    let params = SystemParams::new(n_dots, PROBE_W, PROBE_G)?;
    let j = params.j();
    let mut hamiltonian_deviation = 0.0f64;
    let mut projector_commutator = 0.0f64;
    let mut hamiltonian_scale = 0.0f64;
    let coupling = full.coupling_term();
    for i in 0..n_dots {
        let detuning = resonant_detuning(n_dots, i, PROBE_W)?;
        let h_full = full.hamiltonian_with(&coupling, PROBE_W, PROBE_G, PROBE_PHASE, detuning);
        let mut expected = build_generic_hamiltonian(&params, detuning, PROBE_PHASE)?.into_matrix();
        for k in 0..=n_dots {
            expected[(k, k)] += Complex64::from(PROBE_W * j * (j + 1.0));
        }
        hamiltonian_scale = hamiltonian_scale.max(max_abs(&expected));
        hamiltonian_deviation =
            hamiltonian_deviation.max(max_abs_diff(&iso.restrict(&h_full), &expected));
        projector_commutator = projector_commutator.max(iso.projector_commutator(&h_full));
    }

    Ok(RestrictionReport {
        n_dots,
        isometry_error: iso.orthonormality_error(),
        jz_deviation: max_abs_diff(&iso.restrict(&full.jz), &dicke.jz),
        jplus_deviation: max_abs_diff(&iso.restrict(&full.jplus), &dicke.jplus),
        jminus_deviation: max_abs_diff(&iso.restrict(&full.jminus), &dicke.jminus),
        hamiltonian_deviation,
        projector_commutator,
        hamiltonian_scale,
    })
}
