//! Constructors and validators for bipartite quantum states: general density
//! matrices, Bell-diagonal states, classical-quantum states, Schmidt
//! decompositions and seeded random generators for property tests.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg::{
    herm_eig, kron, partial_trace, CMatrix, LinalgError, Party, C_ONE, C_ZERO,
};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("not a valid state: {0}")]
    NotAState(String),
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("probabilities must be nonnegative and sum to 1, got sum {0}")]
    BadProbabilities(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Validated density matrix on a bipartite space with factor dimensions
/// (da, db); party a is the left tensor factor.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dims: (usize, usize),
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity before wrapping.
    pub fn new(mat: CMatrix, dims: (usize, usize)) -> Result<Self, StateError> {
        let side = dims.0 * dims.1;
        if !mat.is_square() || mat.rows() != side {
            return Err(StateError::NotAState(format!(
                "matrix side {} does not match dims {}x{}",
                mat.rows(),
                dims.0,
                dims.1
            )));
        }
        let defect = mat.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(StateError::NotAState(format!(
                "Hermiticity defect {defect:.3e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(StateError::NotAState(format!("trace {tr} != 1")));
        }
        let eig = herm_eig(&mat, HERMITICITY_TOL)?;
        let min_eig = *eig.eigenvalues.last().unwrap();
        if min_eig < -POSITIVITY_TOL {
            return Err(StateError::NotAState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { dims, mat })
    }

    /// Wraps without re-validating. Callers must guarantee the invariants;
    /// used on hot paths where the output is valid by construction.
    pub(crate) fn new_unchecked(mat: CMatrix, dims: (usize, usize)) -> Self {
        Self { dims, mat }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn side(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn purity(&self) -> f64 {
        self.mat.matmul(&self.mat).trace().re
    }

    pub fn marginal(&self, keep: Party) -> Result<CMatrix, LinalgError> {
        partial_trace(&self.mat, self.dims, keep)
    }

    /// ρ_ab ⊗ ρ_c with the ancilla appended to party b.
    pub fn with_ancilla(&self, ancilla: &DensityMatrix) -> DensityMatrix {
        let mat = kron(&self.mat, ancilla.mat());
        DensityMatrix::new_unchecked(mat, (self.dims.0, self.dims.1 * ancilla.side()))
    }
}

/// Correlation coefficients (c1, c2, c3) of a Bell-diagonal two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonalParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl BellDiagonalParams {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self, StateError> {
        let p = Self { c1, c2, c3 };
        let min = p.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-12 {
            return Err(StateError::NotAState(format!(
                "Bell-diagonal eigenvalue {min:.3e} negative for ({c1}, {c2}, {c3})"
            )));
        }
        Ok(p)
    }

    /// The four eigenvalues (1/4)(1 ± c1 ∓ c2 ± c3) of the state.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let Self { c1, c2, c3 } = *self;
        [
            0.25 * (1.0 + c1 - c2 + c3),
            0.25 * (1.0 - c1 + c2 + c3),
            0.25 * (1.0 + c1 + c2 - c3),
            0.25 * (1.0 - c1 - c2 - c3),
        ]
    }
}

/// (1/4)(I⊗I + Σ c_j σ_j⊗σ_j).
pub fn bell_diagonal(p: BellDiagonalParams) -> Result<DensityMatrix, StateError> {
    let min = p.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
    if min < -1e-12 {
        return Err(StateError::NotAState(format!(
            "Bell-diagonal eigenvalue {min:.3e} negative"
        )));
    }
    let mut m = CMatrix::identity(4);
    for (j, c) in [(1, p.c1), (2, p.c2), (3, p.c3)] {
        let s = crate::linalg::pauli(j);
        m = m.add(&kron(&s, &s).scale_re(c));
    }
    DensityMatrix::new(m.scale_re(0.25), (2, 2))
}

/// Recover (c1, c2, c3) = Tr(ρ σ_j⊗σ_j) from any two-qubit state.
pub fn bell_coefficients(rho: &DensityMatrix) -> [f64; 3] {
    let mut out = [0.0; 3];
    for j in 1..=3 {
        let s = crate::linalg::pauli(j);
        out[j - 1] = kron(&s, &s).matmul(rho.mat()).trace().re;
    }
    out
}

/// Rank-1 projector onto a (normalized) bipartite vector.
pub fn pure_state(amplitudes: &[Complex64], dims: (usize, usize)) -> Result<DensityMatrix, StateError> {
    let side = dims.0 * dims.1;
    if amplitudes.len() != side {
        return Err(StateError::NotAState(format!(
            "vector length {} does not match dims {}x{}",
            amplitudes.len(),
            dims.0,
            dims.1
        )));
    }
    let nrm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nrm == 0.0 {
        return Err(StateError::ZeroVector);
    }
    let psi: Vec<Complex64> = amplitudes.iter().map(|z| z / nrm).collect();
    let mut m = CMatrix::zeros(side, side);
    for i in 0..side {
        for j in 0..side {
            m.set(i, j, psi[i] * psi[j].conj());
        }
    }
    Ok(DensityMatrix::new_unchecked(m, dims))
}

/// |Φ+⟩⟨Φ+| on two qubits.
pub fn bell_phi_plus() -> DensityMatrix {
    pure_state(&[C_ONE, C_ZERO, C_ZERO, C_ONE], (2, 2)).unwrap()
}

/// Schmidt decomposition of a bipartite pure vector. The `probs` are the
/// squared Schmidt coefficients, so they sum to 1 and the amplitudes in the
/// reassembly |Ψ⟩ = Σ √s_k |α_k⟩⊗|β_k⟩ are √s_k.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub probs: Vec<f64>,
    pub left: Vec<Vec<Complex64>>,
    pub right: Vec<Vec<Complex64>>,
}

impl SchmidtDecomposition {
    pub fn reassemble(&self, dims: (usize, usize)) -> Vec<Complex64> {
        let (da, db) = dims;
        let mut psi = vec![C_ZERO; da * db];
        for (k, &s) in self.probs.iter().enumerate() {
            if s <= 0.0 {
                continue;
            }
            let amp = s.sqrt();
            for i in 0..da {
                for j in 0..db {
                    psi[i * db + j] += self.left[k][i] * self.right[k][j] * amp;
                }
            }
        }
        psi
    }
}

pub fn schmidt(psi: &[Complex64], dims: (usize, usize)) -> Result<SchmidtDecomposition, StateError> {
    let rho = pure_state(psi, dims)?;
    let (da, db) = dims;
    let reduced = rho.marginal(Party::A)?;
    let eig = herm_eig(&reduced, 1e-9)?;
    let nrm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi_n: Vec<Complex64> = psi.iter().map(|z| z / nrm).collect();

    let k_max = da.min(db);
    let mut probs = Vec::with_capacity(k_max);
    let mut left = Vec::with_capacity(k_max);
    let mut right = Vec::with_capacity(k_max);
    for k in 0..k_max {
        let s = eig.eigenvalues[k].max(0.0);
        probs.push(s);
        let alpha: Vec<Complex64> = (0..da).map(|i| eig.eigenvectors.get(i, k)).collect();
        // β_k = (⟨α_k|⊗I)|Ψ⟩ / √s_k
        let mut beta = vec![C_ZERO; db];
        if s > 1e-14 {
            let amp = s.sqrt();
            for j in 0..db {
                let mut acc = C_ZERO;
                for i in 0..da {
                    acc += alpha[i].conj() * psi_n[i * db + j];
                }
                beta[j] = acc / amp;
            }
        }
        left.push(alpha);
        right.push(beta);
    }
    // renormalize the probability vector against truncation roundoff
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(StateError::NotAState(format!(
            "Schmidt probabilities sum to {total}"
        )));
    }
    Ok(SchmidtDecomposition { probs, left, right })
}

/// Σ_k p_k |k⟩⟨k| ⊗ σ_k with |k⟩ the given orthonormal qubit basis.
pub fn classical_quantum(
    probs: &[f64],
    basis: &[Vec<Complex64>],
    sigmas: &[DensityMatrix],
) -> Result<DensityMatrix, StateError> {
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-10 {
        return Err(StateError::BadProbabilities(sum));
    }
    if probs.len() != basis.len() || probs.len() != sigmas.len() {
        return Err(StateError::NotAState("mismatched component counts".into()));
    }
    let da = basis[0].len();
    let db = sigmas[0].side();
    let mut m = CMatrix::zeros(da * db, da * db);
    for ((&p, ket), sigma) in probs.iter().zip(basis).zip(sigmas) {
        let mut proj = CMatrix::zeros(da, da);
        for i in 0..da {
            for j in 0..da {
                proj.set(i, j, ket[i] * ket[j].conj());
            }
        }
        m = m.add(&kron(&proj, sigma.mat()).scale_re(p));
    }
    DensityMatrix::new(m, (da, db))
}

/// Seeded, portable generator for random states and unitaries.
pub struct StateSampler {
    rng: ChaCha8Rng,
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn gaussian(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im)
    }

    pub fn random_pure(&mut self, dims: (usize, usize)) -> DensityMatrix {
        let side = dims.0 * dims.1;
        let psi: Vec<Complex64> = (0..side).map(|_| self.gaussian()).collect();
        pure_state(&psi, dims).expect("Gaussian vector is nonzero a.s.")
    }

    pub fn random_pure_vector(&mut self, len: usize) -> Vec<Complex64> {
        let psi: Vec<Complex64> = (0..len).map(|_| self.gaussian()).collect();
        let nrm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        psi.into_iter().map(|z| z / nrm).collect()
    }

    /// Mixture of `rank` random pure states with Dirichlet(1) weights.
    pub fn random_mixed(&mut self, dims: (usize, usize), rank: usize) -> DensityMatrix {
        assert!(rank >= 1);
        let side = dims.0 * dims.1;
        let mut weights: Vec<f64> = (0..rank)
            .map(|_| -(1.0 - self.rng.gen::<f64>()).ln())
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mut m = CMatrix::zeros(side, side);
        for &w in &weights {
            let p = self.random_pure(dims);
            m = m.add(&p.mat().scale_re(w));
        }
        DensityMatrix::new_unchecked(m.hermitize(), dims)
    }

    /// Haar-like random unitary: Gram-Schmidt of a complex Gaussian matrix
    /// with the diagonal phase fixed.
    pub fn random_unitary(&mut self, dim: usize) -> CMatrix {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| (0..dim).map(|_| self.gaussian()).collect())
            .collect();
        for k in 0..dim {
            for prev in 0..k {
                let dot: Complex64 =
                    cols[prev].iter().zip(&cols[k]).map(|(p, c)| p.conj() * c).sum();
                let prev_col = cols[prev].clone();
                for (c, p) in cols[k].iter_mut().zip(&prev_col) {
                    *c -= dot * p;
                }
            }
            let nrm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut cols[k] {
                *z /= nrm;
            }
            // fix the phase of the k-th diagonal entry
            let d = cols[k][k];
            if d.norm() > 1e-14 {
                let phase = d.conj() / d.norm();
                for z in &mut cols[k] {
                    *z *= phase;
                }
            }
        }
        let mut u = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            for i in 0..dim {
                u.set(i, k, cols[k][i]);
            }
        }
        u
    }

    /// Random Bell-diagonal parameters drawn by rejection from the cube.
    pub fn random_bell_diagonal(&mut self) -> BellDiagonalParams {
        loop {
            let c1 = 2.0 * self.rng.gen::<f64>() - 1.0;
            let c2 = 2.0 * self.rng.gen::<f64>() - 1.0;
            let c3 = 2.0 * self.rng.gen::<f64>() - 1.0;
            if let Ok(p) = BellDiagonalParams::new(c1, c2, c3) {
                return p;
            }
        }
    }

    pub fn gen_f64(&mut self) -> f64 {
        self.rng.gen()
    }
}
