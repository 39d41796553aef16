//! Dense complex matrix kernel: Hermitian eigendecomposition (cyclic Jacobi),
//! PSD square roots, singular values, Kronecker products, partial traces and
//! the operator/trace/Hilbert-Schmidt norms.
//!
//! Everything here targets small matrices (side at most 8), so the Jacobi
//! solver is run to near machine precision with no dependency on an external
//! LAPACK binding.

use num_complex::Complex64;
use thiserror::Error;

pub const C_ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const C_ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const C_I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive semidefinite: eigenvalue {min_eig:.3e} below -{clip:.3e}")]
    NotPsd { min_eig: f64, clip: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C_ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C_ONE);
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        m
    }

    /// Build from rows of complex entries, panicking on ragged input.
    /// Intended for literals in constructors and tests.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C_ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Hilbert-Schmidt (Frobenius) norm computed directly from the entries.
    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖A − A†‖_HS, zero for an exactly Hermitian matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.sub(&self.dagger()).hs_norm()
    }

    /// (A + A†)/2; used to scrub roundoff before spectral operations.
    pub fn hermitize(&self) -> Self {
        self.add(&self.dagger()).scale_re(0.5)
    }
}

/// Pauli matrices σ_1, σ_2, σ_3.
pub fn pauli(i: usize) -> CMatrix {
    match i {
        1 => CMatrix::from_rows(&[&[C_ZERO, C_ONE], &[C_ONE, C_ZERO]]),
        2 => CMatrix::from_rows(&[&[C_ZERO, -C_I], &[C_I, C_ZERO]]),
        3 => CMatrix::from_rows(&[&[C_ONE, C_ZERO], &[C_ZERO, -C_ONE]]),
        _ => panic!("pauli index must be 1, 2 or 3"),
    }
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues sorted descending,
/// eigenvectors as orthonormal columns in matching order.
#[derive(Debug, Clone)]
pub struct HermEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermEigen {
    /// V diag(f(λ)) V† for a real function of the spectrum.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = CMatrix::zeros(n, n);
        for k in 0..n {
            let fl = f(self.eigenvalues[k]);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v.get(i, k);
                for j in 0..n {
                    let add = vik * v.get(j, k).conj() * fl;
                    out.set(i, j, out.get(i, j) + add);
                }
            }
        }
        out
    }
}

const JACOBI_MAX_SWEEPS: usize = 60;

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
pub fn herm_eig(a: &CMatrix, tol: f64) -> Result<HermEigen, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows, cols: a.cols });
    }
    let defect = a.hermiticity_defect();
    if defect > tol {
        return Err(LinalgError::NotHermitian { defect, tol });
    }
    let n = a.rows;
    let mut m = a.hermitize();
    let mut v = CMatrix::identity(n);
    let scale = m.hs_norm().max(1.0);
    let stop = 1e-14 * scale;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * m.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let beta = apq.norm();
                if beta <= 1e-300 {
                    continue;
                }
                let phase = apq / beta; // e^{iθ}
                let alpha = m.get(p, p).re;
                let gamma = m.get(q, q).re;
                let theta = (gamma - alpha) / (2.0 * beta);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase * s; // s e^{iθ}

                // rows p,q: U† from the left
                for k in 0..n {
                    let mp = m.get(p, k);
                    let mq = m.get(q, k);
                    m.set(p, k, mp * c - mq * sp);
                    m.set(q, k, mp * sp.conj() + mq * c);
                }
                // cols p,q: U from the right
                for k in 0..n {
                    let mp = m.get(k, p);
                    let mq = m.get(k, q);
                    m.set(k, p, mp * c - mq * sp.conj());
                    m.set(k, q, mp * sp + mq * c);
                    let vp = v.get(k, p);
                    let vq = v.get(k, q);
                    v.set(k, p, vp * c - vq * sp.conj());
                    v.set(k, q, vp * sp + vq * c);
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| eigs[j].partial_cmp(&eigs[i]).unwrap());

    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eigs[src]);
        for i in 0..n {
            vectors.set(i, dst, v.get(i, src));
        }
    }
    Ok(HermEigen { eigenvalues: values, eigenvectors: vectors })
}

/// Principal square root of a Hermitian PSD matrix, clipping eigenvalues in
/// [-clip, 0) to zero. Errors if any eigenvalue falls below -clip.
pub fn matrix_sqrt_psd(a: &CMatrix, clip: f64) -> Result<CMatrix, LinalgError> {
    let eig = herm_eig(a, clip.max(1e-10))?;
    if let Some(&min_eig) = eig.eigenvalues.last() {
        if min_eig < -clip {
            return Err(LinalgError::NotPsd { min_eig, clip });
        }
    }
    // eigenvalues below the clip are numerical zeros of rank-deficient
    // inputs; taking their square root would promote 1e-15 noise to 3e-8
    Ok(eig.apply_spectral(|l| if l <= clip { 0.0 } else { l.sqrt() }))
}

/// Singular values in descending order, via the spectrum of A†A.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>, LinalgError> {
    let ata = a.dagger().matmul(a);
    let eig = herm_eig(&ata, 1e-8 * ata.hs_norm().max(1.0))?;
    let k = a.rows.min(a.cols);
    Ok(eig.eigenvalues.iter().take(k).map(|l| l.max(0.0).sqrt()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// Largest singular value.
    Op,
    /// Sum of singular values.
    Tr,
    /// Root of the sum of squared singular values.
    Hs,
}

pub fn norm(a: &CMatrix, kind: NormKind) -> Result<f64, LinalgError> {
    let sv = singular_values(a)?;
    Ok(match kind {
        NormKind::Op => sv.first().copied().unwrap_or(0.0),
        NormKind::Tr => sv.iter().sum(),
        NormKind::Hs => sv.iter().map(|s| s * s).sum::<f64>().sqrt(),
    })
}

/// Kronecker product A ⊗ B; party a is always the left factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            if aij == C_ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.set(i * b.rows + k, j * b.cols + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

/// Partial trace over the party NOT kept, for a bipartite operator with
/// factor dimensions (da, db).
pub fn partial_trace(
    a: &CMatrix,
    dims: (usize, usize),
    keep: Party,
) -> Result<CMatrix, LinalgError> {
    let (da, db) = dims;
    if !a.is_square() || a.rows != da * db {
        return Err(LinalgError::DimensionMismatch(format!(
            "expected square side {}, got {}x{}",
            da * db,
            a.rows,
            a.cols
        )));
    }
    match keep {
        Party::A => {
            let mut out = CMatrix::zeros(da, da);
            for i in 0..da {
                for j in 0..da {
                    let mut acc = C_ZERO;
                    for k in 0..db {
                        acc += a.get(i * db + k, j * db + k);
                    }
                    out.set(i, j, acc);
                }
            }
            Ok(out)
        }
        Party::B => {
            let mut out = CMatrix::zeros(db, db);
            for k in 0..db {
                for l in 0..db {
                    let mut acc = C_ZERO;
                    for i in 0..da {
                        acc += a.get(i * db + k, i * db + l);
                    }
                    out.set(k, l, acc);
                }
            }
            Ok(out)
        }
    }
}
