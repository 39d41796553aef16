//! Correlation quantifiers: affinity, the affinity-induced metric, the
//! affinity-based geometric discord (closed formula, measurement-sweep oracle
//! and pure-state shortcut), Hilbert-Schmidt geometric discord and
//! concurrence.
//!
//! The closed formula builds T_ij = Tr[√ρ (σ_i⊗𝟙) √ρ (σ_j⊗𝟙)] and returns
//! D = 1 − √((1 + λ_max(T))/2). The oracle minimizes the affinity distance
//! over a deterministic Bloch-sphere grid with coordinate-descent refinement
//! and certifies the closed form without sharing its code path.

use std::f64::consts::PI;

use thiserror::Error;

use crate::linalg::{
    herm_eig, kron, matrix_sqrt_psd, pauli, CMatrix, LinalgError,
};
use crate::states::{DensityMatrix, SchmidtDecomposition, StateError};

/// Eigenvalue clip for square roots of rank-deficient states.
pub const SQRT_CLIP: f64 = 1e-10;
/// Default Bloch-grid size for the measurement-sweep oracles.
pub const ORACLE_N_GRID: usize = 2000;
/// Default number of step-halving refinement levels.
pub const ORACLE_REFINE_ITERS: usize = 40;

#[derive(Debug, Error)]
pub enum CorrelationError {
    #[error("party a must be a qubit, got dimension {0}")]
    NotQubitPartyA(usize),
    #[error("state must be two qubits, got dims {0}x{1}")]
    NotTwoQubit(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Two-outcome projective measurement on the qubit party, parameterized by a
/// unit Bloch vector.
#[derive(Debug, Clone, Copy)]
pub struct BlochMeasurement {
    r: [f64; 3],
}

impl BlochMeasurement {
    pub fn new(r: [f64; 3]) -> Result<Self, CorrelationError> {
        let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(CorrelationError::DimensionMismatch(format!(
                "Bloch vector norm {n} != 1"
            )));
        }
        Ok(Self { r })
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = (theta.sin(), theta.cos());
        Self { r: [st * phi.cos(), st * phi.sin(), ct] }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.r
    }

    /// Projectors Π_± = (I ± r·σ)/2.
    pub fn projectors(&self) -> (CMatrix, CMatrix) {
        let mut rs = CMatrix::zeros(2, 2);
        for (i, &ri) in self.r.iter().enumerate() {
            rs = rs.add(&pauli(i + 1).scale_re(ri));
        }
        let id = CMatrix::identity(2);
        let plus = id.add(&rs).scale_re(0.5);
        let minus = id.sub(&rs).scale_re(0.5);
        (plus, minus)
    }
}

/// A(ρ,σ) = Tr √ρ √σ.
pub fn affinity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, CorrelationError> {
    if rho.side() != sigma.side() {
        return Err(CorrelationError::DimensionMismatch(format!(
            "state sides {} vs {}",
            rho.side(),
            sigma.side()
        )));
    }
    let a = matrix_sqrt_psd(rho.mat(), SQRT_CLIP)?;
    let b = matrix_sqrt_psd(sigma.mat(), SQRT_CLIP)?;
    let v = a.matmul(&b).trace().re;
    Ok(v.clamp(0.0, 1.0))
}

/// Π^a(ρ) = Σ_± (Π_±⊗𝟙) ρ (Π_±⊗𝟙).
pub fn measure_a(
    rho: &DensityMatrix,
    m: &BlochMeasurement,
) -> Result<DensityMatrix, CorrelationError> {
    let (da, db) = rho.dims();
    if da != 2 {
        return Err(CorrelationError::NotQubitPartyA(da));
    }
    let (plus, minus) = m.projectors();
    let id_b = CMatrix::identity(db);
    let mut out = CMatrix::zeros(rho.side(), rho.side());
    for p in [plus, minus] {
        let pb = kron(&p, &id_b);
        out = out.add(&pb.matmul(rho.mat()).matmul(&pb));
    }
    Ok(DensityMatrix::new_unchecked(out.hermitize(), rho.dims()))
}

/// Result of the closed-form affinity discord.
#[derive(Debug, Clone)]
pub struct ClosedDiscord {
    pub value: f64,
    pub t_spectrum: [f64; 3],
    pub optimal_bloch: [f64; 3],
}

/// Closed formula for the affinity discord of a 2×n state.
pub fn affinity_discord_closed(rho: &DensityMatrix) -> Result<ClosedDiscord, CorrelationError> {
    let (da, db) = rho.dims();
    if da != 2 {
        return Err(CorrelationError::NotQubitPartyA(da));
    }
    let sqrt_rho = matrix_sqrt_psd(rho.mat(), SQRT_CLIP)?;
    let id_b = CMatrix::identity(db);
    let prods: Vec<CMatrix> = (1..=3)
        .map(|i| sqrt_rho.matmul(&kron(&pauli(i), &id_b)))
        .collect();
    let mut t = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = prods[i].matmul(&prods[j]).trace().re;
            t[i][j] = v;
            t[j][i] = v;
        }
    }
    let mut tm = CMatrix::zeros(3, 3);
    for (i, row) in t.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            tm.set(i, j, num_complex::Complex64::new(v, 0.0));
        }
    }
    let eig = herm_eig(&tm, 1e-10)?;
    let lam = eig.eigenvalues[0].clamp(-1.0, 1.0);
    let spectrum = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];

    // deterministic eigenvector for degenerate top eigenvalues:
    // lexicographically largest absolute components, first nonzero positive
    let mut best: Option<[f64; 3]> = None;
    for k in 0..3 {
        if (eig.eigenvalues[k] - eig.eigenvalues[0]).abs() > 1e-12 {
            break;
        }
        let v = [
            eig.eigenvectors.get(0, k).re,
            eig.eigenvectors.get(1, k).re,
            eig.eigenvectors.get(2, k).re,
        ];
        let better = match &best {
            None => true,
            Some(b) => {
                let mut cmp = std::cmp::Ordering::Equal;
                for i in 0..3 {
                    cmp = v[i].abs().partial_cmp(&b[i].abs()).unwrap();
                    if cmp != std::cmp::Ordering::Equal {
                        break;
                    }
                }
                cmp == std::cmp::Ordering::Greater
            }
        };
        if better {
            best = Some(v);
        }
    }
    let mut optimal = best.unwrap();
    let nrm = optimal.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut optimal {
        *x /= nrm;
    }
    if let Some(&first) = optimal.iter().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            for x in &mut optimal {
                *x = -*x;
            }
        }
    }

    let value = 1.0 - ((1.0 + lam) / 2.0).sqrt();
    Ok(ClosedDiscord { value: value.max(0.0), t_spectrum: spectrum, optimal_bloch: optimal })
}

fn fibonacci_sphere(n: usize) -> impl Iterator<Item = [f64; 3]> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..n).map(move |i| {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden_angle * i as f64;
        [r * phi.cos(), r * phi.sin(), z]
    })
}

fn angles_of(r: [f64; 3]) -> (f64, f64) {
    (r[2].clamp(-1.0, 1.0).acos(), r[1].atan2(r[0]))
}

/// Deterministic minimization over Bloch measurements: Fibonacci-sphere grid
/// followed by coordinate descent in (θ, φ) with step halving.
fn minimize_over_bloch(
    objective: &mut dyn FnMut(&BlochMeasurement) -> Result<f64, CorrelationError>,
    n_grid: usize,
    refine_iters: usize,
) -> Result<(f64, [f64; 3]), CorrelationError> {
    let mut best_val = f64::INFINITY;
    let mut best_dir = [0.0, 0.0, 1.0];
    for dir in fibonacci_sphere(n_grid.max(2)) {
        let m = BlochMeasurement { r: dir };
        let v = objective(&m)?;
        if v < best_val {
            best_val = v;
            best_dir = dir;
        }
    }
    let (mut theta, mut phi) = angles_of(best_dir);
    let mut step = (4.0 * PI / n_grid.max(2) as f64).sqrt();
    for _ in 0..refine_iters {
        let mut moves = 0usize;
        loop {
            let mut improved = false;
            for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let m = BlochMeasurement::from_angles(theta + dt, phi + dp);
                let v = objective(&m)?;
                if v < best_val {
                    best_val = v;
                    theta += dt;
                    phi += dp;
                    best_dir = m.bloch();
                    improved = true;
                }
            }
            moves += 1;
            if !improved || moves > 50 {
                break;
            }
        }
        step *= 0.5;
    }
    Ok((best_val, best_dir))
}

/// Brute-force affinity discord: min over Bloch measurements of
/// 1 − √A(ρ, Π^a(ρ)), with the measured-state affinity evaluated as
/// Tr[√ρ · Π^a(√ρ)]. The measurement map is applied to √ρ explicitly, so the
/// sweep shares no optimization step with the closed formula.
pub fn affinity_discord_oracle(
    rho: &DensityMatrix,
    n_grid: usize,
    refine_iters: usize,
) -> Result<(f64, [f64; 3]), CorrelationError> {
    let (da, db) = rho.dims();
    if da != 2 {
        return Err(CorrelationError::NotQubitPartyA(da));
    }
    let sqrt_rho = matrix_sqrt_psd(rho.mat(), SQRT_CLIP)?;
    let id_b = CMatrix::identity(db);
    let mut objective = |m: &BlochMeasurement| -> Result<f64, CorrelationError> {
        let (plus, minus) = m.projectors();
        let mut aff = 0.0;
        for p in [plus, minus] {
            let pb = kron(&p, &id_b);
            let sandwich = pb.matmul(&sqrt_rho).matmul(&pb);
            aff += sqrt_rho.matmul(&sandwich).trace().re;
        }
        Ok(1.0 - aff.clamp(0.0, 1.0).sqrt())
    };
    minimize_over_bloch(&mut objective, n_grid, refine_iters)
}

/// Pure-state shortcut: D = 1 − √(Σ_k s_k²) over Schmidt probabilities.
pub fn affinity_discord_pure(sd: &SchmidtDecomposition) -> f64 {
    let sum_sq: f64 = sd.probs.iter().map(|s| s * s).sum();
    1.0 - sum_sq.sqrt()
}

/// Hilbert-Schmidt geometric discord: min over Bloch measurements of
/// ‖ρ − Π^a(ρ)‖²; kept as the contrast case for the local ancilla problem.
pub fn hs_discord(
    rho: &DensityMatrix,
    n_grid: usize,
    refine_iters: usize,
) -> Result<f64, CorrelationError> {
    if rho.dims().0 != 2 {
        return Err(CorrelationError::NotQubitPartyA(rho.dims().0));
    }
    let mut objective = |m: &BlochMeasurement| -> Result<f64, CorrelationError> {
        let measured = measure_a(rho, m)?;
        let d = rho.mat().sub(measured.mat()).hs_norm();
        Ok(d * d)
    };
    let (v, _) = minimize_over_bloch(&mut objective, n_grid, refine_iters)?;
    Ok(v)
}

/// Concurrence C = max{0, η₁−η₂−η₃−η₄} of a two-qubit state, with η_i the
/// descending eigenvalues of √(√ρ ρ̃ √ρ).
pub fn concurrence(rho: &DensityMatrix) -> Result<f64, CorrelationError> {
    let (da, db) = rho.dims();
    if (da, db) != (2, 2) {
        return Err(CorrelationError::NotTwoQubit(da, db));
    }
    let yy = kron(&pauli(2), &pauli(2));
    let flipped = yy.matmul(&rho.mat().conj()).matmul(&yy);
    let sqrt_rho = matrix_sqrt_psd(rho.mat(), SQRT_CLIP)?;
    let r = sqrt_rho.matmul(&flipped).matmul(&sqrt_rho).hermitize();
    let eig = herm_eig(&r, 1e-8)?;
    let eta: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let c = eta[0] - eta[1] - eta[2] - eta[3];
    Ok(c.clamp(0.0, 1.0))
}

/// Per-state bundle of every correlation quantifier.
#[derive(Debug, Clone)]
pub struct CorrelationReport {
    pub affinity_discord: f64,
    pub oracle_discord: f64,
    pub hs_discord: f64,
    pub concurrence: f64,
    pub t_spectrum: [f64; 3],
    pub optimal_bloch: [f64; 3],
}

pub fn correlation_report(rho: &DensityMatrix) -> Result<CorrelationReport, CorrelationError> {
    let closed = affinity_discord_closed(rho)?;
    let (oracle, _) = affinity_discord_oracle(rho, ORACLE_N_GRID, ORACLE_REFINE_ITERS)?;
    let hs = hs_discord(rho, ORACLE_N_GRID, ORACLE_REFINE_ITERS)?;
    let conc = if rho.dims() == (2, 2) { concurrence(rho)? } else { 0.0 };
    Ok(CorrelationReport {
        affinity_discord: closed.value,
        oracle_discord: oracle,
        hs_discord: hs,
        concurrence: conc,
        t_spectrum: closed.t_spectrum,
        optimal_bloch: closed.optimal_bloch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C_ONE, C_ZERO};
    use crate::states::{
        bell_diagonal, bell_phi_plus, pure_state, BellDiagonalParams, DensityMatrix, StateSampler,
    };
    use num_complex::Complex64;

    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn affinity_of_identical_states_is_one() {
        let mut s = StateSampler::new(1);
        let rho = s.random_mixed((2, 2), 3);
        assert!((affinity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn affinity_of_orthogonal_overlap() {
        let zero = pure_state(&[C_ONE, C_ZERO], (1, 2)).unwrap();
        let plus = pure_state(
            &[Complex64::new(INV_SQRT2, 0.0), Complex64::new(INV_SQRT2, 0.0)],
            (1, 2),
        )
        .unwrap();
        assert!((affinity(&zero, &plus).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn affinity_is_multiplicative_over_tensor_products() {
        let mut s = StateSampler::new(2);
        for _ in 0..5 {
            let r1 = s.random_mixed((1, 2), 2);
            let r2 = s.random_mixed((1, 2), 2);
            let s1 = s.random_mixed((1, 2), 2);
            let s2 = s.random_mixed((1, 2), 2);
            let joint_r = DensityMatrix::new(kron(r1.mat(), r2.mat()), (2, 2)).unwrap();
            let joint_s = DensityMatrix::new(kron(s1.mat(), s2.mat()), (2, 2)).unwrap();
            let lhs = affinity(&joint_r, &joint_s).unwrap();
            let rhs = affinity(&r1, &s1).unwrap() * affinity(&r2, &s2).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn measurement_dephases_bell_state() {
        let rho = bell_phi_plus();
        let m = BlochMeasurement::new([0.0, 0.0, 1.0]).unwrap();
        let out = measure_a(&rho, &m).unwrap();
        let expect = CMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        assert!(out.mat().sub(&expect).hs_norm() < 1e-12);
    }

    #[test]
    fn measurement_is_idempotent_and_trace_preserving() {
        let mut s = StateSampler::new(4);
        let rho = s.random_mixed((2, 2), 4);
        let m = BlochMeasurement::from_angles(0.7, 1.9);
        let once = measure_a(&rho, &m).unwrap();
        let twice = measure_a(&once, &m).unwrap();
        assert!(once.mat().sub(twice.mat()).hs_norm() < 1e-12);
        assert!((once.mat().trace().re - 1.0).abs() < 1e-12);
    }

    // The sqrt/measurement exchange only holds when the state already
    // commutes with the projectors, e.g. a post-measurement state. On a
    // generic state the two orders differ by a finite amount.
    #[test]
    fn measurement_commutes_with_square_root_on_measured_states() {
        let mut s = StateSampler::new(6);
        let m = BlochMeasurement::from_angles(1.1, 0.3);
        let rho = measure_a(&s.random_mixed((2, 2), 4), &m).unwrap();
        let sqrt_then_measure = measure_a(
            &DensityMatrix::new_unchecked(
                matrix_sqrt_psd(rho.mat(), SQRT_CLIP).unwrap(),
                rho.dims(),
            ),
            &m,
        )
        .unwrap();
        let measure_then_sqrt =
            matrix_sqrt_psd(measure_a(&rho, &m).unwrap().mat(), SQRT_CLIP).unwrap();
        assert!(sqrt_then_measure.mat().sub(&measure_then_sqrt).hs_norm() < 1e-10);
    }

    #[test]
    fn closed_formula_bell_state() {
        let d = affinity_discord_closed(&bell_phi_plus()).unwrap();
        assert!((d.value - (1.0 - INV_SQRT2)).abs() < 1e-9, "{}", d.value);
    }

    #[test]
    fn closed_formula_product_state_is_zero() {
        let mut s = StateSampler::new(8);
        let a = s.random_mixed((1, 2), 2);
        let b = s.random_mixed((1, 2), 2);
        let rho = DensityMatrix::new(kron(a.mat(), b.mat()), (2, 2)).unwrap();
        let d = affinity_discord_closed(&rho).unwrap();
        assert!(d.value.abs() < 1e-10, "{}", d.value);
    }

    #[test]
    fn closed_formula_rejects_qudit_party_a() {
        let mut s = StateSampler::new(10);
        let rho = s.random_mixed((3, 2), 2);
        assert!(matches!(
            affinity_discord_closed(&rho),
            Err(CorrelationError::NotQubitPartyA(3))
        ));
    }

    #[test]
    fn oracle_bell_state() {
        let (v, _) = affinity_discord_oracle(&bell_phi_plus(), 2000, 40).unwrap();
        assert!((v - (1.0 - INV_SQRT2)).abs() < 1e-6, "{v}");
    }

    #[test]
    fn oracle_matches_closed_on_bell_diagonal_example() {
        let rho = bell_diagonal(BellDiagonalParams::new(1.0, 0.5, -0.5).unwrap()).unwrap();
        let closed = affinity_discord_closed(&rho).unwrap();
        let (oracle, _) = affinity_discord_oracle(&rho, 2000, 40).unwrap();
        assert!((closed.value - oracle).abs() < 1e-4, "{} vs {oracle}", closed.value);
        assert!(oracle >= closed.value - 1e-9);
    }

    #[test]
    fn pure_state_formula_values() {
        let sd = crate::states::schmidt(&[C_ONE, C_ZERO, C_ZERO, C_ONE], (2, 2)).unwrap();
        assert!((affinity_discord_pure(&sd) - (1.0 - INV_SQRT2)).abs() < 1e-12);

        let sd0 = crate::states::schmidt(&[C_ONE, C_ZERO, C_ZERO, C_ZERO], (2, 2)).unwrap();
        assert!(affinity_discord_pure(&sd0).abs() < 1e-12);

        let sd09 = SchmidtDecomposition {
            probs: vec![0.9, 0.1],
            left: vec![vec![C_ONE, C_ZERO], vec![C_ZERO, C_ONE]],
            right: vec![vec![C_ONE, C_ZERO], vec![C_ZERO, C_ONE]],
        };
        assert!((affinity_discord_pure(&sd09) - (1.0 - 0.82f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn hs_discord_product_state_is_zero() {
        let mut s = StateSampler::new(12);
        let a = s.random_mixed((1, 2), 2);
        let b = s.random_mixed((1, 2), 2);
        let rho = DensityMatrix::new(kron(a.mat(), b.mat()), (2, 2)).unwrap();
        assert!(hs_discord(&rho, 500, 30).unwrap() < 1e-7);
    }

    #[test]
    fn hs_discord_bell_state() {
        // analytic minimum for Bell-diagonal (1,-1,1): (1/4)(Σc² − c_max²) = 1/2
        let v = hs_discord(&bell_phi_plus(), 2000, 40).unwrap();
        assert!((v - 0.5).abs() < 1e-5, "{v}");
    }

    #[test]
    fn concurrence_bell_and_product() {
        assert!((concurrence(&bell_phi_plus()).unwrap() - 1.0).abs() < 1e-8);
        let p = pure_state(&[C_ONE, C_ZERO, C_ZERO, C_ZERO], (2, 2)).unwrap();
        assert!(concurrence(&p).unwrap() < 1e-8);
    }

    #[test]
    fn concurrence_matches_bell_diagonal_closed_form() {
        let mut s = StateSampler::new(14);
        for _ in 0..20 {
            let p = s.random_bell_diagonal();
            let rho = bell_diagonal(p).unwrap();
            let lam_max = p.eigenvalues().into_iter().fold(f64::NEG_INFINITY, f64::max);
            let expect = (2.0 * lam_max - 1.0).max(0.0);
            let got = concurrence(&rho).unwrap();
            assert!((got - expect).abs() < 1e-10, "{got} vs {expect} for {p:?}");
        }
    }

    #[test]
    fn report_maximally_mixed_is_all_zero() {
        let rho = bell_diagonal(BellDiagonalParams::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        let rep = correlation_report(&rho).unwrap();
        assert!(rep.affinity_discord.abs() < 1e-9);
        assert!(rep.oracle_discord.abs() < 1e-7);
        assert!(rep.hs_discord.abs() < 1e-9);
        assert!(rep.concurrence.abs() < 1e-9);
    }
}
