//! Quantum-speed-limit machinery: the correlation change ΔQ, time-averaged
//! generator norms Λ_op/Λ_tr/Λ_HS, and the combined ML/MT bound τ_QC for the
//! decay and creation of correlation.
//!
//! The generator action is evaluated as the time derivative of the system
//! square roots √ρ_t and √σ_t, with σ_t the optimally measured state and its
//! measurement basis frozen across each finite-difference stencil.

use thiserror::Error;

use crate::correlations::{
    affinity_discord_closed, measure_a, BlochMeasurement, CorrelationError, SQRT_CLIP,
};
use crate::linalg::{matrix_sqrt_psd, norm, CMatrix, LinalgError, NormKind};
use crate::states::DensityMatrix;

#[derive(Debug, Error)]
pub enum QslError {
    #[error("mode {mode:?} inconsistent with discord change {d0:.6} -> {dt:.6}")]
    ModeMismatch { mode: QslMode, d0: f64, dt: f64 },
    #[error("all generator norms vanish while ΔQ = {0:.3e} > 0")]
    DegenerateBound(f64),
    #[error("stencil at t = {t} with h = {h} leaves the trajectory domain [{lo}, {hi}]")]
    StencilOutOfDomain { t: f64, h: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QslMode {
    Decay,
    Creation,
}

/// Per-(τ, trajectory) bundle of QSL quantities.
#[derive(Debug, Clone)]
pub struct QslProfile {
    pub tau: f64,
    pub delta_q: f64,
    pub lambda_op: f64,
    pub lambda_tr: f64,
    pub lambda_hs: f64,
    pub tau_qc: f64,
}

pub type Trajectory<'a> = dyn Fn(f64) -> DensityMatrix + 'a;

pub const DEFAULT_N_STEPS: usize = 200;

pub fn default_h(tau: f64, n_steps: usize) -> f64 {
    (1e-4f64).min(tau / (10.0 * n_steps as f64))
}

/// ΔQ = |D(ρ₀) − D(ρ_t)| via the closed-form affinity discord.
pub fn delta_q(rho0: &DensityMatrix, rhot: &DensityMatrix) -> Result<f64, QslError> {
    let d0 = affinity_discord_closed(rho0)?.value;
    let dt = affinity_discord_closed(rhot)?.value;
    Ok((d0 - dt).abs())
}

fn sqrt_of(rho: &DensityMatrix) -> Result<CMatrix, QslError> {
    Ok(matrix_sqrt_psd(rho.mat(), SQRT_CLIP)?)
}

fn sqrt_measured(rho: &DensityMatrix, m: &BlochMeasurement) -> Result<CMatrix, QslError> {
    let measured = measure_a(rho, m)?;
    Ok(matrix_sqrt_psd(measured.mat(), SQRT_CLIP)?)
}

/// Second-order finite difference of s ↦ f(s) at t, central in the interior
/// and one-sided at the domain ends.
fn stencil_derivative(
    f: &mut dyn FnMut(f64) -> Result<CMatrix, QslError>,
    t: f64,
    h: f64,
    domain: (f64, f64),
) -> Result<CMatrix, QslError> {
    let (lo, hi) = domain;
    let inv_2h = 1.0 / (2.0 * h);
    if t - h >= lo && t + h <= hi {
        let fp = f(t + h)?;
        let fm = f(t - h)?;
        Ok(fp.sub(&fm).scale_re(inv_2h))
    } else if t - h < lo {
        if t + 2.0 * h > hi {
            return Err(QslError::StencilOutOfDomain { t, h, lo, hi });
        }
        let f0 = f(t)?;
        let f1 = f(t + h)?;
        let f2 = f(t + 2.0 * h)?;
        Ok(f1.scale_re(4.0).sub(&f0.scale_re(3.0)).sub(&f2).scale_re(inv_2h))
    } else {
        if t - 2.0 * h < lo {
            return Err(QslError::StencilOutOfDomain { t, h, lo, hi });
        }
        let f0 = f(t)?;
        let f1 = f(t - h)?;
        let f2 = f(t - 2.0 * h)?;
        Ok(f0.scale_re(3.0).sub(&f1.scale_re(4.0)).add(&f2).scale_re(inv_2h))
    }
}

/// Time derivatives of √ρ_t and √σ_t at t. The optimal measurement of ρ_t is
/// found once at the stencil center and held fixed across the stencil.
pub fn sqrt_rate(
    traj: &Trajectory,
    t: f64,
    h: f64,
    domain: (f64, f64),
) -> Result<(CMatrix, CMatrix), QslError> {
    let center = traj(t);
    let closed = affinity_discord_closed(&center)?;
    let m = BlochMeasurement::new(closed.optimal_bloch)
        .expect("closed formula returns a unit Bloch vector");

    let mut f_rho = |s: f64| sqrt_of(&traj(s));
    let dsr = stencil_derivative(&mut f_rho, t, h, domain)?;
    let mut f_sigma = |s: f64| sqrt_measured(&traj(s), &m);
    let dss = stencil_derivative(&mut f_sigma, t, h, domain)?;
    Ok((dsr, dss))
}

/// Trapezoidal time averages of ‖d√ρ/dt‖ + ‖d√σ/dt‖ per norm kind over
/// [0, τ] with n_steps uniform intervals.
pub fn lambda_averages(
    traj: &Trajectory,
    tau: f64,
    n_steps: usize,
    h: f64,
) -> Result<(f64, f64, f64), QslError> {
    assert!(tau > 0.0 && n_steps >= 2);
    let dt = tau / n_steps as f64;
    let mut sums = [0.0f64; 3];
    for i in 0..=n_steps {
        let t = i as f64 * dt;
        let (dsr, dss) = sqrt_rate(traj, t, h, (0.0, tau))?;
        let weight = if i == 0 || i == n_steps { 0.5 } else { 1.0 };
        for (k, kind) in [NormKind::Op, NormKind::Tr, NormKind::Hs].into_iter().enumerate() {
            let g = norm(&dsr, kind)? + norm(&dss, kind)?;
            sums[k] += weight * g;
        }
    }
    let scale = dt / tau; // trapezoid then 1/τ normalization
    Ok((sums[0] * scale, sums[1] * scale, sums[2] * scale))
}

/// Combined ML/MT bound
/// τ_QC = max{1/Λ_op, 1/Λ_tr, 1/Λ_HS} · 2ΔQ · (1 − (2D(ρ₀) ∓ ΔQ)/2),
/// with − for decay and + for creation.
pub fn tau_qsl(
    rho0: &DensityMatrix,
    traj: &Trajectory,
    tau: f64,
    mode: QslMode,
    n_steps: usize,
    h: f64,
) -> Result<QslProfile, QslError> {
    let d0 = affinity_discord_closed(rho0)?.value;
    let dt = affinity_discord_closed(&traj(tau))?.value;
    let dq = (d0 - dt).abs();
    match mode {
        QslMode::Decay if dt > d0 + 1e-9 => {
            return Err(QslError::ModeMismatch { mode, d0, dt });
        }
        QslMode::Creation if dt < d0 - 1e-9 => {
            return Err(QslError::ModeMismatch { mode, d0, dt });
        }
        _ => {}
    }
    let (lambda_op, lambda_tr, lambda_hs) = lambda_averages(traj, tau, n_steps, h)?;

    let tau_qc = if dq == 0.0 {
        0.0
    } else {
        let inv_max = [lambda_op, lambda_tr, lambda_hs]
            .into_iter()
            .filter(|&l| l > 0.0)
            .map(|l| 1.0 / l)
            .fold(0.0f64, f64::max);
        if inv_max == 0.0 {
            return Err(QslError::DegenerateBound(dq));
        }
        let bracket = match mode {
            QslMode::Decay => 1.0 - (2.0 * d0 - dq) / 2.0,
            QslMode::Creation => 1.0 - (2.0 * d0 + dq) / 2.0,
        };
        inv_max * 2.0 * dq * bracket.max(0.0)
    };
    Ok(QslProfile { tau, delta_q: dq, lambda_op, lambda_tr, lambda_hs, tau_qc })
}
