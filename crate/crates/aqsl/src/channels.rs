//! Kraus-channel abstraction and the Ornstein-Uhlenbeck dephasing channel
//! with its closed-form Bell-diagonal evolution.

use thiserror::Error;

use crate::linalg::{kron, CMatrix, LinalgError};
use crate::states::{BellDiagonalParams, DensityMatrix, StateError};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("channel acts on side {channel}, state has side {state}")]
    DimensionMismatch { channel: usize, state: usize },
    #[error("Kraus completeness defect {0:.3e}")]
    NotTracePreserving(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// CPTP map given by its Kraus operator list.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    /// Validates completeness Σ K†K = I within 1e-12.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self, ChannelError> {
        assert!(!ops.is_empty());
        let side = ops[0].rows();
        let mut acc = CMatrix::zeros(side, side);
        for k in &ops {
            acc = acc.add(&k.dagger().matmul(k));
        }
        let defect = acc.sub(&CMatrix::identity(side)).hs_norm();
        if defect > 1e-12 {
            return Err(ChannelError::NotTracePreserving(defect));
        }
        Ok(Self { ops })
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn side(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn completeness_defect(&self) -> f64 {
        let side = self.side();
        let mut acc = CMatrix::zeros(side, side);
        for k in &self.ops {
            acc = acc.add(&k.dagger().matmul(k));
        }
        acc.sub(&CMatrix::identity(side)).hs_norm()
    }
}

/// Ornstein-Uhlenbeck noise parameters: Γ the coupling strength, γ the noise
/// bandwidth, both in inverse-time units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuParams {
    pub big_gamma: f64,
    pub gamma: f64,
}

impl OuParams {
    pub fn new(big_gamma: f64, gamma: f64) -> Result<Self, ChannelError> {
        if !(big_gamma > 0.0 && big_gamma.is_finite() && gamma > 0.0 && gamma.is_finite()) {
            return Err(ChannelError::NegativeTime(big_gamma.min(gamma)));
        }
        Ok(Self { big_gamma, gamma })
    }
}

/// Dephasing exponent f(t) = Γt/2 · [1 + (e^{−γt}−1)/(γt)].
pub fn ou_f(t: f64, p: OuParams) -> Result<f64, ChannelError> {
    if t < 0.0 {
        return Err(ChannelError::NegativeTime(t));
    }
    let x = p.gamma * t;
    // series for the 0/0 bracket at small γt: 1 + (e^{-x}-1)/x = x/2 - x²/6 + x³/24;
    // the direct branch uses exp_m1 so the two agree at the crossover
    let bracket = if x < 1e-6 {
        x / 2.0 - x * x / 6.0 + x * x * x / 24.0
    } else {
        1.0 + (-x).exp_m1() / x
    };
    Ok(p.big_gamma * t / 2.0 * bracket)
}

fn dephasing_pair(p: f64) -> (CMatrix, CMatrix) {
    let e1 = CMatrix::from_real_diag(&[p, 1.0]);
    let e2 = CMatrix::from_real_diag(&[(1.0 - p * p).max(0.0).sqrt(), 0.0]);
    (e1, e2)
}

/// Four-operator OU dephasing channel on two qubits at time t. Both parties
/// share (Γ, γ) unless `per_party` overrides them.
pub fn ou_kraus(
    t: f64,
    p: OuParams,
    per_party: Option<(OuParams, OuParams)>,
) -> Result<KrausChannel, ChannelError> {
    let (pa, pb) = per_party.unwrap_or((p, p));
    let decay_a = (-ou_f(t, pa)?).exp();
    let decay_b = (-ou_f(t, pb)?).exp();
    let (e1a, e2a) = dephasing_pair(decay_a);
    let (e1b, e2b) = dephasing_pair(decay_b);
    KrausChannel::new(vec![
        kron(&e1a, &e1b),
        kron(&e1a, &e2b),
        kron(&e2a, &e1b),
        kron(&e2a, &e2b),
    ])
}

/// ρ ↦ Σ_μ K_μ ρ K_μ†.
pub fn apply(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
    if ch.side() != rho.side() {
        return Err(ChannelError::DimensionMismatch { channel: ch.side(), state: rho.side() });
    }
    let mut out = CMatrix::zeros(rho.side(), rho.side());
    for k in ch.ops() {
        out = out.add(&k.matmul(rho.mat()).matmul(&k.dagger()));
    }
    Ok(DensityMatrix::new_unchecked(out.hermitize(), rho.dims()))
}

/// Closed-form Bell-diagonal evolution: (c1, c2, c3) ↦ (c1 e^{−2f}, c2 e^{−2f}, c3).
pub fn evolve_bell_diagonal(
    p0: BellDiagonalParams,
    t: f64,
    p: OuParams,
) -> Result<BellDiagonalParams, ChannelError> {
    let decay = (-2.0 * ou_f(t, p)?).exp();
    Ok(BellDiagonalParams::new(p0.c1 * decay, p0.c2 * decay, p0.c3)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_diagonal, bell_phi_plus, StateSampler};

    fn params() -> OuParams {
        OuParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn ou_f_limits_and_value() {
        let p = params();
        assert_eq!(ou_f(0.0, p).unwrap(), 0.0);
        // asymptote f(t)/t -> Γ/2
        let t = 1e4;
        assert!((ou_f(t, p).unwrap() / t - 0.5).abs() < 1e-3);
        // direct evaluation at t=1: f = e^{-1}/2
        let f1 = ou_f(1.0, p).unwrap();
        assert!((f1 - (-1f64).exp() / 2.0).abs() < 1e-15, "{f1}");
    }

    #[test]
    fn ou_f_series_matches_direct_branch() {
        let p = params();
        // at γt = 1e-6 the two branches must agree to 12 decimal digits; the
        // direct bracket loses ~6 digits to cancellation even with exp_m1, so
        // the comparison is absolute
        let x = 1e-6_f64;
        let series = p.big_gamma * x / 2.0 * (x / 2.0 - x * x / 6.0 + x * x * x / 24.0);
        let direct = p.big_gamma * x / 2.0 * (1.0 + (-x).exp_m1() / x);
        assert!((series - direct).abs() <= 1e-12, "{series} vs {direct}");
        assert!((ou_f(x, p).unwrap() - direct).abs() < 1e-25);
    }

    #[test]
    fn ou_f_rejects_negative_time() {
        assert!(matches!(ou_f(-0.1, params()), Err(ChannelError::NegativeTime(_))));
    }

    #[test]
    fn ou_f_nondecreasing() {
        let p = OuParams::new(0.7, 2.3).unwrap();
        let mut prev = 0.0;
        for i in 1..=100 {
            let f = ou_f(i as f64 * 0.1, p).unwrap();
            assert!(f >= prev);
            prev = f;
        }
    }

    #[test]
    fn kraus_identity_at_t_zero() {
        let ch = ou_kraus(0.0, params(), None).unwrap();
        let rho = bell_phi_plus();
        let out = apply(&ch, &rho).unwrap();
        assert!(out.mat().sub(rho.mat()).hs_norm() < 1e-14);
    }

    #[test]
    fn kraus_completeness_over_time() {
        let p = OuParams::new(1.7, 0.4).unwrap();
        for i in 0..50 {
            let ch = ou_kraus(i as f64 * 0.17, p, None).unwrap();
            assert!(ch.completeness_defect() <= 1e-12);
        }
    }

    #[test]
    fn full_dephasing_limit() {
        let ch = ou_kraus(1e6, params(), None).unwrap();
        let out = apply(&ch, &bell_phi_plus()).unwrap();
        let expect = CMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        assert!(out.mat().sub(&expect).hs_norm() < 1e-10);
    }

    #[test]
    fn kraus_matches_closed_form_on_bell_diagonal() {
        let mut s = StateSampler::new(21);
        let p = params();
        for _ in 0..20 {
            let c0 = s.random_bell_diagonal();
            let t = 3.0 * s.gen_f64();
            let via_kraus = apply(&ou_kraus(t, p, None).unwrap(), &bell_diagonal(c0).unwrap()).unwrap();
            let via_closed = bell_diagonal(evolve_bell_diagonal(c0, t, p).unwrap()).unwrap();
            assert!(via_kraus.mat().sub(via_closed.mat()).hs_norm() < 1e-12);
        }
    }

    #[test]
    fn evolution_asymptote_kills_c1_c2() {
        let c0 = BellDiagonalParams::new(1.0, 0.5, -0.5).unwrap();
        let ct = evolve_bell_diagonal(c0, 1e6, params()).unwrap();
        assert!(ct.c1.abs() < 1e-12 && ct.c2.abs() < 1e-12);
        assert_eq!(ct.c3, -0.5);
    }

    #[test]
    fn evolved_state_stays_bell_diagonal() {
        // off-structure coefficients Tr(ρ_t σ_i⊗σ_j), i≠j, stay zero
        let c0 = BellDiagonalParams::new(1.0, 1.0, -1.0).unwrap();
        let rho_t = apply(&ou_kraus(0.8, params(), None).unwrap(), &bell_diagonal(c0).unwrap()).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                if i == j {
                    continue;
                }
                let c = kron(&crate::linalg::pauli(i), &crate::linalg::pauli(j))
                    .matmul(rho_t.mat())
                    .trace()
                    .re;
                assert!(c.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn asymmetric_noise_per_party() {
        let pa = OuParams::new(2.0, 1.0).unwrap();
        let pb = OuParams::new(0.5, 1.0).unwrap();
        let ch = ou_kraus(1.0, params(), Some((pa, pb))).unwrap();
        assert!(ch.completeness_defect() <= 1e-12);
    }
}
