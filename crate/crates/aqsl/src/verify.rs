//! Seeded verification suites: each one exercises a stated invariant over
//! randomized inputs and reports the worst residual against its threshold.
//! The `verify` CLI command prints these; the acceptance tests assert them.

use crate::channels::{apply, evolve_bell_diagonal, ou_f, ou_kraus, OuParams};
use crate::correlations::{
    affinity_discord_closed, affinity_discord_oracle, affinity_discord_pure, concurrence,
    hs_discord, measure_a, BlochMeasurement, SQRT_CLIP,
};
use crate::linalg::{herm_eig, kron, matrix_sqrt_psd, norm, CMatrix, NormKind, Party};
use crate::qsl::{default_h, tau_qsl, QslMode};
use crate::states::{
    bell_diagonal, classical_quantum, schmidt, BellDiagonalParams, DensityMatrix, StateSampler,
};

/// Outcome of one verification suite.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub worst_residual: f64,
    pub threshold: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Suite {
    name: &'static str,
    threshold: f64,
    cases: usize,
    failures: usize,
    worst: f64,
}

impl Suite {
    fn new(name: &'static str, threshold: f64) -> Self {
        Self { name, threshold, cases: 0, failures: 0, worst: 0.0 }
    }

    fn check(&mut self, residual: f64) {
        self.cases += 1;
        if residual.is_nan() || residual > self.threshold {
            self.failures += 1;
        }
        if residual > self.worst || residual.is_nan() {
            self.worst = residual;
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            worst_residual: self.worst,
            threshold: self.threshold,
        }
    }
}

/// Zero discord on product and classical-quantum states.
pub fn suite_zero_discord(seed: u64) -> SuiteResult {
    let mut s = StateSampler::new(seed ^ 0x01);
    let mut suite = Suite::new("zero-discord (product + classical-quantum)", 1e-7);
    for _ in 0..100 {
        let a = s.random_mixed((1, 2), 2);
        let b = s.random_mixed((1, 2), 2);
        let rho = DensityMatrix::new(kron(a.mat(), b.mat()), (2, 2)).unwrap();
        suite.check(affinity_discord_closed(&rho).unwrap().value.abs());
    }
    for _ in 0..100 {
        let u = s.random_unitary(2);
        let basis: Vec<Vec<num_complex::Complex64>> = (0..2)
            .map(|k| (0..2).map(|i| u.get(i, k)).collect())
            .collect();
        let p0 = 0.2 + 0.6 * s.gen_f64();
        let sig0 = s.random_mixed((1, 2), 2);
        let sig1 = s.random_mixed((1, 2), 2);
        let rho = classical_quantum(&[p0, 1.0 - p0], &basis, &[sig0, sig1]).unwrap();
        suite.check(affinity_discord_closed(&rho).unwrap().value.abs());
    }
    suite.finish()
}

/// Local unitary invariance of the affinity discord.
pub fn suite_local_unitary_invariance(seed: u64) -> SuiteResult {
    let mut s = StateSampler::new(seed ^ 0x02);
    let mut suite = Suite::new("local-unitary invariance", 1e-8);
    for _ in 0..100 {
        let rho = s.random_mixed((2, 2), 3);
        let u = s.random_unitary(2);
        let v = s.random_unitary(2);
        let uv = kron(&u, &v);
        let rotated = DensityMatrix::new(
            uv.matmul(rho.mat()).matmul(&uv.dagger()).hermitize(),
            (2, 2),
        )
        .unwrap();
        let d1 = affinity_discord_closed(&rho).unwrap().value;
        let d2 = affinity_discord_closed(&rotated).unwrap().value;
        suite.check((d1 - d2).abs());
    }
    suite.finish()
}

/// Local ancilla invariance of the affinity discord, with the simultaneous
/// Tr(ρ_c²) scaling of the Hilbert-Schmidt discord as the contrast.
pub fn suite_local_ancilla(seed: u64) -> (SuiteResult, SuiteResult) {
    let mut s = StateSampler::new(seed ^ 0x03);
    let mut aff = Suite::new("local-ancilla invariance (affinity)", 1e-7);
    let mut hs = Suite::new("local-ancilla Tr(ρ_c²) scaling (Hilbert-Schmidt)", 1e-5);
    for _ in 0..50 {
        let rho = s.random_mixed((2, 2), 2);
        let ancilla = s.random_mixed((1, 2), 2);
        let extended = rho.with_ancilla(&ancilla);
        let d1 = affinity_discord_closed(&rho).unwrap().value;
        let d2 = affinity_discord_closed(&extended).unwrap().value;
        aff.check((d1 - d2).abs());

        let purity = ancilla.purity();
        let h1 = hs_discord(&rho, 600, 40).unwrap();
        let h2 = hs_discord(&extended, 600, 40).unwrap();
        hs.check((h2 - h1 * purity).abs());
    }
    (aff.finish(), hs.finish())
}

/// Closed formula equals the measurement-sweep oracle.
pub fn suite_oracle_equivalence(seed: u64, n_states: usize) -> SuiteResult {
    let mut s = StateSampler::new(seed ^ 0x04);
    let mut suite = Suite::new("closed formula vs oracle", 1e-4);
    for _ in 0..n_states {
        let rho = s.random_mixed((2, 2), 4);
        let closed = affinity_discord_closed(&rho).unwrap().value;
        let (oracle, _) = affinity_discord_oracle(&rho, 2000, 40).unwrap();
        suite.check((closed - oracle).abs());
    }
    suite.finish()
}

/// Pure-state Schmidt formula equals the closed formula.
pub fn suite_pure_state_formula(seed: u64) -> SuiteResult {
    let mut s = StateSampler::new(seed ^ 0x05);
    let mut suite = Suite::new("pure-state formula vs closed formula", 1e-9);
    for _ in 0..100 {
        let psi = s.random_pure_vector(4);
        let sd = schmidt(&psi, (2, 2)).unwrap();
        let via_schmidt = affinity_discord_pure(&sd);
        let rho = crate::states::pure_state(&psi, (2, 2)).unwrap();
        let via_closed = affinity_discord_closed(&rho).unwrap().value;
        suite.check((via_schmidt - via_closed).abs());
    }
    suite.finish()
}

/// Kraus completeness and closed-form Bell-diagonal evolution equivalence.
pub fn suite_channel(seed: u64) -> SuiteResult {
    let mut s = StateSampler::new(seed ^ 0x06);
    let mut suite = Suite::new("OU channel: completeness + closed-form evolution", 1e-12);
    let p = OuParams::new(1.0, 1.0).unwrap();
    for i in 0..50 {
        let t = i as f64 * 0.11;
        let ch = ou_kraus(t, p, None).unwrap();
        suite.check(ch.completeness_defect());
    }
    for _ in 0..100 {
        let c0 = s.random_bell_diagonal();
        let gp = OuParams::new(0.2 + 3.0 * s.gen_f64(), 0.2 + 3.0 * s.gen_f64()).unwrap();
        let t = 4.0 * s.gen_f64();
        let via_kraus = apply(&ou_kraus(t, gp, None).unwrap(), &bell_diagonal(c0).unwrap()).unwrap();
        let via_closed = bell_diagonal(evolve_bell_diagonal(c0, t, gp).unwrap()).unwrap();
        suite.check(via_kraus.mat().sub(via_closed.mat()).hs_norm());
    }
    // the series branch must agree with the direct formula at γt = 1e-6 to
    // 12 decimal digits; the comparison is absolute because the direct
    // bracket loses ~6 digits to cancellation even with exp_m1
    let x = 1e-6_f64;
    let direct = 0.5 * x * (1.0 + (-x).exp_m1() / x);
    let series = 0.5 * x * (x / 2.0 - x * x / 6.0 + x * x * x / 24.0);
    suite.check((series - direct).abs());
    let _ = ou_f(x, OuParams::new(1.0, 1.0).unwrap()).unwrap();
    suite.finish()
}

/// Norm ordering op ≤ hs ≤ tr on random matrices.
pub fn suite_norm_ordering(seed: u64) -> SuiteResult {
    let mut s = StateSampler::new(seed ^ 0x07);
    let mut suite = Suite::new("norm ordering op <= hs <= tr", 1e-10);
    for _ in 0..1000 {
        let dim = 2 + (s.gen_f64() * 3.0) as usize;
        let u = s.random_unitary(dim);
        let v = s.random_unitary(dim);
        let a = u.add(&v.scale_re(s.gen_f64() * 2.0 - 1.0));
        let op = norm(&a, NormKind::Op).unwrap();
        let hs = norm(&a, NormKind::Hs).unwrap();
        let tr = norm(&a, NormKind::Tr).unwrap();
        suite.check((op - hs).max(hs - tr).max(0.0));
    }
    suite.finish()
}

/// Spectral kernel invariants: reconstruction and square-root consistency.
pub fn suite_spectral(seed: u64) -> SuiteResult {
    let mut s = StateSampler::new(seed ^ 0x08);
    let mut suite = Suite::new("eigendecomposition + psd square root", 1e-8);
    for _ in 0..100 {
        let dim = 2 + (s.gen_f64() * 7.0) as usize; // 2..8
        let u = s.random_unitary(dim);
        let mut a = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            let l = s.gen_f64() * 2.0;
            for i in 0..dim {
                for j in 0..dim {
                    let add = u.get(i, k) * u.get(j, k).conj() * l;
                    a.set(i, j, a.get(i, j) + add);
                }
            }
        }
        let a = a.hermitize();
        let eig = herm_eig(&a, 1e-8).unwrap();
        let recon = eig.apply_spectral(|l| l);
        suite.check(recon.sub(&a).hs_norm() / a.hs_norm().max(1.0));
        let sq = matrix_sqrt_psd(&a, 1e-8).unwrap();
        suite.check(sq.matmul(&sq).sub(&a).hs_norm());
    }
    suite.finish()
}

/// Measurement map sanity: idempotence, trace preservation and commutation
/// with the matrix square root.
pub fn suite_measurement(seed: u64) -> SuiteResult {
    let mut s = StateSampler::new(seed ^ 0x09);
    let mut suite = Suite::new("projective measurement idempotence + sqrt commutation", 1e-10);
    for _ in 0..100 {
        let rho = s.random_mixed((2, 2), 4);
        let m = BlochMeasurement::from_angles(
            std::f64::consts::PI * s.gen_f64(),
            2.0 * std::f64::consts::PI * s.gen_f64(),
        );
        let once = measure_a(&rho, &m).unwrap();
        let twice = measure_a(&once, &m).unwrap();
        suite.check(once.mat().sub(twice.mat()).hs_norm());
        suite.check((once.mat().trace().re - 1.0).abs());
        // sqrt exchanges with the measurement on states that commute with
        // the projectors, so test on the post-measurement state; √σ is not
        // a state (trace != 1) but measure_a only needs the dims
        let a = measure_a(
            &DensityMatrix::new_unchecked(
                matrix_sqrt_psd(once.mat(), SQRT_CLIP).unwrap(),
                once.dims(),
            ),
            &m,
        )
        .unwrap();
        let b = matrix_sqrt_psd(twice.mat(), SQRT_CLIP).unwrap();
        suite.check(a.mat().sub(&b).hs_norm());
    }
    suite.finish()
}

/// Partial trace linearity and trace preservation.
pub fn suite_partial_trace(seed: u64) -> SuiteResult {
    let mut s = StateSampler::new(seed ^ 0x0a);
    let mut suite = Suite::new("partial trace linearity + trace chain", 1e-12);
    for _ in 0..100 {
        let rho = s.random_mixed((2, 3), 3);
        let red = rho.marginal(Party::A).unwrap();
        suite.check((red.trace().re - 1.0).abs());
        let sigma = s.random_mixed((2, 3), 2);
        let alpha = s.gen_f64();
        let mix = rho.mat().scale_re(alpha).add(&sigma.mat().scale_re(1.0 - alpha));
        let lhs = crate::linalg::partial_trace(&mix, (2, 3), Party::B).unwrap();
        let rhs = rho
            .marginal(Party::B)
            .unwrap()
            .scale_re(alpha)
            .add(&sigma.marginal(Party::B).unwrap().scale_re(1.0 - alpha));
        suite.check(lhs.sub(&rhs).hs_norm());
    }
    suite.finish()
}

/// Concurrence spin-flip formula vs the Bell-diagonal closed form.
pub fn suite_concurrence(seed: u64) -> SuiteResult {
    let mut s = StateSampler::new(seed ^ 0x0b);
    let mut suite = Suite::new("concurrence vs Bell-diagonal closed form", 1e-10);
    for _ in 0..100 {
        let p = s.random_bell_diagonal();
        let rho = bell_diagonal(p).unwrap();
        let lam_max = p.eigenvalues().into_iter().fold(f64::NEG_INFINITY, f64::max);
        let expect = (2.0 * lam_max - 1.0).max(0.0);
        suite.check((concurrence(&rho).unwrap() - expect).abs());
    }
    suite.finish()
}

/// QSL bound validity on the OU evolution of (1,1,−1).
pub fn suite_qsl_bound(_seed: u64) -> SuiteResult {
    let mut suite = Suite::new("QSL bound validity tau_qc <= tau", 0.02);
    let p = OuParams::new(1.0, 1.0).unwrap();
    let c0 = BellDiagonalParams::new(1.0, 1.0, -1.0).unwrap();
    let rho0 = bell_diagonal(c0).unwrap();
    let traj = move |t: f64| bell_diagonal(evolve_bell_diagonal(c0, t, p).unwrap()).unwrap();
    for i in 0..20 {
        let tau = 0.1 + (5.0 - 0.1) * i as f64 / 19.0;
        let prof = tau_qsl(&rho0, &traj, tau, QslMode::Decay, 200, default_h(tau, 200)).unwrap();
        // residual is the relative bound violation, negative slack clamps to 0
        suite.check(((prof.tau_qc - tau) / tau).max(0.0));
    }
    suite.finish()
}

/// Runs every suite with sub-seeds derived from `seed`.
pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    let mut out = Vec::new();
    out.push(suite_zero_discord(seed));
    out.push(suite_local_unitary_invariance(seed));
    let (a, b) = suite_local_ancilla(seed);
    out.push(a);
    out.push(b);
    out.push(suite_oracle_equivalence(seed, 200));
    out.push(suite_pure_state_formula(seed));
    out.push(suite_channel(seed));
    out.push(suite_norm_ordering(seed));
    out.push(suite_spectral(seed));
    out.push(suite_measurement(seed));
    out.push(suite_partial_trace(seed));
    out.push(suite_concurrence(seed));
    out.push(suite_qsl_bound(seed));
    out
}
