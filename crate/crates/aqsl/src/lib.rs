//! Affinity-based geometric quantum discord, concurrence, the
//! Ornstein-Uhlenbeck dephasing channel and quantum-speed-limit bounds for
//! the decay and creation of quantum correlation.

pub mod channels;
pub mod config;
pub mod correlations;
pub mod linalg;
pub mod qsl;
pub mod runner;
pub mod states;
pub mod svg;
pub mod verify;

pub use channels::{apply, evolve_bell_diagonal, ou_f, ou_kraus, KrausChannel, OuParams};
pub use correlations::{
    affinity, affinity_discord_closed, affinity_discord_oracle, affinity_discord_pure,
    concurrence, correlation_report, hs_discord, measure_a, BlochMeasurement, CorrelationReport,
};
pub use linalg::{
    herm_eig, kron, matrix_sqrt_psd, norm, partial_trace, singular_values, CMatrix, HermEigen,
    NormKind, Party,
};
pub use qsl::{delta_q, lambda_averages, sqrt_rate, tau_qsl, QslMode, QslProfile};
pub use states::{
    bell_diagonal, bell_phi_plus, classical_quantum, pure_state, schmidt, BellDiagonalParams,
    DensityMatrix, SchmidtDecomposition, StateSampler,
};
