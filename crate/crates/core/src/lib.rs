//! Multipartite correlation measures built from the mutual information of
//! local measurements in mutually unbiased bases, with certifiers for the
//! maximal value and entanglement-detection thresholds.
//!
//! Conventions: sites are 0-based, composite indices are row-major with
//! site 0 most significant, and all entropies are in bits.

pub mod corr;
pub mod detect;
pub mod error;
pub mod linalg;
pub mod maxcheck;
pub mod mub;
pub mod optim;
pub mod qstate;
pub mod states;

pub use corr::{
    c_n_given, c_n_mum, c_n_optimize, holevo_chi, j_n_optimize, j_n_value, joint_distribution,
    mutual_information_cut, q_basis, CorrelationReport, MeasurementSetting, OptimizeConfig,
};
pub use detect::{
    bisep_threshold, f_bound, ghz33_noise_cn, mum_thresholds, noise_scan, noise_scan_state, p_max,
    r_quantity, sep_threshold, DetectionVerdict, UncertaintyBound,
};
pub use error::{Error, Result};
pub use linalg::{Operator, C64};
pub use maxcheck::{certify_theorem2, check_mixed_marginals, lemma1_check, lemma2_necessary_check};
pub use mub::{
    build_mum_set, gen_pauli, pauli_eigenbasis, rotate_mub_set, standard_mub_set, Basis, MubSet,
    MumSet, PauliIndex,
};
pub use qstate::{
    apply_local, partial_trace, shannon_entropy, tensor_product, von_neumann_entropy,
    DensityOperator, ProbDist, State, StateVector, SubsystemLayout,
};
pub use states::{catalog_state, StateSpec};
