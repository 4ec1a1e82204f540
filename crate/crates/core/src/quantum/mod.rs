//! Finite-dimensional quantum realizations: the closed-form two-qubit
//! model, general Born-rule evaluation, hybrid mixtures and their
//! direct-sum embedding.

pub mod general;
pub mod hybrid;
pub mod linalg;
pub mod qubit;

pub use general::{born_box, effective_bipartite_dimension, Effects, GeneralRealization};
pub use hybrid::{direct_sum, hybrid_box, Branch, HybridRealization};
pub use linalg::CMat;
pub use qubit::{
    analytic_correlators, normalize_angles, qubit_box_analytic, validate_povm, BinaryMeasurement,
    PovmBound, PovmViolation, QubitRealization, SchmidtState,
};
