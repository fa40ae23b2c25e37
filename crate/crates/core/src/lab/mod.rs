//! Skew-determinantal measures `mu(S) ~ det(A_S)` on subsets and the
//! linear-algebra checks around the flip-repair kernel.

mod covering;
pub mod exterior;
mod hurwitz;
mod identities;
mod lsi;
mod matrix;
mod measure;

pub use covering::{covering_coupling, Coupling};
pub use exterior::ExcitationBasis;
pub use hurwitz::hurwitz_det;
pub use identities::{
    clifford_frame_error, conditioned_vectors, deletion_identity_error, number_domination_min_eig,
    overlapping_pfaffian_max, remove_coordinate, row_isotropy, sqrt_representation_error,
    ConditionedVectors, RowIsotropyReport,
};
pub use lsi::{
    dirichlet_form, entropy_of_square, flat_lsi_constant, flat_lsi_sample, random_test_function, LsiSample,
};
pub use matrix::SkewMatrix;
pub use measure::{
    exact_kernel, intermediate_measure, spectral_gap, subset_weights, ExactKernel, SubsetWeightTable,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("matrix is not skew-symmetric at ({i}, {j})")]
    NotSkew { i: usize, j: usize },
    #[error("dimension {n} exceeds the limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("measure has empty support")]
    EmptySupport,
    #[error("identity violated: {0}")]
    InvariantViolation(String),
}
