//! The nonlinearity coefficient tensor, its symmetry and null-condition
//! machinery, the quadratic and trilinear forms built from it, and the
//! perturbed density.

mod density;
pub(crate) mod nonlinear;
mod null;
mod sampler;
mod tensor;

pub use density::{density_assumption_check, density_h_lambda_norm, DensityField};
pub use nonlinear::{apply_n, apply_n_tilde, NonlinearForm};
pub use null::{
    constraint_matrix, make_null_tensor, make_null_tensor_from, verification_sampler,
    ConstraintBasis, CONSTRUCTION_DIRECTIONS, CONSTRUCTION_PAIRS, NULL_TOLERANCE,
};
pub use sampler::SpherePairSampler;
pub use tensor::{flat, CoefTensor, TENSOR_LEN, TENSOR_SCHEMA_VERSION};
