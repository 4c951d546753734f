//! Dense linear algebra and information-theoretic primitives.

pub mod dims;
pub mod entropy;
pub mod fidelity;
pub mod linalg;
pub mod operator;
pub mod state;
pub mod tol;

pub use dims::{Factor, SubsystemDims};
pub use entropy::{
    binary_entropy, cond_mutual_information, conditional_entropy, entropy_of, mutual_information,
    relative_entropy, shannon_entropy, von_neumann_entropy,
};
pub use fidelity::{root_fidelity, uhlmann_fidelity, uhlmann_purifications};
pub use operator::{tensor_product, trace_norm, Operator};
pub use state::{DensityMatrix, PureState};
pub use tol::Tolerances;

/// Free-function form of [`Operator::partial_trace`].
pub fn partial_trace(op: &Operator, keep: &[&str]) -> crate::Result<Operator> {
    op.partial_trace(keep)
}

/// Free-function form of [`Operator::partial_transpose`].
pub fn partial_transpose(op: &Operator, sys: &[&str]) -> crate::Result<Operator> {
    op.partial_transpose(sys)
}

/// Free-function form of [`DensityMatrix::purify`].
pub fn purify(rho: &DensityMatrix) -> PureState {
    rho.purify()
}
