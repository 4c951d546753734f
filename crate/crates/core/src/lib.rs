//! Numerics for private quantum states under leakage.
//!
//! * [`qcore`]: dense operators, partial traces, entropies, fidelities.
//! * [`states`]: private bits, block states, privacy squeezing, twisted states.
//! * [`channels`]: Kraus channels, shield-qubit attacks, dynamics families.
//! * [`keyrates`]: key witnesses, Devetak–Winter rates, leakage bounds.
//! * [`nonmarkov`]: trace-norm trajectories and non-markovianity detection.
//!
//! Asymptotic quantities (distillable key, regularized relative entropy of
//! entanglement, smooth-entropy rates) are never computed directly. The crate
//! evaluates the closed-form bounds that sandwich them.

pub mod channels;
pub mod error;
pub mod keyrates;
pub mod nonmarkov;
pub mod qcore;
pub mod random;
pub mod states;

pub use error::{Error, Result};
pub use qcore::{DensityMatrix, Operator, PureState, SubsystemDims};
