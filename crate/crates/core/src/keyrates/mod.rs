//! Key witnesses, Devetak–Winter rates for fixed measurements, relative
//! entropy bounds under attacks, leakage bounds and randomness regions.
//!
//! Nothing here maximizes over measurements or separable states. Every
//! function evaluates a given strategy or a closed-form bound.

pub mod attack;
pub mod dw;
pub mod leakage;
pub mod measures;
pub mod randomness;
pub mod regions;
pub mod witness;

pub use attack::{default_p_grid, er_upper_bound_attack, AttackPoint, AttackSetup, ErBound};
pub use dw::{dw_rate, CcqState, Povm};
pub use leakage::{leakage_bounds, Applicability, BoundEntry, LeakageBoundReport, LeakageInputs};
pub use measures::{negativity, recovery_delta, squashed_bound};
pub use randomness::{randomness_rates, RandomnessRates};
pub use regions::{region_grid, region_lhs, RegionGrid, RegionKind};
pub use witness::{attacked_witness_norm, bell_diagonal_er, psq_key_witness, witness_from_norm};
