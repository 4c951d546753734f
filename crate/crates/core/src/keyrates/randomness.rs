use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::entropy::check_disjoint;
use crate::qcore::{entropy_of, DensityMatrix};

/// Corner values of a private-randomness rate region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandomnessRates {
    pub setting: u8,
    pub r_a_max: f64,
    pub r_b_max: f64,
    pub r_sum_max: f64,
}

/// Rate region of distributed private randomness for `ρ_AB`:
///
/// 1. no noise, no communication: `R_A ≤ log|A| - [S(A|B)]₊`
/// 2. free noise, no communication: `R_A ≤ log|A| - S(A|B)`
/// 3. free noise and communication: `R_A ≤ R_G`
/// 4. free communication, no noise: `R_A ≤ log|AB| - max{S(B), S(AB)}`
///
/// and symmetrically for B; in every setting `R_A + R_B ≤ R_G` with
/// `R_G = log|A| + log|B| - S(AB)`.
pub fn randomness_rates(rho: &DensityMatrix, a: &[&str], b: &[&str], setting: u8) -> Result<RandomnessRates> {
    if !(1..=4).contains(&setting) {
        return Err(Error::OutOfRange {
            name: "setting",
            value: setting as f64,
            range: "{1, 2, 3, 4}",
        });
    }
    check_disjoint(&[a, b])?;
    let dims = rho.dims();
    let log_a = (dims.dim_of_all(a)? as f64).log2();
    let log_b = (dims.dim_of_all(b)? as f64).log2();
    let ab: Vec<&str> = a.iter().chain(b).copied().collect();
    let s_a = entropy_of(rho, a)?;
    let s_b = entropy_of(rho, b)?;
    let s_ab = entropy_of(rho, &ab)?;
    let r_g = log_a + log_b - s_ab;
    let (s_a_given_b, s_b_given_a) = (s_ab - s_b, s_ab - s_a);
    let (r_a, r_b) = match setting {
        1 => (log_a - s_a_given_b.max(0.0), log_b - s_b_given_a.max(0.0)),
        2 => (log_a - s_a_given_b, log_b - s_b_given_a),
        3 => (r_g, r_g),
        _ => (log_a + log_b - s_b.max(s_ab), log_a + log_b - s_a.max(s_ab)),
    };
    Ok(RandomnessRates {
        setting,
        r_a_max: r_a,
        r_b_max: r_b,
        r_sum_max: r_g,
    })
}
