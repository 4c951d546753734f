use crate::error::{Error, Result};
use crate::qcore::entropy::check_disjoint;
use crate::qcore::{cond_mutual_information, DensityMatrix};

/// `log₂ ‖ρ^{T_B}‖₁` across the cut `a | b`, which must cover every factor.
pub fn negativity(rho: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<f64> {
    check_disjoint(&[a, b])?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("both sides of the cut must be nonempty"));
    }
    for l in rho.dims().labels() {
        if !a.contains(&l) && !b.contains(&l) {
            return Err(Error::invalid(format!("factor `{l}` is on neither side of the cut")));
        }
    }
    for l in a.iter().chain(b) {
        rho.dims().position(l)?;
    }
    Ok(rho.op().partial_transpose(b)?.trace_norm().log2().max(0.0))
}

/// `½ I(A:B|E)` for one given extension; an upper bound on the squashed
/// entanglement of `ρ_AB`.
pub fn squashed_bound(rho_ext: &DensityMatrix, a: &[&str], b: &[&str], e: &[&str]) -> Result<f64> {
    Ok(0.5 * cond_mutual_information(rho_ext, a, b, e)?.max(0.0))
}

/// `δ = √(1 - 2^{-I(a:BE|A)})`, the distance implied by the fidelity of
/// recovery lower bound. `I` is clamped at 0.
pub fn recovery_delta(rho: &DensityMatrix, a: &[&str], be: &[&str], big_a: &[&str]) -> Result<f64> {
    let i = cond_mutual_information(rho, a, be, big_a)?;
    Ok(delta_from_cmi(i))
}

pub fn delta_from_cmi(i: f64) -> f64 {
    (1.0 - (-i.max(0.0)).exp2()).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::SubsystemDims;
    use crate::states::bell_state;

    #[test]
    fn negativity_examples() {
        assert!((negativity(&bell_state(), &["A"], &["B"]).unwrap() - 1.0).abs() < 1e-12);
        let sep = DensityMatrix::maximally_mixed(SubsystemDims::new([("A", 2), ("B", 2)]).unwrap());
        assert!(negativity(&sep, &["A"], &["B"]).unwrap().abs() < 1e-12);
        assert!(negativity(&sep, &["A"], &[]).is_err());
    }

    #[test]
    fn squashed_of_bell() {
        let ext = bell_state().tensor(&DensityMatrix::basis("E", 1, 0)).unwrap();
        assert!((squashed_bound(&ext, &["A"], &["B"], &["E"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_limits() {
        assert_eq!(delta_from_cmi(0.0), 0.0);
        assert_eq!(delta_from_cmi(-1e-10), 0.0);
        assert!((delta_from_cmi(1.0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((delta_from_cmi(f64::INFINITY) - 1.0).abs() < 1e-15);
    }
}
