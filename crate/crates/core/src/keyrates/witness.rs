use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::qcore::tol::TOL_TRACE;
use crate::qcore::{binary_entropy, Operator};

/// `1 - h(½ + c)` for a corner norm `c ∈ [0, ½]`.
pub fn witness_from_norm(c: f64) -> Result<f64> {
    if !(-TOL_TRACE..=0.5 + TOL_TRACE).contains(&c) {
        return Err(Error::OutOfRange {
            name: "c",
            value: c,
            range: "[0, 1/2]",
        });
    }
    Ok((1.0 - binary_entropy(0.5 + c.clamp(0.0, 0.5))?).clamp(0.0, 1.0))
}

/// `‖(Λ ⊗ 1)X‖₁` with Λ on the first factor of `x`.
pub fn attacked_witness_norm(x: &Operator, ch: &KrausChannel) -> Result<f64> {
    if x.dims().len() != 2 {
        return Err(Error::invalid(format!("X must have two shield factors, got {}", x.dims())));
    }
    let norm = x.trace_norm();
    if norm > 0.5 + TOL_TRACE {
        return Err(Error::TraceNormTooLarge { norm });
    }
    let target = x.dims().factors()[0].label.clone();
    Ok(ch.apply_on_factor_op(x, &target)?.trace_norm())
}

/// Distillable key of the privacy-squeezed attacked state,
/// `1 - h(½ + ‖(Λ ⊗ 1)X‖₁)`.
pub fn psq_key_witness(x: &Operator, ch: &KrausChannel) -> Result<f64> {
    witness_from_norm(attacked_witness_norm(x, ch)?.min(0.5))
}

/// Relative entropy of entanglement of a Bell-diagonal state with weights
/// `q`: `1 - h(max q)` when `max q > ½`, else 0.
pub fn bell_diagonal_er(q: &[f64]) -> Result<f64> {
    if q.len() != 4 {
        return Err(Error::invalid(format!("expected 4 Bell weights, got {}", q.len())));
    }
    if q.iter().any(|&x| x < -TOL_TRACE) {
        return Err(Error::invalid("Bell weights must be nonnegative"));
    }
    let s: f64 = q.iter().sum();
    if (s - 1.0).abs() > TOL_TRACE {
        return Err(Error::TraceNotOne(s));
    }
    let p_max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if p_max <= 0.5 {
        return Ok(0.0);
    }
    Ok(1.0 - binary_entropy(p_max.min(1.0))?)
}
