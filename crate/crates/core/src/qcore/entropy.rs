//! Entropic quantities. All logarithms are base 2, all results in bits.

use super::linalg;
use super::state::DensityMatrix;
use super::tol::TOL_PSD;
use crate::error::{Error, Result};

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy of a probability vector (zeros contribute nothing).
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

/// `h(x) = -x log x - (1-x) log(1-x)`. Arguments within 1e-9 of the unit
/// interval are clamped onto it.
pub fn binary_entropy(x: f64) -> Result<f64> {
    const SLACK: f64 = 1e-9;
    if !(-SLACK..=1.0 + SLACK).contains(&x) || x.is_nan() {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            range: "[0, 1]",
        });
    }
    let x = x.clamp(0.0, 1.0);
    Ok(-xlog2x(x) - xlog2x(1.0 - x))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.eigenvalues())
}

/// Entropy of the marginal on `labels` (empty set gives 0).
pub fn entropy_of(rho: &DensityMatrix, labels: &[&str]) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    Ok(von_neumann_entropy(&rho.reduce(labels)?))
}

/// `S(A|B) = S(AB) - S(B)`.
pub fn conditional_entropy(rho: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<f64> {
    check_disjoint(&[a, b])?;
    let ab: Vec<&str> = a.iter().chain(b).copied().collect();
    Ok(entropy_of(rho, &ab)? - entropy_of(rho, b)?)
}

/// `D(ρ‖σ) = tr ρ log ρ - tr ρ log σ`; `+∞` when the support of ρ is not
/// contained in the support of σ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let (vals, vecs) = linalg::hermitian_eigen(sigma.matrix());
    let weights = diagonal_weights(rho, &vecs);
    Ok(relative_entropy_in_basis(
        -von_neumann_entropy(rho),
        &weights,
        &vals,
    ))
}

/// `⟨v_i|ρ|v_i⟩` for every column `v_i` of `basis`.
pub(crate) fn diagonal_weights(rho: &DensityMatrix, basis: &linalg::CMatrix) -> Vec<f64> {
    let rv = rho.matrix() * basis;
    (0..basis.ncols())
        .map(|k| basis.column(k).dotc(&rv.column(k)).re)
        .collect()
}

/// Relative entropy given `-S(ρ)`, the weights of ρ on σ's eigenbasis and
/// σ's eigenvalues.
pub(crate) fn relative_entropy_in_basis(neg_entropy: f64, weights: &[f64], sigma_vals: &[f64]) -> f64 {
    let mut cross = 0.0;
    for (&w, &s) in weights.iter().zip(sigma_vals) {
        if s <= TOL_PSD {
            if w > TOL_PSD {
                return f64::INFINITY;
            }
            continue;
        }
        cross += w * s.log2();
    }
    (neg_entropy - cross).max(0.0)
}

pub(crate) fn check_disjoint(sets: &[&[&str]]) -> Result<()> {
    for (i, s) in sets.iter().enumerate() {
        for (k, l) in s.iter().enumerate() {
            if s[..k].contains(l) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            for t in &sets[i + 1..] {
                if t.contains(l) {
                    return Err(Error::OverlappingLabels(l.to_string()));
                }
            }
        }
    }
    Ok(())
}

/// `I(a:B|C) = S(aC) + S(BC) - S(C) - S(aBC)`. Factors outside the three
/// sets are traced out first; `c` may be empty (plain mutual information).
pub fn cond_mutual_information(
    rho: &DensityMatrix,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<f64> {
    check_disjoint(&[a, b, c])?;
    let all: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
    let rho = rho.reduce(&all)?;
    let join = |x: &[&str], y: &[&str]| -> Vec<String> {
        x.iter().chain(y).map(|s| s.to_string()).collect()
    };
    let s = |labels: Vec<String>| -> Result<f64> {
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        entropy_of(&rho, &refs)
    };
    Ok(s(join(a, c))? + s(join(b, c))? - s(join(c, &[]))? - s(all.iter().map(|x| x.to_string()).collect())?)
}

pub fn mutual_information(rho: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<f64> {
    cond_mutual_information(rho, a, b, &[])
}
