use super::dims::SubsystemDims;
use super::linalg::{self, CVector};
use super::state::{DensityMatrix, PureState};
use crate::error::{Error, Result};

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    Ok(())
}

/// `V_K diag(√λ_K)` over the eigenvalues above numerical noise, so that
/// `B B† = ρ` up to the dropped part.
fn sqrt_factor(m: &linalg::CMatrix) -> linalg::CMatrix {
    let (vals, vecs) = linalg::hermitian_eigen(m);
    let cut = 1e-14 * vals.last().copied().unwrap_or(0.0).max(1.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > cut).collect();
    linalg::CMatrix::from_fn(m.nrows(), keep.len(), |i, j| vecs[(i, keep[j])] * linalg::r(vals[keep[j]].sqrt()))
}

/// Non-squared fidelity `tr sqrt(sqrt(ρ) σ sqrt(ρ)) = ‖√ρ √σ‖₁`, computed as
/// the singular-value sum of `B_ρ† B_σ` so that rank-deficient inputs do not
/// pick up square-rooted round-off.
pub fn root_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let b = sqrt_factor(rho.matrix()).adjoint() * sqrt_factor(sigma.matrix());
    let f: f64 = linalg::singular_values(&b).iter().sum();
    Ok(f.min(1.0))
}

/// Uhlmann fidelity, squared convention: `(tr sqrt(sqrt(ρ) σ sqrt(ρ)))²`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(root_fidelity(rho, sigma)?.powi(2))
}

/// Purifications of ρ and σ on a common ancilla `R` (dimension = dim ρ)
/// whose overlap attains Uhlmann's bound `|⟨ψ|φ⟩| = ‖√ρ√σ‖₁`.
///
/// `|ψ⟩ = (√ρ ⊗ 1)Σ|ii⟩`, `|φ⟩ = (√σ W ⊗ 1)Σ|ii⟩` with `W` the polar
/// unitary of `√ρ√σ`.
pub fn uhlmann_purifications(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<(PureState, PureState)> {
    check_dims(rho, sigma)?;
    let n = rho.dim();
    let sr = linalg::sqrt_psd(rho.matrix());
    let ss = linalg::sqrt_psd(sigma.matrix());
    let svd = (&sr * &ss).svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let w = vt.adjoint() * u.adjoint();
    let phi_mat = &ss * w;
    let flatten = |m: &linalg::CMatrix| CVector::from_iterator(n * n, (0..n).flat_map(|a| (0..n).map(move |i| (a, i))).map(|(a, i)| m[(a, i)]));
    let mut label = String::from("R");
    while rho.dims().contains(&label) {
        label.push('\'');
    }
    let dims = rho.dims().concat(&SubsystemDims::single(label, n))?;
    Ok((
        PureState::normalized(flatten(&sr), dims.clone())?,
        PureState::normalized(flatten(&phi_mat), dims)?,
    ))
}
