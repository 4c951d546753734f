use num_complex::Complex64;

use super::dims::SubsystemDims;
use super::linalg::{self, CMatrix, CVector};
use super::operator::Operator;
use super::tol::{TOL_HERM, TOL_PSD, TOL_TRACE};
use crate::error::{Error, Result};

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Validate `op` as a quantum state. The stored matrix is hermitized.
    pub fn new(op: Operator) -> Result<Self> {
        let defect = op.hermiticity_defect();
        if defect > TOL_HERM {
            return Err(Error::NotHermitian(defect));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::TraceNotOne(tr.re));
        }
        let min = linalg::hermitian_eigenvalues(op.matrix())
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -TOL_PSD {
            return Err(Error::NotPositive(min));
        }
        Ok(Self::from_trusted(op))
    }

    pub fn from_matrix(mat: CMatrix, dims: SubsystemDims) -> Result<Self> {
        Self::new(Operator::new(mat, dims)?)
    }

    /// For outputs of maps already known to preserve states (partial traces,
    /// CPTP maps, convex mixtures). Only hermitizes.
    pub(crate) fn from_trusted(op: Operator) -> Self {
        let dims = op.dims().clone();
        let mat = linalg::hermitize(op.matrix());
        Self {
            op: Operator::new(mat, dims).expect("layout unchanged"),
        }
    }

    pub fn maximally_mixed(dims: SubsystemDims) -> Self {
        let n = dims.total() as f64;
        Self {
            op: Operator::identity(dims).scale(1.0 / n),
        }
    }

    /// Diagonal state in the computational basis.
    pub fn diagonal(probs: &[f64], dims: SubsystemDims) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| linalg::r(p)),
        ));
        Self::from_matrix(m, dims)
    }

    /// |k⟩⟨k| on a single factor.
    pub fn basis(label: &str, dim: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = linalg::ONE;
        Self::from_trusted(Operator::on(label, m).expect("square"))
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn dims(&self) -> &SubsystemDims {
        self.op.dims()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    /// Eigenvalues ascending, tiny negatives clamped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(self.matrix())
            .into_iter()
            .map(|x| x.max(0.0))
            .collect()
    }

    pub fn reduce(&self, keep: &[&str]) -> Result<Self> {
        Ok(Self::from_trusted(self.op.partial_trace(keep)?))
    }

    pub fn trace_out(&self, remove: &[&str]) -> Result<Self> {
        Ok(Self::from_trusted(self.op.trace_out(remove)?))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        Ok(Self::from_trusted(self.op.tensor(&other.op)?))
    }

    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        Ok(Self::from_trusted(self.op.permute(order)?))
    }

    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        Ok(Self::from_trusted(self.op.relabel(labels)?))
    }

    /// Convex combination `(1-w) self + w other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::OutOfRange {
                name: "weight",
                value: w,
                range: "[0, 1]",
            });
        }
        let op = self.op.scale(1.0 - w).try_add(&other.op.scale(w))?;
        Ok(Self::from_trusted(op))
    }

    /// Conjugate by a unitary (or isometry) acting on the whole space.
    /// The caller supplies the output layout.
    pub fn conjugate(&self, u: &CMatrix, out_dims: SubsystemDims) -> Result<Self> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.ncols(),
            });
        }
        let m = u * self.matrix() * u.adjoint();
        Ok(Self::from_trusted(Operator::new(m, out_dims)?))
    }

    /// Spectral purification Σ √λ_i |e_i⟩|i⟩ with an ancilla of dimension
    /// equal to the rank. The ancilla label is `R` (or `R1`, `R2`, ... if taken).
    pub fn purify(&self) -> PureState {
        let mut label = String::from("R");
        let mut k = 0;
        while self.dims().contains(&label) {
            k += 1;
            label = format!("R{k}");
        }
        self.purify_with_label(&label).expect("fresh label")
    }

    pub fn purify_with_label(&self, ancilla: &str) -> Result<PureState> {
        let (vals, vecs) = linalg::hermitian_eigen(self.matrix());
        let kept: Vec<usize> = (0..vals.len()).rev().filter(|&k| vals[k] > TOL_PSD).collect();
        let rank = kept.len().max(1);
        let n = self.dim();
        let mut amps = CVector::zeros(n * rank);
        if kept.is_empty() {
            return Err(Error::NotPositive(0.0));
        }
        let total: f64 = kept.iter().map(|&k| vals[k]).sum();
        for (slot, &k) in kept.iter().enumerate() {
            let w = (vals[k] / total).sqrt();
            for i in 0..n {
                amps[i * rank + slot] = vecs[(i, k)] * w;
            }
        }
        let dims = self.dims().concat(&SubsystemDims::single(ancilla, rank))?;
        PureState::new(amps, dims)
    }
}

/// Unit vector tagged with a factor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVector,
    dims: SubsystemDims,
}

impl PureState {
    pub fn new(amps: CVector, dims: SubsystemDims) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                got: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > TOL_TRACE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amps, dims })
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(amps: CVector, dims: SubsystemDims) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(amps / Complex64::new(norm, 0.0), dims)
    }

    pub fn basis(dims: SubsystemDims, k: usize) -> Self {
        let mut amps = CVector::zeros(dims.total());
        amps[k] = linalg::ONE;
        Self { amps, dims }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn density(&self) -> DensityMatrix {
        let m = &self.amps * self.amps.adjoint();
        DensityMatrix::from_trusted(Operator::new(m, self.dims.clone()).expect("layout matches"))
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        Ok(Self {
            amps: self.amps.kronecker(&other.amps),
            dims: self.dims.concat(&other.dims)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{max_abs_diff, real_matrix};

    #[test]
    fn rejects_invalid_states() {
        let d = SubsystemDims::single("A", 2);
        let not_unit = Operator::new(real_matrix(2, &[1.0, 0.0, 0.0, 1.0]), d.clone()).unwrap();
        assert!(matches!(DensityMatrix::new(not_unit), Err(Error::TraceNotOne(_))));
        let neg = Operator::new(real_matrix(2, &[1.5, 0.0, 0.0, -0.5]), d.clone()).unwrap();
        assert!(matches!(DensityMatrix::new(neg), Err(Error::NotPositive(_))));
        let nonherm = Operator::new(real_matrix(2, &[0.5, 0.3, 0.0, 0.5]), d).unwrap();
        assert!(matches!(DensityMatrix::new(nonherm), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn tiny_negative_eigenvalue_is_tolerated() {
        let d = SubsystemDims::single("A", 2);
        let op = Operator::new(real_matrix(2, &[1.0 + 5e-10, 0.0, 0.0, -5e-10]), d).unwrap();
        let rho = DensityMatrix::new(op).unwrap();
        assert_eq!(rho.eigenvalues()[0], 0.0);
    }

    #[test]
    fn purify_pure_state_uses_one_dim_ancilla() {
        let phi = PureState::normalized(
            CVector::from_vec(vec![linalg::r(0.6), linalg::c(0.0, 0.8)]),
            SubsystemDims::single("A", 2),
        )
        .unwrap();
        let psi = phi.density().purify();
        assert_eq!(psi.dims().dim_of("R").unwrap(), 1);
        assert!((psi.inner(&phi.tensor(&PureState::basis(SubsystemDims::single("R", 1), 0)).unwrap()).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purify_maximally_mixed_qubit() {
        let rho = DensityMatrix::maximally_mixed(SubsystemDims::single("A", 2));
        let psi = rho.purify();
        assert_eq!(psi.dims().dim_of("R").unwrap(), 2);
        let back = psi.density().reduce(&["A"]).unwrap();
        assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-12);
        // maximally entangled: the ancilla marginal is also maximally mixed
        let anc = psi.density().reduce(&["R"]).unwrap();
        assert!(max_abs_diff(anc.matrix(), &(linalg::identity(2) * linalg::r(0.5))) < 1e-12);
    }
}
