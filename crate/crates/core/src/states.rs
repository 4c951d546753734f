//! Private bits in X-form, block states, privacy squeezing, Schmidt-twisted
//! pure states, maximally correlated states and the superdense example.
//!
//! Key part labels are `A` and `B`, both qubits for private bits, with the
//! basis ordered `|00⟩, |01⟩, |10⟩, |11⟩`. Shields are labelled `A'` and `B'`.

use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMatrix, CVector};
use crate::qcore::tol::{TOL_TRACE, TOL_HERM};
use crate::qcore::{trace_norm, DensityMatrix, Operator, PureState, SubsystemDims};

pub const KEY_A: &str = "A";
pub const KEY_B: &str = "B";
pub const SHIELD_A: &str = "A'";
pub const SHIELD_B: &str = "B'";

fn key_dims() -> SubsystemDims {
    SubsystemDims::new([(KEY_A, 2), (KEY_B, 2)]).expect("distinct labels")
}

fn check_shield_labels(dims: &SubsystemDims) -> Result<()> {
    for l in [KEY_A, KEY_B] {
        if dims.contains(l) {
            return Err(Error::DuplicateLabel(l.to_string()));
        }
    }
    Ok(())
}

/// The corner operator `X` of a private bit, living on the shield `A'B'`.
#[derive(Debug, Clone)]
pub struct PrivateBitX {
    x: Operator,
    hermitian: bool,
}

impl PrivateBitX {
    /// `x` must have two factors; they are relabelled `A'` and `B'`.
    pub fn new(x: Operator) -> Result<Self> {
        if x.dims().len() != 2 {
            return Err(Error::invalid(format!(
                "X must act on two shield factors, got layout {}",
                x.dims()
            )));
        }
        let x = x.relabel(&[SHIELD_A, SHIELD_B])?;
        let norm = x.trace_norm();
        if norm > 0.5 + TOL_TRACE {
            return Err(Error::TraceNormTooLarge { norm });
        }
        let hermitian = x.is_hermitian(TOL_HERM);
        Ok(Self { x, hermitian })
    }

    pub fn operator(&self) -> &Operator {
        &self.x
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn trace_norm(&self) -> f64 {
        self.x.trace_norm()
    }

    /// True when `‖X‖₁ = ½`, i.e. the assembled state is a private bit.
    pub fn is_private(&self) -> bool {
        (self.trace_norm() - 0.5).abs() <= TOL_TRACE
    }
}

/// Assemble
/// `[[√(XX†),0,0,X],[0,0,0,0],[0,0,0,0],[X†,0,0,√(X†X)]]` on `A B A' B'`.
///
/// For `‖X‖₁ < ½` both diagonal blocks get `(½ - ‖X‖₁)/n · 1` added
/// (`n` the shield dimension), so the output is a state without key
/// content beyond what `X` carries.
pub fn private_bit(x: &PrivateBitX) -> Result<DensityMatrix> {
    let xm = x.x.matrix();
    let n = xm.nrows();
    let pad = ((0.5 - x.trace_norm()) / n as f64).max(0.0);
    let pad_m = linalg::identity(n) * linalg::r(pad);
    let top = linalg::abs_left(xm) + &pad_m;
    let bottom = linalg::abs_right(xm) + &pad_m;
    let mut m = CMatrix::zeros(4 * n, 4 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&top);
    m.view_mut((0, 3 * n), (n, n)).copy_from(xm);
    m.view_mut((3 * n, 0), (n, n)).copy_from(&xm.adjoint());
    m.view_mut((3 * n, 3 * n), (n, n)).copy_from(&bottom);
    let dims = key_dims().concat(x.x.dims())?;
    DensityMatrix::new(Operator::new(m, dims)?)
}

/// The swap operator on `d_s ⊗ d_s` normalised to trace norm ½.
pub fn swap_witness(d_s: usize) -> Result<Operator> {
    if d_s < 1 {
        return Err(Error::OutOfRange {
            name: "d_s",
            value: d_s as f64,
            range: "[1, ∞)",
        });
    }
    let v = linalg::swap(d_s) * linalg::r(1.0 / (2.0 * (d_s * d_s) as f64));
    Operator::new(v, SubsystemDims::new([(SHIELD_A, d_s), (SHIELD_B, d_s)])?)
}

/// `γ_V`: the private bit whose corner is the normalised swap. Known to be
/// irreducible.
pub fn gamma_swap(d_s: usize) -> Result<DensityMatrix> {
    if d_s < 2 {
        return Err(Error::OutOfRange {
            name: "d_s",
            value: d_s as f64,
            range: "[2, ∞)",
        });
    }
    private_bit(&PrivateBitX::new(swap_witness(d_s)?)?)
}

/// `(|00⟩ ± |11⟩)/√2` as a 4-vector.
pub fn bell_vector(sign: f64) -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_vec(vec![linalg::r(s), linalg::ZERO, linalg::ZERO, linalg::r(sign * s)])
}

/// `|ψ₊⟩⟨ψ₊|` on `A B`.
pub fn bell_state() -> DensityMatrix {
    PureState::new(bell_vector(1.0), key_dims()).expect("unit vector").density()
}

/// `p₊|ψ₊⟩⟨ψ₊| ⊗ ρ₊ + p₋|ψ₋⟩⟨ψ₋| ⊗ ρ₋`.
#[derive(Debug, Clone)]
pub struct BlockState {
    pub p_plus: f64,
    pub p_minus: f64,
    pub rho_plus: DensityMatrix,
    pub rho_minus: DensityMatrix,
}

impl BlockState {
    pub fn new(p_plus: f64, rho_plus: DensityMatrix, rho_minus: DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_plus) {
            return Err(Error::OutOfRange {
                name: "p_plus",
                value: p_plus,
                range: "[0, 1]",
            });
        }
        if rho_plus.dims() != rho_minus.dims() {
            return Err(Error::invalid(format!(
                "shield layouts differ: {} vs {}",
                rho_plus.dims(),
                rho_minus.dims()
            )));
        }
        check_shield_labels(rho_plus.dims())?;
        Ok(Self {
            p_plus,
            p_minus: 1.0 - p_plus,
            rho_plus,
            rho_minus,
        })
    }

    pub fn shield_dims(&self) -> &SubsystemDims {
        self.rho_plus.dims()
    }

    /// `p₊ρ₊ - p₋ρ₋`.
    pub fn difference(&self) -> CMatrix {
        self.rho_plus.matrix() * linalg::r(self.p_plus) - self.rho_minus.matrix() * linalg::r(self.p_minus)
    }
}

/// The block state whose X-form corner is a given hermitian `X`:
/// `p±ρ± = 2X± + r·1` with `r = (1 - 2‖X‖₁)/(2n)` and `X±` the positive and
/// negative parts. Its assembled form coincides with [`private_bit`].
pub fn block_from_witness(x: &Operator) -> Result<BlockState> {
    if !x.is_hermitian(TOL_HERM) {
        return Err(Error::NotHermitian(x.hermiticity_defect()));
    }
    let norm = x.trace_norm();
    if norm > 0.5 + TOL_TRACE {
        return Err(Error::TraceNormTooLarge { norm });
    }
    let n = x.dim();
    let r = ((1.0 - 2.0 * norm) / (2.0 * n as f64)).max(0.0);
    let (vals, vecs) = linalg::hermitian_eigen(x.matrix());
    let pos: Vec<f64> = vals.iter().map(|&v| 2.0 * v.max(0.0) + r).collect();
    let neg: Vec<f64> = vals.iter().map(|&v| 2.0 * (-v).max(0.0) + r).collect();
    let p_plus: f64 = pos.iter().sum();
    let p_minus: f64 = neg.iter().sum();
    let state = |w: &[f64], p: f64| -> Result<DensityMatrix> {
        if p <= 0.0 {
            // weightless branch; any state will do
            return Ok(DensityMatrix::maximally_mixed(x.dims().clone()));
        }
        let scaled: Vec<f64> = w.iter().map(|v| v / p).collect();
        DensityMatrix::from_matrix(linalg::from_spectrum(&scaled, &vecs), x.dims().clone())
    };
    BlockState::new(
        p_plus / (p_plus + p_minus),
        state(&pos, p_plus)?,
        state(&neg, p_minus)?,
    )
}

pub fn block_state(b: &BlockState) -> Result<DensityMatrix> {
    let proj = |sign: f64| -> Result<Operator> {
        let v = bell_vector(sign);
        Operator::new(&v * v.adjoint(), key_dims())
    };
    let plus = proj(1.0)?.tensor(b.rho_plus.op())?.scale(b.p_plus);
    let minus = proj(-1.0)?.tensor(b.rho_minus.op())?.scale(b.p_minus);
    DensityMatrix::new(plus.try_add(&minus)?)
}

/// Bell-diagonal two-qubit state with corners ½ and off-diagonal corners
/// `½‖p₊ρ₊ - p₋ρ₋‖₁`.
pub fn privacy_squeeze(b: &BlockState) -> Result<DensityMatrix> {
    let c = 0.5 * trace_norm(&b.difference());
    psq_from_corner(c)
}

fn psq_from_corner(c: f64) -> Result<DensityMatrix> {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = linalg::r(0.5);
    m[(3, 3)] = linalg::r(0.5);
    m[(0, 3)] = linalg::r(c);
    m[(3, 0)] = linalg::r(c);
    DensityMatrix::from_matrix(m, key_dims())
}

/// Privacy squeezing read directly off a state on `A B ⊗ shield` with qubit
/// key part: every key-part block `B_ij` is replaced by `‖B_ij‖₁`, taking
/// the block phase `tr B_ij / |tr B_ij|` on the two anti-diagonal pairs
/// dropped (it is removable by a local unitary).
pub fn privacy_squeeze_state(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let dims = rho.dims();
    if dims.len() < 2
        || dims.factors()[0].label != KEY_A
        || dims.factors()[1].label != KEY_B
        || dims.factors()[0].dim != 2
        || dims.factors()[1].dim != 2
    {
        return Err(Error::invalid(format!(
            "privacy squeezing needs a leading qubit key part A B, got layout {dims}"
        )));
    }
    let n = rho.dim() / 4;
    let block = |i: usize, j: usize| rho.matrix().view((i * n, j * n), (n, n)).into_owned();
    let mut m = CMatrix::zeros(4, 4);
    for k in 0..4 {
        m[(k, k)] = linalg::r(linalg::trace(&block(k, k)).re);
    }
    for (i, j) in [(0, 3), (1, 2)] {
        let c = trace_norm(&block(i, j));
        m[(i, j)] = linalg::r(c);
        m[(j, i)] = linalg::r(c);
    }
    DensityMatrix::from_matrix(m, key_dims())
}

/// Input of [`schmidt_twisted_pure`].
#[derive(Debug, Clone)]
pub struct SchmidtTwistData {
    pub lambdas: Vec<f64>,
    /// `k x k` table of shield unitaries. Only the diagonal `U^(ii)` enters
    /// the state; the rest is kept for completeness.
    pub twist_unitaries: Vec<Vec<CMatrix>>,
    pub sigma: DensityMatrix,
}

impl SchmidtTwistData {
    /// Diagonal data only; off-diagonal entries are filled with identities.
    pub fn diagonal(lambdas: Vec<f64>, twists: Vec<CMatrix>, sigma: DensityMatrix) -> Self {
        let n = sigma.dim();
        let k = twists.len();
        let table = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { twists[i].clone() } else { linalg::identity(n) })
                    .collect()
            })
            .collect();
        Self {
            lambdas,
            twist_unitaries: table,
            sigma,
        }
    }

    fn validate(&self) -> Result<()> {
        let k = self.lambdas.len();
        if k == 0 {
            return Err(Error::invalid("at least one Schmidt weight is required"));
        }
        if self.lambdas.iter().any(|&l| l < 0.0) {
            return Err(Error::invalid("Schmidt weights must be nonnegative"));
        }
        let s: f64 = self.lambdas.iter().sum();
        if (s - 1.0).abs() > TOL_TRACE {
            return Err(Error::TraceNotOne(s));
        }
        if self.twist_unitaries.len() != k || self.twist_unitaries.iter().any(|row| row.len() != k) {
            return Err(Error::invalid("twist table must be k x k for k Schmidt weights"));
        }
        check_shield_labels(self.sigma.dims())?;
        let n = self.sigma.dim();
        for row in &self.twist_unitaries {
            for u in row {
                if u.shape() != (n, n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: u.nrows(),
                    });
                }
                let dev = linalg::max_abs_diff(&(u.adjoint() * u), &linalg::identity(n));
                if dev > TOL_HERM {
                    return Err(Error::NotUnitary(dev));
                }
            }
        }
        Ok(())
    }
}

/// `Σ_ij √(λ_i λ_j) |ii⟩⟨jj| ⊗ U_i σ U_j†` with computational Schmidt bases.
pub fn schmidt_twisted_pure(d: &SchmidtTwistData) -> Result<DensityMatrix> {
    d.validate()?;
    let k = d.lambdas.len();
    let n = d.sigma.dim();
    let dk = k * k;
    let mut m = CMatrix::zeros(dk * n, dk * n);
    let u = |i: usize| &d.twist_unitaries[i][i];
    for i in 0..k {
        for j in 0..k {
            let w = (d.lambdas[i] * d.lambdas[j]).sqrt();
            if w == 0.0 {
                continue;
            }
            let blk = u(i) * d.sigma.matrix() * u(j).adjoint() * linalg::r(w);
            let (r, c) = (i * k + i, j * k + j);
            m.view_mut((r * n, c * n), (n, n)).copy_from(&blk);
        }
    }
    let dims = SubsystemDims::new([(KEY_A, k), (KEY_B, k)])?.concat(d.sigma.dims())?;
    DensityMatrix::new(Operator::new(m, dims)?)
}

/// `½ Σ_i |ii⟩_AB ⊗ (σ^i ⊗ 1)|Φ⟩_{A'E}` with `σ^0..σ^3 = 1, σx, σy, σz`
/// on layout `(A:4)(B:4)(A':2)(E:2)`.
pub fn superdense_example() -> PureState {
    let phi = bell_vector(1.0);
    let paulis = [linalg::identity(2), linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
    let mut amps = CVector::zeros(64);
    for (i, s) in paulis.iter().enumerate() {
        let local = linalg::kron(s, &linalg::identity(2)) * &phi;
        let ii = i * 4 + i;
        for k in 0..4 {
            amps[ii * 4 + k] = local[k] * linalg::r(0.5);
        }
    }
    let dims = SubsystemDims::new([("A", 4), ("B", 4), ("A'", 2), ("E", 2)]).expect("distinct labels");
    PureState::new(amps, dims).expect("unit vector")
}

/// `Σ c_ij |ii⟩⟨jj|` on `(A:d)(B:d)`.
pub fn maximally_correlated(c: &CMatrix) -> Result<DensityMatrix> {
    let d = c.nrows();
    let c_state = DensityMatrix::from_matrix(c.clone(), SubsystemDims::single("c", d))?;
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = c_state.matrix()[(i, j)];
        }
    }
    DensityMatrix::new(Operator::new(m, SubsystemDims::new([(KEY_A, d), (KEY_B, d)])?)?)
}

/// `¼(|00⟩⟨11| + |11⟩⟨00|)` on `(A':2)(B':2)`: pure coherence, trace norm ½.
pub fn coherence_witness() -> Operator {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 3)] = linalg::r(0.25);
    m[(3, 0)] = linalg::r(0.25);
    Operator::new(m, SubsystemDims::new([(SHIELD_A, 2), (SHIELD_B, 2)]).expect("distinct labels"))
        .expect("layout matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::max_abs_diff;
    use crate::qcore::{entropy_of, von_neumann_entropy};

    #[test]
    fn scalar_x_gives_bell_state() {
        let x = Operator::new(
            CMatrix::from_element(1, 1, linalg::r(0.5)),
            SubsystemDims::new([("a", 1), ("b", 1)]).unwrap(),
        )
        .unwrap();
        let rho = private_bit(&PrivateBitX::new(x).unwrap()).unwrap();
        assert!(max_abs_diff(rho.matrix(), bell_state().matrix()) < 1e-14);
    }

    #[test]
    fn gamma_swap_diagonal_blocks() {
        for d in [2, 4] {
            let g = gamma_swap(d).unwrap();
            let n = d * d;
            let expect = linalg::identity(n) * linalg::r(1.0 / (2.0 * n as f64));
            let top = g.matrix().view((0, 0), (n, n)).into_owned();
            let bot = g.matrix().view((3 * n, 3 * n), (n, n)).into_owned();
            assert!(max_abs_diff(&top, &expect) < 1e-13);
            assert!(max_abs_diff(&bot, &expect) < 1e-13);
        }
        assert!(gamma_swap(1).is_err());
    }

    #[test]
    fn shield_marginal_of_gamma_swap() {
        // tr_{A'} γ_V = (½|00⟩⟨00| + ½|11⟩⟨11| + ¼(|00⟩⟨11| + h.c.)) ⊗ 1/2,
        // because tr_{A'} of the normalised swap is 1/(2 d_s²) · 1.
        let g = gamma_swap(2).unwrap();
        let red = g.trace_out(&["A'"]).unwrap();
        let mut key = CMatrix::zeros(4, 4);
        key[(0, 0)] = linalg::r(0.5);
        key[(3, 3)] = linalg::r(0.5);
        key[(0, 3)] = linalg::r(0.25);
        key[(3, 0)] = linalg::r(0.25);
        let expect = linalg::kron(&key, &(linalg::identity(2) * linalg::r(0.5)));
        assert!(max_abs_diff(red.matrix(), &expect) < 1e-13);
    }

    #[test]
    fn zero_x_pads_to_state() {
        let x = Operator::zeros(SubsystemDims::new([("A'", 2), ("B'", 2)]).unwrap());
        let pb = PrivateBitX::new(x).unwrap();
        assert!(!pb.is_private());
        let rho = private_bit(&pb).unwrap();
        let key = rho.reduce(&["A", "B"]).unwrap();
        let expect = linalg::real_matrix(
            4,
            &[0.5, 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.5],
        );
        assert!(max_abs_diff(key.matrix(), &expect) < 1e-14);
    }

    #[test]
    fn rejects_large_x() {
        let x = swap_witness(2).unwrap().scale(1.5);
        assert!(matches!(PrivateBitX::new(x), Err(Error::TraceNormTooLarge { .. })));
    }

    #[test]
    fn block_from_witness_matches_private_bit() {
        let x = swap_witness(2).unwrap().scale(0.6);
        let b = block_from_witness(&x).unwrap();
        let lhs = block_state(&b).unwrap();
        let rhs = private_bit(&PrivateBitX::new(x.clone()).unwrap()).unwrap();
        assert!(max_abs_diff(lhs.matrix(), rhs.matrix()) < 1e-13);
        let psq = privacy_squeeze(&b).unwrap();
        assert!((psq.matrix()[(0, 3)].re - x.trace_norm()).abs() < 1e-13);
    }

    #[test]
    fn block_state_examples() {
        let dims = SubsystemDims::single("S", 2);
        let r0 = DensityMatrix::basis("S", 2, 0);
        let r1 = DensityMatrix::basis("S", 2, 1);
        let b = BlockState::new(0.5, r0.clone(), r1).unwrap();
        let psq = privacy_squeeze(&b).unwrap();
        assert!(max_abs_diff(psq.matrix(), bell_state().matrix()) < 1e-14);
        let same = BlockState::new(0.5, r0.clone(), r0.clone()).unwrap();
        let psq = privacy_squeeze(&same).unwrap();
        assert!(psq.matrix()[(0, 3)].norm() < 1e-15);
        let pure = BlockState::new(1.0, r0.clone(), DensityMatrix::maximally_mixed(dims)).unwrap();
        let st = block_state(&pure).unwrap();
        let expect = bell_state().tensor(&r0).unwrap();
        assert!(max_abs_diff(st.matrix(), expect.matrix()) < 1e-14);
        assert!(BlockState::new(0.5, r0, DensityMatrix::basis("T", 2, 0)).is_err());
    }

    #[test]
    fn psq_of_state_matches_block_formula() {
        let x = swap_witness(2).unwrap().scale(0.8);
        let b = block_from_witness(&x).unwrap();
        let a = privacy_squeeze_state(&block_state(&b).unwrap()).unwrap();
        let c = privacy_squeeze(&b).unwrap();
        assert!(max_abs_diff(a.matrix(), c.matrix()) < 1e-13);
    }

    #[test]
    fn schmidt_twist_reproduces_private_bit() {
        let sigma = DensityMatrix::from_matrix(
            linalg::real_matrix(4, &[0.4, 0.1, 0., 0., 0.1, 0.3, 0., 0., 0., 0., 0.2, 0.05, 0., 0., 0.05, 0.1]),
            SubsystemDims::new([("A'", 2), ("B'", 2)]).unwrap(),
        )
        .unwrap();
        let u = linalg::swap(2);
        let data = SchmidtTwistData::diagonal(vec![0.5, 0.5], vec![linalg::identity(4), u.clone()], sigma.clone());
        let twisted = schmidt_twisted_pure(&data).unwrap();
        let x = Operator::new(sigma.matrix() * u.adjoint() * linalg::r(0.5), sigma.dims().clone()).unwrap();
        let pb = private_bit(&PrivateBitX::new(x).unwrap()).unwrap();
        assert!(max_abs_diff(twisted.matrix(), pb.matrix()) < 1e-12);

        let trivial = SchmidtTwistData::diagonal(vec![1.0, 0.0], vec![linalg::identity(4), u], sigma.clone());
        let st = schmidt_twisted_pure(&trivial).unwrap();
        assert!(max_abs_diff(
            st.reduce(&["A'", "B'"]).unwrap().matrix(),
            sigma.matrix()
        ) < 1e-14);
        assert!(von_neumann_entropy(&st.reduce(&["A", "B"]).unwrap()) < 1e-12);
    }

    #[test]
    fn superdense_marginals() {
        let psi = superdense_example();
        assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-14);
        let rho = psi.density();
        let a = rho.reduce(&["A"]).unwrap();
        assert!(max_abs_diff(a.matrix(), &(linalg::identity(4) * linalg::r(0.25))) < 1e-14);
        assert!((entropy_of(&rho, &["A'", "E"]).unwrap() - 2.0).abs() < 1e-12);
        assert!((entropy_of(&rho, &["A'"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mcs_embedding() {
        let c = linalg::real_matrix(2, &[0.5, 0.5, 0.5, 0.5]);
        let rho = maximally_correlated(&c).unwrap();
        assert!(max_abs_diff(rho.matrix(), bell_state().matrix()) < 1e-14);
        assert!(maximally_correlated(&linalg::real_matrix(2, &[1.0, 0.0, 0.0, 1.0])).is_err());
    }
}
