//! CPTP maps in Kraus form, attacks embedded into a shield factor, and
//! time-parameterized dynamics.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::tol::TOL_CPTP;
use crate::qcore::{DensityMatrix, Operator, SubsystemDims};

/// Completely positive trace-preserving map `ρ ↦ Σ K ρ K†`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<CMatrix>,
    d_in: usize,
    d_out: usize,
    label: String,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>, label: impl Into<String>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::invalid("channel needs at least one Kraus operator"))?;
        let (d_out, d_in) = first.shape();
        for k in &kraus {
            if k.shape() != (d_out, d_in) {
                return Err(Error::invalid("Kraus operators have inconsistent shapes"));
            }
        }
        let sum = kraus
            .iter()
            .fold(CMatrix::zeros(d_in, d_in), |acc, k| acc + k.adjoint() * k);
        let dev = linalg::max_abs_diff(&sum, &linalg::identity(d_in));
        if dev > TOL_CPTP {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self {
            kraus,
            d_in,
            d_out,
            label: label.into(),
        })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![linalg::identity(d)],
            d_in: d,
            d_out: d,
            label: "identity".into(),
        }
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `Σ K M K†` on a bare matrix of size `d_in`.
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        self.kraus
            .iter()
            .fold(CMatrix::zeros(self.d_out, self.d_out), |acc, k| acc + k * m * k.adjoint())
    }

    /// Apply to a whole state. A layout change is only possible for a
    /// single-factor state, whose factor keeps its label.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.d_in {
            return Err(Error::DimensionMismatch {
                expected: self.d_in,
                got: rho.dim(),
            });
        }
        let dims = if self.d_out == self.d_in {
            rho.dims().clone()
        } else if rho.dims().len() == 1 {
            rho.dims().with_dim(0, self.d_out)
        } else {
            return Err(Error::invalid(
                "dimension-changing channel on a multi-factor state; use apply_on_factor",
            ));
        };
        let out = Operator::new(self.apply_matrix(rho.matrix()), dims)?;
        Ok(DensityMatrix::from_trusted(out))
    }

    /// `(Λ ⊗ 1_rest)(ρ)` with Λ on factor `target`. See
    /// [`apply_on_factor_op`](Self::apply_on_factor_op) for the embedding rule.
    pub fn apply_on_factor(&self, rho: &DensityMatrix, target: &str) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_trusted(self.apply_on_factor_op(rho.op(), target)?))
    }

    /// `(Λ ⊗ 1_rest)(X)` for an arbitrary operator.
    ///
    /// If the target factor is larger than the channel input it is read as
    /// `(d_in) ⊗ (D / d_in)` and the channel acts on the leading part; for a
    /// qubit channel that is the first qubit of the factor.
    pub fn apply_on_factor_op(&self, op: &Operator, target: &str) -> Result<Operator> {
        let dims = op.dims();
        let pos = dims.position(target)?;
        let d_target = dims.factors()[pos].dim;
        if !d_target.is_multiple_of(self.d_in) || (self.d_in == 2 && !d_target.is_power_of_two()) {
            return Err(Error::invalid(format!(
                "cannot embed a {}-dim channel into factor `{target}` of dim {d_target}",
                self.d_in
            )));
        }
        let rest_in_factor = d_target / self.d_in;
        let before: usize = dims.factors()[..pos].iter().map(|f| f.dim).product();
        let after: usize = dims.factors()[pos + 1..].iter().map(|f| f.dim).product::<usize>() * rest_in_factor;
        let out_n = before * self.d_out * after;
        let mut acc = CMatrix::zeros(out_n, out_n);
        for k in &self.kraus {
            // rows then columns of (1 ⊗ K ⊗ 1) M (1 ⊗ K† ⊗ 1), index (b, t, a)
            let left = act_on_middle(k, op.matrix(), before, after);
            let both = act_on_middle(k, &left.adjoint(), before, after);
            acc += both.adjoint();
        }
        Operator::new(acc, dims.with_dim(pos, self.d_out * rest_in_factor))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &KrausChannel) -> Result<KrausChannel> {
        if other.d_out != self.d_in {
            return Err(Error::DimensionMismatch {
                expected: self.d_in,
                got: other.d_out,
            });
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a * b))
            .collect();
        let ch = KrausChannel {
            kraus,
            d_in: other.d_in,
            d_out: self.d_out,
            label: format!("{}∘{}", self.label, other.label),
        };
        Ok(if ch.kraus.len() > ch.d_in * ch.d_out {
            ch.canonical()
        } else {
            ch
        })
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMatrix {
        let (di, dout) = (self.d_in, self.d_out);
        let mut j = CMatrix::zeros(di * dout, di * dout);
        for a in 0..di {
            for b in 0..di {
                let mut e = CMatrix::zeros(di, di);
                e[(a, b)] = linalg::ONE;
                let img = self.apply_matrix(&e);
                for x in 0..dout {
                    for y in 0..dout {
                        j[(a * dout + x, b * dout + y)] = img[(x, y)];
                    }
                }
            }
        }
        j
    }

    /// Equivalent channel with at most `d_in * d_out` Kraus operators,
    /// read off the Choi spectrum.
    pub fn canonical(&self) -> KrausChannel {
        let (di, dout) = (self.d_in, self.d_out);
        let (vals, vecs) = linalg::hermitian_eigen(&self.choi());
        let kraus: Vec<CMatrix> = vals
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 1e-14)
            .map(|(k, &v)| {
                let s = linalg::r(v.sqrt());
                CMatrix::from_fn(dout, di, |x, a| vecs[(a * dout + x, k)] * s)
            })
            .collect();
        KrausChannel {
            kraus,
            d_in: di,
            d_out: dout,
            label: self.label.clone(),
        }
    }
}

impl fmt::Display for KrausChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} Kraus, {}->{})",
            self.label,
            self.kraus.len(),
            self.d_in,
            self.d_out
        )
    }
}

/// `(1_before ⊗ K ⊗ 1_after) M` without forming the Kronecker product.
fn act_on_middle(k: &CMatrix, m: &CMatrix, before: usize, after: usize) -> CMatrix {
    let (d_out, d_in) = (k.nrows(), k.ncols());
    let cols = m.ncols();
    let mut out = CMatrix::zeros(before * d_out * after, cols);
    // column-major storage: keep the column fixed in the inner loops
    for c in 0..cols {
        let src_col = m.column(c);
        let mut dst_col = out.column_mut(c);
        for b in 0..before {
            for t in 0..d_out {
                for s in 0..d_in {
                    let w = k[(t, s)];
                    if w == linalg::ZERO {
                        continue;
                    }
                    let (src, dst) = ((b * d_in + s) * after, (b * d_out + t) * after);
                    for a in 0..after {
                        dst_col[dst + a] += w * src_col[src + a];
                    }
                }
            }
        }
    }
    out
}

/// The qubit attacks used on shields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    BitFlip,
    Depolarizing,
    AmplitudeDamping,
    Dephasing,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::BitFlip,
        ChannelKind::Depolarizing,
        ChannelKind::AmplitudeDamping,
        ChannelKind::Dephasing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::BitFlip => "bit-flip",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::AmplitudeDamping => "amplitude-damping",
            ChannelKind::Dephasing => "dephasing",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::invalid(format!("unknown channel kind `{s}`")))
    }
}

/// Kraus families:
///
/// * bit flip `{√(1-α) 1, √α σx}`
/// * depolarizing `{√(1-3α/4) 1, √(α/4) σx, √(α/4) σy, √(α/4) σz}`
/// * amplitude damping `{diag(1, √(1-α)), √α |0⟩⟨1|}`
/// * dephasing `{√(1-α) 1, √α σz}`
pub fn standard_channel(kind: ChannelKind, alpha: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "[0, 1]",
        });
    }
    let s = |x: f64| linalg::r(x.max(0.0).sqrt());
    let id = linalg::identity(2);
    let kraus = match kind {
        ChannelKind::BitFlip => vec![&id * s(1.0 - alpha), linalg::pauli_x() * s(alpha)],
        ChannelKind::Depolarizing => vec![
            &id * s(1.0 - 0.75 * alpha),
            linalg::pauli_x() * s(alpha / 4.0),
            linalg::pauli_y() * s(alpha / 4.0),
            linalg::pauli_z() * s(alpha / 4.0),
        ],
        ChannelKind::AmplitudeDamping => vec![
            linalg::real_matrix(2, &[1.0, 0.0, 0.0, (1.0 - alpha).sqrt()]),
            linalg::real_matrix(2, &[0.0, alpha.sqrt(), 0.0, 0.0]),
        ],
        ChannelKind::Dephasing => vec![&id * s(1.0 - alpha), linalg::pauli_z() * s(alpha)],
    };
    KrausChannel::new(kraus, format!("{kind}({alpha})"))
}

/// Qubit dephasing with coherence factor `q ∈ [-1, 1]`:
/// `ρ ↦ (1+q)/2 ρ + (1-q)/2 σz ρ σz`.
pub fn dephasing_with_coherence(q: f64) -> Result<KrausChannel> {
    if !(-1.0..=1.0).contains(&q) {
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            range: "[-1, 1]",
        });
    }
    KrausChannel::new(
        vec![
            linalg::identity(2) * linalg::r(((1.0 + q) / 2.0).sqrt()),
            linalg::pauli_z() * linalg::r(((1.0 - q) / 2.0).sqrt()),
        ],
        format!("dephasing[q={q}]"),
    )
}

type Sampler = Arc<dyn Fn(f64) -> Result<KrausChannel> + Send + Sync>;

/// A family `t ↦ Λ_t` on a closed time interval. Samplers must be pure.
#[derive(Clone)]
pub struct DynamicsFamily {
    sampler: Sampler,
    t_min: f64,
    t_max: f64,
    label: String,
}

impl fmt::Debug for DynamicsFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicsFamily")
            .field("label", &self.label)
            .field("t_min", &self.t_min)
            .field("t_max", &self.t_max)
            .finish()
    }
}

impl DynamicsFamily {
    pub fn new(
        sampler: impl Fn(f64) -> Result<KrausChannel> + Send + Sync + 'static,
        t_min: f64,
        t_max: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(t_min <= t_max) {
            return Err(Error::invalid(format!("empty time domain [{t_min}, {t_max}]")));
        }
        Ok(Self {
            sampler: Arc::new(sampler),
            t_min,
            t_max,
            label: label.into(),
        })
    }

    /// `Λ_t = 1` for every `t ≥ 0`.
    pub fn identity(d: usize) -> Self {
        Self::new(move |_| Ok(KrausChannel::identity(d)), 0.0, f64::INFINITY, "identity")
            .expect("valid domain")
    }

    /// `Λ_t = Λ^{⌊t⌋}`, a discrete semigroup.
    pub fn iterated(ch: KrausChannel, t_max: f64) -> Result<Self> {
        let label = format!("iterated {}", ch.label());
        let d = ch.d_in();
        if ch.d_out() != d {
            return Err(Error::invalid("iterated dynamics needs d_in == d_out"));
        }
        Self::new(
            move |t| {
                let n = t.floor().max(0.0) as usize;
                (0..n).try_fold(KrausChannel::identity(d), |acc, _| ch.compose(&acc))
            },
            0.0,
            t_max,
            label,
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    pub fn at(&self, t: f64) -> Result<KrausChannel> {
        if !(self.t_min..=self.t_max).contains(&t) {
            return Err(Error::OutOfRange {
                name: "t",
                value: t,
                range: "the dynamics time domain",
            });
        }
        (self.sampler)(t)
    }
}

/// Built-in dephasing dynamics with coherence factor `q(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DynamicsKind {
    /// `q(t) = e^{-γt}`; CP-divisible.
    SemigroupDephasing { gamma: f64 },
    /// `q(t) = e^{-γt} cos(ωt)`; not CP-divisible for ω > 0.
    OscillatingDephasing { gamma: f64, omega: f64 },
}

impl DynamicsKind {
    pub fn coherence(&self, t: f64) -> f64 {
        match *self {
            DynamicsKind::SemigroupDephasing { gamma } => (-gamma * t).exp(),
            DynamicsKind::OscillatingDephasing { gamma, omega } => (-gamma * t).exp() * (omega * t).cos(),
        }
    }
}

pub fn standard_dynamics(kind: DynamicsKind, t_max: f64) -> Result<DynamicsFamily> {
    match kind {
        DynamicsKind::SemigroupDephasing { gamma } if !(gamma > 0.0) => {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: gamma,
                range: "(0, ∞)",
            })
        }
        DynamicsKind::OscillatingDephasing { gamma, .. } if !(gamma >= 0.0) => {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: gamma,
                range: "[0, ∞)",
            })
        }
        DynamicsKind::OscillatingDephasing { omega, .. } if !(omega > 0.0) => {
            return Err(Error::OutOfRange {
                name: "omega",
                value: omega,
                range: "(0, ∞)",
            })
        }
        _ => {}
    }
    let label = match kind {
        DynamicsKind::SemigroupDephasing { gamma } => format!("semigroup-dephasing(gamma={gamma})"),
        DynamicsKind::OscillatingDephasing { gamma, omega } => {
            format!("oscillating-dephasing(gamma={gamma},omega={omega})")
        }
    };
    DynamicsFamily::new(
        move |t| dephasing_with_coherence(kind.coherence(t).clamp(-1.0, 1.0)),
        0.0,
        t_max,
        label,
    )
}

/// Embed a single-factor state into the layout `dims` is unrelated to; kept
/// here for building product inputs in tests and the CLI.
pub fn product_with_identity(op: &Operator, rest: SubsystemDims) -> Result<Operator> {
    op.tensor(&Operator::identity(rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::max_abs_diff;
    use crate::states;

    #[test]
    fn alpha_zero_is_identity() {
        let rho = DensityMatrix::from_matrix(
            linalg::real_matrix(2, &[0.7, 0.2, 0.2, 0.3]),
            SubsystemDims::single("A", 2),
        )
        .unwrap();
        for kind in ChannelKind::ALL {
            let ch = standard_channel(kind, 0.0).unwrap();
            assert!(max_abs_diff(ch.apply(&rho).unwrap().matrix(), rho.matrix()) < 1e-15);
        }
    }

    #[test]
    fn amplitude_damping_is_trace_preserving() {
        for a in [0.0, 0.3, 0.77, 1.0] {
            let ch = standard_channel(ChannelKind::AmplitudeDamping, a).unwrap();
            let sum = ch.kraus().iter().fold(CMatrix::zeros(2, 2), |s, k| s + k.adjoint() * k);
            assert!(max_abs_diff(&sum, &linalg::identity(2)) < 1e-15);
        }
    }

    #[test]
    fn full_depolarizing_gives_maximally_mixed() {
        let rho = DensityMatrix::from_matrix(
            linalg::real_matrix(2, &[0.9, 0.3, 0.3, 0.1]),
            SubsystemDims::single("A", 2),
        )
        .unwrap();
        let out = standard_channel(ChannelKind::Depolarizing, 1.0).unwrap().apply(&rho).unwrap();
        assert!(max_abs_diff(out.matrix(), &(linalg::identity(2) * linalg::r(0.5))) < 1e-15);
    }

    #[test]
    fn full_bit_flip_flips() {
        let out = standard_channel(ChannelKind::BitFlip, 1.0)
            .unwrap()
            .apply(&DensityMatrix::basis("A", 2, 0))
            .unwrap();
        assert!(max_abs_diff(out.matrix(), DensityMatrix::basis("A", 2, 1).matrix()) < 1e-15);
    }

    #[test]
    fn rejects_bad_alpha_and_non_cptp() {
        assert!(standard_channel(ChannelKind::BitFlip, 1.5).is_err());
        assert!(standard_channel(ChannelKind::BitFlip, -0.1).is_err());
        assert!(matches!(
            KrausChannel::new(vec![linalg::identity(2) * linalg::r(0.5)], "bad"),
            Err(Error::NotTracePreserving(_))
        ));
    }

    #[test]
    fn embedding_rules() {
        let g = states::gamma_swap(2).unwrap();
        let id = KrausChannel::identity(2);
        let same = id.apply_on_factor(&g, "A'").unwrap();
        assert!(max_abs_diff(same.matrix(), g.matrix()) < 1e-15);
        let ad = standard_channel(ChannelKind::AmplitudeDamping, 1.0).unwrap();
        let out = ad.apply_on_factor(&g, "A'").unwrap();
        assert!((out.op().trace().re - 1.0).abs() < 1e-12);
        assert!(out.eigenvalues().iter().all(|&x| x >= 0.0));
        // A' collapsed to |0⟩
        let a_prime = out.reduce(&["A'"]).unwrap();
        assert!(max_abs_diff(a_prime.matrix(), DensityMatrix::basis("A'", 2, 0).matrix()) < 1e-12);
        let odd = DensityMatrix::maximally_mixed(SubsystemDims::new([("A", 3)]).unwrap());
        assert!(id.apply_on_factor(&odd, "A").is_err());
        assert!(matches!(id.apply_on_factor(&g, "Z"), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn semigroup_dynamics_is_multiplicative() {
        let dynamics = standard_dynamics(DynamicsKind::SemigroupDephasing { gamma: 0.8 }, 10.0).unwrap();
        let at0 = dynamics.at(0.0).unwrap();
        assert!(max_abs_diff(&at0.choi(), &KrausChannel::identity(2).choi()) < 1e-15);
        let (t, s) = (0.4, 1.3);
        let lhs = dynamics.at(t + s).unwrap().choi();
        let rhs = dynamics.at(t).unwrap().compose(&dynamics.at(s).unwrap()).unwrap().choi();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        assert!(dynamics.at(11.0).is_err());
        assert!(standard_dynamics(DynamicsKind::SemigroupDephasing { gamma: 0.0 }, 1.0).is_err());
        assert!(standard_dynamics(
            DynamicsKind::OscillatingDephasing { gamma: 0.5, omega: 0.0 },
            1.0
        )
        .is_err());
    }

    #[test]
    fn canonical_form_preserves_action() {
        let a = standard_channel(ChannelKind::Depolarizing, 0.4).unwrap();
        let b = standard_channel(ChannelKind::AmplitudeDamping, 0.3).unwrap();
        let ab = a.compose(&b).unwrap();
        assert!(ab.kraus().len() <= 4);
        let rho = DensityMatrix::from_matrix(
            linalg::real_matrix(2, &[0.9, 0.3, 0.3, 0.1]),
            SubsystemDims::single("A", 2),
        )
        .unwrap();
        let direct = a.apply(&b.apply(&rho).unwrap()).unwrap();
        assert!(max_abs_diff(ab.apply(&rho).unwrap().matrix(), direct.matrix()) < 1e-12);
    }
}
