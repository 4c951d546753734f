use crate::error::{Error, Result};
use crate::qcore::entropy::check_disjoint;
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::tol::{TOL_CPTP, TOL_PSD, TOL_TRACE};
use crate::qcore::{von_neumann_entropy, DensityMatrix, Operator, PureState, SubsystemDims};

/// Positive operator-valued measure on Alice's systems.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<CMatrix>,
    dim: usize,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let dim = elements
            .first()
            .ok_or_else(|| Error::invalid("POVM needs at least one element"))?
            .nrows();
        let mut sum = CMatrix::zeros(dim, dim);
        for e in &elements {
            if e.shape() != (dim, dim) {
                return Err(Error::invalid("POVM elements have inconsistent shapes"));
            }
            let defect = linalg::hermiticity_defect(e);
            if defect > TOL_CPTP {
                return Err(Error::NotHermitian(defect));
            }
            let min = linalg::hermitian_eigenvalues(e).first().copied().unwrap_or(0.0);
            if min < -TOL_PSD {
                return Err(Error::NotPositive(min));
            }
            sum += e;
        }
        let dev = linalg::max_abs_diff(&sum, &linalg::identity(dim));
        if dev > TOL_CPTP {
            return Err(Error::IncompletePovm(dev));
        }
        Ok(Self { elements, dim })
    }

    /// Projective measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|k| {
                let mut m = CMatrix::zeros(dim, dim);
                m[(k, k)] = linalg::ONE;
                m
            })
            .collect();
        Self { elements, dim }
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Classical register `X` (with optional tag `T = t(X)`) and quantum parts
/// held by Bob and Eve.
#[derive(Debug, Clone)]
pub struct CcqState {
    outcomes: Vec<(f64, DensityMatrix)>,
    bob: Vec<String>,
    eve: Vec<String>,
    tags: Option<Vec<usize>>,
}

impl CcqState {
    /// `outcomes[x] = (p_x, ρ_{BE|x})`. Zero-probability outcomes may carry
    /// any state of the right layout.
    pub fn new(
        outcomes: Vec<(f64, DensityMatrix)>,
        bob: &[&str],
        eve: &[&str],
        tags: Option<Vec<usize>>,
    ) -> Result<Self> {
        check_disjoint(&[bob, eve])?;
        let first = outcomes.first().ok_or_else(|| Error::invalid("ccq state needs outcomes"))?;
        let dims = first.1.dims().clone();
        for l in bob.iter().chain(eve) {
            dims.position(l)?;
        }
        let mut total = 0.0;
        for (p, rho) in &outcomes {
            if *p < -TOL_TRACE {
                return Err(Error::invalid(format!("negative outcome probability {p}")));
            }
            if rho.dims() != &dims {
                return Err(Error::invalid("conditional states have different layouts"));
            }
            total += p;
        }
        if (total - 1.0).abs() > TOL_TRACE {
            return Err(Error::TraceNotOne(total));
        }
        if let Some(t) = &tags {
            if t.len() != outcomes.len() {
                return Err(Error::DimensionMismatch {
                    expected: outcomes.len(),
                    got: t.len(),
                });
            }
        }
        Ok(Self {
            outcomes,
            bob: bob.iter().map(|s| s.to_string()).collect(),
            eve: eve.iter().map(|s| s.to_string()).collect(),
            tags,
        })
    }

    /// Measure `alice` on `rho` with `povm`; systems outside
    /// `alice ∪ bob ∪ eve` are discarded.
    pub fn from_measurement(
        rho: &DensityMatrix,
        alice: &[&str],
        bob: &[&str],
        eve: &[&str],
        povm: &Povm,
        tags: Option<Vec<usize>>,
    ) -> Result<Self> {
        check_disjoint(&[alice, bob, eve])?;
        if alice.is_empty() {
            return Err(Error::invalid("Alice must hold at least one system"));
        }
        let order: Vec<&str> = alice.iter().chain(bob).chain(eve).copied().collect();
        let reduced = rho.reduce(&order)?.permute(&order)?;
        let d_a = reduced.dims().dim_of_all(alice)?;
        if povm.dim() != d_a {
            return Err(Error::DimensionMismatch {
                expected: d_a,
                got: povm.dim(),
            });
        }
        let rest_labels: Vec<&str> = bob.iter().chain(eve).copied().collect();
        let rest_dims = if rest_labels.is_empty() {
            SubsystemDims::empty()
        } else {
            reduced.dims().select(&reduced.dims().positions_sorted(&rest_labels)?)
        };
        let n = rest_dims.total();
        let m = reduced.matrix();
        let mut outcomes = Vec::with_capacity(povm.len());
        for q in povm.elements() {
            // tr_A[(Q ⊗ 1) ρ] = Σ_{a,a'} Q_{a a'} ρ_{(a' ·),(a ·)}
            let mut acc = CMatrix::zeros(n, n);
            for a in 0..d_a {
                for ap in 0..d_a {
                    let w = q[(a, ap)];
                    if w == linalg::ZERO {
                        continue;
                    }
                    acc += m.view((ap * n, a * n), (n, n)) * w;
                }
            }
            let p = linalg::trace(&acc).re;
            let state = if p > TOL_PSD {
                DensityMatrix::from_matrix(acc / linalg::r(p), rest_dims.clone())?
            } else {
                DensityMatrix::maximally_mixed(rest_dims.clone())
            };
            outcomes.push((p.max(0.0), state));
        }
        let total: f64 = outcomes.iter().map(|o| o.0).sum();
        for o in &mut outcomes {
            o.0 /= total;
        }
        let bob_ref: Vec<&str> = bob.to_vec();
        let eve_ref: Vec<&str> = eve.to_vec();
        Self::new(outcomes, &bob_ref, &eve_ref, tags)
    }

    pub fn outcomes(&self) -> &[(f64, DensityMatrix)] {
        &self.outcomes
    }

    /// `I(X:S|T)` for the quantum part `S` given by `labels`.
    pub fn holevo(&self, labels: &[String]) -> Result<f64> {
        if labels.is_empty() {
            return Ok(0.0);
        }
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let n_tags = self
            .tags
            .as_ref()
            .map(|t| t.iter().copied().max().unwrap_or(0) + 1)
            .unwrap_or(1);
        let mut total = 0.0;
        for t in 0..n_tags {
            let members: Vec<usize> = (0..self.outcomes.len())
                .filter(|&x| self.tags.as_ref().is_none_or(|tags| tags[x] == t))
                .collect();
            let p_t: f64 = members.iter().map(|&x| self.outcomes[x].0).sum();
            if p_t <= 0.0 {
                continue;
            }
            let mut avg: Option<Operator> = None;
            let mut cond = 0.0;
            for &x in &members {
                let (p, rho) = &self.outcomes[x];
                if *p <= 0.0 {
                    continue;
                }
                let marg = rho.reduce(&refs)?;
                cond += p / p_t * von_neumann_entropy(&marg);
                let scaled = marg.op().scale(p / p_t);
                avg = Some(match avg {
                    None => scaled,
                    Some(a) => a.try_add(&scaled)?,
                });
            }
            let avg = DensityMatrix::new(avg.expect("p_t > 0 implies a member"))?;
            total += p_t * (von_neumann_entropy(&avg) - cond);
        }
        Ok(total)
    }

    /// `I(X:B|T) - I(X:E|T)`.
    pub fn rate(&self) -> Result<f64> {
        Ok(self.holevo(&self.bob)? - self.holevo(&self.eve)?)
    }
}

/// One-way Devetak–Winter rate `I(X:B|T) - I(X:E|T)` for a given
/// measurement on Alice's systems. No optimization over strategies.
pub fn dw_rate(
    psi: &PureState,
    alice: &[&str],
    bob: &[&str],
    eve: &[&str],
    povm: &Povm,
    tags: Option<Vec<usize>>,
) -> Result<f64> {
    CcqState::from_measurement(&psi.density(), alice, bob, eve, povm, tags)?.rate()
}
