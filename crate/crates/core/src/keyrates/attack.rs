use serde::Serialize;

use crate::channels::{standard_channel, ChannelKind, KrausChannel};
use crate::error::{Error, Result};
use crate::qcore::entropy::relative_entropy_in_basis;
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::{shannon_entropy, DensityMatrix, Operator};
use crate::states::{gamma_swap, swap_witness, KEY_A, KEY_B, SHIELD_A};

use super::witness::{attacked_witness_norm, witness_from_norm};

/// 201 uniform points on `[0, 1]`.
pub fn default_p_grid() -> Vec<f64> {
    (0..=200).map(|k| k as f64 / 200.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErBound {
    pub value: f64,
    pub p_opt: f64,
}

/// Minimum over `p` of `D(Λ(γ) ‖ (1-p)σ_att + p 1/N)`, with
/// `σ_att = Λ(½(|00⟩⟨00| + |11⟩⟨11|) ⊗ 1_shield / n)` and Λ on `A'`.
///
/// The grid minimum is refined by a golden-section search on the bracket
/// around it. Points where the divergence is infinite are skipped; if all
/// are, the result is `+∞`.
pub fn er_upper_bound_attack(gamma: &DensityMatrix, ch: &KrausChannel, p_grid: &[f64]) -> Result<ErBound> {
    if p_grid.is_empty() {
        return Err(Error::invalid("p grid is empty"));
    }
    if let Some(&p) = p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    let tau = dephased_reference(gamma)?;
    let rho = ch.apply_on_factor(gamma, SHIELD_A)?;
    let sigma_att = ch.apply_on_factor(&tau, SHIELD_A)?;
    Ok(minimize_over_mixing(&rho, &sigma_att, p_grid))
}

/// `½(|00⟩⟨00| + |11⟩⟨11|)_AB ⊗ 1/n` on the layout of `gamma`.
fn dephased_reference(gamma: &DensityMatrix) -> Result<DensityMatrix> {
    let dims = gamma.dims();
    if dims.len() < 3 || dims.factors()[0].label != KEY_A || dims.factors()[1].label != KEY_B {
        return Err(Error::invalid(format!(
            "expected a state on A B A' ..., got layout {dims}"
        )));
    }
    let n = gamma.dim() / 4;
    let mut m = CMatrix::zeros(gamma.dim(), gamma.dim());
    let w = linalg::r(0.5 / n as f64);
    for k in 0..n {
        m[(k, k)] = w;
        m[(3 * n + k, 3 * n + k)] = w;
    }
    DensityMatrix::new(Operator::new(m, dims.clone())?)
}

/// σ(p) shares the eigenbasis of σ_att, so one diagonalization serves the
/// whole grid. Both inputs are first cut down to the rows where either is
/// nonzero; outside that span σ(p) is `p/N · 1` and ρ has no weight, so the
/// divergence is unchanged.
fn minimize_over_mixing(rho: &DensityMatrix, sigma_att: &DensityMatrix, grid: &[f64]) -> ErBound {
    let support = joint_support(rho.matrix(), sigma_att.matrix());
    let r = restrict(rho.matrix(), &support);
    let (vals, vecs) = linalg::hermitian_eigen(&restrict(sigma_att.matrix(), &support));
    let rv = &r * &vecs;
    let weights: Vec<f64> = (0..vecs.ncols()).map(|k| vecs.column(k).dotc(&rv.column(k)).re).collect();
    let neg_s = -shannon_entropy(&linalg::hermitian_eigenvalues(&r).iter().map(|x| x.max(0.0)).collect::<Vec<_>>());
    let inv_n = 1.0 / rho.dim() as f64;
    let f = |p: f64| {
        let mixed: Vec<f64> = vals.iter().map(|&s| (1.0 - p) * s.max(0.0) + p * inv_n).collect();
        relative_entropy_in_basis(neg_s, &weights, &mixed)
    };
    let values: Vec<f64> = grid.iter().map(|&p| f(p)).collect();
    let best = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k);
    let Some(k) = best else {
        return ErBound {
            value: f64::INFINITY,
            p_opt: f64::NAN,
        };
    };
    let mut sorted: Vec<f64> = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = sorted.partition_point(|&p| p < grid[k]);
    let lo = sorted[pos.saturating_sub(1)];
    let hi = sorted[(pos + 1).min(sorted.len() - 1)];
    let (p_gs, v_gs) = golden_section(&f, lo, hi);
    if v_gs < values[k] {
        ErBound {
            value: v_gs,
            p_opt: p_gs,
        }
    } else {
        ErBound {
            value: values[k],
            p_opt: grid[k],
        }
    }
}

fn joint_support(a: &CMatrix, b: &CMatrix) -> Vec<usize> {
    const ZERO_ENTRY: f64 = 1e-15;
    (0..a.nrows())
        .filter(|&i| a.row(i).iter().chain(b.row(i).iter()).any(|z| z.norm() > ZERO_ENTRY))
        .collect()
}

fn restrict(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// One row of an attack sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttackPoint {
    pub alpha: f64,
    pub trace_norm_witness: f64,
    pub psq_key_witness: f64,
    pub er_upper_bound: f64,
}

/// `γ_V` and its corner for a fixed shield dimension, reused across a sweep.
#[derive(Debug, Clone)]
pub struct AttackSetup {
    d_s: usize,
    gamma: DensityMatrix,
    tau: DensityMatrix,
    x: Operator,
}

impl AttackSetup {
    pub fn new(d_s: usize) -> Result<Self> {
        let gamma = gamma_swap(d_s)?;
        let tau = dephased_reference(&gamma)?;
        Ok(Self {
            d_s,
            gamma,
            tau,
            x: swap_witness(d_s)?,
        })
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn gamma(&self) -> &DensityMatrix {
        &self.gamma
    }

    pub fn witness(&self) -> &Operator {
        &self.x
    }

    pub fn point(&self, kind: ChannelKind, alpha: f64, p_grid: &[f64]) -> Result<AttackPoint> {
        if p_grid.is_empty() {
            return Err(Error::invalid("p grid is empty"));
        }
        let ch = standard_channel(kind, alpha)?;
        let c = attacked_witness_norm(&self.x, &ch)?;
        let rho = ch.apply_on_factor(&self.gamma, SHIELD_A)?;
        let sigma_att = ch.apply_on_factor(&self.tau, SHIELD_A)?;
        let er = minimize_over_mixing(&rho, &sigma_att, p_grid);
        Ok(AttackPoint {
            alpha,
            trace_norm_witness: c,
            psq_key_witness: witness_from_norm(c.min(0.5))?,
            er_upper_bound: er.value,
        })
    }
}
