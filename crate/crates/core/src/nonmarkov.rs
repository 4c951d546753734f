//! Trace-norm trajectories `f(t) = ‖(Λ_t ⊗ 1)X‖₁`, the key witness
//! `g(t) = 1 - h(½ + f(t))`, and detection of time intervals where either
//! increases. An increase certifies that the dynamics is not CP-divisible.

use std::fmt;

use serde::Serialize;

use crate::channels::DynamicsFamily;
use crate::error::{Error, Result};
use crate::keyrates::witness_from_norm;
use crate::qcore::tol::{TOL_HERM, TOL_TRACE};
use crate::qcore::Operator;

pub const DEFAULT_DERIV_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub t_values: Vec<f64>,
    pub f_values: Vec<f64>,
    /// Present when `‖X‖₁ ≤ ½`.
    pub g_values: Option<Vec<f64>>,
    pub x_norm: f64,
}

/// Sample `f` (and `g` when defined) on `grid`; the channel acts on the
/// first factor of `x`.
pub fn trace_norm_trajectory(dynamics: &DynamicsFamily, x: &Operator, grid: &[f64]) -> Result<Trajectory> {
    if !x.is_hermitian(TOL_HERM) {
        return Err(Error::NotHermitian(x.hermiticity_defect()));
    }
    if grid.is_empty() {
        return Err(Error::invalid("time grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("time grid must be strictly increasing"));
    }
    let target = x
        .dims()
        .factors()
        .first()
        .ok_or_else(|| Error::invalid("X has no factors"))?
        .label
        .clone();
    let x_norm = x.trace_norm();
    let f_values = grid
        .iter()
        .map(|&t| Ok(dynamics.at(t)?.apply_on_factor_op(x, &target)?.trace_norm()))
        .collect::<Result<Vec<f64>>>()?;
    let g_values = if x_norm <= 0.5 + TOL_TRACE {
        Some(
            f_values
                .iter()
                .map(|&f| witness_from_norm(f.min(0.5)))
                .collect::<Result<Vec<f64>>>()?,
        )
    } else {
        None
    };
    Ok(Trajectory {
        t_values: grid.to_vec(),
        f_values,
        g_values,
        x_norm,
    })
}

/// Central differences inside, one-sided at the two ends.
pub fn finite_differences(t: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let n = t.len();
    if n < 3 || y.len() != n {
        return Err(Error::invalid("need at least 3 samples of matching length"));
    }
    Ok((0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            (y[b] - y[a]) / (t[b] - t[a])
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// No increase found on the sampled grid; nothing is claimed off-grid.
    MarkovianOnGrid,
    Nonmarkovian,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::MarkovianOnGrid => "markovian_on_grid",
            Verdict::Nonmarkovian => "nonmarkovian",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub t_start: f64,
    pub t_end: f64,
    pub max_derivative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonmarkovReport {
    pub intervals: Vec<Interval>,
    pub verdict: Verdict,
    pub deriv_tol: f64,
    pub df_dt: Vec<f64>,
    pub dg_dt: Option<Vec<f64>>,
}

/// Maximal runs of grid points where the derivative of the witness exceeds
/// `deriv_tol`. The witness is `g` when available, otherwise `f`.
pub fn detect_nonmarkov(traj: &Trajectory, deriv_tol: f64) -> Result<NonmarkovReport> {
    if !(deriv_tol >= 0.0) {
        return Err(Error::OutOfRange {
            name: "deriv_tol",
            value: deriv_tol,
            range: "[0, ∞)",
        });
    }
    let t = &traj.t_values;
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("time grid must be strictly increasing"));
    }
    let df = finite_differences(t, &traj.f_values)?;
    let dg = traj.g_values.as_ref().map(|g| finite_differences(t, g)).transpose()?;
    let d = dg.as_ref().unwrap_or(&df);
    let mut intervals = Vec::new();
    let mut i = 0;
    while i < d.len() {
        if d[i] > deriv_tol {
            let start = i;
            let mut max = d[i];
            while i + 1 < d.len() && d[i + 1] > deriv_tol {
                i += 1;
                max = max.max(d[i]);
            }
            intervals.push(Interval {
                t_start: t[start],
                t_end: t[i],
                max_derivative: max,
            });
        }
        i += 1;
    }
    let verdict = if intervals.is_empty() {
        Verdict::MarkovianOnGrid
    } else {
        Verdict::Nonmarkovian
    };
    Ok(NonmarkovReport {
        intervals,
        verdict,
        deriv_tol,
        df_dt: df,
        dg_dt: dg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{standard_dynamics, DynamicsKind};
    use crate::states::coherence_witness;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn identity_dynamics_is_constant() {
        let x = coherence_witness();
        let traj = trace_norm_trajectory(&DynamicsFamily::identity(2), &x, &grid(0.0, 1.0, 11)).unwrap();
        assert!(traj.f_values.iter().all(|&f| (f - 0.5).abs() < 1e-12));
        let rep = detect_nonmarkov(&traj, DEFAULT_DERIV_TOL).unwrap();
        assert_eq!(rep.verdict, Verdict::MarkovianOnGrid);
    }

    #[test]
    fn semigroup_closed_form() {
        let dynamics = standard_dynamics(DynamicsKind::SemigroupDephasing { gamma: 1.0 }, 3.0).unwrap();
        let g = grid(0.0, 3.0, 31);
        let traj = trace_norm_trajectory(&dynamics, &coherence_witness(), &g).unwrap();
        for (t, f) in g.iter().zip(&traj.f_values) {
            assert!((f - 0.5 * (-t).exp()).abs() < 1e-12);
        }
        assert!(detect_nonmarkov(&traj, DEFAULT_DERIV_TOL).unwrap().intervals.is_empty());
    }

    #[test]
    fn rejects_bad_inputs() {
        let dynamics = DynamicsFamily::identity(2);
        let x = coherence_witness();
        assert!(trace_norm_trajectory(&dynamics, &x, &[0.0, 0.0, 1.0]).is_err());
        let nonherm = Operator::new(
            crate::qcore::linalg::real_matrix(4, &[0., 1., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.]),
            x.dims().clone(),
        )
        .unwrap();
        assert!(matches!(
            trace_norm_trajectory(&dynamics, &nonherm, &[0.0, 1.0, 2.0]),
            Err(Error::NotHermitian(_))
        ));
        let traj = trace_norm_trajectory(&dynamics, &x, &[0.0, 1.0]).unwrap();
        assert!(detect_nonmarkov(&traj, DEFAULT_DERIV_TOL).is_err());
    }
}
