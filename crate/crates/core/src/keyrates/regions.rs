use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::binary_entropy;

use super::measures::delta_from_cmi;

/// Which region comparison to tabulate.
///
/// * `Fig2`: is `8δ log d_A + 4h(δ) ≤ 2S(a)` with `δ = √(1 - 2^{-I(a:B|A)})`;
///   x is `I(a:B|A)`, y is `S(a)`.
/// * `Fig4`: is `8δ log d_A + 4h(δ) ≤ min{S(σ_C), S(σ_D)}` with
///   `δ = √(1 - 2^{-I(C:D)})`; x is `I(C:D)`, y is the minimum entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Fig2,
    Fig4,
}

impl FromStr for RegionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig2" => Ok(RegionKind::Fig2),
            "fig4" => Ok(RegionKind::Fig4),
            _ => Err(Error::invalid(format!("unknown region kind `{s}` (fig2 or fig4)"))),
        }
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionKind::Fig2 => "fig2",
            RegionKind::Fig4 => "fig4",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionGrid {
    pub kind: RegionKind,
    pub d_a: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `inside[i][j]` for `(x[i], y[j])`.
    pub inside: Vec<Vec<bool>>,
}

/// `8δ log₂ d_A + 4h(δ)` at information value `i`.
pub fn region_lhs(i: f64, d_a: usize) -> f64 {
    let delta = delta_from_cmi(i);
    8.0 * delta * (d_a as f64).log2() + 4.0 * binary_entropy(delta).expect("δ ∈ [0, 1]")
}

pub fn region_grid(kind: RegionKind, x_grid: &[f64], y_grid: &[f64], d_a: usize) -> Result<RegionGrid> {
    if d_a < 1 {
        return Err(Error::invalid("d_A must be at least 1"));
    }
    if let Some(v) = x_grid.iter().chain(y_grid).find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("grid value {v} is not finite")));
    }
    let scale = match kind {
        RegionKind::Fig2 => 2.0,
        RegionKind::Fig4 => 1.0,
    };
    let inside = x_grid
        .iter()
        .map(|&x| {
            let lhs = region_lhs(x, d_a);
            y_grid.iter().map(|&y| lhs <= scale * y).collect()
        })
        .collect();
    Ok(RegionGrid {
        kind,
        d_a,
        x: x_grid.to_vec(),
        y: y_grid.to_vec(),
        inside,
    })
}
