use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::entropy::check_disjoint;
use crate::qcore::{binary_entropy, entropy_of, DensityMatrix};

use super::measures::recovery_delta;

/// Entropies and dimensions the leakage bounds are built from. All
/// entropies in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageInputs {
    /// `S(a)` of the leaked system.
    pub s_a: f64,
    /// `log₂|a|`.
    pub log_a: f64,
    /// `S(b)` for a leak from Bob's side.
    pub s_b: f64,
    /// `S(x)` for a leaked copy.
    pub s_x: f64,
    /// `δ = √(1 - 2^{-I})` from the recovery bound.
    pub delta: f64,
    pub d_a: usize,
    pub d_big_a: usize,
    pub d_b: usize,
    pub d_x: usize,
    pub s_sigma_c: f64,
    pub s_sigma_d: f64,
    /// `I(A:C|B)`.
    pub cmi_a_c_given_b: f64,
    /// Caller-supplied regularized relative entropy of entanglement.
    pub er_inf: Option<f64>,
    /// `log₂|x|` for the single-shot drop.
    pub log_x: f64,
}

impl Default for LeakageInputs {
    fn default() -> Self {
        Self {
            s_a: 0.0,
            log_a: 0.0,
            s_b: 0.0,
            s_x: 0.0,
            delta: 0.0,
            d_a: 1,
            d_big_a: 1,
            d_b: 1,
            d_x: 1,
            s_sigma_c: 0.0,
            s_sigma_d: 0.0,
            cmi_a_c_given_b: 0.0,
            er_inf: None,
            log_x: 0.0,
        }
    }
}

impl LeakageInputs {
    /// Read the inputs off a state on `a ∪ A ∪ B (∪ rest)`: the leaked system
    /// `a` also plays the role of `b` and `x`, δ uses `I(a:B rest|A)`, and
    /// `d_X = d_A`.
    pub fn from_state(rho: &DensityMatrix, a: &[&str], big_a: &[&str], b: &[&str]) -> Result<Self> {
        check_disjoint(&[a, big_a, b])?;
        let dims = rho.dims();
        let rest: Vec<&str> = dims
            .labels()
            .filter(|l| !a.contains(l) && !big_a.contains(l))
            .collect();
        for l in b {
            dims.position(l)?;
        }
        let s_a = entropy_of(rho, a)?;
        let d_a = dims.dim_of_all(a)?;
        let d_big_a = dims.dim_of_all(big_a)?;
        Ok(Self {
            s_a,
            log_a: (d_a as f64).log2(),
            s_b: s_a,
            s_x: s_a,
            delta: recovery_delta(rho, a, &rest, big_a)?,
            d_a,
            d_big_a,
            d_b: dims.dim_of_all(b)?,
            d_x: d_big_a,
            log_x: (d_a as f64).log2(),
            ..Self::default()
        })
    }

    fn validate(&self) -> Result<()> {
        let entropies = [
            ("s_a", self.s_a),
            ("log_a", self.log_a),
            ("s_b", self.s_b),
            ("s_x", self.s_x),
            ("s_sigma_c", self.s_sigma_c),
            ("s_sigma_d", self.s_sigma_d),
            ("cmi_a_c_given_b", self.cmi_a_c_given_b),
            ("log_x", self.log_x),
        ];
        for (name, v) in entropies {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "[0, ∞)",
                });
            }
        }
        if let Some(e) = self.er_inf {
            if !(e >= 0.0) || !e.is_finite() {
                return Err(Error::OutOfRange {
                    name: "er_inf",
                    value: e,
                    range: "[0, ∞)",
                });
            }
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::OutOfRange {
                name: "delta",
                value: self.delta,
                range: "[0, 1]",
            });
        }
        for (name, d) in [("d_a", self.d_a), ("d_A", self.d_big_a), ("d_B", self.d_b), ("d_X", self.d_x)] {
            if d < 1 {
                return Err(Error::invalid(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// Class of resources a bound is proven for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Applicability {
    IrreduciblePrivateState,
    RawKey,
    IidKey,
    ProductExtension,
    MaximallyCorrelated,
    Randomness,
    SingleShot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: &'static str,
    pub value: f64,
    pub applies_to: Applicability,
}

/// Upper bounds, in bits, on how much a resource can drop when a system
/// leaks. `None` marks a bound whose inputs were not supplied or whose
/// hypotheses fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageBoundReport {
    pub delta: f64,
    /// `2S(a)`, irreducible private states.
    pub two_s_a: f64,
    /// `log₂|a| + S(a)`, private randomness.
    pub s_a_plus_log_a: f64,
    /// `4S(b)`, one-way key with a leak from Bob.
    pub four_s_b: f64,
    /// `2S(x)`, one-way key with a leaked copy.
    pub two_s_a_copy: f64,
    /// `S(a)`, maximally correlated states.
    pub s_a_mcs: f64,
    /// `8δ log₂(d_A d_a) + 4h(δ)`, single-copy one-way key.
    pub delta_bound_single_copy: f64,
    /// `4δ log₂(d_a d_A d_B²) + 4h(δ)`, i.i.d. key.
    pub delta_bound_thm: f64,
    /// `8δ log₂ d_X + 4h(δ)`.
    pub delta_bound_dimx: f64,
    /// `8δ log₂ d_A + 4h(δ)`, private states.
    pub delta_bound_cor_main: f64,
    /// `(4δ + 4√(2δ)) log₂ d_A + 2h(δ) + 2h(√(2δ))` for inputs at trace
    /// distance δ; `None` unless `δ ≤ 1/8` so that `√(2δ) ≤ ½`.
    pub continuity: Option<f64>,
    /// `min{S(σ_C), S(σ_D)}` for a product extension.
    pub product_bound: f64,
    /// `I(A:C|B) + E_R^∞`, when `E_R^∞` is supplied.
    pub cmi_plus_er: Option<f64>,
    /// `log₂|x|`, single-shot key.
    pub single_shot_log: f64,
}

impl LeakageBoundReport {
    pub fn entries(&self) -> Vec<BoundEntry> {
        use Applicability::*;
        let mut out = vec![
            BoundEntry { name: "two_S_a", value: self.two_s_a, applies_to: IrreduciblePrivateState },
            BoundEntry { name: "S_a_plus_log_a", value: self.s_a_plus_log_a, applies_to: Randomness },
            BoundEntry { name: "four_S_b", value: self.four_s_b, applies_to: RawKey },
            BoundEntry { name: "two_S_a_copy", value: self.two_s_a_copy, applies_to: RawKey },
            BoundEntry { name: "S_a_mcs", value: self.s_a_mcs, applies_to: MaximallyCorrelated },
            BoundEntry { name: "delta_bound_single_copy", value: self.delta_bound_single_copy, applies_to: RawKey },
            BoundEntry { name: "delta_bound_thm", value: self.delta_bound_thm, applies_to: IidKey },
            BoundEntry { name: "delta_bound_dimX", value: self.delta_bound_dimx, applies_to: IidKey },
            BoundEntry { name: "delta_bound_cor_main", value: self.delta_bound_cor_main, applies_to: IrreduciblePrivateState },
            BoundEntry { name: "product_bound", value: self.product_bound, applies_to: ProductExtension },
            BoundEntry { name: "single_shot_log", value: self.single_shot_log, applies_to: SingleShot },
        ];
        if let Some(v) = self.continuity {
            out.push(BoundEntry { name: "continuity", value: v, applies_to: RawKey });
        }
        if let Some(v) = self.cmi_plus_er {
            out.push(BoundEntry { name: "cmi_plus_er", value: v, applies_to: IidKey });
        }
        out
    }
}

fn lg(d: usize) -> f64 {
    (d as f64).log2()
}

pub fn leakage_bounds(inputs: &LeakageInputs) -> Result<LeakageBoundReport> {
    inputs.validate()?;
    let d = inputs.delta;
    let hd = binary_entropy(d)?;
    let continuity = if d <= 0.125 {
        let s = (2.0 * d).sqrt();
        Some((4.0 * d + 4.0 * s) * lg(inputs.d_big_a) + 2.0 * hd + 2.0 * binary_entropy(s)?)
    } else {
        None
    };
    Ok(LeakageBoundReport {
        delta: d,
        two_s_a: 2.0 * inputs.s_a,
        s_a_plus_log_a: inputs.s_a + inputs.log_a,
        four_s_b: 4.0 * inputs.s_b,
        two_s_a_copy: 2.0 * inputs.s_x,
        s_a_mcs: inputs.s_a,
        delta_bound_single_copy: 8.0 * d * lg(inputs.d_big_a * inputs.d_a) + 4.0 * hd,
        delta_bound_thm: 4.0 * d * lg(inputs.d_a * inputs.d_big_a * inputs.d_b * inputs.d_b) + 4.0 * hd,
        delta_bound_dimx: 8.0 * d * lg(inputs.d_x) + 4.0 * hd,
        delta_bound_cor_main: 8.0 * d * lg(inputs.d_big_a) + 4.0 * hd,
        continuity,
        product_bound: inputs.s_sigma_c.min(inputs.s_sigma_d),
        cmi_plus_er: inputs.er_inf.map(|e| inputs.cmi_a_c_given_b + e),
        single_shot_log: inputs.log_x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let delta = 0.5f64.sqrt();
        let r = leakage_bounds(&LeakageInputs {
            s_a: 1.0,
            d_big_a: 2,
            delta,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(r.two_s_a, 2.0);
        // direct arithmetic: 8δ + 4h(δ)
        let h = -delta * delta.log2() - (1.0 - delta) * (1.0 - delta).log2();
        assert!((r.delta_bound_cor_main - (8.0 * delta + 4.0 * h)).abs() < 1e-12);
        assert!((r.delta_bound_cor_main - 9.146_572).abs() < 1e-5);
        assert!(r.continuity.is_none());
    }

    #[test]
    fn zero_delta_zeroes_delta_bounds() {
        let r = leakage_bounds(&LeakageInputs {
            d_a: 4,
            d_big_a: 8,
            d_b: 2,
            d_x: 8,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(r.delta_bound_thm, 0.0);
        assert_eq!(r.delta_bound_dimx, 0.0);
        assert_eq!(r.delta_bound_cor_main, 0.0);
        assert_eq!(r.delta_bound_single_copy, 0.0);
        assert_eq!(r.continuity, Some(0.0));
    }

    #[test]
    fn rejects_negative_entropy() {
        let bad = LeakageInputs {
            s_a: -0.1,
            ..Default::default()
        };
        assert!(leakage_bounds(&bad).is_err());
        let bad = LeakageInputs {
            d_b: 0,
            ..Default::default()
        };
        assert!(leakage_bounds(&bad).is_err());
    }
}
