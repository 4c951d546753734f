use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// One labelled tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labelled tensor factors.
///
/// The order is positional: factor 0 is the most significant digit of the
/// computational-basis index. Nothing reorders factors implicitly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SubsystemDims {
    factors: Vec<Factor>,
}

impl SubsystemDims {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|(label, dim)| Factor {
                label: label.into(),
                dim,
            })
            .collect();
        for (i, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(Error::invalid(format!("factor `{}` has dimension 0", f.label)));
            }
            if factors[..i].iter().any(|g| g.label == f.label) {
                return Err(Error::DuplicateLabel(f.label.clone()));
            }
        }
        Ok(Self { factors })
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Self {
        Self::new([(label.into(), dim)]).expect("single factor with positive dim")
    }

    /// No factors at all; total dimension 1.
    pub fn empty() -> Self {
        Self { factors: vec![] }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|f| f.label.as_str())
    }

    pub fn contains(&self, label: &str) -> bool {
        self.factors.iter().any(|f| f.label == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.position(label)?].dim)
    }

    /// Product of the dimensions of the named factors.
    pub fn dim_of_all(&self, labels: &[&str]) -> Result<usize> {
        labels.iter().map(|l| self.dim_of(l)).product()
    }

    pub fn concat(&self, other: &SubsystemDims) -> Result<Self> {
        Self::new(
            self.factors
                .iter()
                .chain(other.factors.iter())
                .map(|f| (f.label.clone(), f.dim)),
        )
    }

    /// Positions of `labels`, validated, sorted into original factor order.
    pub fn positions_sorted(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut pos = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self.position(l)?;
            if pos.contains(&p) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            pos.push(p);
        }
        pos.sort_unstable();
        Ok(pos)
    }

    /// Sub-list of factors at the given positions (in the given order).
    pub fn select(&self, positions: &[usize]) -> Self {
        Self {
            factors: positions.iter().map(|&p| self.factors[p].clone()).collect(),
        }
    }

    /// Row-major strides: index = sum digit_k * stride_k.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for k in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.factors[k + 1].dim;
        }
        strides
    }

    /// Replace the factor at `pos` by a list of factors whose dims multiply
    /// to the original one.
    pub fn split(&self, pos: usize, parts: &[(String, usize)]) -> Result<Self> {
        let prod: usize = parts.iter().map(|p| p.1).product();
        if prod != self.factors[pos].dim {
            return Err(Error::DimensionMismatch {
                expected: self.factors[pos].dim,
                got: prod,
            });
        }
        let mut out: Vec<(String, usize)> = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            if i == pos {
                out.extend(parts.iter().cloned());
            } else {
                out.push((f.label.clone(), f.dim));
            }
        }
        Self::new(out)
    }

    pub fn with_dim(&self, pos: usize, dim: usize) -> Self {
        let mut out = self.clone();
        out.factors[pos].dim = dim;
        out
    }

    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.factors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.factors.len(),
                got: labels.len(),
            });
        }
        Self::new(labels.iter().zip(&self.factors).map(|(l, f)| (l.to_string(), f.dim)))
    }
}

impl fmt::Display for SubsystemDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, fac) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "⊗")?;
            }
            write!(f, "{}:{}", fac.label, fac.dim)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_zero() {
        assert!(matches!(
            SubsystemDims::new([("A", 2), ("A", 2)]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(SubsystemDims::new([("A", 0)]).is_err());
    }

    #[test]
    fn strides_are_row_major() {
        let d = SubsystemDims::new([("A", 2), ("B", 3), ("C", 4)]).unwrap();
        assert_eq!(d.strides(), vec![12, 4, 1]);
        assert_eq!(d.total(), 24);
    }

    #[test]
    fn split_preserves_order() {
        let d = SubsystemDims::new([("A", 2), ("S", 8)]).unwrap();
        let s = d.split(1, &[("S0".into(), 2), ("S1".into(), 4)]).unwrap();
        assert_eq!(s.labels().collect::<Vec<_>>(), vec!["A", "S0", "S1"]);
        assert!(d.split(1, &[("x".into(), 3)]).is_err());
    }
}
