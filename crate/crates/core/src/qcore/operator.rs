use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::dims::SubsystemDims;
use super::linalg::{self, CMatrix};
use crate::error::{Error, Result};

/// Square complex matrix tagged with its tensor-factor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: CMatrix,
    dims: SubsystemDims,
}

/// Full-space index offsets of every digit combination over `positions`
/// (row-major in the order given).
pub(crate) fn digit_offsets(dims: &SubsystemDims, positions: &[usize]) -> Vec<usize> {
    let strides = dims.strides();
    let mut offsets = vec![0usize];
    for &p in positions {
        let d = dims.factors()[p].dim;
        let mut next = Vec::with_capacity(offsets.len() * d);
        for &o in &offsets {
            for k in 0..d {
                next.push(o + k * strides[p]);
            }
        }
        offsets = next;
    }
    offsets
}

impl Operator {
    pub fn new(mat: CMatrix, dims: SubsystemDims) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::invalid(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                got: mat.nrows(),
            });
        }
        Ok(Self { mat, dims })
    }

    /// Single-factor operator.
    pub fn on(label: &str, mat: CMatrix) -> Result<Self> {
        let n = mat.nrows();
        Self::new(mat, SubsystemDims::single(label, n))
    }

    pub fn identity(dims: SubsystemDims) -> Self {
        let n = dims.total();
        Self {
            mat: linalg::identity(n),
            dims,
        }
    }

    pub fn zeros(dims: SubsystemDims) -> Self {
        let n = dims.total();
        Self {
            mat: CMatrix::zeros(n, n),
            dims,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            dims: self.dims.clone(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.mat)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mat: &self.mat * Complex64::new(s, 0.0),
            dims: self.dims.clone(),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        Ok(Self {
            mat: self.mat.clone(),
            dims: self.dims.relabel(labels)?,
        })
    }

    /// Same matrix with a new layout of equal total dimension.
    pub fn reshape_dims(&self, dims: SubsystemDims) -> Result<Self> {
        Self::new(self.mat.clone(), dims)
    }

    fn check_same_dims(&self, other: &Operator) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Operator) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            mat: &self.mat + &other.mat,
            dims: self.dims.clone(),
        })
    }

    pub fn try_sub(&self, other: &Operator) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            mat: &self.mat - &other.mat,
            dims: self.dims.clone(),
        })
    }

    pub fn try_mul(&self, other: &Operator) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            mat: &self.mat * &other.mat,
            dims: self.dims.clone(),
        })
    }

    /// Kronecker product; the layout is the concatenation of both layouts.
    pub fn tensor(&self, other: &Operator) -> Result<Self> {
        Ok(Self {
            mat: linalg::kron(&self.mat, &other.mat),
            dims: self.dims.concat(&other.dims)?,
        })
    }

    /// Trace out everything except `keep`. Kept factors stay in their
    /// original relative order regardless of the order in `keep`.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let kept = self.dims.positions_sorted(keep)?;
        let traced: Vec<usize> = (0..self.dims.len()).filter(|p| !kept.contains(p)).collect();
        let keep_off = digit_offsets(&self.dims, &kept);
        let tr_off = digit_offsets(&self.dims, &traced);
        let n = keep_off.len();
        let mut out = CMatrix::zeros(n, n);
        for (i, &oi) in keep_off.iter().enumerate() {
            for (j, &oj) in keep_off.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &t in &tr_off {
                    acc += self.mat[(oi + t, oj + t)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(Self {
            mat: out,
            dims: self.dims.select(&kept),
        })
    }

    /// Trace out the named factors.
    pub fn trace_out(&self, remove: &[&str]) -> Result<Self> {
        for l in remove {
            self.dims.position(l)?;
        }
        let keep: Vec<&str> = self.dims.labels().filter(|l| !remove.contains(l)).collect();
        self.partial_trace(&keep)
    }

    /// Transpose on the named factors only.
    pub fn partial_transpose(&self, sys: &[&str]) -> Result<Self> {
        let pos = self.dims.positions_sorted(sys)?;
        let strides = self.dims.strides();
        let n = self.dim();
        // sys_part[i] = the part of index i carried by the transposed factors
        let sys_part: Vec<usize> = (0..n)
            .map(|i| {
                pos.iter()
                    .map(|&p| ((i / strides[p]) % self.dims.factors()[p].dim) * strides[p])
                    .sum()
            })
            .collect();
        let mut out = CMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let r2 = r - sys_part[r] + sys_part[c];
                let c2 = c - sys_part[c] + sys_part[r];
                out[(r2, c2)] = self.mat[(r, c)];
            }
        }
        Ok(Self {
            mat: out,
            dims: self.dims.clone(),
        })
    }

    /// Reorder the tensor factors to `order` (a permutation of all labels).
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.dims.len() {
            return Err(Error::invalid("permutation must name every factor exactly once"));
        }
        let mut pos = Vec::with_capacity(order.len());
        for l in order {
            let p = self.dims.position(l)?;
            if pos.contains(&p) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            pos.push(p);
        }
        // new index k enumerates digits in the new order; map to old offset
        let old_off = digit_offsets(&self.dims, &pos);
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (i, &oi) in old_off.iter().enumerate() {
            for (j, &oj) in old_off.iter().enumerate() {
                out[(i, j)] = self.mat[(oi, oj)];
            }
        }
        Ok(Self {
            mat: out,
            dims: self.dims.select(&pos),
        })
    }

    /// Trace norm: Σ|λ| for hermitian input, sum of singular values otherwise.
    pub fn trace_norm(&self) -> f64 {
        trace_norm(&self.mat)
    }
}

pub fn trace_norm(m: &CMatrix) -> f64 {
    if linalg::hermiticity_defect(m) <= super::tol::TOL_HERM {
        linalg::hermitian_eigenvalues(m).iter().map(|x| x.abs()).sum()
    } else {
        linalg::singular_values(m).iter().sum()
    }
}

pub fn tensor_product(a: &Operator, b: &Operator) -> Result<Operator> {
    a.tensor(b)
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator layouts differ")
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.try_sub(rhs).expect("operator layouts differ")
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.try_mul(rhs).expect("operator layouts differ")
    }
}
