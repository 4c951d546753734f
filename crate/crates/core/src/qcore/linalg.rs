//! Dense complex kernels. Everything spectral goes through
//! [`hermitian_eigen`]; non-hermitian trace norms use singular values.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Max |A_ij - conj(A_ji)|.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * r(0.5)
}

/// Eigen-decomposition of the hermitian part of `m`. Eigenvalues ascending,
/// eigenvectors in the matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (vec![], CMatrix::zeros(0, 0));
    }
    let (raw_vals, raw_vecs) = robust_eigen(&hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw_vals[a].total_cmp(&raw_vals[b]));
    let vals = order.iter().map(|&k| raw_vals[k]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &raw_vecs.column(src));
    }
    (vals, vecs)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return vec![];
    }
    let h = hermitize(m);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    if v.iter().any(|x| !x.is_finite()) {
        v = robust_eigen(&h).0;
    }
    v.sort_by(f64::total_cmp);
    v
}

/// The QL iteration occasionally returns NaN on highly structured inputs
/// (exact zeros in a degenerate pattern). Retrying in a fixed pseudo-random
/// basis `W H W†` breaks the pattern; eigenvectors are mapped back by `W†`.
fn robust_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = h.clone().symmetric_eigen();
    if is_finite_eigen(&eig.eigenvalues, &eig.eigenvectors) {
        return (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors);
    }
    let n = h.nrows();
    for seed in 0..8u64 {
        let w = crate::random::random_unitary(n, &mut StdRng::seed_from_u64(0x9e37_79b9 + seed));
        let eig = (&w * h * w.adjoint()).symmetric_eigen();
        if is_finite_eigen(&eig.eigenvalues, &eig.eigenvectors) {
            return (eig.eigenvalues.iter().copied().collect(), w.adjoint() * eig.eigenvectors);
        }
    }
    panic!("hermitian eigensolver failed to converge on a {n}x{n} input");
}

fn is_finite_eigen(vals: &DVector<f64>, vecs: &CMatrix) -> bool {
    vals.iter().all(|x| x.is_finite()) && vecs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// V f(Λ) V† for the hermitian part of `m`.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    from_spectrum(&vals.iter().map(|&x| f(x)).collect::<Vec<_>>(), &vecs)
}

pub fn from_spectrum(vals: &[f64], vecs: &CMatrix) -> CMatrix {
    let mut scaled = vecs.clone();
    for (k, &v) in vals.iter().enumerate() {
        scaled.column_mut(k).scale_mut(v);
    }
    scaled * vecs.adjoint()
}

/// Square root of a PSD matrix. Eigenvalues below round-off level
/// (relative to the largest) are treated as zero so they do not turn into
/// square-rooted noise.
pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let top = vals.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let cut = 64.0 * f64::EPSILON * top;
    let roots: Vec<f64> = vals.iter().map(|&x| if x > cut { x.sqrt() } else { 0.0 }).collect();
    from_spectrum(&roots, &vecs)
}

/// `sqrt(A A†)` for arbitrary square `A`, via the SVD `A = U Σ V†`.
pub fn abs_left(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested");
    from_spectrum(svd.singular_values.as_slice(), &u)
}

/// `sqrt(A† A)` for arbitrary square `A`.
pub fn abs_right(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(false, true);
    let v = svd.v_t.expect("requested").adjoint();
    from_spectrum(svd.singular_values.as_slice(), &v)
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    m.singular_values().iter().copied().collect()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Build a matrix from real row-major entries.
pub fn real_matrix(n: usize, entries: &[f64]) -> CMatrix {
    assert_eq!(entries.len(), n * n);
    CMatrix::from_row_iterator(n, n, entries.iter().map(|&x| r(x)))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest entrywise deviation between two matrices of equal shape.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn pauli_x() -> CMatrix {
    real_matrix(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
}

pub fn pauli_z() -> CMatrix {
    real_matrix(2, &[1.0, 0.0, 0.0, -1.0])
}

/// Unnormalized swap on `d ⊗ d`: Σ |ij⟩⟨ji|.
pub fn swap(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = ONE;
        }
    }
    m
}
