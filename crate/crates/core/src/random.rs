//! Random states, unitaries, witnesses and channels for sampling-based checks.
//! Every function takes the generator explicitly so runs are reproducible
//! from a seed.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::KrausChannel;
use crate::error::Result;
use crate::qcore::linalg::{self, c, CMatrix, CVector};
use crate::qcore::{DensityMatrix, Operator, PureState, SubsystemDims};

/// Matrix of i.i.d. standard complex gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase fix).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(n, n, rng).qr();
    let (mut q, rmat) = (qr.q(), qr.r());
    for k in 0..n {
        let d = rmat[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        q.column_mut(k).iter_mut().for_each(|x| *x *= phase);
    }
    q
}

/// Random isometry `d_in -> d_out` (`d_out >= d_in`), as a `d_out x d_in` matrix.
pub fn random_isometry<R: Rng + ?Sized>(d_in: usize, d_out: usize, rng: &mut R) -> CMatrix {
    assert!(d_out >= d_in, "isometry needs d_out >= d_in");
    random_unitary(d_out, rng).columns(0, d_in).into_owned()
}

pub fn random_pure<R: Rng + ?Sized>(dims: SubsystemDims, rng: &mut R) -> PureState {
    let n = dims.total();
    let v: CVector = ginibre(n, 1, rng).column(0).into_owned();
    PureState::normalized(v, dims).expect("gaussian vector is nonzero")
}

/// Induced-measure random state of the given rank (`rank = dim` for full rank).
pub fn random_density<R: Rng + ?Sized>(dims: SubsystemDims, rank: usize, rng: &mut R) -> DensityMatrix {
    let n = dims.total();
    let g = ginibre(n, rank.clamp(1, n), rng);
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    DensityMatrix::from_matrix(m / linalg::r(tr), dims).expect("gram matrix is a state")
}

/// Random hermitian operator rescaled to the given trace norm.
pub fn random_hermitian<R: Rng + ?Sized>(dims: SubsystemDims, trace_norm: f64, rng: &mut R) -> Operator {
    let n = dims.total();
    let g = ginibre(n, n, rng);
    let h = linalg::hermitize(&g);
    let norm = crate::qcore::trace_norm(&h);
    Operator::new(h * linalg::r(trace_norm / norm), dims).expect("layout matches")
}

/// Random channel on `dim` with `n_kraus` Kraus operators, from a random
/// Stinespring isometry.
pub fn random_channel<R: Rng + ?Sized>(dim: usize, n_kraus: usize, rng: &mut R) -> Result<KrausChannel> {
    let v = random_isometry(dim, dim * n_kraus, rng);
    let kraus = (0..n_kraus).map(|k| v.rows(k * dim, dim).into_owned()).collect();
    KrausChannel::new(kraus, "random")
}
