mod common;

use common::{dims, grid, rng};
use privwit::channels::{standard_channel, standard_dynamics, ChannelKind, DynamicsFamily, DynamicsKind, KrausChannel};
use privwit::qcore::linalg::{self, max_abs_diff};
use privwit::qcore::{mutual_information, DensityMatrix, Operator, SubsystemDims};
use privwit::random::{random_channel, random_density, random_hermitian, random_unitary};
use privwit::states::{
    block_state, gamma_swap, private_bit, privacy_squeeze, schmidt_twisted_pure, BlockState, PrivateBitX,
    SchmidtTwistData,
};
use proptest::prelude::*;
use rand::Rng;

fn shield(d: usize) -> SubsystemDims {
    dims(&[("A'", d), ("B'", d)])
}

#[test]
fn gamma_swap_is_valid_up_to_256() {
    for d in [2, 4, 8] {
        let g = gamma_swap(d).unwrap();
        assert_eq!(g.dim(), 4 * d * d);
        assert!((g.op().trace().re - 1.0).abs() < 1e-12);
        assert!(g.eigenvalues()[0] >= 0.0);
    }
}

#[test]
fn depolarizing_contracts_swap_witness() {
    let x = privwit::states::swap_witness(2).unwrap();
    let ch = standard_channel(ChannelKind::Depolarizing, 1.0).unwrap();
    let after = ch.apply_on_factor_op(&x, "A'").unwrap().trace_norm();
    assert!(after < x.trace_norm() - 1e-3);
}

#[test]
fn bit_flip_embedding_matches_witness_formula() {
    let g = gamma_swap(2).unwrap();
    let ch = standard_channel(ChannelKind::BitFlip, 0.3).unwrap();
    let attacked = ch.apply_on_factor(&g, "A'").unwrap();
    let psq = privwit::states::privacy_squeeze_state(&attacked).unwrap();
    let c = ch.apply_on_factor_op(&privwit::states::swap_witness(2).unwrap(), "A'").unwrap().trace_norm();
    assert!((psq.matrix()[(0, 3)].re - c).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn private_bit_is_a_state(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = if r.random_bool(0.5) { 2 } else { 3 };
        let x = random_hermitian(shield(d), r.random_range(0.0..=0.5), &mut r);
        let rho = private_bit(&PrivateBitX::new(x).unwrap());
        prop_assert!(rho.is_ok());
    }

    #[test]
    fn psq_corner_recomputed(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = r.random_range(0.0..=1.0);
        let a = random_density(shield(2), r.random_range(1..=4), &mut r);
        let b = random_density(shield(2), r.random_range(1..=4), &mut r);
        let blk = BlockState::new(p, a.clone(), b.clone()).unwrap();
        let psq = privacy_squeeze(&blk).unwrap();
        let diff = a.matrix() * linalg::r(p) - b.matrix() * linalg::r(1.0 - p);
        let sv: f64 = diff.singular_values().iter().sum();
        prop_assert!((psq.matrix()[(0, 3)].re - 0.5 * sv).abs() < 1e-12);
        prop_assert!((psq.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_blocks_hide_the_key_from_eve(seed in any::<u64>()) {
        // ρ± supported on orthogonal halves of a 4-dim shield
        let mut r = rng(seed);
        let u = random_unitary(4, &mut r);
        let mk = |lo: usize, r: &mut rand_chacha::ChaCha8Rng| {
            let small = random_density(SubsystemDims::single("s", 2), 2, r);
            let mut m = linalg::CMatrix::zeros(4, 4);
            m.view_mut((lo, lo), (2, 2)).copy_from(small.matrix());
            DensityMatrix::from_matrix(&u * m * u.adjoint(), SubsystemDims::single("S", 4)).unwrap()
        };
        let plus = mk(0, &mut r);
        let minus = mk(2, &mut r);
        let st = block_state(&BlockState::new(0.5, plus, minus).unwrap()).unwrap();
        let psi = st.purify();
        let ccq = privwit::keyrates::CcqState::from_measurement(
            &psi.density(), &["A"], &["B"], &["R"], &privwit::keyrates::Povm::computational(2), None,
        ).unwrap();
        prop_assert!(ccq.holevo(&["R".to_string()]).unwrap() <= 1e-9);
    }

    #[test]
    fn schmidt_twist_equals_private_bit(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sigma = random_density(shield(2), r.random_range(1..=4), &mut r);
        let u = random_unitary(4, &mut r);
        let data = SchmidtTwistData::diagonal(vec![0.5, 0.5], vec![linalg::identity(4), u.clone()], sigma.clone());
        let twisted = schmidt_twisted_pure(&data).unwrap();
        let x = Operator::new(sigma.matrix() * u.adjoint() * linalg::r(0.5), sigma.dims().clone()).unwrap();
        let pb = private_bit(&PrivateBitX::new(x).unwrap()).unwrap();
        prop_assert!(max_abs_diff(twisted.matrix(), pb.matrix()) < 1e-9);
    }

    #[test]
    fn trace_norm_contractivity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = r.random_range(2..=3);
        let ch = random_channel(d, r.random_range(1..=4), &mut r).unwrap();
        let x = random_hermitian(dims(&[("S", d), ("T", 3)]), 1.0, &mut r);
        prop_assert!(ch.apply_on_factor_op(&x, "S").unwrap().trace_norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn channels_preserve_states(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ch = random_channel(2, r.random_range(1..=4), &mut r).unwrap();
        let rho = random_density(dims(&[("S", 2), ("T", 2)]), r.random_range(1..=4), &mut r);
        let out = ch.apply_on_factor(&rho, "S").unwrap();
        prop_assert!((out.op().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(linalg::hermitian_eigenvalues(out.matrix())[0] >= -1e-12);
        let same = KrausChannel::identity(2).apply_on_factor(&rho, "T").unwrap();
        prop_assert!(max_abs_diff(same.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn semigroup_never_increases(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gamma = r.random_range(0.05..3.0);
        let dynamics = standard_dynamics(DynamicsKind::SemigroupDephasing { gamma }, 4.0).unwrap();
        let x = random_hermitian(dims(&[("S", 2), ("T", 2)]), r.random_range(0.1..1.0), &mut r);
        let traj = privwit::nonmarkov::trace_norm_trajectory(&dynamics, &x, &grid(0.0, 4.0, 41)).unwrap();
        prop_assert!(traj.f_values.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }
}

#[test]
fn private_state_from_orthogonal_blocks_has_full_key() {
    let plus = DensityMatrix::basis("S", 2, 0);
    let minus = DensityMatrix::basis("S", 2, 1);
    let st = block_state(&BlockState::new(0.5, plus, minus).unwrap()).unwrap();
    let ab = st.reduce(&["A", "B"]).unwrap();
    // key part alone is dephased, the shield holds the phase
    assert!(ab.matrix()[(0, 3)].norm() < 1e-15);
    assert!((mutual_information(&st, &["A"], &["B"]).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn iterated_dynamics_is_monotone() {
    let mut r = rng(77);
    let ch = random_channel(2, 3, &mut r).unwrap();
    let fam = DynamicsFamily::iterated(ch, 8.0).unwrap();
    let x = random_hermitian(dims(&[("S", 2), ("T", 2)]), 0.5, &mut r);
    let g: Vec<f64> = (0..=8).map(|k| k as f64).collect();
    let traj = privwit::nonmarkov::trace_norm_trajectory(&fam, &x, &g).unwrap();
    assert!(traj.f_values.windows(2).all(|w| w[1] <= w[0] + 1e-9));
}
