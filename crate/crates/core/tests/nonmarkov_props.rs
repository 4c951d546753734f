mod common;

use common::{dims, grid, h, rng};
use privwit::channels::{standard_dynamics, DynamicsKind};
use privwit::nonmarkov::{detect_nonmarkov, trace_norm_trajectory, Trajectory, Verdict, DEFAULT_DERIV_TOL};
use privwit::random::random_hermitian;
use privwit::states::coherence_witness;
use proptest::prelude::*;
use rand::Rng;

fn oscillating(t_max: f64) -> privwit::channels::DynamicsFamily {
    standard_dynamics(DynamicsKind::OscillatingDephasing { gamma: 0.5, omega: 3.0 }, t_max).unwrap()
}

fn check_trajectory(traj: &Trajectory) -> std::result::Result<(), TestCaseError> {
    for &f in &traj.f_values {
        prop_assert!(f >= 0.0 && f <= traj.x_norm + 1e-9);
    }
    if let Some(g) = &traj.g_values {
        prop_assert!(g.iter().all(|&v| (0.0..=1.0).contains(&v)));
        for k in 1..g.len() {
            let (f0, f1) = (traj.f_values[k - 1], traj.f_values[k]);
            let df = f1 - f0;
            // below this the sign of Δg is lost to rounding in h
            if df.abs() > 1e-9 && f0 > 1e-6 && f1 > 1e-6 {
                prop_assert_eq!(df > 0.0, g[k] - g[k - 1] > 0.0);
            }
            prop_assert!((g[k] - (1.0 - h(0.5 + f1.min(0.5)))).abs() < 1e-9);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trajectory_invariants(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = r.random_range(2..=3);
        let x = random_hermitian(dims(&[("S", 2), ("T", d)]), r.random_range(0.05..=0.5), &mut r);
        let gamma = r.random_range(0.1..1.0);
        let omega = r.random_range(0.5..5.0);
        let fam = standard_dynamics(DynamicsKind::OscillatingDephasing { gamma, omega }, 3.0).unwrap();
        let traj = trace_norm_trajectory(&fam, &x, &grid(0.0, 3.0, 61)).unwrap();
        check_trajectory(&traj)?;
        let rep = detect_nonmarkov(&traj, DEFAULT_DERIV_TOL).unwrap();
        for iv in &rep.intervals {
            prop_assert!(iv.t_start >= 0.0 && iv.t_end <= 3.0 && iv.max_derivative > DEFAULT_DERIV_TOL);
        }
    }

    #[test]
    fn random_witnesses_never_flag_semigroup(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_hermitian(dims(&[("S", 2), ("T", 2)]), r.random_range(0.05..=0.5), &mut r);
        let fam = standard_dynamics(DynamicsKind::SemigroupDephasing { gamma: r.random_range(0.1..2.0) }, 3.0).unwrap();
        let traj = trace_norm_trajectory(&fam, &x, &grid(0.0, 3.0, 61)).unwrap();
        check_trajectory(&traj)?;
        prop_assert_eq!(detect_nonmarkov(&traj, DEFAULT_DERIV_TOL).unwrap().verdict, Verdict::MarkovianOnGrid);
    }
}

#[test]
fn oscillating_closed_form_and_intervals() {
    let t = grid(0.0, 3.0, 301);
    let traj = trace_norm_trajectory(&oscillating(3.0), &coherence_witness(), &t).unwrap();
    for (ti, f) in t.iter().zip(&traj.f_values) {
        assert!((f - 0.5 * (-0.5 * ti).exp() * (3.0 * ti).cos().abs()).abs() < 1e-12);
    }
    let rep = detect_nonmarkov(&traj, DEFAULT_DERIV_TOL).unwrap();
    assert_eq!(rep.verdict, Verdict::Nonmarkovian);
    // d/dt e^{-t/2}|cos 3t| > 0  iff  cos 3t and -(cos 3t)/2 - 3 sin 3t share a sign
    let rising = |s: f64| {
        let c = (3.0 * s).cos();
        c * (-0.5 * c - 3.0 * (3.0 * s).sin()) > 0.0
    };
    let step = 0.01;
    for iv in &rep.intervals {
        let mid = 0.5 * (iv.t_start + iv.t_end);
        assert!(rising(mid), "interval {iv:?}");
    }
    for &s in &t {
        if rising(s) && rising(s - step) && rising(s + step) {
            assert!(
                rep.intervals.iter().any(|iv| iv.t_start - step <= s && s <= iv.t_end + step),
                "rising point {s} not covered"
            );
        }
    }
    // three rising flanks of |cos 3t| in (0, 3)
    assert_eq!(rep.intervals.len(), 3, "{:?}", rep.intervals);
}

#[test]
fn halving_step_moves_endpoints_by_at_most_one_step() {
    let coarse_step = 0.01;
    let coarse = trace_norm_trajectory(&oscillating(3.0), &coherence_witness(), &grid(0.0, 3.0, 301)).unwrap();
    let fine = trace_norm_trajectory(&oscillating(3.0), &coherence_witness(), &grid(0.0, 3.0, 601)).unwrap();
    let a = detect_nonmarkov(&coarse, DEFAULT_DERIV_TOL).unwrap().intervals;
    let b = detect_nonmarkov(&fine, DEFAULT_DERIV_TOL).unwrap().intervals;
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x.t_start - y.t_start).abs() <= coarse_step + 1e-12, "{x:?} {y:?}");
        assert!((x.t_end - y.t_end).abs() <= coarse_step + 1e-12, "{x:?} {y:?}");
    }
}

#[test]
fn random_search_finds_oscillating_witness() {
    let mut r = rng(2024);
    let fam = oscillating(3.0);
    let t = grid(0.0, 3.0, 151);
    let found = (0..20).any(|_| {
        let x = random_hermitian(dims(&[("S", 2), ("T", 2)]), 0.5, &mut r);
        let traj = trace_norm_trajectory(&fam, &x, &t).unwrap();
        detect_nonmarkov(&traj, DEFAULT_DERIV_TOL).unwrap().verdict == Verdict::Nonmarkovian
    });
    assert!(found);
}

#[test]
fn large_witness_uses_f() {
    let mut r = rng(8);
    let x = random_hermitian(dims(&[("S", 2), ("T", 2)]), 1.5, &mut r);
    let traj = trace_norm_trajectory(&oscillating(3.0), &x, &grid(0.0, 3.0, 101)).unwrap();
    assert!(traj.g_values.is_none());
    let rep = detect_nonmarkov(&traj, DEFAULT_DERIV_TOL).unwrap();
    assert!(rep.dg_dt.is_none());
    assert!(traj.f_values.iter().all(|&f| f <= 1.5 + 1e-9));
}
