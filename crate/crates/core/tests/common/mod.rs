//! Property checks shared by the invariant suite and the acceptance run.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use qdtree::joint::{step_joint, JointDist};
use qdtree::oracle::{consistency_report, TreeRealization};
use qdtree::recursion::step;
use qdtree::{permutation_action, Dist5, S3Perm, SubgroupLabel};

pub const CASES: u32 = 1000;
pub const TOL: f64 = 1e-12;

/// Random points of the simplex, with a fair share on its faces.
pub fn dist5() -> impl Strategy<Value = Dist5> {
    (prop::array::uniform5(0.0..1.0f64), prop::array::uniform5(prop::bool::weighted(0.2))).prop_map(|(w, zero)| {
        let mut c: [f64; 5] = core::array::from_fn(|i| if zero[i] { 0.0 } else { w[i] });
        if c.iter().sum::<f64>() <= 1e-3 {
            c[0] += 1.0;
        }
        let s: f64 = c.iter().sum();
        Dist5::new(c.map(|v| v / s)).expect("normalized")
    })
}

pub fn joint_dist() -> impl Strategy<Value = JointDist> {
    prop::array::uniform5(prop::array::uniform5(0.0..1.0f64)).prop_map(|w| {
        let s: f64 = w.iter().flatten().sum();
        JointDist::new(w.map(|row| row.map(|v| v / s))).expect("normalized")
    })
}

pub fn perm() -> impl Strategy<Value = S3Perm> {
    (0usize..6).prop_map(|i| S3Perm::ALL[i])
}

pub fn label() -> impl Strategy<Value = SubgroupLabel> {
    (0usize..5).prop_map(|i| SubgroupLabel::ALL[i])
}

fn act_on_dist(perm: S3Perm, pi: &Dist5) -> Dist5 {
    let mut out = [0.0; 5];
    for s in SubgroupLabel::ALL {
        out[permutation_action(perm, s).index()] += pi[s];
    }
    Dist5::new(out).expect("permuted simplex")
}

pub fn check_simplex(pi: Dist5, p: f64) -> Result<(), TestCaseError> {
    let out = step(&pi, p);
    prop_assert!(Dist5::new(out.into_array()).is_ok(), "{out:?}");
    let raw = qdtree::recursion::apply_mu(&qdtree::recursion::apply_mb(&pi), p);
    let sum: f64 = raw.as_array().iter().sum();
    prop_assert!((sum - 1.0).abs() < TOL && raw.as_array().iter().all(|&v| v >= -TOL));
    Ok(())
}

pub fn check_z2(pi: Dist5, p: f64) -> Result<(), TestCaseError> {
    let d = step(&pi.z2_swap(), p).sup_distance(&step(&pi, p).z2_swap());
    prop_assert!(d < TOL, "distance {d}");
    Ok(())
}

pub fn check_invariant_subspaces(pi: Dist5, p: f64) -> Result<(), TestCaseError> {
    let [n, z, x, y, a] = pi.into_array();
    let xy = Dist5::new([n, z, (x + y) / 2.0, (x + y) / 2.0, a]).unwrap();
    let out = step(&xy, p).into_array();
    prop_assert!((out[2] - out[3]).abs() < TOL, "I_xy left: {out:?}");

    let norm = |c: [f64; 5]| {
        let s: f64 = c.iter().sum();
        if s <= 0.0 {
            None
        } else {
            Some(Dist5::new(c.map(|v| v / s)).unwrap())
        }
    };
    if let Some(plus) = norm([n, z, x, y, 0.0]) {
        let out = step(&plus, p).into_array();
        prop_assert!(out[4].abs() < TOL, "I+ left: {out:?}");
    }
    if let Some(minus) = norm([0.0, z, x, y, a]) {
        let out = step(&minus, p).into_array();
        prop_assert!(out[0].abs() < TOL, "I- left: {out:?}");
    }
    Ok(())
}

pub fn check_marginalization(pi: JointDist, p: f64) -> Result<(), TestCaseError> {
    let next = step_joint(&pi, p);
    let d1 = next.marginal_first().sup_distance(&step(&pi.marginal_first(), p));
    let d2 = next.marginal_second().sup_distance(&step(&pi.marginal_second(), p));
    prop_assert!(d1 < TOL && d2 < TOL, "{d1} {d2}");
    Ok(())
}

/// Group action, and the gate average commutes with it (branching does not:
/// CNOT singles out `Z` and `X`).
pub fn check_s3(a: S3Perm, b: S3Perm, s: SubgroupLabel, pi: Dist5, p: f64) -> Result<(), TestCaseError> {
    prop_assert_eq!(permutation_action(a.compose(b), s), permutation_action(a, permutation_action(b, s)));
    let mu = |d: &Dist5| qdtree::recursion::apply_mu(d, p);
    let d = mu(&act_on_dist(a, &pi)).sup_distance(&act_on_dist(a, &mu(&pi)));
    prop_assert!(d < TOL, "gate average does not commute with the permutation: {d}");
    Ok(())
}

pub fn check_realization(t: u32, p: f64, f: f64, seed: u64, index: u64) -> Result<(), TestCaseError> {
    let real = TreeRealization::sample(t, p, 0.0, seed, index).unwrap();
    let state = real.build();
    let access = state.leaf_access(&real, f);
    let report = consistency_report(&state, &access);
    prop_assert!(report.holds(), "{report:?}");
    prop_assert_eq!(report.entropy_f, state.tableau.entropy_dense(&access));
    Ok(())
}

pub fn unit() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 1 => Just(1.0), 8 => 0.0..=1.0f64]
}

pub fn realization_args() -> impl Strategy<Value = (u32, f64, f64, u64, u64)> {
    (1u32..=6, unit(), 0.0..1.0f64, any::<u64>(), 0u64..1_000_000)
}

/// Runs every invariant for `CASES` cases each; returns `(name, failure)`.
pub fn run_all() -> Vec<(&'static str, Option<String>)> {
    let runner = || TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    let mut out = Vec::new();
    let mut record = |name, r: Result<(), proptest::test_runner::TestError<_>>| {
        out.push((name, r.err().map(|e| format!("{e}"))));
    };
    record("simplex preservation", runner().run(&(dist5(), unit()), |(pi, p)| check_simplex(pi, p)).map_err(erase));
    record("Z2 equivariance", runner().run(&(dist5(), unit()), |(pi, p)| check_z2(pi, p)).map_err(erase));
    record(
        "invariant subspaces",
        runner().run(&(dist5(), unit()), |(pi, p)| check_invariant_subspaces(pi, p)).map_err(erase),
    );
    record(
        "joint marginalization",
        runner().run(&(joint_dist(), unit()), |(pi, p)| check_marginalization(pi, p)).map_err(erase),
    );
    record(
        "S3 action composition",
        runner().run(&(perm(), perm(), label(), dist5(), unit()), |(a, b, s, pi, p)| check_s3(a, b, s, pi, p)).map_err(erase),
    );
    record(
        "entropy bounds and I = log2|s|",
        runner().run(&realization_args(), |(t, p, f, seed, i)| check_realization(t, p, f, seed, i)).map_err(erase),
    );
    out
}

fn erase<T: core::fmt::Debug>(e: proptest::test_runner::TestError<T>) -> proptest::test_runner::TestError<String> {
    match e {
        proptest::test_runner::TestError::Abort(r) => proptest::test_runner::TestError::Abort(r),
        proptest::test_runner::TestError::Fail(r, v) => proptest::test_runner::TestError::Fail(r, format!("{v:?}")),
    }
}
