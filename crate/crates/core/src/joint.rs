//! Joint distribution of the accessible subgroups of nested subsystems
//! `F ⊂ G` under one circuit realization.
//!
//! `Π_{s,t}` evolves under `M_2 = M_2u ∘ M_2B`. The branching part is the
//! tensor square of `M_B`; the Clifford part applies the *same* random
//! permutation to both slots, so it is not the tensor square of `M_u`.

use core::ops::Index;

use crate::algebra::{branch_compose, S3Perm, SubgroupLabel};
use crate::dist::{Dist5, SIMPLEX_TOL};
use crate::error::{check_unit, Error, Result};

/// `5 x 5` joint distribution; first index is the label for `F`, second for `G`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointDist([[f64; 5]; 5]);

impl JointDist {
    pub fn new(entries: [[f64; 5]; 5]) -> Result<Self> {
        let flat: [f64; 25] = core::array::from_fn(|k| entries[k / 5][k % 5]);
        crate::dist::validate_simplex(&flat)?;
        Ok(JointDist(entries))
    }

    pub fn delta(s: SubgroupLabel, t: SubgroupLabel) -> Self {
        let mut e = [[0.0; 5]; 5];
        e[s.index()][t.index()] = 1.0;
        JointDist(e)
    }

    pub const fn entries(&self) -> &[[f64; 5]; 5] {
        &self.0
    }

    pub fn get(&self, s: SubgroupLabel, t: SubgroupLabel) -> f64 {
        self.0[s.index()][t.index()]
    }

    /// Distribution of the `F` label.
    pub fn marginal_first(&self) -> Dist5 {
        Dist5::from_raw(core::array::from_fn(|s| self.0[s].iter().sum()))
    }

    /// Distribution of the `G` label.
    pub fn marginal_second(&self) -> Dist5 {
        Dist5::from_raw(core::array::from_fn(|t| (0..5).map(|s| self.0[s][t]).sum()))
    }

    pub fn sup_distance(&self, other: &JointDist) -> f64 {
        let mut m = 0.0f64;
        for s in 0..5 {
            for t in 0..5 {
                m = m.max((self.0[s][t] - other.0[s][t]).abs());
            }
        }
        m
    }

    fn renormalized(mut self) -> Self {
        let sum: f64 = self.0.iter().flatten().sum();
        for row in self.0.iter_mut() {
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
        self
    }
}

impl Index<(SubgroupLabel, SubgroupLabel)> for JointDist {
    type Output = f64;

    fn index(&self, (s, t): (SubgroupLabel, SubgroupLabel)) -> &f64 {
        &self.0[s.index()][t.index()]
    }
}

/// `(p, f, g)` with `0 < f < g < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointParams {
    pub p: f64,
    pub f: f64,
    pub g: f64,
}

impl JointParams {
    pub fn new(p: f64, f: f64, g: f64) -> Result<Self> {
        check_unit("p", p)?;
        check_unit("f", f)?;
        check_unit("g", g)?;
        if !(0.0 < f && f < g && g < 1.0) {
            return Err(Error::NotNested { f, g });
        }
        Ok(JointParams { p, f, g })
    }
}

/// Tensor square of the branching map.
pub fn apply_m2b(pi: &JointDist) -> JointDist {
    let e = &pi.0;
    let mut out = [[0.0; 5]; 5];
    for s1 in SubgroupLabel::ALL {
        for t1 in SubgroupLabel::ALL {
            let w1 = e[s1.index()][t1.index()];
            if w1 == 0.0 {
                continue;
            }
            for s2 in SubgroupLabel::ALL {
                let s = branch_compose(s1, s2).index();
                for t2 in SubgroupLabel::ALL {
                    let w2 = e[s2.index()][t2.index()];
                    out[s][branch_compose(t1, t2).index()] += w1 * w2;
                }
            }
        }
    }
    JointDist(out)
}

/// `(1-p) Π + (p/6) Σ_σ (D_σ ⊗ D_σ) Π`.
pub fn apply_m2u(pi: &JointDist, p: f64) -> JointDist {
    let mut out = [[0.0; 5]; 5];
    for s in SubgroupLabel::ALL {
        for t in SubgroupLabel::ALL {
            let w = pi.0[s.index()][t.index()];
            out[s.index()][t.index()] += (1.0 - p) * w;
            for sigma in S3Perm::ALL {
                out[sigma.act(s).index()][sigma.act(t).index()] += p / 6.0 * w;
            }
        }
    }
    JointDist(out)
}

/// One generation, projected back onto total mass 1.
pub fn step_joint(pi: &JointDist, p: f64) -> JointDist {
    apply_m2u(&apply_m2b(pi), p).renormalized()
}

/// `Π_nn = 1-g`, `Π_na = g-f`, `Π_aa = f`.
pub fn joint_initial_condition(params: &JointParams) -> JointDist {
    let mut e = [[0.0; 5]; 5];
    e[0][0] = 1.0 - params.g;
    e[0][4] = params.g - params.f;
    e[4][4] = params.f;
    JointDist(e)
}

/// `Π(t)`, or the converged limit if the sup-norm change drops below
/// `1e-12` first.
pub fn iterate_joint(params: &JointParams, t: usize) -> JointDist {
    let mut pi = joint_initial_condition(params);
    for _ in 0..t {
        let next = step_joint(&pi, params.p);
        let change = next.sup_distance(&pi);
        pi = next;
        if change < 1e-12 {
            break;
        }
    }
    pi
}

/// Full trajectory `[Π(0), ..., Π(t)]` without early stopping.
pub fn joint_trajectory(params: &JointParams, t: usize) -> alloc::vec::Vec<JointDist> {
    let mut out = alloc::vec::Vec::with_capacity(t + 1);
    let mut pi = joint_initial_condition(params);
    out.push(pi);
    for _ in 0..t {
        pi = step_joint(&pi, params.p);
        out.push(pi);
    }
    out
}

/// Which of the allowed support patterns carry mass in a converged `Π`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SupportReport {
    /// Mass on `s = t ∈ {z, x, y}`.
    pub diagonal_pauli: f64,
    /// Mass on `s = t = n`; allowed only for `f < g < 1/2`.
    pub both_none: f64,
    /// Mass on `s = t = a`; allowed only for `1/2 < f < g`.
    pub both_all: f64,
    /// Mass on `s = n, t = a`; allowed only for `f < 1/2 < g`.
    pub none_all: f64,
    /// Mass outside the patterns allowed at this `(f, g)`.
    pub off_pattern_mass: f64,
    /// Largest single entry outside the allowed patterns.
    pub largest_violation: f64,
    pub tolerance: f64,
}

impl SupportReport {
    pub fn consistent(&self) -> bool {
        self.largest_violation <= self.tolerance
    }

    /// Short textual tag, e.g. `"pauli+n/a"`.
    pub fn pattern(&self) -> alloc::string::String {
        use alloc::string::String;
        let mut parts: alloc::vec::Vec<&str> = alloc::vec::Vec::new();
        if self.diagonal_pauli > self.tolerance {
            parts.push("pauli");
        }
        if self.both_none > self.tolerance {
            parts.push("n/n");
        }
        if self.both_all > self.tolerance {
            parts.push("a/a");
        }
        if self.none_all > self.tolerance {
            parts.push("n/a");
        }
        if parts.is_empty() {
            return String::from("empty");
        }
        parts.join("+")
    }
}

/// Default support tolerance, relative to the total mass of 1.
pub const SUPPORT_TOL: f64 = 1e-6;

/// Probabilities of the two-point `I`-curve shapes for `F ⊂ G` with
/// `|F| < N/2 < |G|`: `I = 1` at both (`plateau`), `0` then `2` (`step`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShapeMasses {
    pub plateau: f64,
    pub step: f64,
    pub other: f64,
}

pub fn shape_masses(pi: &JointDist) -> ShapeMasses {
    let mut plateau = 0.0;
    for s in SubgroupLabel::ALL {
        for t in SubgroupLabel::ALL {
            if s.dim() == 1 && t.dim() == 1 {
                plateau += pi.get(s, t);
            }
        }
    }
    let step = pi.get(SubgroupLabel::N, SubgroupLabel::A);
    ShapeMasses { plateau, step, other: (1.0 - plateau - step).max(0.0) }
}

pub fn classify_joint_support(pi: &JointDist, f: f64, g: f64, tol: f64) -> SupportReport {
    use SubgroupLabel::{A, N};
    let allowed = |s: SubgroupLabel, t: SubgroupLabel| -> bool {
        if s == t && !matches!(s, N | A) {
            return true;
        }
        match (s, t) {
            (N, N) => f < g && g < 0.5,
            (A, A) => 0.5 < f && f < g,
            (N, A) => f < 0.5 && 0.5 < g,
            _ => false,
        }
    };
    let mut report = SupportReport {
        diagonal_pauli: 0.0,
        both_none: pi.get(N, N),
        both_all: pi.get(A, A),
        none_all: pi.get(N, A),
        off_pattern_mass: 0.0,
        largest_violation: 0.0,
        tolerance: tol.max(SIMPLEX_TOL),
    };
    for s in SubgroupLabel::ALL {
        for t in SubgroupLabel::ALL {
            let w = pi.get(s, t);
            if s == t && !matches!(s, N | A) {
                report.diagonal_pauli += w;
            }
            if !allowed(s, t) {
                report.off_pattern_mass += w;
                report.largest_violation = report.largest_violation.max(w);
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion;
    use approx::assert_abs_diff_eq;
    use SubgroupLabel::*;

    #[test]
    fn m2b_examples() {
        assert_eq!(apply_m2b(&JointDist::delta(N, N)), JointDist::delta(N, N));
        assert_eq!(apply_m2b(&JointDist::delta(A, A)), JointDist::delta(A, A));
        let mut e = [[0.0; 5]; 5];
        e[0][0] = 0.5;
        e[4][4] = 0.5;
        let out = apply_m2b(&JointDist::new(e).unwrap());
        assert_abs_diff_eq!(out.get(N, N), 0.25);
        assert_abs_diff_eq!(out.get(Z, Z), 0.5);
        assert_abs_diff_eq!(out.get(A, A), 0.25);
        let total: f64 = out.entries().iter().flatten().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn shape_masses_at_finite_depth() {
        let params = JointParams::new(0.68, 0.25, 0.75).unwrap();
        let at0 = shape_masses(&iterate_joint(&params, 0));
        assert_abs_diff_eq!(at0.step, 0.5);
        assert_abs_diff_eq!(at0.other, 0.5);
        let late = shape_masses(&iterate_joint(&params, 100_000));
        let u = recursion::mixed_weight(0.68);
        assert_abs_diff_eq!(late.plateau, u, epsilon = 1e-8);
        assert_abs_diff_eq!(late.step, 1.0 - u, epsilon = 1e-8);
    }

    #[test]
    fn m2u_examples() {
        let pi = JointDist::delta(Z, X);
        assert_eq!(apply_m2u(&pi, 0.0), pi);
        let out = apply_m2u(&pi, 1.0);
        for sigma in S3Perm::ALL {
            assert_abs_diff_eq!(out.get(sigma.act(Z), sigma.act(X)), 1.0 / 6.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(out.get(Z, Z), 0.0);
        for p in [0.0, 0.3, 1.0] {
            assert!(apply_m2u(&JointDist::delta(N, A), p).sup_distance(&JointDist::delta(N, A)) < 1e-15);
        }
    }

    #[test]
    fn initial_condition_and_params() {
        let params = JointParams::new(0.5, 0.2, 0.5).unwrap();
        let pi = iterate_joint(&params, 0);
        assert_abs_diff_eq!(pi.get(N, N), 0.5);
        assert_abs_diff_eq!(pi.get(N, A), 0.3);
        assert_abs_diff_eq!(pi.get(A, A), 0.2);
        assert!(JointParams::new(0.5, 0.6, 0.4).is_err());
        assert!(JointParams::new(0.5, 0.0, 0.4).is_err());
    }

    #[test]
    fn marginals_track_single_copy() {
        let params = JointParams::new(0.68, 0.2, 0.7).unwrap();
        let traj = joint_trajectory(&params, 40);
        let f_seq = recursion::iterate(&recursion::initial_condition(0.2, false).unwrap(), 0.68, 40)
            .unwrap();
        let g_seq = recursion::iterate(&recursion::initial_condition(0.7, false).unwrap(), 0.68, 40)
            .unwrap();
        for ((pi, f), g) in traj.iter().zip(&f_seq).zip(&g_seq) {
            assert!(pi.marginal_first().sup_distance(f) < 1e-10);
            assert!(pi.marginal_second().sup_distance(g) < 1e-10);
        }
    }

    #[test]
    fn mixed_phase_support_straddling_half() {
        let params = JointParams::new(0.68, 0.2, 0.7).unwrap();
        let pi = iterate_joint(&params, 100_000);
        let report = classify_joint_support(&pi, 0.2, 0.7, SUPPORT_TOL);
        assert!(report.consistent(), "{report:?}");
        assert!(report.none_all > 0.1 && report.diagonal_pauli > 0.1);
        assert_eq!(report.pattern(), "pauli+n/a");
    }

    #[test]
    fn mixed_phase_support_below_half() {
        let params = JointParams::new(0.68, 0.1, 0.3).unwrap();
        let pi = iterate_joint(&params, 100_000);
        let report = classify_joint_support(&pi, 0.1, 0.3, SUPPORT_TOL);
        assert!(report.consistent(), "{report:?}");
        assert!(report.none_all < SUPPORT_TOL);
        assert_eq!(report.pattern(), "pauli+n/n");
    }

    #[test]
    fn encoding_phase_support() {
        let params = JointParams::new(0.9, 0.3, 0.7).unwrap();
        let pi = iterate_joint(&params, 100_000);
        let report = classify_joint_support(&pi, 0.3, 0.7, SUPPORT_TOL);
        assert!(report.consistent());
        assert_abs_diff_eq!(report.none_all, 1.0, epsilon = 1e-8);
    }
}
