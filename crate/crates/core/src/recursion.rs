//! Backward recursion of the order parameter `π` on the tree.
//!
//! One generation is `M = M_u ∘ M_B`: the quadratic branching map followed
//! by the linear averaging over a one-body Clifford present with
//! probability `p`. The long-time limit of `π(t+1) = M(π(t))` decides the
//! phase; its fixed points are known in closed form and their stability is
//! measured numerically on the 4-dimensional tangent space of the simplex.

use alloc::vec::Vec;

use crate::algebra::{branch_compose, SubgroupLabel};
use crate::dist::Dist5;
use crate::error::{check_unit, Error, Result};
use crate::spectral;

/// Lower edge of the mixed phase.
pub const P_QD_MIXED: f64 = 3.0 / 5.0;
/// Upper edge of the mixed phase.
pub const P_MIXED_ENCODING: f64 = 3.0 / 4.0;

/// Eigenvalue moduli within this margin of 1 are reported as marginal.
pub const STABILITY_MARGIN: f64 = 1e-8;
/// Finite-difference step of [`jacobian`].
pub const JACOBIAN_STEP: f64 = 1e-6;
/// A limit is identified with a closed-form fixed point within this distance.
pub const MATCH_TOL: f64 = 1e-6;
/// Parameters this close to 3/5 or 3/4 are treated as critical.
pub const CRITICAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    /// Probability of a random one-body Clifford on each edge.
    pub p: f64,
    /// Probability that an output qubit belongs to `F`.
    pub f: f64,
    /// Number of generations; the tree has `2^t` outputs.
    pub t: u32,
}

impl ModelParams {
    pub fn new(p: f64, f: f64, t: u32) -> Result<Self> {
        check_unit("p", p)?;
        check_unit("f", f)?;
        Ok(ModelParams { p, f, t })
    }
}

/// Stop criterion for iterating to a limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    /// Sup-norm change between successive iterates.
    pub tolerance: f64,
    pub max_steps: usize,
}

impl Default for Convergence {
    fn default() -> Self {
        Convergence { tolerance: 1e-12, max_steps: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limit {
    pub point: Dist5,
    pub steps: usize,
    pub converged: bool,
}

/// `M_B`: distribution of `B(s1, s2)` for independent `s1, s2 ~ π`.
pub fn apply_mb(pi: &Dist5) -> Dist5 {
    let [n, z, x, y, a] = *pi.as_array();
    Dist5::from_raw([
        n * n + 2.0 * n * (x + y),
        z * z + 2.0 * z * (n + x + y + a) + 2.0 * n * a,
        x * x + y * y,
        2.0 * x * y,
        a * a + 2.0 * a * (x + y),
    ])
}

/// `M_B` written directly as the sum over the branching table.
///
/// Kept as an independent route to [`apply_mb`] for tests and for the joint
/// recursion, which needs the tensor itself.
pub fn apply_mb_by_table(pi: &Dist5) -> Dist5 {
    let c = pi.as_array();
    let mut out = [0.0; 5];
    for s1 in SubgroupLabel::ALL {
        for s2 in SubgroupLabel::ALL {
            out[branch_compose(s1, s2).index()] += c[s1.index()] * c[s2.index()];
        }
    }
    Dist5::from_raw(out)
}

/// `M_u = p P_3 + (1 - p) I`, where `P_3` averages `z, x, y`.
pub fn apply_mu(pi: &Dist5, p: f64) -> Dist5 {
    let [n, z, x, y, a] = *pi.as_array();
    let mean = (z + x + y) / 3.0;
    let q = 1.0 - p;
    Dist5::from_raw([n, p * mean + q * z, p * mean + q * x, p * mean + q * y, a])
}

/// One generation `M(π) = M_u(M_B(π))`, projected back onto the sum rule.
///
/// `M_B` squares the total mass, so without the projection rounding errors
/// in the sum double at every step.
pub fn step(pi: &Dist5, p: f64) -> Dist5 {
    let out = apply_mu(&apply_mb(pi), p);
    Dist5::renormalized(out.into_array())
}

/// Validating form of [`step`].
pub fn apply_m(pi: &Dist5, p: f64) -> Result<Dist5> {
    check_unit("p", p)?;
    crate::dist::validate_simplex(pi.as_array())?;
    Ok(step(pi, p))
}

/// Leaves: `a` with probability `f`, else `n`. With `z_only`, access to `F`
/// is restricted to `Z` operators and a leaf in `F` contributes `z` instead.
pub fn initial_condition(f: f64, z_only: bool) -> Result<Dist5> {
    check_unit("f", f)?;
    Ok(if z_only {
        Dist5::from_raw([1.0 - f, f, 0.0, 0.0, 0.0])
    } else {
        Dist5::from_raw([1.0 - f, 0.0, 0.0, 0.0, f])
    })
}

/// `[π(0), ..., π(t)]`.
pub fn iterate(pi0: &Dist5, p: f64, t: usize) -> Result<Vec<Dist5>> {
    check_unit("p", p)?;
    crate::dist::validate_simplex(pi0.as_array())?;
    let mut out = Vec::with_capacity(t + 1);
    let mut pi = *pi0;
    out.push(pi);
    for _ in 0..t {
        pi = step(&pi, p);
        out.push(pi);
    }
    Ok(out)
}

/// Iterates until the sup-norm change drops below the tolerance.
pub fn converge(pi0: &Dist5, p: f64, opts: &Convergence) -> Result<Limit> {
    check_unit("p", p)?;
    crate::dist::validate_simplex(pi0.as_array())?;
    let mut pi = *pi0;
    for steps in 1..=opts.max_steps {
        let next = step(&pi, p);
        let change = next.sup_distance(&pi);
        pi = next;
        if change < opts.tolerance {
            return Ok(Limit { point: pi, steps, converged: true });
        }
    }
    Ok(Limit { point: pi, steps: opts.max_steps, converged: false })
}

/// Probabilities of `I(R, F) = 0, 1, 2`.
pub fn mutual_info_distribution(pi: &Dist5) -> [f64; 3] {
    let [n, z, x, y, a] = *pi.as_array();
    [n, z + x + y, a]
}

/// Mean of `I(R, F)` in bits.
pub fn mean_mutual_info(pi: &Dist5) -> f64 {
    let [_, one, two] = mutual_info_distribution(pi);
    one + 2.0 * two
}

/// Jacobian of `M` (without the sum projection) at `π`, composed with the
/// orthogonal projection onto the plane `Σ v = 0`.
///
/// Column `j` is the central difference along `e_j - (1/5) Σ e_k`, so every
/// perturbation respects the sum rule. The all-ones direction is mapped to
/// zero and the remaining spectrum is that of [`tangent_jacobian`].
pub fn jacobian(pi: &Dist5, p: f64) -> [[f64; 5]; 5] {
    let base = *pi.as_array();
    let h = JACOBIAN_STEP;
    let mut jac = [[0.0; 5]; 5];
    for j in 0..5 {
        let mut plus = base;
        let mut minus = base;
        for k in 0..5 {
            let dir = if k == j { 0.8 } else { -0.2 };
            plus[k] += h * dir;
            minus[k] -= h * dir;
        }
        let fp = apply_mu(&apply_mb(&Dist5::from_raw(plus)), p).into_array();
        let fm = apply_mu(&apply_mb(&Dist5::from_raw(minus)), p).into_array();
        for i in 0..5 {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// Linearization restricted to the tangent space `{v : Σ v = 0}` in the
/// basis `e_j - e_a`, `j = n, z, x, y`. Row-major `4 x 4`.
pub fn tangent_jacobian(pi: &Dist5, p: f64) -> [[f64; 4]; 4] {
    let jac = jacobian(pi, p);
    let mut out = [[0.0; 4]; 4];
    // J (e_j - e_a) is sum-free, so its coordinates in this basis are its
    // first four components.
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = jac[i][j] - jac[i][4];
        }
    }
    out
}

/// Eigenvalue moduli on the tangent space, decreasing.
pub fn tangent_eigenvalue_moduli(pi: &Dist5, p: f64) -> Vec<f64> {
    let j = tangent_jacobian(pi, p);
    let flat: Vec<f64> = j.iter().flatten().copied().collect();
    spectral::eigenvalue_moduli(&flat, 4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FixedPointKind {
    /// `π_n = π_a = 0`.
    Qd,
    /// `(1-u, u/2, u/4, u/4, 0)` or its `n <-> a` image.
    Mixed,
    /// `(1, 0, 0, 0, 0)`.
    EncodingN,
    /// `(0, 0, 0, 0, 1)`.
    EncodingA,
    /// `π_n = π_a > 0`, unstable to `Z2`-odd perturbations.
    Z2Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FixedPointReport {
    pub point: Dist5,
    pub kind: FixedPointKind,
    pub stable: bool,
    /// `| |λ|max - 1 | < STABILITY_MARGIN`.
    pub marginal: bool,
    pub leading_eigenvalue_modulus: f64,
    /// `‖M(π*) - π*‖∞`.
    pub residual: f64,
}

impl FixedPointReport {
    fn new(point: Dist5, kind: FixedPointKind, p: f64) -> Self {
        let lead = tangent_eigenvalue_moduli(&point, p)[0];
        let image = apply_mu(&apply_mb(&point), p);
        FixedPointReport {
            point,
            kind,
            stable: lead < 1.0 - STABILITY_MARGIN,
            marginal: (lead - 1.0).abs() < STABILITY_MARGIN,
            leading_eigenvalue_modulus: lead,
            residual: image.sup_distance(&point),
        }
    }
}

/// `π_z` at the QD fixed point.
pub fn qd_pi_z(p: f64) -> f64 {
    (3.0 - 6.0 * p + libm::sqrt(24.0 * (p - 1.0) * p + 9.0)) / (6.0 - 6.0 * p)
}

/// The QD fixed point `(0, π_z, (1-π_z)/2, (1-π_z)/2, 0)`.
pub fn qd_fixed_point(p: f64) -> Result<Dist5> {
    check_unit("p", p)?;
    if p >= 1.0 {
        return Err(Error::DegenerateP);
    }
    let z = qd_pi_z(p);
    let x = (1.0 - z) / 2.0;
    Ok(Dist5::from_raw([0.0, z, x, x, 0.0]))
}

/// Weight `u = (6 - 8p) / (3 - 3p)` of QD-like realizations in the mixed phase.
pub fn mixed_weight(p: f64) -> f64 {
    (6.0 - 8.0 * p) / (3.0 - 3.0 * p)
}

/// `(1-u, u/2, u/4, u/4, 0)`; physical only for `3/5 <= p <= 3/4`.
pub fn mixed_fixed_point(p: f64) -> Dist5 {
    let u = mixed_weight(p);
    Dist5::from_raw([1.0 - u, u / 2.0, u / 4.0, u / 4.0, 0.0])
}

/// The `Z2`-symmetric fixed point with `π_n = π_a = 1 - 4 π_x`.
pub fn z2_symmetric_fixed_point(p: f64) -> Dist5 {
    let x = (-libm::sqrt(40.0 * p * p - 24.0 * p + 9.0) + 8.0 * p - 3.0) / (12.0 * (p - 1.0));
    let na = 1.0 - 4.0 * x;
    Dist5::from_raw([na, 6.0 * x - 1.0, x, x, na])
}

fn is_physical(d: &Dist5) -> bool {
    d.as_array().iter().all(|&c| c >= -1e-12 && c.is_finite())
}

/// All physical fixed points of `M` at `p`, with numerical stability.
pub fn closed_form_fixed_points(p: f64) -> Result<Vec<FixedPointReport>> {
    let qd = qd_fixed_point(p)?;
    let mut candidates: Vec<(Dist5, FixedPointKind)> = Vec::with_capacity(6);
    candidates.push((qd, FixedPointKind::Qd));
    let mixed = mixed_fixed_point(p);
    if is_physical(&mixed) {
        candidates.push((mixed, FixedPointKind::Mixed));
        candidates.push((mixed.z2_swap(), FixedPointKind::Mixed));
    }
    candidates.push((Dist5::delta(SubgroupLabel::N), FixedPointKind::EncodingN));
    candidates.push((Dist5::delta(SubgroupLabel::A), FixedPointKind::EncodingA));
    let sym = z2_symmetric_fixed_point(p);
    if is_physical(&sym) {
        candidates.push((sym, FixedPointKind::Z2Symmetric));
    }

    let mut out: Vec<FixedPointReport> = Vec::with_capacity(candidates.len());
    for (point, kind) in candidates {
        // Branches meet at the critical points; keep the first label.
        if out.iter().any(|r| r.point.sup_distance(&point) < 1e-12) {
            continue;
        }
        out.push(FixedPointReport::new(point, kind, p));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PhaseLabel {
    Qd,
    Mixed,
    Encoding,
}

impl PhaseLabel {
    pub const fn name(self) -> &'static str {
        match self {
            PhaseLabel::Qd => "QD",
            PhaseLabel::Mixed => "Mixed",
            PhaseLabel::Encoding => "Encoding",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseOutcome {
    Phase { phase: PhaseLabel, limit: Dist5 },
    /// `f = 1/2` and `p > 3/5`: the two `Z2`-related stable limits.
    FirstOrderLine { limits: [Dist5; 2] },
    /// `p` at 3/5 or 3/4; `limit` is the last iterate.
    Critical { limit: Dist5 },
}

impl PhaseOutcome {
    pub fn phase(&self) -> Option<PhaseLabel> {
        match self {
            PhaseOutcome::Phase { phase, .. } => Some(*phase),
            _ => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            PhaseOutcome::Phase { phase, .. } => phase.name(),
            PhaseOutcome::FirstOrderLine { .. } => "FirstOrderLine",
            PhaseOutcome::Critical { .. } => "Critical",
        }
    }
}

/// Phase at `(p, f)` from the long-time limit of the recursion.
pub fn classify_phase(p: f64, f: f64) -> Result<PhaseOutcome> {
    classify_phase_with(p, f, &Convergence::default())
}

pub fn classify_phase_with(p: f64, f: f64, opts: &Convergence) -> Result<PhaseOutcome> {
    check_unit("p", p)?;
    check_unit("f", f)?;
    if f <= 0.0 || f >= 1.0 {
        return Err(Error::OutOfRange { name: "f", value: f, min: 0.0, max: 1.0 });
    }
    if p >= 1.0 {
        // p = 1 is deep in the encoding phase; the QD branch is undefined.
        let limit = converge(&initial_condition(f, false)?, p, opts)?;
        return encoding_outcome(f, limit);
    }
    let critical =
        (p - P_QD_MIXED).abs() < CRITICAL_TOL || (p - P_MIXED_ENCODING).abs() < CRITICAL_TOL;
    if (f - 0.5).abs() < 1e-15 && p > P_QD_MIXED + CRITICAL_TOL && !critical {
        let fixed = closed_form_fixed_points(p)?;
        let mut stable = fixed
            .iter()
            .filter(|r| r.stable && r.kind != FixedPointKind::Qd)
            .map(|r| r.point);
        let first = stable.next().ok_or(Error::NotConverged { steps: 0 })?;
        return Ok(PhaseOutcome::FirstOrderLine { limits: [first, first.z2_swap()] });
    }
    let limit = converge(&initial_condition(f, false)?, p, opts)?;
    if critical {
        return Ok(PhaseOutcome::Critical { limit: limit.point });
    }
    let fixed = closed_form_fixed_points(p)?;
    let nearest = fixed
        .iter()
        .map(|r| (r.point.sup_distance(&limit.point), r))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    match nearest {
        Some((d, r)) if d < MATCH_TOL => {
            let phase = match r.kind {
                FixedPointKind::Qd => PhaseLabel::Qd,
                FixedPointKind::Mixed => PhaseLabel::Mixed,
                FixedPointKind::EncodingN | FixedPointKind::EncodingA => PhaseLabel::Encoding,
                FixedPointKind::Z2Symmetric => {
                    return Ok(PhaseOutcome::Critical { limit: limit.point })
                }
            };
            Ok(PhaseOutcome::Phase { phase, limit: limit.point })
        }
        _ => Err(Error::NotConverged { steps: limit.steps }),
    }
}

fn encoding_outcome(f: f64, limit: Limit) -> Result<PhaseOutcome> {
    let target = if f < 0.5 { SubgroupLabel::N } else { SubgroupLabel::A };
    if limit.point.sup_distance(&Dist5::delta(target)) < MATCH_TOL {
        Ok(PhaseOutcome::Phase { phase: PhaseLabel::Encoding, limit: limit.point })
    } else {
        Err(Error::NotConverged { steps: limit.steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(c: [f64; 5]) -> Dist5 {
        Dist5::new(c).unwrap()
    }

    fn close(a: &Dist5, b: [f64; 5], tol: f64) {
        for (x, y) in a.as_array().iter().zip(b.iter()) {
            assert_abs_diff_eq!(*x, *y, epsilon = tol);
        }
    }

    #[test]
    fn mb_examples() {
        close(&apply_mb(&d([1.0, 0.0, 0.0, 0.0, 0.0])), [1.0, 0.0, 0.0, 0.0, 0.0], 0.0);
        close(&apply_mb(&d([0.0, 0.0, 0.0, 0.0, 1.0])), [0.0, 0.0, 0.0, 0.0, 1.0], 0.0);
        close(&apply_mb(&d([0.5, 0.0, 0.0, 0.0, 0.5])), [0.25, 0.5, 0.0, 0.0, 0.25], 1e-15);
        close(&apply_mb(&d([0.0, 0.0, 0.5, 0.5, 0.0])), [0.0, 0.0, 0.5, 0.5, 0.0], 1e-15);
    }

    #[test]
    fn mb_matches_table_sum() {
        let pi = d([0.1, 0.25, 0.2, 0.15, 0.3]);
        close(&apply_mb(&pi), *apply_mb_by_table(&pi).as_array(), 1e-15);
    }

    #[test]
    fn mu_examples() {
        let pi = d([0.1, 0.25, 0.2, 0.15, 0.3]);
        close(&apply_mu(&pi, 0.0), *pi.as_array(), 0.0);
        close(
            &apply_mu(&d([0.0, 1.0, 0.0, 0.0, 0.0]), 1.0),
            [0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0],
            1e-15,
        );
        let sym = d([0.4, 0.1, 0.1, 0.1, 0.3]);
        close(&apply_mu(&sym, 0.37), *sym.as_array(), 1e-15);
    }

    #[test]
    fn initial_conditions() {
        close(&initial_condition(0.3, false).unwrap(), [0.7, 0.0, 0.0, 0.0, 0.3], 0.0);
        close(&initial_condition(0.0, false).unwrap(), [1.0, 0.0, 0.0, 0.0, 0.0], 0.0);
        close(&initial_condition(0.3, true).unwrap(), [0.7, 0.3, 0.0, 0.0, 0.0], 0.0);
        assert!(initial_condition(1.5, false).is_err());
    }

    #[test]
    fn invalid_inputs_rejected() {
        let bad = Dist5::from_raw([0.5, 0.5, 0.5, 0.0, 0.0]);
        assert!(apply_m(&bad, 0.3).is_err());
        assert!(iterate(&Dist5::delta(SubgroupLabel::N), 1.2, 3).is_err());
    }

    #[test]
    fn iterate_trivial_fixed_point() {
        let seq = iterate(&Dist5::delta(SubgroupLabel::N), 0.42, 20).unwrap();
        assert_eq!(seq.len(), 21);
        for pi in seq {
            close(&pi, [1.0, 0.0, 0.0, 0.0, 0.0], 0.0);
        }
    }

    // Oracle: the QD closed form evaluated at p = 0.3 is 0.759517...
    #[test]
    fn iterate_to_qd_value() {
        let pi0 = initial_condition(0.2, false).unwrap();
        let last = *iterate(&pi0, 0.3, 200).unwrap().last().unwrap();
        assert_abs_diff_eq!(last[SubgroupLabel::Z], 0.759_517, epsilon = 1e-6);
    }

    #[test]
    fn iterate_to_mixed_value() {
        let pi0 = initial_condition(0.3, false).unwrap();
        let last = *iterate(&pi0, 0.7, 500).unwrap().last().unwrap();
        close(&last, [5.0 / 9.0, 2.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 0.0], 1e-6);
    }

    #[test]
    fn fixed_points_have_small_residuals() {
        for k in 0..100 {
            let p = k as f64 / 100.0;
            for r in closed_form_fixed_points(p).unwrap() {
                assert!(r.residual < 1e-10, "p = {p}, {:?}", r.kind);
            }
        }
        assert_eq!(closed_form_fixed_points(1.0), Err(Error::DegenerateP));
    }

    #[test]
    fn qd_point_at_zero_is_pure_z() {
        let reports = closed_form_fixed_points(0.0).unwrap();
        let qd = reports.iter().find(|r| r.kind == FixedPointKind::Qd).unwrap();
        close(&qd.point, [0.0, 1.0, 0.0, 0.0, 0.0], 1e-15);
        assert!(qd.stable);
    }

    #[test]
    fn mixed_point_physical_only_in_window() {
        let has_mixed =
            |p: f64| closed_form_fixed_points(p).unwrap().iter().any(|r| r.kind == FixedPointKind::Mixed);
        assert!(!has_mixed(0.55));
        assert!(has_mixed(0.7));
        assert!(!has_mixed(0.8));
        let reports = closed_form_fixed_points(0.7).unwrap();
        let mixed = reports.iter().find(|r| r.kind == FixedPointKind::Mixed).unwrap();
        close(&mixed.point, [5.0 / 9.0, 2.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 0.0], 1e-14);
        assert!(mixed.stable);
    }

    #[test]
    fn encoding_point_stability() {
        let n = Dist5::delta(SubgroupLabel::N);
        assert!(tangent_eigenvalue_moduli(&n, 0.7)[0] > 1.0);
        assert!(tangent_eigenvalue_moduli(&n, 0.8)[0] < 1.0);
        let reports = closed_form_fixed_points(0.8).unwrap();
        let enc = reports.iter().find(|r| r.kind == FixedPointKind::EncodingN).unwrap();
        assert!(enc.stable);
    }

    // The QD point is stable below 3/5 and unstable above.
    #[test]
    fn qd_point_stability_changes_at_three_fifths() {
        for &(p, stable) in &[(0.3, true), (0.59, true), (0.61, false), (0.7, false)] {
            let qd = qd_fixed_point(p).unwrap();
            let lead = tangent_eigenvalue_moduli(&qd, p)[0];
            assert_eq!(lead < 1.0, stable, "p = {p}, |λ| = {lead}");
        }
        let lead = tangent_eigenvalue_moduli(&qd_fixed_point(0.6).unwrap(), 0.6)[0];
        assert_abs_diff_eq!(lead, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn z2_symmetric_point_odd_eigenvalue() {
        let p = 0.7;
        let star = z2_symmetric_fixed_point(p);
        let lambda = 1.0 + star[SubgroupLabel::A];
        let jac = jacobian(&star, p);
        // J (e_n - e_a) = λ (e_n - e_a)
        for i in 0..5 {
            let jv = jac[i][0] - jac[i][4];
            let expected = match i {
                0 => lambda,
                4 => -lambda,
                _ => 0.0,
            };
            assert_abs_diff_eq!(jv, expected, epsilon = 1e-8);
        }
        assert!(lambda > 1.0);
        let reports = closed_form_fixed_points(p).unwrap();
        let sym = reports.iter().find(|r| r.kind == FixedPointKind::Z2Symmetric).unwrap();
        assert!(!sym.stable);
        assert!(sym.leading_eigenvalue_modulus >= lambda - 1e-8);
    }

    #[test]
    fn projected_jacobian_kills_uniform_direction() {
        let pi = d([0.1, 0.25, 0.2, 0.15, 0.3]);
        let jac = jacobian(&pi, 0.4);
        for row in jac {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), 0.0, epsilon = 1e-9);
        }
        // columns are sum-free too: M preserves the plane
        for j in 0..5 {
            assert_abs_diff_eq!((0..5).map(|i| jac[i][j]).sum::<f64>(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_phase(0.5, 0.3).unwrap().phase(), Some(PhaseLabel::Qd));
        assert_eq!(classify_phase(0.7, 0.3).unwrap().phase(), Some(PhaseLabel::Mixed));
        match classify_phase(0.8, 0.3).unwrap() {
            PhaseOutcome::Phase { phase: PhaseLabel::Encoding, limit } => {
                assert!(limit[SubgroupLabel::N] > 1.0 - 1e-6)
            }
            other => panic!("{other:?}"),
        }
        match classify_phase(0.9, 0.7).unwrap() {
            PhaseOutcome::Phase { phase: PhaseLabel::Encoding, limit } => {
                assert!(limit[SubgroupLabel::A] > 1.0 - 1e-6)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn first_order_line_and_critical() {
        match classify_phase(0.7, 0.5).unwrap() {
            PhaseOutcome::FirstOrderLine { limits } => {
                assert_eq!(limits[0].z2_swap(), limits[1]);
                close(&limits[0], *mixed_fixed_point(0.7).as_array(), 1e-14);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(classify_phase(0.4, 0.5).unwrap().phase(), Some(PhaseLabel::Qd));
        assert!(matches!(classify_phase(0.6, 0.3).unwrap(), PhaseOutcome::Critical { .. }));
        assert!(matches!(classify_phase(0.75, 0.3).unwrap(), PhaseOutcome::Critical { .. }));
        assert!(classify_phase(0.5, 0.0).is_err());
    }

    #[test]
    fn mutual_info_examples() {
        assert_eq!(mutual_info_distribution(&Dist5::delta(SubgroupLabel::N)), [1.0, 0.0, 0.0]);
        let qd = converge(&initial_condition(0.3, false).unwrap(), 0.4, &Convergence::default())
            .unwrap();
        assert_abs_diff_eq!(mutual_info_distribution(&qd.point)[1], 1.0, epsilon = 1e-9);
        let enc = converge(&initial_condition(0.7, false).unwrap(), 0.9, &Convergence::default())
            .unwrap();
        assert_abs_diff_eq!(mutual_info_distribution(&enc.point)[2], 1.0, epsilon = 1e-9);
    }
}
