//! Two-replica (annealed) analysis.
//!
//! The averaged two-copy operator state is a combination of three
//! operator-states `σ` (identity pairing), `τ` (swap pairing) and `ν`, with
//! weights `(w_σ, w_ν, w_τ)` defined up to a global factor. Purities of `F`
//! and `RF` are contractions with `σ` and `τ`.

use alloc::vec::Vec;

use crate::error::{check_unit, Error, Result};
use crate::spectral;

/// Local Hilbert-space dimension. Averaging a gate over `U(q)` sends `ν` to
/// `(σ + τ)/(q + 1)`; the Clifford group on qubits gives the same moments.
pub const LOCAL_DIM: u32 = 2;

const NU_TO_PAIRING: f64 = 1.0 / (LOCAL_DIM as f64 + 1.0);

/// Upper end of the bistable window, `(3/7)(2√2 - 1)`.
pub fn p_l() -> f64 {
    3.0 / 7.0 * (2.0 * core::f64::consts::SQRT_2 - 1.0)
}

/// Lower end of the bistable window: encoding points turn stable.
pub const P_ENCODING_STABLE: f64 = 0.75;

/// Distance to a fixed point below which an orbit counts as converged.
pub const ATTRACTOR_TOL: f64 = 1e-8;
/// Iteration budget before escalation.
pub const BASE_BUDGET: usize = 100_000;
/// Escalation stops here.
pub const MAX_BUDGET: usize = 1_000_000;
/// Width of the bracket returned by [`compute_pc`].
pub const PC_TOL: f64 = 1e-7;

/// Operator-state weights `(w_σ, w_ν, w_τ)`, normalized to sum 1.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReplicaWeights {
    pub w_sigma: f64,
    pub w_nu: f64,
    pub w_tau: f64,
}

impl ReplicaWeights {
    /// Normalizes any non-negative, non-zero triple.
    pub fn new(w_sigma: f64, w_nu: f64, w_tau: f64) -> Result<Self> {
        for (index, value) in [w_sigma, w_nu, w_tau].into_iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NotFinite { name: "weight", value });
            }
            if value < 0.0 {
                return Err(Error::NegativeComponent { index, value });
            }
        }
        let sum = w_sigma + w_nu + w_tau;
        if sum <= 0.0 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self::normalized([w_sigma, w_nu, w_tau]))
    }

    fn normalized([s, n, t]: [f64; 3]) -> Self {
        let sum = s + n + t;
        ReplicaWeights { w_sigma: s / sum, w_nu: n / sum, w_tau: t / sum }
    }

    pub const fn as_array(&self) -> [f64; 3] {
        [self.w_sigma, self.w_nu, self.w_tau]
    }

    /// `σ <-> τ`.
    pub fn z2_swap(&self) -> Self {
        ReplicaWeights { w_sigma: self.w_tau, w_nu: self.w_nu, w_tau: self.w_sigma }
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        let (a, b) = (self.as_array(), other.as_array());
        (0..3).fold(0.0, |m, i| f64::max(m, (a[i] - b[i]).abs()))
    }

    /// Leaf weights: `σ` if the leaf is outside `F`, `τ` if inside.
    pub fn initial(f: f64) -> Result<Self> {
        check_unit("f", f)?;
        Ok(ReplicaWeights { w_sigma: 1.0 - f, w_nu: 0.0, w_tau: f })
    }
}

/// One unnormalized step: branch (`v`), then the gate average.
pub fn apply_mw_raw(w: [f64; 3], p: f64) -> [f64; 3] {
    let [s, n, t] = w;
    let v_nu = n * n + 2.0 * (s * n + s * t + n * t);
    let leak = p * NU_TO_PAIRING * v_nu;
    [s * s + leak, (1.0 - p) * v_nu, t * t + leak]
}

/// `M_w`, renormalized to sum 1.
pub fn apply_mw(w: &ReplicaWeights, p: f64) -> ReplicaWeights {
    ReplicaWeights::normalized(apply_mw_raw(w.as_array(), p))
}

/// `(purity_F, purity_RF)` up to the common scale of `w`.
pub fn annealed_purities(w: &ReplicaWeights) -> (f64, f64) {
    let [s, n, t] = w.as_array();
    ((4.0 * s + 2.0 * n + 2.0 * t) / 4.0, (2.0 * s + 2.0 * n + 4.0 * t) / 4.0)
}

/// `I⁽²⁾ = log₂ purity_RF - log₂ purity_F + 1`.
pub fn i2_of_weights(w: &ReplicaWeights) -> f64 {
    let (pf, prf) = annealed_purities(w);
    libm::log2(prf) - libm::log2(pf) + 1.0
}

/// Tree depth for annealed quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Horizon {
    Finite(u32),
    Infinite,
}

/// `[w(0), ..., w(t)]` from `(1-f, 0, f)`.
pub fn iterate_weights(p: f64, f: f64, t: u32) -> Result<Vec<ReplicaWeights>> {
    check_unit("p", p)?;
    let mut w = ReplicaWeights::initial(f)?;
    let mut out = Vec::with_capacity(t as usize + 1);
    out.push(w);
    for _ in 0..t {
        w = apply_mw(&w, p);
        out.push(w);
    }
    Ok(out)
}

/// Weights at depth `t`, or their limit.
pub fn weights_at(p: f64, f: f64, horizon: Horizon) -> Result<ReplicaWeights> {
    match horizon {
        Horizon::Finite(t) => Ok(*iterate_weights(p, f, t)?.last().expect("non-empty")),
        Horizon::Infinite => {
            check_unit("p", p)?;
            let mut w = ReplicaWeights::initial(f)?;
            for _ in 0..MAX_BUDGET {
                let next = apply_mw(&w, p);
                let change = next.sup_distance(&w);
                w = next;
                if change < 1e-15 {
                    break;
                }
            }
            Ok(w)
        }
    }
}

pub fn annealed_i2(p: f64, f: f64, horizon: Horizon) -> Result<f64> {
    Ok(i2_of_weights(&weights_at(p, f, horizon)?))
}

/// `p(u) = 3u(1-u) / ((u+1)(1-2u²))`, the QD branch written as `p` of `u`.
pub fn qd_branch_p(u: f64) -> f64 {
    3.0 * u * (1.0 - u) / ((u + 1.0) * (1.0 - 2.0 * u * u))
}

/// Inverts [`qd_branch_p`] on `u ∈ [0, 1/2]` by bisection.
pub fn qd_branch_u(p: f64) -> Result<f64> {
    check_unit("p", p)?;
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if qd_branch_p(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn qd_weights(p: f64) -> Result<ReplicaWeights> {
    let u = qd_branch_u(p)?;
    Ok(ReplicaWeights { w_sigma: u, w_nu: 1.0 - 2.0 * u, w_tau: u })
}

/// Eigenvalue of the normalized map at the QD point along the `Z₂`-odd
/// direction `(1, 0, -1)`: `2u / Λ` with `Λ` the unnormalized total.
pub fn qd_odd_eigenvalue(p: f64) -> Result<f64> {
    let u = qd_branch_u(p)?;
    let lambda: f64 = apply_mw_raw([u, 1.0 - 2.0 * u, u], p).iter().sum();
    Ok(2.0 * u / lambda)
}

/// Roots `(u₊, u₋)` of `p u² - (3 - 3p) u + 4p - 3 = 0` when real.
pub fn intermediate_roots(p: f64) -> Option<(f64, f64)> {
    let b = 3.0 - 3.0 * p;
    let disc = b * b - 4.0 * p * (4.0 * p - 3.0);
    if disc < -1e-14 || p <= 0.0 {
        return None;
    }
    let sq = libm::sqrt(disc.max(0.0));
    Some(((b + sq) / (2.0 * p), (b - sq) / (2.0 * p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ReplicaFixedPointKind {
    EncodingSigma,
    EncodingTau,
    Qd,
    Intermediate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReplicaFixedPoint {
    pub weights: ReplicaWeights,
    pub kind: ReplicaFixedPointKind,
    /// Moduli of the two tangent eigenvalues, decreasing.
    pub eigenvalue_moduli: [f64; 2],
    pub stable: bool,
    pub residual: f64,
}

/// Fixed points of the normalized map with their linear stability.
/// Intermediate points are included only where they are non-negative,
/// i.e. for `3/4 ≤ p ≤ p_l`.
pub fn replica_fixed_points(p: f64) -> Result<Vec<ReplicaFixedPoint>> {
    check_unit("p", p)?;
    let mut points = Vec::with_capacity(5);
    let mut push = |weights: ReplicaWeights, kind| {
        let ev = tangent_eigenvalue_moduli(&weights, p);
        points.push(ReplicaFixedPoint {
            weights,
            kind,
            eigenvalue_moduli: ev,
            stable: ev[0] < 1.0 - crate::recursion::STABILITY_MARGIN,
            residual: apply_mw(&weights, p).sup_distance(&weights),
        });
    };
    push(ReplicaWeights { w_sigma: 1.0, w_nu: 0.0, w_tau: 0.0 }, ReplicaFixedPointKind::EncodingSigma);
    push(ReplicaWeights { w_sigma: 0.0, w_nu: 0.0, w_tau: 1.0 }, ReplicaFixedPointKind::EncodingTau);
    push(qd_weights(p)?, ReplicaFixedPointKind::Qd);
    if let Some((up, um)) = intermediate_roots(p) {
        let nu = 1.0 - up - um;
        if um >= -1e-12 && nu >= -1e-12 && up <= 1.0 + 1e-12 {
            let w = ReplicaWeights::normalized([up.max(0.0), nu.max(0.0), um.max(0.0)]);
            push(w, ReplicaFixedPointKind::Intermediate);
            push(w.z2_swap(), ReplicaFixedPointKind::Intermediate);
        }
    }
    Ok(points)
}

/// Tangent-plane eigenvalue moduli of the normalized map, by central
/// differences along sum-zero directions.
pub fn tangent_eigenvalue_moduli(w: &ReplicaWeights, p: f64) -> [f64; 2] {
    let h = crate::recursion::JACOBIAN_STEP;
    let base = w.as_array();
    let normalized = |x: [f64; 3]| {
        let y = apply_mw_raw(x, p);
        let s: f64 = y.iter().sum();
        y.map(|v| v / s)
    };
    let mut jac = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut plus = base;
        let mut minus = base;
        for i in 0..3 {
            let d = if i == j { 1.0 } else { 0.0 } - 1.0 / 3.0;
            plus[i] += h * d;
            minus[i] -= h * d;
        }
        let (fp, fm) = (normalized(plus), normalized(minus));
        for i in 0..3 {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    // coordinates (δσ, δν) with δτ = -δσ - δν
    let tangent = [
        jac[0][0] - jac[0][2],
        jac[0][1] - jac[0][2],
        jac[1][0] - jac[1][2],
        jac[1][1] - jac[1][2],
    ];
    let ev = spectral::eigenvalue_moduli(&tangent, 2);
    [ev[0], ev[1]]
}

/// Which attractor an orbit settles on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Attractor {
    Qd,
    Encoding,
}

/// Iterates from `(1-f, 0, f)` until within [`ATTRACTOR_TOL`] of the QD or an
/// encoding point, doubling the budget from [`BASE_BUDGET`] up to
/// [`MAX_BUDGET`]. Returns `None` if still undecided.
pub fn classify_attractor(p: f64, f: f64) -> Result<Option<Attractor>> {
    let qd = qd_weights(p)?;
    let mut w = ReplicaWeights::initial(f)?;
    let mut done = 0;
    let mut budget = BASE_BUDGET;
    loop {
        while done < budget {
            if w.sup_distance(&qd) < ATTRACTOR_TOL {
                return Ok(Some(Attractor::Qd));
            }
            if w.w_sigma > 1.0 - ATTRACTOR_TOL || w.w_tau > 1.0 - ATTRACTOR_TOL {
                return Ok(Some(Attractor::Encoding));
            }
            w = apply_mw(&w, p);
            done += 1;
        }
        if budget >= MAX_BUDGET {
            return Ok(None);
        }
        budget = (budget * 2).min(MAX_BUDGET);
    }
}

/// Threshold `p_c(f)`: QD attractor below, encoding above.
///
/// At `f = 1/2` the orbit never leaves the symmetric line, so the threshold is
/// where the QD point loses stability along the odd direction.
pub fn compute_pc(f: f64) -> Result<f64> {
    check_unit("f", f)?;
    if f <= 0.0 || f >= 1.0 {
        return Err(Error::OutOfRange { name: "f", value: f, min: 0.0, max: 1.0 });
    }
    if f == 0.5 {
        return odd_eigenvalue_crossing();
    }
    let (mut lo, mut hi) = (P_ENCODING_STABLE, p_l());
    while hi - lo > PC_TOL {
        let mid = 0.5 * (lo + hi);
        match classify_attractor(mid, f)? {
            Some(Attractor::Qd) => lo = mid,
            Some(Attractor::Encoding) => hi = mid,
            None => return Err(Error::NotConverged { steps: MAX_BUDGET }),
        }
    }
    Ok(0.5 * (lo + hi))
}

fn odd_eigenvalue_crossing() -> Result<f64> {
    let (mut lo, mut hi) = (P_ENCODING_STABLE, 0.8);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if qd_odd_eigenvalue(mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
