//! Encoding dynamics (`p = 1`) watched by an eavesdropping environment.
//!
//! Each internal edge of the tree leaks a CNOT copy of its qubit to a fresh
//! environment qubit with probability `r`. An observer holds a fraction `f`
//! of the environment and may only measure `Z` on it. The order parameter
//! stays in `{π_a = 0, π_x = π_y}` and, at `f = 1`, `π_n` vanishes
//! continuously at `r_c = (2 - √3)/2`.

use alloc::vec::Vec;

use crate::dist::Dist5;
use crate::error::{check_unit, Result};
use crate::recursion;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EavesdropParams {
    /// Eavesdropping probability per edge.
    pub r: f64,
    /// Accessible fraction of the environment.
    pub f: f64,
}

impl EavesdropParams {
    pub fn new(r: f64, f: f64) -> Result<Self> {
        check_unit("r", r)?;
        check_unit("f", f)?;
        Ok(EavesdropParams { r, f })
    }
}

/// Critical eavesdropping rate at full access.
pub fn critical_rate() -> f64 {
    (2.0 - libm::sqrt(3.0)) / 2.0
}

/// Merges a subtree with one environment qubit: `B(s, η)` with
/// `η = (1-f, f, 0, 0, 0)` (the copy is in `F` with probability `f` and
/// only its `Z` is accessible).
pub fn apply_me(pi: &Dist5, f: f64) -> Dist5 {
    let [n, z, x, y, a] = *pi.as_array();
    let q = 1.0 - f;
    Dist5::from_raw([q * (n + x + y), f + q * (z + a), 0.0, 0.0, 0.0])
}

/// `M~(π) = (1-r) M_{p=1}(π) + r M_e(M_{p=1}(π))`, projected on the sum rule.
pub fn apply_mtilde(pi: &Dist5, params: &EavesdropParams) -> Dist5 {
    let m = recursion::step(pi, 1.0);
    let e = apply_me(&m, params.f);
    let r = params.r;
    let mixed: [f64; 5] =
        core::array::from_fn(|i| (1.0 - r) * m.as_array()[i] + r * e.as_array()[i]);
    let sum: f64 = mixed.iter().sum();
    Dist5::from_raw(mixed.map(|v| v / sum))
}

/// The observer never sees system outputs, so every leaf starts at `n`.
pub fn eavesdrop_initial_condition() -> Dist5 {
    Dist5::delta(crate::SubgroupLabel::N)
}

/// `[π(0), ..., π(t)]` from `(1, 0, 0, 0, 0)`.
pub fn iterate_eavesdrop(params: &EavesdropParams, t: usize) -> Vec<Dist5> {
    let mut out = Vec::with_capacity(t + 1);
    let mut pi = eavesdrop_initial_condition();
    out.push(pi);
    for _ in 0..t {
        pi = apply_mtilde(&pi, params);
        out.push(pi);
    }
    out
}

/// Iterates until the sup-norm change is below `tol` or `max_steps` is hit.
pub fn converge_eavesdrop(params: &EavesdropParams, tol: f64, max_steps: usize) -> (Dist5, usize) {
    let mut pi = eavesdrop_initial_condition();
    for k in 1..=max_steps {
        let next = apply_mtilde(&pi, params);
        let change = next.sup_distance(&pi);
        pi = next;
        if change < tol {
            return (pi, k);
        }
    }
    (pi, max_steps)
}

/// Coefficients `(a, b, c)` of `a π_n² + b π_n + c = 0` satisfied by the
/// fixed point after eliminating `π_x`.
pub fn fixed_point_quadratic(params: &EavesdropParams) -> (f64, f64, f64) {
    let EavesdropParams { r, f } = *params;
    (f * r - 2.0 * r + 1.0, 4.0 * r - 1.0 + 4.0 * f * r - 4.0 * f * r * r, 2.0 * (f - 1.0) * r)
}

/// `π_n` at full access: `max(0, (4r² - 8r + 1)/(1 - r))`.
pub fn full_access_pi_n(r: f64) -> f64 {
    ((4.0 * r * r - 8.0 * r + 1.0) / (1.0 - r)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EavesdropFixedPoint {
    pub point: Dist5,
    /// `π_n* = 0`: the environment always disentangles the reference.
    pub purified: bool,
}

/// Slack on the discriminant for tangent roots.
const DISCRIMINANT_CLAMP: f64 = -1e-14;

/// Stable fixed point of `M~`.
pub fn eavesdrop_fixed_point(params: &EavesdropParams) -> EavesdropFixedPoint {
    let EavesdropParams { r, f } = *params;
    let pi_n = if f >= 1.0 {
        if r >= 1.0 {
            0.0
        } else {
            full_access_pi_n(r)
        }
    } else {
        positive_root(fixed_point_quadratic(params))
    };
    // first fixed-point equation solved for π_x
    let pi_x = (1.0 - r) * (1.0 - pi_n * pi_n) / (3.0 + 4.0 * (1.0 - r) * pi_n);
    let pi_z = 1.0 - pi_n - 2.0 * pi_x;
    EavesdropFixedPoint {
        point: Dist5::from_raw([pi_n, pi_z, pi_x, pi_x, 0.0]),
        purified: pi_n == 0.0,
    }
}

/// Root of the quadratic in `[0, 1]`, computed without cancellation.
fn positive_root((a, b, c): (f64, f64, f64)) -> f64 {
    if a.abs() < 1e-300 {
        return (-c / b).clamp(0.0, 1.0);
    }
    let mut disc = b * b - 4.0 * a * c;
    if (DISCRIMINANT_CLAMP..0.0).contains(&disc) {
        disc = 0.0;
    }
    let sq = libm::sqrt(disc.max(0.0));
    // q = -(b + sign(b) sq)/2; roots q/a and c/q
    let q = -0.5 * (b + libm::copysign(sq, b));
    let mut roots = [f64::NAN, f64::NAN];
    if q != 0.0 {
        roots[0] = q / a;
        roots[1] = c / q;
    } else {
        roots[0] = 0.0;
        roots[1] = -b / a;
    }
    roots
        .into_iter()
        .filter(|x| x.is_finite() && *x >= -1e-15 && *x <= 1.0 + 1e-12)
        .map(|x| x.clamp(0.0, 1.0))
        .fold(f64::NAN, |best, x| if best.is_nan() || x > best { x } else { best })
}

/// Coefficient of `y²` in the leading-order scaling function, obtained by
/// expanding the fixed-point quadratic to first order in `1 - f` and
/// `r - r_c`: `r_c / (4√3)`.
pub fn leading_order_metric() -> f64 {
    critical_rate() / (4.0 * libm::sqrt(3.0))
}

/// `F(y) = √(metric · y² + 1)`.
pub fn scaling_function(y: f64, metric: f64) -> f64 {
    libm::sqrt(metric * y * y + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingPoint {
    pub f: f64,
    pub r: f64,
    /// `(1-f)^{1/2} / |r - r_c|`
    pub y: f64,
    /// `(π_n* + 4 (r - r_c)) / (4 |r - r_c|)`
    pub scaled: f64,
    /// `F(y)` with [`leading_order_metric`].
    pub reference: f64,
}

/// Rescaled order parameter near `(f, r) = (1, r_c)`. Points with
/// `r = r_c` (where `y` diverges) are skipped.
pub fn scaling_collapse(f_values: &[f64], r_values: &[f64]) -> Vec<ScalingPoint> {
    let rc = critical_rate();
    let metric = leading_order_metric();
    let mut out = Vec::with_capacity(f_values.len() * r_values.len());
    for &f in f_values {
        for &r in r_values {
            let delta = r - rc;
            if delta.abs() < 1e-12 {
                continue;
            }
            let pi_n = eavesdrop_fixed_point(&EavesdropParams { r, f }).point.as_array()[0];
            let y = libm::sqrt(1.0 - f) / delta.abs();
            out.push(ScalingPoint {
                f,
                r,
                y,
                scaled: (pi_n + 4.0 * delta) / (4.0 * delta.abs()),
                reference: scaling_function(y, metric),
            });
        }
    }
    out
}
