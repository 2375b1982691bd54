//! The order parameter: a probability vector over the five subgroup labels.

use core::ops::Index;

use crate::algebra::SubgroupLabel;
use crate::error::{Error, Result};

/// Tolerance for non-negativity and the sum rule.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Probability distribution `(π_n, π_z, π_x, π_y, π_a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dist5([f64; 5]);

impl Dist5 {
    pub fn new(components: [f64; 5]) -> Result<Self> {
        validate_simplex(&components)?;
        Ok(Dist5(components))
    }

    /// Wraps components without validation. Used internally for maps that
    /// are known to preserve the simplex.
    pub(crate) const fn from_raw(components: [f64; 5]) -> Self {
        Dist5(components)
    }

    /// Point mass on one label.
    pub const fn delta(label: SubgroupLabel) -> Self {
        let mut c = [0.0; 5];
        c[label as usize] = 1.0;
        Dist5(c)
    }

    pub const fn as_array(&self) -> &[f64; 5] {
        &self.0
    }

    pub const fn into_array(self) -> [f64; 5] {
        self.0
    }

    pub fn get(&self, label: SubgroupLabel) -> f64 {
        self.0[label.index()]
    }

    /// The `n <-> a` image.
    pub fn z2_swap(&self) -> Self {
        let [n, z, x, y, a] = self.0;
        Dist5([a, z, x, y, n])
    }

    /// Sup-norm distance.
    pub fn sup_distance(&self, other: &Dist5) -> f64 {
        self.0.iter().zip(other.0.iter()).fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }

    pub(crate) fn renormalized(components: [f64; 5]) -> Self {
        let sum: f64 = components.iter().sum();
        Dist5(components.map(|c| c / sum))
    }
}

impl Index<SubgroupLabel> for Dist5 {
    type Output = f64;

    fn index(&self, label: SubgroupLabel) -> &f64 {
        &self.0[label.index()]
    }
}

pub(crate) fn validate_simplex(components: &[f64]) -> Result<()> {
    let mut sum = 0.0;
    for (index, &value) in components.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NotFinite { name: "component", value });
        }
        if value < -SIMPLEX_TOL {
            return Err(Error::NegativeComponent { index, value });
        }
        sum += value;
    }
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid() {
        assert!(matches!(Dist5::new([0.5, 0.5, 0.1, 0.0, 0.0]), Err(Error::NotNormalized { .. })));
        assert!(matches!(
            Dist5::new([1.1, -0.1, 0.0, 0.0, 0.0]),
            Err(Error::NegativeComponent { index: 1, .. })
        ));
        assert!(Dist5::new([f64::NAN, 1.0, 0.0, 0.0, 0.0]).is_err());
        assert!(Dist5::new([0.2; 5]).is_ok());
    }

    #[test]
    fn swap_and_index() {
        let d = Dist5::new([0.1, 0.2, 0.3, 0.15, 0.25]).unwrap();
        assert_eq!(d[SubgroupLabel::X], 0.3);
        assert_eq!(d.z2_swap().get(SubgroupLabel::N), 0.25);
        assert_eq!(d.z2_swap().z2_swap(), d);
    }
}
