use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} is outside [{min}, {max}]")]
    OutOfRange { name: &'static str, value: f64, min: f64, max: f64 },

    #[error("parameter `{name}` = {value} is not finite")]
    NotFinite { name: &'static str, value: f64 },

    #[error("component {index} = {value} is negative")]
    NegativeComponent { index: usize, value: f64 },

    #[error("components sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("nested subsystems need 0 < f < g < 1, got f = {f}, g = {g}")]
    NotNested { f: f64, g: f64 },

    #[error("p = 1 has no finite quantum-Darwinism fixed point")]
    DegenerateP,

    #[error("iteration did not reach a known fixed point within {steps} steps")]
    NotConverged { steps: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::NotFinite { name, value });
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange { name, value, min: 0.0, max: 1.0 });
    }
    Ok(value)
}
