//! Parameter grids: `start:stop:step`, a comma list, or a single value.

use std::str::FromStr;

/// Grid points are rounded to this many decimals so that `0.1:0.3:0.1`
/// yields `0.3`, not `0.30000000000000004`.
const DECIMALS: i32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn points(&self) -> &[f64] {
        &self.0
    }
}

fn round(x: f64) -> f64 {
    let scale = 10f64.powi(DECIMALS);
    (x * scale).round() / scale
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let points = match parts.as_slice() {
            [start, stop, step] => {
                let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
                if step <= 0.0 {
                    return Err(format!("grid step must be positive, got {step}"));
                }
                if stop < start {
                    return Err(format!("grid stop {stop} is below start {start}"));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..n).map(|i| round(start + i as f64 * step)).collect()
            }
            [list] => list.split(',').map(number).collect::<Result<Vec<_>, _>>()?,
            _ => return Err(format!("`{s}` is neither `start:stop:step` nor a comma list")),
        };
        if points.is_empty() {
            return Err("grid is empty".into());
        }
        Ok(Grid(points))
    }
}
