//! Eigenvalues of small dense real matrices.

use alloc::vec::Vec;

use nalgebra::DMatrix;

/// Moduli of the (possibly complex) eigenvalues of a row-major `n x n`
/// matrix, sorted in decreasing order.
pub fn eigenvalue_moduli(entries: &[f64], n: usize) -> Vec<f64> {
    debug_assert_eq!(entries.len(), n * n);
    let m = DMatrix::from_row_slice(n, n, entries);
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|c| libm::hypot(c.re, c.im)).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_has_unit_moduli() {
        let m = [0.0, -2.0, 2.0, 0.0];
        let e = eigenvalue_moduli(&m, 2);
        assert!((e[0] - 2.0).abs() < 1e-12 && (e[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn triangular() {
        let m = [0.5, 3.0, 0.0, 0.0, -1.5, 2.0, 0.0, 0.0, 0.25];
        let e = eigenvalue_moduli(&m, 3);
        assert!((e[0] - 1.5).abs() < 1e-12);
        assert!((e[2] - 0.25).abs() < 1e-12);
    }
}
