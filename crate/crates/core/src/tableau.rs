//! Phase-free stabilizer tableau stored column by column.
//!
//! Column `x[q]` (resp. `z[q]`) holds, for every generator, the X (resp. Z)
//! bit of its Pauli on qubit `q`. Gates act on columns only, so the
//! generator set is never row-reduced and stays as sparse as the circuit
//! makes it.

use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{Pauli, S3Perm, SubgroupLabel};
use crate::gf2::{self, BitMatrix, XorBasis};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabTableau {
    n: usize,
    /// Number of generators.
    k: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl StabTableau {
    /// `|0…0⟩` on `n` qubits: generator `i` is `Z_i`.
    pub fn zero_state(n: usize) -> Self {
        let words = gf2::words_for(n);
        let x = vec![0; n * words];
        let mut z = vec![0; n * words];
        for q in 0..n {
            gf2::set_bit(&mut z[q * words..(q + 1) * words], q, true);
        }
        StabTableau { n, k: n, words, x, z }
    }

    /// Builds from generator rows; no validation.
    pub fn from_generators(rows: &[Vec<Pauli>]) -> Self {
        let n = rows.first().map_or(0, Vec::len);
        let words = gf2::words_for(rows.len());
        let mut t = StabTableau { n, k: rows.len(), words, x: vec![0; n * words], z: vec![0; n * words] };
        for (g, row) in rows.iter().enumerate() {
            for (q, pauli) in row.iter().enumerate() {
                let (bx, bz) = pauli.to_bits();
                gf2::set_bit(t.col_mut(true, q), g, bx);
                gf2::set_bit(t.col_mut(false, q), g, bz);
            }
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_generators(&self) -> usize {
        self.k
    }

    pub fn x_col(&self, q: usize) -> &[u64] {
        &self.x[q * self.words..(q + 1) * self.words]
    }

    pub fn z_col(&self, q: usize) -> &[u64] {
        &self.z[q * self.words..(q + 1) * self.words]
    }

    fn col_mut(&mut self, x: bool, q: usize) -> &mut [u64] {
        let w = self.words;
        if x {
            &mut self.x[q * w..(q + 1) * w]
        } else {
            &mut self.z[q * w..(q + 1) * w]
        }
    }

    pub fn hadamard(&mut self, q: usize) {
        let w = self.words;
        self.x[q * w..(q + 1) * w].swap_with_slice(&mut self.z[q * w..(q + 1) * w]);
    }

    /// CNOT with control `c` and target `t`: `X_c → X_c X_t`, `Z_t → Z_c Z_t`.
    pub fn cnot(&mut self, c: usize, t: usize) {
        assert_ne!(c, t);
        let w = self.words;
        for k in 0..w {
            self.x[t * w + k] ^= self.x[c * w + k];
            self.z[c * w + k] ^= self.z[t * w + k];
        }
    }

    /// One-qubit Clifford permuting `(Z, X, Y)` up to phase.
    pub fn apply_perm(&mut self, q: usize, perm: S3Perm) {
        let (xx, xz) = perm.act_pauli(Pauli::X).to_bits();
        let (zx, zz) = perm.act_pauli(Pauli::Z).to_bits();
        let w = self.words;
        for k in 0..w {
            let (bx, bz) = (self.x[q * w + k], self.z[q * w + k]);
            let mask = |on: bool, v: u64| if on { v } else { 0 };
            self.x[q * w + k] = mask(xx, bx) ^ mask(zx, bz);
            self.z[q * w + k] = mask(xz, bx) ^ mask(zz, bz);
        }
    }

    /// Pauli of generator `g` on every qubit.
    pub fn generator(&self, g: usize) -> Vec<Pauli> {
        (0..self.n).map(|q| Pauli::from_bits(gf2::get_bit(self.x_col(q), g), gf2::get_bit(self.z_col(q), g))).collect()
    }

    pub fn generators(&self) -> Vec<Vec<Pauli>> {
        (0..self.num_generators()).map(|g| self.generator(g)).collect()
    }

    /// Row-major `k × 2n` matrix `(X | Z)`.
    pub fn to_matrix(&self) -> BitMatrix {
        let k = self.num_generators();
        let mut m = BitMatrix::zeros(k, 2 * self.n);
        for q in 0..self.n {
            for g in 0..k {
                m.set(g, q, gf2::get_bit(self.x_col(q), g));
                m.set(g, self.n + q, gf2::get_bit(self.z_col(q), g));
            }
        }
        m
    }

    /// Generators pairwise commute and are independent, with `k = n`.
    pub fn is_valid_pure_state(&self) -> bool {
        let k = self.num_generators();
        let words = gf2::words_for(k);
        // symplectic form: for each pair (g, h), Σ_q x_g z_h + z_g x_h = 0
        for g in 0..k {
            let mut acc = vec![0u64; words];
            for q in 0..self.n {
                let xg = gf2::get_bit(self.x_col(q), g);
                let zg = gf2::get_bit(self.z_col(q), g);
                if xg {
                    gf2::xor_into(&mut acc, self.z_col(q));
                }
                if zg {
                    gf2::xor_into(&mut acc, self.x_col(q));
                }
            }
            if acc.iter().any(|&w| w != 0) {
                return false;
            }
        }
        k == self.n && self.to_matrix().rank() == k
    }

    fn column_rank(&self, qubits: impl Iterator<Item = usize>) -> usize {
        let mut basis = XorBasis::new(self.num_generators());
        for q in qubits {
            basis.insert(self.x_col(q));
            basis.insert(self.z_col(q));
            if basis.is_full() {
                break;
            }
        }
        basis.rank()
    }

    /// Entanglement entropy (in bits) of a subset of a pure state:
    /// `rank(columns of A) - |A|`, evaluated on the smaller side of the cut.
    pub fn entropy(&self, subset: &[usize]) -> usize {
        let mut inside = vec![false; self.n];
        for &q in subset {
            inside[q] = true;
        }
        let size = inside.iter().filter(|&&b| b).count();
        if 2 * size <= self.n {
            self.column_rank((0..self.n).filter(|&q| inside[q])) - size
        } else {
            self.column_rank((0..self.n).filter(|&q| !inside[q])) - (self.n - size)
        }
    }

    /// Same as [`Self::entropy`] without the complement shortcut, by dense
    /// row reduction.
    pub fn entropy_dense(&self, subset: &[usize]) -> usize {
        let k = self.num_generators();
        let mut m = BitMatrix::zeros(k, 2 * subset.len());
        for (j, &q) in subset.iter().enumerate() {
            for g in 0..k {
                m.set(g, 2 * j, gf2::get_bit(self.x_col(q), g));
                m.set(g, 2 * j + 1, gf2::get_bit(self.z_col(q), g));
            }
        }
        m.rank() - subset.len()
    }

    /// Paulis on `reference` that are perfectly correlated with some Pauli
    /// string on `access` (only Z-type strings if `z_only`).
    ///
    /// A stabilizer element is a row combination `c`; it is supported in
    /// `{reference} ∪ access` iff `c` is orthogonal to every forbidden
    /// column. The R-projection of that kernel is the annihilator of
    /// `{(α, β) : α x_R + β z_R ∈ span(forbidden)}`.
    pub fn extract_subgroup(&self, reference: usize, access: &[usize], z_only: bool) -> SubgroupLabel {
        let mut allowed = vec![false; self.n];
        for &q in access {
            allowed[q] = true;
        }
        allowed[reference] = false;
        let mut forbidden = XorBasis::new(self.num_generators());
        for q in 0..self.n {
            if q == reference {
                continue;
            }
            if !allowed[q] || z_only {
                forbidden.insert(self.x_col(q));
            }
            if !allowed[q] {
                forbidden.insert(self.z_col(q));
            }
            if forbidden.is_full() {
                return SubgroupLabel::N;
            }
        }
        let (xr, zr) = (self.x_col(reference), self.z_col(reference));
        let x_in = forbidden.contains(xr);
        let z_in = forbidden.contains(zr);
        let y_in = {
            let sum: Vec<u64> = xr.iter().zip(zr).map(|(a, b)| a ^ b).collect();
            forbidden.contains(&sum)
        };
        match (x_in, z_in, y_in) {
            (false, false, false) => SubgroupLabel::A,
            (true, false, false) => SubgroupLabel::Z,
            (false, true, false) => SubgroupLabel::X,
            (false, false, true) => SubgroupLabel::Y,
            _ => SubgroupLabel::N,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Pauli::{I, X, Y, Z};

    fn bell() -> StabTableau {
        let mut t = StabTableau::zero_state(2);
        t.hadamard(0);
        t.cnot(0, 1);
        t
    }

    fn ghz(n: usize) -> StabTableau {
        let mut t = StabTableau::zero_state(n);
        t.hadamard(0);
        for q in 1..n {
            t.cnot(0, q);
        }
        t
    }

    #[test]
    fn bell_generators_and_entropy() {
        let t = bell();
        let mut gens = t.generators();
        gens.sort_by_key(|g| g.iter().map(|p| p.index()).collect::<Vec<_>>());
        assert_eq!(gens, vec![vec![Z, Z], vec![X, X]]);
        assert!(t.is_valid_pure_state());
        assert_eq!(t.entropy(&[0]), 1);
        assert_eq!(t.entropy(&[1]), 1);
        assert_eq!(t.entropy(&[]), 0);
        assert_eq!(t.entropy(&[0, 1]), 0);
        assert_eq!(t.extract_subgroup(0, &[1], false), SubgroupLabel::A);
        assert_eq!(t.extract_subgroup(0, &[1], true), SubgroupLabel::Z);
        assert_eq!(t.extract_subgroup(0, &[], false), SubgroupLabel::N);
    }

    #[test]
    fn ghz3() {
        let t = ghz(3);
        assert!(t.is_valid_pure_state());
        for q in 0..3 {
            assert_eq!(t.entropy(&[q]), 1);
            assert_eq!(t.entropy_dense(&[q]), 1);
        }
        assert_eq!(t.extract_subgroup(0, &[1], false), SubgroupLabel::Z);
        assert_eq!(t.extract_subgroup(0, &[1, 2], false), SubgroupLabel::A);
        assert_eq!(t.extract_subgroup(0, &[1, 2], true), SubgroupLabel::Z);
    }

    #[test]
    fn product_state() {
        let t = StabTableau::zero_state(5);
        for subset in [&[0usize][..], &[1, 3], &[0, 1, 2, 3]] {
            assert_eq!(t.entropy(subset), 0);
            assert_eq!(t.entropy_dense(subset), 0);
        }
    }

    #[test]
    fn perms_act_on_single_qubit_paulis() {
        for perm in S3Perm::ALL {
            for p in [Z, X, Y] {
                let mut t = StabTableau::from_generators(&[vec![p]]);
                t.apply_perm(0, perm);
                assert_eq!(t.generator(0), vec![perm.act_pauli(p)]);
            }
        }
        let mut t = StabTableau::from_generators(&[vec![I]]);
        t.apply_perm(0, S3Perm::ALL[3]);
        assert_eq!(t.generator(0), vec![I]);
    }

    #[test]
    fn gates_preserve_validity() {
        let mut t = ghz(4);
        t.apply_perm(2, S3Perm::ALL[4]);
        t.cnot(2, 3);
        t.hadamard(1);
        t.cnot(3, 0);
        assert!(t.is_valid_pure_state());
        for subset in [&[0usize][..], &[1, 2], &[0, 3], &[1, 2, 3]] {
            assert_eq!(t.entropy(subset), t.entropy_dense(subset));
        }
    }
}
