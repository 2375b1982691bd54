//! Bit-packed linear algebra over GF(2).

use alloc::vec;
use alloc::vec::Vec;

pub(crate) const WORD: usize = 64;

/// Number of `u64` words holding `bits` bits.
pub const fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
pub fn get_bit(v: &[u64], i: usize) -> bool {
    (v[i / WORD] >> (i % WORD)) & 1 == 1
}

#[inline]
pub fn set_bit(v: &mut [u64], i: usize, value: bool) {
    let mask = 1u64 << (i % WORD);
    if value {
        v[i / WORD] |= mask;
    } else {
        v[i / WORD] &= !mask;
    }
}

#[inline]
pub fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[inline]
fn highest_bit_below(v: &[u64], word_limit: usize) -> Option<usize> {
    (0..word_limit).rev().find(|&w| v[w] != 0).map(|w| w * WORD + 63 - v[w].leading_zeros() as usize)
}

/// Incrementally built basis of a subspace of `GF(2)^bits`, in echelon form
/// keyed by each vector's highest set bit.
#[derive(Debug, Clone)]
pub struct XorBasis {
    words: usize,
    vectors: Vec<u64>,
    /// `pivot_of[b]` = index into `vectors` of the element whose top bit is `b`.
    pivot_of: Vec<u32>,
    rank: usize,
    scratch: Vec<u64>,
}

const NO_PIVOT: u32 = u32::MAX;

impl XorBasis {
    pub fn new(bits: usize) -> Self {
        let words = words_for(bits);
        XorBasis { words, vectors: Vec::new(), pivot_of: vec![NO_PIVOT; bits], rank: 0, scratch: vec![0; words] }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dimension(&self) -> usize {
        self.pivot_of.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank == self.pivot_of.len()
    }

    /// Reduces `scratch` in place; returns the surviving top bit, if any.
    fn reduce_scratch(&mut self) -> Option<usize> {
        let mut limit = self.words;
        loop {
            let top = highest_bit_below(&self.scratch, limit)?;
            let idx = self.pivot_of[top];
            if idx == NO_PIVOT {
                return Some(top);
            }
            let start = idx as usize * self.words;
            // basis element's top bit is `top`: higher words are untouched
            limit = top / WORD + 1;
            xor_into(&mut self.scratch[..limit], &self.vectors[start..start + limit]);
        }
    }

    /// Adds `v`; returns whether it was independent.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        self.scratch.copy_from_slice(&v[..self.words]);
        match self.reduce_scratch() {
            None => false,
            Some(top) => {
                self.pivot_of[top] = self.rank as u32;
                self.vectors.extend_from_slice(&self.scratch);
                self.rank += 1;
                true
            }
        }
    }

    /// Adds the XOR of two vectors.
    pub fn insert_sum(&mut self, a: &[u64], b: &[u64]) -> bool {
        let sum: Vec<u64> = a.iter().zip(b).map(|(x, y)| x ^ y).collect();
        self.insert(&sum)
    }

    pub fn contains(&mut self, v: &[u64]) -> bool {
        self.scratch.copy_from_slice(&v[..self.words]);
        self.reduce_scratch().is_none()
    }
}

/// Dense row-major matrix over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = words_for(cols);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        get_bit(self.row(r), c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = self.words;
        set_bit(&mut self.data[r * w..(r + 1) * w], c, value);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    /// Rank by Gauss-Jordan elimination on a copy, pivoting column by column.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let w = self.words;
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| get_bit(&m[r * w..(r + 1) * w], c)) else {
                continue;
            };
            if pivot != rank {
                for k in 0..w {
                    m.swap(pivot * w + k, rank * w + k);
                }
            }
            let (head, tail) = m.split_at_mut((rank + 1) * w);
            let pivot_row = &head[rank * w..];
            for r in 0..(self.rows - rank - 1) {
                let row = &mut tail[r * w..(r + 1) * w];
                if get_bit(row, c) {
                    xor_into(row, pivot_row);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}
