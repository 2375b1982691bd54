//! Finite algebra of accessible subgroups.
//!
//! A subsystem `F` of the tree's outputs gives access to a subgroup of the
//! single-qubit Pauli group (modulo phases) acting on the reference. There are
//! exactly five of them, and everything else in this crate is expressed in
//! terms of the two maps defined here: the branching composition table and the
//! action of a one-body Clifford, which permutes `z`, `x`, `y`.

use core::fmt;

/// One of the five subgroups of `{I, Z, X, Y}` modulo phase.
///
/// The discriminants fix the canonical component order `(n, z, x, y, a)`
/// used by every vector and matrix in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[repr(u8)]
pub enum SubgroupLabel {
    /// `{I}`: nothing is accessible.
    N = 0,
    /// `{I, Z}`
    Z = 1,
    /// `{I, X}`
    X = 2,
    /// `{I, Y}`
    Y = 3,
    /// `{I, X, Y, Z}`: a full qubit is accessible.
    A = 4,
}

impl SubgroupLabel {
    pub const ALL: [SubgroupLabel; 5] = [Self::N, Self::Z, Self::X, Self::Y, Self::A];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Self::N),
            1 => Some(Self::Z),
            2 => Some(Self::X),
            3 => Some(Self::Y),
            4 => Some(Self::A),
            _ => None,
        }
    }

    /// Dimension of the subgroup as a vector space over GF(2).
    ///
    /// This is also the mutual information `I(R, F)` in bits.
    pub const fn dim(self) -> u8 {
        match self {
            Self::N => 0,
            Self::Z | Self::X | Self::Y => 1,
            Self::A => 2,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Self::N => "n",
            Self::Z => "z",
            Self::X => "x",
            Self::Y => "y",
            Self::A => "a",
        }
    }

    /// Swap `n <-> a`, the symmetry exchanging `F` with its complement.
    pub const fn z2_swap(self) -> Self {
        match self {
            Self::N => Self::A,
            Self::A => Self::N,
            other => other,
        }
    }

    /// Whether `pauli` belongs to this subgroup.
    pub const fn contains(self, pauli: Pauli) -> bool {
        matches!(
            (self, pauli),
            (_, Pauli::I) | (Self::A, _) | (Self::Z, Pauli::Z) | (Self::X, Pauli::X) | (Self::Y, Pauli::Y)
        )
    }

    /// The smallest subgroup containing all of `elements`.
    ///
    /// Returns `None` if the set is not closed, which never happens for
    /// images of the branching map (the closure property is what makes the
    /// five labels exhaustive).
    pub fn from_elements(elements: &[Pauli]) -> Option<Self> {
        let mut mask = 0u8;
        for p in elements {
            mask |= 1 << p.index();
        }
        // bit 0 = I, 1 = Z, 2 = X, 3 = Y
        match mask {
            0b0001 => Some(Self::N),
            0b0011 => Some(Self::Z),
            0b0101 => Some(Self::X),
            0b1001 => Some(Self::Y),
            0b1111 => Some(Self::A),
            _ => None,
        }
    }
}

impl fmt::Display for SubgroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

use SubgroupLabel::{A, N, X, Y, Z};

/// Branching composition table, rows `s1`, columns `s2`, canonical order.
const BRANCH_TABLE: [[SubgroupLabel; 5]; 5] = [
    [N, Z, N, N, Z],
    [Z, Z, Z, Z, Z],
    [N, Z, X, Y, A],
    [N, Z, Y, X, A],
    [Z, Z, A, A, A],
];

/// Accessible subgroup above a branching node, given those of the two
/// sub-trees below it.
#[inline]
pub const fn branch_compose(s1: SubgroupLabel, s2: SubgroupLabel) -> SubgroupLabel {
    BRANCH_TABLE[s1 as usize][s2 as usize]
}

/// Single-qubit Pauli operator modulo phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    Z = 1,
    X = 2,
    Y = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::Z, Pauli::X, Pauli::Y];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    /// Symplectic `(x, z)` bits.
    pub const fn to_bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::Z => (false, true),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
        }
    }

    pub const fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (false, true) => Pauli::Z,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
        }
    }
}

/// `B^dagger (P1 (x) P2) B` for the copy isometry `B = sum_i |ii><i|`.
///
/// `None` means the product is annihilated (an `X` or `Y` on one leg paired
/// with `I` or `Z` on the other).
pub const fn pauli_pullback(p1: Pauli, p2: Pauli) -> Option<Pauli> {
    use Pauli as P;
    match (p1, p2) {
        (P::I, P::I) | (P::Z, P::Z) => Some(P::I),
        (P::I, P::Z) | (P::Z, P::I) => Some(P::Z),
        (P::X, P::X) | (P::Y, P::Y) => Some(P::X),
        (P::X, P::Y) | (P::Y, P::X) => Some(P::Y),
        _ => None,
    }
}

/// Permutation of the three non-identity Paulis, equivalently of the labels
/// `z, x, y`.
///
/// The six elements are exactly the one-body Clifford unitaries modulo
/// phases. `images[i]` is the image of the `i`-th element of `(Z, X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct S3Perm {
    images: [u8; 3],
}

impl S3Perm {
    pub const IDENTITY: S3Perm = S3Perm { images: [0, 1, 2] };

    /// All six permutations; index 0 is the identity.
    pub const ALL: [S3Perm; 6] = [
        S3Perm { images: [0, 1, 2] },
        S3Perm { images: [0, 2, 1] },
        S3Perm { images: [1, 0, 2] },
        S3Perm { images: [1, 2, 0] },
        S3Perm { images: [2, 0, 1] },
        S3Perm { images: [2, 1, 0] },
    ];

    /// Builds a permutation from the images of `(Z, X, Y)`, each in `0..3`.
    pub fn new(images: [u8; 3]) -> Option<Self> {
        let mut seen = [false; 3];
        for &i in &images {
            if i > 2 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(S3Perm { images })
    }

    pub const fn images(self) -> [u8; 3] {
        self.images
    }

    /// Position of this permutation in [`S3Perm::ALL`].
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&p| p == self).unwrap_or(0)
    }

    /// `self ∘ other`: apply `other` first.
    pub const fn compose(self, other: S3Perm) -> S3Perm {
        let o = other.images;
        let s = self.images;
        S3Perm { images: [s[o[0] as usize], s[o[1] as usize], s[o[2] as usize]] }
    }

    pub const fn inverse(self) -> S3Perm {
        let mut inv = [0u8; 3];
        let s = self.images;
        inv[s[0] as usize] = 0;
        inv[s[1] as usize] = 1;
        inv[s[2] as usize] = 2;
        S3Perm { images: inv }
    }

    /// Action on labels: `n` and `a` are fixed, `z, x, y` permuted.
    pub const fn act(self, s: SubgroupLabel) -> SubgroupLabel {
        match s {
            SubgroupLabel::N | SubgroupLabel::A => s,
            SubgroupLabel::Z => PAULI_LABELS[self.images[0] as usize],
            SubgroupLabel::X => PAULI_LABELS[self.images[1] as usize],
            SubgroupLabel::Y => PAULI_LABELS[self.images[2] as usize],
        }
    }

    /// Action on Paulis; `I` is fixed.
    pub const fn act_pauli(self, p: Pauli) -> Pauli {
        match p {
            Pauli::I => Pauli::I,
            Pauli::Z => PAULIS[self.images[0] as usize],
            Pauli::X => PAULIS[self.images[1] as usize],
            Pauli::Y => PAULIS[self.images[2] as usize],
        }
    }
}

const PAULI_LABELS: [SubgroupLabel; 3] = [SubgroupLabel::Z, SubgroupLabel::X, SubgroupLabel::Y];
const PAULIS: [Pauli; 3] = [Pauli::Z, Pauli::X, Pauli::Y];

/// Free-function form of [`S3Perm::act`].
#[inline]
pub const fn permutation_action(perm: S3Perm, s: SubgroupLabel) -> SubgroupLabel {
    perm.act(s)
}

/// Elements of a label as a small set of Paulis.
pub fn elements(s: SubgroupLabel) -> impl Iterator<Item = Pauli> {
    Pauli::ALL.into_iter().filter(move |&p| s.contains(p))
}
