//! Quantum Darwinism-encoding transitions on expanding trees.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod algebra;
pub mod dist;
pub mod eavesdrop;
pub mod error;
pub mod gf2;
pub mod joint;
pub mod oracle;
pub mod recursion;
pub mod replica;
pub mod tableau;
mod spectral;

pub use algebra::{branch_compose, pauli_pullback, permutation_action, Pauli, S3Perm, SubgroupLabel};
pub use dist::Dist5;
pub use error::{Error, Result};
