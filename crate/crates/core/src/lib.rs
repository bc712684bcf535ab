//! Stable subspaces of bistochastic positive maps on matrix algebras.
//!
//! The crate works with linear maps `S: Mₙ → Mₙ` represented on the
//! Hilbert–Schmidt space of `n × n` complex matrices. It provides
//!
//! - dense complex linear algebra ([`ComplexMatrix`], a cyclic Jacobi
//!   Hermitian eigensolver, PSD and Schur-complement tests),
//! - superoperator algebra and a refutation-only positivity test battery
//!   ([`SuperOperator`], [`positivity`]),
//! - the isometric-sweeping decomposition `Mₙ = K_S ⊕ K_S^⊥` and the
//!   classification of `K_S` among the unital Jordan subalgebras of `M₃`
//!   ([`stable`]),
//! - Choi–Jamiołkowski entanglement witnesses, PPT tests and detected-state
//!   construction ([`witness`]),
//! - a zoo of canonical maps and seeded random generators ([`zoo`]).
//!
//! Everything is `no_std` with `alloc`; IO and file formats live in the
//! companion `ksweep` crate.
//!
//! ```
//! use ksweep_core::{stable, zoo, DEFAULT_TOL};
//!
//! let s = zoo::two_block_map();
//! let k = stable::compute_stable_subspace(&s, DEFAULT_TOL).unwrap();
//! assert_eq!(k.dim(), 2);
//! ```
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod eig;
mod error;
mod matrix;
pub mod positivity;
mod random;
pub mod stable;
mod superop;
pub mod suites;
pub mod witness;
pub mod zoo;

pub use eig::{hermitian_eig, is_psd, min_eigenvalue, schur_psd_check, HermitianEig};
pub use error::{Error, Result};
pub use matrix::{
    hs_inner, jordan_product, partial_transpose, rank_one, tensor, ComplexMatrix, ComplexVector,
    C64,
};
pub use random::{derive_seed, random_unitary, seeded_rng};
pub use superop::SuperOperator;

/// Default relative tolerance used throughout the crate.
pub const DEFAULT_TOL: f64 = 1e-9;
