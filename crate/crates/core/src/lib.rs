//! Matrix-product-state simulator and variational-eigensolver engine for
//! single-band Hubbard models on small open-boundary square lattices.
//!
//! The crate is organized bottom-up:
//!
//! - [`lattice`] / [`model`]: lattice geometry, generalized Hubbard models
//!   (hopping `t`, on-site `u`, nearest-neighbor `v`, Gaussian disorder `d`),
//!   and the qubit layout.
//! - [`pauli`] / [`jw`]: Pauli-string Hamiltonians and the Jordan–Wigner map.
//! - [`tensor`] / [`linalg`] / [`mps`] / [`mpo`]: the tensor-network engine.
//!   States carry exact particle-number labels on every bond, so all
//!   factorizations run block-per-charge.
//! - [`dense`]: a dense statevector backend. It doubles as the execution
//!   engine for UCC-factor circuits and as an independent oracle for the MPS
//!   path in tests.
//! - [`gates`] / [`circuit`]: gate matrices (RZ, NP, EP, FSWAP, UCC factors)
//!   and ansatz builders with explicit fermionic-SWAP routing.
//! - [`ed`] / [`dmrg`]: reference solvers (sector-restricted Lanczos ED and
//!   two-site DMRG).
//! - [`lbfgs`] / [`vqe`]: L-BFGS with strong-Wolfe line search and the full
//!   restart/warm-start optimization protocol.
//! - [`checkpoint`]: versioned binary MPS checkpoints and a reference cache.
//!
//! All randomness flows through seeded ChaCha12 generators with documented
//! draw orders, so every result in the crate is bit-reproducible.

pub mod checkpoint;
pub mod circuit;
pub mod dense;
pub mod dmrg;
pub mod ed;
pub mod error;
pub mod gates;
pub mod jw;
pub mod lattice;
pub mod lbfgs;
pub mod linalg;
pub mod model;
pub mod mpo;
pub mod mps;
pub mod pauli;
pub mod rng;
pub mod tensor;
pub mod vqe;

pub use error::{Error, Result};

/// Complex scalar used throughout: 64-bit floats are mandatory for every
/// tolerance quoted in this crate.
pub type C64 = num_complex::Complex64;
