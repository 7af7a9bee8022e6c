//! Idempotent elements of `Z_n`, `Z_n[x]` and the matrix ring `M2(Z_n[x])`
//! for squarefree `n`.
//!
//! The crate is layered bottom-up:
//!
//! - [`modarith`]: exact arithmetic modulo `n` (powers, gcd, inverses, CRT)
//!   and factorization of squarefree moduli.
//! - [`znring`]: idempotents of `Z_n`, their closed forms for three primes,
//!   and a brute-force search over `Z_n[x]`.
//! - [`polyring`]: dense polynomials over `Z_n`.
//! - [`quadcong`]: the trace congruence `t^2 = t + 2d (mod n)`.
//! - [`mat2`]: 2x2 matrices over `Z_n[x]` and the matrix file format.
//! - [`classify`]: class templates for idempotent matrices over `Z_pqr[x]`,
//!   generators for each class and an exhaustive oracle over constants.

pub mod classify;
pub mod error;
pub mod mat2;
pub mod modarith;
pub mod polyring;
pub mod quadcong;
pub mod znring;

pub use error::{Error, Result};
pub use mat2::Mat2Poly;
pub use modarith::{Modulus, Residue};
pub use polyring::Poly;

/// Default cap on the number of states a brute-force search may visit.
///
/// Sized so that the cubic constant-matrix oracle accepts every `n <= 500`.
pub const DEFAULT_BUDGET: u64 = 125_000_000;
