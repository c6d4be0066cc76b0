//! Explicit solutions of the matrix coupled dispersionless equations (MCDE)
//!
//! ```text
//! R_x = ((-1)^p / 2)(V V_t + V_t V),    V_tx = (V R + R V) / 2
//! ```
//!
//! built by GBDT dressing of a trivial seed, together with the Darboux
//! matrix, dressed wave functions, large-x asymptotics, the reflection
//! coefficient and a verifier that certifies every output by algebraic
//! identities and finite-difference residuals.
//!
//! The usual flow:
//!
//! 1. pick a [`seed::SeedSolution`] (V = 0, constant diagonal R);
//! 2. build [`gbdt::GbdtParameters`] for one reduction case;
//! 3. bind both into a [`gbdt::TransformedSolution`] and evaluate Ṽ, R̃ pointwise;
//! 4. check the result with [`verify`] and export grids with [`grid`].

pub mod config;
pub mod darboux;
pub mod error;
pub mod gbdt;
pub mod grid;
pub mod matrix;
pub mod oracles;
pub mod presets;
pub mod runner;
pub mod seed;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{c, ComplexMatrix, C64};
