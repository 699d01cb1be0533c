//! Coefficient generators, combinatorial identity checks, and desk-scale
//! sieve experiments for self-dual automorphic L-functions over the
//! rationals.
//!
//! The crate is organized around four layers:
//!
//! * local data: symmetric functions of Satake parameters (`symfunc`) and
//!   the concrete exemplar representations built on the Ramanujan τ table
//!   (`localcoeffs`);
//! * global tables: multiplicative extension and Dirichlet-series
//!   arithmetic (`dirichlet`), Dirichlet characters (`characters`);
//! * identities and inequalities: the generalized Vaughan decomposition
//!   (`vaughan`) and the executable inequality suite (`inequalities`);
//! * experiments: progression sums and discrepancy curves (`sieve`),
//!   numerical L-values through the approximate functional equation
//!   (`lfunc`), and the shifted divisor sums (`titchmarsh`).

pub mod characters;
pub mod dirichlet;
pub mod error;
pub mod inequalities;
pub mod lfunc;
pub mod localcoeffs;
pub mod sieve;
pub mod symfunc;
pub mod titchmarsh;
pub mod util;
pub mod vaughan;
pub mod verify;

pub use error::{Error, Result};
