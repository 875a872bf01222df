//! Exact q-series computation: truncated Puiseux series over the rationals,
//! q-Pochhammer products and theta functions, Nahm sums, generalized
//! eta-products with Robins' modularity test, and a catalog of identities
//! that can be verified coefficient by coefficient.
//!
//! Everything is exact. Coefficients are arbitrary-precision rationals and
//! exponents are rationals on a lattice `(1/D)Z`.

pub mod catalog;
pub mod cli;
mod error;
pub mod modularity;
pub mod nahm;
pub mod products;
pub mod rat;
pub mod search;
pub mod series;

pub use error::{Error, Result};
pub use rat::Rational;
pub use series::{Monomial, PSeries};
