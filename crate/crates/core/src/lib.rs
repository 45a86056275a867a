//! Exact computations with semilinear clannish algebras over finite fields:
//! presentations, strings and bands, the modules they define, functorial
//! multiplicities and brute-force decomposition.

pub mod error;
pub mod functor;
pub mod oracle;
pub mod scalars;
pub mod presentation;
pub mod skewquad;
pub mod walkmod;
pub mod wordcore;

pub use error::{Error, Result};
