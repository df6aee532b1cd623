//! Exact p-adic dynamics on the projective line over the rationals.
//!
//! Norms and logarithms are exact valuations; see [`valuation`]. Maps are
//! pairs of binary forms ([`morphism::FormPair`]); their behaviour near a
//! fixed point is studied through truncated power series ([`local`]).

pub mod cli;
pub mod error;
pub mod heights;
pub mod local;
pub mod morphism;
pub mod newton;
pub mod par;
pub mod poly;
pub mod projective;
pub mod valuation;

pub use error::{Error, Result};
pub use morphism::FormPair;
pub use valuation::{Prime, Valuation};
