//! Weight systems, characters, fusion rules and their finite-level
//! realizations for simple Lie algebras.

pub mod algebra;
pub mod characters;
pub mod cli;
pub mod csmodel;
pub mod error;
pub mod fusion;
pub mod identity;
pub mod theta;
pub mod weights;

pub use algebra::{AlgebraSpec, Caps, Rational, Series, SignedDominant, Weight};
pub use error::{Error, Result};
pub use fusion::{DecompMap, Level};
pub use weights::{weight_system, WeightSystem};
