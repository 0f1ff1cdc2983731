//! Weighted composition operators W f = u·(f∘ψ) on the Fock spaces F_p.
//!
//! The crate classifies an operator (boundedness, compactness, power
//! boundedness, norms, spectrum, mean ergodicity) from closed forms and
//! provides the numeric machinery used to check those closed forms:
//! truncated matrices on the monomial basis of F₂, Gaussian-weighted
//! quadrature for the F_p norms, and literal iterate products.

pub mod base;
pub mod classify;
pub mod error;
pub mod fockmat;
pub mod quad;
pub mod series;
pub mod symbolic;

pub use base::{
    eval_symbol, eval_weight, fixed_point, AffineSymbol, Cx, FixedPoint, FockParams, Tolerance, Weight,
    WeightedComposition,
};
pub use error::{Error, Result};
pub use series::TaylorSeries;
