//! Bohr radii of weighted Bloch spaces.
//!
//! A function `f = sum a_n z^n` on the unit disc belongs to the weighted Bloch
//! space `B(omega)` when `|a_0| + sup omega(|z|) |f'(z)|` is finite. This crate
//! evaluates the quantities that bound the Bohr radius of these spaces:
//!
//! * [`series`]: truncated power series with certified tails, majorants and circle norms;
//! * [`weights`]: radial weights behind a name registry, and the sharpness criterion at `R = 1/sqrt2`;
//! * [`norms`]: weighted Bloch norms and the Avkhadiev–Kayumov test function;
//! * [`bounds`]: lower and upper Bohr-radius bounds and m-function computations;
//! * [`extremal`]: the Möbius extremals and end-to-end sharpness verification;
//! * [`cli`]: the `bohr` command-line front end.

// Guards like `!(x > 0.0)` are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod decimal;
pub mod error;
pub mod extremal;
pub mod grid;
pub mod norms;
pub mod series;
pub mod solve;
pub mod weights;

pub use error::{Error, Result};
pub use grid::GridSpec;
pub use series::{CircleNorms, TailBound, TruncatedSeries};
pub use solve::SolverConfig;
pub use weights::{Weight, WeightRegistry};
