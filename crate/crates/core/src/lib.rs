//! Numerics for the archetypal functional equation
//!
//! ```text
//! y(x) = E{ y(alpha * (x - beta)) }
//! ```
//!
//! where `(alpha, beta)` is a random pair with law `mu`. The crate covers
//! classification by the criticality constant `K = E{ln|alpha|}`, the
//! associated Markov chain `X_n = alpha_n (X_{n-1} - beta_n)`, the random
//! series `Upsilon` whose distribution function is the canonical solution,
//! the transition operator on grid functions, characteristic-function
//! identities, and executable checks of the structural theorems.
//!
//! The crate is `no_std` and only needs `alloc`. The `std` feature enables
//! rayon-backed ensembles; results do not depend on it because every Monte
//! Carlo sample draws from its own counter-indexed stream.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod chain;
pub mod ecdf;
mod error;
pub mod fourier;
pub mod measure;
pub mod operator;
pub mod presets;
mod quadrature;
pub mod rng;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use measure::{AssumptionReport, Atom, CriticalityReport, Marginal, MeasureSpec, Regime};
pub use num_complex::Complex64;
