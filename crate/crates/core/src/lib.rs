//! Exact and high-precision machinery for a family of birational
//! transformations generating an extended affine Weyl group, its action on a
//! q-Riccati flow, and the induced matrix action on vectors of basic
//! hypergeometric and q-Lauricella functions. A verification suite checks
//! every identity either exactly over the rationals (optionally with a
//! perturbation symbol) or numerically with rigorous truncation bounds.
//!
//! Module map:
//! - [`scalar`]: the three scalar backends and q-factorial primitives
//! - [`weyl`]: the dependent-variable array and the fundamental generators
//! - [`specialization`]: the parameter tuple, the locus, derived generators
//!   and the q-Riccati step
//! - [`qhyper`]: series evaluation and the transformation identities
//! - [`matrices`]: generator matrices, the cocycle product, ladder systems
//! - [`suite`]: samplers, the thirteen verification suites, reports

pub mod error;
pub mod matrices;
pub mod qhyper;
pub mod scalar;
pub mod specialization;
pub mod suite;
pub mod weyl;

pub use error::{Error, Result};
pub use scalar::{BigReal, EpsRational, QPochConfig, QRat, Scalar};
pub use specialization::{CParams, SpecialState};
pub use weyl::{GroupWord, ObservableParams, PhiState, QSums, Token};
