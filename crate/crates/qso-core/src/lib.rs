//! Exact algebra and representations of the nonstandard q-deformation
//! `U'_q(so_n)`.

pub mod error;
pub mod freealg;
pub mod linalg;
pub mod qscalar;
pub mod quotients;
pub mod rank_low;
pub mod ring;
pub mod specialize;
pub mod verma;
pub mod weights;

pub use error::{Error, Result};
pub use qscalar::{GaussRat, QScalar, RootBranch, Var};
