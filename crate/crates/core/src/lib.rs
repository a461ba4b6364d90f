//! Weighted generalized inverses of complex matrices over exact Gaussian
//! rationals or double-precision complex numbers.

pub mod axioms;
pub mod bilateral;
pub mod cli;
pub mod classical;
pub mod decomposition;
pub mod error;
mod float_la;
pub mod generate;
pub mod indexmp;
pub mod io;
pub mod matcore;
pub mod wcore;
pub mod wfamily;
pub mod matrix;
pub mod scalar;
pub mod selftest;

pub use error::{Error, Result};
pub use matcore::{make_context, MetricMatrix, Tolerance, WeightedContext};
pub use matrix::Matrix;
pub use num_complex::Complex64;
pub use scalar::{Backend, GaussianRational, Scalar, Q};
