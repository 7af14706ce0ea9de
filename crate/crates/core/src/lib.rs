//! Pseudo-measures and period functions on rational cusps, with the
//! transfer-operator, Hecke, Lévy and Brjuno-function numerics around them.

// NaN inputs must fail range checks, hence the `!(x > 0.0)` idiom.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod brjuno;
pub mod classical;
pub mod error;
pub mod hecke;
pub mod hurwitz;
pub mod levy;
pub mod measure;
pub mod period;
pub mod quadrature;
pub mod rational;
pub mod transfer;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use classical::FourierCuspForm;
pub use measure::PseudoMeasure;
pub use period::{PeriodLikeFunction, Provenance};
pub use rational::{Cusp, IntegerMatrix2, PrimitiveChain};
pub use transfer::EigenDatum;
