//! Numerical toolkit for order-3 q-hypergeometric equations: local solutions,
//! Birkhoff and twisted connection matrices, density-theorem generators and the
//! difference Galois group classification.
//!
//! Everything is generic over the real scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases at the crate root fix `f64`.

pub mod connection;
pub mod dense;
pub mod error;
pub mod extrapolate;
pub mod galois;
pub mod hypersystem;
pub mod mat3;
pub mod qseries;
pub mod scalar;
pub mod spiral;

pub use connection::{Connection, ConnectionEval, Method};
pub use error::{Error, Result};
pub use extrapolate::{Extrapolated, Ladder};
pub use galois::{classify, Classification, GaloisReport, LieCase};
pub use hypersystem::{HyperParams, LocalData, Side};
pub use mat3::{DunfordPair, Eigen3, Mat2, Mat3};
pub use qseries::{QContext, TruncationReport};
pub use scalar::Real;
pub use spiral::{SpiralPoint, SpiralVerdict};

pub type Complex64 = num_complex::Complex<f64>;
pub type QContext64 = QContext<f64>;
pub type Mat3x64 = Mat3<f64>;
pub type Mat2x64 = Mat2<f64>;
pub type HyperParams64 = HyperParams<f64>;
pub type GaloisReport64 = GaloisReport<f64>;
