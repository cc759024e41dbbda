//! Sound field estimation around a rigid sphere.
//!
//! This crate holds the numerical core and needs only `alloc`:
//!
//! * [`specfun`]: spherical Bessel/Hankel functions, Legendre polynomials,
//!   spherical harmonics and the rigid-sphere radial propagator.
//! * [`geom`]: coordinates and every point set (microphones, boundary and
//!   collocation points, evaluation grids).
//! * [`field`]: the ground-truth scattering simulator, measurement noise and
//!   normalization.
//! * [`sh`] and [`pw`]: the spherical-harmonic and plane-wave baselines.
//! * [`nn`] and [`train`]: the physics-informed MLP, its analytic input and
//!   parameter derivatives, Adam and the training loop.
//! * [`eval`]: error maps, NMSE, radius sweeps and field slices.
//!
//! Time convention is `e^{+iωt}`; outgoing waves use `h_n^(2)`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod eval;
pub mod field;
pub mod geom;
mod linalg;
pub mod nn;
pub mod pw;
pub mod rng;
pub mod sh;
pub mod specfun;
pub mod train;

use core::fmt;

/// Complex pressure / coefficient type used throughout.
pub use num_complex::Complex64 as Complex;

pub use eval::{FieldEstimator, SliceRow, SweepRow};
pub use field::{Measurements, PointSource, ScatteringScene};
pub use geom::{CartPoint, SphPoint};
pub use nn::{InputDerivatives, MlpArch, MlpParams};
pub use sh::ShCoefficients;
pub use pw::PwModel;
pub use train::{AdamConfig, AdamState, LossReport, LossWeights, TrainConfig};

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain(&'static str),
    /// Lengths or shapes of inputs disagree.
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// A numerical procedure broke down (singular system, non-finite value).
    Numerical(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Shape {
                what,
                expected,
                found,
            } => write!(f, "shape mismatch for {what}: expected {expected}, found {found}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
