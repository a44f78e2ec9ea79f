//! Numerical laboratory for semibounded Wiener-Hopf, Toeplitz and Hankel
//! quadratic forms represented by spectral measures on the real line.
//!
//! The central object is a [`measure::SpectralMeasure`]: an absolutely
//! continuous density from a whitelisted family plus a finite set of atoms,
//! growing at most polynomially. Everything else is derived from it:
//! convolution kernels by oscillatory Fourier synthesis, Toeplitz symbols by
//! the Cayley pushforward to the circle, quadratic forms on test functions,
//! and Hankel analogues on the half-line.

pub mod error;
pub mod forms;
pub mod hankel;
pub mod jet;
pub mod kernel;
pub mod laguerre;
pub mod measure;
pub mod testfn;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub use quad::{Flagged, Status};
