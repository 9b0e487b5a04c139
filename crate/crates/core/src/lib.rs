//! Numerical toolkit for radial and conical Fourier multipliers.
//!
//! The crate is organised bottom-up:
//!
//! * [`lorentz`]: decreasing rearrangements and Lorentz `L^{p,ν}` quasi-norms
//!   over weighted discrete measures.
//! * [`special`] and [`quadrature`]: Bessel functions of integer and
//!   half-integer order, Gauss–Legendre panels.
//! * [`radial_fourier`]: one-dimensional FFT transforms, Hankel-type radial
//!   transforms in `R^d` and transforms of sphere measures.
//! * [`grid`] and [`multiplier`]: periodic grid fields and the cone/radial
//!   multiplier operators acting on them; [`field_io`] stores fields on disk.
//! * [`characterization`], [`bochner_riesz`], [`wave`], [`opnorm`]: the
//!   experiments built on top.
//!
//! All transforms use `F f(ξ) = ∫ f(y) e^{-i⟨y,ξ⟩} dy`.

pub mod bochner_riesz;
pub mod bumps;
pub mod characterization;
pub mod error;
pub mod field_io;
pub mod grid;
pub mod lorentz;
pub mod multiplier;
pub mod opnorm;
pub mod profile;
pub mod quadrature;
pub mod radial_fourier;
pub mod special;
pub mod wave;

pub use error::{Error, Result};
pub use num_complex::Complex64;
