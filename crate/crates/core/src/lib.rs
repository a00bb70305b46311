//! Numerical toolkit for the two-term spectral asymptotics of the lowest
//! Neumann eigenvalue of magnetic Schrödinger operators with constant field
//! intensity.
//!
//! The crate computes every constant entering the expansion
//! `λ₁(h) ≈ Θ₀ h + γ̂ h^{4/3}` from first principles: the de Gennes and
//! Montgomery band functions and their minima ([`model1d`]), the Lu-Pan
//! half-space bottom σ(ν) ([`halfspace`]), the tangency curve of a helical
//! field on the unit ball with its frames and curvatures ([`geometry`]), the
//! effective boundary energy and its minimizers ([`asymptotics`]), a trial
//! state that certifies the upper bound ([`quasimode`]) and a matrix-free 3D
//! model-operator eigensolver probing the lower bound ([`model3d`]).

pub mod asymptotics;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod halfspace;
pub mod model1d;
pub mod model3d;
pub mod quasimode;

pub use eigen::EigenResult;
pub use error::{Error, Result};
pub use grid::{Bc, Grid1D, Grid3D};
pub use model1d::SpectralConstants;
