//! Numerical verification toolkit for radial solutions of the linear wave
//! equation and the energy-critical focusing wave equation.
//!
//! The crate simulates radial solutions, measures exterior energy on light
//! cones ("channels of energy"), projects data onto the explicit nonradiative
//! power-law space P(R) in odd dimension, evaluates the even-dimension
//! Fourier-side exterior form built on the Hankel operator, and provides
//! harnesses that check the quantitative identities, bounds and decay rates
//! satisfied by these objects at desk scale.
//!
//! All integrals use the reduced radial measure r^{N-1} dr; the angular
//! constant is omitted everywhere, and every identity checked here is
//! homogeneous in it.

pub mod bessel;
pub mod channels;
pub mod dalembert;
pub mod data;
pub mod dim;
pub mod error;
pub mod fit;
pub mod fourier;
pub mod grid;
pub mod linalg;
pub mod power_flow;
pub mod presets;
pub mod pspace;
pub mod quad;
pub mod soliton;
pub mod solver;
pub mod state;
pub mod verification;

pub use dim::Dim;
pub use error::{Error, Result};
pub use grid::RadialGrid;
pub use soliton::{eval_w, Soliton};
pub use state::StatePair;
