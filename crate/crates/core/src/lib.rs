//! Computable lower bounds on the concurrence of bipartite qudit states and
//! their evolution under one-sided quantum channels.
//!
//! The numerical core is generic over the real scalar (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.

pub mod bounds;
pub mod channels;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod states;

pub use bounds::{component_indices, isotropic_tangle, isotropic_tau, pure_concurrence, tau, ComponentIndex};
pub use error::{Error, Result};
pub use scalar::Real;
pub use states::BipartiteDims;

pub type C64 = num_complex::Complex<f64>;
pub type ComplexMatrix = linalg::Matrix<f64>;
pub type DensityMatrix = states::DensityMatrix<f64>;
pub type PureState = states::PureState<f64>;
pub type QuantumChannel = channels::QuantumChannel<f64>;
pub type Spectrum = linalg::Spectrum<f64>;
pub type SchmidtData = states::SchmidtData<f64>;
pub type ChoiState = channels::ChoiState<f64>;
pub type TauBreakdown = bounds::TauBreakdown<f64>;
pub type BoundReport = dynamics::BoundReport<f64>;
pub type SweepResult = dynamics::SweepResult<f64>;
