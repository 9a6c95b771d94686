//! Simulation and diagnostics for the stochastic gradient Langevin diffusion
//! (SGLDiff): a Langevin diffusion whose drift follows one component
//! `∇Φ_i` at a time, the index being redrawn after exponential waiting times
//! on the time scale `η`.
//!
//! The crate is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`); the aliases at the root fix it to `f64`, with `F32` variants
//! for single precision.
//!
//! * [`potentials`]: gradient families, built-in examples, assumption checkers.
//! * [`processes`]: index process, SGLDiff/Langevin/ULA/SGLD simulators, couplings.
//! * [`analysis`]: Wasserstein estimators, theorem constants and bounds,
//!   Monte Carlo lemma verifiers, rate fitting.

pub mod analysis;
pub mod ensemble;
pub mod error;
pub mod potentials;
pub mod processes;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use rng::{config_digest, substream, Purpose, StreamKey};
pub use scalar::Real;

pub type Family = potentials::PotentialFamily<f64>;
pub type FamilyF32 = potentials::PotentialFamily<f32>;
pub type Path = processes::Trajectory<f64>;
pub type PathF32 = processes::Trajectory<f32>;
pub type CoupledPath = processes::CoupledTrajectory<f64>;
pub type CoupledPathF32 = processes::CoupledTrajectory<f32>;
pub type IndexPath = processes::IndexProcessPath<f64>;
pub type Options = processes::SimOptions<f64>;
pub type Constants = analysis::TheoremConstants<f64>;
pub type ConstantsF32 = analysis::TheoremConstants<f32>;
pub type Estimate = analysis::WassersteinEstimate<f64>;
pub type Density1D = analysis::TargetDensity1D<f64>;
