//! Wave patterns and a finite-difference solver for the one-dimensional
//! compressible Navier-Stokes-Maxwell system in Lagrangian coordinates.
//!
//! The crate covers the Euler Riemann problem with rarefactions and a
//! contact discontinuity, the smooth Burgers approximation of rarefaction
//! fans, the self-similar viscous contact wave, their superposition, the
//! time-dependent solver, and the energy diagnostics used to check large
//! time behaviour.

pub mod burgers;
pub mod composite_wave;
pub mod contact_wave;
pub mod diagnostics;
pub mod euler_riemann;
pub mod nsm_solver;
pub mod numerics;
pub mod profile;

pub use composite_wave::CompositeWave;
pub use contact_wave::ContactWave;
pub use euler_riemann::{FluidState, GasParams};
pub use nsm_solver::{Grid1D, Solver, SolverConfig, State};
pub use profile::{Background, ProfileSample};
