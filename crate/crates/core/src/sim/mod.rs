//! Radial simulator for the polyharmonic model Δ^{m/2} u = g(u) (even m):
//! jet arithmetic for iterated radial Laplacians, outward integration with
//! blow-up detection, and the counterexample verifier.

pub mod counterexample;
pub mod jet;
pub mod ode;

pub use counterexample::{
    counterexample_profile, default_r_grid, fd_laplacian, verify_counterexample,
    CounterexampleReport,
};
pub use jet::{apply_polyharmonic, jet_eval, Jet, JetError};
pub use ode::{integrate_radial, IntegrationOptions, ProfileStatus, RadialProfile, StepNode};
