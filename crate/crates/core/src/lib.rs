//! Momentum-space simulation of a Raman-driven two-level atom falling in a
//! linear potential, with quantum and classical Fisher information about the
//! slope g and the phase-rotation measurement optimization.
//!
//! Units are recoil units throughout: ħ = k0 = E0 = 1 and m = 1/2.

pub mod error;
pub mod fisher;
pub mod grid;
pub mod numerics;
pub mod observables;
pub mod oscillator;
pub mod params;
pub mod propagators;
pub mod state;

pub use error::{Error, Result};
pub use grid::{build_grid, time_resolution, GridOptions, MomentumGrid};
pub use oscillator::{analytic_moments, ho_eigenstate};
pub use params::{build_params, PhysParams};
pub use state::{ExternalWavefunction, SpinorState};
