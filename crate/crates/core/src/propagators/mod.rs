//! Unitaries of the model: the chirp-matched Raman pulse, its Doppler-free
//! limit, free fall in the linear potential, the state-selective kick, the
//! phase-space rotation and a general two-level integrator.

pub mod abc;
pub mod gravity;
pub mod integrator;
pub mod kick;
pub mod pro;
pub mod pulse;
pub mod shift;
pub mod su2;

pub use abc::{abc_point, abc_profile, abc_slopes, AbcPoint, AbcProfile};
pub use gravity::apply_gravity;
pub use integrator::{
    apply_two_level_pulse, integrate_trajectory, integrate_two_level, matched_detuning,
    TrajectoryPoint, TwoLevelPropagator, DEFAULT_RTOL,
};
pub use kick::apply_state_selective_kick;
pub use pro::{apply_pro, PhaseSpace};
pub use pulse::{apply_doppler_pulse, apply_dressed_pulse, apply_ideal_pulse, Mat2};
pub use shift::{shift_momentum, KICK_TOLERANCE};
pub use su2::{
    reconstruct, riccati_residual, su2_coefficients, write_trajectory_csv, SU2Coefficients,
    DEFAULT_SINGULAR_TOL,
};
