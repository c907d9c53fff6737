use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::abc::abc_point;
use super::shift::shift_momentum;
use crate::error::Result;
use crate::params::{PhysParams, K0};
use crate::state::SpinorState;

/// Matrix [[aa, ab], [ba, bb]] of a pulse acting on internal states (a, b).
pub type Mat2 = [[Complex64; 2]; 2];

/// Applies a momentum-dependent two-level unitary in the lab frame.
///
/// `u(q)` is the pulse matrix in the dressed frame at momentum q; the a
/// component at lab momentum p sits at q = p + ħk0/2 and the b component at
/// q = p − ħk0/2, so the off-diagonal terms carry the ±ħk0 photon recoil.
pub fn apply_dressed_pulse(state: &SpinorState, u: impl Fn(f64) -> Mat2) -> Result<SpinorState> {
    let grid = state.grid;
    let b_down = shift_momentum(&state.amp_b, &grid, -K0)?;
    let a_up = shift_momentum(&state.amp_a, &grid, K0)?;
    let half = 0.5 * K0;
    let mut amp_a = Vec::with_capacity(grid.n_points);
    let mut amp_b = Vec::with_capacity(grid.n_points);
    for j in 0..grid.n_points {
        let p = grid.p(j);
        let ua = u(p + half);
        let ub = u(p - half);
        amp_a.push(ua[0][0] * state.amp_a[j] + ua[0][1] * b_down[j]);
        amp_b.push(ub[1][0] * a_up[j] + ub[1][1] * state.amp_b[j]);
    }
    SpinorState::new(grid, amp_a, amp_b)
}

/// Chirp-matched Raman pulse of duration t including Doppler broadening.
pub fn apply_doppler_pulse(state: &SpinorState, params: &PhysParams, t: f64) -> Result<SpinorState> {
    params.require_matched_chirp()?;
    let forward = Complex64::from_polar(1.0, params.phi - FRAC_PI_2);
    let backward = Complex64::from_polar(1.0, -params.phi - FRAC_PI_2);
    apply_dressed_pulse(state, |q| {
        let c = abc_point(params.b0(q), params.omega_rabi, t);
        [
            [Complex64::new(c.a, c.b), forward * c.c],
            [backward * c.c, Complex64::new(c.a, -c.b)],
        ]
    })
}

/// Doppler-free pulse: a plain Rabi rotation dressed by the recoil kick.
pub fn apply_ideal_pulse(state: &SpinorState, params: &PhysParams, t: f64) -> Result<SpinorState> {
    let (s, c) = (0.5 * params.omega_rabi * t).sin_cos();
    let forward = Complex64::from_polar(s, params.phi - FRAC_PI_2);
    let backward = Complex64::from_polar(s, -params.phi - FRAC_PI_2);
    let cc = Complex64::new(c, 0.0);
    apply_dressed_pulse(state, |_| [[cc, forward], [backward, cc]])
}
