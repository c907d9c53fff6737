use num_complex::Complex64;

use super::shift::shift_momentum;
use crate::error::Result;
use crate::params::{PhysParams, K0};
use crate::state::SpinorState;

/// Exact propagator of p²/2m − mgz for time t, applied per internal state
/// with the kinetic argument offset by +ħk0/2 (a) and −ħk0/2 (b).
///
/// ψ(p, t) = ψ(p − mgt, 0) · exp(−iΦ(p)), Φ = [q²t + q mg t² + m²g²t³/3]/(2mħ),
/// q = p − mgt + offset: the momentum shift, then quadratic, linear and cubic
/// phases.
pub fn apply_gravity(state: &SpinorState, params: &PhysParams, t: f64, g: f64) -> Result<SpinorState> {
    let grid = state.grid;
    let m = params.mass();
    let kick = m * g * t;
    let evolve = |amp: &[Complex64], offset: f64| -> Result<Vec<Complex64>> {
        let mut out = shift_momentum(amp, &grid, kick)?;
        let cubic = m * m * g * g * t * t * t / 3.0;
        for (j, v) in out.iter_mut().enumerate() {
            let q = grid.p(j) - kick + offset;
            let phase = (q * q * t + q * m * g * t * t + cubic) / (2.0 * m);
            *v *= Complex64::from_polar(1.0, -phase);
        }
        Ok(out)
    };
    let amp_a = evolve(&state.amp_a, 0.5 * K0)?;
    let amp_b = evolve(&state.amp_b, -0.5 * K0)?;
    SpinorState::new(grid, amp_a, amp_b)
}
