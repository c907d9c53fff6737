use super::shift::shift_momentum;
use crate::error::Result;
use crate::params::K0;
use crate::state::SpinorState;

/// |a⟩⟨a| + |b⟩⟨b| e^{−ik0z}: moves the b component down by ħk0.
pub fn apply_state_selective_kick(state: &SpinorState) -> Result<SpinorState> {
    let amp_b = shift_momentum(&state.amp_b, &state.grid, -K0)?;
    SpinorState::new(state.grid, state.amp_a.clone(), amp_b)
}
