use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::numerics::{Direction, FourierPlan};

/// Largest probability mass a kick may push past the grid edge.
pub const KICK_TOLERANCE: f64 = 1e-11;

/// Translates a momentum amplitude: out(p) = in(p − shift).
///
/// Whole-step shifts are exact array translations; other shifts multiply the
/// position representation by e^{i shift z}.
pub fn shift_momentum(amp: &[Complex64], grid: &MomentumGrid, shift: f64) -> Result<Vec<Complex64>> {
    let n = grid.n_points;
    let lost = lost_mass(amp, grid, shift);
    if lost > KICK_TOLERANCE {
        return Err(Error::KickOffGrid { lost_mass: lost });
    }
    if let Some(s) = grid.index_shift(shift) {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (j, slot) in out.iter_mut().enumerate() {
            let src = j as isize - s;
            if src >= 0 && (src as usize) < n {
                *slot = amp[src as usize];
            }
        }
        return Ok(out);
    }
    let plan = FourierPlan::shared(n)?;
    let mut work = amp.to_vec();
    plan.process(&mut work, Direction::Forward, grid.dp);
    for (k, v) in work.iter_mut().enumerate() {
        *v *= Complex64::from_polar(1.0, shift * grid.z(k));
    }
    plan.process(&mut work, Direction::Inverse, grid.dz());
    Ok(work)
}

fn lost_mass(amp: &[Complex64], grid: &MomentumGrid, shift: f64) -> f64 {
    let lo = grid.p_min - 0.5 * grid.dp;
    let hi = grid.p_max + 0.5 * grid.dp;
    amp.iter()
        .enumerate()
        .filter(|(j, _)| {
            let target = grid.p(*j) + shift;
            target < lo || target > hi
        })
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        * grid.dp
}
