//! Phase-space rotation by a harmonic-oscillator evolution.
//!
//! exp(−iθH/ħω) with H = p²/2m + mω²z²/2 factorizes for |θ| < π into a
//! position chirp, a momentum chirp and a second position chirp:
//! exp(−i tan(θ/2) mωz²/2ħ) · exp(−i sin θ p²/(2mωħ)) · exp(−i tan(θ/2) mωz²/2ħ).
//! Angles above π/2 first apply the half turn exp(−iπH/ħω) = −i·parity so the
//! chirps stay moderate.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::numerics::{Direction, FourierPlan};
use crate::params::{HBAR, MASS};
use crate::state::SpinorState;

/// Fraction of each grid end treated as the aliasing guard band.
pub const GUARD_FRACTION: usize = 32;
/// Largest guard-band mass tolerated before reporting aliasing.
pub const GUARD_TOLERANCE: f64 = 1e-10;
/// Largest norm drift tolerated by the rotation.
pub const DRIFT_TOLERANCE: f64 = 1e-8;

/// Momentum/position representation pair on one grid.
#[derive(Debug, Clone)]
pub struct PhaseSpace {
    pub grid: MomentumGrid,
    plan: Arc<FourierPlan>,
}

impl PhaseSpace {
    pub fn new(grid: &MomentumGrid) -> Result<PhaseSpace> {
        Ok(PhaseSpace {
            grid: *grid,
            plan: FourierPlan::shared(grid.n_points)?,
        })
    }

    pub fn to_position(&self, amp: &mut [Complex64]) {
        self.plan.process(amp, Direction::Forward, self.grid.dp);
    }

    pub fn to_momentum(&self, amp: &mut [Complex64]) {
        self.plan.process(amp, Direction::Inverse, self.grid.dz());
    }

    /// Multiplies a momentum amplitude by exp(−i c p²/2).
    pub fn momentum_chirp(&self, amp: &mut [Complex64], c: f64) {
        for (j, v) in amp.iter_mut().enumerate() {
            let p = self.grid.p(j);
            *v *= Complex64::from_polar(1.0, -0.5 * c * p * p);
        }
    }

    /// Multiplies a position amplitude by exp(−i c z²/2).
    pub fn position_chirp(&self, amp: &mut [Complex64], c: f64) {
        for (k, v) in amp.iter_mut().enumerate() {
            let z = self.grid.z(k);
            *v *= Complex64::from_polar(1.0, -0.5 * c * z * z);
        }
    }

    /// Multiplies a momentum amplitude by exp(i p z0/ħ), translating by −z0.
    pub fn translate(&self, amp: &mut [Complex64], z0: f64) {
        if z0 == 0.0 {
            return;
        }
        for (j, v) in amp.iter_mut().enumerate() {
            *v *= Complex64::from_polar(1.0, self.grid.p(j) * z0 / HBAR);
        }
    }

    /// Probability in the outer 1/GUARD_FRACTION of either grid end, with
    /// `spacing` the sample spacing of `amp`.
    pub fn guard_mass(amp: &[Complex64], spacing: f64) -> f64 {
        let band = (amp.len() / GUARD_FRACTION).max(1);
        let head: f64 = amp[..band].iter().map(|c| c.norm_sqr()).sum();
        let tail: f64 = amp[amp.len() - band..].iter().map(|c| c.norm_sqr()).sum();
        (head + tail) * spacing
    }
}

/// D(z0) Ũ_ho(θ) D†(z0) applied to both internal components, D(z0) = e^{−ipz0/ħ}
/// so the rotation is centred on position z0.
pub fn apply_pro(state: &SpinorState, theta: f64, omega: f64, z0: f64) -> Result<SpinorState> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::NonPositiveValue {
            key: "omega_trap".into(),
            value: omega,
        });
    }
    let space = PhaseSpace::new(&state.grid)?;
    let amp_a = rotate(&space, &state.amp_a, theta, omega, z0)?;
    let amp_b = rotate(&space, &state.amp_b, theta, omega, z0)?;
    let out = SpinorState::new(state.grid, amp_a, amp_b)?;
    let drift = (out.norm_sqr() - state.norm_sqr()).abs();
    if drift > DRIFT_TOLERANCE {
        return Err(Error::AliasingDetected { guard_mass: drift });
    }
    Ok(out)
}

fn rotate(space: &PhaseSpace, amp: &[Complex64], theta: f64, omega: f64, z0: f64) -> Result<Vec<Complex64>> {
    let grid = space.grid;
    let mw = MASS * omega / HBAR;
    let mut work = amp.to_vec();
    space.translate(&mut work, z0);
    let mut angle = theta;
    if angle > FRAC_PI_2 {
        let n = work.len();
        let minus_i = Complex64::new(0.0, -1.0);
        work = (0..n).map(|j| minus_i * work[n - 1 - j]).collect();
        angle -= PI;
    }
    let outer = (0.5 * angle).tan() * mw;
    let inner = angle.sin() / mw;
    let check = |v: &[Complex64], spacing: f64| -> Result<()> {
        let guard = PhaseSpace::guard_mass(v, spacing);
        if guard > GUARD_TOLERANCE {
            Err(Error::AliasingDetected { guard_mass: guard })
        } else {
            Ok(())
        }
    };
    space.to_position(&mut work);
    check(&work, grid.dz())?;
    space.position_chirp(&mut work, outer);
    space.to_momentum(&mut work);
    check(&work, grid.dp)?;
    space.momentum_chirp(&mut work, inner);
    space.to_position(&mut work);
    check(&work, grid.dz())?;
    space.position_chirp(&mut work, outer);
    space.to_momentum(&mut work);
    check(&work, grid.dp)?;
    space.translate(&mut work, -z0);
    Ok(work)
}
