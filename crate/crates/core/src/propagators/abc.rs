use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::MomentumGrid;
use crate::params::{PhysParams, K0, MASS};

/// Coefficients of the chirp-matched pulse at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
}

/// A = cos(Δt/2), B = (B0/Δ) sin(Δt/2), C = (Ω/Δ) sin(Δt/2), Δ = √(B0² + Ω²).
pub fn abc_point(b0: f64, omega: f64, t: f64) -> AbcPoint {
    let delta = b0.hypot(omega);
    let (s, c) = (0.5 * delta * t).sin_cos();
    AbcPoint {
        a: c,
        b: b0 / delta * s,
        c: omega / delta * s,
        delta,
    }
}

/// Momentum derivatives (∂_p A, ∂_p B, ∂_p C) by the chain rule through
/// B0(p) (slope k0/m) and Δ(p).
pub fn abc_slopes(b0: f64, omega: f64, t: f64) -> (f64, f64, f64) {
    let db0 = K0 / MASS;
    let delta = b0.hypot(omega);
    let ddelta = b0 * db0 / delta;
    let (s, c) = (0.5 * delta * t).sin_cos();
    let phase_rate = 0.5 * t * ddelta;
    let da = -s * phase_rate;
    let db = db0 * omega * omega / (delta * delta * delta) * s + b0 / delta * c * phase_rate;
    let dc = -omega * ddelta / (delta * delta) * s + omega / delta * c * phase_rate;
    (da, db, dc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbcProfile {
    pub grid: MomentumGrid,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub delta: Vec<f64>,
    pub t: f64,
}

/// Pulse coefficients on the raw grid momenta (no recoil shift applied).
pub fn abc_profile(params: &PhysParams, grid: &MomentumGrid, t: f64) -> Result<AbcProfile> {
    params.require_matched_chirp()?;
    let n = grid.n_points;
    let mut profile = AbcProfile {
        grid: *grid,
        a: Vec::with_capacity(n),
        b: Vec::with_capacity(n),
        c: Vec::with_capacity(n),
        delta: Vec::with_capacity(n),
        t,
    };
    for j in 0..n {
        let pt = abc_point(params.b0(grid.p(j)), params.omega_rabi, t);
        profile.a.push(pt.a);
        profile.b.push(pt.b);
        profile.c.push(pt.c);
        profile.delta.push(pt.delta);
    }
    Ok(profile)
}
