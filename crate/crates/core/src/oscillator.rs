//! Harmonic-oscillator eigenstates in the momentum representation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::params::HBAR;
use crate::state::ExternalWavefunction;

/// Largest tail mass tolerated outside the grid.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Normalized Hermite functions h_0..=h_nmax at x, by the stable recurrence
/// h_{k+1} = √(2/(k+1)) x h_k − √(k/(k+1)) h_{k−1}.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n_max + 2);
    h.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n_max >= 1 {
        h.push(2f64.sqrt() * x * h[0]);
    }
    for k in 1..n_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// ψ_n(p) = h_n(p/σ_p)/√σ_p and its derivative ∂_p ψ_n from the ladder identity
/// h_n' = √(n/2) h_{n−1} − √((n+1)/2) h_{n+1}.
pub fn ho_value_and_slope(n: usize, sigma_p: f64, p: f64) -> (f64, f64) {
    let x = p / sigma_p;
    let h = hermite_functions(n + 1, x);
    let nf = n as f64;
    let lower = if n == 0 { 0.0 } else { (nf / 2.0).sqrt() * h[n - 1] };
    let upper = ((nf + 1.0) / 2.0).sqrt() * h[n + 1];
    let s = sigma_p.sqrt();
    (h[n] / s, (lower - upper) / (s * sigma_p))
}

/// Momentum-space eigenstate ψ_n(p) with ψ_0 ∝ exp(−p²/(2σ_p²)).
pub fn ho_eigenstate(n: usize, sigma_p: f64, grid: &MomentumGrid) -> Result<ExternalWavefunction> {
    if !(sigma_p > 0.0 && sigma_p.is_finite()) {
        return Err(Error::NonPositiveValue {
            key: "sigma_p".into(),
            value: sigma_p,
        });
    }
    let amp: Vec<Complex64> = (0..grid.n_points)
        .map(|j| Complex64::new(ho_value_and_slope(n, sigma_p, grid.p(j)).0, 0.0))
        .collect();
    let state = ExternalWavefunction::new(*grid, amp)?;
    let tail = (1.0 - state.norm_sqr()).abs();
    if tail > TAIL_TOLERANCE {
        return Err(Error::GridTooNarrow { tail_mass: tail });
    }
    Ok(state)
}

/// (Var z, Var p) of the n-th eigenstate: ((n+½)ħ²/σ_p², (n+½)σ_p²).
pub fn analytic_moments(n: usize, sigma_p: f64) -> (f64, f64) {
    let level = n as f64 + 0.5;
    (level * HBAR * HBAR / (sigma_p * sigma_p), level * sigma_p * sigma_p)
}
