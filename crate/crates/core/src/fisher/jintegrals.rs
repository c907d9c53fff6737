//! Doppler correction to the QFI through the momentum integrals
//! J1 = ∫P (B ∂A − A ∂B), J2 = ∫P ((∂A)² + (∂B)² + (∂C)²), J3 = ∫P p (B ∂A − A ∂B),
//! with P = |⟨p|ψ_n⟩|² and A, B, C evaluated at p + ħk0/2.

use serde::{Deserialize, Serialize};

use super::closed_form::qfi_ideal;
use crate::error::Result;
use crate::grid::MomentumGrid;
use crate::numerics::simpson_integrate;
use crate::oscillator::ho_eigenstate;
use crate::params::{PhysParams, HBAR, K0, MASS};
use crate::propagators::{abc_point, abc_slopes};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JIntegrals {
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    /// Largest quadrature error estimate of the three.
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiDoppler {
    pub ideal: f64,
    pub delta: f64,
    pub total: f64,
    pub j: JIntegrals,
}

/// Reusable weights for repeated J-integral evaluations on one grid.
#[derive(Debug, Clone)]
pub struct JIntegrator {
    grid: MomentumGrid,
    n: usize,
    weights: Vec<f64>,
}

impl JIntegrator {
    pub fn new(n: usize, sigma_p: f64, grid: &MomentumGrid) -> Result<JIntegrator> {
        let psi = ho_eigenstate(n, sigma_p, grid)?;
        Ok(JIntegrator {
            grid: *grid,
            n,
            weights: psi.amp.iter().map(|c| c.norm_sqr()).collect(),
        })
    }

    pub fn integrals(&self, params: &PhysParams, t: f64) -> Result<JIntegrals> {
        params.require_matched_chirp()?;
        let n = self.grid.n_points;
        let mut f1 = Vec::with_capacity(n);
        let mut f2 = Vec::with_capacity(n);
        let mut f3 = Vec::with_capacity(n);
        for (j, &w) in self.weights.iter().enumerate() {
            let p = self.grid.p(j);
            if w == 0.0 {
                f1.push(0.0);
                f2.push(0.0);
                f3.push(0.0);
                continue;
            }
            let b0 = params.b0(p + 0.5 * K0);
            let c = abc_point(b0, params.omega_rabi, t);
            let (da, db, dc) = abc_slopes(b0, params.omega_rabi, t);
            let cross = c.b * da - c.a * db;
            f1.push(w * cross);
            f2.push(w * (da * da + db * db + dc * dc));
            f3.push(w * p * cross);
        }
        let dp = self.grid.dp;
        let r1 = simpson_integrate(&f1, dp)?;
        let r2 = simpson_integrate(&f2, dp)?;
        let r3 = simpson_integrate(&f3, dp)?;
        Ok(JIntegrals {
            j1: r1.value,
            j2: r2.value,
            j3: r3.value,
            error_estimate: r1.error_estimate.max(r2.error_estimate).max(r3.error_estimate),
        })
    }

    pub fn qfi(&self, params: &PhysParams, t: f64) -> Result<QfiDoppler> {
        let j = self.integrals(params, t)?;
        let m = MASS;
        let delta = 4.0 * m * m * t * t * (j.j2 - j.j1 * j.j1) + 4.0 * m * t.powi(3) * j.j3 / HBAR;
        let ideal = qfi_ideal(params, self.n, t);
        Ok(QfiDoppler {
            ideal,
            delta,
            total: ideal + delta,
            j,
        })
    }
}

pub fn j_integrals(params: &PhysParams, n: usize, t: f64, grid: &MomentumGrid) -> Result<JIntegrals> {
    JIntegrator::new(n, params.sigma_p, grid)?.integrals(params, t)
}

/// F_Q^Doppler = F_Q^Ideal + 4m²t²(J2 − J1²) + 4mt³J3/ħ.
pub fn qfi_doppler(params: &PhysParams, n: usize, t: f64, grid: &MomentumGrid) -> Result<QfiDoppler> {
    JIntegrator::new(n, params.sigma_p, grid)?.qfi(params, t)
}

/// Detuning that zeroes B0(p_c + ħk0/2) at the grid-measured centre p_c of
/// the n-th oscillator state. For the centred states used here this is
/// δ0 = −k0(p_c + ħk0/2)/m = −E0/ħ·2(p_c/ħk0 + 1/2).
pub fn resonant_delta0(n: usize, sigma_p: f64, grid: &MomentumGrid) -> Result<f64> {
    let psi = ho_eigenstate(n, sigma_p, grid)?;
    let weights: Vec<f64> = psi.amp.iter().map(|c| c.norm_sqr()).collect();
    let first: Vec<f64> = weights.iter().enumerate().map(|(j, w)| w * grid.p(j)).collect();
    let norm = simpson_integrate(&weights, grid.dp)?.value;
    let center = simpson_integrate(&first, grid.dp)?.value / norm;
    Ok(-K0 * (center + 0.5 * K0) / MASS)
}
