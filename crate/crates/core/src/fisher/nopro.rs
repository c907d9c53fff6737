//! CFI of the joint momentum–population readout after the Doppler pulse,
//! without phase-space rotation:
//! F_C = (mt)² Σ_s ∫ K_s P_n (∂_p log(K_s P_n))² dp.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::numerics::{compensated_sum, simpson_integrate};
use crate::oscillator::{ho_eigenstate, ho_value_and_slope};
use crate::params::{PhysParams, K0};
use crate::propagators::{abc_point, abc_slopes};

/// Relative probability floor below which CFI bins are dropped.
pub const PROBABILITY_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfiResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Probability mass in bins dropped by the floor.
    pub dropped_mass: f64,
    /// Oversampling of the readout distribution; 1 for direct quadrature.
    pub oversampling: usize,
}

pub fn cfi_doppler_nopro(params: &PhysParams, n: usize, t: f64, grid: &MomentumGrid) -> Result<CfiResult> {
    params.require_matched_chirp()?;
    ho_eigenstate(n, params.sigma_p, grid)?;
    let m = params.mass();
    let np = grid.n_points;
    let mut prob = [Vec::with_capacity(np), Vec::with_capacity(np)];
    let mut info = [Vec::with_capacity(np), Vec::with_capacity(np)];
    for j in 0..np {
        let p = grid.p(j);
        let (psi, dpsi) = ho_value_and_slope(n, params.sigma_p, p);
        let b0 = params.b0(p + 0.5 * K0);
        let c = abc_point(b0, params.omega_rabi, t);
        let (da, db, dc) = abc_slopes(b0, params.omega_rabi, t);
        let ka = c.a * c.a + c.b * c.b;
        let dka = 2.0 * (c.a * da + c.b * db);
        prob[0].push(ka * psi * psi);
        // (∂(K_a ψ²))²/(K_a ψ²) = (K_a' ψ + 2 K_a ψ')²/K_a, finite at nodes of ψ
        info[0].push(if ka > 0.0 {
            let u = dka * psi + 2.0 * ka * dpsi;
            u * u / ka
        } else {
            0.0
        });
        prob[1].push(c.c * c.c * psi * psi);
        // (∂(C²ψ²))²/(C²ψ²) = 4(C'ψ + Cψ')²
        let v = dc * psi + c.c * dpsi;
        info[1].push(4.0 * v * v);
    }
    let peak = prob[0].iter().chain(prob[1].iter()).fold(0.0f64, |a, &b| a.max(b));
    let floor = PROBABILITY_FLOOR * peak;
    let mut dropped = Vec::with_capacity(2 * np);
    let mut value = 0.0;
    let mut error = 0.0;
    for s in 0..2 {
        let integrand: Vec<f64> = prob[s]
            .iter()
            .zip(&info[s])
            .map(|(&pr, &inf)| {
                if pr < floor {
                    dropped.push(pr);
                    0.0
                } else {
                    inf
                }
            })
            .collect();
        let r = simpson_integrate(&integrand, grid.dp)?;
        value += r.value;
        error += r.error_estimate;
    }
    let dropped_mass = compensated_sum(dropped) * grid.dp;
    let total = compensated_sum(prob[0].iter().chain(prob[1].iter()).copied()) * grid.dp;
    let retained = total - dropped_mass;
    if retained < 1.0 - 1e-6 {
        return Err(Error::DegenerateDistribution { retained });
    }
    let scale = (m * t) * (m * t);
    Ok(CfiResult {
        value: scale * value,
        error_estimate: scale * error,
        dropped_mass,
        oversampling: 1,
    })
}
