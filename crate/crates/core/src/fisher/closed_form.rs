use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::oscillator::analytic_moments;
use crate::params::{PhysParams, HBAR};

/// Doppler-free QFI 4(m²t² Var z + t⁴ Var p/4)/ħ².
pub fn qfi_ideal(params: &PhysParams, n: usize, t: f64) -> f64 {
    let m = params.mass();
    let (var_z, var_p) = analytic_moments(n, params.sigma_p);
    4.0 * (m * m * t * t * var_z + 0.25 * t.powi(4) * var_p) / (HBAR * HBAR)
}

/// Doppler-free CFI of the joint momentum–population readout without rotation.
pub fn cfi_ideal_nopro(params: &PhysParams, n: usize, t: f64) -> f64 {
    let x = t * params.sigma_p * params.sigma_p / (2.0 * params.mass() * HBAR);
    qfi_ideal(params, n, t) / (1.0 + x * x)
}

/// Doppler-free CFI after a phase-space rotation by θ at frequency ω.
pub fn cfi_ideal_pro(params: &PhysParams, n: usize, t: f64, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    let m = params.mass();
    let s2 = params.sigma_p * params.sigma_p;
    let s4 = s2 * s2;
    let w = params.omega_trap;
    let cot = theta.cos() / theta.sin();
    let num = m * params.sigma_p * t * (t * w - 2.0 * cot);
    let den = 2.0 * w * w * (m * m * HBAR * HBAR + s4 * t * t) + 2.0 * s4 * cot * (cot - 2.0 * t * w);
    Ok((2 * n + 1) as f64 * num * num / den)
}

/// Rotation angle at which the Doppler-free CFI reaches the QFI.
pub fn theta_max_ideal(params: &PhysParams, t: f64) -> f64 {
    let m = params.mass();
    let s4 = params.sigma_p.powi(4);
    (s4 * t / (params.omega_trap * (2.0 * m * m * HBAR * HBAR + s4 * t * t))).atan()
}
