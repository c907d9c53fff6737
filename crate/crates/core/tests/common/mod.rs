//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rabi_core::grid::MomentumGrid;
use rabi_core::params::PhysParams;
use rabi_core::state::{ExternalWavefunction, SpinorState};
use rabi_core::{build_grid, ho_eigenstate, GridOptions};

/// Ω = 10, δ0 = −0.5, matched chirp at g = 0.
pub fn params(sigma_p: f64, t: f64) -> PhysParams {
    PhysParams {
        omega_rabi: 10.0,
        delta0: -0.5,
        phi: 0.0,
        g: 0.0,
        chirp_rate: 0.0,
        sigma_p,
        omega_trap: 1.0,
        t,
    }
}

pub fn grid_for(params: &PhysParams, n: usize) -> MomentumGrid {
    build_grid(params, n, &GridOptions::default()).unwrap()
}

/// |a⟩ ⊗ ψ_n on the default grid.
pub fn eigen_in_a(params: &PhysParams, n: usize) -> SpinorState {
    let grid = grid_for(params, n);
    SpinorState::in_a(&ho_eigenstate(n, params.sigma_p, &grid).unwrap())
}

/// Gaussian of momentum width σ centred on (z1, p1), normalized on the grid.
pub fn displaced_gaussian(grid: &MomentumGrid, sigma: f64, p1: f64, z1: f64) -> ExternalWavefunction {
    let amp: Vec<Complex64> = grid
        .momenta()
        .iter()
        .map(|&p| {
            let x = (p - p1) / sigma;
            Complex64::from_polar((-0.5 * x * x).exp(), -p * z1)
        })
        .collect();
    let raw = ExternalWavefunction::new(*grid, amp).unwrap();
    let norm = raw.norm_sqr().sqrt();
    ExternalWavefunction::new(*grid, raw.amp.iter().map(|v| v / norm).collect()).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub use rabi_core::propagators::Mat2;

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = x[r][0] * y[0][c] + x[r][1] * y[1][c];
        }
    }
    out
}

/// exp(−iHt) by scaling and squaring of a Taylor series.
pub fn expm_hermitian(h: &Mat2, t: f64) -> Mat2 {
    let norm = h.iter().flatten().map(|v| v.norm()).sum::<f64>() * t.abs();
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scale = t / 2f64.powi(squarings);
    let mut a = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            a[r][c] = Complex64::new(0.0, -scale) * h[r][c];
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut result = [[one, zero], [zero, one]];
    let mut term = result;
    for k in 1..30 {
        term = mat_mul(&term, &a);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for r in 0..2 {
            for c in 0..2 {
                result[r][c] += term[r][c];
            }
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}
