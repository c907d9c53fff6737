//! Centred unitary DFT between the momentum grid and its conjugate position grid.
//!
//! With samples x_j = (j - c) dx, c = (N-1)/2, and y_k = (k - c)·2π/(N dx):
//! forward: out_k = dx/√(2π) Σ_j in_j e^{+i x_j y_k},
//! inverse: out_k = dx/√(2π) Σ_j in_j e^{-i x_j y_k}.
//! Forward maps ⟨p|ψ⟩ to ⟨z|ψ⟩ and inverse maps back.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

pub struct FourierPlan {
    n: usize,
    kernel_plus: Arc<dyn Fft<f64>>,
    kernel_minus: Arc<dyn Fft<f64>>,
    twiddle: Vec<Complex64>,
    global: Complex64,
}

impl std::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan").field("n", &self.n).finish()
    }
}

impl FourierPlan {
    pub fn new(n: usize) -> Result<FourierPlan> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::NonPowerOfTwo(n));
        }
        let mut planner = FftPlanner::new();
        let kernel_plus = planner.plan_fft_inverse(n);
        let kernel_minus = planner.plan_fft_forward(n);
        // e^{-2πi c j/N} with 2cj = (N-1)j reduced exactly modulo 2N
        let twiddle = (0..n)
            .map(|j| {
                let r = ((n as u128 - 1) * j as u128 % (2 * n as u128)) as f64;
                Complex64::from_polar(1.0, -PI * r / n as f64)
            })
            .collect();
        let r = ((n as u128 - 1) * (n as u128 - 1) % (4 * n as u128)) as f64;
        let global = Complex64::from_polar(1.0, PI * r / (2.0 * n as f64));
        Ok(FourierPlan {
            n,
            kernel_plus,
            kernel_minus,
            twiddle,
            global,
        })
    }

    /// Process-wide cached plan for length `n`.
    pub fn shared(n: usize) -> Result<Arc<FourierPlan>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<FourierPlan>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(plan) = guard.get(&n) {
            return Ok(plan.clone());
        }
        let plan = Arc::new(FourierPlan::new(n)?);
        guard.insert(n, plan.clone());
        Ok(plan)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place transform; `dx` is the spacing of the input samples.
    pub fn process(&self, data: &mut [Complex64], direction: Direction, dx: f64) {
        assert_eq!(data.len(), self.n, "transform length mismatch");
        let scale = dx / (2.0 * PI).sqrt();
        match direction {
            Direction::Forward => {
                for (v, w) in data.iter_mut().zip(&self.twiddle) {
                    *v *= w;
                }
                self.kernel_plus.process(data);
                let g = self.global * scale;
                for (v, w) in data.iter_mut().zip(&self.twiddle) {
                    *v *= w * g;
                }
            }
            Direction::Inverse => {
                for (v, w) in data.iter_mut().zip(&self.twiddle) {
                    *v *= w.conj();
                }
                self.kernel_minus.process(data);
                let g = self.global.conj() * scale;
                for (v, w) in data.iter_mut().zip(&self.twiddle) {
                    *v *= w.conj() * g;
                }
            }
        }
    }
}

/// Out-of-place transform of `amplitudes` sampled with spacing `dx`.
pub fn fourier_pair(amplitudes: &[Complex64], direction: Direction, dx: f64) -> Result<Vec<Complex64>> {
    let plan = FourierPlan::shared(amplitudes.len())?;
    let mut out = amplitudes.to_vec();
    plan.process(&mut out, direction, dx);
    Ok(out)
}

/// Largest conjugate coordinate |k| at which the centred transform of
/// `samples` (spacing `dx`) exceeds `threshold` times its peak intensity.
pub fn spectral_radius(samples: &[Complex64], dx: f64, threshold: f64) -> Result<f64> {
    let n = samples.len();
    let mut spectrum = samples.to_vec();
    FourierPlan::shared(n)?.process(&mut spectrum, Direction::Inverse, dx);
    let peak = spectrum.iter().fold(0.0f64, |m, c| m.max(c.norm_sqr()));
    let dk = 2.0 * PI / (n as f64 * dx);
    let c = 0.5 * (n - 1) as f64;
    Ok(spectrum
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm_sqr() > threshold * peak)
        .map(|(k, _)| ((k as f64 - c) * dk).abs())
        .fold(0.0, f64::max))
}

/// Band-limited resampling of `samples` (spacing `dx`) at spacing dx/factor.
///
/// Output sample j sits at (j - (factor·N - 1)/2)·dx/factor relative to the
/// centre of the input window; exact for signals whose conjugate content fits
/// the input Nyquist band and that vanish at both window ends.
pub fn upsample(samples: &[Complex64], dx: f64, factor: usize) -> Result<Vec<Complex64>> {
    if factor <= 1 {
        return Ok(samples.to_vec());
    }
    let n = samples.len();
    let mut spectrum = samples.to_vec();
    FourierPlan::shared(n)?.process(&mut spectrum, Direction::Inverse, dx);
    let offset = (factor - 1) * n / 2;
    let mut wide = vec![Complex64::new(0.0, 0.0); n * factor];
    wide[offset..offset + n].copy_from_slice(&spectrum);
    let dk = 2.0 * PI / (n as f64 * dx);
    FourierPlan::shared(n * factor)?.process(&mut wide, Direction::Forward, dk);
    Ok(wide)
}
