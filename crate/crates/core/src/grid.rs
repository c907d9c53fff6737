//! Uniform momentum grid and its FFT-conjugate position grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{PhysParams, K0};

pub const DEFAULT_CAP: usize = 1 << 22;
pub const DEFAULT_SAFETY: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub p_min: f64,
    pub p_max: f64,
    pub n_points: usize,
    pub dp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub safety: f64,
    pub cap: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            safety: DEFAULT_SAFETY,
            cap: DEFAULT_CAP,
        }
    }
}

impl MomentumGrid {
    pub fn new(p_min: f64, p_max: f64, n_points: usize) -> Result<MomentumGrid> {
        if !n_points.is_power_of_two() || n_points < 4 {
            return Err(Error::NonPowerOfTwo(n_points));
        }
        if !(p_min.is_finite() && p_max.is_finite() && p_max > p_min) {
            return Err(Error::InvalidGrid(format!(
                "bounds [{p_min}, {p_max}] are not an increasing finite pair"
            )));
        }
        Ok(MomentumGrid {
            p_min,
            p_max,
            n_points,
            dp: (p_max - p_min) / (n_points - 1) as f64,
        })
    }

    /// Smallest power-of-two grid, symmetric about zero, reaching at least
    /// `half_width` with spacing at most `max_dp`. The spacing divides ħk0/2
    /// so recoil kicks are exact index translations.
    pub fn symmetric(half_width: f64, max_dp: f64, cap: usize) -> Result<MomentumGrid> {
        if !(half_width > 0.0 && max_dp > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "half width {half_width} and spacing {max_dp} must be positive"
            )));
        }
        let half_kick = 0.5 * K0;
        let per_half_kick = (half_kick / max_dp).ceil().max(1.0);
        let dp = half_kick / per_half_kick;
        let needed = (2.0 * half_width / dp).ceil() + 1.0;
        if !needed.is_finite() || needed > (cap as f64) {
            return Err(Error::GridOverflow {
                requested: if needed.is_finite() && needed < usize::MAX as f64 {
                    (needed as usize).next_power_of_two()
                } else {
                    usize::MAX
                },
                cap,
            });
        }
        let n = (needed as usize).next_power_of_two().max(4);
        if n > cap {
            return Err(Error::GridOverflow { requested: n, cap });
        }
        let half = 0.5 * (n - 1) as f64 * dp;
        Ok(MomentumGrid {
            p_min: -half,
            p_max: half,
            n_points: n,
            dp,
        })
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.p(j)).collect()
    }

    /// Spacing of the conjugate position grid, 2π/(N dp).
    pub fn dz(&self) -> f64 {
        2.0 * PI / (self.n_points as f64 * self.dp)
    }

    /// Position grid, centred like the momentum grid.
    pub fn z(&self, k: usize) -> f64 {
        (k as f64 - 0.5 * (self.n_points - 1) as f64) * self.dz()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.z(k)).collect()
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.p_max - self.p_min)
    }

    pub fn z_half_width(&self) -> f64 {
        0.5 * (self.n_points - 1) as f64 * self.dz()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.p_min + self.p_max).abs() <= 1e-12 * self.p_max.abs().max(1.0)
    }

    /// Index offset equal to `shift` when `shift` is a whole number of steps.
    pub fn index_shift(&self, shift: f64) -> Option<isize> {
        let steps = shift / self.dp;
        let rounded = steps.round();
        if (steps - rounded).abs() <= 1e-9 * rounded.abs().max(1.0) {
            Some(rounded as isize)
        } else {
            None
        }
    }
}

/// Largest spacing that resolves the pulse coefficients A, B, C after a
/// duration t: their phase Δt/2 turns at most k0 t/(2m) per unit momentum,
/// and this keeps sixteen samples per turn.
pub fn time_resolution(t: f64) -> f64 {
    let rate = K0 * t.abs() / (2.0 * crate::params::MASS);
    if rate > 0.0 {
        PI / (8.0 * rate)
    } else {
        f64::INFINITY
    }
}

/// Grid wide enough for the oscillator states up to `n_max`, the recoil kicks
/// and the gravitational momentum transfer mgt, with dp ≤ σ_p/16 and
/// dp ≤ [`time_resolution`] at the parameter duration t.
pub fn build_grid(params: &PhysParams, n_max: usize, options: &GridOptions) -> Result<MomentumGrid> {
    if options.safety < 6.0 || !options.safety.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "grid safety factor {} must be at least 6",
            options.safety
        )));
    }
    let half = options.safety * (n_max as f64 + 0.5).sqrt() * params.sigma_p
        + 2.0 * K0
        + params.mass() * params.g.abs() * params.t;
    let dp = (params.sigma_p / 16.0).min(time_resolution(params.t));
    MomentumGrid::symmetric(half, dp, options.cap)
}
