//! External wavefunctions and two-component spinor states on a momentum grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::numerics::compensated_sum;

/// Tolerance on the unit norm of a state.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalWavefunction {
    pub grid: MomentumGrid,
    pub amp: Vec<Complex64>,
}

impl ExternalWavefunction {
    pub fn new(grid: MomentumGrid, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != grid.n_points {
            return Err(Error::InvalidGrid(format!(
                "{} amplitudes for {} grid points",
                amp.len(),
                grid.n_points
            )));
        }
        Ok(ExternalWavefunction { grid, amp })
    }

    pub fn norm_sqr(&self) -> f64 {
        mass(&self.amp) * self.grid.dp
    }

    /// ⟨self|other⟩ = Σ conj(ψ) φ dp.
    pub fn overlap(&self, other: &ExternalWavefunction) -> Complex64 {
        inner(&self.amp, &other.amp) * self.grid.dp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    pub grid: MomentumGrid,
    pub amp_a: Vec<Complex64>,
    pub amp_b: Vec<Complex64>,
}

impl SpinorState {
    pub fn new(grid: MomentumGrid, amp_a: Vec<Complex64>, amp_b: Vec<Complex64>) -> Result<Self> {
        if amp_a.len() != grid.n_points || amp_b.len() != grid.n_points {
            return Err(Error::InvalidGrid(format!(
                "component lengths {}/{} for {} grid points",
                amp_a.len(),
                amp_b.len(),
                grid.n_points
            )));
        }
        Ok(SpinorState { grid, amp_a, amp_b })
    }

    /// |a⟩ ⊗ ψ.
    pub fn in_a(psi: &ExternalWavefunction) -> SpinorState {
        SpinorState {
            grid: psi.grid,
            amp_a: psi.amp.clone(),
            amp_b: vec![Complex64::new(0.0, 0.0); psi.amp.len()],
        }
    }

    /// |b⟩ ⊗ ψ.
    pub fn in_b(psi: &ExternalWavefunction) -> SpinorState {
        SpinorState {
            grid: psi.grid,
            amp_a: vec![Complex64::new(0.0, 0.0); psi.amp.len()],
            amp_b: psi.amp.clone(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        (mass(&self.amp_a) + mass(&self.amp_b)) * self.grid.dp
    }

    pub fn overlap(&self, other: &SpinorState) -> Complex64 {
        (inner(&self.amp_a, &other.amp_a) + inner(&self.amp_b, &other.amp_b)) * self.grid.dp
    }

    pub fn scaled(&self, factor: Complex64) -> SpinorState {
        SpinorState {
            grid: self.grid,
            amp_a: self.amp_a.iter().map(|v| v * factor).collect(),
            amp_b: self.amp_b.iter().map(|v| v * factor).collect(),
        }
    }
}

pub(crate) fn mass(amp: &[Complex64]) -> f64 {
    compensated_sum(amp.iter().map(|c| c.norm_sqr()))
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let re = compensated_sum(a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im));
    let im = compensated_sum(a.iter().zip(b).map(|(x, y)| x.re * y.im - x.im * y.re));
    Complex64::new(re, im)
}
