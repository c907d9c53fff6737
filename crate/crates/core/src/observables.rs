//! Populations, transition kernels, fidelity, joint distributions and moments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::MomentumGrid;
use crate::numerics::{compensated_sum, CompensatedSum};
use crate::oscillator::ho_eigenstate;
use crate::params::{PhysParams, K0};
use crate::propagators::{abc_point, PhaseSpace};
use crate::state::{mass, SpinorState};

pub fn population_a(state: &SpinorState) -> f64 {
    mass(&state.amp_a) * state.grid.dp
}

pub fn population_b(state: &SpinorState) -> f64 {
    mass(&state.amp_b) * state.grid.dp
}

/// Momentum-resolved transition kernels K_a = A² + B², K_b = C² at p + ħk0/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KProfiles {
    pub grid: MomentumGrid,
    pub k_a: Vec<f64>,
    pub k_b: Vec<f64>,
}

pub fn k_profiles(params: &PhysParams, grid: &MomentumGrid, t: f64) -> Result<KProfiles> {
    params.require_matched_chirp()?;
    let mut k_a = Vec::with_capacity(grid.n_points);
    let mut k_b = Vec::with_capacity(grid.n_points);
    for j in 0..grid.n_points {
        let c = abc_point(params.b0(grid.p(j) + 0.5 * K0), params.omega_rabi, t);
        let kb = c.c * c.c;
        k_a.push(c.a * c.a + c.b * c.b);
        k_b.push(kb);
    }
    Ok(KProfiles { grid: *grid, k_a, k_b })
}

/// |⟨ideal|Doppler⟩|² for |ψ_n, a⟩ after a pulse of duration t:
/// |∫ |ψ_n(p)|² [cos(Ωt/2)(A − iB) + sin(Ωt/2) C](p + ħk0/2) dp|².
pub fn final_state_fidelity(params: &PhysParams, n: usize, t: f64, grid: &MomentumGrid) -> Result<f64> {
    params.require_matched_chirp()?;
    let psi = ho_eigenstate(n, params.sigma_p, grid)?;
    let (s, c) = (0.5 * params.omega_rabi * t).sin_cos();
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (j, amp) in psi.amp.iter().enumerate() {
        let w = amp.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let k = abc_point(params.b0(grid.p(j) + 0.5 * K0), params.omega_rabi, t);
        re.add(w * (c * k.a + s * k.c));
        im.add(-w * c * k.b);
    }
    let overlap = Complex64::new(re.value(), im.value()) * grid.dp;
    Ok(overlap.norm_sqr().min(1.0))
}

/// Pr(s, p) as densities in p; Σ_s Σ_p Pr dp = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub grid: MomentumGrid,
    pub p_a: Vec<f64>,
    pub p_b: Vec<f64>,
}

impl JointDistribution {
    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.p_a.iter().chain(&self.p_b).copied()) * self.grid.dp
    }
}

pub fn joint_distribution(state: &SpinorState) -> JointDistribution {
    JointDistribution {
        grid: state.grid,
        p_a: state.amp_a.iter().map(|c| c.norm_sqr()).collect(),
        p_b: state.amp_b.iter().map(|c| c.norm_sqr()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub weight: f64,
    pub mean_p: f64,
    pub var_p: f64,
    pub mean_z: f64,
    pub var_z: f64,
    /// Symmetrized covariance ⟨zp + pz⟩/2 − ⟨z⟩⟨p⟩.
    pub cov_zp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateMoments {
    pub a: Moments,
    pub b: Moments,
    pub total: Moments,
}

struct Raw {
    w: f64,
    p1: f64,
    p2: f64,
    z1: f64,
    z2: f64,
    zp: f64,
}

fn raw_moments(space: &PhaseSpace, amp: &[Complex64]) -> Raw {
    let grid = space.grid;
    let p = grid.momenta();
    let sum = |f: &dyn Fn(usize) -> f64| compensated_sum((0..amp.len()).map(f));
    let w = sum(&|j| amp[j].norm_sqr()) * grid.dp;
    let p1 = sum(&|j| p[j] * amp[j].norm_sqr()) * grid.dp;
    let p2 = sum(&|j| p[j] * p[j] * amp[j].norm_sqr()) * grid.dp;
    let mut zamp = amp.to_vec();
    space.to_position(&mut zamp);
    let mut pz: Vec<Complex64> = amp.iter().zip(&p).map(|(a, &pj)| a * pj).collect();
    space.to_position(&mut pz);
    let dz = grid.dz();
    let z: Vec<f64> = grid.positions();
    let z1 = sum(&|k| z[k] * zamp[k].norm_sqr()) * dz;
    let z2 = sum(&|k| z[k] * z[k] * zamp[k].norm_sqr()) * dz;
    let zp = sum(&|k| z[k] * (zamp[k].conj() * pz[k]).re) * dz;
    Raw { w, p1, p2, z1, z2, zp }
}

fn finish(r: &Raw) -> Moments {
    if r.w <= 0.0 {
        return Moments {
            weight: 0.0,
            mean_p: 0.0,
            var_p: 0.0,
            mean_z: 0.0,
            var_z: 0.0,
            cov_zp: 0.0,
        };
    }
    let mean_p = r.p1 / r.w;
    let mean_z = r.z1 / r.w;
    Moments {
        weight: r.w,
        mean_p,
        var_p: r.p2 / r.w - mean_p * mean_p,
        mean_z,
        var_z: r.z2 / r.w - mean_z * mean_z,
        cov_zp: r.zp / r.w - mean_z * mean_p,
    }
}

/// Momentum moments by direct sums, position moments through the Fourier
/// conjugate representation, per component and for the whole state.
pub fn grid_moments(state: &SpinorState) -> Result<StateMoments> {
    let space = PhaseSpace::new(&state.grid)?;
    let a = raw_moments(&space, &state.amp_a);
    let b = raw_moments(&space, &state.amp_b);
    let total = Raw {
        w: a.w + b.w,
        p1: a.p1 + b.p1,
        p2: a.p2 + b.p2,
        z1: a.z1 + b.z1,
        z2: a.z2 + b.z2,
        zp: a.zp + b.zp,
    };
    Ok(StateMoments {
        a: finish(&a),
        b: finish(&b),
        total: finish(&total),
    })
}
