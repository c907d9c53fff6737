//! Adaptive Dormand–Prince 5(4) integration of the per-momentum 2×2 pulse
//! propagator i ∂τ U = H(p, τ) U with
//! H = B3(p, τ) S3 + (Ω/2) e^{iφ} |a⟩⟨b| + (Ω/2) e^{−iφ} |b⟩⟨a|,
//! B3(p, τ) = −(k0 p/m + k0 g τ + δ(τ)).

use num_complex::Complex64;

use super::pulse::{apply_dressed_pulse, Mat2};
use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::numerics::parallel_map;
use crate::params::{PhysParams, K0, MASS};
use crate::state::SpinorState;

pub const DEFAULT_RTOL: f64 = 1e-10;
const MAX_STEPS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelPropagator {
    pub grid: MomentumGrid,
    pub u: Vec<Mat2>,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub u: Mat2,
}

/// δ(τ) = δ0 − ατ with the configured chirp rate α.
pub fn matched_detuning(params: &PhysParams) -> impl Fn(f64) -> f64 + Sync + Send {
    let delta0 = params.delta0;
    let rate = params.chirp_rate;
    move |tau| delta0 - rate * tau
}

struct Hamiltonian<'a> {
    p: f64,
    g: f64,
    coupling: Complex64,
    detuning: &'a (dyn Fn(f64) -> f64 + Sync),
}

impl Hamiltonian<'_> {
    /// −iH(τ) U, or an error when the detuning is not finite.
    fn rhs(&self, tau: f64, u: &Mat2) -> Result<Mat2> {
        let d = (self.detuning)(tau);
        if !d.is_finite() {
            return Err(Error::NonFiniteDetuning(tau));
        }
        let b3 = -(K0 * self.p / MASS + K0 * self.g * tau + d);
        let h = [
            [Complex64::new(0.5 * b3, 0.0), self.coupling],
            [self.coupling.conj(), Complex64::new(-0.5 * b3, 0.0)],
        ];
        let minus_i = Complex64::new(0.0, -1.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = minus_i * (h[r][0] * u[0][c] + h[r][1] * u[1][c]);
            }
        }
        Ok(out)
    }

    fn scale(&self) -> f64 {
        let b3 = (K0 * self.p / MASS + (self.detuning)(0.0)).abs();
        b3.hypot(2.0 * self.coupling.norm()) + 1.0
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn combine(u: &Mat2, k: &[Mat2; 7], w: &[f64], h: f64, stages: usize) -> Mat2 {
    let mut out = *u;
    for (s, ks) in k.iter().enumerate().take(stages) {
        if w[s] == 0.0 {
            continue;
        }
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] += ks[r][c] * (h * w[s]);
            }
        }
    }
    out
}

fn unitarity_drift(u: &Mat2) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..2 {
        for c in 0..2 {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                s += u[k][r].conj() * u[k][c];
            }
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

/// Nearest SU(2) element [[α, −β*], [β, α*]].
fn project_su2(u: &Mat2) -> Mat2 {
    let alpha = 0.5 * (u[0][0] + u[1][1].conj());
    let beta = 0.5 * (u[1][0] - u[0][1].conj());
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    let (alpha, beta) = (alpha / norm, beta / norm);
    [[alpha, -beta.conj()], [beta, alpha.conj()]]
}

struct Stepper<'a> {
    ham: Hamiltonian<'a>,
    rtol: f64,
    h: f64,
}

impl Stepper<'_> {
    /// Advances `u` from `t0` to `t1` with adaptive steps.
    fn advance(&mut self, u: &mut Mat2, t0: f64, t1: f64) -> Result<()> {
        let mut tau = t0;
        let atol = self.rtol;
        let mut steps = 0usize;
        let mut k = [[[Complex64::new(0.0, 0.0); 2]; 2]; 7];
        k[0] = self.ham.rhs(tau, u)?;
        while tau < t1 {
            steps += 1;
            if steps > MAX_STEPS || self.h < 1e-14 * (t1 - t0).max(1e-300) {
                return Err(Error::ToleranceNotMet {
                    p: self.ham.p,
                    reached: tau,
                });
            }
            let last = tau + self.h >= t1;
            let h = if last { t1 - tau } else { self.h };
            for s in 1..7 {
                let y = combine(u, &k, &A[s], h, s);
                k[s] = self.ham.rhs(tau + C[s] * h, &y)?;
            }
            let y5 = combine(u, &k, &B5, h, 7);
            let mut err = 0.0f64;
            for r in 0..2 {
                for c in 0..2 {
                    let mut e = Complex64::new(0.0, 0.0);
                    for s in 0..7 {
                        e += k[s][r][c] * ((B5[s] - B4[s]) * h);
                    }
                    let scale = atol + self.rtol * u[r][c].norm().max(y5[r][c].norm());
                    err = err.max(e.re.abs() / scale).max(e.im.abs() / scale);
                }
            }
            if err <= 1.0 {
                tau = if last { t1 } else { tau + h };
                *u = y5;
                if unitarity_drift(u) > self.rtol {
                    *u = project_su2(u);
                    k[0] = self.ham.rhs(tau, u)?;
                } else {
                    k[0] = k[6];
                }
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    self.h = h * grow;
                }
            } else {
                let shrink = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                self.h = h * shrink;
            }
        }
        Ok(())
    }
}

fn check_rtol(rtol: f64) -> Result<()> {
    if (1e-12..=1e-6).contains(&rtol) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "integrator tolerance {rtol} outside [1e-12, 1e-6]"
        )))
    }
}

fn identity() -> Mat2 {
    [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ]
}

fn single_point(
    params: &PhysParams,
    detuning: &(dyn Fn(f64) -> f64 + Sync),
    p: f64,
    t: f64,
    rtol: f64,
) -> Result<Mat2> {
    let ham = Hamiltonian {
        p,
        g: params.g,
        coupling: Complex64::from_polar(0.5 * params.omega_rabi, params.phi),
        detuning,
    };
    let h = (0.1 / ham.scale()).min(t.max(1e-300));
    let mut stepper = Stepper { ham, rtol, h };
    let mut u = identity();
    if t > 0.0 {
        stepper.advance(&mut u, 0.0, t)?;
    }
    Ok(u)
}

/// Integrates the pulse propagator at every grid momentum. The tolerance is
/// applied per step; work is spread over `workers` threads with results
/// assembled in grid order.
pub fn integrate_two_level(
    params: &PhysParams,
    detuning: &(dyn Fn(f64) -> f64 + Sync),
    grid: &MomentumGrid,
    t: f64,
    rtol: f64,
    workers: usize,
) -> Result<TwoLevelPropagator> {
    check_rtol(rtol)?;
    let momenta = grid.momenta();
    let u = parallel_map(&momenta, workers, |_, &p| single_point(params, detuning, p, t, rtol))
        .map_err(|e| match e {
            Error::JobFailed { source, .. } => *source,
            other => other,
        })?;
    Ok(TwoLevelPropagator { grid: *grid, u, t })
}

/// Propagator at one momentum sampled at `samples` + 1 uniformly spaced times.
pub fn integrate_trajectory(
    params: &PhysParams,
    detuning: &(dyn Fn(f64) -> f64 + Sync),
    p: f64,
    t: f64,
    rtol: f64,
    samples: usize,
) -> Result<Vec<TrajectoryPoint>> {
    check_rtol(rtol)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("trajectory needs at least one interval".into()));
    }
    let ham = Hamiltonian {
        p,
        g: params.g,
        coupling: Complex64::from_polar(0.5 * params.omega_rabi, params.phi),
        detuning,
    };
    let dt = t / samples as f64;
    let h = (0.1 / ham.scale()).min(dt.max(1e-300));
    let mut stepper = Stepper { ham, rtol, h };
    let mut u = identity();
    let mut out = Vec::with_capacity(samples + 1);
    out.push(TrajectoryPoint { time: 0.0, u });
    for i in 0..samples {
        let t0 = i as f64 * dt;
        let t1 = (i + 1) as f64 * dt;
        stepper.advance(&mut u, t0, t1)?;
        out.push(TrajectoryPoint { time: t1, u });
    }
    Ok(out)
}

/// Pulse of duration t from the integrated propagator, for an arbitrary
/// detuning law (including a chirp that does not match g).
pub fn apply_two_level_pulse(
    state: &SpinorState,
    params: &PhysParams,
    detuning: &(dyn Fn(f64) -> f64 + Sync),
    t: f64,
    rtol: f64,
) -> Result<SpinorState> {
    check_rtol(rtol)?;
    let grid = state.grid;
    let half = 0.5 * K0;
    let mut shifted = Vec::with_capacity(2 * grid.n_points);
    for j in 0..grid.n_points {
        shifted.push(grid.p(j) + half);
        shifted.push(grid.p(j) - half);
    }
    let mats = shifted
        .iter()
        .map(|&q| single_point(params, detuning, q, t, rtol))
        .collect::<Result<Vec<_>>>()?;
    let lookup = |q: f64| -> Mat2 {
        let j = ((q - half - grid.p_min) / grid.dp).round();
        let plus = j >= 0.0 && (j as usize) < grid.n_points && (grid.p(j as usize) + half - q).abs() < 1e-9;
        if plus {
            mats[2 * j as usize]
        } else {
            let j = ((q + half - grid.p_min) / grid.dp).round() as usize;
            mats[2 * j + 1]
        }
    };
    apply_dressed_pulse(state, lookup)
}
