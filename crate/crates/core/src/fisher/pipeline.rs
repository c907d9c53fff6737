//! Explicit measurement pipeline and its Fisher information about g.
//!
//! |ψ_n, a⟩ → pulse (ideal or Doppler, duration t) → free fall Ũ_g(t, g)
//! → state-selective kick → optional phase-space rotation → joint readout of
//! the internal state and one phase-space quadrature. g enters through the
//! free fall only (the chirp follows g), unless [`GMode::FixedChirp`] is set.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::closed_form::qfi_ideal;
use super::nopro::{CfiResult, PROBABILITY_FLOOR};
use crate::error::{Error, Result};
use crate::grid::MomentumGrid;
use crate::numerics::{compensated_sum, spectral_radius, upsample, CompensatedSum, RichardsonTable};
use crate::oscillator::ho_eigenstate;
use crate::params::{PhysParams, HBAR, K0};
use crate::propagators::pro::{GUARD_TOLERANCE, PhaseSpace};
use crate::propagators::{
    apply_doppler_pulse, apply_gravity, apply_ideal_pulse, apply_pro, apply_state_selective_kick,
    apply_two_level_pulse, matched_detuning, DEFAULT_RTOL,
};
use crate::state::SpinorState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    Ideal,
    Doppler,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Ideal => "Ideal",
            Scenario::Doppler => "Doppler",
        }
    }
}

/// How the final quadrature is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Readout {
    /// Literal rotation (three chirps and transforms) followed by momentum readout.
    Rotation,
    /// The same quadrature cos θ p − mω sin θ (z − z0) measured through a
    /// single shear, up to a g-independent rescaling of the outcome.
    Quadrature,
}

/// How g is varied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GMode {
    /// The chirp follows k0·g, so the pulse is g-independent.
    CoVaried,
    /// The chirp stays at the configured rate; the pulse is integrated per g.
    FixedChirp,
}

/// Finite-difference controls for derivatives in g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    /// First step in units of 1/√F_Q^Ideal.
    pub h0_scale: f64,
    /// Number of step sizes h0, h0/2, … kept in the stencil.
    pub levels: usize,
    /// Relative agreement required between successive extrapolations.
    pub rtol: f64,
    /// Relative probability floor for dropped bins.
    pub floor: f64,
    pub g_mode: GMode,
    /// Largest oversampled readout length.
    pub max_points: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            h0_scale: 0.5,
            levels: 5,
            rtol: 1e-4,
            floor: PROBABILITY_FLOOR,
            g_mode: GMode::CoVaried,
            max_points: crate::grid::DEFAULT_CAP,
        }
    }
}

/// Phase-space extent of the pipeline state before readout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineExtent {
    /// Momentum half-extent of the state.
    pub p_ext: f64,
    /// Position half-extent about the drift centre z0.
    pub z_ext: f64,
    /// Drift centre ħk0 t/(2m).
    pub z0: f64,
}

impl PipelineExtent {
    pub fn new(params: &PhysParams, n: usize, t: f64) -> PipelineExtent {
        let m = params.mass();
        let reach = (2.0 * n as f64 + 1.0).sqrt() + 7.0;
        let p_ext = reach * params.sigma_p + K0 + m * params.g.abs() * t;
        let z_ext = reach * HBAR / params.sigma_p + p_ext * t / m + 2.0 * K0 * t / m;
        PipelineExtent {
            p_ext,
            z_ext,
            z0: HBAR * K0 * t / (2.0 * m),
        }
    }

    /// Shear κ = mω tan θ up to which the momentum chart is used.
    pub fn chart_split(&self) -> f64 {
        self.p_ext / self.z_ext
    }
}

/// Momentum grid wide enough for every stage of the pipeline and readout.
pub fn pipeline_grid(params: &PhysParams, n: usize, t: f64, readout: Option<Readout>, cap: usize) -> Result<MomentumGrid> {
    let ext = PipelineExtent::new(params, n, t);
    let spec_half = 8.0 * (n as f64 + 0.5).sqrt() * params.sigma_p + 2.0 * K0;
    let (p_half, z_half) = match readout {
        None => (ext.p_ext, ext.z_ext + ext.z0),
        Some(Readout::Quadrature) => (2.0 * ext.p_ext, 2.0 * ext.z_ext + ext.z0),
        Some(Readout::Rotation) => {
            let mw = params.mass() * params.omega_trap / HBAR;
            let p1 = ext.p_ext + mw * ext.z_ext;
            let z2 = ext.z_ext + p1 / mw;
            let p3 = p1 + mw * z2;
            (p3, z2 + ext.z0)
        }
    };
    let p_half = (1.15 * p_half).max(spec_half);
    let z_half = 1.15 * z_half;
    let max_dp = (params.sigma_p / 16.0).min(PI / z_half);
    MomentumGrid::symmetric(p_half, max_dp, cap)
}

/// The pipeline for one (params, n, t, scenario) on one grid.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub params: PhysParams,
    pub n: usize,
    pub t: f64,
    pub scenario: Scenario,
    pub grid: MomentumGrid,
    pub extent: PipelineExtent,
    pub g_mode: GMode,
    initial: SpinorState,
    after_pulse: SpinorState,
}

impl Pipeline {
    pub fn new(
        params: &PhysParams,
        n: usize,
        t: f64,
        scenario: Scenario,
        grid: &MomentumGrid,
        g_mode: GMode,
    ) -> Result<Pipeline> {
        let psi = ho_eigenstate(n, params.sigma_p, grid)?;
        let initial = SpinorState::in_a(&psi);
        let after_pulse = match scenario {
            Scenario::Ideal => apply_ideal_pulse(&initial, params, t)?,
            Scenario::Doppler => match g_mode {
                GMode::CoVaried => apply_doppler_pulse(&initial, params, t)?,
                GMode::FixedChirp => initial.clone(),
            },
        };
        Ok(Pipeline {
            params: *params,
            n,
            t,
            scenario,
            grid: *grid,
            extent: PipelineExtent::new(params, n, t),
            g_mode,
            initial,
            after_pulse,
        })
    }

    /// State after free fall with slope g and the state-selective kick.
    pub fn state_at(&self, g: f64) -> Result<SpinorState> {
        let pulsed = match (self.scenario, self.g_mode) {
            (Scenario::Doppler, GMode::FixedChirp) => {
                let p = PhysParams { g, ..self.params };
                let detuning = matched_detuning(&self.params);
                apply_two_level_pulse(&self.initial, &p, &detuning, self.t, DEFAULT_RTOL)?
            }
            _ => self.after_pulse.clone(),
        };
        let fallen = apply_gravity(&pulsed, &self.params, self.t, g)?;
        apply_state_selective_kick(&fallen)
    }

    /// Final state including the rotation by θ when given.
    pub fn final_state(&self, g: f64, theta: Option<f64>) -> Result<SpinorState> {
        let state = self.state_at(g)?;
        match theta {
            Some(th) => apply_pro(&state, th, self.params.omega_trap, self.extent.z0),
            None => Ok(state),
        }
    }
}

impl PhysParams {
    /// Copy with the chirp set to the matched value k0·g.
    pub fn matched(&self) -> PhysParams {
        PhysParams {
            chirp_rate: K0 * self.g,
            ..*self
        }
    }
}

#[derive(Debug)]
struct StencilState {
    momentum: SpinorState,
    position: SpinorState,
}

/// Cached g-stencil of pipeline states; evaluates the CFI for any readout.
#[derive(Debug)]
pub struct CfiEvaluator {
    pub pipeline: Pipeline,
    pub policy: StepPolicy,
    pub steps: Vec<f64>,
    space: PhaseSpace,
    center: StencilState,
    pairs: Vec<(StencilState, StencilState)>,
    scale: f64,
}

fn to_position(space: &PhaseSpace, state: &SpinorState) -> SpinorState {
    let mut a = state.amp_a.clone();
    let mut b = state.amp_b.clone();
    space.to_position(&mut a);
    space.to_position(&mut b);
    SpinorState {
        grid: state.grid,
        amp_a: a,
        amp_b: b,
    }
}

impl CfiEvaluator {
    pub fn new(pipeline: Pipeline, policy: StepPolicy) -> Result<CfiEvaluator> {
        if policy.levels < 2 {
            return Err(Error::InvalidArgument("step policy needs at least two levels".into()));
        }
        let space = PhaseSpace::new(&pipeline.grid)?;
        let scale = qfi_ideal(&pipeline.params, pipeline.n, pipeline.t);
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument("Fisher information scale is zero (t = 0?)".into()));
        }
        let g0 = pipeline.params.g;
        let h0 = policy.h0_scale / scale.sqrt();
        let steps: Vec<f64> = (0..policy.levels).map(|k| h0 / (1u64 << k) as f64).collect();
        let make = |g: f64| -> Result<StencilState> {
            let momentum = pipeline.state_at(g)?;
            let position = to_position(&space, &momentum);
            Ok(StencilState { momentum, position })
        };
        let center = make(g0)?;
        let mut pairs = Vec::with_capacity(steps.len());
        for &h in &steps {
            pairs.push((make(g0 + h)?, make(g0 - h)?));
        }
        Ok(CfiEvaluator {
            pipeline,
            policy,
            steps,
            space,
            center,
            pairs,
            scale,
        })
    }

    pub fn qfi_ideal_scale(&self) -> f64 {
        self.scale
    }

    /// Readout amplitudes (a, b) of one stencil state and their sample spacing.
    fn readout_amplitudes(&self, st: &StencilState, readout: Readout, theta: Option<f64>) -> Result<Amplitudes> {
        let grid = self.pipeline.grid;
        let Some(theta) = theta else {
            return Ok(([st.momentum.amp_a.clone(), st.momentum.amp_b.clone()], grid.dp));
        };
        if !(theta > 0.0 && theta < PI) {
            return Err(Error::ThetaOutOfRange(theta));
        }
        match readout {
            Readout::Rotation => {
                let out = apply_pro(&st.momentum, theta, self.pipeline.params.omega_trap, self.pipeline.extent.z0)?;
                Ok(([out.amp_a, out.amp_b], grid.dp))
            }
            Readout::Quadrature => {
                let mw = self.pipeline.params.mass() * self.pipeline.params.omega_trap / HBAR;
                let z0 = self.pipeline.extent.z0;
                let kappa = mw * theta.tan();
                if kappa.abs() <= self.pipeline.extent.chart_split() {
                    // measure p − κ(z − z0): position shear, then momentum readout
                    let chirp: Vec<Complex64> = grid
                        .positions()
                        .iter()
                        .map(|&z| Complex64::from_polar(1.0, -0.5 * kappa * (z - z0) * (z - z0)))
                        .collect();
                    let shear = |amp: &[Complex64]| -> Result<Vec<Complex64>> {
                        let mut w: Vec<Complex64> = amp.iter().zip(&chirp).map(|(a, c)| a * c).collect();
                        self.space.to_momentum(&mut w);
                        guard(&w, grid.dp)?;
                        Ok(w)
                    };
                    Ok(([shear(&st.position.amp_a)?, shear(&st.position.amp_b)?], grid.dp))
                } else {
                    // measure (z − z0) − b p: momentum shear, then position readout
                    let bcoef = theta.cos() / (theta.sin() * mw);
                    let chirp: Vec<Complex64> = grid
                        .momenta()
                        .iter()
                        .map(|&p| Complex64::from_polar(1.0, 0.5 * bcoef * p * p))
                        .collect();
                    let shear = |amp: &[Complex64]| -> Result<Vec<Complex64>> {
                        let mut w: Vec<Complex64> = amp.iter().zip(&chirp).map(|(a, c)| a * c).collect();
                        self.space.to_position(&mut w);
                        guard(&w, grid.dz())?;
                        Ok(w)
                    };
                    Ok(([shear(&st.momentum.amp_a)?, shear(&st.momentum.amp_b)?], grid.dz()))
                }
            }
        }
    }

    /// Readout amplitudes of the centre and of every stencil pair, with the
    /// support window and the oversampling that resolves them.
    fn readings(&self, readout: Readout, theta: Option<f64>) -> Result<Readings> {
        let (center, spacing) = self.readout_amplitudes(&self.center, readout, theta)?;
        let mut pairs = Vec::with_capacity(self.pairs.len());
        for (plus, minus) in &self.pairs {
            pairs.push((
                self.readout_amplitudes(plus, readout, theta)?.0,
                self.readout_amplitudes(minus, readout, theta)?.0,
            ));
        }
        let window = support_window(std::iter::once(&center).chain(pairs.iter().flat_map(|(p, m)| [p, m])));
        let (start, len) = window;
        let mut radius = 0.0f64;
        for amp in &center {
            radius = radius.max(spectral_radius(&amp[start..start + len], spacing, SUPPORT_THRESHOLD)?);
        }
        let factor = ((radius * spacing / MAX_PHASE_STEP).ceil().max(1.0) as usize).next_power_of_two();
        if factor * len > self.policy.max_points {
            return Err(Error::GridOverflow {
                requested: factor * len,
                cap: self.policy.max_points,
            });
        }
        Ok(Readings {
            center,
            pairs,
            spacing,
            window,
            factor,
        })
    }

    /// CFI of the readout, Richardson-extrapolated over the stencil steps.
    ///
    /// ∂_g Pr = 2 Re(ū ∂_g u) with ∂_g u from central differences of the
    /// readout amplitudes u. Where u passes close to zero the integrand dips
    /// over a width far below the grid spacing; the amplitudes are oversampled
    /// until the phase step per sample is small, and the trapezoid error of
    /// each near zero is removed in closed form.
    pub fn evaluate(&self, readout: Readout, theta: Option<f64>) -> Result<CfiResult> {
        let readings = self.readings(readout, theta)?;
        let center = readings.fine(&readings.center)?;
        let d = readings.spacing / readings.factor as f64;
        let prob = [sq(&center[0]), sq(&center[1])];
        let peak = prob.iter().flatten().fold(0.0f64, |m, &v| m.max(v));
        let floor = self.policy.floor * peak;
        let dropped_mass = compensated_sum(prob.iter().flatten().copied().filter(|&v| v < floor)) * d;
        let retained = compensated_sum(prob.iter().flatten().copied()) * d - dropped_mass;
        if retained < 1.0 - 1e-6 {
            return Err(Error::DegenerateDistribution { retained });
        }
        let minima: Vec<Vec<usize>> = prob.iter().map(|p| local_minima(p, floor)).collect();
        let abs_floor = 1e-7 * self.scale;
        let mut table = RichardsonTable::new();
        let mut last = (f64::NAN, f64::INFINITY);
        for (k, (plus, minus)) in readings.pairs.iter().enumerate() {
            let h = self.steps[k];
            let up = readings.fine(plus)?;
            let down = readings.fine(minus)?;
            let mut base = CompensatedSum::new();
            for s in 0..2 {
                for i in 0..center[s].len() {
                    base.add(fisher_density(center[s][i], up[s][i], down[s][i], h, floor));
                }
            }
            let mut total = CompensatedSum::new();
            total.add(base.value() * d);
            for s in 0..2 {
                let arrays = [&center[s][..], &up[s][..], &down[s][..]];
                total.add(-pole_errors(arrays, &minima[s], h, d));
            }
            let (est, spread) = table.push(total.value());
            last = (est, spread);
            if k >= 1 && spread <= self.policy.rtol * est.abs().max(abs_floor) {
                return Ok(CfiResult {
                    value: est,
                    error_estimate: spread,
                    dropped_mass,
                    oversampling: readings.factor,
                });
            }
        }
        Err(Error::NoConvergence {
            what: "pipeline CFI".into(),
            estimate: last.0,
            spread: last.1,
        })
    }

    /// Pure-state QFI 8(1 − |⟨Ψ_{g−h}|Ψ_{g+h}⟩|)/(2h)², extrapolated in h.
    pub fn qfi_overlap(&self) -> Result<(f64, f64)> {
        let mut table = RichardsonTable::new();
        let mut last = (f64::NAN, f64::INFINITY);
        for (k, (plus, minus)) in self.pairs.iter().enumerate() {
            let eps = 2.0 * self.steps[k];
            let ov = minus.momentum.overlap(&plus.momentum).norm();
            let (est, spread) = table.push(8.0 * (1.0 - ov) / (eps * eps));
            last = (est, spread);
            if k >= 1 && spread <= self.policy.rtol * est.abs() {
                return Ok((est, spread));
            }
        }
        Err(Error::NoConvergence {
            what: "overlap QFI".into(),
            estimate: last.0,
            spread: last.1,
        })
    }
}

type Amplitudes = ([Vec<Complex64>; 2], f64);

/// Relative intensity below which samples count as outside the support.
const SUPPORT_THRESHOLD: f64 = 1e-28;
/// Samples kept on either side of the support.
const SUPPORT_MARGIN: usize = 16;
/// Largest phase advance per oversampled readout sample, in radians.
const MAX_PHASE_STEP: f64 = 0.5;
/// Half-width of the interpolation stencil around a local minimum.
const STENCIL: usize = 4;
/// Zeros of u farther than this many samples from the real axis leave a
/// trapezoid error below e^{-2π·3} of their residue and are not corrected.
const MAX_POLE_DISTANCE: f64 = 3.0;
const NEWTON_ITERATIONS: usize = 60;

/// Native-resolution readout amplitudes for one θ.
struct Readings {
    center: [Vec<Complex64>; 2],
    pairs: Vec<([Vec<Complex64>; 2], [Vec<Complex64>; 2])>,
    spacing: f64,
    /// (first index, power-of-two length) of the window holding the support.
    window: (usize, usize),
    factor: usize,
}

impl Readings {
    /// Band-limited oversampling of the support window.
    fn fine(&self, amps: &[Vec<Complex64>; 2]) -> Result<[Vec<Complex64>; 2]> {
        let (start, len) = self.window;
        Ok([
            upsample(&amps[0][start..start + len], self.spacing, self.factor)?,
            upsample(&amps[1][start..start + len], self.spacing, self.factor)?,
        ])
    }
}

/// 4 Re(ū v)²/|u|² with v the central difference of the amplitudes;
/// zero below the probability floor.
fn fisher_density(u: Complex64, up: Complex64, down: Complex64, h: f64, floor: f64) -> f64 {
    let p = u.norm_sqr();
    if p < floor || p == 0.0 {
        return 0.0;
    }
    let v = (up - down) / (2.0 * h);
    let re = (u.conj() * v).re;
    4.0 * re * re / p
}

/// Interior samples where the probability has a local minimum above the floor.
fn local_minima(prob: &[f64], floor: f64) -> Vec<usize> {
    let n = prob.len();
    if n < 2 * STENCIL + 1 {
        return Vec::new();
    }
    (STENCIL..n - STENCIL)
        .filter(|&i| {
            prob[i] < prob[i - 1]
                && prob[i] <= prob[i + 1]
                && prob[i - 1].max(prob[i + 1]) >= floor
        })
        .collect()
}

/// Interpolating polynomial through 2·STENCIL+1 unit-spaced samples centred
/// on s = 0, in Newton form so it can be continued to complex s.
struct LocalPolynomial {
    coefficients: [Complex64; 2 * STENCIL + 1],
}

impl LocalPolynomial {
    fn new(samples: &[Complex64]) -> LocalPolynomial {
        let mut c = [Complex64::new(0.0, 0.0); 2 * STENCIL + 1];
        c.copy_from_slice(&samples[..2 * STENCIL + 1]);
        // divided differences on nodes -STENCIL..=STENCIL
        for level in 1..c.len() {
            for k in (level..c.len()).rev() {
                c[k] = (c[k] - c[k - 1]) / level as f64;
            }
        }
        LocalPolynomial { coefficients: c }
    }

    /// Value and first derivative at complex s.
    fn eval(&self, s: Complex64) -> (Complex64, Complex64) {
        let c = &self.coefficients;
        let mut value = c[c.len() - 1];
        let mut slope = Complex64::new(0.0, 0.0);
        for k in (0..c.len() - 1).rev() {
            let node = k as f64 - STENCIL as f64;
            slope = slope * (s - node) + value;
            value = value * (s - node) + c[k];
        }
        (value, slope)
    }
}

/// Trapezoid-sum minus integral of the Fisher density caused by the complex
/// zero of u near sample i, in units where the samples are d apart.
///
/// The density 4 Re(ū v)²/|u|² continues to (ũv + uṽ)²/(ũu) with
/// ũ(x) = conj(u(conj x)), so each zero z* of u off the real axis is a simple
/// pole with residue R = ũ(z*) v(z*)²/u'(z*), mirrored at conj(z*). Its
/// lattice sum is π cot(π(x_i − z*)/d) against the integral iπ sgn(Im z*).
fn pole_error(arrays: [&[Complex64]; 3], i: usize, h: f64, d: f64) -> Option<(f64, f64)> {
    let window = |a: &[Complex64]| LocalPolynomial::new(&a[i - STENCIL..=i + STENCIL]);
    let [u, up, down] = arrays.map(window);
    let mut s = Complex64::new(0.0, 0.0);
    let mut converged = false;
    for _ in 0..NEWTON_ITERATIONS {
        let (value, slope) = u.eval(s);
        if slope.norm() == 0.0 {
            return None;
        }
        let step = value / slope;
        s -= step;
        if !s.is_finite() || s.norm() > STENCIL as f64 {
            return None;
        }
        if step.norm() <= 1e-12 * (1.0 + s.norm()) {
            converged = true;
            break;
        }
    }
    if !converged || s.re.abs() > 1.5 || s.im.abs() > MAX_POLE_DISTANCE || s.im == 0.0 {
        return None;
    }
    let (_, slope) = u.eval(s);
    let mirror = u.eval(s.conj()).0.conj();
    let v = (up.eval(s).0 - down.eval(s).0) / (2.0 * h);
    let residue = mirror * v * v * d / slope;
    let lattice = -PI * cot(PI * s);
    let integral = Complex64::new(0.0, PI * s.im.signum());
    Some((s.re, 2.0 * (residue * (lattice - integral)).re))
}

/// cot(w) evaluated without overflow for large |Im w|.
fn cot(w: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if w.im < 0.0 {
        let q = (-2.0 * i * w).exp();
        i * (1.0 + q) / (1.0 - q)
    } else {
        let q = (2.0 * i * w).exp();
        -i * (1.0 + q) / (1.0 - q)
    }
}

/// Summed pole errors of one component, each zero counted once.
fn pole_errors(arrays: [&[Complex64]; 3], minima: &[usize], h: f64, d: f64) -> f64 {
    let mut found: Vec<(f64, f64)> = minima
        .iter()
        .filter_map(|&i| pole_error(arrays, i, h, d).map(|(offset, err)| (i as f64 + offset, err)))
        .collect();
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    found.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-6);
    compensated_sum(found.iter().map(|&(_, err)| err))
}

/// Smallest power-of-two window holding every sample above the support
/// threshold in any of the arrays.
fn support_window<'a>(sets: impl Iterator<Item = &'a [Vec<Complex64>; 2]>) -> (usize, usize) {
    let sets: Vec<_> = sets.collect();
    let n = sets[0][0].len();
    let peak = sets
        .iter()
        .flat_map(|s| s.iter().flatten())
        .fold(0.0f64, |m, c| m.max(c.norm_sqr()));
    let threshold = SUPPORT_THRESHOLD * peak;
    let mut lo = n;
    let mut hi = 0;
    for set in &sets {
        for amp in set.iter() {
            if let Some(first) = amp.iter().position(|c| c.norm_sqr() > threshold) {
                lo = lo.min(first);
            }
            if let Some(last) = amp.iter().rposition(|c| c.norm_sqr() > threshold) {
                hi = hi.max(last);
            }
        }
    }
    if lo > hi {
        return (0, n);
    }
    let lo = lo.saturating_sub(SUPPORT_MARGIN);
    let hi = (hi + SUPPORT_MARGIN).min(n - 1);
    let len = (hi - lo + 1).next_power_of_two().max(4);
    if len >= n {
        return (0, n);
    }
    let centre = (lo + hi) / 2;
    let start = centre.saturating_sub(len / 2).min(n - len);
    (start, len)
}

fn sq(amp: &[Complex64]) -> Vec<f64> {
    amp.iter().map(|c| c.norm_sqr()).collect()
}

fn guard(amp: &[Complex64], spacing: f64) -> Result<()> {
    let g = PhaseSpace::guard_mass(amp, spacing);
    if g > GUARD_TOLERANCE {
        Err(Error::AliasingDetected { guard_mass: g })
    } else {
        Ok(())
    }
}

/// CFI of the full pipeline for one angle (None: no rotation).
pub fn cfi_pipeline(
    params: &PhysParams,
    n: usize,
    t: f64,
    theta: Option<f64>,
    scenario: Scenario,
    readout: Readout,
    policy: &StepPolicy,
) -> Result<CfiResult> {
    let grid = pipeline_grid(params, n, t, theta.map(|_| readout), crate::grid::DEFAULT_CAP)?;
    let pipeline = Pipeline::new(params, n, t, scenario, &grid, policy.g_mode)?;
    CfiEvaluator::new(pipeline, *policy)?.evaluate(readout, theta)
}

/// QFI of the final pure state from the fidelity between neighbouring g.
/// Returns (value, error estimate).
pub fn qfi_overlap_oracle(
    params: &PhysParams,
    n: usize,
    t: f64,
    scenario: Scenario,
    policy: &StepPolicy,
) -> Result<(f64, f64)> {
    let grid = pipeline_grid(params, n, t, None, crate::grid::DEFAULT_CAP)?;
    let pipeline = Pipeline::new(params, n, t, scenario, &grid, policy.g_mode)?;
    CfiEvaluator::new(pipeline, *policy)?.qfi_overlap()
}
