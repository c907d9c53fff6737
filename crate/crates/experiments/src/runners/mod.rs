//! Experiment runners. Each one resolves its key table, computes its datasets
//! through `parallel_map`, and writes CSVs, optional SVGs and the metadata.

mod fig1;
mod fig2;
mod pro_scan;
mod series;
mod single;
mod sweep;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use rabi_core::fisher::nopro::PROBABILITY_FLOOR;
use rabi_core::fisher::{resonant_delta0, GMode, Readout, Scenario, StepPolicy};
use rabi_core::grid::{DEFAULT_CAP, DEFAULT_SAFETY};
use rabi_core::params::PHYSICAL_KEYS;
use rabi_core::{build_grid, build_params, GridOptions, MomentumGrid, PhysParams};
use serde_json::{json, Value};

use crate::config::{to_count, ExperimentKind, ExperimentSpec, Fallback, KeySpec, Resolved};
use crate::error::{ExperimentError, Result};

pub use fig1::rabi_contrast;
pub use fig2::{line_fit, LineFit};
pub use pro_scan::{scan_theta, ProScan};
pub use sweep::Quantity;

/// Default detuning of the angle-scan experiments, commonly quoted as the
/// two-photon resonance; reported next to the computed resonance.
pub const QUOTED_RESONANCE: f64 = -0.5;

/// Runs the experiment and returns the files written.
pub fn run(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    match spec.kind {
        ExperimentKind::Fig1 => fig1::run(spec),
        ExperimentKind::Fig2 => fig2::run(spec),
        ExperimentKind::Fig3 => pro_scan::run_fig3(spec),
        ExperimentKind::Fig4 => pro_scan::run_fig4(spec),
        ExperimentKind::Rabi | ExperimentKind::Fidelity => series::run(spec),
        ExperimentKind::Qfi | ExperimentKind::Cfi => single::run(spec),
        ExperimentKind::Sweep => sweep::run(spec),
    }
}

/// Keys shared by every experiment: the remaining physical parameters and
/// the grid controls.
fn base_keys() -> Vec<KeySpec> {
    vec![
        KeySpec::stated("phi", Fallback::Number(0.0)),
        KeySpec::stated("g", Fallback::Number(0.0)),
        KeySpec::stated("chirp_rate", Fallback::Optional),
        KeySpec::stated("grid.safety", Fallback::Number(DEFAULT_SAFETY)),
        KeySpec::stated("grid.cap", Fallback::Number(DEFAULT_CAP as f64)),
    ]
}

/// Keys of the finite-difference controls used by pipeline evaluations.
fn policy_keys() -> Vec<KeySpec> {
    let d = StepPolicy::default();
    vec![
        KeySpec::stated("fd.rtol", Fallback::Number(d.rtol)),
        KeySpec::stated("fd.levels", Fallback::Number(d.levels as f64)),
        KeySpec::stated("fd.h0_scale", Fallback::Number(d.h0_scale)),
        KeySpec::stated("floor", Fallback::Number(PROBABILITY_FLOOR)),
        KeySpec::stated("g_mode", Fallback::Text("co-varied")),
    ]
}

fn policy(resolved: &Resolved) -> Result<StepPolicy> {
    let g_mode = match resolved.text("g_mode")? {
        "co-varied" => GMode::CoVaried,
        "fixed-chirp" => GMode::FixedChirp,
        other => return Err(ExperimentError::bad_value("g_mode", format!("`{other}` (co-varied|fixed-chirp)"))),
    };
    Ok(StepPolicy {
        h0_scale: resolved.number("fd.h0_scale")?,
        levels: resolved.count("fd.levels")?,
        rtol: resolved.number("fd.rtol")?,
        floor: resolved.number("floor")?,
        g_mode,
        max_points: cap(resolved)?,
    })
}

fn cap(resolved: &Resolved) -> Result<usize> {
    resolved.count("grid.cap")
}

fn grid_options(resolved: &Resolved) -> Result<GridOptions> {
    Ok(GridOptions {
        safety: resolved.number("grid.safety")?,
        cap: cap(resolved)?,
    })
}

fn readout(resolved: &Resolved) -> Result<Readout> {
    match resolved.text("readout")? {
        "quadrature" => Ok(Readout::Quadrature),
        "rotation" => Ok(Readout::Rotation),
        other => Err(ExperimentError::bad_value("readout", format!("`{other}` (quadrature|rotation)"))),
    }
}

fn scenario(resolved: &Resolved) -> Result<Scenario> {
    match resolved.text("scenario")? {
        "doppler" => Ok(Scenario::Doppler),
        "ideal" => Ok(Scenario::Ideal),
        other => Err(ExperimentError::bad_value("scenario", format!("`{other}` (ideal|doppler)"))),
    }
}

/// Physical parameters from the resolved keys, with per-panel overrides.
fn params_with(resolved: &Resolved, overrides: &[(&str, f64)]) -> Result<PhysParams> {
    let mut map = BTreeMap::new();
    for key in PHYSICAL_KEYS {
        if let Some(v) = resolved.opt_number(key)? {
            map.insert(key.to_string(), v);
        }
    }
    for (key, v) in overrides {
        map.insert(key.to_string(), *v);
    }
    Ok(build_params(&map)?)
}

/// Fills the trap frequency with 1/t when it is not configured.
fn default_trap(resolved: &mut Resolved, t: f64) {
    if !resolved.contains("omega_trap") {
        resolved.derive("omega_trap", 1.0 / t, true);
    }
}

/// Grid for the analytic routes at the parameters' duration.
fn analysis_grid(params: &PhysParams, n_max: usize, resolved: &Resolved) -> Result<MomentumGrid> {
    Ok(build_grid(params, n_max, &grid_options(resolved)?)?)
}

fn grid_json(grid: &MomentumGrid) -> Value {
    json!({
        "p_min": grid.p_min,
        "p_max": grid.p_max,
        "n_points": grid.n_points,
        "dp": grid.dp,
    })
}

/// Configured detuning against the computed resonance and the quoted value.
fn resonance_json(params: &PhysParams, n: usize, grid: &MomentumGrid) -> Result<Value> {
    let resonant = resonant_delta0(n, params.sigma_p, grid)?;
    Ok(json!({
        "delta0": params.delta0,
        "resonant_delta0": resonant,
        "distance_to_resonance": params.delta0 - resonant,
        "quoted_resonance": QUOTED_RESONANCE,
        "quoted_vs_computed": QUOTED_RESONANCE - resonant,
    }))
}

/// Oscillator numbers 0..=n_max.
fn n_range(resolved: &Resolved) -> Result<Vec<usize>> {
    Ok((0..=resolved.count("n_max")?).collect())
}

/// Inclusive, evenly spaced values of Ωt.
fn time_axis(resolved: &Resolved) -> Result<Vec<f64>> {
    let lo = resolved.number("omega_t_min")?;
    let hi = resolved.number("omega_t_max")?;
    let samples = resolved.count("samples")?;
    if samples < 2 || !(hi > lo) || lo < 0.0 {
        return Err(ExperimentError::bad_value(
            "samples",
            format!("need at least 2 samples over 0 <= omega_t_min < omega_t_max, got {samples} over [{lo}, {hi}]"),
        ));
    }
    Ok((0..samples)
        .map(|k| lo + (hi - lo) * k as f64 / (samples - 1) as f64)
        .collect())
}

/// Keys of a time-series experiment window, defaulting to Ωt ∈ [0, 20π].
fn window_keys() -> Vec<KeySpec> {
    vec![
        KeySpec::inferred("omega_t_min", Fallback::Number(0.0)),
        KeySpec::inferred("omega_t_max", Fallback::Number(20.0 * PI)),
        KeySpec::inferred("samples", Fallback::Number(2000.0)),
    ]
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}
