//! Population, final-state fidelity and QFI correction over time for the
//! six (δ0, σ_p) panels.

use std::f64::consts::PI;
use std::path::PathBuf;

use rabi_core::fisher::JIntegrator;
use rabi_core::numerics::{parallel_map, simpson_integrate};
use rabi_core::observables::{final_state_fidelity, k_profiles};
use rabi_core::ho_eigenstate;
use serde_json::json;

use super::*;
use crate::output::{tag, Artifacts, Table};
use crate::plot::{self, Panel, Series};

const HEADER: [&str; 8] = [
    "omega_t",
    "t",
    "p_a",
    "fidelity",
    "f_q_ideal",
    "delta_fq",
    "delta_fq_norm",
    "contrast",
];

fn keys() -> Vec<KeySpec> {
    let mut keys = vec![
        KeySpec::stated("omega_rabi", Fallback::Number(10.0)),
        KeySpec::stated("n", Fallback::Number(0.0)),
        KeySpec::stated("panels.delta0", Fallback::List(vec![-0.5, -7.0])),
        KeySpec::stated("panels.sigma_p", Fallback::List(vec![0.5, 2.0, 5.0])),
        KeySpec::inferred("omega_trap", Fallback::Number(1.0)),
        KeySpec::inferred("contrast_window", Fallback::Number(2.0 * PI)),
    ];
    keys.extend(window_keys());
    keys.extend(base_keys());
    keys
}

/// Trailing-window contrast: max − min of P_a over the samples with
/// Ωt ∈ [Ωt_k − window, Ωt_k]. None until a full window is available.
pub fn rabi_contrast(omega_t: &[f64], p_a: &[f64], window: f64) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(p_a.len());
    let mut start = 0;
    for k in 0..p_a.len() {
        while omega_t[k] - omega_t[start] > window * (1.0 + 1e-12) {
            start += 1;
        }
        if omega_t[k] - omega_t[0] < window * (1.0 - 1e-12) {
            out.push(None);
            continue;
        }
        let slice = &p_a[start..=k];
        let hi = slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = slice.iter().copied().fold(f64::INFINITY, f64::min);
        out.push(Some(hi - lo));
    }
    out
}

struct Sample {
    p_a: f64,
    fidelity: f64,
    f_q_ideal: f64,
    delta: f64,
}

pub(super) fn run(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let resolved = Resolved::new(&spec.config, &keys())?;
    let omega_t = time_axis(&resolved)?;
    let n = resolved.count("n")?;
    let window = resolved.number("contrast_window")?;
    let omega = resolved.number("omega_rabi")?;
    let times: Vec<f64> = omega_t.iter().map(|x| x / omega).collect();
    let t_max = *times.last().unwrap();

    let mut artifacts = Artifacts::create(spec)?;
    let mut panels_meta = Vec::new();
    let mut svg_panels = Vec::new();
    for &delta0 in &resolved.list("panels.delta0")? {
        for &sigma_p in &resolved.list("panels.sigma_p")? {
            let params = params_with(&resolved, &[("delta0", delta0), ("sigma_p", sigma_p), ("t", t_max)])?;
            let grid = analysis_grid(&params, n, &resolved)?;
            let weights: Vec<f64> = ho_eigenstate(n, sigma_p, &grid)?.amp.iter().map(|c| c.norm_sqr()).collect();
            let integrator = JIntegrator::new(n, sigma_p, &grid)?;
            let samples = parallel_map(&times, spec.workers, |_, &t| {
                let k = k_profiles(&params, &grid, t)?;
                let f: Vec<f64> = weights.iter().zip(&k.k_a).map(|(w, ka)| w * ka).collect();
                let q = integrator.qfi(&params, t)?;
                Ok(Sample {
                    p_a: simpson_integrate(&f, grid.dp)?.value,
                    fidelity: final_state_fidelity(&params, n, t, &grid)?,
                    f_q_ideal: q.ideal,
                    delta: q.delta,
                })
            })?;
            let p_a: Vec<f64> = samples.iter().map(|s| s.p_a).collect();
            let contrast = rabi_contrast(&omega_t, &p_a, window);

            let mut table = Table::new(&HEADER);
            for (k, s) in samples.iter().enumerate() {
                let norm = (s.f_q_ideal > 0.0).then(|| s.delta / s.f_q_ideal);
                table.push(vec![
                    omega_t[k].into(),
                    times[k].into(),
                    s.p_a.into(),
                    s.fidelity.into(),
                    s.f_q_ideal.into(),
                    s.delta.into(),
                    norm.into(),
                    contrast[k].into(),
                ]);
            }
            let name = format!("fig1_delta0_{}_sigma_p_{}.csv", tag(delta0), tag(sigma_p));
            artifacts.write_csv(&name, &table)?;

            let max_fidelity = samples.iter().skip(1).map(|s| s.fidelity).fold(f64::NAN, f64::max);
            panels_meta.push(json!({
                "file": name,
                "delta0": delta0,
                "sigma_p": sigma_p,
                "grid": grid_json(&grid),
                "resonance": resonance_json(&params, n, &grid)?,
                "max_fidelity_after_start": max_fidelity,
                "final_contrast": contrast.last().copied().flatten(),
            }));
            if artifacts.plotting() {
                let title = format!("delta0 = {delta0}, sigma_p = {sigma_p}");
                let pts = |f: &dyn Fn(&Sample) -> f64| -> Vec<(f64, f64)> {
                    omega_t.iter().zip(&samples).map(|(x, s)| (*x / PI, f(s))).collect()
                };
                svg_panels.push(
                    Panel::new(title.clone(), "Omega t / pi", "probability")
                        .with(Series::new("P_a", pts(&|s| s.p_a)))
                        .with(Series::new("F", pts(&|s| s.fidelity))),
                );
                svg_panels.push(
                    Panel::new(title, "Omega t / pi", "Delta F_Q / F_Q ideal").with(Series::new(
                        "Delta F_Q / F_Q ideal",
                        pts(&|s| if s.f_q_ideal > 0.0 { s.delta / s.f_q_ideal } else { f64::NAN }),
                    )),
                );
            }
        }
    }
    artifacts.write_svg("fig1.svg", || plot::render(&svg_panels, 4))?;
    let extra = json!({
        "panels": panels_meta,
        "contrast": "max - min of p_a over the trailing window omega_t in [x - contrast_window, x]",
        "grid_rule": "dp <= min(sigma_p/16, time resolution at the last sample)",
    });
    artifacts.finish(spec, &resolved, extra)
}
