//! Long-time QFI correction against the detuning, and its least-squares
//! slope for each oscillator number.

use std::f64::consts::PI;
use std::path::PathBuf;

use rabi_core::fisher::JIntegrator;
use rabi_core::numerics::parallel_map;
use serde::Serialize;
use serde_json::json;

use super::*;
use crate::output::{Artifacts, Table};
use crate::plot::{self, Panel, Series};

/// Ordinary least-squares line y = intercept + slope·x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual_rms: f64,
    /// Standard error of the slope.
    pub slope_stderr: f64,
}

pub fn line_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return Err(rabi_core::Error::InvalidArgument(format!("line fit needs at least 3 paired points, got {n}")).into());
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(rabi_core::Error::InvalidArgument("line fit needs distinct abscissae".into()).into());
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(LineFit {
        slope,
        intercept,
        residual_rms: (ssr / nf).sqrt(),
        slope_stderr: (ssr / (nf - 2.0) / sxx).sqrt(),
    })
}

fn keys() -> Vec<KeySpec> {
    let mut keys = vec![
        KeySpec::stated("omega_rabi", Fallback::Number(10.0)),
        KeySpec::stated("omega_t", Fallback::Number(1000.0 * PI)),
        KeySpec::stated("sigma_p", Fallback::Number(2.45)),
        KeySpec::stated("n_max", Fallback::Number(10.0)),
        KeySpec::inferred("delta0_min", Fallback::Number(-10.0)),
        KeySpec::inferred("delta0_max", Fallback::Number(10.0)),
        KeySpec::inferred("delta0_steps", Fallback::Number(41.0)),
        KeySpec::inferred("omega_trap", Fallback::Number(1.0)),
    ];
    keys.extend(base_keys());
    keys
}

struct Curve {
    f_q_ideal: f64,
    delta: Vec<f64>,
    fit: LineFit,
    fit_norm: LineFit,
}

pub(super) fn run(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let resolved = Resolved::new(&spec.config, &keys())?;
    let t = resolved.number("omega_t")? / resolved.number("omega_rabi")?;
    let ns = n_range(&resolved)?;
    let steps = resolved.count("delta0_steps")?;
    let (lo, hi) = (resolved.number("delta0_min")?, resolved.number("delta0_max")?);
    if steps < 3 || !(hi > lo) {
        return Err(ExperimentError::bad_value("delta0_steps", "need at least 3 steps over delta0_min < delta0_max"));
    }
    let detunings: Vec<f64> = (0..steps).map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64).collect();
    let base = params_with(&resolved, &[("t", t), ("delta0", detunings[0])])?;
    let grid = analysis_grid(&base, *ns.last().unwrap(), &resolved)?;

    let curves = parallel_map(&ns, spec.workers, |_, &n| {
        let integrator = JIntegrator::new(n, base.sigma_p, &grid)?;
        let mut delta = Vec::with_capacity(detunings.len());
        let mut f_q_ideal = 0.0;
        for &d in &detunings {
            let q = integrator.qfi(&PhysParams { delta0: d, ..base }, t)?;
            f_q_ideal = q.ideal;
            delta.push(q.delta);
        }
        Ok((f_q_ideal, delta))
    })?;
    let curves = curves
        .into_iter()
        .map(|(f_q_ideal, delta)| {
            let norm: Vec<f64> = delta.iter().map(|d| ratio(*d, f_q_ideal)).collect();
            Ok(Curve {
                fit: line_fit(&detunings, &delta)?,
                fit_norm: line_fit(&detunings, &norm)?,
                f_q_ideal,
                delta,
            })
        })
        .collect::<Result<Vec<Curve>>>()?;

    let mut artifacts = Artifacts::create(spec)?;
    let mut values = Table::new(&["n", "delta0", "f_q_ideal", "delta_fq", "delta_fq_norm"]);
    let mut slopes = Table::new(&[
        "n",
        "slope",
        "intercept",
        "residual_rms",
        "slope_stderr",
        "slope_norm",
        "slope_norm_stderr",
    ]);
    for (&n, c) in ns.iter().zip(&curves) {
        for (d, v) in detunings.iter().zip(&c.delta) {
            values.push(vec![n.into(), (*d).into(), c.f_q_ideal.into(), (*v).into(), ratio(*v, c.f_q_ideal).into()]);
        }
        slopes.push(vec![
            n.into(),
            c.fit.slope.into(),
            c.fit.intercept.into(),
            c.fit.residual_rms.into(),
            c.fit.slope_stderr.into(),
            c.fit_norm.slope.into(),
            c.fit_norm.slope_stderr.into(),
        ]);
    }
    artifacts.write_csv("fig2_values.csv", &values)?;
    artifacts.write_csv("fig2_slopes.csv", &slopes)?;
    artifacts.write_svg("fig2.svg", || {
        let mut curves_panel = Panel::new("QFI correction vs detuning", "delta0 / E0", "Delta F_Q");
        for (&n, c) in ns.iter().zip(&curves) {
            curves_panel = curves_panel.with(Series::new(
                format!("n = {n}"),
                detunings.iter().copied().zip(c.delta.iter().copied()).collect(),
            ));
        }
        let slope_panel = Panel::new("Least-squares slope", "n", "slope of Delta F_Q").with(Series::new(
            "slope",
            ns.iter().zip(&curves).map(|(&n, c)| (n as f64, c.fit.slope)).collect(),
        ));
        plot::render(&[curves_panel, slope_panel], 2)
    })?;
    let extra = json!({
        "t": t,
        "grid": grid_json(&grid),
        "resonance": resonance_json(&base, 0, &grid)?,
        "fit": "ordinary least squares of delta_fq against delta0; slope_stderr from the residual variance",
    });
    artifacts.finish(spec, &resolved, extra)
}
