//! Single-panel time series: populations (`rabi`) or the final-state
//! fidelity (`fidelity`).

use std::f64::consts::PI;
use std::path::PathBuf;

use rabi_core::ho_eigenstate;
use rabi_core::numerics::{parallel_map, simpson_integrate};
use rabi_core::observables::{final_state_fidelity, k_profiles};
use serde_json::json;

use super::*;
use crate::output::{Artifacts, Table};
use crate::plot::{self, Panel, Series};

fn keys() -> Vec<KeySpec> {
    let mut keys = vec![
        KeySpec::stated("omega_rabi", Fallback::Number(10.0)),
        KeySpec::stated("delta0", Fallback::Number(-0.5)),
        KeySpec::inferred("sigma_p", Fallback::Number(2.0)),
        KeySpec::stated("n", Fallback::Number(0.0)),
        KeySpec::inferred("omega_trap", Fallback::Number(1.0)),
    ];
    keys.extend(window_keys());
    keys.extend(base_keys());
    keys
}

pub(super) fn run(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let resolved = Resolved::new(&spec.config, &keys())?;
    let omega_t = time_axis(&resolved)?;
    let omega = resolved.number("omega_rabi")?;
    let times: Vec<f64> = omega_t.iter().map(|x| x / omega).collect();
    let n = resolved.count("n")?;
    let params = params_with(&resolved, &[("t", *times.last().unwrap())])?;
    let grid = analysis_grid(&params, n, &resolved)?;
    let name = spec.kind.name();

    let (table, columns) = if spec.kind == ExperimentKind::Rabi {
        let weights: Vec<f64> = ho_eigenstate(n, params.sigma_p, &grid)?.amp.iter().map(|c| c.norm_sqr()).collect();
        let rows = parallel_map(&times, spec.workers, |_, &t| {
            let k = k_profiles(&params, &grid, t)?;
            let fa: Vec<f64> = weights.iter().zip(&k.k_a).map(|(w, v)| w * v).collect();
            let fb: Vec<f64> = weights.iter().zip(&k.k_b).map(|(w, v)| w * v).collect();
            Ok(vec![simpson_integrate(&fa, grid.dp)?.value, simpson_integrate(&fb, grid.dp)?.value])
        })?;
        (rows, vec!["p_a", "p_b"])
    } else {
        let rows = parallel_map(&times, spec.workers, |_, &t| Ok(vec![final_state_fidelity(&params, n, t, &grid)?]))?;
        (rows, vec!["fidelity"])
    };

    let mut header = vec!["omega_t", "t"];
    header.extend(columns.iter().copied());
    let mut out = Table::new(&header);
    for (k, row) in table.iter().enumerate() {
        let mut cells = vec![omega_t[k].into(), times[k].into()];
        cells.extend(row.iter().map(|&v| v.into()));
        out.push(cells);
    }
    let mut artifacts = Artifacts::create(spec)?;
    artifacts.write_csv(&format!("{name}.csv"), &out)?;
    artifacts.write_svg(&format!("{name}.svg"), || {
        let mut panel = Panel::new(
            format!("delta0 = {}, sigma_p = {}, n = {n}", params.delta0, params.sigma_p),
            "Omega t / pi",
            "probability",
        );
        for (c, label) in columns.iter().enumerate() {
            panel = panel.with(Series::new(*label, omega_t.iter().zip(&table).map(|(x, r)| (x / PI, r[c])).collect()));
        }
        plot::render(&[panel], 1)
    })?;
    let extra = json!({
        "grid": grid_json(&grid),
        "resonance": resonance_json(&params, n, &grid)?,
    });
    artifacts.finish(spec, &resolved, extra)
}
