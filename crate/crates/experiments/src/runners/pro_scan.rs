//! Rotation-angle scans of the Doppler pipeline CFI against the no-rotation
//! baseline, per oscillator number (one σ_p) or per (σ_p, n) panel.

use std::cell::Cell as StdCell;
use std::f64::consts::PI;
use std::path::PathBuf;

use rabi_core::fisher::search::{coarse_grid, refine};
use rabi_core::fisher::{
    cfi_doppler_nopro, pipeline::pipeline_grid, CfiEvaluator, FisherRecord, JIntegrator, Method, Pipeline,
    Readout, Scenario, StepPolicy,
};
use rabi_core::numerics::parallel_map;
use rabi_core::GridOptions;
use serde_json::json;

use super::*;
use crate::output::{Artifacts, Cell, Table};
use crate::plot::{self, Panel, Series};

/// Slack allowed on F_C ≤ F_Q before a record counts as a violation.
pub const BOUND_SLACK: f64 = 1e-6;

pub(super) const RECORD_HEADER: [&str; 10] =
    ["n", "theta", "sigma_p", "delta0", "t", "f_q", "f_c", "ratio", "scenario", "method"];

pub(super) fn record_row(r: &FisherRecord) -> Vec<Cell> {
    vec![
        r.n.into(),
        r.theta.into(),
        r.sigma_p.into(),
        r.delta0.into(),
        r.t.into(),
        r.f_q.into(),
        r.f_c.into(),
        r.ratio.into(),
        r.scenario.as_str().into(),
        r.method.as_str().into(),
    ]
}

/// Result of one angle scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ProScan {
    pub n: usize,
    pub sigma_p: f64,
    pub thetas: Vec<f64>,
    pub f_c: Vec<f64>,
    pub theta_max: f64,
    pub f_c_max: f64,
    /// F_Q from the momentum integrals.
    pub f_q: f64,
    pub f_c_nopro: f64,
    /// Largest probability mass dropped by the floor over the scan.
    pub dropped_mass: f64,
    pub oversampling: usize,
    pub grid_points: usize,
}

impl ProScan {
    pub fn ratio_max(&self) -> f64 {
        ratio(self.f_c_max, self.f_q)
    }

    pub fn ratio_nopro(&self) -> f64 {
        ratio(self.f_c_nopro, self.f_q)
    }

    pub fn gain(&self) -> f64 {
        ratio(self.f_c_max, self.f_c_nopro)
    }

    pub fn records(&self, params: &PhysParams) -> Vec<FisherRecord> {
        let make = |theta, f_c, method| {
            FisherRecord::new(self.n, theta, self.sigma_p, params.delta0, params.t, self.f_q, f_c, Scenario::Doppler, method)
        };
        let mut out = vec![make(None, self.f_c_nopro, Method::Analytic)];
        for (th, v) in self.thetas.iter().zip(&self.f_c) {
            out.push(make(Some(*th), *v, Method::Pipeline));
        }
        out.push(make(Some(self.theta_max), self.f_c_max, Method::Pipeline));
        out
    }
}

/// Scans `points` midpoint angles over (0, π), refines the best one, and
/// evaluates the no-rotation baseline and F_Q at the same parameters.
pub fn scan_theta(
    params: &PhysParams,
    n: usize,
    points: usize,
    readout: Readout,
    policy: &StepPolicy,
    options: &GridOptions,
) -> rabi_core::Result<ProScan> {
    let t = params.t;
    let analytic_grid = build_grid(params, n, options)?;
    let f_q = JIntegrator::new(n, params.sigma_p, &analytic_grid)?.qfi(params, t)?.total;
    let nopro = cfi_doppler_nopro(params, n, t, &analytic_grid)?;

    let grid = pipeline_grid(params, n, t, Some(readout), options.cap)?;
    let pipeline = Pipeline::new(params, n, t, Scenario::Doppler, &grid, policy.g_mode)?;
    let eval = CfiEvaluator::new(pipeline, *policy)?;
    let dropped = StdCell::new(nopro.dropped_mass);
    let oversampling = StdCell::new(1usize);
    let evaluate = |theta: f64| -> rabi_core::Result<f64> {
        let r = eval.evaluate(readout, Some(theta))?;
        dropped.set(dropped.get().max(r.dropped_mass));
        oversampling.set(oversampling.get().max(r.oversampling));
        Ok(r.value)
    };
    let thetas = coarse_grid(0.0, PI, points);
    let f_c = thetas.iter().map(|&th| evaluate(th)).collect::<rabi_core::Result<Vec<f64>>>()?;
    let best = refine(evaluate, (0.0, PI), thetas.clone(), f_c.clone())?;
    Ok(ProScan {
        n,
        sigma_p: params.sigma_p,
        thetas,
        f_c,
        theta_max: best.theta,
        f_c_max: best.value,
        f_q,
        f_c_nopro: nopro.value,
        dropped_mass: dropped.get(),
        oversampling: oversampling.get(),
        grid_points: grid.n_points,
    })
}

fn keys(panels: bool) -> Vec<KeySpec> {
    let mut keys = vec![
        KeySpec::stated("omega_rabi", Fallback::Number(10.0)),
        KeySpec::stated("delta0", Fallback::Number(-0.5)),
        KeySpec::stated("omega_t", Fallback::Number(2.5 * PI)),
        KeySpec::stated("n_max", Fallback::Number(30.0)),
        KeySpec::stated("theta_points", Fallback::Number(64.0)),
        KeySpec::inferred("omega_trap", Fallback::Derived),
        KeySpec::inferred("readout", Fallback::Text("quadrature")),
    ];
    if panels {
        keys.push(KeySpec::inferred("panels.sigma_p", Fallback::List(vec![0.5, 2.0, 3.5, 5.0])));
    } else {
        keys.push(KeySpec::stated("sigma_p", Fallback::Number(2.0)));
    }
    keys.extend(policy_keys());
    keys.extend(base_keys());
    keys
}

const SUMMARY_HEADER: [&str; 12] = [
    "sigma_p",
    "n",
    "theta_max",
    "f_q",
    "f_c_max",
    "f_c_nopro",
    "ratio_max",
    "ratio_nopro",
    "gain",
    "dropped_mass",
    "oversampling",
    "grid_points",
];

fn summary_row(s: &ProScan) -> Vec<Cell> {
    vec![
        s.sigma_p.into(),
        s.n.into(),
        s.theta_max.into(),
        s.f_q.into(),
        s.f_c_max.into(),
        s.f_c_nopro.into(),
        s.ratio_max().into(),
        s.ratio_nopro().into(),
        s.gain().into(),
        s.dropped_mass.into(),
        s.oversampling.into(),
        s.grid_points.into(),
    ]
}

/// Runs every (σ_p, n) scan and writes the record and summary tables.
fn run_scans(spec: &ExperimentSpec, panels: bool) -> Result<Vec<PathBuf>> {
    let mut resolved = Resolved::new(&spec.config, &keys(panels))?;
    let t = resolved.number("omega_t")? / resolved.number("omega_rabi")?;
    default_trap(&mut resolved, t);
    let sigmas = if panels {
        resolved.list("panels.sigma_p")?
    } else {
        vec![resolved.number("sigma_p")?]
    };
    let ns = n_range(&resolved)?;
    let points = resolved.count("theta_points")?;
    let readout = readout(&resolved)?;
    let policy = policy(&resolved)?;
    let options = grid_options(&resolved)?;

    let jobs: Vec<PhysParams> = sigmas
        .iter()
        .map(|&s| params_with(&resolved, &[("t", t), ("sigma_p", s)]))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(usize, usize)> = (0..jobs.len()).flat_map(|i| ns.iter().map(move |&n| (i, n))).collect();
    let scans = parallel_map(&tasks, spec.workers, |_, &(i, n)| {
        scan_theta(&jobs[i], n, points, readout, &policy, &options)
    })?;

    let name = spec.kind.name();
    let mut artifacts = Artifacts::create(spec)?;
    let mut records = Table::new(&RECORD_HEADER);
    let mut summary = Table::new(&SUMMARY_HEADER);
    let mut violations = 0usize;
    for (&(i, _), scan) in tasks.iter().zip(&scans) {
        for r in scan.records(&jobs[i]) {
            violations += usize::from(!r.satisfies_bound(BOUND_SLACK));
            records.push(record_row(&r));
        }
        summary.push(summary_row(scan));
    }
    artifacts.write_csv(&format!("{name}_records.csv"), &records)?;
    artifacts.write_csv(&format!("{name}_summary.csv"), &summary)?;
    artifacts.write_svg(&format!("{name}.svg"), || render(panels, &sigmas, &scans))?;

    let grids = jobs
        .iter()
        .map(|p| Ok(grid_json(&build_grid(p, *ns.last().unwrap(), &options)?)))
        .collect::<Result<Vec<_>>>()?;
    let extra = json!({
        "t": t,
        "sigma_p": sigmas,
        "analytic_grids": grids,
        "resonance": resonance_json(&jobs[0], 0, &build_grid(&jobs[0], 0, &options)?)?,
        "step_policy": policy,
        "bound_slack": BOUND_SLACK,
        "bound_violations": violations,
        "max_dropped_mass": scans.iter().map(|s| s.dropped_mass).fold(0.0, f64::max),
        "max_oversampling": scans.iter().map(|s| s.oversampling).max(),
        "records": "per (sigma_p, n): the no-rotation baseline (empty theta), the theta scan, then the refined optimum",
    });
    artifacts.finish(spec, &resolved, extra)
}

fn render(panels: bool, sigmas: &[f64], scans: &[ProScan]) -> String {
    if panels {
        let out: Vec<Panel> = sigmas
            .iter()
            .map(|&s| {
                let rows: Vec<&ProScan> = scans.iter().filter(|x| x.sigma_p == s).collect();
                Panel::new(format!("sigma_p = {s}"), "n", "F_C / F_Q")
                    .with(Series::new("max over theta", rows.iter().map(|r| (r.n as f64, r.ratio_max())).collect()))
                    .with(Series::new("no rotation", rows.iter().map(|r| (r.n as f64, r.ratio_nopro())).collect()).dashed())
            })
            .collect();
        return plot::render(&out, 2);
    }
    let mut curves = Panel::new("CFI / QFI against the rotation angle", "theta", "F_C / F_Q");
    for s in scans.iter().filter(|s| s.n % 5 == 0) {
        curves = curves.with(Series::new(
            format!("n = {}", s.n),
            s.thetas.iter().zip(&s.f_c).map(|(th, v)| (*th, ratio(*v, s.f_q))).collect(),
        ));
    }
    if let Some(first) = scans.first() {
        curves = curves.with(Series::new("no rotation, n = 0", vec![(0.0, first.ratio_nopro()), (PI, first.ratio_nopro())]).dashed());
    }
    let optimum = Panel::new("Optimal angle", "n", "theta_max").with(Series::new(
        "theta_max",
        scans.iter().map(|s| (s.n as f64, s.theta_max)).collect(),
    ));
    plot::render(&[curves, optimum], 2)
}

pub(super) fn run_fig3(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    run_scans(spec, false)
}

pub(super) fn run_fig4(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    run_scans(spec, true)
}
