//! Single-point Fisher information: `qfi` (momentum integrals, optionally the
//! overlap oracle) and `cfi` (closed form or pipeline).

use std::f64::consts::PI;
use std::path::PathBuf;

use rabi_core::fisher::{
    cfi_doppler_nopro, cfi_ideal_nopro, cfi_ideal_pro, cfi_pipeline, qfi_doppler, qfi_ideal, qfi_overlap_oracle,
    CfiResult, FisherRecord, Method, Readout, Scenario, StepPolicy,
};
use rabi_core::Error as CoreError;
use serde_json::json;

use super::pro_scan::{record_row, BOUND_SLACK, RECORD_HEADER};
use super::*;
use crate::output::{Artifacts, Table};

/// How a CFI value is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum MethodChoice {
    /// Closed form where one exists, the pipeline otherwise.
    Auto,
    Analytic,
    Pipeline,
}

pub(super) fn method_choice(resolved: &Resolved) -> Result<MethodChoice> {
    match resolved.text("method")? {
        "auto" => Ok(MethodChoice::Auto),
        "analytic" => Ok(MethodChoice::Analytic),
        "pipeline" => Ok(MethodChoice::Pipeline),
        other => Err(ExperimentError::bad_value("method", format!("`{other}` (auto|analytic|pipeline)"))),
    }
}

/// F_Q of the scenario at the parameters' duration.
pub(super) fn qfi_for(params: &PhysParams, n: usize, scenario: Scenario, options: &GridOptions) -> Result<f64> {
    Ok(match scenario {
        Scenario::Ideal => qfi_ideal(params, n, params.t),
        Scenario::Doppler => qfi_doppler(params, n, params.t, &build_grid(params, n, options)?)?.total,
    })
}

/// F_C at one point, with F_Q from the same scenario.
#[allow(clippy::too_many_arguments)]
pub(super) fn cfi_point(
    params: &PhysParams,
    n: usize,
    theta: Option<f64>,
    scenario: Scenario,
    method: MethodChoice,
    readout: Readout,
    policy: &StepPolicy,
    options: &GridOptions,
) -> Result<(FisherRecord, CfiResult)> {
    let t = params.t;
    let exact = |value: f64| CfiResult {
        value,
        error_estimate: 0.0,
        dropped_mass: 0.0,
        oversampling: 1,
    };
    let analytic = match (scenario, theta) {
        (Scenario::Ideal, Some(th)) => Some(exact(cfi_ideal_pro(params, n, t, th)?)),
        (Scenario::Ideal, None) => Some(exact(cfi_ideal_nopro(params, n, t))),
        (Scenario::Doppler, None) => Some(cfi_doppler_nopro(params, n, t, &build_grid(params, n, options)?)?),
        (Scenario::Doppler, Some(_)) => None,
    };
    let (result, used) = match (method, analytic) {
        (MethodChoice::Pipeline, _) | (MethodChoice::Auto, None) => {
            (cfi_pipeline(params, n, t, theta, scenario, readout, policy)?, Method::Pipeline)
        }
        (_, Some(r)) => (r, Method::Analytic),
        (MethodChoice::Analytic, None) => {
            return Err(CoreError::InvalidArgument("no closed form for the Doppler CFI with rotation".into()).into())
        }
    };
    let f_q = qfi_for(params, n, scenario, options)?;
    let record = FisherRecord::new(n, theta, params.sigma_p, params.delta0, t, f_q, result.value, scenario, used);
    Ok((record, result))
}

fn keys(kind: ExperimentKind) -> Vec<KeySpec> {
    let mut keys = vec![
        KeySpec::stated("omega_rabi", Fallback::Number(10.0)),
        KeySpec::stated("delta0", Fallback::Number(-0.5)),
        KeySpec::stated("sigma_p", Fallback::Number(2.0)),
        KeySpec::stated("n", Fallback::Number(0.0)),
        KeySpec::stated("omega_t", Fallback::Number(2.5 * PI)),
        KeySpec::inferred("omega_trap", Fallback::Derived),
    ];
    if kind == ExperimentKind::Qfi {
        keys.push(KeySpec::stated("oracle", Fallback::Number(0.0)));
    } else {
        keys.push(KeySpec::stated("theta", Fallback::Optional));
        keys.push(KeySpec::stated("scenario", Fallback::Text("doppler")));
        keys.push(KeySpec::stated("method", Fallback::Text("auto")));
        keys.push(KeySpec::inferred("readout", Fallback::Text("quadrature")));
    }
    keys.extend(policy_keys());
    keys.extend(base_keys());
    keys
}

pub(super) fn run(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let mut resolved = Resolved::new(&spec.config, &keys(spec.kind))?;
    let t = resolved.number("omega_t")? / resolved.number("omega_rabi")?;
    default_trap(&mut resolved, t);
    let params = params_with(&resolved, &[("t", t)])?;
    let n = resolved.count("n")?;
    let policy = policy(&resolved)?;
    let options = grid_options(&resolved)?;
    let grid = build_grid(&params, n, &options)?;
    let mut artifacts = Artifacts::create(spec)?;

    let extra = if spec.kind == ExperimentKind::Qfi {
        let q = qfi_doppler(&params, n, t, &grid)?;
        let oracle = if resolved.number("oracle")? != 0.0 {
            Some(qfi_overlap_oracle(&params, n, t, Scenario::Doppler, &policy)?)
        } else {
            None
        };
        let mut table = Table::new(&[
            "n",
            "sigma_p",
            "delta0",
            "t",
            "f_q_ideal",
            "delta_fq",
            "f_q",
            "j1",
            "j2",
            "j3",
            "quadrature_error",
            "oracle",
            "oracle_error",
        ]);
        table.push(vec![
            n.into(),
            params.sigma_p.into(),
            params.delta0.into(),
            t.into(),
            q.ideal.into(),
            q.delta.into(),
            q.total.into(),
            q.j.j1.into(),
            q.j.j2.into(),
            q.j.j3.into(),
            q.j.error_estimate.into(),
            oracle.map(|o| o.0).into(),
            oracle.map(|o| o.1).into(),
        ]);
        artifacts.write_csv("qfi.csv", &table)?;
        json!({ "step_policy": policy })
    } else {
        let theta = resolved.opt_number("theta")?;
        let (record, result) = cfi_point(
            &params,
            n,
            theta,
            scenario(&resolved)?,
            method_choice(&resolved)?,
            readout(&resolved)?,
            &policy,
            &options,
        )?;
        let mut header = RECORD_HEADER.to_vec();
        header.extend(["error_estimate", "dropped_mass", "oversampling"]);
        let mut table = Table::new(&header);
        let mut row = record_row(&record);
        row.extend([result.error_estimate.into(), result.dropped_mass.into(), result.oversampling.into()]);
        table.push(row);
        artifacts.write_csv("cfi.csv", &table)?;
        json!({
            "step_policy": policy,
            "bound_slack": BOUND_SLACK,
            "bound_violations": usize::from(!record.satisfies_bound(BOUND_SLACK)),
            "dropped_mass": result.dropped_mass,
            "oversampling": result.oversampling,
        })
    };
    let mut extra = extra;
    extra["grid"] = grid_json(&grid);
    extra["resonance"] = resonance_json(&params, n, &grid)?;
    artifacts.finish(spec, &resolved, extra)
}
