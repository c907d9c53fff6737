//! Cartesian-product sweeps over n, θ, σ_p, δ0 and t of one quantity.

use std::f64::consts::PI;
use std::path::PathBuf;

use rabi_core::fisher::search::coarse_grid;
use rabi_core::fisher::{
    cfi_ideal_pro, find_theta_max, pipeline::pipeline_grid, theta_max_ideal, CfiEvaluator, Pipeline, Readout, Scenario,
    StepPolicy,
};
use rabi_core::numerics::{parallel_map, simpson_integrate};
use rabi_core::observables::{final_state_fidelity, k_profiles};
use rabi_core::{ho_eigenstate, Error as CoreError};
use serde_json::json;

use super::pro_scan::BOUND_SLACK;
use super::single::{cfi_point, method_choice, qfi_for, MethodChoice};
use super::*;
use crate::output::{Artifacts, Cell, Table};

/// Quantity evaluated at every sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    PopulationA,
    Fidelity,
    Qfi,
    Cfi,
    ThetaMax,
}

impl Quantity {
    pub fn parse(s: &str) -> Option<Quantity> {
        match s {
            "P_a" => Some(Quantity::PopulationA),
            "F" => Some(Quantity::Fidelity),
            "F_Q" => Some(Quantity::Qfi),
            "F_C" => Some(Quantity::Cfi),
            "theta_max" => Some(Quantity::ThetaMax),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::PopulationA => "P_a",
            Quantity::Fidelity => "F",
            Quantity::Qfi => "F_Q",
            Quantity::Cfi => "F_C",
            Quantity::ThetaMax => "theta_max",
        }
    }
}

const AXES: [&str; 5] = ["axes.n", "axes.theta", "axes.sigma_p", "axes.delta0", "axes.t"];

const HEADER: [&str; 12] = [
    "n", "theta", "sigma_p", "delta0", "t", "quantity", "value", "f_q", "f_c", "ratio", "scenario", "method",
];

fn keys() -> Vec<KeySpec> {
    let mut keys = vec![
        KeySpec::stated("omega_rabi", Fallback::Number(10.0)),
        KeySpec::stated("delta0", Fallback::Number(-0.5)),
        KeySpec::stated("sigma_p", Fallback::Number(2.0)),
        KeySpec::stated("n", Fallback::Number(0.0)),
        KeySpec::stated("omega_t", Fallback::Number(2.5 * PI)),
        KeySpec::inferred("omega_trap", Fallback::Optional),
        KeySpec::inferred("quantity", Fallback::Text("F_C")),
        KeySpec::stated("scenario", Fallback::Text("doppler")),
        KeySpec::stated("method", Fallback::Text("auto")),
        KeySpec::inferred("readout", Fallback::Text("quadrature")),
        KeySpec::stated("theta_points", Fallback::Number(64.0)),
    ];
    keys.extend(AXES.iter().map(|k| KeySpec::stated(k, Fallback::Optional)));
    keys.extend(policy_keys());
    keys.extend(base_keys());
    keys
}

/// Sorted, de-duplicated axis values.
fn canonical(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    n: usize,
    theta: Option<f64>,
    sigma_p: f64,
    delta0: f64,
    t: f64,
}

impl Point {
    fn describe(&self) -> String {
        let theta = self.theta.map_or("none".to_string(), |v| v.to_string());
        format!(
            "(n={}, theta={theta}, sigma_p={}, delta0={}, t={})",
            self.n, self.sigma_p, self.delta0, self.t
        )
    }
}

struct Settings {
    quantity: Quantity,
    scenario: Scenario,
    method: MethodChoice,
    readout: Readout,
    policy: StepPolicy,
    options: GridOptions,
    theta_points: usize,
}

struct Outcome {
    value: f64,
    f_q: Option<f64>,
    f_c: Option<f64>,
    method: &'static str,
}

fn evaluate(s: &Settings, params: &PhysParams, pt: &Point) -> Result<Outcome> {
    let plain = |value: f64, method: &'static str| Outcome {
        value,
        f_q: None,
        f_c: None,
        method,
    };
    match s.quantity {
        Quantity::PopulationA => {
            let grid = build_grid(params, pt.n, &s.options)?;
            let psi = ho_eigenstate(pt.n, params.sigma_p, &grid)?;
            let k = k_profiles(params, &grid, params.t)?;
            let f: Vec<f64> = psi.amp.iter().zip(&k.k_a).map(|(c, ka)| c.norm_sqr() * ka).collect();
            Ok(plain(simpson_integrate(&f, grid.dp)?.value, "analytic"))
        }
        Quantity::Fidelity => {
            let grid = build_grid(params, pt.n, &s.options)?;
            Ok(plain(final_state_fidelity(params, pt.n, params.t, &grid)?, "analytic"))
        }
        Quantity::Qfi => {
            let f_q = qfi_for(params, pt.n, s.scenario, &s.options)?;
            Ok(Outcome {
                value: f_q,
                f_q: Some(f_q),
                f_c: None,
                method: "analytic",
            })
        }
        Quantity::Cfi => {
            let (record, _) = cfi_point(params, pt.n, pt.theta, s.scenario, s.method, s.readout, &s.policy, &s.options)?;
            Ok(Outcome {
                value: record.f_c,
                f_q: Some(record.f_q),
                f_c: Some(record.f_c),
                method: record.method.as_str(),
            })
        }
        Quantity::ThetaMax => {
            let t = params.t;
            let analytic = s.scenario == Scenario::Ideal && s.method != MethodChoice::Pipeline;
            if s.method == MethodChoice::Analytic && !analytic {
                return Err(CoreError::InvalidArgument("no closed-form optimum for the Doppler scenario".into()).into());
            }
            let (theta, f_c, method) = if analytic {
                let th = theta_max_ideal(params, t);
                (th, cfi_ideal_pro(params, pt.n, t, th)?, "analytic")
            } else {
                let grid = pipeline_grid(params, pt.n, t, Some(s.readout), s.options.cap)?;
                let pipe = Pipeline::new(params, pt.n, t, s.scenario, &grid, s.policy.g_mode)?;
                let eval = CfiEvaluator::new(pipe, s.policy)?;
                let found = find_theta_max(
                    |th| eval.evaluate(s.readout, Some(th)).map(|r| r.value),
                    (0.0, PI),
                    s.theta_points,
                )?;
                debug_assert_eq!(found.coarse_theta, coarse_grid(0.0, PI, s.theta_points));
                (found.theta, found.value, "pipeline")
            };
            Ok(Outcome {
                value: theta,
                f_q: Some(qfi_for(params, pt.n, s.scenario, &s.options)?),
                f_c: Some(f_c),
                method,
            })
        }
    }
}

pub(super) fn run(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let resolved = Resolved::new(&spec.config, &keys())?;
    let quantity_name = resolved.text("quantity")?;
    let quantity = Quantity::parse(quantity_name)
        .ok_or_else(|| ExperimentError::bad_value("quantity", format!("`{quantity_name}` (P_a|F|F_Q|F_C|theta_max)")))?;
    let settings = Settings {
        quantity,
        scenario: scenario(&resolved)?,
        method: method_choice(&resolved)?,
        readout: readout(&resolved)?,
        policy: policy(&resolved)?,
        options: grid_options(&resolved)?,
        theta_points: resolved.count("theta_points")?,
    };

    if !AXES.iter().any(|k| resolved.contains(k)) {
        return Err(CoreError::AxisEmpty("axes".into()).into());
    }
    let axis = |key: &str, scalar: Option<f64>| -> Result<Vec<Option<f64>>> {
        match resolved.opt_list(key)? {
            Some(v) if v.is_empty() => Err(CoreError::AxisEmpty(key.trim_start_matches("axes.").into()).into()),
            Some(v) => Ok(canonical(v).into_iter().map(Some).collect()),
            None => Ok(vec![scalar]),
        }
    };
    let omega_t = resolved.number("omega_t")?;
    let omega = resolved.number("omega_rabi")?;
    let ns = axis("axes.n", Some(resolved.number("n")?))?;
    let thetas = axis("axes.theta", None)?;
    let sigmas = axis("axes.sigma_p", Some(resolved.number("sigma_p")?))?;
    let detunings = axis("axes.delta0", Some(resolved.number("delta0")?))?;
    let times = axis("axes.t", Some(omega_t / omega))?;
    let angle_free = matches!(quantity, Quantity::PopulationA | Quantity::Fidelity | Quantity::Qfi | Quantity::ThetaMax);
    if angle_free && resolved.contains("axes.theta") {
        return Err(CoreError::InvalidArgument(format!("axes.theta does not apply to {}", quantity.as_str())).into());
    }

    let mut points = Vec::new();
    for n in &ns {
        let n = to_count("axes.n", n.unwrap())?;
        for &theta in &thetas {
            for sigma_p in &sigmas {
                for delta0 in &detunings {
                    for t in &times {
                        points.push(Point {
                            n,
                            theta,
                            sigma_p: sigma_p.unwrap(),
                            delta0: delta0.unwrap(),
                            t: t.unwrap(),
                        });
                    }
                }
            }
        }
    }
    let trap = resolved.opt_number("omega_trap")?;
    let outcomes = parallel_map(&points, spec.workers, |_, pt| {
        let overrides = [
            ("sigma_p", pt.sigma_p),
            ("delta0", pt.delta0),
            ("t", pt.t),
            ("omega_trap", trap.unwrap_or(1.0 / pt.t)),
        ];
        let params = params_with(&resolved, &overrides).map_err(|e| match e {
            ExperimentError::Core(c) => c,
            other => CoreError::InvalidArgument(other.to_string()),
        })?;
        evaluate(&settings, &params, pt).map_err(|e| match e {
            ExperimentError::Core(c) => c,
            other => CoreError::InvalidArgument(other.to_string()),
        })
    })
    .map_err(|e| match e {
        CoreError::JobFailed { index, source } => ExperimentError::SweepPoint {
            tuple: points[index].describe(),
            source: *source,
        },
        other => other.into(),
    })?;

    let mut table = Table::new(&HEADER);
    let mut violations = 0usize;
    for (pt, o) in points.iter().zip(&outcomes) {
        let ratio_cell = match (o.f_c, o.f_q) {
            (Some(c), Some(q)) => {
                violations += usize::from(c > q * (1.0 + BOUND_SLACK));
                Cell::Float(ratio(c, q))
            }
            _ => Cell::Empty,
        };
        table.push(vec![
            pt.n.into(),
            pt.theta.into(),
            pt.sigma_p.into(),
            pt.delta0.into(),
            pt.t.into(),
            quantity.as_str().into(),
            o.value.into(),
            o.f_q.into(),
            o.f_c.into(),
            ratio_cell,
            settings.scenario.as_str().into(),
            o.method.into(),
        ]);
    }
    let mut artifacts = Artifacts::create(spec)?;
    artifacts.write_csv("sweep.csv", &table)?;
    let extra = json!({
        "points": points.len(),
        "ordering": "rows sorted by (n, theta, sigma_p, delta0, t); axis values sorted and de-duplicated",
        "omega_trap": trap.map_or("1/t per point".to_string(), |w| w.to_string()),
        "step_policy": settings.policy,
        "bound_slack": BOUND_SLACK,
        "bound_violations": violations,
    });
    artifacts.finish(spec, &resolved, extra)
}
