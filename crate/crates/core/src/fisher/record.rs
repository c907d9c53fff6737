use serde::{Deserialize, Serialize};

use super::pipeline::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Pipeline,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Pipeline => "pipeline",
            Method::Oracle => "oracle",
        }
    }
}

/// One sweep point. `theta` is None for readouts without rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherRecord {
    pub n: usize,
    pub theta: Option<f64>,
    pub sigma_p: f64,
    pub delta0: f64,
    pub t: f64,
    pub f_q: f64,
    pub f_c: f64,
    pub ratio: f64,
    pub scenario: Scenario,
    pub method: Method,
}

impl FisherRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        theta: Option<f64>,
        sigma_p: f64,
        delta0: f64,
        t: f64,
        f_q: f64,
        f_c: f64,
        scenario: Scenario,
        method: Method,
    ) -> FisherRecord {
        FisherRecord {
            n,
            theta,
            sigma_p,
            delta0,
            t,
            f_q,
            f_c,
            ratio: if f_q > 0.0 { f_c / f_q } else { 0.0 },
            scenario,
            method,
        }
    }

    /// Cramér–Rao consistency F_C ≤ F_Q (1 + slack).
    pub fn satisfies_bound(&self, slack: f64) -> bool {
        self.f_c <= self.f_q * (1.0 + slack)
    }
}
