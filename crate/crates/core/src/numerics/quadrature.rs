use serde::{Deserialize, Serialize};

use super::sum::CompensatedSum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub points_used: usize,
}

/// Composite Simpson rule with compensated accumulation.
///
/// An even sample count closes the last three intervals with the 3/8 rule.
/// The error estimate is the Richardson difference against the same rule on
/// every other sample (over the largest odd-length prefix), plus a rounding
/// floor proportional to the integral of |f|.
pub fn simpson_integrate(samples: &[f64], dx: f64) -> Result<QuadratureResult> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::TooFewSamples(n));
    }
    let value = simpson_value(samples, dx);
    let abs_scale = dx * samples.iter().map(|v| v.abs()).sum::<f64>();
    let odd = if n % 2 == 1 { n } else { n - 1 };
    let diff = if odd >= 5 {
        let fine = simpson_value(&samples[..odd], dx);
        let coarse_samples: Vec<f64> = samples[..odd].iter().step_by(2).copied().collect();
        let coarse = simpson_value(&coarse_samples, 2.0 * dx);
        (fine - coarse).abs() / 15.0
    } else if odd >= 3 {
        let fine = simpson_value(&samples[..odd], dx);
        let trap = trapezoid_value(&samples[..odd], dx);
        (fine - trap).abs()
    } else {
        0.0
    };
    Ok(QuadratureResult {
        value,
        error_estimate: diff + 16.0 * f64::EPSILON * abs_scale,
        points_used: n,
    })
}

fn simpson_value(samples: &[f64], dx: f64) -> f64 {
    let n = samples.len();
    let mut acc = CompensatedSum::new();
    let simpson_end = if n % 2 == 1 { n } else { n - 3 };
    if simpson_end >= 3 {
        acc.add(samples[0]);
        acc.add(samples[simpson_end - 1]);
        for (i, &v) in samples.iter().enumerate().take(simpson_end - 1).skip(1) {
            acc.add(if i % 2 == 1 { 4.0 * v } else { 2.0 * v });
        }
    }
    let mut total = acc.value() * dx / 3.0;
    if n % 2 == 0 {
        let s = &samples[n - 4..];
        let mut tail = CompensatedSum::new();
        tail.extend([s[0], 3.0 * s[1], 3.0 * s[2], s[3]]);
        total += tail.value() * 3.0 * dx / 8.0;
    }
    total
}

fn trapezoid_value(samples: &[f64], dx: f64) -> f64 {
    let n = samples.len();
    let mut acc = CompensatedSum::new();
    acc.add(0.5 * samples[0]);
    acc.add(0.5 * samples[n - 1]);
    for &v in &samples[1..n - 1] {
        acc.add(v);
    }
    acc.value() * dx
}

/// Composite trapezoid rule, kept as an independent cross-check.
pub fn trapezoid_integrate(samples: &[f64], dx: f64) -> Result<QuadratureResult> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::TooFewSamples(n));
    }
    let value = trapezoid_value(samples, dx);
    let odd = if n % 2 == 1 { n } else { n - 1 };
    let fine = trapezoid_value(&samples[..odd], dx);
    let coarse_samples: Vec<f64> = samples[..odd].iter().step_by(2).copied().collect();
    let coarse = if coarse_samples.len() >= 2 {
        let m = coarse_samples.len();
        let mut acc = CompensatedSum::new();
        acc.add(0.5 * coarse_samples[0]);
        acc.add(0.5 * coarse_samples[m - 1]);
        for &v in &coarse_samples[1..m - 1] {
            acc.add(v);
        }
        acc.value() * 2.0 * dx
    } else {
        fine
    };
    Ok(QuadratureResult {
        value,
        error_estimate: (fine - coarse).abs() / 3.0,
        points_used: n,
    })
}
