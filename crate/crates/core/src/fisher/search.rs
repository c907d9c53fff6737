use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::golden_section;

pub const MIN_COARSE: usize = 64;
pub const THETA_XTOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSearch {
    pub theta: f64,
    pub value: f64,
    pub coarse_theta: Vec<f64>,
    pub coarse_value: Vec<f64>,
}

/// Coarse midpoint grid of `n` angles over (lo, hi).
pub fn coarse_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * step).collect()
}

/// Global maximum of `evaluator` over the open range (lo, hi): scan
/// `coarse_n` midpoints, then golden-section refinement to 1e-5 rad inside
/// the bracket around the best scan point. Ties go to the smaller angle.
pub fn find_theta_max(
    evaluator: impl Fn(f64) -> Result<f64>,
    range: (f64, f64),
    coarse_n: usize,
) -> Result<ThetaSearch> {
    let (lo, hi) = range;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty angle range ({lo}, {hi})")));
    }
    if coarse_n < MIN_COARSE {
        return Err(Error::InvalidArgument(format!(
            "coarse scan needs at least {MIN_COARSE} points, got {coarse_n}"
        )));
    }
    let thetas = coarse_grid(lo, hi, coarse_n);
    let values = thetas.iter().map(|&t| evaluator(t)).collect::<Result<Vec<f64>>>()?;
    refine(evaluator, range, thetas, values)
}

/// Refinement step of [`find_theta_max`] for an already evaluated scan.
pub fn refine(
    evaluator: impl Fn(f64) -> Result<f64>,
    range: (f64, f64),
    thetas: Vec<f64>,
    values: Vec<f64>,
) -> Result<ThetaSearch> {
    let (lo, hi) = range;
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let max = values[best];
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max - min > 1e-12 * max.abs().max(min.abs())) {
        return Err(Error::FlatObjective);
    }
    let left = if best == 0 { lo + 0.5 * (thetas[0] - lo) } else { thetas[best - 1] };
    let right = if best + 1 == thetas.len() {
        hi - 0.5 * (hi - thetas[best])
    } else {
        thetas[best + 1]
    };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let (x, fx) = golden_section(
        |th| match evaluator(th) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        left,
        right,
        THETA_XTOL,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let (theta, value) = if fx >= max { (x, fx) } else { (thetas[best], max) };
    Ok(ThetaSearch {
        theta,
        value,
        coarse_theta: thetas,
        coarse_value: values,
    })
}
