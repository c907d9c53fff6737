use crate::error::{Error, Result};

pub const MAX_HALVINGS: usize = 12;

/// Neville table for a sequence of estimates taken at steps h, h/2, h/4, …
/// whose error expands in even powers of h.
#[derive(Debug, Clone, Default)]
pub struct RichardsonTable {
    rows: Vec<Vec<f64>>,
}

impl RichardsonTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the estimate for the next (halved) step and returns the new
    /// diagonal entry together with its distance from the previous diagonal.
    pub fn push(&mut self, value: f64) -> (f64, f64) {
        let mut row = Vec::with_capacity(self.rows.len() + 1);
        row.push(value);
        if let Some(prev) = self.rows.last() {
            let mut factor = 1.0;
            for j in 1..=prev.len() {
                factor *= 4.0;
                let r = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
                row.push(r);
            }
        }
        let est = *row.last().unwrap();
        let spread = match self.rows.last() {
            Some(prev) => (est - prev.last().unwrap()).abs(),
            None => f64::INFINITY,
        };
        self.rows.push(row);
        (est, spread)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Central difference f'(x0) with Richardson extrapolation over h0, h0/2, …
///
/// Stops when successive diagonal estimates agree to `rtol` (relative, with an
/// absolute floor of `rtol` when the derivative is near zero) and returns that
/// estimate with the spread. When f carries noise of size η the spread is
/// dominated by η/h and never reports agreement tighter than the noise allows.
pub fn central_diff_richardson(
    f: impl Fn(f64) -> f64,
    x0: f64,
    h0: f64,
    rtol: f64,
) -> Result<(f64, f64)> {
    if !(h0 > 0.0 && rtol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step {h0} and tolerance {rtol} must be positive"
        )));
    }
    let mut table = RichardsonTable::new();
    let mut h = h0;
    let mut best = (f64::NAN, f64::INFINITY);
    for _ in 0..=MAX_HALVINGS {
        let d = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
        let (est, spread) = table.push(d);
        if spread < best.1 {
            best = (est, spread);
        }
        if spread <= rtol * est.abs().max(1.0) {
            return Ok((est, spread));
        }
        h *= 0.5;
    }
    Err(Error::NoConvergence {
        what: "central difference".into(),
        estimate: best.0,
        spread: best.1,
    })
}
