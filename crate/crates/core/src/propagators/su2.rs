//! Gauss decomposition U = exp(i f+ S+) exp(i f3 S3) exp(i f− S−) of SU(2)
//! propagators and the Riccati residual of f+ along a trajectory.

use std::io::Write;

use num_complex::Complex64;

use super::integrator::{TrajectoryPoint, TwoLevelPropagator};
use super::pulse::Mat2;
use crate::error::{Error, Result};
use crate::params::{PhysParams, K0, MASS};

pub const DEFAULT_SINGULAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SU2Coefficients {
    pub f_plus: Vec<Complex64>,
    pub f_3: Vec<Complex64>,
    pub f_minus: Vec<Complex64>,
}

/// (f+, f3, f−) of one matrix, or None when U_bb vanishes.
pub fn gauss_factors(u: &Mat2, tol: f64) -> Option<(Complex64, Complex64, Complex64)> {
    let ubb = u[1][1];
    if ubb.norm() <= tol {
        return None;
    }
    let i = Complex64::new(0.0, 1.0);
    let f_plus = -i * u[0][1] / ubb;
    let f_minus = -i * u[1][0] / ubb;
    let f_3 = 2.0 * i * ubb.ln();
    Some((f_plus, f_3, f_minus))
}

/// Product exp(i f+ S+) exp(i f3 S3) exp(i f− S−) with S3 = diag(½, −½).
pub fn reconstruct(f_plus: Complex64, f_3: Complex64, f_minus: Complex64) -> Mat2 {
    let i = Complex64::new(0.0, 1.0);
    let x = (0.5 * i * f_3).exp();
    let y = (-0.5 * i * f_3).exp();
    [[x - f_plus * f_minus * y, i * f_plus * y], [i * f_minus * y, y]]
}

pub fn su2_coefficients(prop: &TwoLevelPropagator, tol_singular: f64) -> Result<SU2Coefficients> {
    let n = prop.u.len();
    let mut out = SU2Coefficients {
        f_plus: Vec::with_capacity(n),
        f_3: Vec::with_capacity(n),
        f_minus: Vec::with_capacity(n),
    };
    for (index, u) in prop.u.iter().enumerate() {
        match gauss_factors(u, tol_singular) {
            Some((fp, f3, fm)) => {
                out.f_plus.push(fp);
                out.f_3.push(f3);
                out.f_minus.push(fm);
            }
            None => {
                return Err(Error::GaussSingular {
                    index,
                    magnitude: u[1][1].norm(),
                })
            }
        }
    }
    Ok(out)
}

/// Largest relative residual of f+' = −B+ − i B3 f+ − B+* f+² along a
/// uniformly sampled trajectory at momentum p, with f+' from an eighth-order
/// central difference. Points within four samples of a singular time
/// (|U_bb| ≤ tol) or of the ends are skipped. Returns (residual, points used).
pub fn riccati_residual(
    trajectory: &[TrajectoryPoint],
    params: &PhysParams,
    detuning: &dyn Fn(f64) -> f64,
    p: f64,
    tol_singular: f64,
) -> (f64, usize) {
    const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let n = trajectory.len();
    if n < 9 {
        return (f64::NAN, 0);
    }
    let dt = trajectory[1].time - trajectory[0].time;
    let f: Vec<Option<Complex64>> = trajectory
        .iter()
        .map(|pt| gauss_factors(&pt.u, tol_singular).map(|g| g.0))
        .collect();
    let b_plus = Complex64::from_polar(0.5 * params.omega_rabi, params.phi);
    let i = Complex64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    let mut used = 0;
    for k in 4..n - 4 {
        if (k - 4..=k + 4).any(|j| f[j].is_none()) {
            continue;
        }
        let mut d = Complex64::new(0.0, 0.0);
        for (m, w) in W.iter().enumerate() {
            d += (f[k + m + 1].unwrap() - f[k - m - 1].unwrap()) * *w;
        }
        d /= dt;
        let tau = trajectory[k].time;
        let b3 = -(K0 * p / MASS + K0 * params.g * tau + detuning(tau));
        let fp = f[k].unwrap();
        let rhs = -b_plus - i * b3 * fp - b_plus.conj() * fp * fp;
        let scale = b_plus.norm() + (b3 * fp).norm() + b_plus.norm() * fp.norm_sqr();
        worst = worst.max((d - rhs).norm() / scale);
        used += 1;
    }
    (worst, used)
}

/// Writes `time,p,f_plus_re,…` rows for a sampled trajectory. Singular
/// samples leave the Gauss columns empty; f3 is unwrapped along the path.
pub fn write_trajectory_csv<W: Write>(
    out: &mut W,
    trajectory: &[TrajectoryPoint],
    p: f64,
    tol_singular: f64,
) -> std::io::Result<()> {
    writeln!(
        out,
        "time,p,f_plus_re,f_plus_im,f3_re,f3_im,f_minus_re,f_minus_im,\
u_aa_re,u_aa_im,u_ab_re,u_ab_im,u_ba_re,u_ba_im,u_bb_re,u_bb_im"
    )?;
    let mut last_re: Option<f64> = None;
    for pt in trajectory {
        let gauss = gauss_factors(&pt.u, tol_singular);
        let cols = match gauss {
            Some((fp, f3, fm)) => {
                let mut re = f3.re;
                if let Some(prev) = last_re {
                    let period = 4.0 * std::f64::consts::PI;
                    re += period * ((prev - re) / period).round();
                }
                last_re = Some(re);
                format!("{},{},{},{},{},{}", fp.re, fp.im, re, f3.im, fm.re, fm.im)
            }
            None => ",,,,,".to_string(),
        };
        let u = pt.u;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            pt.time,
            p,
            cols,
            u[0][0].re,
            u[0][0].im,
            u[0][1].re,
            u[0][1].im,
            u[1][0].re,
            u[1][0].im,
            u[1][1].re,
            u[1][1].im
        )?;
    }
    Ok(())
}
