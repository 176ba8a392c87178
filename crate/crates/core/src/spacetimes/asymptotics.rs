use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::RadialProfile;
use crate::error::{GeomError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Ok,
    /// Residuals are not monotone in r; no exponent is claimed.
    FitUnreliable,
    /// N − 1 vanishes to machine precision on every sample.
    Floor,
}

/// Numeric decay of N towards 1 on a set of sample radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub status: FitStatus,
    pub m_hat: f64,
    /// Log–log slope of |N − 1|.
    pub exponent_lapse: Option<f64>,
    /// Log–log slope of |N − (1 − m̂/r)|.
    pub exponent_remainder: Option<f64>,
    /// Power p of the fitted correction `c r^{-p}`.
    pub model_power: Option<f64>,
    /// Remainder decays strictly slower than r⁻².
    pub slower_than_schwarzschild: Option<bool>,
}

const FLOOR: f64 = 1e-14;

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn monotone_decay(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1].abs() < w[0].abs()) && {
        let s = v[0].signum();
        v.iter().all(|x| x.signum() == s)
    }
}

/// Weighted least squares of r(N − 1) on {−1, r^{1−p}, r^{−p}, r^{−1−p}}; returns (m̂, residual²).
fn project(r: &[f64], y: &[f64], p: f64) -> (f64, f64) {
    let n = r.len();
    let a = DMatrix::from_fn(n, 4, |i, j| {
        let ri = r[i];
        match j {
            0 => -1.0,
            k => ri.powf(1.0 - p - (k - 1) as f64),
        }
    });
    let b = DVector::from_fn(n, |i, _| r[i] * y[i]);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-13).unwrap_or_else(|_| DVector::zeros(4));
    let res = (&a * &x - &b).norm_squared();
    (x[0], res)
}

/// Fit the large-r decay of the lapse.
pub fn asymptotics_fit(profile: &RadialProfile, r_samples: &[f64]) -> Result<AsymptoticReport> {
    if r_samples.len() < 8 {
        return Err(GeomError::Rejected("asymptotics fit needs at least 8 radii".into()));
    }
    if r_samples.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GeomError::Rejected("sample radii must be increasing".into()));
    }
    if r_samples[r_samples.len() - 1] < 100.0 * r_samples[0] {
        return Err(GeomError::Rejected("sample radii must span two decades".into()));
    }
    let mut y = Vec::with_capacity(r_samples.len());
    for &r in r_samples {
        profile.check(r)?;
        y.push(profile.lapse(r) - 1.0);
    }
    if y.iter().all(|v| v.abs() < FLOOR) {
        return Ok(AsymptoticReport {
            status: FitStatus::Floor,
            m_hat: 0.0,
            exponent_lapse: None,
            exponent_remainder: None,
            model_power: None,
            slower_than_schwarzschild: None,
        });
    }
    let lr: Vec<f64> = r_samples.iter().map(|r| r.ln()).collect();
    let unreliable = |m_hat| AsymptoticReport {
        status: FitStatus::FitUnreliable,
        m_hat,
        exponent_lapse: None,
        exponent_remainder: None,
        model_power: None,
        slower_than_schwarzschild: None,
    };
    if !monotone_decay(&y) {
        return Ok(unreliable(f64::NAN));
    }
    let exponent_lapse = slope(&lr, &y.iter().map(|v| v.abs().ln()).collect::<Vec<_>>());

    // Variable projection over the correction power p.
    let (lo, hi) = (1.2, 4.0);
    let grid: Vec<f64> = (0..=56).map(|k| lo + (hi - lo) * k as f64 / 56.0).collect();
    let best = grid
        .iter()
        .enumerate()
        .min_by(|a, b| project(r_samples, &y, *a.1).1.total_cmp(&project(r_samples, &y, *b.1).1))
        .map(|(i, _)| i)
        .unwrap();
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (project(r_samples, &y, c).1, project(r_samples, &y, d).1);
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = project(r_samples, &y, c).1;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = project(r_samples, &y, d).1;
        }
    }
    let p = 0.5 * (a + b);
    let (m_hat, _) = project(r_samples, &y, p);

    let rem: Vec<f64> = r_samples
        .iter()
        .zip(&y)
        .map(|(r, v)| v + m_hat / r)
        .collect();
    if rem.iter().all(|v| v.abs() < FLOOR) {
        return Ok(AsymptoticReport {
            status: FitStatus::Ok,
            m_hat,
            exponent_lapse: Some(exponent_lapse),
            exponent_remainder: None,
            model_power: Some(p),
            slower_than_schwarzschild: Some(false),
        });
    }
    if !monotone_decay(&rem) {
        return Ok(unreliable(m_hat));
    }
    let exponent_remainder = slope(&lr, &rem.iter().map(|v| v.abs().ln()).collect::<Vec<_>>());
    Ok(AsymptoticReport {
        status: FitStatus::Ok,
        m_hat,
        exponent_lapse: Some(exponent_lapse),
        exponent_remainder: Some(exponent_remainder),
        model_power: Some(p),
        slower_than_schwarzschild: Some(exponent_remainder > -1.95),
    })
}
