//! Dormand–Prince 5(4) with FSAL and a standard error-per-step controller.

use crate::error::Result;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (equal to the last row of A, which makes the scheme FSAL).
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; the sign follows the integration direction.
    pub h_init: f64,
    pub max_steps: usize,
    /// Steps below `h_min · max(1, |t|)` count as underflow.
    pub h_min: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_init: 1e-2,
            max_steps: 2_000_000,
            h_min: 1e-14,
        }
    }
}

/// Why an integration stopped.
#[derive(Clone, Debug, PartialEq)]
pub enum Stop {
    Completed,
    /// The observer asked to stop after an accepted step.
    Observer(String),
    /// The step size collapsed; `reason` carries the last right-hand-side failure if any.
    Underflow(String),
    MaxSteps,
}

pub struct Outcome<const K: usize> {
    pub t: f64,
    pub y: [f64; K],
    pub stop: Stop,
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrate y' = f(t, y) from t0 to t1 (either direction). `observe` sees every accepted
/// state including the initial one and may return `Some(reason)` to stop.
pub fn integrate<const K: usize>(
    f: &mut dyn FnMut(f64, &[f64; K]) -> Result<[f64; K]>,
    t0: f64,
    y0: [f64; K],
    t1: f64,
    ctl: &StepControl,
    observe: &mut dyn FnMut(f64, &[f64; K]) -> Option<String>,
) -> Result<Outcome<K>> {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut out = Outcome { t, y, stop: Stop::Completed, accepted: 0, rejected: 0 };
    if let Some(reason) = observe(t, &y) {
        out.stop = Stop::Observer(reason);
        return Ok(out);
    }
    let mut k1 = f(t, &y)?;
    let mut h = dir * ctl.h_init.abs().min((t1 - t0).abs().max(f64::MIN_POSITIVE));
    let mut last_failure = String::new();
    let mut steps = 0usize;
    while dir * (t1 - t) > 0.0 {
        if steps >= ctl.max_steps {
            out.stop = Stop::MaxSteps;
            break;
        }
        steps += 1;
        if dir * (t + h - t1) > 0.0 {
            h = t1 - t;
        }
        if h.abs() < ctl.h_min * t.abs().max(1.0) && dir * (t1 - t) > h.abs() {
            out.stop = Stop::Underflow(if last_failure.is_empty() {
                "step size underflow".into()
            } else {
                last_failure.clone()
            });
            break;
        }
        let mut k = [[0.0; K]; 7];
        k[0] = k1;
        let mut failed = None;
        for s in 1..7 {
            let mut yt = y;
            for (i, v) in yt.iter_mut().enumerate() {
                for j in 0..s {
                    *v += h * A[s][j] * k[j][i];
                }
            }
            match f(t + C[s] * h, &yt) {
                Ok(v) if v.iter().all(|x| x.is_finite()) => k[s] = v,
                Ok(_) => {
                    failed = Some("non-finite right-hand side".to_string());
                    break;
                }
                Err(e) => {
                    failed = Some(e.to_string());
                    break;
                }
            }
        }
        if let Some(reason) = failed {
            last_failure = reason;
            out.rejected += 1;
            h *= 0.25;
            continue;
        }
        let mut yn = y;
        let mut err: f64 = 0.0;
        for i in 0..K {
            let mut e = 0.0;
            for s in 0..7 {
                yn[i] += h * B[s] * k[s][i];
                e += h * E[s] * k[s][i];
            }
            let sc = ctl.atol + ctl.rtol * y[i].abs().max(yn[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            out.rejected += 1;
            h *= 0.25;
            continue;
        }
        let fac = (0.9 * err.max(1e-16).powf(-0.2)).clamp(0.2, 5.0);
        if err <= 1.0 {
            t += h;
            y = yn;
            k1 = k[6];
            out.accepted += 1;
            last_failure.clear();
            if let Some(reason) = observe(t, &y) {
                out.stop = Stop::Observer(reason);
                break;
            }
            h *= fac;
        } else {
            out.rejected += 1;
            h *= fac.min(1.0);
        }
    }
    out.t = t;
    out.y = y;
    Ok(out)
}
