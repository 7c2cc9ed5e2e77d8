//! Dormand–Prince 5(4) embedded Runge–Kutta pair with adaptive steps.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    /// Absolute tolerance per component.
    pub atol: f64,
    pub dt_max: f64,
    /// Step size below which a rejected step aborts the integration.
    pub dt_min: f64,
    pub dt_init: f64,
}

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
// fifth-order weights are the last row of A (FSAL); these are b5 − b4
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrates `dy/dt = f(t, y)` from `t0` to `t_end`, calling `observe`
/// with (t, y, dy/dt) at the start and after every accepted step. Returns
/// the number of accepted steps.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<usize>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(f64, &[f64; N], &[f64; N]),
{
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y)?;
    observe(t, &y, &k[0]);
    let mut h = opts.dt_init.min(opts.dt_max).min(t_end - t0);
    let mut accepted = 0;
    while t < t_end {
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                *yi += h * acc;
            }
            k[s] = f(t + C[s] * h, &ys)?;
        }
        let mut y_new = y;
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut acc = 0.0;
            let mut e = 0.0;
            for s in 0..7 {
                acc += A[6].get(s).copied().unwrap_or(0.0) * k[s][i];
                e += E[s] * k[s][i];
            }
            y_new[i] = y[i] + h * acc;
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            let r = (h * e).abs() / scale;
            // keep a NaN once seen; f64::max would drop it
            if r.is_nan() || r > err {
                err = r;
            }
        }
        if !err.is_finite() {
            return Err(Error::StepCollapse {
                t,
                dt_min: opts.dt_min,
            });
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k[0] = k[6];
            accepted += 1;
            observe(t, &y, &k[0]);
            h = (h * factor).min(opts.dt_max);
        } else {
            if h <= opts.dt_min {
                return Err(Error::StepCollapse {
                    t,
                    dt_min: opts.dt_min,
                });
            }
            h = (h * factor).max(opts.dt_min);
        }
    }
    Ok(accepted)
}
