//! Modified Bessel functions of the second kind, K₀ and K₁, for real x > 0.
//!
//! Two regimes: for x ≤ 2 the logarithmic power series built on I₀/I₁;
//! above that Steed's continued fraction for K₀ and the ratio K₁/K₀.
//! Both are accurate to a few ulp; the crossover is continuous to rounding.

// Tabulated coefficients are kept as published.
#![allow(clippy::excessive_precision)]

use thiserror::Error;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;
const SERIES_LIMIT: f64 = 2.0;
const UNDERFLOW_ARG: f64 = 700.0;
const MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecFunError {
    #[error("Bessel K argument must be positive, got {0}")]
    Domain(f64),
    #[error("Bessel K({0}) underflows to zero")]
    Underflow(f64),
}

/// A function value with its estimated relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub x: f64,
    pub value: f64,
    pub est_error: f64,
}

fn check(x: f64) -> Result<(), SpecFunError> {
    if !(x > 0.0) {
        return Err(SpecFunError::Domain(x));
    }
    if x > UNDERFLOW_ARG {
        return Err(SpecFunError::Underflow(x));
    }
    Ok(())
}

/// K₀(x).
pub fn bessel_k0(x: f64) -> Result<BesselEval, SpecFunError> {
    check(x)?;
    let (k0, _) = k0_k1(x);
    Ok(BesselEval {
        x,
        value: k0,
        est_error: error_estimate(x),
    })
}

/// K₁(x).
pub fn bessel_k1(x: f64) -> Result<BesselEval, SpecFunError> {
    check(x)?;
    let (_, k1) = k0_k1(x);
    Ok(BesselEval {
        x,
        value: k1,
        est_error: error_estimate(x),
    })
}

fn error_estimate(x: f64) -> f64 {
    // series: bounded by the log term's cancellation near x ≈ 1.1 where K₀
    // is smallest relative to its pieces; CF: accumulated rounding.
    if x <= SERIES_LIMIT {
        8.0 * f64::EPSILON
    } else {
        16.0 * f64::EPSILON
    }
}

/// (K₀(x), K₁(x)) without argument checks. Callers must ensure 0 < x ≤ 700.
pub(crate) fn k0_k1(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        series(x)
    } else {
        continued_fraction(x)
    }
}

#[cfg(test)]
fn k0_unchecked(x: f64) -> f64 {
    k0_k1(x).0
}

fn series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let log_term = (0.5 * x).ln();

    // k-th terms: t0 = q^k/(k!)², t1 = q^k/(k!(k+1)!)
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut harmonic = 0.0; // H_k
    let mut i0 = 1.0;
    let mut i1_sum = 1.0;
    let mut k0_sum = 0.0; // Σ H_k t0
    let mut k1_sum = 1.0 - 2.0 * EULER_GAMMA; // Σ (ψ(k+1)+ψ(k+2)) t1, k = 0 term
    for k in 1..MAX_ITER {
        let kf = k as f64;
        harmonic += 1.0 / kf;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        i0 += t0;
        i1_sum += t1;
        k0_sum += harmonic * t0;
        let psi_sum = 2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA;
        k1_sum += psi_sum * t1;
        if t0 < f64::EPSILON * 1e-3 * i0 && t1 < f64::EPSILON * 1e-3 * i1_sum {
            break;
        }
    }
    let i1 = 0.5 * x * i1_sum;
    let k0 = -(log_term + EULER_GAMMA) * i0 + k0_sum;
    let k1 = 1.0 / x + log_term * i1 - 0.25 * x * k1_sum;
    (k0, k1)
}

// Steed's algorithm (CF2) for ν = 0: K₀ = √(π/2x)·e⁻ˣ / s, and
// K₁ = K₀·(x + 1/2 − h)/x with h the continued-fraction value.
fn continued_fraction(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON * 0.5 {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}
