//! Independent oracles and the configuration-level self-check suite.
//!
//! The oracles here share no code with the implementations they check:
//! the wavefield is compared against direct quadrature of the free-particle
//! kernels, K₀/K₁ against the trapezoidal rule on their integral
//! representation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::constants;
use crate::copenhagen::{radiation_bound, CopenhagenParams};
use crate::dynamics::{integrate_trajectory_with, sample_initial_positions, Trajectory, TrajectoryOptions};
use crate::error::Result;
use crate::exec::{map_range, Execution};
use crate::qpotential::{canyon, canyon_at_time, locate_canyon_floor};
use crate::quad;
use crate::radiation::{
    beta_max, closed_spectral_energy, crossing_energy_closed, crossing_energy_quadrature, numeric_spectral_energy,
    spectral_energy, spectrum_argmax, spectrum_closed, spectrum_numeric, TimeMap, PEAK_ARGUMENT,
};
use crate::specfun::{bessel_k0, bessel_k1};
use crate::wavefield::{continuity_residual, default_continuity_steps, ExperimentConfig, FieldSlice, Slit};

/// K_ν(x) = ∫₀^∞ e^{−x cosh u} cosh(νu) du by the trapezoidal rule. The
/// integrand is entire and decays double-exponentially, so the sum
/// converges geometrically in the step.
pub fn bessel_integral_oracle(nu: f64, x: f64) -> f64 {
    let h = 0.05;
    let u_max = (800.0 / x).acosh().max(1.0);
    let n = (u_max / h).ceil() as usize;
    let mut sum = 0.5 * (-x).exp();
    for j in 1..=n {
        let u = j as f64 * h;
        sum += (-x * u.cosh()).exp() * (nu * u).cosh();
    }
    sum * h
}

/// Largest relative error of K₀ and K₁ against the integral oracle on `n`
/// log-spaced points over [1e-6, 50].
pub fn bessel_max_error(n: usize) -> Result<(f64, f64)> {
    let mut worst = (0.0f64, 0.0f64);
    for i in 0..n {
        let x = 1e-6 * (50.0f64 / 1e-6).powf(i as f64 / (n - 1) as f64);
        let k0 = bessel_k0(x)?.value;
        let k1 = bessel_k1(x)?.value;
        worst.0 = worst.0.max(((k0 - bessel_integral_oracle(0.0, x)) / k0).abs());
        worst.1 = worst.1.max(((k1 - bessel_integral_oracle(1.0, x)) / k1).abs());
    }
    Ok(worst)
}

/// Largest |K₁ + dK₀/dx| by central differences at the given points.
pub fn bessel_derivative_residual(xs: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &x in xs {
        let h = 1e-5 * x.max(0.1);
        let d = (bessel_k0(x + h)?.value - bessel_k0(x - h)?.value) / (2.0 * h);
        worst = worst.max((bessel_k1(x)?.value + d).abs());
    }
    Ok(worst)
}

/// One slit's amplitude (without the slit-independent x-phase) by direct
/// quadrature of source kernel × Gaussian transparency × slit-to-point
/// kernel.
pub fn propagator_oracle(cfg: &ExperimentConfig, slit: Slit, x: f64, y: f64) -> Result<Complex64> {
    let k = constants();
    let kappa = k.m_e / k.hbar;
    let t = cfg.time_at(x);
    let big_t = cfg.source_time;
    let center = slit.sign() * cfg.a;
    let kernel = |tau: f64, d: f64| {
        (Complex64::new(0.0, -kappa / (2.0 * PI * tau))).sqrt() * Complex64::from_polar(1.0, kappa * d * d / (2.0 * tau))
    };
    let integrand = |y0: f64| {
        let g = (-(y0 - center).powi(2) / (2.0 * cfg.b * cfg.b)).exp();
        kernel(t, y - y0) * g * kernel(big_t, y0)
    };
    let lo = center - 12.0 * cfg.b;
    let hi = center + 12.0 * cfg.b;
    // absolute tolerance on the scale of ∫|integrand|, so a part that
    // cancels to near zero does not stall the adaptive loop
    let scale = quad::integrate(|s| integrand(s).norm(), lo, hi, 0.0, 1e-8)?.value;
    let tol = 1e-12 * scale;
    let re = quad::integrate(|s| integrand(s).re, lo, hi, tol, 1e-13)?;
    let im = quad::integrate(|s| integrand(s).im, lo, hi, tol, 1e-13)?;
    Ok(Complex64::new(re.value, im.value))
}

/// A closed-form-vs-oracle comparison at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldProbe {
    pub x: f64,
    pub y: f64,
    pub slit: Slit,
    pub rel_error: f64,
}

/// Relative error of the closed-form slit amplitude against
/// [`propagator_oracle`] at each probe.
pub fn field_oracle(cfg: &ExperimentConfig, probes: &[(f64, f64, Slit)]) -> Result<Vec<FieldProbe>> {
    probes
        .iter()
        .map(|&(x, y, slit)| {
            let closed = FieldSlice::new(cfg, cfg.time_at(x)).slit(slit, y).0;
            let oracle = propagator_oracle(cfg, slit, x, y)?;
            Ok(FieldProbe {
                x,
                y,
                slit,
                rel_error: (closed - oracle).norm() / oracle.norm(),
            })
        })
        .collect()
}

/// Ten probes inside the beams: at 10%, 50% and 100% of the screen
/// distance, on and half a beam width beside each beam centre.
pub fn default_field_probes(cfg: &ExperimentConfig) -> Vec<(f64, f64, Slit)> {
    let mut out = Vec::new();
    for f in [0.1, 0.5, 1.0] {
        let x = f * cfg.screen_x;
        let (c, s) = FieldSlice::new(cfg, cfg.time_at(x)).beam_moments();
        for (slit, dy) in [(Slit::A, 0.0), (Slit::B, 0.5 * s), (Slit::A, -0.5 * s)] {
            out.push((x, slit.sign() * c + dy, slit));
        }
    }
    let x = 0.5 * cfg.screen_x;
    out.push((x, 0.0, Slit::B));
    out
}

/// Observed convergence order of the continuity residual at (x, y): the
/// smaller of the two successive halving ratios, with the finest residual.
pub fn continuity_order(cfg: &ExperimentConfig, x: f64, y: f64) -> Result<(f64, f64)> {
    let (ht, hy) = default_continuity_steps(cfg, x);
    let r1 = continuity_residual(cfg, x, y, 4.0 * ht, 4.0 * hy)?;
    let r2 = continuity_residual(cfg, x, y, 2.0 * ht, 2.0 * hy)?;
    let r3 = continuity_residual(cfg, x, y, ht, hy)?;
    Ok(((r1 / r2).log2().min((r2 / r3).log2()), r3))
}

/// Number of adjacent trajectory pairs (sorted by launch height) whose order
/// is violated at any of `n_times` common times.
pub fn ordering_violations(trajectories: &[Trajectory], n_times: usize) -> usize {
    let t_end = trajectories
        .iter()
        .map(|t| t.landing().t)
        .fold(f64::INFINITY, f64::min);
    let t0 = trajectories
        .iter()
        .map(|t| t.samples[0].t)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut violations = 0;
    for k in 1..=n_times {
        let t = t0 + (t_end - t0) * k as f64 / n_times as f64;
        let ys: Vec<Option<f64>> = trajectories.iter().map(|tr| tr.y_at(t)).collect();
        violations += ys
            .windows(2)
            .filter(|w| match (w[0], w[1]) {
                (Some(a), Some(b)) => a > b,
                _ => true,
            })
            .count();
    }
    violations
}

/// Integrates `n` seeded trajectories and sorts them by launch height.
pub fn sorted_trajectories(
    cfg: &ExperimentConfig,
    n: usize,
    seed: u64,
    opts: &TrajectoryOptions,
    mode: Execution,
) -> Result<Vec<Trajectory>> {
    let mut y0 = sample_initial_positions(cfg, n, seed);
    y0.sort_by(f64::total_cmp);
    map_range(mode, n, |i| integrate_trajectory_with(cfg, y0[i], opts))
        .into_iter()
        .collect()
}

/// Outcome of one self-check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    /// `module.check`.
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, r: Result<(f64, f64, bool)>, what: &str) -> Check {
    match r {
        Ok((value, limit, pass)) => Check {
            name,
            value,
            limit,
            pass,
            detail: what.to_string(),
        },
        Err(e) => Check {
            name,
            value: f64::NAN,
            limit: f64::NAN,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn at_most(value: f64, limit: f64) -> (f64, f64, bool) {
    (value, limit, value <= limit)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Oracle and invariant checks that must hold for any valid configuration.
pub fn run_suite(cfg: &ExperimentConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let screen = cfg.screen_x;

    out.push(check(
        "wavefield.propagator_oracle",
        field_oracle(cfg, &default_field_probes(cfg))
            .map(|p| at_most(p.iter().map(|p| p.rel_error).fold(0.0, f64::max), 1e-6)),
        "max relative error of the closed form against kernel quadrature",
    ));
    out.push(check(
        "wavefield.continuity_order",
        (|| {
            let x = screen;
            let f = cfg.fringe_spacing(x);
            let mut order = f64::INFINITY;
            for y in [0.0, f, -2.0 * f] {
                order = order.min(continuity_order(cfg, x, y)?.0);
            }
            Ok((order, 1.9, order >= 1.9))
        })(),
        "smallest observed order of the continuity residual under step halving",
    ));
    out.push(check(
        "specfun.accuracy",
        bessel_max_error(200).map(|(e0, e1)| at_most(e0.max(e1), 1e-10)),
        "max relative error of K0, K1 against the integral oracle on [1e-6, 50]",
    ));
    out.push(check(
        "specfun.derivative_identity",
        bessel_derivative_residual(&[0.05, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0]).map(|r| at_most(r, 1e-6)),
        "max |K1 + dK0/dx| by central differences",
    ));
    out.push(check(
        "qpotential.canyon_floors",
        (|| {
            let spacing = cfg.fringe_spacing(screen);
            let mut worst = 0.0f64;
            for n in [-3, -2, -1, 1, 2, 3] {
                let f = locate_canyon_floor(cfg, n, screen)?;
                worst = worst.max((f.y - f.predicted_y).abs() / spacing);
            }
            Ok(at_most(worst, 0.1))
        })(),
        "largest exact-Q floor offset from theta_n x, in fringe spacings",
    ));
    out.push(check(
        "dynamics.no_crossing",
        (|| {
            let opts = TrajectoryOptions {
                dt_min_fraction: 1e-9,
                ..TrajectoryOptions::default()
            };
            let trs = sorted_trajectories(cfg, 32, 1, &opts, Execution::Parallel)?;
            let v = ordering_violations(&trs, 100) as f64;
            Ok((v, 0.0, v == 0.0))
        })(),
        "ordering violations among 32 trajectories at 100 common times",
    ));

    let c1 = canyon(cfg, 1, screen);
    out.push(check(
        "radiation.energy_oracle",
        c1.clone()
            .and_then(|c| Ok(at_most(rel(crossing_energy_quadrature(&c)?, crossing_energy_closed(&c)), 1e-3))),
        "relative difference of quadrature and closed-form crossing energy",
    ));
    out.push(check(
        "radiation.sinh_spectrum",
        c1.clone().and_then(|c| {
            let mut worst = 0.0f64;
            for i in 0..12 {
                let w = (0.1 + 2.9 * i as f64 / 11.0) / c.tau_n;
                let num = spectrum_numeric(&c, w, TimeMap::Sinh)?.de_domega;
                worst = worst.max(rel(num, spectrum_closed(&c, w)?.de_domega));
            }
            Ok(at_most(worst, 1e-3))
        }),
        "numeric Fourier (sinh map) vs closed-form spectrum on [0.1, 3]/tau",
    ));
    out.push(check(
        "radiation.spectral_energy",
        c1.clone()
            .and_then(|c| Ok(at_most(rel(closed_spectral_energy(&c, 50.0)?, spectral_energy(&c)), 1e-4))),
        "integral of the closed-form spectrum vs its analytic energy",
    ));
    out.push(check(
        "radiation.parseval",
        c1.clone().and_then(|c| {
            let r = numeric_spectral_energy(&c, TimeMap::Exact)? / crossing_energy_quadrature(&c)?;
            Ok(((r - 0.5).abs(), 1e-3, (r - 0.5).abs() <= 1e-3))
        }),
        "|E(exact-map spectrum)/E(Larmor) - 1/2|",
    ));
    out.push(check(
        "radiation.hbar_cubed",
        c1.clone().and_then(|c| {
            let scaled = canyon_at_time(cfg, 1, c.t, &constants().with_scaled_hbar(2.0))?;
            let r = crossing_energy_quadrature(&scaled)? / crossing_energy_quadrature(&c)?;
            Ok(at_most(rel(r, 8.0), 1e-10))
        }),
        "relative deviation of E(2 hbar)/E(hbar) from 8",
    ));
    out.push(check(
        "radiation.peak_root",
        c1.clone()
            .and_then(|c| Ok(at_most((spectrum_argmax(&c)? - PEAK_ARGUMENT).abs(), 1e-6))),
        "argmax of the closed-form spectrum vs the root of K0 = x K1",
    ));
    out.push(check(
        "radiation.dipole_regime",
        c1.map(|c| {
            let b = beta_max(&c);
            (b, 0.01, b < 0.01)
        }),
        "peak transverse speed over c",
    ));
    out.push(check(
        "copenhagen.bound",
        (|| {
            let p = CopenhagenParams::minimal(cfg);
            let e = radiation_bound(cfg, &p)?;
            let wider = ExperimentConfig { a: 2.0 * cfg.a, ..*cfg };
            let r = radiation_bound(&wider, &p)? / e;
            Ok((rel(r, 0.25), 1e-12, e > 0.0 && rel(r, 0.25) <= 1e-12))
        })(),
        "bound positive and scaling as 1/a^2",
    ));
    out
}
