//! The Copenhagen-side estimate: Born-approximation double-slit scattering
//! shape and the Bloch–Nordsieck radiated-energy bound.

use std::f64::consts::PI;

use crate::constants::constants;
use crate::error::{Error, Result};
use crate::qpotential::canyon;
use crate::radiation::crossing_energy_closed;
use crate::wavefield::ExperimentConfig;

/// Minimal admissible barrier thickness in units of λ̄_c.
pub const MIN_THICKNESS: f64 = 10.0;

/// Slit-wall parameters entering the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopenhagenParams {
    /// Barrier height, erg.
    pub v0: f64,
    /// Barrier thickness Δx, cm.
    pub barrier_thickness: f64,
    /// Transit time Δx/v_x, s.
    pub delta_t: f64,
    /// v_x/c.
    pub beta: f64,
}

impl CopenhagenParams {
    /// V₀ = mc², Δx = 10 λ̄_c, Δt = Δx/v_x.
    pub fn minimal(cfg: &ExperimentConfig) -> Self {
        let k = constants();
        let dx = MIN_THICKNESS * k.lambdabar_c;
        CopenhagenParams {
            v0: k.rest_energy(),
            barrier_thickness: dx,
            delta_t: dx / cfg.vx,
            beta: cfg.vx / k.c_light,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = constants();
        let slack = 1.0 - 1e-12;
        if !(self.v0 >= k.rest_energy() * slack) {
            return Err(Error::InvalidConfig(format!("barrier height V0 = {:e} erg is below mc²", self.v0)));
        }
        if !(self.barrier_thickness >= MIN_THICKNESS * k.lambdabar_c * slack) {
            return Err(Error::InvalidConfig(format!(
                "barrier thickness {:e} cm is below 10 reduced Compton wavelengths",
                self.barrier_thickness
            )));
        }
        if !(self.delta_t > 0.0) {
            return Err(Error::InvalidConfig(format!("transit time {:e} s must be positive", self.delta_t)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidConfig(format!("beta = {} must lie in (0, 1)", self.beta)));
        }
        Ok(())
    }
}

/// Unnormalized Born-approximation dω/dθ ∝ cos²(qa/ħ)·sin²(qb/ħ)/q².
pub fn scattering_shape(cfg: &ExperimentConfig, q: f64) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Domain {
            what: "momentum transfer q",
            value: q,
        });
    }
    let hbar = constants().hbar;
    let c = (q * cfg.a / hbar).cos();
    let s = (q * cfg.b / hbar).sin();
    Ok(c * c * s * s / (q * q))
}

/// First maximum of the scattering shape away from q = 0, between the
/// first two zeros of the cos² factor, by golden-section search.
pub fn first_maximum(cfg: &ExperimentConfig) -> Result<f64> {
    let unit = constants().hbar / cfg.a;
    let (mut lo, mut hi) = (0.5 * PI * unit, 1.5 * PI * unit);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (scattering_shape(cfg, x1)?, scattering_shape(cfg, x2)?);
    while hi - lo > 1e-12 * unit {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = scattering_shape(cfg, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = scattering_shape(cfg, x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Strict upper bound (2/3)(r_e λ̄_c/a²)·β·mc² on the radiated energy, erg.
pub fn radiation_bound(cfg: &ExperimentConfig, params: &CopenhagenParams) -> Result<f64> {
    params.validate()?;
    let k = constants();
    Ok(2.0 / 3.0 * k.r_e * k.lambdabar_c / (cfg.a * cfg.a) * params.beta * k.rest_energy())
}

/// (2e²/3m²c³)·q²/Δt with q = ħ/a and the given transit time, erg.
pub fn deflection_energy(cfg: &ExperimentConfig, params: &CopenhagenParams) -> Result<f64> {
    params.validate()?;
    let k = constants();
    let q = k.hbar / cfg.a;
    Ok(2.0 * k.e_charge * k.e_charge / (3.0 * k.m_e * k.m_e * k.c_light.powi(3)) * q * q / params.delta_t)
}

/// Power-law exponents of an energy in the slit parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scaling {
    pub a: i32,
    pub b: i32,
}

/// Bohm: ℰ₁ ∝ a⁴/b⁸ (at fixed t/T).
pub const BOHM_SCALING: Scaling = Scaling { a: 4, b: -8 };
/// Copenhagen bound: ∝ 1/a², independent of b.
pub const COPENHAGEN_SCALING: Scaling = Scaling { a: -2, b: 0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// Closed-form Bohm crossing energy for n = 1 at the screen, erg.
    pub bohm_energy: f64,
    /// Copenhagen upper bound, erg.
    pub copenhagen_bound: f64,
    /// Deflection energy with the minimal barrier Δx = 10 λ̄_c, erg.
    pub copenhagen_estimate: f64,
    /// bohm_energy / copenhagen_bound.
    pub ratio: f64,
    /// Momentum transfer of the first scattering maximum, g·cm/s.
    pub first_maximum_q: f64,
    pub params: CopenhagenParams,
    pub bohm_scaling: Scaling,
    pub copenhagen_scaling: Scaling,
}

/// Side-by-side Bohm and Copenhagen radiation figures for `cfg`.
pub fn compare(cfg: &ExperimentConfig) -> Result<Comparison> {
    let params = CopenhagenParams::minimal(cfg);
    let bohm_energy = crossing_energy_closed(&canyon(cfg, 1, cfg.screen_x)?);
    let copenhagen_bound = radiation_bound(cfg, &params)?;
    Ok(Comparison {
        bohm_energy,
        copenhagen_bound,
        copenhagen_estimate: deflection_energy(cfg, &params)?,
        ratio: bohm_energy / copenhagen_bound,
        first_maximum_q: first_maximum(cfg)?,
        params,
        bohm_scaling: BOHM_SCALING,
        copenhagen_scaling: COPENHAGEN_SCALING,
    })
}
