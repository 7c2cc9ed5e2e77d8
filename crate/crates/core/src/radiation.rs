//! Radiation from canyon crossings: Larmor energy per crossing, its power
//! spectrum (closed form and numeric Fourier), and the photon screen
//! pattern.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::constants;
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::qpotential::{canyon, CanyonModel};
use crate::quad;
use crate::specfun::{bessel_k0, k0_k1};
use crate::wavefield::ExperimentConfig;

/// Argument of the spectral maximum: root of K₀(x) = x·K₁(x).
pub const PEAK_ARGUMENT: f64 = 0.595_046_726_449_784_3;

/// The printed peak approximation ω_max·τ_n.
pub const PEAK_ARGUMENT_APPROX: f64 = 0.6;

/// β above which the dipole (nonrelativistic) treatment is flagged.
pub const BETA_LIMIT: f64 = 1e-2;

/// ℰ_n / (½ m v_x²) above which neglecting back-reaction is flagged.
pub const BACK_REACTION_LIMIT: f64 = 1e-3;

/// Frequency table range for photon sampling, in units of 1/τ_n.
const TABLE_RANGE: (f64, f64) = (1e-3, 50.0);
const TABLE_NODES: usize = 4096;

/// Tail is handed to integration by parts once φ''/φ'² and φ'''/φ'³ drop
/// below this.
const TAIL_RATIO: f64 = 1e-3;
const MAX_PANELS: usize = 1_000_000;
const EXPONENT_LIMIT: f64 = 700.0;

/// Larmor power (2/3)(e²/c³)·a², erg/s.
pub fn larmor_power(a_y: f64) -> f64 {
    let c = constants();
    2.0 / 3.0 * c.e_charge * c.e_charge / c.c_light.powi(3) * a_y * a_y
}

/// Closed-form energy radiated in one crossing of `canyon`, erg.
pub fn crossing_energy_closed(canyon: &CanyonModel) -> f64 {
    PI.sqrt() / 81.0 * energy_scale(canyon)
}

/// Energy of the ω-integrated closed-form spectrum, erg.
pub fn spectral_energy(canyon: &CanyonModel) -> f64 {
    PI * 3f64.sqrt() / 288.0 * energy_scale(canyon)
}

/// r_e·λ̄_c³·(â⁴/b⁸)·mc² / |n|^{9/2}.
fn energy_scale(canyon: &CanyonModel) -> f64 {
    let k = &canyon.consts;
    let n = f64::from(canyon.n.unsigned_abs());
    k.r_e * k.lambdabar_c.powi(3) * canyon.a_hat.powi(4) / canyon.b.powi(8) * k.rest_energy() / n.powf(4.5)
}

/// Crossing energy by direct quadrature of (2e²/3m²c³)|dQ_n/dy|²/ẏ over
/// the well, with ẏ = √(−2Q_n/m).
pub fn crossing_energy_quadrature(canyon: &CanyonModel) -> Result<f64> {
    let k = &canyon.consts;
    let m = k.m_e;
    let pre = 2.0 * k.e_charge * k.e_charge / (3.0 * m * m * k.c_light.powi(3));
    // integrand ∝ exp(−3â²y²/16b⁴); cut where the exponent reaches 60
    let y_max = (320f64).sqrt() * canyon.b * canyon.b / canyon.a_hat;
    let f = |y: f64| {
        let g = canyon.dq_dy(y);
        let v = (-2.0 * canyon.q(y) / m).sqrt();
        if v > 0.0 {
            pre * g * g / v
        } else {
            0.0
        }
    };
    let breaks: Vec<f64> = (0..=8).map(|i| y_max * f64::from(i) / 8.0).collect();
    let half = quad::integrate_with_breaks(f, &breaks, 0.0, 1e-12, 2000)?;
    Ok(2.0 * half.value)
}

/// Where a spectral density value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumProvenance {
    ClosedForm,
    NumericFourier,
}

impl SpectrumProvenance {
    pub fn label(self) -> &'static str {
        match self {
            SpectrumProvenance::ClosedForm => "closed_form",
            SpectrumProvenance::NumericFourier => "numeric_fourier",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    /// rad/s.
    pub omega: f64,
    /// dℰ/dω, erg·s.
    pub de_domega: f64,
    pub provenance: SpectrumProvenance,
}

/// Crossing time map t(y) used inside the Fourier integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMap {
    /// Quadrature of 1/ẏ through the Gaussian well.
    Exact,
    /// τ_n·sinh(3ây/4b²).
    Sinh,
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "angular frequency omega",
            value: omega,
        })
    }
}

/// (64/27π)(e²/c³)(b⁴/â²)·ω²K₀²(ωτ_n).
pub fn spectrum_closed(canyon: &CanyonModel, omega: f64) -> Result<SpectrumSample> {
    check_omega(omega)?;
    let x = omega * canyon.tau_n;
    // K₀ underflows beyond 700; the density is zero to double precision
    let k0 = if x > 700.0 { 0.0 } else { bessel_k0(x)?.value };
    Ok(SpectrumSample {
        omega,
        de_domega: spectrum_prefactor(canyon) * omega * omega * k0 * k0,
        provenance: SpectrumProvenance::ClosedForm,
    })
}

fn spectrum_prefactor(canyon: &CanyonModel) -> f64 {
    let k = &canyon.consts;
    64.0 / (27.0 * PI) * k.e_charge * k.e_charge / k.c_light.powi(3) * canyon.b.powi(4)
        / (canyon.a_hat * canyon.a_hat)
}

/// (e²ω²/3πc³)·|∫exp(iωt(y))dy|² by panel quadrature with an
/// integration-by-parts tail.
pub fn spectrum_numeric(canyon: &CanyonModel, omega: f64, map: TimeMap) -> Result<SpectrumSample> {
    check_omega(omega)?;
    let i = fourier_integral(canyon, omega, map)?;
    let k = &canyon.consts;
    Ok(SpectrumSample {
        omega,
        de_domega: k.e_charge * k.e_charge * omega * omega / (3.0 * PI * k.c_light.powi(3)) * i.norm_sqr(),
        provenance: SpectrumProvenance::NumericFourier,
    })
}

/// Phase ωt(y) and its first three y-derivatives for y ≥ 0.
struct Phase<'a> {
    canyon: &'a CanyonModel,
    omega: f64,
    map: TimeMap,
    /// 3â/4b²
    k: f64,
    /// â²/16b⁴
    alpha: f64,
    /// dt/dy at the floor
    slope: f64,
}

impl<'a> Phase<'a> {
    fn new(canyon: &'a CanyonModel, omega: f64, map: TimeMap) -> Self {
        let b2 = canyon.b * canyon.b;
        let n = f64::from(canyon.n.unsigned_abs());
        Phase {
            canyon,
            omega,
            map,
            k: 0.75 * canyon.a_hat / b2,
            alpha: canyon.a_hat * canyon.a_hat / (16.0 * b2 * b2),
            slope: 3f64.sqrt() * n.powf(1.5) * b2 / (canyon.consts.hbar_over_m() * canyon.a_hat),
        }
    }

    /// [φ', φ'', φ'''] at y.
    fn derivatives(&self, y: f64) -> [f64; 3] {
        match self.map {
            TimeMap::Sinh => {
                let w = self.omega * self.canyon.tau_n * self.k;
                let (s, c) = ((self.k * y).sinh(), (self.k * y).cosh());
                [w * c, w * self.k * s, w * self.k * self.k * c]
            }
            TimeMap::Exact => {
                let a = self.alpha;
                let d1 = self.omega * self.slope * (a * y * y).exp();
                [d1, 2.0 * a * y * d1, (2.0 * a + 4.0 * a * a * y * y) * d1]
            }
        }
    }

    fn exponent(&self, y: f64) -> f64 {
        match self.map {
            TimeMap::Sinh => self.k * y,
            TimeMap::Exact => self.alpha * y * y,
        }
    }

    /// ∫_y0^y1 e^{iφ} dy given φ(y0); returns the integral and φ(y1).
    fn panel(&self, y0: f64, y1: f64, phi0: f64) -> (Complex64, f64, f64) {
        match self.map {
            TimeMap::Sinh => {
                let w = self.omega * self.canyon.tau_n;
                let f = |y: f64| w * (self.k * y).sinh();
                let (re, er) = quad::gk15(|y| f(y).cos(), y0, y1);
                let (im, ei) = quad::gk15(|y| f(y).sin(), y0, y1);
                (Complex64::new(re, im), er + ei, f(y1))
            }
            TimeMap::Exact => {
                let a = self.alpha;
                let g = |u: f64| (a * u * u).exp();
                let scale = self.omega * self.slope;
                let phi = |y: f64| phi0 + scale * quad::gk15(g, y0, y).0;
                let (re, er) = quad::gk15(|y| phi(y).cos(), y0, y1);
                let (im, ei) = quad::gk15(|y| phi(y).sin(), y0, y1);
                (Complex64::new(re, im), er + ei, phi(y1))
            }
        }
    }
}

/// ∫_{−∞}^{∞} exp(iωt(y)) dy, cm. t(y) is odd, so this is 2·Re of the
/// half-line integral.
fn fourier_integral(canyon: &CanyonModel, omega: f64, map: TimeMap) -> Result<Complex64> {
    let p = Phase::new(canyon, omega, map);
    let h_cap = 0.25 / p.k;
    let y_core = 3.0 / p.k;
    let mut y = 0.0;
    let mut phi = 0.0;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for _ in 0..MAX_PANELS {
        let [d1, d2, d3] = p.derivatives(y);
        // the expansion misses the exponentially small core contribution,
        // so the tail may only start once the well core is behind us
        if y >= y_core && d2 / (d1 * d1) <= TAIL_RATIO && d3 / (d1 * d1 * d1) <= TAIL_RATIO {
            // ∫_Y^∞ e^{iφ} ≈ −e^{iφ(Y)}·[−i/φ' − φ''/φ'³ − i(φ'''/φ'⁴ − 3φ''²/φ'⁵)]
            let t0 = Complex64::new(0.0, -1.0 / d1);
            let t1 = Complex64::new(-d2 / d1.powi(3), 0.0);
            let t2 = Complex64::new(0.0, -(d3 / d1.powi(4) - 3.0 * d2 * d2 / d1.powi(5)));
            let tail = -Complex64::from_polar(1.0, phi) * (t0 + t1 + t2);
            sum += tail;
            err += t2.norm() * TAIL_RATIO;
            let total = Complex64::new(2.0 * sum.re, 0.0);
            if err > (1e-6 * total.norm()).max(1e-10 / p.k) {
                return Err(Error::OscillatoryTail { omega, error: err });
            }
            return Ok(total);
        }
        if p.exponent(y) > EXPONENT_LIMIT {
            break;
        }
        let h = (FRAC_PI_2 / d1).min(h_cap);
        let (v, e, phi1) = p.panel(y, y + h, phi);
        sum += v;
        err += e;
        phi = phi1;
        y += h;
    }
    Err(Error::OscillatoryTail {
        omega,
        error: f64::INFINITY,
    })
}

/// ω-integral of the numeric spectrum over (0, ∞), erg.
pub fn numeric_spectral_energy(canyon: &CanyonModel, map: TimeMap) -> Result<f64> {
    let tau = canyon.tau_n;
    let mut failure = None;
    let f = |x: f64| match spectrum_numeric(canyon, x / tau, map) {
        Ok(s) => s.de_domega / tau,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let breaks = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0];
    let r = quad::integrate_with_breaks(f, &breaks, 0.0, 1e-7, 400);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r?.value)
}

/// ω-integral of the closed-form spectrum over (0, x_max/τ_n], erg.
pub fn closed_spectral_energy(canyon: &CanyonModel, x_max: f64) -> Result<f64> {
    let pre = spectrum_prefactor(canyon) / canyon.tau_n.powi(3);
    let f = |x: f64| {
        let k0 = k0_k1(x).0;
        pre * x * x * k0 * k0
    };
    let mut breaks = vec![0.0];
    breaks.extend([0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0].into_iter().filter(|&b| b < x_max));
    breaks.push(x_max);
    Ok(quad::integrate_with_breaks(f, &breaks, 0.0, 1e-13, 2000)?.value)
}

/// Printed peak approximation ω_max = 3/(5τ_n), rad/s.
pub fn peak_frequency(canyon: &CanyonModel) -> f64 {
    PEAK_ARGUMENT_APPROX / canyon.tau_n
}

/// True maximizer of the closed-form spectrum, rad/s.
pub fn peak_frequency_exact(canyon: &CanyonModel) -> f64 {
    PEAK_ARGUMENT / canyon.tau_n
}

/// Argmax of ω²K₀²(ωτ_n) by golden-section search, in units of 1/τ_n.
pub fn spectrum_argmax(canyon: &CanyonModel) -> Result<f64> {
    let tau = canyon.tau_n;
    let f = |x: f64| spectrum_closed(canyon, x / tau).map(|s| s.de_domega);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.05, 5.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-10 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Peak ẏ/c of the zero-energy crossing: λ̄_c·â/(√3·|n|^{3/2}·b²).
pub fn beta_max(canyon: &CanyonModel) -> f64 {
    let n = f64::from(canyon.n.unsigned_abs());
    canyon.consts.lambdabar_c * canyon.a_hat / (3f64.sqrt() * n.powf(1.5) * canyon.b * canyon.b)
}

/// Validity flags of the radiation treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeFlags {
    /// β_max ≥ [`BETA_LIMIT`]: dipole treatment questionable.
    pub relativistic: bool,
    /// ℰ_n above [`BACK_REACTION_LIMIT`] of the kinetic energy.
    pub back_reaction: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiationReport {
    pub n: i32,
    /// Crossing time t at the screen, s.
    pub t: f64,
    /// erg
    pub energy_closed: f64,
    /// erg
    pub energy_quadrature: f64,
    /// erg
    pub energy_spectral: f64,
    /// 3/(5τ_n), rad/s.
    pub omega_max: f64,
    /// True spectral maximum, rad/s.
    pub omega_peak: f64,
    pub tau_n: f64,
    /// |Q_n(0)|, erg.
    pub depth: f64,
    pub emission_probability: f64,
    pub beta_max: f64,
    pub flags: RegimeFlags,
}

impl RadiationReport {
    pub fn hbar_omega_max_ev(&self) -> f64 {
        let k = constants();
        k.erg_to_ev(k.hbar * self.omega_max)
    }

    /// 2πc/ω_max in ångström.
    pub fn lambda_max_angstrom(&self) -> f64 {
        2.0 * PI * constants().c_light / self.omega_max * 1e8
    }
}

/// All radiation quantities for canyon `n` at the screen of `cfg`.
pub fn emission_summary(cfg: &ExperimentConfig, n: i32) -> Result<RadiationReport> {
    let c = canyon(cfg, n, cfg.screen_x)?;
    report_for(cfg, &c)
}

fn report_for(cfg: &ExperimentConfig, c: &CanyonModel) -> Result<RadiationReport> {
    let k = &c.consts;
    let energy_closed = crossing_energy_closed(c);
    let omega_max = peak_frequency(c);
    let beta = beta_max(c);
    let kinetic = 0.5 * k.m_e * cfg.vx * cfg.vx;
    Ok(RadiationReport {
        n: c.n,
        t: c.t,
        energy_closed,
        energy_quadrature: crossing_energy_quadrature(c)?,
        energy_spectral: spectral_energy(c),
        omega_max,
        omega_peak: peak_frequency_exact(c),
        tau_n: c.tau_n,
        depth: c.depth,
        emission_probability: energy_closed / (k.hbar * omega_max),
        beta_max: beta,
        flags: RegimeFlags {
            relativistic: beta >= BETA_LIMIT,
            back_reaction: energy_closed > BACK_REACTION_LIMIT * kinetic,
        },
    })
}

/// Inverse CDF of the normalized density x²K₀²(x) on log-spaced nodes.
struct FrequencyTable {
    x: Vec<f64>,
    cdf: Vec<f64>,
}

impl FrequencyTable {
    fn new() -> Self {
        let (lo, hi) = TABLE_RANGE;
        let step = (hi / lo).ln() / (TABLE_NODES - 1) as f64;
        let x: Vec<f64> = (0..TABLE_NODES).map(|i| lo * (step * i as f64).exp()).collect();
        let f: Vec<f64> = x
            .iter()
            .map(|&x| {
                let k0 = k0_k1(x).0;
                x * x * k0 * k0
            })
            .collect();
        let mut cdf = vec![0.0; TABLE_NODES];
        for i in 1..TABLE_NODES {
            cdf[i] = cdf[i - 1] + 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
        }
        let total = cdf[TABLE_NODES - 1];
        cdf.iter_mut().for_each(|c| *c /= total);
        FrequencyTable { x, cdf }
    }

    /// ωτ_n for a uniform variate u ∈ [0, 1).
    fn sample(&self, u: f64) -> f64 {
        let j = self.cdf.partition_point(|&c| c <= u).clamp(1, TABLE_NODES - 1);
        let (c0, c1) = (self.cdf[j - 1], self.cdf[j]);
        let s = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.x[j - 1] + s * (self.x[j] - self.x[j - 1])
    }
}

/// Unit emission direction with density ∝ sin²ψ about the y axis.
fn dipole_direction<R: Rng>(rng: &mut R) -> [f64; 3] {
    let u = loop {
        let u: f64 = rng.random_range(-1.0..=1.0);
        if rng.random::<f64>() <= 1.0 - u * u {
            break u;
        }
    };
    let phi = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - u * u).sqrt();
    [s * phi.cos(), u, s * phi.sin()]
}

/// How emission is simulated per crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhotonSampling {
    /// Emit with probability ℰ_n/ħω_max; unit weights.
    #[default]
    Analog,
    /// Always emit, with weight ℰ_n/ħω_max.
    Forced,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonOptions {
    /// Canyons ±1..±max_canyon are crossed by every electron.
    pub max_canyon: u32,
    pub sampling: PhotonSampling,
    /// Screen histogram range, cm; defaults to the electron landing range.
    pub screen_range: Option<(f64, f64)>,
    /// Screen bins; defaults to an eighth of the fringe spacing.
    pub screen_bins: Option<usize>,
    /// Bins of the direction cosine n_y over [−1, 1].
    pub angle_bins: usize,
    pub mode: Execution,
}

impl Default for PhotonOptions {
    fn default() -> Self {
        PhotonOptions {
            max_canyon: 3,
            sampling: PhotonSampling::Analog,
            screen_range: None,
            screen_bins: None,
            angle_bins: 64,
            mode: Execution::Parallel,
        }
    }
}

/// Histogram with per-bin weight sums and squared-weight sums.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHistogram {
    pub bin_edges: Vec<f64>,
    pub weights: Vec<f64>,
    pub sum_sq: Vec<f64>,
}

impl WeightedHistogram {
    fn new(lo: f64, hi: f64, n: usize) -> Self {
        WeightedHistogram {
            bin_edges: (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect(),
            weights: vec![0.0; n],
            sum_sq: vec![0.0; n],
        }
    }

    fn fill(&mut self, v: f64, w: f64) -> bool {
        let n = self.weights.len();
        let (lo, hi) = (self.bin_edges[0], self.bin_edges[n]);
        if !(v >= lo && v < hi) {
            return false;
        }
        let i = (((v - lo) / (hi - lo) * n as f64) as usize).min(n - 1);
        self.weights[i] += w;
        self.sum_sq[i] += w * w;
        true
    }

    fn merge(&mut self, other: &WeightedHistogram) {
        for i in 0..self.weights.len() {
            self.weights[i] += other.weights[i];
            self.sum_sq[i] += other.sum_sq[i];
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonPattern {
    /// Weighted screen intercepts, cm.
    pub screen: WeightedHistogram,
    /// Weighted direction cosine about the acceleration axis.
    pub angular: WeightedHistogram,
    pub electrons: usize,
    /// Canyon crossings simulated.
    pub crossings: usize,
    /// Photons drawn (all crossings when forced).
    pub emitted: usize,
    /// Photons heading downstream and landing inside the screen range.
    pub on_screen: usize,
    /// Σ weights: expected photon count for the simulated electrons.
    pub expected_photons: f64,
    /// Weighted mean photon energy, erg (0 without emission).
    pub mean_photon_energy: f64,
    pub sampling: PhotonSampling,
}

impl PhotonPattern {
    /// True for an analog run in which no photon was emitted.
    pub fn zero_emission(&self) -> bool {
        self.emitted == 0
    }
}

/// Photon Monte Carlo with default options.
pub fn photon_pattern(cfg: &ExperimentConfig, n_electrons: usize, seed: u64) -> Result<PhotonPattern> {
    photon_pattern_with(cfg, n_electrons, seed, &PhotonOptions::default())
}

/// Each electron crosses canyons ±1..±max_canyon at a point drawn uniformly
/// along the canyon ray between slit and screen; each crossing emits with
/// probability ℰ_n/ħω_max (or always, reweighted). Photons fly in straight
/// lines from the canyon floor.
pub fn photon_pattern_with(
    cfg: &ExperimentConfig,
    n_electrons: usize,
    seed: u64,
    opts: &PhotonOptions,
) -> Result<PhotonPattern> {
    if n_electrons == 0 {
        return Err(Error::InvalidConfig("photon pattern needs at least one electron".into()));
    }
    if opts.max_canyon == 0 || opts.angle_bins == 0 {
        return Err(Error::InvalidConfig("photon pattern needs canyons and angle bins".into()));
    }
    let (lo, hi) = opts
        .screen_range
        .unwrap_or_else(|| crate::dynamics::default_landing_range(cfg));
    if !(hi > lo) {
        return Err(Error::InvalidConfig(format!("empty screen range ({lo}, {hi})")));
    }
    let n_bins = opts
        .screen_bins
        .unwrap_or_else(|| ((hi - lo) / (cfg.fringe_spacing(cfg.screen_x) / 8.0)).ceil() as usize)
        .max(1);
    let table = FrequencyTable::new();
    let hbar = constants().hbar;
    let length = cfg.screen_x;
    let canyons: Vec<i32> = (1..=opts.max_canyon as i32).flat_map(|n| [-n, n]).collect();

    struct Partial {
        screen: WeightedHistogram,
        angular: WeightedHistogram,
        emitted: usize,
        on_screen: usize,
        weight: f64,
        energy: f64,
    }

    let per_electron = map_range(opts.mode, n_electrons, |i| -> Result<Partial> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut part = Partial {
            screen: WeightedHistogram::new(lo, hi, n_bins),
            angular: WeightedHistogram::new(-1.0, 1.0, opts.angle_bins),
            emitted: 0,
            on_screen: 0,
            weight: 0.0,
            energy: 0.0,
        };
        for &n in &canyons {
            let x_c = length * (1.0 - rng.random::<f64>());
            let c = canyon(cfg, n, x_c)?;
            let p = crossing_energy_closed(&c) / (hbar * peak_frequency(&c));
            let w = match opts.sampling {
                PhotonSampling::Analog => {
                    if rng.random::<f64>() >= p {
                        continue;
                    }
                    1.0
                }
                PhotonSampling::Forced => p,
            };
            let omega = table.sample(rng.random::<f64>()) / c.tau_n;
            let dir = dipole_direction(&mut rng);
            part.emitted += 1;
            part.weight += w;
            part.energy += w * hbar * omega;
            part.angular.fill(dir[1], w);
            if dir[0] > 0.0 {
                let y_c = c.theta_n * x_c;
                if part.screen.fill(y_c + dir[1] / dir[0] * (length - x_c), w) {
                    part.on_screen += 1;
                }
            }
        }
        Ok(part)
    });

    let mut screen = WeightedHistogram::new(lo, hi, n_bins);
    let mut angular = WeightedHistogram::new(-1.0, 1.0, opts.angle_bins);
    let (mut emitted, mut on_screen, mut weight, mut energy) = (0, 0, 0.0, 0.0);
    for part in per_electron {
        let part = part?;
        screen.merge(&part.screen);
        angular.merge(&part.angular);
        emitted += part.emitted;
        on_screen += part.on_screen;
        weight += part.weight;
        energy += part.energy;
    }
    Ok(PhotonPattern {
        screen,
        angular,
        electrons: n_electrons,
        crossings: n_electrons * canyons.len(),
        emitted,
        on_screen,
        expected_photons: weight,
        mean_photon_energy: if weight > 0.0 { energy / weight } else { 0.0 },
        sampling: opts.sampling,
    })
}

/// A local maximum of a weighted histogram with its significance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternPeak {
    pub y: f64,
    /// (peak − window mean) in standard deviations.
    pub significance: f64,
}

/// Highest bin within `window` of `near`, refined by a parabola through its
/// neighbours, if it stands out from the window mean by at least
/// `min_significance` standard deviations.
pub fn pattern_peak(hist: &WeightedHistogram, near: f64, window: f64, min_significance: f64) -> Option<PatternPeak> {
    let idx: Vec<usize> = (0..hist.weights.len())
        .filter(|&i| (hist.bin_center(i) - near).abs() <= window)
        .collect();
    if idx.len() < 3 {
        return None;
    }
    let &best = idx
        .iter()
        .max_by(|&&i, &&j| hist.weights[i].total_cmp(&hist.weights[j]))?;
    let others: Vec<usize> = idx.iter().copied().filter(|&i| i != best).collect();
    let mean = others.iter().map(|&i| hist.weights[i]).sum::<f64>() / others.len() as f64;
    let var_mean = others.iter().map(|&i| hist.sum_sq[i]).sum::<f64>() / (others.len() as f64).powi(2);
    let sigma = (hist.sum_sq[best] + var_mean).sqrt();
    if !(sigma > 0.0) {
        return None;
    }
    let significance = (hist.weights[best] - mean) / sigma;
    if significance < min_significance {
        return None;
    }
    let mut y = hist.bin_center(best);
    if best > 0 && best + 1 < hist.weights.len() {
        let (l, c, r) = (hist.weights[best - 1], hist.weights[best], hist.weights[best + 1]);
        let curv = l - 2.0 * c + r;
        if curv < 0.0 {
            y += 0.5 * (l - r) / curv * hist.bin_width();
        }
    }
    Some(PatternPeak { y, significance })
}
