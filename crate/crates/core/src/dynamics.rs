//! Guided electron trajectories and the reduced one-dimensional canyon
//! crossing.
//!
//! Trajectories advance the first-order guidance law v_y = (ħ/m)·Im(ψ*∂_yψ)/|ψ|²
//! in t, with x = v_x·t. The slit plane is t = 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::ode::{self, OdeOptions};
use crate::qpotential::CanyonModel;
use crate::quad;
use crate::wavefield::{ExperimentConfig, FieldSlice, Slit};

/// Relative tolerance of the trajectory integrator.
pub const TRAJECTORY_RTOL: f64 = 1e-8;

/// Largest exponent accepted by [`crossing_time_exact`].
const EXPONENT_LIMIT: f64 = 700.0;

/// Transverse Bohmian velocity at (x, y).
pub fn guidance_velocity(cfg: &ExperimentConfig, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            what: "longitudinal position x",
            value: x,
        });
    }
    velocity_at(cfg, cfg.time_at(x), y).map_err(|_| near_node(cfg, x, y))
}

fn near_node(cfg: &ExperimentConfig, x: f64, y: f64) -> Error {
    let slice = FieldSlice::new(cfg, cfg.time_at(x));
    Error::NearNode {
        x,
        y,
        r: slice.amplitude(y),
        guard: slice.guard(),
    }
}

fn velocity_at(cfg: &ExperimentConfig, t: f64, y: f64) -> Result<f64> {
    let slice = FieldSlice::new(cfg, t);
    let (v, r) = slice.velocity(y);
    if !(r >= slice.guard()) {
        return Err(Error::NearNode {
            x: cfg.vx * t,
            y,
            r,
            guard: slice.guard(),
        });
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vy: f64,
    pub ay: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub slit_of_origin: Slit,
}

impl Trajectory {
    pub fn landing(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has samples")
    }

    /// y at time `t`, by cubic Hermite interpolation between samples.
    pub fn y_at(&self, t: f64) -> Option<f64> {
        let s = &self.samples;
        if t < s[0].t || t > s[s.len() - 1].t {
            return None;
        }
        let i = s.partition_point(|p| p.t <= t).clamp(1, s.len() - 1);
        let (p, q) = (&s[i - 1], &s[i]);
        let h = q.t - p.t;
        let u = (t - p.t) / h;
        let (u2, u3) = (u * u, u * u * u);
        Some(
            (2.0 * u3 - 3.0 * u2 + 1.0) * p.y
                + (u3 - 2.0 * u2 + u) * h * p.vy
                + (-2.0 * u3 + 3.0 * u2) * q.y
                + (u3 - u2) * h * q.vy,
        )
    }
}

/// Integrator settings for trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOptions {
    pub rtol: f64,
    /// Largest step, s. `None` means a fiftieth of the transit time.
    pub dt_max: Option<f64>,
    /// Smallest step as a fraction of the slit-to-screen transit time.
    pub dt_min_fraction: f64,
    /// Launch plane, cm behind the slits.
    pub launch_x: f64,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            rtol: TRAJECTORY_RTOL,
            dt_max: None,
            dt_min_fraction: 1e-6,
            launch_x: 0.0,
        }
    }
}

fn ode_options(cfg: &ExperimentConfig, opts: &TrajectoryOptions) -> OdeOptions {
    let transit = cfg.time_at(cfg.screen_x);
    let dt_max = opts.dt_max.unwrap_or(transit / 50.0);
    OdeOptions {
        rtol: opts.rtol,
        // absolute floor well below every transverse length scale
        atol: opts.rtol * cfg.b * 1e-2,
        dt_max,
        dt_min: opts.dt_min_fraction * transit,
        dt_init: dt_max.min(1e-3 * transit),
    }
}

/// Integrates one trajectory from the slit plane at height y0 to the screen. Acceleration is
/// the derivative of v_y along the path from neighbouring samples.
pub fn integrate_trajectory(cfg: &ExperimentConfig, y0: f64, dt_max: Option<f64>) -> Result<Trajectory> {
    integrate_trajectory_with(
        cfg,
        y0,
        &TrajectoryOptions {
            dt_max,
            ..Default::default()
        },
    )
}

pub fn integrate_trajectory_with(cfg: &ExperimentConfig, y0: f64, opts: &TrajectoryOptions) -> Result<Trajectory> {
    let t_end = cfg.time_at(cfg.screen_x);
    let t0 = cfg.time_at(opts.launch_x);
    if !(t0 >= 0.0 && t0 < t_end) {
        return Err(Error::Domain {
            what: "launch plane x",
            value: opts.launch_x,
        });
    }
    let mut samples = Vec::new();
    ode::integrate(
        |t, y: &[f64; 1]| Ok([velocity_at(cfg, t, y[0])?]),
        t0,
        [y0],
        t_end,
        &ode_options(cfg, opts),
        |t, y, dy| {
            samples.push(TrajectorySample {
                t,
                x: cfg.vx * t,
                y: y[0],
                vy: dy[0],
                ay: 0.0,
            })
        },
    )?;
    fill_acceleration(&mut samples);
    Ok(Trajectory {
        samples,
        slit_of_origin: if y0 >= 0.0 { Slit::A } else { Slit::B },
    })
}

fn fill_acceleration(s: &mut [TrajectorySample]) {
    let n = s.len();
    if n < 2 {
        return;
    }
    for i in 0..n {
        s[i].ay = if i == 0 {
            (s[1].vy - s[0].vy) / (s[1].t - s[0].t)
        } else if i == n - 1 {
            (s[i].vy - s[i - 1].vy) / (s[i].t - s[i - 1].t)
        } else {
            // three-point derivative on a non-uniform mesh
            let h1 = s[i].t - s[i - 1].t;
            let h2 = s[i + 1].t - s[i].t;
            (s[i + 1].vy - s[i].vy) * h1 / (h2 * (h1 + h2)) + (s[i].vy - s[i - 1].vy) * h2 / (h1 * (h1 + h2))
        };
    }
}

fn landing_y(cfg: &ExperimentConfig, y0: f64, t0: f64, opts: &OdeOptions) -> Result<f64> {
    let mut y_end = y0;
    ode::integrate(
        |t, y: &[f64; 1]| Ok([velocity_at(cfg, t, y[0])?]),
        t0,
        [y0],
        cfg.time_at(cfg.screen_x),
        opts,
        |_, y, _| y_end = y[0],
    )?;
    Ok(y_end)
}

/// Initial transverse positions distributed as |ψ(t = 0, y)|².
///
/// Draws from the two-beam mixture |ψ_A|² + |ψ_B|² and accepts with
/// |ψ_A + ψ_B|² / (2(|ψ_A|² + |ψ_B|²)) ≤ 1. Sample `i` uses its own ChaCha
/// stream, so the set does not depend on how the work is scheduled.
pub fn sample_initial_positions(cfg: &ExperimentConfig, n: usize, seed: u64) -> Vec<f64> {
    let slice = FieldSlice::new(cfg, 0.0);
    let (center, sigma) = slice.beam_moments();
    (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            loop {
                let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let z: f64 = rng.sample(StandardNormal);
                let y = side * center + sigma * z;
                let a = slice.slit(Slit::A, y).0;
                let b = slice.slit(Slit::B, y).0;
                let mix = a.norm_sqr() + b.norm_sqr();
                if rng.random::<f64>() * 2.0 * mix <= (a + b).norm_sqr() {
                    break y;
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandingHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_samples: usize,
    /// Aborted trajectories (node collision or step collapse).
    pub failures: usize,
    /// Landings outside the binned range.
    pub outside: usize,
    pub screen_x: f64,
}

impl LandingHistogram {
    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    fn from_landings(edges: Vec<f64>, landings: &[Option<f64>], screen_x: f64) -> Self {
        let nb = edges.len() - 1;
        let (lo, hi) = (edges[0], edges[nb]);
        let width = (hi - lo) / nb as f64;
        let mut counts = vec![0u64; nb];
        let mut failures = 0;
        let mut outside = 0;
        for l in landings {
            match l {
                None => failures += 1,
                Some(y) if *y < lo || *y >= hi => outside += 1,
                Some(y) => counts[(((y - lo) / width) as usize).min(nb - 1)] += 1,
            }
        }
        Self {
            bin_edges: edges,
            counts,
            n_samples: landings.len(),
            failures,
            outside,
            screen_x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOptions {
    /// Binned range; `None` covers both beams to 8 standard deviations.
    pub y_range: Option<(f64, f64)>,
    /// Bin count; `None` gives eight bins per fringe.
    pub n_bins: Option<usize>,
    pub trajectory: TrajectoryOptions,
    pub mode: Execution,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            y_range: None,
            n_bins: None,
            trajectory: TrajectoryOptions::default(),
            mode: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRun {
    pub histogram: LandingHistogram,
    pub initial: Vec<f64>,
    /// Landing y per sample; `None` for aborted trajectories.
    pub landings: Vec<Option<f64>>,
}

/// Default histogram range ±(beam centre + 8σ) at the screen.
pub fn default_landing_range(cfg: &ExperimentConfig) -> (f64, f64) {
    let (center, sigma) = FieldSlice::new(cfg, cfg.time_at(cfg.screen_x)).beam_moments();
    let half = center + 8.0 * sigma;
    (-half, half)
}

/// Landing histogram of `n_samples` trajectories seeded by `seed`.
pub fn ensemble_landing(cfg: &ExperimentConfig, n_samples: usize, seed: u64) -> Result<LandingHistogram> {
    Ok(ensemble_run(cfg, n_samples, seed, &EnsembleOptions::default())?.histogram)
}

pub fn ensemble_run(cfg: &ExperimentConfig, n_samples: usize, seed: u64, opts: &EnsembleOptions) -> Result<EnsembleRun> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig("ensemble needs at least one sample".into()));
    }
    let (lo, hi) = opts.y_range.unwrap_or_else(|| default_landing_range(cfg));
    if !(hi > lo) {
        return Err(Error::InvalidConfig(format!("empty landing range ({lo}, {hi})")));
    }
    let n_bins = opts
        .n_bins
        .unwrap_or_else(|| ((hi - lo) / (cfg.fringe_spacing(cfg.screen_x) / 8.0)).ceil() as usize)
        .max(1);
    let edges: Vec<f64> = (0..=n_bins).map(|i| lo + (hi - lo) * i as f64 / n_bins as f64).collect();

    let initial = sample_initial_positions(cfg, n_samples, seed);
    let ode_opts = ode_options(cfg, &opts.trajectory);
    let landings = map_range(opts.mode, n_samples, |i| landing_y(cfg, initial[i], 0.0, &ode_opts).ok());
    let histogram = LandingHistogram::from_landings(edges, &landings, cfg.screen_x);
    if histogram.failures * 100 > n_samples {
        return Err(Error::TooManyAborts {
            failed: histogram.failures,
            total: n_samples,
        });
    }
    Ok(EnsembleRun {
        histogram,
        initial,
        landings,
    })
}

/// Position of the histogram minimum within `window` of `near`: the
/// lowest bin (centre of a run of equal lowest bins), refined by a parabola
/// through its neighbours.
pub fn histogram_minimum(hist: &LandingHistogram, near: f64, window: f64) -> Option<f64> {
    let nb = hist.counts.len();
    let idx: Vec<usize> = (0..nb)
        .filter(|&i| (hist.bin_center(i) - near).abs() <= window)
        .collect();
    let &first = idx.first()?;
    let last = *idx.last()?;
    let min = idx.iter().map(|&i| hist.counts[i]).min()?;
    let run: Vec<usize> = idx.iter().copied().filter(|&i| hist.counts[i] == min).collect();
    // the longest contiguous run containing the first minimum bin
    let start = run[0];
    let mut end = start;
    while end < last && hist.counts[end + 1] == min {
        end += 1;
    }
    let center = 0.5 * (hist.bin_center(start) + hist.bin_center(end));
    if start != end || start == first || end == last {
        return Some(center);
    }
    let (l, c, r) = (
        hist.counts[start - 1] as f64,
        hist.counts[start] as f64,
        hist.counts[start + 1] as f64,
    );
    let curv = l - 2.0 * c + r;
    if curv <= 0.0 {
        return Some(center);
    }
    Some(center + 0.5 * (l - r) / curv * hist.bin_width())
}

/// Cumulative distribution of |ψ(screen, y)|² over `range`, tabulated at
/// `n` equal steps by the trapezoidal rule and normalized to 1.
pub fn screen_cdf(cfg: &ExperimentConfig, range: (f64, f64), n: usize) -> (Vec<f64>, Vec<f64>) {
    let slice = FieldSlice::new(cfg, cfg.time_at(cfg.screen_x));
    let (lo, hi) = range;
    let ys: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let p: Vec<f64> = ys.iter().map(|&y| slice.total(y).0.norm_sqr()).collect();
    let mut cdf = vec![0.0; n + 1];
    for i in 1..=n {
        cdf[i] = cdf[i - 1] + 0.5 * (p[i] + p[i - 1]) * (ys[i] - ys[i - 1]);
    }
    let total = cdf[n];
    cdf.iter_mut().for_each(|c| *c /= total);
    (ys, cdf)
}

/// Kolmogorov sup distance between the empirical landing distribution and
/// |ψ(screen, ·)|², both restricted to `range`.
pub fn ks_distance(cfg: &ExperimentConfig, landings: &[f64], range: (f64, f64)) -> f64 {
    let (lo, hi) = range;
    let mut ys: Vec<f64> = landings.iter().copied().filter(|y| (lo..hi).contains(y)).collect();
    if ys.is_empty() {
        return 1.0;
    }
    ys.sort_by(f64::total_cmp);
    // 200 grid steps per fringe keep the trapezoid error far below 1e-3
    let n = ((hi - lo) / cfg.fringe_spacing(cfg.screen_x) * 200.0).ceil().max(1000.0) as usize;
    let (grid, cdf) = screen_cdf(cfg, range, n);
    let step = (hi - lo) / n as f64;
    let m = ys.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &y) in ys.iter().enumerate() {
        let j = (((y - lo) / step) as usize).min(n - 1);
        let f = cdf[j] + (cdf[j + 1] - cdf[j]) * (y - grid[j]) / step;
        d = d.max((i + 1) as f64 / m - f).max(f - i as f64 / m);
    }
    d
}

/// Crossing time t(y) for the canyon well from its floor, by adaptive
/// quadrature of 1/ẏ with ẏ = √(−2Q_n/m).
pub fn crossing_time_exact(canyon: &CanyonModel, y: f64) -> Result<f64> {
    let b2 = canyon.b * canyon.b;
    let alpha = canyon.a_hat * canyon.a_hat / (16.0 * b2 * b2);
    let exponent = alpha * y * y;
    if exponent > EXPONENT_LIMIT {
        return Err(Error::Overflow { y, exponent });
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let prefactor = slope(canyon);
    let ya = y.abs();
    let q = quad::integrate(|u| (alpha * u * u).exp(), 0.0, ya, 0.0, 1e-13)?;
    Ok(prefactor * q.value * y.signum())
}

/// dt/dy at the canyon floor: √3·|n|^{3/2}·(m/ħ)·b²/â.
pub fn crossing_slope(canyon: &CanyonModel) -> f64 {
    slope(canyon)
}

fn slope(canyon: &CanyonModel) -> f64 {
    let n = f64::from(canyon.n.unsigned_abs());
    3f64.sqrt() * n.powf(1.5) * canyon.b * canyon.b / (canyon.consts.hbar_over_m() * canyon.a_hat)
}

/// Closed-form approximation t(y) = τ_n·sinh(3ây/4b²).
pub fn crossing_time_sinh(canyon: &CanyonModel, y: f64) -> f64 {
    canyon.tau_n * (0.75 * canyon.a_hat * y / (canyon.b * canyon.b)).sinh()
}

/// State of the reduced one-dimensional crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanyonState {
    pub t: f64,
    pub y: f64,
    pub v: f64,
}

impl CanyonState {
    /// ½mv² + Q_n(y), erg.
    pub fn energy(&self, canyon: &CanyonModel) -> f64 {
        0.5 * canyon.consts.m_e * self.v * self.v + canyon.q(self.y)
    }
}

/// Newtonian motion m ÿ = −dQ_n/dy through one canyon, starting at
/// `y_start` with the zero-energy speed √(−2Q_n/m) directed toward the
/// floor, for `duration` seconds.
pub fn canyon_crossing_1d(canyon: &CanyonModel, y_start: f64, duration: f64) -> Result<Vec<CanyonState>> {
    let m = canyon.consts.m_e;
    let v0 = (-2.0 * canyon.q(y_start) / m).sqrt() * -y_start.signum();
    let mut out = Vec::new();
    ode::integrate(
        |_, s: &[f64; 2]| Ok([s[1], -canyon.dq_dy(s[0]) / m]),
        0.0,
        [y_start, v0],
        duration,
        &OdeOptions {
            rtol: 1e-11,
            atol: 1e-11 * v0.abs().max(y_start.abs()) * 1e-6,
            dt_max: canyon.tau_n,
            dt_min: 1e-9 * canyon.tau_n,
            dt_init: 1e-2 * canyon.tau_n,
        },
        |t, s, _| out.push(CanyonState { t, y: s[0], v: s[1] }),
    )?;
    Ok(out)
}

/// v_y/v_x along the plateau ray at angle `k`·(fringe angle), for checks
/// that trajectories run parallel to the canyon fan far downstream.
pub fn plateau_slope(cfg: &ExperimentConfig, k: i32, x: f64) -> Result<f64> {
    let y = f64::from(k) * cfg.fringe_angle() * x;
    Ok(guidance_velocity(cfg, x, y)? / cfg.vx)
}
