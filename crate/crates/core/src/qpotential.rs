//! Quantum potential Q = −(ħ²/2m)∇²R/R: the exact value from the
//! wavefield by finite differences, and the Gaussian-canyon approximation.

use std::f64::consts::PI;

use crate::constants::{constants, PhysicalConstants};
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::wavefield::{ExperimentConfig, FieldSlice};

/// Default number of canyon pairs summed by [`approx_q`].
pub const DEFAULT_N_MAX: u32 = 5;

/// Richardson-vs-base disagreement that counts as non-convergence.
const RICHARDSON_TOL: f64 = 1e-3;

/// Geometry and scales of the n-th canyon at one propagation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanyonModel {
    pub n: i32,
    /// Polar angle of the canyon floor, rad.
    pub theta_n: f64,
    /// |Q_n(0)|, erg.
    pub depth: f64,
    /// Gaussian scale 2√2·b²/â, cm.
    pub width_scale: f64,
    /// â = a/√(1 + t²/T²), cm.
    pub a_hat: f64,
    /// Crossing time constant, s.
    pub tau_n: f64,
    /// Propagation time t, s.
    pub t: f64,
    /// Slit half-width b, cm.
    pub b: f64,
    pub consts: PhysicalConstants,
}

/// Canyon `n` at distance `x` behind the slits.
pub fn canyon(cfg: &ExperimentConfig, n: i32, x: f64) -> Result<CanyonModel> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            what: "longitudinal position x",
            value: x,
        });
    }
    canyon_at_time(cfg, n, cfg.time_at(x), constants())
}

/// Canyon `n` at propagation time `t` with an explicit constant set.
pub fn canyon_at_time(
    cfg: &ExperimentConfig,
    n: i32,
    t: f64,
    consts: &PhysicalConstants,
) -> Result<CanyonModel> {
    if n == 0 {
        return Err(Error::ZeroCanyonIndex);
    }
    if !(t >= 0.0) {
        return Err(Error::Domain {
            what: "propagation time t",
            value: t,
        });
    }
    let hbar_m = consts.hbar_over_m();
    let r = t / cfg.source_time;
    let a_hat = cfg.a / (1.0 + r * r).sqrt();
    let b2 = cfg.b * cfg.b;
    let abs_n = n.unsigned_abs() as f64;
    Ok(CanyonModel {
        n,
        theta_n: (abs_n - 0.5) * PI * hbar_m / (cfg.vx * cfg.a) * f64::from(n.signum()),
        depth: consts.hbar * hbar_m * a_hat * a_hat / (6.0 * abs_n.powi(3) * b2 * b2),
        width_scale: 2.0 * 2f64.sqrt() * b2 / a_hat,
        a_hat,
        tau_n: 4.0 * abs_n.powf(1.5) / 3f64.sqrt() * b2 * b2 / (hbar_m * a_hat * a_hat),
        t,
        b: cfg.b,
        consts: *consts,
    })
}

impl CanyonModel {
    /// One-dimensional cut Q_n(y) = −depth·exp(−â²y²/8b⁴), y from the floor.
    pub fn q(&self, y: f64) -> f64 {
        -self.depth * (-self.exponent(y)).exp()
    }

    /// dQ_n/dy.
    pub fn dq_dy(&self, y: f64) -> f64 {
        let b4 = self.b.powi(4);
        self.depth * self.a_hat * self.a_hat * y / (4.0 * b4) * (-self.exponent(y)).exp()
    }

    /// Offset from the floor where Q_n reaches half depth: √(8 ln 2)·b²/â.
    pub fn half_depth_offset(&self) -> f64 {
        (8.0 * 2f64.ln()).sqrt() * self.b * self.b / self.a_hat
    }

    fn exponent(&self, y: f64) -> f64 {
        let s = self.a_hat * y / (self.b * self.b);
        s * s / 8.0
    }
}

/// Q_n(y) for one canyon.
pub fn q1d(canyon: &CanyonModel, y: f64) -> f64 {
    canyon.q(y)
}

/// Sum of Gaussian canyon terms n = ±1..±n_max in polar coordinates about
/// the slit-plane midpoint.
pub fn approx_q(cfg: &ExperimentConfig, x: f64, y: f64, n_max: u32) -> f64 {
    let k = constants();
    let hbar_m = k.hbar_over_m();
    let t = cfg.time_at(x);
    let r2 = t / cfg.source_time;
    let a_hat2 = cfg.a * cfg.a / (1.0 + r2 * r2);
    let b4 = cfg.b.powi(4);
    let radius = x.hypot(y);
    let theta = y.atan2(x);
    let spacing = PI * hbar_m / (cfg.vx * cfg.a);
    let scale = k.hbar * hbar_m * a_hat2 / b4;
    let mut q = 0.0;
    for m in 1..=n_max {
        let mf = f64::from(m);
        let depth = scale / (6.0 * mf.powi(3));
        let theta_n = (mf - 0.5) * spacing;
        for th in [theta_n, -theta_n] {
            let d = radius * (theta - th);
            q -= depth * (-a_hat2 * d * d / (8.0 * b4)).exp();
        }
    }
    q
}

/// Finite-difference steps for the Laplacian of R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacianSteps {
    pub h_x: f64,
    pub h_y: f64,
}

impl LaplacianSteps {
    pub fn scaled(self, f: f64) -> Self {
        Self {
            h_x: self.h_x * f,
            h_y: self.h_y * f,
        }
    }
}

/// Steps resolving the narrower of canyon width and fringe spacing in y,
/// and the slower radial variation in x.
pub fn laplacian_steps(cfg: &ExperimentConfig, x: f64, y: f64) -> LaplacianSteps {
    let h_y = cfg.canyon_width(x).min(cfg.fringe_spacing(x)) / 50.0;
    let anisotropic = h_y * cfg.vx * cfg.source_time / cfg.a;
    let radial = if y == 0.0 { f64::INFINITY } else { h_y * x / y.abs() };
    LaplacianSteps {
        h_x: anisotropic.min(radial).min(x / 100.0),
        h_y,
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "longitudinal position x",
            value: x,
        });
    }
    Ok(())
}

/// Q from one second-order central-difference Laplacian, without
/// extrapolation.
pub fn exact_q_with_steps(cfg: &ExperimentConfig, x: f64, y: f64, steps: LaplacianSteps) -> Result<f64> {
    check_x(x)?;
    let LaplacianSteps { h_x, h_y } = steps;
    if !(h_x > 0.0 && h_x < x && h_y > 0.0) {
        return Err(Error::Domain {
            what: "Laplacian step",
            value: h_x.min(h_y),
        });
    }
    let mid = FieldSlice::new(cfg, cfg.time_at(x));
    let guard = mid.guard();
    let r0 = mid.amplitude(y);
    if r0 < guard {
        return Err(Error::NearNode { x, y, r: r0, guard });
    }
    let up = FieldSlice::new(cfg, cfg.time_at(x + h_x)).amplitude(y);
    let down = FieldSlice::new(cfg, cfg.time_at(x - h_x)).amplitude(y);
    let left = mid.amplitude(y - h_y);
    let right = mid.amplitude(y + h_y);
    if [up, down, left, right].iter().any(|&r| r < guard) {
        return Err(Error::StencilCrossesNode { x, y });
    }
    let lap = (up - 2.0 * r0 + down) / (h_x * h_x) + (right - 2.0 * r0 + left) / (h_y * h_y);
    let k = constants();
    Ok(-0.5 * k.hbar * k.hbar_over_m() * lap / r0)
}

/// Exact quantum potential at (x, y): central differences at steps h and
/// h/2 combined by Richardson extrapolation.
pub fn exact_q(cfg: &ExperimentConfig, x: f64, y: f64) -> Result<f64> {
    check_x(x)?;
    let steps = laplacian_steps(cfg, x, y);
    let coarse = exact_q_with_steps(cfg, x, y, steps)?;
    let fine = exact_q_with_steps(cfg, x, y, steps.scaled(0.5))?;
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    let floor = 1e-2 * canyon(cfg, 1, x)?.depth;
    if (extrapolated - fine).abs() > RICHARDSON_TOL * extrapolated.abs().max(floor) {
        return Err(Error::NonConvergence {
            x,
            y,
            base: fine,
            extrapolated,
        });
    }
    Ok(extrapolated)
}

/// Whether (x, y) lies where the canyon picture is not meant to hold: the
/// geometric shadow between the slits and the two slit-exit beams, before
/// the beams have spread into each other.
pub fn in_neglected_zone(cfg: &ExperimentConfig, x: f64, y: f64) -> bool {
    let (center, sigma) = FieldSlice::new(cfg, cfg.time_at(x)).beam_moments();
    if sigma >= 0.5 * center {
        return false;
    }
    y.abs() < center || (y.abs() - center).abs() < 3.0 * sigma
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    Approx,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Exact => "exact",
            Provenance::Approx => "approx",
        }
    }
}

/// Q sampled on a rectangular (x, y) grid, stored x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Q in erg; NaN where `valid` is false.
    pub q: Vec<f64>,
    /// False where the exact evaluation failed (node proximity or
    /// non-convergence).
    pub valid: Vec<bool>,
    /// True inside the shadow and slit-exit zones.
    pub neglected: Vec<bool>,
    pub provenance: Provenance,
}

impl PotentialGrid {
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.ys.len() + iy
    }

    pub fn get(&self, ix: usize, iy: usize) -> Option<f64> {
        let i = self.index(ix, iy);
        self.valid[i].then_some(self.q[i])
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    !v.is_empty() && v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[1] > w[0])
}

/// Q over the grid `xs × ys`. Failed exact samples are marked, not fatal.
pub fn potential_grid(
    cfg: &ExperimentConfig,
    xs: &[f64],
    ys: &[f64],
    provenance: Provenance,
    n_max: u32,
    mode: Execution,
) -> Result<PotentialGrid> {
    if !strictly_increasing(xs) || !strictly_increasing(ys) {
        return Err(Error::InvalidConfig("grid axes must be strictly increasing".into()));
    }
    if let Some(&x) = xs.iter().find(|&&x| x <= 0.0) {
        return Err(Error::Domain {
            what: "longitudinal position x",
            value: x,
        });
    }
    let ny = ys.len();
    let samples = map_range(mode, xs.len() * ny, |i| {
        let (x, y) = (xs[i / ny], ys[i % ny]);
        let q = match provenance {
            Provenance::Exact => exact_q(cfg, x, y).ok(),
            Provenance::Approx => Some(approx_q(cfg, x, y, n_max)),
        };
        (q, in_neglected_zone(cfg, x, y))
    });
    Ok(PotentialGrid {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        q: samples.iter().map(|s| s.0.unwrap_or(f64::NAN)).collect(),
        valid: samples.iter().map(|s| s.0.is_some()).collect(),
        neglected: samples.iter().map(|s| s.1).collect(),
        provenance,
    })
}

/// Exact and approximate Q along y at fixed x, on the same samples.
pub fn cross_section(
    cfg: &ExperimentConfig,
    x: f64,
    y_range: (f64, f64),
    n_samples: usize,
    n_max: u32,
) -> Result<(PotentialGrid, PotentialGrid)> {
    let (lo, hi) = y_range;
    if n_samples < 2 || !(hi > lo) {
        return Err(Error::InvalidConfig(format!(
            "cross section needs y_max > y_min and ≥ 2 samples, got ({lo}, {hi}) with {n_samples}"
        )));
    }
    let ys: Vec<f64> = (0..n_samples)
        .map(|i| lo + (hi - lo) * i as f64 / (n_samples - 1) as f64)
        .collect();
    let exact = potential_grid(cfg, &[x], &ys, Provenance::Exact, n_max, Execution::Parallel)?;
    let approx = potential_grid(cfg, &[x], &ys, Provenance::Approx, n_max, Execution::Parallel)?;
    Ok((exact, approx))
}

/// A local minimum of a sampled section, refined by a parabola through the
/// three samples around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionMinimum {
    pub y: f64,
    pub q: f64,
}

/// Local minima of the first row of `grid` that reach below `threshold`
/// (erg, negative). Invalid samples break contiguity.
pub fn section_minima(grid: &PotentialGrid, threshold: f64) -> Vec<SectionMinimum> {
    let ys = &grid.ys;
    let mut out = Vec::new();
    for i in 1..ys.len().saturating_sub(1) {
        let (Some(l), Some(c), Some(r)) = (grid.get(0, i - 1), grid.get(0, i), grid.get(0, i + 1)) else {
            continue;
        };
        if !(c < l && c <= r && c < threshold) {
            continue;
        }
        out.push(parabolic_min(ys[i - 1], ys[i], ys[i + 1], l, c, r));
    }
    out
}

pub(crate) fn parabolic_min(y0: f64, y1: f64, y2: f64, f0: f64, f1: f64, f2: f64) -> SectionMinimum {
    let d1 = (f1 - f0) / (y1 - y0);
    let d2 = (f2 - f1) / (y2 - y1);
    let curv = (d2 - d1) / (y2 - y0);
    if !(curv > 0.0) {
        return SectionMinimum { y: y1, q: f1 };
    }
    // vertex of the interpolating parabola, in Newton form
    let y = (0.5 * (y0 + y1) - d1 / (2.0 * curv)).clamp(y0, y2);
    let q = f0 + d1 * (y - y0) + curv * (y - y0) * (y - y1);
    SectionMinimum { y, q }
}

/// The exact-Q canyon floor nearest θ_n·x, found by scanning ± half a
/// canyon spacing and refining with a parabola.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanyonFloor {
    pub n: i32,
    pub y: f64,
    pub q: f64,
    /// θ_n·x
    pub predicted_y: f64,
    /// −q / depth(n)
    pub depth_ratio: f64,
}

pub fn locate_canyon_floor(cfg: &ExperimentConfig, n: i32, x: f64) -> Result<CanyonFloor> {
    let model = canyon(cfg, n, x)?;
    let predicted_y = model.theta_n * x;
    let spacing = cfg.fringe_spacing(x);
    let step = model.width_scale.min(spacing) / 20.0;
    let half = (0.5 * spacing / step).ceil() as i64;
    let ys: Vec<f64> = (-half..=half).map(|k| predicted_y + k as f64 * step).collect();
    let qs: Vec<Option<f64>> = ys.iter().map(|&y| exact_q(cfg, x, y).ok()).collect();
    let (i, q) = qs
        .iter()
        .enumerate()
        .filter_map(|(i, q)| q.map(|q| (i, q)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::NearNode {
            x,
            y: predicted_y,
            r: 0.0,
            guard: 0.0,
        })?;
    let floor = match (i.checked_sub(1).and_then(|j| qs[j]), qs.get(i + 1).copied().flatten()) {
        (Some(l), Some(r)) => parabolic_min(ys[i - 1], ys[i], ys[i + 1], l, q, r),
        _ => SectionMinimum { y: ys[i], q },
    };
    // the parabola only locates the floor; report Q evaluated there
    let q = exact_q(cfg, x, floor.y).unwrap_or(floor.q).min(q);
    Ok(CanyonFloor {
        n,
        y: floor.y,
        q,
        predicted_y,
        depth_ratio: -q / model.depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Transverse Q from the analytic derivatives of the reduced field:
    /// R''/R = Re(φ''/φ) + Im(φ'/φ)².
    fn analytic_transverse_q(cfg: &ExperimentConfig, x: f64, y: f64) -> f64 {
        let [p, d1, d2] = FieldSlice::new(cfg, cfg.time_at(x)).derivatives(y);
        let k = constants();
        let r2 = (d2 / p).re + (d1 / p).im.powi(2);
        -0.5 * k.hbar * k.hbar_over_m() * r2
    }

    #[test]
    fn first_canyon_angle() {
        let cfg = ExperimentConfig::showcase();
        let c = canyon(&cfg, 1, 13.0).unwrap();
        assert!((c.theta_n - 1.399e-6).abs() < 0.001e-6, "{}", c.theta_n);
        assert_eq!(canyon(&cfg, -1, 13.0).unwrap().theta_n, -c.theta_n);
        assert!(matches!(canyon(&cfg, 0, 13.0), Err(Error::ZeroCanyonIndex)));
        assert!(matches!(canyon(&cfg, 1, 0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn first_canyon_depth_is_about_1_26_ev() {
        let cfg = ExperimentConfig::showcase();
        let c = canyon(&cfg, 1, 13.0).unwrap();
        let ev = constants().erg_to_ev(c.depth);
        assert!((ev - 1.26).abs() < 0.01, "{ev}");
    }

    #[test]
    fn fields_follow_their_definitions() {
        let cfg = ExperimentConfig::wide_slit();
        let k = constants();
        for n in [1, -2, 3, 7] {
            let c = canyon(&cfg, n, 20.0).unwrap();
            let an = f64::from(n.abs());
            let b4 = cfg.b.powi(4);
            let depth = k.hbar * k.hbar / k.m_e * c.a_hat.powi(2) / (6.0 * an.powi(3) * b4);
            let tau = 4.0 * an.powf(1.5) / 3f64.sqrt() * k.m_e / k.hbar * b4 / c.a_hat.powi(2);
            assert!(rel(c.depth, depth) < 1e-14);
            assert!(rel(c.tau_n, tau) < 1e-14);
            let d1 = canyon(&cfg, 1, 20.0).unwrap().depth;
            assert!(rel(c.depth / d1, an.powi(-3)) < 1e-14);
        }
    }

    #[test]
    fn canyons_broaden_downstream() {
        let cfg = ExperimentConfig::wide_slit();
        let (x1, x2) = (5.0, 39.0);
        let w1 = canyon(&cfg, 1, x1).unwrap().width_scale;
        let w2 = canyon(&cfg, 1, x2).unwrap().width_scale;
        let f = |x: f64| (1.0 + (cfg.time_at(x) / cfg.source_time).powi(2)).sqrt();
        assert!(rel(w2 / w1, f(x2) / f(x1)) < 1e-12);
    }

    #[test]
    fn q1d_shape() {
        let cfg = ExperimentConfig::wide_slit();
        let c = canyon(&cfg, 2, 13.0).unwrap();
        assert_eq!(q1d(&c, 0.0), -c.depth);
        let yh = c.half_depth_offset();
        assert!(rel(q1d(&c, yh), -0.5 * c.depth) < 1e-12);
        let y = 0.37 * c.width_scale;
        assert_eq!(q1d(&c, y), q1d(&c, -y));
        let h = 1e-4 * c.width_scale;
        let fd = (q1d(&c, y + h) - q1d(&c, y - h)) / (2.0 * h);
        assert!(rel(c.dq_dy(y), fd) < 1e-7);
    }

    #[test]
    fn approx_single_term_peak() {
        let cfg = ExperimentConfig::wide_slit();
        let x = 13.0;
        let c = canyon(&cfg, 1, x).unwrap();
        let y = x * c.theta_n.tan();
        let q = approx_q(&cfg, x, y, 1);
        // the mirrored n = −1 term is exponentially small here
        assert!(rel(q, -c.depth) < 1e-12);
    }

    #[test]
    fn approx_truncation_is_negligible() {
        let cfg = ExperimentConfig::wide_slit();
        let x = 13.0;
        let c = canyon(&cfg, 1, x).unwrap();
        for k in -5..=5 {
            let y = x * c.theta_n + k as f64 * 0.2 * c.width_scale;
            let q5 = approx_q(&cfg, x, y, 5);
            let q6 = approx_q(&cfg, x, y, 6);
            assert!(rel(q6, q5) < 1e-6);
        }
    }

    #[test]
    fn exact_matches_analytic_transverse_q() {
        let cfg = ExperimentConfig::wide_slit();
        for &x in &[13.0, 39.0] {
            let s = cfg.fringe_spacing(x);
            for &y in &[0.0, 0.5 * s, 0.93 * s, 1.5 * s, -2.47 * s] {
                let q = exact_q(&cfg, x, y).unwrap();
                let oracle = analytic_transverse_q(&cfg, x, y);
                let floor = 1e-2 * canyon(&cfg, 1, x).unwrap().depth;
                assert!((q - oracle).abs() < 1e-6 * oracle.abs().max(floor), "x={x} y={y}: {q:e} vs {oracle:e}");
            }
        }
    }

    #[test]
    fn plateau_is_shallow() {
        let cfg = ExperimentConfig::wide_slit();
        for &x in &[13.0, 39.0] {
            let depth1 = canyon(&cfg, 1, x).unwrap().depth;
            // midpoint between canyons 1 and 2 sits on the bright fringe at θ = spacing
            let y = cfg.fringe_angle() * x;
            let q = exact_q(&cfg, x, y).unwrap();
            assert!(q.abs() < 0.1 * depth1, "x={x}: {q:e} vs depth {depth1:e}");
        }
    }

    #[test]
    fn first_canyon_floor_matches_model() {
        let cfg = ExperimentConfig::wide_slit();
        let x = 13.0;
        let floor = locate_canyon_floor(&cfg, 1, x).unwrap();
        assert!((floor.y - floor.predicted_y).abs() < 0.1 * cfg.fringe_spacing(x));
        assert!((0.7..=1.3).contains(&floor.depth_ratio), "{}", floor.depth_ratio);
    }

    #[test]
    fn section_minima_align_with_canyons() {
        let cfg = ExperimentConfig::wide_slit();
        let x = 13.0;
        let s = cfg.fringe_spacing(x);
        let (exact, approx) = cross_section(&cfg, x, (-3.2 * s, 3.2 * s), 1601, DEFAULT_N_MAX).unwrap();
        let depth1 = canyon(&cfg, 1, x).unwrap().depth;
        let minima = section_minima(&exact, -0.01 * depth1);
        for n in [-3, -2, -1, 1, 2, 3] {
            let target = canyon(&cfg, n, x).unwrap().theta_n * x;
            let best = minima
                .iter()
                .map(|m| (m.y - target).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 0.1 * s, "n={n}: off by {best:e}");
        }
        let ny = approx.ys.len();
        for i in 0..ny {
            assert!((approx.q[i] - approx.q[ny - 1 - i]).abs() <= 1e-12 * depth1);
        }
    }

    #[test]
    fn grid_validation() {
        let cfg = ExperimentConfig::wide_slit();
        let e = potential_grid(&cfg, &[1.0, 1.0], &[0.0], Provenance::Approx, 5, Execution::Sequential);
        assert!(e.is_err());
        let e = potential_grid(&cfg, &[-1.0, 1.0], &[0.0], Provenance::Approx, 5, Execution::Sequential);
        assert!(e.is_err());
        let g = potential_grid(&cfg, &[5.0, 10.0], &[-1e-5, 0.0, 2e-5], Provenance::Exact, 5, Execution::Sequential)
            .unwrap();
        assert_eq!(g.q.len(), 6);
        assert_eq!(g.get(1, 2), exact_q(&cfg, 10.0, 2e-5).ok());
    }

    #[test]
    fn shadow_zone_only_near_field() {
        let cfg = ExperimentConfig::wide_slit();
        assert!(in_neglected_zone(&cfg, 0.01, 0.0));
        assert!(in_neglected_zone(&cfg, 0.01, cfg.a));
        assert!(!in_neglected_zone(&cfg, 39.0, 0.0));
    }

    #[test]
    fn node_errors() {
        let cfg = ExperimentConfig::showcase();
        assert!(matches!(exact_q(&cfg, 0.01, 0.0), Err(Error::NearNode { .. })));
        assert!(matches!(exact_q(&cfg, -1.0, 0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn finite_differences_converge_second_order() {
        // 20 canyon-region points (within a width of floors 1..3). Where the
        // h² error coefficient happens to be small, the O(h⁴) term and the
        // ~1e-9 rounding floor compete with it and the local slope dips;
        // the pooled error still halves at second order.
        use rand::{Rng, SeedableRng};
        let cfg = ExperimentConfig::wide_slit();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
        let (mut pooled1, mut pooled2) = (0.0, 0.0);
        for _ in 0..20 {
            let x: f64 = rng.random_range(5.0..39.0);
            let n: f64 = rng.random_range(1..=3) as f64;
            let offset: f64 = rng.random_range(-1.0..1.0);
            let y = (n - 0.5) * cfg.fringe_angle() * x + offset * cfg.canyon_width(x);
            let depth = canyon(&cfg, 1, x).unwrap().depth;
            let steps = laplacian_steps(&cfg, x, y).scaled(0.5);
            let oracle = analytic_transverse_q(&cfg, x, y);
            let e1 = (exact_q_with_steps(&cfg, x, y, steps).unwrap() - oracle).abs() / depth;
            let e2 = (exact_q_with_steps(&cfg, x, y, steps.scaled(0.5)).unwrap() - oracle).abs() / depth;
            let order = (e1 / e2).log2();
            assert!(order >= 1.5, "x={x} y={y:e}: order {order}");
            pooled1 += e1;
            pooled2 += e2;
        }
        let order = (pooled1 / pooled2).log2();
        assert!(order >= 1.9, "pooled order {order}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn exact_q_is_even(x in 5.0f64..39.0, u in 0.0f64..3.0) {
            let cfg = ExperimentConfig::wide_slit();
            let y = u * cfg.fringe_spacing(x);
            if let (Ok(a), Ok(b)) = (exact_q(&cfg, x, y), exact_q(&cfg, x, -y)) {
                prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()));
            }
        }

        #[test]
        fn approx_is_even_and_nonpositive(x in 1.0f64..39.0, y in -4e-4f64..4e-4) {
            let cfg = ExperimentConfig::wide_slit();
            let q = approx_q(&cfg, x, y, DEFAULT_N_MAX);
            prop_assert!(q <= 0.0);
            prop_assert_eq!(q, approx_q(&cfg, x, -y, DEFAULT_N_MAX));
        }
    }
}
