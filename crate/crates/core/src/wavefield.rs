//! Two-slit wavefunction with Gaussian slit transparency.
//!
//! Each slit amplitude is the closed-form composition of the free
//! propagator from the point source to the slit plane, the transparency
//! G(y) = exp(−y²/2b²) centred on the slit, and the free propagator to
//! (x, y), with the paraxial identification t = x/v_x.
//!
//! The printed form of that amplitude subtracts two large phases that
//! nearly cancel. Here it is rewritten as a complex quadratic in the
//! distance ξ from the beam centre c = ±a(1 + t/T):
//!
//! ```text
//! ψ_s = N(t) · exp(iκa²(1/T + t/T²)/2) · exp(Γ(t) ξ² + i s κ a ξ / T) · e^{iΦ(x)}
//! Γ(t) = κ (i/b² + κ/T) / (2 (t/b² − iκ(1 + t/T))),   κ = m/ħ
//! ```
//!
//! which is regular down to t = 0. The slit-independent phase
//! Φ(x) = κ(X²/T + x²/t)/2 is large (~1e11 rad) and is computed once and
//! shared by both slits, so it cannot perturb R or the velocity field.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::constants::constants;
use crate::error::{Error, Result};

/// Guard band for nodes, relative to the largest |ψ| at the same x.
pub const NODE_GUARD: f64 = 1e-8;

/// Geometry and kinematics of one double-slit setup (CGS).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    /// Slit half-separation, cm.
    pub a: f64,
    /// Slit half-width (Gaussian transparency scale), cm.
    pub b: f64,
    /// Source-to-slit distance X, cm.
    pub source_distance: f64,
    /// Source-to-slit travel time T, s.
    pub source_time: f64,
    /// Longitudinal speed behind the slits, cm/s.
    pub vx: f64,
    /// Slit-plane-to-screen distance, cm.
    pub screen_x: f64,
}

impl ExperimentConfig {
    /// Builds a validated config with X = v_x·T.
    pub fn new(a: f64, b: f64, source_time: f64, vx: f64, screen_x: f64) -> Result<Self> {
        let cfg = Self {
            a,
            b,
            source_distance: vx * source_time,
            source_time,
            vx,
            screen_x,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_source_distance(self, source_distance: f64) -> Result<Self> {
        let cfg = Self {
            source_distance,
            ..self
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a", self.a),
            ("b", self.b),
            ("X", self.source_distance),
            ("T", self.source_time),
            ("v_x", self.vx),
            ("screen_x", self.screen_x),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} > 0 required, got {v}")));
            }
        }
        if self.a <= self.b {
            return Err(Error::InvalidConfig(format!(
                "slits overlap: need a > b, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        Ok(())
    }

    /// The showcase set: v_x = 1.3e10 cm/s, a = 1e-4 cm, b = 1e-6 cm,
    /// T = 1e-8 s, screen at 13 cm (t = 1e-9 s).
    pub fn showcase() -> Self {
        Self::new(1e-4, 1e-6, 1e-8, 1.3e10, 13.0).expect("valid preset")
    }

    /// The potential-landscape set: b = 1e-5 cm, screen at 39 cm (t = 3e-9 s).
    pub fn wide_slit() -> Self {
        Self::new(1e-4, 1e-5, 1e-8, 1.3e10, 39.0).expect("valid preset")
    }

    /// Propagation time from the slit plane to `x`.
    pub fn time_at(&self, x: f64) -> f64 {
        x / self.vx
    }

    /// Angular spacing between adjacent dark fringes, πħ/(m v_x a).
    pub fn fringe_angle(&self) -> f64 {
        PI * constants().hbar_over_m() / (self.vx * self.a)
    }

    /// Transverse distance between adjacent dark fringes at `x`.
    pub fn fringe_spacing(&self, x: f64) -> f64 {
        self.fringe_angle() * x
    }

    /// â = a / √(1 + t²/T²) at `x`.
    pub fn a_hat(&self, x: f64) -> f64 {
        let r = self.time_at(x) / self.source_time;
        self.a / (1.0 + r * r).sqrt()
    }

    /// Gaussian width 2√2·b²/â of a canyon at `x`.
    pub fn canyon_width(&self, x: f64) -> f64 {
        2.0 * 2f64.sqrt() * self.b * self.b / self.a_hat(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slit {
    A,
    B,
}

impl Slit {
    pub fn sign(self) -> f64 {
        match self {
            Slit::A => 1.0,
            Slit::B => -1.0,
        }
    }
}

/// Whether `WavePoint::s` is continuous with its neighbours in a sweep or
/// only a principal value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseBranch {
    Principal,
    Unwrapped,
}

/// Field values and polar decomposition at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePoint {
    pub x: f64,
    pub y: f64,
    pub psi_a: Complex64,
    pub psi_b: Complex64,
    pub psi: Complex64,
    /// |ψ|
    pub r: f64,
    /// Action S with ψ = R·exp(iS/ħ), erg·s.
    pub s: f64,
    /// R²
    pub p: f64,
    /// R fell below the node guard; `s` is unreliable.
    pub near_node: bool,
    pub branch: PhaseBranch,
}

/// The field at one propagation time, with all y-independent pieces
/// precomputed. Valid for t ≥ 0.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FieldSlice {
    gamma: Complex64,
    lin: f64,
    center: f64,
    /// N(t)·exp(iκa²(1/T + t/T²)/2)
    norm: Complex64,
    guard: f64,
}

impl FieldSlice {
    pub(crate) fn new(cfg: &ExperimentConfig, t: f64) -> Self {
        let k = constants();
        let kappa = k.m_e / k.hbar;
        let (a, b2, big_t) = (cfg.a, cfg.b * cfg.b, cfg.source_time);
        let i = Complex64::i();
        let gamma = 0.5 * kappa * (i / b2 + kappa / big_t)
            / Complex64::new(t / b2, -kappa * (1.0 + t / big_t));
        // √(m/2πiħ) · [T + t + iħtT/(mb²)]^(-1/2), principal roots
        let root = (Complex64::new(0.0, -1.0) * (kappa / (2.0 * PI))).sqrt();
        let bracket = Complex64::new(big_t + t, t * big_t / (kappa * b2));
        let prefactor = root / bracket.sqrt();
        let phase = (0.5 * kappa * a * a * (1.0 / big_t + t / (big_t * big_t))).rem_euclid(TAU);
        let norm = prefactor * Complex64::from_polar(1.0, phase);
        Self {
            gamma,
            lin: kappa * a / big_t,
            center: a * (1.0 + t / big_t),
            norm,
            guard: NODE_GUARD * 2.0 * prefactor.norm(),
        }
    }

    /// Node guard ε_R at this slice.
    pub(crate) fn guard(&self) -> f64 {
        self.guard
    }

    /// (ψ_s, ∂_yψ_s) without the shared phase e^{iΦ(x)}.
    pub(crate) fn slit(&self, slit: Slit, y: f64) -> (Complex64, Complex64) {
        let s = slit.sign();
        let xi = y - s * self.center;
        let lin = Complex64::new(0.0, s * self.lin);
        let psi = self.norm * (self.gamma * xi * xi + lin * xi).exp();
        let dlog = 2.0 * self.gamma * xi + lin;
        (psi, dlog * psi)
    }

    /// φ, ∂_yφ and ∂²_yφ of the reduced total field.
    #[cfg(test)]
    pub(crate) fn derivatives(&self, y: f64) -> [Complex64; 3] {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for slit in [Slit::A, Slit::B] {
            let s = slit.sign();
            let xi = y - s * self.center;
            let lin = Complex64::new(0.0, s * self.lin);
            let psi = self.norm * (self.gamma * xi * xi + lin * xi).exp();
            let q1 = 2.0 * self.gamma * xi + lin;
            out[0] += psi;
            out[1] += q1 * psi;
            out[2] += (q1 * q1 + 2.0 * self.gamma) * psi;
        }
        out
    }

    /// Reduced total field φ and ∂_yφ.
    pub(crate) fn total(&self, y: f64) -> (Complex64, Complex64) {
        let (pa, da) = self.slit(Slit::A, y);
        let (pb, db) = self.slit(Slit::B, y);
        (pa + pb, da + db)
    }

    /// |ψ| at y.
    pub(crate) fn amplitude(&self, y: f64) -> f64 {
        self.total(y).0.norm()
    }

    /// Probability current (ħ/m)·Im(φ*∂_yφ), and |φ|².
    pub(crate) fn current(&self, y: f64) -> (f64, f64) {
        let (psi, dpsi) = self.total(y);
        let k = constants();
        ((psi.conj() * dpsi).im * k.hbar_over_m(), psi.norm_sqr())
    }

    /// Transverse Bohmian velocity v_y = (ħ/m)·Im(φ*∂_yφ)/|φ|² and |φ|.
    pub(crate) fn velocity(&self, y: f64) -> (f64, f64) {
        let (j, p) = self.current(y);
        (j / p, p.sqrt())
    }

    /// Mixture parameters of |ψ_s|²: beam centre and standard deviation.
    pub(crate) fn beam_moments(&self) -> (f64, f64) {
        // |exp(Γξ²)|² = exp(2 Re Γ ξ²)
        (self.center, (-0.25 / self.gamma.re).sqrt())
    }
}

fn shared_phase(cfg: &ExperimentConfig, x: f64) -> f64 {
    let k = constants();
    let kappa = k.m_e / k.hbar;
    let from_source =
        (0.5 * kappa * cfg.source_distance * cfg.source_distance / cfg.source_time).rem_euclid(TAU);
    // x²/t = x·v_x
    let to_point = (0.5 * kappa * x * cfg.vx).rem_euclid(TAU);
    from_source + to_point
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

/// Single-slit amplitude ψ_A or ψ_B at (x, y).
pub fn slit_amplitude(cfg: &ExperimentConfig, slit: Slit, x: f64, y: f64) -> Result<Complex64> {
    check_x(x)?;
    let slice = FieldSlice::new(cfg, cfg.time_at(x));
    Ok(slice.slit(slit, y).0 * Complex64::from_polar(1.0, shared_phase(cfg, x)))
}

/// ψ = ψ_A + ψ_B with its polar decomposition. `s` is the principal value.
pub fn total_field(cfg: &ExperimentConfig, x: f64, y: f64) -> Result<WavePoint> {
    check_x(x)?;
    let slice = FieldSlice::new(cfg, cfg.time_at(x));
    Ok(point(&slice, shared_phase(cfg, x), x, y))
}

fn point(slice: &FieldSlice, phase: f64, x: f64, y: f64) -> WavePoint {
    let rot = Complex64::from_polar(1.0, phase);
    let psi_a = slice.slit(Slit::A, y).0 * rot;
    let psi_b = slice.slit(Slit::B, y).0 * rot;
    let psi = psi_a + psi_b;
    let r = psi.norm();
    WavePoint {
        x,
        y,
        psi_a,
        psi_b,
        psi,
        r,
        s: constants().hbar * psi.arg(),
        p: r * r,
        near_node: r < slice.guard(),
        branch: PhaseBranch::Principal,
    }
}

/// Evaluates the field along `ys` at fixed `x`, unwrapping S so it is
/// continuous from one sample to the next.
pub fn field_sweep(cfg: &ExperimentConfig, x: f64, ys: &[f64]) -> Result<Vec<WavePoint>> {
    check_x(x)?;
    let slice = FieldSlice::new(cfg, cfg.time_at(x));
    let phase = shared_phase(cfg, x);
    let hbar = constants().hbar;
    let mut out: Vec<WavePoint> = Vec::with_capacity(ys.len());
    let mut prev: Option<f64> = None;
    for &y in ys {
        let mut wp = point(&slice, phase, x, y);
        let mut theta = wp.psi.arg();
        if let Some(p) = prev {
            theta += TAU * ((p - theta) / TAU).round();
        }
        prev = Some(theta);
        wp.s = hbar * theta;
        wp.branch = PhaseBranch::Unwrapped;
        out.push(wp);
    }
    Ok(out)
}

/// Default continuity stencil: h_t = t/1000, h_y = min(canyon width, fringe)/50.
pub fn default_continuity_steps(cfg: &ExperimentConfig, x: f64) -> (f64, f64) {
    let h_y = cfg.canyon_width(x).min(cfg.fringe_spacing(x)) / 50.0;
    (cfg.time_at(x) * 1e-3, h_y)
}

/// Normalized residual |∂P/∂t + ∂_y(P v_y)|·t/P of the transverse
/// continuity equation, by central differences with steps `(h_t, h_y)`.
pub fn continuity_residual(cfg: &ExperimentConfig, x: f64, y: f64, h_t: f64, h_y: f64) -> Result<f64> {
    check_x(x)?;
    let t = cfg.time_at(x);
    if !(h_t > 0.0 && h_t < t && h_y > 0.0) {
        return Err(Error::Domain {
            what: "continuity step",
            value: h_t,
        });
    }
    let now = FieldSlice::new(cfg, t);
    let later = FieldSlice::new(cfg, t + h_t);
    let earlier = FieldSlice::new(cfg, t - h_t);
    let guard = now.guard().min(later.guard()).min(earlier.guard());

    let (j_up, p_up) = now.current(y + h_y);
    let (j_dn, p_dn) = now.current(y - h_y);
    let p_later = later.amplitude(y).powi(2);
    let p_earlier = earlier.amplitude(y).powi(2);
    let p = now.amplitude(y).powi(2);
    let g2 = guard * guard;
    if [p_up, p_dn, p_later, p_earlier, p].iter().any(|&v| v < g2) {
        return Err(Error::StencilCrossesNode { x, y });
    }
    let dp_dt = (p_later - p_earlier) / (2.0 * h_t);
    let dj_dy = (j_up - j_dn) / (2.0 * h_y);
    Ok((dp_dt + dj_dy).abs() * t / p)
}
