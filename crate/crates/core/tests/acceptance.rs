//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 7, 8 and 11 are known to fail as stated (see README); every
//! other failure makes the target exit non-zero.

use std::process::ExitCode;
use std::time::Instant;

use pilotwave::constants::constants;
use pilotwave::copenhagen::{compare, radiation_bound, CopenhagenParams, BOHM_SCALING, COPENHAGEN_SCALING};
use pilotwave::dynamics::{ensemble_run, histogram_minimum, ks_distance, EnsembleOptions, EnsembleRun, TrajectoryOptions};
use pilotwave::exec::Execution;
use pilotwave::qpotential::{canyon, canyon_at_time, locate_canyon_floor};
use pilotwave::radiation::{
    closed_spectral_energy, crossing_energy_closed, crossing_energy_quadrature, emission_summary,
    numeric_spectral_energy, pattern_peak, photon_pattern_with, spectral_energy, spectrum_argmax, spectrum_closed,
    spectrum_numeric, PhotonOptions, PhotonSampling, TimeMap,
};
use pilotwave::validation::{
    bessel_derivative_residual, bessel_max_error, continuity_order, field_oracle, ordering_violations,
    sorted_trajectories,
};
use pilotwave::wavefield::{ExperimentConfig, Slit};

const KNOWN_RED: [u32; 3] = [7, 8, 11];

struct Report {
    failures: Vec<u32>,
}

impl Report {
    fn line(&mut self, id: u32, pass: bool, text: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag}  {text}");
        if !pass {
            self.failures.push(id);
        }
    }

    fn error(&mut self, id: u32, e: pilotwave::Error) {
        self.line(id, false, format!("error: {e}"));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn ev(erg: f64) -> f64 {
    constants().erg_to_ev(erg)
}

type R<T> = pilotwave::Result<T>;
type Criterion = fn() -> R<(bool, String)>;

fn c1_energy() -> R<(bool, String)> {
    let c = canyon(&ExperimentConfig::showcase(), 1, 13.0)?;
    let closed = crossing_energy_closed(&c);
    let quad = crossing_energy_quadrature(&c)?;
    let pass = rel(ev(closed), 1.7e-8) <= 0.05 && rel(quad, closed) <= 1e-3;
    Ok((
        pass,
        format!(
            "E1 = {:.4e} eV (target 1.7e-8 +-5%), quadrature/closed - 1 = {:.1e} (<= 1e-3)",
            ev(closed),
            quad / closed - 1.0
        ),
    ))
}

fn c2_peak() -> R<(bool, String)> {
    let r = emission_summary(&ExperimentConfig::showcase(), 1)?;
    let (e, l) = (r.hbar_omega_max_ev(), r.lambda_max_angstrom());
    Ok((
        rel(e, 1.9) <= 0.05 && rel(l, 6200.0) <= 0.05,
        format!("hbar*omega_max = {e:.4} eV (1.9 +-5%), lambda_max = {l:.0} A (6200 +-5%)"),
    ))
}

fn c3_probability() -> R<(bool, String)> {
    let p = emission_summary(&ExperimentConfig::showcase(), 1)?.emission_probability;
    Ok((
        (1e-8 / 1.3..=1.3e-8).contains(&p),
        format!("E1/(hbar*omega_max) = {p:.3e} (1e-8 within x1.3)"),
    ))
}

fn c4_beta() -> R<(bool, String)> {
    let b = emission_summary(&ExperimentConfig::showcase(), 1)?.beta_max;
    Ok((rel(b, 2e-3) <= 0.15, format!("beta_max = {b:.4e} (2e-3 +-15%)")))
}

fn c5_depth() -> R<(bool, String)> {
    let r = emission_summary(&ExperimentConfig::showcase(), 1)?;
    let ratio = r.depth / (constants().hbar * r.omega_max);
    Ok((
        rel(ratio, 0.64) <= 0.02,
        format!("|Q1(0)|/(hbar*omega_max) = {ratio:.4} (0.64 +-2%)"),
    ))
}

fn c6_spectral() -> R<(bool, String)> {
    let c = canyon(&ExperimentConfig::showcase(), 1, 13.0)?;
    let eq17 = spectral_energy(&c);
    // analytic ω-integral: (64/27π)(e²/c³)(b⁴/â²)·(π²/32)/τ³
    let k = constants();
    let pi = std::f64::consts::PI;
    let analytic = 64.0 / (27.0 * pi) * k.e_charge.powi(2) / k.c_light.powi(3) * c.b.powi(4) / c.a_hat.powi(2) * pi
        * pi
        / 32.0
        / c.tau_n.powi(3);
    let ratio = eq17 / crossing_energy_closed(&c);
    // trapezoid over 4096 log-spaced spectrum samples on [1e-3, 50]/τ
    let n = 4096;
    let xs: Vec<f64> = (0..n).map(|i| 1e-3 * (5e4f64).powf(i as f64 / (n - 1) as f64)).collect();
    let mut sampled = 0.0;
    let mut prev = spectrum_closed(&c, xs[0] / c.tau_n)?.de_domega;
    for w in xs.windows(2) {
        let next = spectrum_closed(&c, w[1] / c.tau_n)?.de_domega;
        sampled += 0.5 * (prev + next) * (w[1] - w[0]) / c.tau_n;
        prev = next;
    }
    let quad = closed_spectral_energy(&c, 50.0)?;
    let pass = rel(analytic, eq17) <= 1e-12
        && (ratio - 0.863).abs() <= 1e-3
        && (1.0 - ratio).abs() <= 0.15
        && rel(sampled, eq17) <= 1e-3
        && rel(quad, eq17) <= 1e-4;
    Ok((
        pass,
        format!(
            "analytic/integral form - 1 = {:.1e}, integral/closed form = {ratio:.4} (0.863, within 15%), sampled/integral - 1 = {:.1e} (<= 1e-3), adaptive/integral - 1 = {:.1e}",
            analytic / eq17 - 1.0,
            sampled / eq17 - 1.0,
            quad / eq17 - 1.0
        ),
    ))
}

fn c7_fourier() -> R<(bool, String)> {
    let c = canyon(&ExperimentConfig::showcase(), 1, 13.0)?;
    let mut worst = 0.0f64;
    for i in 0..30 {
        let w = (0.1 + 2.9 * i as f64 / 29.0) / c.tau_n;
        let num = spectrum_numeric(&c, w, TimeMap::Sinh)?.de_domega;
        worst = worst.max(rel(num, spectrum_closed(&c, w)?.de_domega));
    }
    let ratio = numeric_spectral_energy(&c, TimeMap::Exact)? / crossing_energy_quadrature(&c)?;
    Ok((
        worst <= 3e-3 && (ratio - 1.0).abs() <= 0.05,
        format!(
            "sinh map vs closed form: max rel {worst:.1e} (<= 3e-3); exact-map energy / quadrature energy = {ratio:.5} (1 +-5%)"
        ),
    ))
}

fn c8_argmax() -> R<(bool, String)> {
    let c = canyon(&ExperimentConfig::showcase(), 1, 13.0)?;
    let x = spectrum_argmax(&c)?;
    Ok((
        (x - 0.557).abs() <= 0.01 && rel(x, 0.6) <= 0.1,
        format!("argmax omega*tau1 = {x:.5} (target 0.557 +-0.01; within 10% of 3/5: {})", rel(x, 0.6) <= 0.1),
    ))
}

fn c9_scaling() -> R<(bool, String)> {
    let cfg = ExperimentConfig::showcase();
    let e1 = crossing_energy_closed(&canyon(&cfg, 1, 13.0)?);
    let mut n_err = 0.0f64;
    for n in 1..=3 {
        let en = crossing_energy_closed(&canyon(&cfg, n, 13.0)?);
        n_err = n_err.max(rel(en / e1, f64::from(n).powf(-4.5)));
    }
    let base = canyon_at_time(&cfg, 1, 1e-9, constants())?;
    let mut h_err = 0.0f64;
    for f in [0.5, 2.0, 3.0] {
        let s = canyon_at_time(&cfg, 1, 1e-9, &constants().with_scaled_hbar(f))?;
        h_err = h_err.max(rel(crossing_energy_closed(&s) / crossing_energy_closed(&base), f * f * f));
        h_err = h_err.max(rel(
            crossing_energy_quadrature(&s)? / crossing_energy_quadrature(&base)?,
            f * f * f,
        ));
    }
    let e0 = crossing_energy_quadrature(&canyon_at_time(&cfg, 1, 0.0, constants())?)?;
    let mut t_err = 0.0f64;
    for t in [1e-9, 5e-9, 1e-8, 3e-8] {
        let r = t / cfg.source_time;
        let e = crossing_energy_quadrature(&canyon_at_time(&cfg, 1, t, constants())?)?;
        t_err = t_err.max(rel(e / e0, (1.0 + r * r).powi(-2)));
    }
    Ok((
        n_err <= 1e-12 && h_err <= 1e-10 && t_err <= 1e-3,
        format!("|n|^-4.5 max rel {n_err:.1e}; hbar^3 max rel {h_err:.1e} (<= 1e-10); t-sweep max rel {t_err:.1e} (<= 1e-3)"),
    ))
}

fn c10_trajectories(run: &EnsembleRun) -> R<(bool, String)> {
    let cfg = ExperimentConfig::wide_slit();
    let trs = sorted_trajectories(&cfg, 100, 5, &TrajectoryOptions::default(), Execution::Parallel)?;
    let violations = ordering_violations(&trs, 400);
    let h = &run.histogram;
    let landed: Vec<f64> = run.landings.iter().flatten().copied().collect();
    let range = (h.bin_edges[0], h.bin_edges[h.bin_edges.len() - 1]);
    let ks = ks_distance(&cfg, &landed, range);
    let spacing = cfg.fringe_spacing(cfg.screen_x);
    let mut worst = 0.0f64;
    let mut found = true;
    for n in [-3, -2, -1, 1, 2, 3] {
        let target = canyon(&cfg, n, cfg.screen_x)?.theta_n * cfg.screen_x;
        match histogram_minimum(h, target, 0.5 * spacing) {
            Some(y) => worst = worst.max((y - target).abs() / h.bin_width()),
            None => found = false,
        }
    }
    Ok((
        violations == 0 && ks < 0.05 && found && worst <= 0.5,
        format!(
            "wide-slit set: {violations} ordering violations (100 trajectories, 400 common x); {} landings, {} aborted, KS = {ks:.4} (< 0.05); minima n = +-1..3 max offset {worst:.3} bin (<= 0.5)",
            h.n_samples, h.failures
        ),
    ))
}

fn c11_complementarity(run: &EnsembleRun) -> R<(bool, String)> {
    let cfg = ExperimentConfig::wide_slit();
    let h = &run.histogram;
    let range = (h.bin_edges[0], h.bin_edges[h.bin_edges.len() - 1]);
    let photons = photon_pattern_with(
        &cfg,
        100_000,
        2024,
        &PhotonOptions {
            sampling: PhotonSampling::Forced,
            screen_range: Some(range),
            screen_bins: Some(h.counts.len()),
            ..PhotonOptions::default()
        },
    )?;
    let spacing = cfg.fringe_spacing(cfg.screen_x);
    let mut parts = Vec::new();
    let mut pass = true;
    for n in 1..=3 {
        let target = canyon(&cfg, n, cfg.screen_x)?.theta_n * cfg.screen_x;
        let Some(minimum) = histogram_minimum(h, target, 0.5 * spacing) else {
            pass = false;
            parts.push(format!("n={n}: no electron minimum"));
            continue;
        };
        match pattern_peak(&photons.screen, minimum, spacing, 4.0) {
            Some(p) if (p.y - minimum).abs() <= 0.5 * spacing => {
                parts.push(format!("n={n}: peak {:.2} fringe off ({:.1} sigma)", (p.y - minimum) / spacing, p.significance))
            }
            Some(p) => {
                pass = false;
                parts.push(format!("n={n}: peak {:.2} fringe off", (p.y - minimum) / spacing));
            }
            None => {
                pass = false;
                parts.push(format!("n={n}: no peak above 4 sigma within a fringe"));
            }
        }
    }
    Ok((
        pass,
        format!(
            "forced emission, 1e5 electrons, {} of {} photons on screen: {}",
            photons.on_screen,
            photons.emitted,
            parts.join("; ")
        ),
    ))
}

fn c12_landscape() -> R<(bool, String)> {
    let cfg = ExperimentConfig::wide_slit();
    let x = 13.0;
    let spacing = cfg.fringe_spacing(x);
    let mut off = 0.0f64;
    let mut depth = 0.0f64;
    let mut ratios = Vec::new();
    for n in 1..=3 {
        let f = locate_canyon_floor(&cfg, n, x)?;
        off = off.max((f.y - f.predicted_y).abs() / spacing);
        depth = depth.max((f.depth_ratio - 1.0).abs());
        ratios.push(format!("{:.3}", f.depth_ratio));
    }
    let mut far = Vec::new();
    for n in 1..=3 {
        far.push(format!("{:.3}", locate_canyon_floor(&cfg, n, cfg.screen_x)?.depth_ratio));
    }
    Ok((
        off <= 0.1 && depth <= 0.3,
        format!(
            "x = 13 cm: floor offset max {off:.4} spacing (<= 0.1), exact/approx depth {} (within 30%); at 39 cm: {}",
            ratios.join(", "),
            far.join(", ")
        ),
    ))
}

fn c13_copenhagen() -> R<(bool, String)> {
    let cfg = ExperimentConfig::showcase();
    let bound = ev(radiation_bound(&cfg, &CopenhagenParams::minimal(&cfg))?);
    let c = compare(&cfg)?;
    let scalings = c.bohm_scaling == BOHM_SCALING
        && c.copenhagen_scaling == COPENHAGEN_SCALING
        && (BOHM_SCALING.a, BOHM_SCALING.b) == (4, -8)
        && (COPENHAGEN_SCALING.a, COPENHAGEN_SCALING.b) == (-2, 0);
    Ok((
        rel(bound, 1.6e-10) <= 0.05 && scalings,
        format!(
            "bound = {bound:.4e} eV (1.6e-10 +-5%); Bohm/bound = {:.1}; exponents Bohm (a {:+}, b {:+}) vs Copenhagen (a {:+}, b {:+})",
            c.ratio, c.bohm_scaling.a, c.bohm_scaling.b, c.copenhagen_scaling.a, c.copenhagen_scaling.b
        ),
    ))
}

fn c14_bessel() -> R<(bool, String)> {
    let (e0, e1) = bessel_max_error(500)?;
    let mut xs = vec![0.5, 1.0, 2.0];
    xs.extend((0..20).map(|i| 0.05 + 39.95 * ((i as f64 * 0.618_033_988_75) % 1.0)));
    let d = bessel_derivative_residual(&xs)?;
    Ok((
        e0 <= 1e-10 && e1 <= 1e-10 && d <= 1e-6,
        format!("max rel error K0 {e0:.1e}, K1 {e1:.1e} on [1e-6, 50] (<= 1e-10); |K1 + dK0/dx| max {d:.1e} (<= 1e-6)"),
    ))
}

fn c15_field() -> R<(bool, String)> {
    let cfg = ExperimentConfig::wide_slit();
    let probes = [
        (13.0, 2e-5, Slit::A),
        (13.0, 2e-5, Slit::B),
        (13.0, -7e-5, Slit::A),
        (13.0, -7e-5, Slit::B),
        (39.0, 1.5e-4, Slit::A),
        (39.0, -3.3e-4, Slit::B),
        (2.0, 1.1e-4, Slit::A),
        (2.0, -0.9e-4, Slit::B),
        (26.0, 0.0, Slit::A),
        (26.0, 2.2e-4, Slit::B),
    ];
    let worst = field_oracle(&cfg, &probes)?
        .iter()
        .map(|p| p.rel_error)
        .fold(0.0, f64::max);
    let x = 13.0;
    let f = cfg.fringe_spacing(x);
    let mut order = f64::INFINITY;
    for y in [f, 0.0, -2.0 * f] {
        order = order.min(continuity_order(&cfg, x, y)?.0);
    }
    Ok((
        worst <= 1e-6 && order >= 1.9,
        format!("kernel-quadrature oracle at 10 probes: max rel {worst:.1e} (<= 1e-6); continuity order min {order:.3} (>= 1.9)"),
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut report = Report { failures: Vec::new() };
    let simple: [(u32, Criterion); 9] = [
        (1, c1_energy),
        (2, c2_peak),
        (3, c3_probability),
        (4, c4_beta),
        (5, c5_depth),
        (6, c6_spectral),
        (7, c7_fourier),
        (8, c8_argmax),
        (9, c9_scaling),
    ];
    for (id, f) in simple {
        match f() {
            Ok((pass, text)) => report.line(id, pass, text),
            Err(e) => report.error(id, e),
        }
    }

    let cfg = ExperimentConfig::wide_slit();
    match ensemble_run(&cfg, 100_000, 42, &EnsembleOptions::default()) {
        Ok(run) => {
            for (id, r) in [(10, c10_trajectories(&run)), (11, c11_complementarity(&run))] {
                match r {
                    Ok((pass, text)) => report.line(id, pass, text),
                    Err(e) => report.error(id, e),
                }
            }
        }
        Err(e) => {
            report.error(10, e.clone());
            report.error(11, e);
        }
    }

    let rest: [(u32, Criterion); 4] =
        [(12, c12_landscape), (13, c13_copenhagen), (14, c14_bessel), (15, c15_field)];
    for (id, f) in rest {
        match f() {
            Ok((pass, text)) => report.line(id, pass, text),
            Err(e) => report.error(id, e),
        }
    }

    let unexpected: Vec<u32> = report
        .failures
        .iter()
        .copied()
        .filter(|id| !KNOWN_RED.contains(id))
        .collect();
    println!(
        "acceptance: {} of 15 pass; failing {:?} (known as stated: {:?}); {:.1} s",
        15 - report.failures.len(),
        report.failures,
        KNOWN_RED,
        start.elapsed().as_secs_f64()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
