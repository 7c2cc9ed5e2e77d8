//! One function per subcommand. Each writes its files under the output
//! prefix and returns the paths written.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use pilotwave::constants::{constants, CM_PER_ANGSTROM};
use pilotwave::copenhagen::{compare, scattering_shape};
use pilotwave::dynamics::{
    ensemble_run, histogram_minimum, integrate_trajectory, ks_distance, sample_initial_positions, EnsembleOptions,
};
use pilotwave::qpotential::{canyon, cross_section, potential_grid, Provenance, DEFAULT_N_MAX};
use pilotwave::radiation::{
    emission_summary, photon_pattern_with, spectrum_closed, spectrum_numeric, PhotonOptions, TimeMap,
};
use pilotwave::validation::{run_suite, Check};
use pilotwave::wavefield::field_sweep;
use pilotwave::exec::Execution;

use crate::config::RunConfig;
use crate::output::{num, Csv, Report};

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l, h) = (lo.ln(), hi.ln());
    (0..n).map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp()).collect()
}

pub fn field(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let ys = linspace(-cfg.grid_y_cm, cfg.grid_y_cm, cfg.field_ny);
    let points = field_sweep(&cfg.experiment, cfg.field_x_cm, &ys).context("wavefield: field sweep")?;
    let mut csv = Csv::create(
        out,
        "field.csv",
        &["y_cm", "psi_re_per_cm", "psi_im_per_cm", "R_per_cm", "S_erg_s", "P_per_cm2", "near_node"],
    )?;
    for p in &points {
        csv.row([
            num(p.y),
            num(p.psi.re),
            num(p.psi.im),
            num(p.r),
            num(p.s),
            num(p.p),
            u8::from(p.near_node).to_string(),
        ])?;
    }
    Ok(vec![csv.finish()?])
}

pub fn potential(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let e = &cfg.experiment;
    let xs: Vec<f64> = (1..=cfg.grid_nx)
        .map(|i| e.screen_x * i as f64 / cfg.grid_nx as f64)
        .collect();
    let ys = linspace(-cfg.grid_y_cm, cfg.grid_y_cm, cfg.grid_ny);
    let grid = potential_grid(e, &xs, &ys, Provenance::Exact, DEFAULT_N_MAX, Execution::Parallel)
        .context("qpotential: exact potential grid")?;
    let mut csv = Csv::create(out, "potential.csv", &["x_cm", "y_cm", "Q_erg", "provenance"])?;
    for (ix, &x) in grid.xs.iter().enumerate() {
        for (iy, &y) in grid.ys.iter().enumerate() {
            let q = grid.get(ix, iy).unwrap_or(f64::NAN);
            csv.row([num(x), num(y), num(q), grid.provenance.label().to_string()])?;
        }
    }
    let grid_path = csv.finish()?;

    let (exact, approx) = cross_section(
        e,
        cfg.section_x_cm,
        (-cfg.grid_y_cm, cfg.grid_y_cm),
        cfg.section_ny,
        DEFAULT_N_MAX,
    )
    .context("qpotential: cross section")?;
    let mut csv = Csv::create(out, "section.csv", &["y_cm", "Q_exact_erg", "Q_approx_erg"])?;
    for (iy, &y) in exact.ys.iter().enumerate() {
        csv.row([
            num(y),
            num(exact.get(0, iy).unwrap_or(f64::NAN)),
            num(approx.get(0, iy).unwrap_or(f64::NAN)),
        ])?;
    }
    Ok(vec![grid_path, csv.finish()?])
}

pub fn trajectories(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let e = &cfg.experiment;
    let run = ensemble_run(e, cfg.n_samples, cfg.seed, &EnsembleOptions::default())
        .context("dynamics: landing ensemble")?;
    let h = &run.histogram;
    let mut paths = Vec::new();
    let mut csv = Csv::create(out, "histogram.csv", &["bin_left_cm", "bin_right_cm", "count"])?;
    for (i, c) in h.counts.iter().enumerate() {
        csv.row([num(h.bin_edges[i]), num(h.bin_edges[i + 1]), c.to_string()])?;
    }
    paths.push(csv.finish()?);

    let starts = sample_initial_positions(e, cfg.n_trajectories, cfg.seed);
    for (k, &y0) in starts.iter().enumerate() {
        let tr = integrate_trajectory(e, y0, None).with_context(|| format!("dynamics: trajectory {k} (y0 = {y0:e} cm)"))?;
        let mut csv = Csv::create(
            out,
            &format!("trajectory_{k}.csv"),
            &["t_s", "x_cm", "y_cm", "vy_cm_s", "ay_cm_s2"],
        )?;
        for s in &tr.samples {
            csv.row([num(s.t), num(s.x), num(s.y), num(s.vy), num(s.ay)])?;
        }
        paths.push(csv.finish()?);
    }

    let landed: Vec<f64> = run.landings.iter().flatten().copied().collect();
    let range = (h.bin_edges[0], h.bin_edges[h.bin_edges.len() - 1]);
    let mut report = Report::default();
    report
        .text("n_samples", h.n_samples)
        .text("failures", h.failures)
        .text("outside", h.outside)
        .num("ks_distance", ks_distance(e, &landed, range))
        .num("bin_width_cm", h.bin_width());
    let spacing = e.fringe_spacing(e.screen_x);
    for n in [-3, -2, -1, 1, 2, 3] {
        let target = canyon(e, n, e.screen_x).context("qpotential: canyon model")?.theta_n * e.screen_x;
        report.num(&format!("canyon_{n}_predicted_cm"), target);
        match histogram_minimum(h, target, 0.5 * spacing) {
            Some(y) => report.num(&format!("canyon_{n}_minimum_cm"), y),
            None => report.text(&format!("canyon_{n}_minimum_cm"), "none"),
        };
    }
    paths.push(report.write(out, "trajectories.txt")?);
    Ok(paths)
}

pub fn spectrum(cfg: &RunConfig, out: &Path, with_sinh: bool) -> Result<Vec<PathBuf>> {
    let e = &cfg.experiment;
    let r = emission_summary(e, cfg.canyon).context("radiation: emission summary")?;
    let model = canyon(e, cfg.canyon, e.screen_x).context("qpotential: canyon model")?;
    let omegas = logspace(cfg.omega_min / r.tau_n, cfg.omega_max / r.tau_n, cfg.n_omega);
    let mut paths = Vec::new();

    let mut csv = Csv::create(out, "spectrum.csv", &["omega_rad_s", "dE_domega_erg_s", "provenance"])?;
    for &w in &omegas {
        let s = spectrum_closed(&model, w).context("radiation: closed-form spectrum")?;
        csv.row([num(s.omega), num(s.de_domega), s.provenance.label().to_string()])?;
    }
    for &w in &omegas {
        let s = spectrum_numeric(&model, w, TimeMap::Exact)
            .with_context(|| format!("radiation: numeric spectrum at omega = {w:e} rad/s"))?;
        csv.row([num(s.omega), num(s.de_domega), s.provenance.label().to_string()])?;
    }
    paths.push(csv.finish()?);

    if with_sinh {
        let mut csv = Csv::create(out, "spectrum_sinh.csv", &["omega_rad_s", "dE_domega_erg_s", "provenance"])?;
        for &w in &omegas {
            let s = spectrum_numeric(&model, w, TimeMap::Sinh)
                .with_context(|| format!("radiation: sinh-map spectrum at omega = {w:e} rad/s"))?;
            csv.row([num(s.omega), num(s.de_domega), s.provenance.label().to_string()])?;
        }
        paths.push(csv.finish()?);
    }

    let c = constants();
    let mut report = Report::default();
    report
        .text("canyon", r.n)
        .num("t_s", r.t)
        .num("energy_closed_eV", c.erg_to_ev(r.energy_closed))
        .num("energy_quadrature_eV", c.erg_to_ev(r.energy_quadrature))
        .num("energy_spectral_eV", c.erg_to_ev(r.energy_spectral))
        .num("hbar_omega_max_eV", r.hbar_omega_max_ev())
        .num("omega_max_rad_s", r.omega_max)
        .num("omega_peak_rad_s", r.omega_peak)
        .num("tau_n_s", r.tau_n)
        .num("lambda_max_angstrom", r.lambda_max_angstrom())
        .num("lambda_max_cm", r.lambda_max_angstrom() * CM_PER_ANGSTROM)
        .num("depth_eV", c.erg_to_ev(r.depth))
        .num("emission_probability", r.emission_probability)
        .num("beta_max", r.beta_max)
        .text("relativistic", r.flags.relativistic)
        .text("back_reaction", r.flags.back_reaction);
    paths.push(report.write(out, "report.txt")?);
    Ok(paths)
}

pub fn pattern(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let e = &cfg.experiment;
    let run = ensemble_run(e, cfg.n_samples, cfg.seed, &EnsembleOptions::default())
        .context("dynamics: landing ensemble")?;
    let h = &run.histogram;
    let range = (h.bin_edges[0], h.bin_edges[h.bin_edges.len() - 1]);
    let opts = PhotonOptions {
        sampling: cfg.photon_sampling,
        screen_range: Some(range),
        screen_bins: Some(h.counts.len()),
        ..PhotonOptions::default()
    };
    let photons = photon_pattern_with(e, cfg.n_samples, cfg.seed, &opts).context("radiation: photon pattern")?;
    let mut paths = Vec::new();

    let mut csv = Csv::create(
        out,
        "pattern.csv",
        &["bin_left_cm", "bin_right_cm", "electron_count", "photon_weight"],
    )?;
    for (i, c) in h.counts.iter().enumerate() {
        csv.row([
            num(h.bin_edges[i]),
            num(h.bin_edges[i + 1]),
            c.to_string(),
            num(photons.screen.weights[i]),
        ])?;
    }
    paths.push(csv.finish()?);

    let a = &photons.angular;
    let mut csv = Csv::create(out, "photon_angles.csv", &["angle_left_rad", "angle_right_rad", "photon_weight"])?;
    for (i, w) in a.weights.iter().enumerate() {
        csv.row([num(a.bin_edges[i]), num(a.bin_edges[i + 1]), num(*w)])?;
    }
    paths.push(csv.finish()?);

    let mut report = Report::default();
    report
        .text("electrons", photons.electrons)
        .text("crossings", photons.crossings)
        .text("emitted", photons.emitted)
        .text("on_screen", photons.on_screen)
        .num("expected_photons", photons.expected_photons)
        .num("mean_photon_energy_eV", constants().erg_to_ev(photons.mean_photon_energy))
        .text("zero_emission", photons.zero_emission())
        .text("landing_failures", h.failures);
    paths.push(report.write(out, "pattern.txt")?);
    Ok(paths)
}

pub fn copenhagen(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let e = &cfg.experiment;
    let cmp = compare(e).context("copenhagen: comparison")?;
    let c = constants();
    let mut report = Report::default();
    report
        .num("bohm_energy_eV", c.erg_to_ev(cmp.bohm_energy))
        .num("copenhagen_bound_eV", c.erg_to_ev(cmp.copenhagen_bound))
        .num("copenhagen_estimate_eV", c.erg_to_ev(cmp.copenhagen_estimate))
        .num("ratio", cmp.ratio)
        .num("first_maximum_q_g_cm_s", cmp.first_maximum_q)
        .num("barrier_height_erg", cmp.params.v0)
        .num("barrier_thickness_cm", cmp.params.barrier_thickness)
        .num("interaction_time_s", cmp.params.delta_t)
        .num("beta", cmp.params.beta)
        .text("bohm_scaling", format!("a^{} b^{}", cmp.bohm_scaling.a, cmp.bohm_scaling.b))
        .text(
            "copenhagen_scaling",
            format!("a^{} b^{}", cmp.copenhagen_scaling.a, cmp.copenhagen_scaling.b),
        );
    let mut paths = vec![report.write(out, "compare.txt")?];

    let q_unit = c.hbar / e.a;
    let mut csv = Csv::create(out, "scattering.csv", &["q_g_cm_s", "shape"])?;
    let q_max = 4.0 * std::f64::consts::PI * q_unit;
    for q in (1..=512).map(|i| q_max * i as f64 / 512.0) {
        let s = scattering_shape(e, q).context("copenhagen: scattering shape")?;
        csv.row([num(q), num(s)])?;
    }
    paths.push(csv.finish()?);
    Ok(paths)
}

/// Runs the self-checks; returns them for printing.
pub fn validate(cfg: &RunConfig) -> Vec<Check> {
    run_suite(&cfg.experiment)
}
