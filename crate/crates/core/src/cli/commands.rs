use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::csv::{num, opt, Table};
use super::manifest::RunManifest;
use crate::bloch::{build_liouvillian, evolve, steady_state, DensityVector};
use crate::error::{exit, Error, Result};
use crate::lineshape::{derivative, extract_features, fit_power_law, scan, Feature, PowerLawFit, ScanAxis, Spectrum};
use crate::params::PhysicalParams;
use crate::signal::CellSignal;
use crate::validation::{ode_oracle, OracleConfig};

/// Files written by a command and the checks it failed.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            exit::OK
        } else {
            exit::ACCEPTANCE
        }
    }
}

/// Runs `f` on a dedicated pool of `workers` threads (0 = all cores).
/// Results do not depend on the worker count.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

pub fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))
}

/// `spectrum.csv` rows: δ/Γ, δ/γ_p, signal, derivative.
pub fn spectrum_table(spec: &Spectrum, deriv: &Spectrum) -> Table {
    let gp = spec.meta.as_ref().map(|m| m.derived.pump_rate).filter(|g| *g > 0.0);
    let mut t = Table::new(&["delta_over_gamma", "delta_over_gp", "signal", "derivative"]);
    for ((d, s), ds) in spec.delta_grid.iter().zip(&spec.values).zip(&deriv.values) {
        t.push(vec![num(*d), opt(gp.map(|g| d / g)), num(*s), num(*ds)]);
    }
    t
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let started = Instant::now();
    prepare_out(&cfg.out)?;
    let grid = cfg.delta_grid()?;
    let signal = CellSignal::new(cfg.distribution(), cfg.quadrature.clone());
    let spec = with_workers(cfg.workers, || signal.dark_resonance_signal(&cfg.params, &grid))??;
    let deriv = derivative(&spec)?;
    match extract_features(&deriv) {
        Ok(f) => log::info!("Δ_pp = {:e} Γ, A_pp = {:e}", f.width_pp, f.amp_pp),
        Err(e) => log::warn!("no lineshape features: {e}"),
    }
    let path = cfg.out.join("spectrum.csv");
    spectrum_table(&spec, &deriv).write(&path)?;
    let mut manifest = RunManifest::new("spectrum", cfg);
    manifest.record(&path, "dark-resonance spectrum and its derivative", vec![spec.meta.and_then(|m| m.convergence)]);
    let m = manifest.finish(&cfg.out, started)?;
    Ok(Outcome { files: vec![path, m], failures: vec![] })
}

/// Width power law of a scan, over `fit_range` or every successful point.
fn scan_fit(res: &crate::lineshape::ScanResult, range: Option<(f64, f64)>) -> Option<PowerLawFit> {
    let (x, _) = res.series(Feature::Width);
    let range = range.or_else(|| Some((*x.first()?, *x.last()?)))?;
    fit_power_law(res, Feature::Width, range).ok()
}

pub fn cmd_scan(cfg: &RunConfig, axis: Option<ScanAxis>, values: Option<Vec<f64>>) -> Result<Outcome> {
    cfg.validate()?;
    let axis = axis
        .or(cfg.scan_axis)
        .ok_or_else(|| Error::Config("scan needs an axis (--axis or scan_axis)".into()))?;
    let values = values.unwrap_or_else(|| cfg.scan_values.clone());
    if values.is_empty() {
        return Err(Error::Config("scan needs values (--values or scan_values)".into()));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("scan values must be strictly increasing".into()));
    }
    let started = Instant::now();
    prepare_out(&cfg.out)?;
    let dist = cfg.distribution();
    let mut res = with_workers(cfg.workers, || scan(&cfg.params, &dist, &cfg.quadrature, &cfg.grid, axis, &values))??;
    res.fit = scan_fit(&res, cfg.fit_range);

    let mut t = Table::new(&[
        axis.name(),
        "width_pp_over_gp",
        "width_pp",
        "amp_pp",
        "delta_max",
        "delta_min",
        "warnings",
        "fit_exponent",
        "fit_prefactor",
        "fit_residual",
        "error",
    ]);
    let fit = res.fit.as_ref();
    for pt in &res.points {
        let f = pt.features.as_ref();
        t.push(vec![
            num(pt.value),
            opt(f.and_then(|f| f.width_pp_over_gp)),
            opt(f.map(|f| f.width_pp)),
            opt(f.map(|f| f.amp_pp)),
            opt(f.map(|f| f.delta_max)),
            opt(f.map(|f| f.delta_min)),
            f.map(|f| f.warnings.len().to_string()).unwrap_or_default(),
            opt(fit.map(|f| f.exponent)),
            opt(fit.map(|f| f.prefactor)),
            opt(fit.map(|f| f.residual)),
            pt.error.clone().unwrap_or_default(),
        ]);
    }
    let path = cfg.out.join("scan.csv");
    t.write(&path)?;
    let mut manifest = RunManifest::new("scan", &RunConfig { scan_axis: Some(axis), scan_values: values, ..cfg.clone() });
    manifest.record(&path, "lineshape features along the scan axis", res.points.iter().map(|p| p.convergence).collect());
    let m = manifest.finish(&cfg.out, started)?;
    if res.failures() == res.points.len() {
        let first = res.points[0].error.clone().unwrap_or_default();
        return Err(Error::Spectrum(format!("every scan point failed, first: {first}")));
    }
    Ok(Outcome { files: vec![path, m], failures: vec![] })
}

/// Peak-to-peak amplitudes of partial-velocity spectra relative to the full one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionCurve {
    pub limits: Vec<f64>,
    pub direct: Vec<f64>,
    pub derivative: Vec<f64>,
    pub full_direct: f64,
    pub full_derivative: f64,
}

impl SelectionCurve {
    /// Smallest limit at which `fraction` of the full amplitude is reached,
    /// interpolated in log Δ_s between the bracketing limits.
    pub fn saturation(&self, fraction: f64, of_derivative: bool) -> Option<f64> {
        let (vals, full) =
            if of_derivative { (&self.derivative, self.full_derivative) } else { (&self.direct, self.full_direct) };
        let r: Vec<f64> = vals.iter().map(|v| v / full).collect();
        let i = r.iter().position(|x| *x >= fraction)?;
        if i == 0 {
            return Some(self.limits[0]);
        }
        let (l0, l1) = (self.limits[i - 1].ln(), self.limits[i].ln());
        let s = (fraction - r[i - 1]) / (r[i] - r[i - 1]);
        Some((l0 + s * (l1 - l0)).exp())
    }

    pub fn direct_fraction_at(&self, limit: f64) -> Option<f64> {
        let i = self.limits.iter().position(|l| (l / limit - 1.0).abs() < 1e-12)?;
        Some(self.direct[i] / self.full_direct)
    }
}

pub fn selection_curve(signal: &CellSignal, p: &PhysicalParams, grid: &[f64], limits: &[f64]) -> Result<(SelectionCurve, Vec<Option<crate::lineshape::ConvergenceReport>>)> {
    if limits.is_empty() || limits.windows(2).any(|w| !(w[1] > w[0])) || !(limits[0] > 0.0) {
        return Err(Error::Config("velocity limits must be positive and strictly increasing".into()));
    }
    let mut all = limits.to_vec();
    all.push(f64::INFINITY);
    let specs = signal.velocity_selection(p, grid, &all)?;
    let amps = specs
        .iter()
        .map(|s| Ok((s.peak_to_peak(), derivative(s)?.peak_to_peak())))
        .collect::<Result<Vec<_>>>()?;
    let (full_direct, full_derivative) = amps[amps.len() - 1];
    let conv = specs.iter().map(|s| s.meta.as_ref().and_then(|m| m.convergence)).collect();
    Ok((
        SelectionCurve {
            limits: limits.to_vec(),
            direct: amps[..limits.len()].iter().map(|a| a.0).collect(),
            derivative: amps[..limits.len()].iter().map(|a| a.1).collect(),
            full_direct,
            full_derivative,
        },
        conv,
    ))
}

pub fn selection_table(c: &SelectionCurve) -> Table {
    let mut t = Table::new(&["delta_s", "direct_amp", "direct_fraction", "derivative_amp", "derivative_fraction"]);
    for ((l, d), a) in c.limits.iter().zip(&c.direct).zip(&c.derivative) {
        t.push(vec![num(*l), num(*d), num(d / c.full_direct), num(*a), num(a / c.full_derivative)]);
    }
    t.push(vec!["inf".into(), num(c.full_direct), num(1.0), num(c.full_derivative), num(1.0)]);
    t
}

pub fn cmd_velocity_select(cfg: &RunConfig, limits: Option<Vec<f64>>) -> Result<Outcome> {
    cfg.validate()?;
    let limits = limits.unwrap_or_else(|| cfg.velocity_limits.clone());
    if limits.is_empty() {
        return Err(Error::Config("velocity-select needs limits (--values or velocity_limits)".into()));
    }
    let started = Instant::now();
    prepare_out(&cfg.out)?;
    let grid = cfg.delta_grid()?;
    let signal = CellSignal::new(cfg.distribution(), cfg.quadrature.clone());
    let (curve, conv) = with_workers(cfg.workers, || selection_curve(&signal, &cfg.params, &grid, &limits))??;
    let path = cfg.out.join("velocity_select.csv");
    selection_table(&curve).write(&path)?;
    let mut manifest = RunManifest::new("velocity-select", &RunConfig { velocity_limits: limits, ..cfg.clone() });
    manifest.record(&path, "partial-velocity amplitudes relative to the full integral", conv);
    let m = manifest.finish(&cfg.out, started)?;
    Ok(Outcome { files: vec![path, m], failures: vec![] })
}

/// Agreement between the time-stepping oracle and the matrix-function propagator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub draws: usize,
    pub seed: u64,
    pub max_abs_deviation: f64,
    pub worst_params: Option<PhysicalParams>,
    pub worst_velocity: f64,
    pub worst_time: f64,
    pub steady_state_deviation: f64,
    pub tolerance: f64,
    pub steady_tolerance: f64,
    pub pass: bool,
}

pub const ORACLE_TOLERANCE: f64 = 1e-9;
pub const STEADY_TOLERANCE: f64 = 1e-8;

/// One random (parameters, velocity, time) draw of the cross-check.
pub fn random_draw(rng: &mut impl Rng) -> (PhysicalParams, f64, f64) {
    let gamma = if rng.random_bool(0.3) { 0.0 } else { 10f64.powf(rng.random_range(-6.0..-1.0)) };
    let p = PhysicalParams {
        rabi: rng.random_range(0.0..0.5),
        branching: rng.random_range(0.0..=1.0),
        raman_detuning: rng.random_range(-0.1..0.1),
        laser_detuning: rng.random_range(-2.0..2.0),
        cell_length: 100.0,
        ..PhysicalParams::default().with_relaxation(gamma)
    };
    (p, rng.random_range(-5.0..5.0), rng.random_range(0.0..50.0))
}

pub fn oracle_cross_check(draws: usize, seed: u64) -> Result<ValidationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<_> = (0..draws).map(|_| random_draw(&mut rng)).collect();
    let s0 = DensityVector::wall_state();
    use rayon::prelude::*;
    let devs = cases
        .par_iter()
        .map(|(p, v, t)| {
            let a = ode_oracle(p, *v, &s0, *t, &OracleConfig::default())?;
            let b = evolve(&build_liouvillian(p, *v), &s0, *t)?;
            Ok((a.0 - b.0).amax())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (worst, max_dev) = devs.iter().enumerate().fold((None, 0.0f64), |(w, m), (i, d)| if *d > m { (Some(i), *d) } else { (w, m) });

    let p = PhysicalParams { rabi: 0.2, raman_detuning: 0.01, ..PhysicalParams::default().with_relaxation(0.05) };
    let long = ode_oracle(&p, 0.1, &s0, 2000.0, &OracleConfig::default())?;
    let steady = steady_state(&build_liouvillian(&p, 0.1))?;
    let steady_dev = (long.0 - steady.0).amax();
    Ok(ValidationReport {
        draws,
        seed,
        max_abs_deviation: max_dev,
        worst_params: worst.map(|i| cases[i].0),
        worst_velocity: worst.map(|i| cases[i].1).unwrap_or(0.0),
        worst_time: worst.map(|i| cases[i].2).unwrap_or(0.0),
        steady_state_deviation: steady_dev,
        tolerance: ORACLE_TOLERANCE,
        steady_tolerance: STEADY_TOLERANCE,
        pass: max_dev <= ORACLE_TOLERANCE && steady_dev <= STEADY_TOLERANCE,
    })
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.draws == 0 {
        return Err(Error::Config("draws must be positive".into()));
    }
    let started = Instant::now();
    prepare_out(&cfg.out)?;
    let report = with_workers(cfg.workers, || oracle_cross_check(cfg.draws, cfg.seed))??;
    let path = cfg.out.join("validate.json");
    std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
    let mut manifest = RunManifest::new("validate", cfg);
    manifest.record(&path, "oracle versus propagator agreement", vec![]);
    let m = manifest.finish(&cfg.out, started)?;
    let mut failures = Vec::new();
    if !report.pass {
        failures.push(format!(
            "oracle deviation {:e} (limit {:e}), steady state {:e} (limit {:e})",
            report.max_abs_deviation, ORACLE_TOLERANCE, report.steady_state_deviation, STEADY_TOLERANCE
        ));
    }
    Ok(Outcome { files: vec![path, m], failures })
}
