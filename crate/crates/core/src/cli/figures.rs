//! Bundled configurations and checks for the standard figure set (fig2 … fig11).

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::commands::{prepare_out, selection_curve, selection_table, spectrum_table, with_workers};
use super::config::RunConfig;
use super::csv::{num, opt, Table};
use super::manifest::RunManifest;
use crate::error::{Error, Result};
use crate::lineshape::{
    analyze, fit_power_law, fit_power_law_xy, scan, zero_field_width, ConvergenceReport, DeltaGrid, Feature,
    ScanResult,
};
use crate::params::PhysicalParams;
use crate::signal::CellSignal;
use crate::validation::{invariance_harness, spectral_deviation};

pub const FIGURES: [&str; 10] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11"];

const COMMON: &str = "\
rabi = 0.01
branching = 0.7
ground_relax = 0
doppler_width = 50
";

/// Bundled configuration of a figure.
pub fn bundled_config(figure: &str) -> Result<RunConfig> {
    let specific = match figure {
        "fig2" => "cell_length = 1000\ngrid_max_ratio = 1000\n",
        "fig3" => "cell_length = 100\ngrid_max_ratio = 1000\ngrid_points_per_decade = 20\nscan_values = 0.001, 0.01, 0.1, 1\n",
        "fig4" => {
            "scan_axis = kL\n\
             scan_values = 10, 31.6227766016838, 100, 316.227766016838, 1000, 3162.27766016838, 10000, \
             31622.7766016838, 100000, 316227.766016838, 1000000, 3162277.66016838, 10000000, \
             31622776.6016838, 100000000\n\
             fit_range = 100000, 100000000\n"
        }
        "fig5" => "cell_length = 100000000\nscan_axis = alpha\nscan_values = 0.1, 0.3, 0.5, 0.7, 0.9, 1\n",
        "fig6" => {
            "cell_length = 10000\nscan_axis = omega2\n\
             scan_values = 1e-9, 3.16227766016838e-9, 1e-8, 3.16227766016838e-8, 1e-7, 3.16227766016838e-7, \
             1e-6, 3.16227766016838e-6, 1e-5, 3.16227766016838e-5, 1e-4\n"
        }
        "fig7" => {
            "scan_axis = kL\n\
             scan_values = 10, 31.6227766016838, 100, 316.227766016838, 1000, 3162.27766016838, 10000, \
             31622.7766016838, 100000, 316227.766016838, 1000000, 3162277.66016838, 10000000\n"
        }
        "fig8" => {
            "cell_length = 1000\ngrid_points_per_decade = 20\n\
             velocity_limits = 1e-5, 1.77827941003892e-5, 3.16227766016838e-5, 5.62341325190349e-5, \
             1e-4, 1.77827941003892e-4, 3.16227766016838e-4, 5.62341325190349e-4, \
             1e-3, 1.77827941003892e-3, 3.16227766016838e-3, 5.62341325190349e-3, \
             1e-2, 1.77827941003892e-2, 3.16227766016838e-2, 5.62341325190349e-2, \
             0.1, 0.177827941003892, 0.316227766016838, 0.562341325190349, \
             1, 1.77827941003892, 3.16227766016838, 5.62341325190349, 10, 100\n"
        }
        "fig9" => "cell_length = 1000\nscan_axis = delta_omega\nscan_values = 0, 0.5, 1, 2, 4\n",
        "fig10" => {
            "rabi = 0.1\nground_relax = 0.001\ncell_length = 40\nscan_axis = v_c\n\
             scan_values = 0, 0.01, 0.02, 0.05, 0.1, 0.2\n"
        }
        "fig11" => "cell_length = 1000\nground_relax = 1e-6\ngrid_min_ratio = 0.001\ngrid_points_per_decade = 10\n",
        _ => return Err(Error::Config(format!("unknown figure '{figure}' (expected one of {})", FIGURES.join(", ")))),
    };
    // figure-specific keys replace the common ones
    let mut lines: Vec<&str> = COMMON
        .lines()
        .filter(|l| {
            let key = l.split('=').next().unwrap_or("").trim();
            !specific.lines().any(|s| s.split('=').next().unwrap_or("").trim() == key)
        })
        .collect();
    lines.extend(specific.lines());
    let mut cfg = RunConfig::parse(&lines.join("\n"))?;
    cfg.out = Path::new("out").join(figure);
    Ok(cfg)
}

/// One figure-level acceptance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureReport {
    pub figure: String,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
}

impl FigureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

struct Builder<'a> {
    dir: &'a Path,
    manifest: RunManifest,
    checks: Vec<Check>,
    files: Vec<String>,
}

impl<'a> Builder<'a> {
    fn new(figure: &str, cfg: &'a RunConfig) -> Self {
        Builder { dir: &cfg.out, manifest: RunManifest::new(&format!("reproduce {figure}"), cfg), checks: vec![], files: vec![] }
    }

    fn table(&mut self, name: &str, t: &Table, what: &str, conv: Vec<Option<ConvergenceReport>>) -> Result<()> {
        let path = self.dir.join(name);
        t.write(&path)?;
        self.manifest.record(&path, what, conv);
        self.files.push(name.to_string());
        Ok(())
    }

    fn check(&mut self, name: impl Into<String>, value: f64, expected: impl Into<String>, pass: bool) {
        self.checks.push(Check { name: name.into(), value, expected: expected.into(), pass });
    }

    /// |value/target − 1| ≤ rel.
    fn within(&mut self, name: impl Into<String>, value: f64, target: f64, rel: f64) {
        let pass = (value / target - 1.0).abs() <= rel;
        self.check(name, value, format!("{target:e} ± {:.0}%", rel * 100.0), pass);
    }

    fn finish(self, figure: &str, started: Instant) -> Result<FigureReport> {
        let mut report = FigureReport { figure: figure.to_string(), checks: self.checks, files: self.files };
        let path = self.dir.join("report.json");
        report.files.push("report.json".into());
        std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
        let mut manifest = self.manifest;
        manifest.record(&path, "figure-level checks", vec![]);
        manifest.finish(self.dir, started)?;
        Ok(report)
    }
}

/// Reproduces `figure` with its bundled configuration.
pub fn reproduce(figure: &str, out: &Path, workers: usize) -> Result<FigureReport> {
    let cfg = RunConfig { out: out.to_path_buf(), workers, ..bundled_config(figure)? };
    reproduce_with(figure, &cfg)
}

/// Reproduces `figure` from an explicit configuration (e.g. a coarser grid).
pub fn reproduce_with(figure: &str, cfg: &RunConfig) -> Result<FigureReport> {
    cfg.validate()?;
    prepare_out(&cfg.out)?;
    let started = Instant::now();
    let mut b = Builder::new(figure, cfg);
    with_workers(cfg.workers, || -> Result<()> {
        match figure {
            "fig2" => fig2(cfg, &mut b),
            "fig3" => fig3(cfg, &mut b),
            "fig4" => fig4(cfg, &mut b),
            "fig5" => fig5(cfg, &mut b),
            "fig6" => fig6(cfg, &mut b),
            "fig7" => fig7(cfg, &mut b),
            "fig8" => fig8(cfg, &mut b),
            "fig9" => fig9(cfg, &mut b),
            "fig10" => fig10(cfg, &mut b),
            "fig11" => fig11(cfg, &mut b),
            _ => Err(Error::Config(format!("unknown figure '{figure}'"))),
        }
    })??;
    b.finish(figure, started)
}

fn signal(cfg: &RunConfig) -> CellSignal {
    CellSignal::new(cfg.distribution(), cfg.quadrature.clone())
}

fn run_scan(cfg: &RunConfig, base: &PhysicalParams) -> Result<ScanResult> {
    let axis = cfg.scan_axis.ok_or_else(|| Error::Config("figure config lacks scan_axis".into()))?;
    scan(base, &cfg.distribution(), &cfg.quadrature, &cfg.grid, axis, &cfg.scan_values)
}

fn scan_table(res: &ScanResult) -> Table {
    let mut t = Table::new(&[res.axis.name(), "width_pp_over_gp", "width_pp", "amp_pp", "error"]);
    for pt in &res.points {
        let f = pt.features.as_ref();
        t.push(vec![
            num(pt.value),
            opt(f.and_then(|f| f.width_pp_over_gp)),
            opt(f.map(|f| f.width_pp)),
            opt(f.map(|f| f.amp_pp)),
            pt.error.clone().unwrap_or_default(),
        ]);
    }
    t
}

fn conv(res: &ScanResult) -> Vec<Option<ConvergenceReport>> {
    res.points.iter().map(|p| p.convergence).collect()
}

fn feature_at(res: &ScanResult, value: f64, feature: Feature) -> Option<f64> {
    let (x, y) = res.series(feature);
    x.iter().position(|v| (v / value - 1.0).abs() < 1e-9).map(|i| y[i])
}

fn width_over_gp_at(res: &ScanResult, value: f64) -> Option<f64> {
    res.points
        .iter()
        .find(|p| (p.value / value - 1.0).abs() < 1e-9)
        .and_then(|p| p.features.as_ref()?.width_pp_over_gp)
}

fn failures_check(b: &mut Builder, name: &str, res: &ScanResult) {
    b.check(format!("{name}: failed scan points"), res.failures() as f64, "0", res.failures() == 0);
}

/// Relative direct and derivative amplitudes for φ = 10⁻³ … 10², normalized at φ = 1.
const FIG2_PHI: [f64; 6] = [1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0];
const FIG2_DIRECT: [f64; 6] = [1.0e-5, 7.5e-4, 3.8e-2, 1.0, 9.9, 56.4];
const FIG2_DERIVATIVE: [f64; 6] = [1.4e-6, 1.4e-4, 1.4e-2, 1.0, 28.6, 367.0];

fn fig2(cfg: &RunConfig, b: &mut Builder) -> Result<()> {
    let sig = signal(cfg);
    let mut amps = Vec::new();
    for phi in FIG2_PHI {
        let p = cfg.params.with_phi(phi);
        let a = analyze(&sig, &p, &cfg.grid)?;
        let conv = vec![a.spectrum.meta.as_ref().and_then(|m| m.convergence)];
        b.table(&format!("spectrum_phi_{phi}.csv"), &spectrum_table(&a.spectrum, &a.derivative), "spectrum", conv)?;
        amps.push((a.spectrum.peak_to_peak(), a.features.amp_pp, a.features.width_pp_over_gp));
    }
    let (d1, a1) = (amps[3].0, amps[3].1);
    let mut t = Table::new(&["phi", "direct_amp", "direct_rel", "derivative_amp", "derivative_rel", "width_pp_over_gp"]);
    for (i, phi) in FIG2_PHI.iter().enumerate() {
        let (d, a, w) = amps[i];
        t.push(vec![num(*phi), num(d), num(d / d1), num(a), num(a / a1), opt(w)]);
        b.within(format!("direct amplitude φ={phi}"), d / d1, FIG2_DIRECT[i], 0.1);
        b.within(format!("derivative amplitude φ={phi}"), a / a1, FIG2_DERIVATIVE[i], 0.1);
    }
    b.table("amplitudes.csv", &t, "relative amplitudes", vec![])
}

/// Smallest δ > 0 at which |c| reaches half its largest value on the grid.
/// The contributions vanish at δ = 0 and saturate in the wings.
fn half_width(grid: &[f64], c: &[f64]) -> Option<f64> {
    let i0 = grid.iter().position(|d| *d == 0.0)?;
    let half = c.iter().fold(0.0f64, |m, v| m.max(v.abs())) / 2.0;
    if half == 0.0 {
        return None;
    }
    (i0 + 1..grid.len()).find(|i| c[*i].abs() >= half).map(|i| {
        let (x0, x1, y0, y1) = (grid[i - 1], grid[i], c[i - 1].abs(), c[i].abs());
        x0 + (half - y0) * (x1 - x0) / (y1 - y0)
    })
}

fn fig3(cfg: &RunConfig, b: &mut Builder) -> Result<()> {
    let sig = signal(cfg);
    let p = cfg.params;
    let gp = p.derived().pump_rate;
    let grid = cfg.delta_grid()?;
    let mut header = vec!["delta_over_gp".to_string()];
    let mut cols = Vec::new();
    for v in &cfg.scan_values {
        header.push(format!("v_{v}"));
        cols.push(sig.velocity_contribution(&p, *v, &grid)?);
    }
    let mut t = Table::new(&header);
    for (i, d) in grid.iter().enumerate() {
        let mut row = vec![num(d / gp)];
        row.extend(cols.iter().map(|c| num(c[i])));
        t.push(row);
    }
    b.table("contributions.csv", &t, "per-velocity contributions", vec![])?;
    let widths: Vec<Option<f64>> = cols.iter().map(|c| half_width(&grid, c)).collect();
    let mut wt = Table::new(&["v", "hwhm_over_gp"]);
    for (v, w) in cfg.scan_values.iter().zip(&widths) {
        wt.push(vec![num(*v), opt(w.map(|w| w / gp))]);
    }
    b.table("contribution_widths.csv", &wt, "half-widths of the contributions", vec![])?;
    let first = widths.first().copied().flatten();
    let last = widths.last().copied().flatten();
    let ratio = match (first, last) {
        (Some(a), Some(z)) => z / a,
        _ => f64::NAN,
    };
    b.check("fast/slow contribution width ratio", ratio, "> 10", ratio > 10.0);
    let ordered = widths.windows(2).all(|w| matches!(w, [Some(a), Some(b)] if b >= a));
    b.check("contribution width grows with |v_z|", ordered as u8 as f64, "1", ordered);
    Ok(())
}

fn fig4(cfg: &RunConfig, b: &mut Builder) -> Result<()> {
    let open = run_scan(cfg, &cfg.params)?;
    let closed = run_scan(cfg, &PhysicalParams { branching: 1.0, ..cfg.params })?;
    let relaxed = run_scan(cfg, &cfg.params.with_relaxation(1e-6))?;
    b.table("width_open.csv", &scan_table(&open), "α = 0.7, γ = 0", conv(&open))?;
    b.table("width_closed.csv", &scan_table(&closed), "α = 1, γ = 0", conv(&closed))?;
    b.table("width_relaxed.csv", &scan_table(&relaxed), "α = 0.7, γ = 1e-6", conv(&relaxed))?;
    for (name, r) in [("open", &open), ("closed", &closed), ("relaxed", &relaxed)] {
        failures_check(b, name, r);
    }

    let gp = cfg.params.derived().pump_rate;
    for (name, r) in [("open", &open), ("closed", &closed)] {
        for kl in [1e-3 / gp, 1e-2 / gp] {
            let w = width_over_gp_at(r, kl).unwrap_or(f64::NAN);
            b.check(format!("{name} plateau Δ_pp/γ_p at φ={}", kl * gp), w, "[0.5, 2]", (0.5..=2.0).contains(&w));
        }
    }
    let range = cfg.fit_range.unwrap_or((10.0 / gp, 1e4 / gp));
    let s = fit_power_law(&open, Feature::Width, range).map(|f| -f.exponent).unwrap_or(f64::NAN);
    b.check("open narrowing exponent S", s, "1/3 ± 0.07", (s - 1.0 / 3.0).abs() <= 0.07);
    let (_, w) = closed.series(Feature::Width);
    let ratio = w.iter().cloned().fold(0.0, f64::max) / w.iter().cloned().fold(f64::INFINITY, f64::min);
    b.check("closed max/min width", ratio, "≤ 10", ratio <= 10.0);
    let last = *cfg.scan_values.last().unwrap_or(&0.0);
    let wo = feature_at(&open, last, Feature::Width).unwrap_or(f64::NAN);
    let wc = feature_at(&closed, last, Feature::Width).unwrap_or(f64::NAN);
    let wr = feature_at(&relaxed, last, Feature::Width).unwrap_or(f64::NAN);
    b.check("closed wider than open at largest kL", wc / wo, "> 1", wc > wo);
    b.check("relaxation widens the open line at largest kL", wr / wo, "> 1", wr > wo);
    Ok(())
}

fn fig5(cfg: &RunConfig, b: &mut Builder) -> Result<()> {
    let res = run_scan(cfg, &cfg.params)?;
    b.table("width_alpha.csv", &scan_table(&res), "width versus α at φ = 10⁴", conv(&res))?;
    failures_check(b, "alpha", &res);
    let (_, w) = res.series(Feature::Width);
    let monotone = w.windows(2).all(|p| p[1] >= p[0]);
    let span = w.last().unwrap_or(&f64::NAN) / w.first().unwrap_or(&f64::NAN);
    b.check("width non-increasing as α decreases", span, "monotone", monotone);
    Ok(())
}

fn fig6(cfg: &RunConfig, b: &mut Builder) -> Result<()> {
    let open = run_scan(cfg, &cfg.params)?;
    let closed = run_scan(cfg, &PhysicalParams { branching: 1.0, ..cfg.params })?;
    let gamma = 1e-6;
    let relaxed = run_scan(cfg, &cfg.params.with_relaxation(gamma))?;
    b.table("width_open.csv", &scan_table(&open), "α = 0.7, γ = 0", conv(&open))?;
    b.table("width_closed.csv", &scan_table(&closed), "α = 1, γ = 0", conv(&closed))?;
    b.table("width_relaxed.csv", &scan_table(&relaxed), "α = 0.7, γ = 1e-6", conv(&relaxed))?;
    failures_check(b, "relaxed", &relaxed);

    // zero-field limit from the weakest fields that stay well above the
    // round-off floor, on a grid dense around the extrema
    let floor_cfg = RunConfig {
        grid: DeltaGrid { min_ratio: 1e-2, max_ratio: 1e2, points_per_decade: 4 * cfg.grid.points_per_decade },
        quadrature: cfg.quadrature.refined(),
        scan_values: FLOOR_OMEGA2.to_vec(),
        ..cfg.clone()
    };
    let floor = run_scan(&floor_cfg, &cfg.params.with_relaxation(gamma))?;
    b.table("width_floor.csv", &scan_table(&floor), "dense-grid weak-field widths, γ = 1e-6", conv(&floor))?;
    failures_check(b, "floor", &floor);
    let limit = zero_field_width(&floor).map(|w| w / gamma).unwrap_or(f64::NAN);
    b.check("Δ_pp/γ extrapolated to Ω² → 0", limit, "[0.5, 2]", (0.5..=2.0).contains(&limit));
    Ok(())
}

/// Ω² values of the zero-field extrapolation at kL = 10⁴, γ = 10⁻⁶.
pub const FLOOR_OMEGA2: [f64; 3] = [3e-9, 1e-8, 3e-8];

/// Smallest b such that every y/x^k with x in `range` lies in c·[1 − b, 1 + b]
/// for some c.
fn band(x: &[f64], y: &[f64], k: f64, range: (f64, f64)) -> f64 {
    let r: Vec<f64> = x
        .iter()
        .zip(y)
        .filter(|(x, _)| **x >= range.0 * (1.0 - 1e-9) && **x <= range.1 * (1.0 + 1e-9))
        .map(|(x, y)| y / x.powf(k))
        .collect();
    if r.is_empty() {
        return f64::NAN;
    }
    let (lo, hi) = r.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    (hi - lo) / (hi + lo)
}

fn fig7(cfg: &RunConfig, b: &mut Builder) -> Result<()> {
    let open = run_scan(cfg, &cfg.params)?;
    let closed = run_scan(cfg, &PhysicalParams { branching: 1.0, ..cfg.params })?;
    failures_check(b, "open", &open);
    failures_check(b, "closed", &closed);
    let gp = cfg.params.derived().pump_rate;
    let reference = feature_at(&closed, 1.0 / gp, Feature::Amplitude).unwrap_or(f64::NAN);
    let mut t = Table::new(&["phi", "amp_open_rel", "amp_closed_rel"]);
    let (x, ao) = open.series(Feature::Amplitude);
    for (kl, a) in x.iter().zip(&ao) {
        let c = feature_at(&closed, *kl, Feature::Amplitude);
        t.push(vec![num(kl * gp), num(a / reference), opt(c.map(|c| c / reference))]);
    }
    b.table("amplitude.csv", &t, "A_pp relative to φ = 1, α = 1", [conv(&open), conv(&closed)].concat())?;
    let phi: Vec<f64> = x.iter().map(|k| k * gp).collect();
    let low = fit_power_law_xy(&phi, &ao, (1e-3, 1.0)).map(|f| f.exponent).unwrap_or(f64::NAN);
    let high = fit_power_law_xy(&phi, &ao, (10.0, 1e3)).map(|f| f.exponent).unwrap_or(f64::NAN);
    b.check("A_pp exponent for φ ≤ 1", low, "2 ± 0.1", (low - 2.0).abs() <= 0.1);
    b.check("A_pp exponent for φ ∈ [10, 10³]", high, "1 ± 0.15", (high - 1.0).abs() <= 0.15);
    let sq = band(&phi, &ao, 2.0, (1e-3, 1.0));
    let lin = band(&phi, &ao, 1.0, (10.0, 1e3));
    b.check("A_pp/φ² band below φ = 1", sq, "≤ ±20%", sq <= 0.2);
    b.check("A_pp/φ band over [10, 10³]", lin, "≤ ±20%", lin <= 0.2);
    Ok(())
}

fn fig8(cfg: &RunConfig, b: &mut Builder) -> Result<()> {
    let sig = signal(cfg);
    let cases: [(&str, f64, f64); 5] =
        [("a", 1e-3, 0.0), ("b", 1e-2, 0.0), ("c", 1e-1, 0.0), ("d", 1.0, 0.0), ("e", 1e-2, 0.1)];
    let mut s90 = Vec::new();
    for (label, phi, gamma_l) in cases {
        let mut p = cfg.params.with_phi(phi);
        p = p.with_relaxation(gamma_l / p.cell_length);
        let grid = RunConfig { params: p, ..cfg.clone() }.delta_grid()?;
        let (curve, conv) = selection_curve(&sig, &p, &grid, &cfg.velocity_limits)?;
        b.table(&format!("selection_{label}.csv"), &selection_table(&curve), &format!("φ = {phi}, γL = {gamma_l}"), conv)?;
        if gamma_l == 0.0 {
            let direct = curve.direct_fraction_at(1.0).unwrap_or(f64::NAN);
            b.check(format!("direct fraction at Δ_s = Γ, φ={phi}"), direct, "≥ 0.95", direct >= 0.95);
            if phi <= 0.1 {
                s90.push((phi, curve.saturation(0.9, true).unwrap_or(f64::NAN)));
            }
        }
    }
    let scaled: Vec<f64> = s90.iter().map(|(phi, s)| s / phi).collect();
    let spread = scaled.iter().cloned().fold(0.0, f64::max) / scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    b.check("derivative 90% saturation ∝ φ (max/min of Δ_s/φ)", spread, "≤ 1.3", spread <= 1.3);
    Ok(())
}

fn fig9(cfg: &RunConfig, b: &mut Builder) -> Result<()> {
    for phi in [0.1, 10.0] {
        let res = run_scan(cfg, &cfg.params.with_phi(phi))?;
        b.table(&format!("detuning_phi_{phi}.csv"), &scan_table(&res), "features versus δω", conv(&res))?;
        failures_check(b, &format!("φ={phi}"), &res);
        if phi == 0.1 {
            let (_, a) = res.series(Feature::Amplitude);
            let shrinking = a.windows(2).all(|w| w[1] <= w[0]);
            let drop = a.last().unwrap_or(&f64::NAN) / a.first().unwrap_or(&f64::NAN);
            b.check("narrow component shrinks with δω at φ = 0.1", drop, "monotone decrease", shrinking);
        }
    }
    Ok(())
}

fn fig10(cfg: &RunConfig, b: &mut Builder) -> Result<()> {
    let res = run_scan(cfg, &cfg.params)?;
    b.table("truncation.csv", &scan_table(&res), "features versus v_c", conv(&res))?;
    failures_check(b, "v_c", &res);
    let (x, w) = res.series(Feature::Width);
    let (_, a) = res.series(Feature::Amplitude);
    b.check("width grows with v_c", 0.0, "monotone", w.windows(2).all(|p| p[1] >= p[0]));
    b.check("amplitude falls with v_c", 0.0, "monotone", a.windows(2).all(|p| p[1] <= p[0]));
    if let Some(i) = x.iter().position(|v| (*v - 0.1).abs() < 1e-12) {
        let dw = w[i] / w[0] - 1.0;
        let da = 1.0 - a[i] / a[0];
        b.check("width change at v_c = 0.1", dw, "> 10%", dw > 0.1);
        b.check("amplitude change at v_c = 0.1", da, "> 10%", da > 0.1);
    }
    Ok(())
}

/// The three members of the invariance family (kL, Ω, γ) at α = 0.7.
pub const FIG11_SETS: [(f64, f64, f64); 3] = [(1000.0, 0.01, 1e-6), (250.0, 0.02, 4e-6), (25000.0, 0.002, 4e-8)];

fn fig11(cfg: &RunConfig, b: &mut Builder) -> Result<()> {
    let sig = signal(cfg);
    let sets: Vec<PhysicalParams> = FIG11_SETS
        .iter()
        .map(|(kl, om, g)| PhysicalParams { cell_length: *kl, rabi: *om, ..cfg.params }.with_relaxation(*g))
        .collect();
    let ratios = cfg.grid.build(1.0)?;
    let rep = invariance_harness(&sig, &sets, &ratios)?;
    let mut t = Table::new(&["delta_over_gp", "set_a", "set_b", "set_c"]);
    for (i, r) in ratios.iter().enumerate() {
        t.push(vec![num(*r), num(rep.spectra[0][i]), num(rep.spectra[1][i]), num(rep.spectra[2][i])]);
    }
    b.table("invariance.csv", &t, "spectra of the three parameter sets", vec![])?;
    b.check("max relative deviation", rep.absolute_deviation, "≤ 5%", rep.absolute_deviation <= 0.05);
    b.check("shape-normalized deviation", rep.shape_deviation, "reported", true);
    let mut perturbed = sets.clone();
    perturbed[1].branching += 0.1;
    let control = spectral_deviation(&sig, &perturbed, &ratios)?;
    b.check("negative control (α + 0.1)", control.absolute_deviation, "> 5%", control.absolute_deviation > 0.05);
    Ok(())
}
