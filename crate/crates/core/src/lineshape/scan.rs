use serde::{Deserialize, Serialize};

use super::features::{extract_features, LineshapeFeatures};
use super::powerlaw::{fit_power_law_xy, PowerLawFit};
use super::spectrum::{derivative, ConvergenceReport, DeltaGrid, Spectrum};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::signal::{CellSignal, QuadratureConfig, VelocityDistribution};

/// Parameter swept by a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    /// Cell length kL.
    CellLength,
    /// Intensity Ω² (Γ²).
    RabiSquared,
    Branching,
    /// Ground relaxation γ, with λ = γ/2.
    Relaxation,
    LaserDetuning,
    /// Truncation velocity v_c of the distribution.
    Cutoff,
}

impl ScanAxis {
    pub const ALL: [ScanAxis; 6] = [
        ScanAxis::CellLength,
        ScanAxis::RabiSquared,
        ScanAxis::Branching,
        ScanAxis::Relaxation,
        ScanAxis::LaserDetuning,
        ScanAxis::Cutoff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScanAxis::CellLength => "kL",
            ScanAxis::RabiSquared => "omega2",
            ScanAxis::Branching => "alpha",
            ScanAxis::Relaxation => "gamma",
            ScanAxis::LaserDetuning => "delta_omega",
            ScanAxis::Cutoff => "v_c",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown scan axis '{s}'")))
    }

    /// Parameters and distribution at one axis value.
    pub fn apply(
        self,
        base: &PhysicalParams,
        dist: &VelocityDistribution,
        value: f64,
    ) -> Result<(PhysicalParams, VelocityDistribution)> {
        let mut p = *base;
        let mut d = dist.clone();
        match self {
            ScanAxis::CellLength => p.cell_length = value,
            ScanAxis::RabiSquared => {
                if value < 0.0 {
                    return Err(Error::InvalidParams(format!("Ω² = {value} < 0")));
                }
                p.rabi = value.sqrt();
            }
            ScanAxis::Branching => p.branching = value,
            ScanAxis::Relaxation => p = p.with_relaxation(value),
            ScanAxis::LaserDetuning => p.laser_detuning = value,
            ScanAxis::Cutoff => {
                let width = match dist {
                    VelocityDistribution::MaxwellBoltzmann { width }
                    | VelocityDistribution::TruncatedMb { width, .. } => *width,
                    VelocityDistribution::Tabulated { .. } => {
                        return Err(Error::InvalidDistribution("cannot truncate a tabulated distribution".into()))
                    }
                };
                d = if value > 0.0 {
                    VelocityDistribution::truncated(width, value)
                } else {
                    VelocityDistribution::maxwell_boltzmann(width)
                };
            }
        }
        Ok((p, d))
    }
}

impl std::fmt::Display for ScanAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Detuning scale of a spectrum: the wider of the pumping and relaxation rates.
pub fn detuning_scale(p: &PhysicalParams) -> Result<f64> {
    let s = p.derived().pump_rate + p.ground_relax;
    if s > 0.0 {
        Ok(s)
    } else {
        Err(Error::InvalidParams("Ω = γ = 0 leaves no detuning scale".into()))
    }
}

/// Direct spectrum, its derivative and features of one parameter set.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub spectrum: Spectrum,
    pub derivative: Spectrum,
    pub features: LineshapeFeatures,
}

/// Times the innermost detuning is divided by 100 when the central feature is
/// not resolved.
pub const CUSP_REFINEMENTS: usize = 2;

/// Runs spectrum → derivative → features, pulling the inner end of the grid
/// towards zero when the extrema sit on the innermost points.
pub fn analyze(signal: &CellSignal, p: &PhysicalParams, grid: &DeltaGrid) -> Result<Analysis> {
    let scale = detuning_scale(p)?;
    let mut grid = grid.clone();
    let mut attempt = 0;
    loop {
        let deltas = grid.build(scale)?;
        let spectrum = signal.dark_resonance_signal(p, &deltas)?;
        let derivative = derivative(&spectrum)?;
        match extract_features(&derivative) {
            Ok(features) => return Ok(Analysis { spectrum, derivative, features }),
            Err(Error::UnresolvedCusp { .. }) if attempt < CUSP_REFINEMENTS => {
                attempt += 1;
                grid.min_ratio /= 100.0;
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub value: f64,
    pub params: PhysicalParams,
    pub features: Option<LineshapeFeatures>,
    pub convergence: Option<ConvergenceReport>,
    /// Failure message when this point could not be computed.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub axis: ScanAxis,
    pub points: Vec<ScanPoint>,
    pub fit: Option<PowerLawFit>,
}

/// Observable a power law is fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Width,
    Amplitude,
}

impl ScanResult {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// (axis value, feature) for the successful points.
    pub fn series(&self, feature: Feature) -> (Vec<f64>, Vec<f64>) {
        self.points
            .iter()
            .filter_map(|pt| {
                let f = pt.features.as_ref()?;
                Some((pt.value, match feature {
                    Feature::Width => f.width_pp,
                    Feature::Amplitude => f.amp_pp,
                }))
            })
            .unzip()
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }
}

/// Fits `feature` against the axis value over `range`.
pub fn fit_power_law(scan: &ScanResult, feature: Feature, range: (f64, f64)) -> Result<PowerLawFit> {
    let (x, y) = scan.series(feature);
    fit_power_law_xy(&x, &y, range)
}

/// Δ_pp extrapolated to Ω² → 0 by a least-squares line through the
/// (Ω², Δ_pp) points of an intensity scan.
pub fn zero_field_width(scan: &ScanResult) -> Result<f64> {
    if scan.axis != ScanAxis::RabiSquared {
        return Err(Error::Config(format!("zero-field extrapolation needs an omega2 scan, got {}", scan.axis)));
    }
    let (x, y) = scan.series(Feature::Width);
    if x.len() < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: x.len() });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(my - sxy / sxx * mx)
}

/// Evaluates the lineshape features along `axis`. A point that fails is
/// recorded with its error and the scan continues.
pub fn scan(
    base: &PhysicalParams,
    dist: &VelocityDistribution,
    quad: &QuadratureConfig,
    grid: &DeltaGrid,
    axis: ScanAxis,
    values: &[f64],
) -> Result<ScanResult> {
    if values.is_empty() {
        return Err(Error::Config("scan needs at least one value".into()));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("scan values must be strictly increasing".into()));
    }
    let points = values
        .iter()
        .map(|&value| {
            let outcome = axis.apply(base, dist, value).and_then(|(p, d)| {
                let signal = CellSignal::new(d, quad.clone());
                analyze(&signal, &p, grid).map(|a| (p, a))
            });
            match outcome {
                Ok((p, a)) => ScanPoint {
                    value,
                    params: p,
                    convergence: a.spectrum.meta.as_ref().and_then(|m| m.convergence),
                    features: Some(a.features),
                    error: None,
                },
                Err(e) => {
                    log::warn!("scan point {axis} = {value} failed: {e}");
                    ScanPoint { value, params: *base, features: None, convergence: None, error: Some(e.to_string()) }
                }
            }
        })
        .collect();
    Ok(ScanResult { axis, points, fit: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_names_round_trip() {
        for a in ScanAxis::ALL {
            assert_eq!(ScanAxis::parse(a.name()).unwrap(), a);
        }
        assert!(ScanAxis::parse("nope").is_err());
    }

    #[test]
    fn axis_application() {
        let base = PhysicalParams::default();
        let mb = VelocityDistribution::maxwell_boltzmann(50.0);
        let (p, _) = ScanAxis::RabiSquared.apply(&base, &mb, 4e-4).unwrap();
        assert!((p.rabi - 0.02).abs() < 1e-15);
        let (p, _) = ScanAxis::Relaxation.apply(&base, &mb, 1e-6).unwrap();
        assert_eq!(p.feed, 5e-7);
        let (_, d) = ScanAxis::Cutoff.apply(&base, &mb, 0.1).unwrap();
        assert_eq!(d, VelocityDistribution::truncated(50.0, 0.1));
        let (_, d) = ScanAxis::Cutoff.apply(&base, &mb, 0.0).unwrap();
        assert_eq!(d, mb);
    }

    #[test]
    fn zero_field_line() {
        let point = |value: f64, width: f64| ScanPoint {
            value,
            params: PhysicalParams::default(),
            features: Some(LineshapeFeatures {
                width_pp: width,
                width_pp_over_gp: None,
                amp_pp: 1.0,
                delta_max: width / 2.0,
                delta_min: -width / 2.0,
                value_max: 0.5,
                value_min: -0.5,
                warnings: vec![],
            }),
            convergence: None,
            error: None,
        };
        let mut s = ScanResult {
            axis: ScanAxis::RabiSquared,
            points: [1.0, 2.0, 4.0].iter().map(|x| point(*x, 3.0 + 0.5 * x)).collect(),
            fit: None,
        };
        assert!((zero_field_width(&s).unwrap() - 3.0).abs() < 1e-12);
        s.axis = ScanAxis::CellLength;
        assert!(zero_field_width(&s).is_err());
    }

    #[test]
    fn unsorted_values_rejected() {
        let base = PhysicalParams::default();
        let mb = VelocityDistribution::maxwell_boltzmann(50.0);
        let q = QuadratureConfig::default();
        let g = DeltaGrid::default();
        assert!(scan(&base, &mb, &q, &g, ScanAxis::CellLength, &[2.0, 1.0]).is_err());
        assert!(scan(&base, &mb, &q, &g, ScanAxis::CellLength, &[]).is_err());
    }

    #[test]
    fn failing_point_recorded() {
        let base = PhysicalParams::default();
        let mb = VelocityDistribution::maxwell_boltzmann(50.0);
        let q = QuadratureConfig { convergence_check: false, nodes_per_decade: 8, ..Default::default() };
        let g = DeltaGrid { points_per_decade: 4, ..Default::default() };
        let s = scan(&base, &mb, &q, &g, ScanAxis::Branching, &[1.5]).unwrap();
        assert_eq!(s.failures(), 1);
        assert!(s.points[0].features.is_none());
    }
}
