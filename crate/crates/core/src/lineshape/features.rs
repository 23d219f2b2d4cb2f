use serde::{Deserialize, Serialize};

use super::spectrum::{Spectrum, SpectrumKind};
use crate::error::{Error, Result};

/// Relative height above which a secondary extremum is reported.
pub const SECONDARY_EXTREMUM_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeatureWarning {
    /// Another local extremum reaches within 10% of the global one.
    SecondaryExtremum { position: f64, value: f64 },
    /// An extremum sits on the edge of the grid.
    ExtremumAtEdge { position: f64 },
}

/// Peak-to-peak characteristics of a derivative spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineshapeFeatures {
    /// Δ_pp in Γ.
    pub width_pp: f64,
    /// Δ_pp in units of γ_p, when the spectrum carries its parameters.
    pub width_pp_over_gp: Option<f64>,
    /// A_pp = max − min.
    pub amp_pp: f64,
    pub delta_max: f64,
    pub delta_min: f64,
    pub value_max: f64,
    pub value_min: f64,
    pub warnings: Vec<FeatureWarning>,
}

/// Locates the global maximum and minimum of a derivative spectrum and refines
/// each with a parabola through the neighbouring grid points.
pub fn extract_features(spec: &Spectrum) -> Result<LineshapeFeatures> {
    if spec.kind != SpectrumKind::Derivative {
        return Err(Error::Spectrum("features are defined on derivative spectra".into()));
    }
    let x = &spec.delta_grid;
    let y = &spec.values;
    if y.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: y.len() });
    }
    let imax = (0..y.len()).max_by(|a, b| y[*a].total_cmp(&y[*b])).expect("non-empty");
    let imin = (0..y.len()).min_by(|a, b| y[*a].total_cmp(&y[*b])).expect("non-empty");
    if y[imax] == y[imin] {
        return Err(Error::Spectrum("flat derivative spectrum has no extrema".into()));
    }
    check_cusp(x, imax)?;
    check_cusp(x, imin)?;

    let mut warnings = Vec::new();
    let (delta_max, value_max) = refine(x, y, imax, &mut warnings);
    let (delta_min, value_min) = refine(x, y, imin, &mut warnings);
    secondary_extrema(x, y, imax, imin, &mut warnings);

    let width_pp = (delta_max - delta_min).abs();
    let width_pp_over_gp = spec
        .meta
        .as_ref()
        .map(|m| m.derived.pump_rate)
        .filter(|gp| *gp > 0.0)
        .map(|gp| width_pp / gp);
    Ok(LineshapeFeatures {
        width_pp,
        width_pp_over_gp,
        amp_pp: value_max - value_min,
        delta_max,
        delta_min,
        value_max,
        value_min,
        warnings,
    })
}

/// An extremum on a grid point adjacent to a sign change of δ means the
/// central feature lies between the two innermost points.
fn check_cusp(x: &[f64], i: usize) -> Result<()> {
    let straddles = |j: usize| j + 1 < x.len() && x[j] < 0.0 && x[j + 1] > 0.0;
    let zero_neighbour = |j: usize| x[j] == 0.0;
    let near = (i > 0 && (straddles(i - 1) || zero_neighbour(i - 1)))
        || (i + 1 < x.len() && (straddles(i) || zero_neighbour(i + 1)));
    let inner = x.iter().filter(|v| **v != 0.0).map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if near && x[i].abs() <= inner {
        return Err(Error::UnresolvedCusp { position: x[i] });
    }
    Ok(())
}

fn refine(x: &[f64], y: &[f64], i: usize, warnings: &mut Vec<FeatureWarning>) -> (f64, f64) {
    if i == 0 || i + 1 == x.len() {
        warnings.push(FeatureWarning::ExtremumAtEdge { position: x[i] });
        return (x[i], y[i]);
    }
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    // Newton divided differences
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c = (d12 - d01) / (x2 - x0);
    if c == 0.0 {
        return (x1, y1);
    }
    let b = d01 - c * (x0 + x1);
    let xv = (-b / (2.0 * c)).clamp(x0, x2);
    let yv = y0 + d01 * (xv - x0) + c * (xv - x0) * (xv - x1);
    (xv, yv)
}

fn secondary_extrema(x: &[f64], y: &[f64], imax: usize, imin: usize, warnings: &mut Vec<FeatureWarning>) {
    let (hi, lo) = (y[imax], y[imin]);
    for i in 1..y.len() - 1 {
        if i == imax || i == imin {
            continue;
        }
        let is_max = y[i] > y[i - 1] && y[i] >= y[i + 1];
        let is_min = y[i] < y[i - 1] && y[i] <= y[i + 1];
        let secondary = (is_max && hi > 0.0 && y[i] >= SECONDARY_EXTREMUM_FRACTION * hi)
            || (is_min && lo < 0.0 && y[i] <= SECONDARY_EXTREMUM_FRACTION * lo);
        if secondary {
            log::warn!("secondary extremum at δ = {} ({})", x[i], y[i]);
            warnings.push(FeatureWarning::SecondaryExtremum { position: x[i], value: y[i] });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lineshape::spectrum::DeltaGrid;

    fn synthetic(a: f64, w: f64, ppd: usize) -> Spectrum {
        let grid = DeltaGrid { min_ratio: 1e-3, max_ratio: 20.0, points_per_decade: ppd }.build(w).unwrap();
        let vals = grid.iter().map(|x| a * x * (-x * x / (2.0 * w * w)).exp()).collect();
        Spectrum::new(grid, vals, SpectrumKind::Derivative).unwrap()
    }

    #[test]
    fn odd_gaussian_derivative() {
        let (a, w) = (2.5, 0.3);
        let f = extract_features(&synthetic(a, w, 40)).unwrap();
        assert!((f.width_pp - 2.0 * w).abs() < 1e-3 * 2.0 * w, "{}", f.width_pp);
        let amp = 2.0 * a * w * (-0.5f64).exp();
        assert!((f.amp_pp - amp).abs() < 1e-5 * amp, "{} vs {amp}", f.amp_pp);
        assert!(f.delta_max > 0.0 && f.delta_min < 0.0);
        assert!((f.delta_max + f.delta_min).abs() < 1e-12);
        assert!(f.warnings.is_empty());
    }

    #[test]
    fn rejects_direct_spectra() {
        let s = synthetic(1.0, 1.0, 10);
        let direct = Spectrum { kind: SpectrumKind::Direct, ..s };
        assert!(extract_features(&direct).is_err());
    }

    #[test]
    fn unresolved_cusp_detected() {
        // extremum well inside the innermost grid points
        let s = synthetic(1.0, 1e-6, 10);
        let grid: Vec<f64> = s.delta_grid.iter().map(|x| x * 1e4).collect();
        let vals = grid.iter().map(|x| x.signum() * (-x.abs()).exp()).collect();
        let s = Spectrum::new(grid, vals, SpectrumKind::Derivative).unwrap();
        assert!(matches!(extract_features(&s), Err(Error::UnresolvedCusp { .. })));
    }

    #[test]
    fn secondary_extrema_reported() {
        let grid: Vec<f64> = (-400..=400).map(|i| i as f64 * 0.01).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|x| x * (-x * x).exp() + 0.95 * (x - 3.0) * (-(x - 3.0) * (x - 3.0)).exp())
            .collect();
        let s = Spectrum::new(grid, vals, SpectrumKind::Derivative).unwrap();
        let f = extract_features(&s).unwrap();
        assert!(f.warnings.iter().any(|w| matches!(w, FeatureWarning::SecondaryExtremum { .. })));
    }
}
