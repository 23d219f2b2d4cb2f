use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// y ≈ prefactor · x^exponent, fitted in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Inclusive x range the fit was restricted to.
    pub fit_range: (f64, f64),
    /// RMS of ln y − ln ŷ over the fitted points.
    pub residual: f64,
    pub points: usize,
}

impl PowerLawFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.prefactor * x.powf(self.exponent)
    }
}

pub const MIN_FIT_POINTS: usize = 4;

/// Least-squares line through (ln x, ln y) for the points with x in `range`.
pub fn fit_power_law_xy(x: &[f64], y: &[f64], range: (f64, f64)) -> Result<PowerLawFit> {
    let (lo, hi) = (range.0.min(range.1), range.0.max(range.1));
    let mut pts = Vec::new();
    for (xi, yi) in x.iter().zip(y) {
        if *xi < lo || *xi > hi {
            continue;
        }
        if !(*xi > 0.0 && *yi > 0.0) {
            return Err(Error::NonPositiveFeature { x: *xi, value: *yi });
        }
        pts.push((xi.ln(), yi.ln()));
    }
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints { needed: MIN_FIT_POINTS, got: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientPoints { needed: 2, got: 1 });
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - exponent * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(PowerLawFit { exponent, prefactor: intercept.exp(), fit_range: (lo, hi), residual, points: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 3.0 / (x * x)).collect();
        let f = fit_power_law_xy(&x, &y, (0.0, 100.0)).unwrap();
        assert!((f.exponent + 2.0).abs() < 1e-12);
        assert!((f.prefactor - 3.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert!((f.eval(2.0) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn range_restriction() {
        let x: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| if *x <= 10.0 { x * x } else { 100.0 * x / 10.0 }).collect();
        let f = fit_power_law_xy(&x, &y, (1.0, 10.0)).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12);
        assert_eq!(f.points, 10);
    }

    #[test]
    fn errors() {
        let x = [1.0, 2.0, 3.0];
        assert!(matches!(
            fit_power_law_xy(&x, &[1.0, 2.0, 3.0], (0.0, 10.0)),
            Err(Error::InsufficientPoints { .. })
        ));
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!(matches!(
            fit_power_law_xy(&x, &[1.0, -2.0, 3.0, 4.0], (0.0, 10.0)),
            Err(Error::NonPositiveFeature { .. })
        ));
    }
}
