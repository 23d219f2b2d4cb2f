use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DerivedParams, PhysicalParams};
use crate::signal::{QuadratureConfig, VelocityDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Direct,
    Derivative,
}

/// Outcome of the refined-mesh comparison run alongside a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Largest change of a checked point, relative to the largest |value|.
    pub max_rel_change: f64,
    pub checked_points: usize,
    pub tolerance: f64,
}

/// Everything needed to reproduce a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub params: PhysicalParams,
    pub derived: DerivedParams,
    pub distribution: VelocityDistribution,
    pub quadrature: QuadratureConfig,
    /// Upper |v_z| limit of a partial velocity integral.
    pub velocity_limit: Option<f64>,
    pub convergence: Option<ConvergenceReport>,
}

/// Signal sampled against the Raman detuning δ (in Γ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub delta_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: SpectrumKind,
    pub meta: Option<SpectrumMeta>,
}

impl Spectrum {
    pub fn new(delta_grid: Vec<f64>, values: Vec<f64>, kind: SpectrumKind) -> Result<Self> {
        check_grid(&delta_grid)?;
        if values.len() != delta_grid.len() {
            return Err(Error::Spectrum(format!(
                "{} values for {} grid points",
                values.len(),
                delta_grid.len()
            )));
        }
        Ok(Spectrum { delta_grid, values, kind, meta: None })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Detunings in units of the pumping rate γ_p, when known.
    pub fn delta_over_pump(&self) -> Option<Vec<f64>> {
        let gp = self.meta.as_ref()?.derived.pump_rate;
        Some(self.delta_grid.iter().map(|d| d / gp).collect())
    }

    /// max − min of the values.
    pub fn peak_to_peak(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        hi - lo
    }

    /// Largest deviation from exact parity about δ = 0 (even for direct,
    /// odd for derivative spectra), relative to the largest |value|.
    /// Requires a grid symmetric about zero.
    pub fn parity_defect(&self) -> Option<f64> {
        let n = self.len();
        let sign = match self.kind {
            SpectrumKind::Direct => 1.0,
            SpectrumKind::Derivative => -1.0,
        };
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0f64;
        for i in 0..n {
            let j = n - 1 - i;
            if (self.delta_grid[i] + self.delta_grid[j]).abs() > 1e-12 * self.delta_grid[j].abs().max(1e-300) {
                return None;
            }
            worst = worst.max((self.values[i] - sign * self.values[j]).abs());
        }
        Some(if scale > 0.0 { worst / scale } else { 0.0 })
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Spectrum("empty detuning grid".into()));
    }
    if grid.iter().any(|d| !d.is_finite()) {
        return Err(Error::Spectrum("non-finite detuning".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Spectrum("detuning grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Settings of the symmetric detuning grid, in units of γ_p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaGrid {
    /// Smallest nonzero |δ|/γ_p of the geometric part.
    pub min_ratio: f64,
    /// Largest |δ|/γ_p.
    pub max_ratio: f64,
    pub points_per_decade: usize,
}

impl Default for DeltaGrid {
    fn default() -> Self {
        DeltaGrid { min_ratio: 1e-4, max_ratio: 1e2, points_per_decade: 40 }
    }
}

impl DeltaGrid {
    /// Symmetric geometric grid ±[min, max]·scale with a linear patch through 0.
    pub fn build(&self, scale: f64) -> Result<Vec<f64>> {
        if !(self.min_ratio > 0.0 && self.max_ratio > self.min_ratio && scale > 0.0)
            || self.points_per_decade == 0
        {
            return Err(Error::Spectrum(format!("invalid detuning grid {self:?} at scale {scale}")));
        }
        let decades = (self.max_ratio / self.min_ratio).log10();
        let n = (decades * self.points_per_decade as f64).round().max(1.0) as usize;
        let mut pos: Vec<f64> = (0..=n)
            .map(|i| self.min_ratio * (self.max_ratio / self.min_ratio).powf(i as f64 / n as f64))
            .collect();
        pos.insert(0, self.min_ratio / 3.0);
        pos.insert(1, 2.0 * self.min_ratio / 3.0);
        let mut grid: Vec<f64> = pos.iter().rev().map(|x| -x * scale).collect();
        grid.push(0.0);
        grid.extend(pos.iter().map(|x| x * scale));
        Ok(grid)
    }

    pub fn doubled(&self) -> Self {
        DeltaGrid { points_per_decade: 2 * self.points_per_decade, ..self.clone() }
    }
}

/// Derivative with respect to δ by second-order finite differences on the
/// (possibly non-uniform) grid.
pub fn derivative(spec: &Spectrum) -> Result<Spectrum> {
    if spec.kind != SpectrumKind::Direct {
        return Err(Error::Spectrum("derivative of a derivative spectrum".into()));
    }
    let x = &spec.delta_grid;
    let y = &spec.values;
    let n = x.len();
    if n < 3 {
        return Err(Error::Spectrum("need at least three points".into()));
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let hm = x[i] - x[i - 1];
        let hp = x[i + 1] - x[i];
        d[i] = (hm * hm * y[i + 1] - hp * hp * y[i - 1] + (hp * hp - hm * hm) * y[i])
            / (hm * hp * (hm + hp));
    }
    d[0] = one_sided(x[0], x[1], x[2], y[0], y[1], y[2]);
    d[n - 1] = -one_sided(-x[n - 1], -x[n - 2], -x[n - 3], y[n - 1], y[n - 2], y[n - 3]);
    Ok(Spectrum { delta_grid: x.clone(), values: d, kind: SpectrumKind::Derivative, meta: spec.meta.clone() })
}

/// Derivative at x0 of the parabola through three points.
fn one_sided(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64) -> f64 {
    let h1 = x1 - x0;
    let h2 = x2 - x0;
    (y1 * h2 * h2 - y2 * h1 * h1 - y0 * (h2 * h2 - h1 * h1)) / (h1 * h2 * (h2 - h1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric_and_increasing() {
        let g = DeltaGrid::default().build(1e-4).unwrap();
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        for (a, b) in g.iter().zip(g.iter().rev()) {
            assert_eq!(*a, -*b);
        }
        assert_eq!(g.len(), 2 * (240 + 3) + 1);
        assert!((g[g.len() - 1] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(Spectrum::new(vec![], vec![], SpectrumKind::Direct).is_err());
        assert!(Spectrum::new(vec![1.0, 0.0], vec![1.0, 1.0], SpectrumKind::Direct).is_err());
    }

    #[test]
    fn lorentzian_derivative() {
        let w: f64 = 0.3;
        let grid = DeltaGrid { min_ratio: 1e-4, max_ratio: 10.0, points_per_decade: 8000 }.build(1.0).unwrap();
        let vals: Vec<f64> = grid.iter().map(|x| 1.0 / (x * x + w * w)).collect();
        let s = Spectrum::new(grid.clone(), vals, SpectrumKind::Direct).unwrap();
        let d = derivative(&s).unwrap();
        for (x, v) in grid.iter().zip(&d.values) {
            let exact = -2.0 * x / (x * x + w * w).powi(2);
            let scale = 1.0 / w.powi(3);
            assert!((v - exact).abs() < 1e-6 * scale.max(exact.abs()), "x={x}: {v} vs {exact}");
        }
        assert!(d.parity_defect().unwrap() < 1e-12);
    }

    #[test]
    fn derivative_of_even_is_odd() {
        let grid = DeltaGrid { min_ratio: 1e-2, max_ratio: 10.0, points_per_decade: 10 }.build(1.0).unwrap();
        let vals: Vec<f64> = grid.iter().map(|x| (-x * x).exp() + x.abs().sqrt()).collect();
        let s = Spectrum::new(grid, vals, SpectrumKind::Direct).unwrap();
        assert_eq!(s.parity_defect(), Some(0.0));
        let d = derivative(&s).unwrap();
        assert!(d.parity_defect().unwrap() < 1e-14);
        assert!(derivative(&d).is_err());
    }
}
