//! Longitudinal velocity distributions and the velocity quadrature mesh.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longitudinal velocity density W(v_z), velocities in Γ/k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VelocityDistribution {
    /// W(v) = exp(−v²/u²)/(√π u), with k·u the Doppler width.
    MaxwellBoltzmann { width: f64 },
    /// Maxwell-Boltzmann with |v| < cutoff removed, not renormalized.
    TruncatedMb { width: f64, cutoff: f64 },
    /// Piecewise-linear interpolation of (|v|, W) pairs, zero outside the table.
    Tabulated { table: Vec<(f64, f64)> },
}

impl VelocityDistribution {
    pub fn maxwell_boltzmann(doppler_width: f64) -> Self {
        VelocityDistribution::MaxwellBoltzmann { width: doppler_width }
    }

    pub fn truncated(doppler_width: f64, cutoff: f64) -> Self {
        VelocityDistribution::TruncatedMb { width: doppler_width, cutoff }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            VelocityDistribution::MaxwellBoltzmann { width } => check_width(*width),
            VelocityDistribution::TruncatedMb { width, cutoff } => {
                check_width(*width)?;
                if !(cutoff.is_finite() && *cutoff >= 0.0) {
                    return Err(Error::InvalidDistribution(format!("cutoff {cutoff}")));
                }
                Ok(())
            }
            VelocityDistribution::Tabulated { table } => {
                if table.len() < 2 {
                    return Err(Error::InvalidDistribution("table needs at least two rows".into()));
                }
                if table.iter().any(|(v, w)| !v.is_finite() || !w.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidDistribution("non-finite or negative velocity".into()));
                }
                if table.iter().any(|(_, w)| *w < 0.0) {
                    return Err(Error::InvalidDistribution("negative density".into()));
                }
                if table.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidDistribution("velocities must increase".into()));
                }
                Ok(())
            }
        }
    }

    /// Density at v (even in v).
    pub fn density(&self, v: f64) -> f64 {
        let a = v.abs();
        match self {
            VelocityDistribution::MaxwellBoltzmann { width } => mb(a, *width),
            VelocityDistribution::TruncatedMb { width, cutoff } => {
                if a < *cutoff {
                    0.0
                } else {
                    mb(a, *width)
                }
            }
            VelocityDistribution::Tabulated { table } => {
                if a < table[0].0 || a > table[table.len() - 1].0 {
                    return 0.0;
                }
                let k = table.partition_point(|(x, _)| *x <= a).clamp(1, table.len() - 1);
                let (x0, w0) = table[k - 1];
                let (x1, w1) = table[k];
                w0 + (w1 - w0) * (a - x0) / (x1 - x0)
            }
        }
    }

    /// Speed below which the density vanishes identically.
    pub fn lower_support(&self) -> f64 {
        match self {
            VelocityDistribution::MaxwellBoltzmann { .. } => 0.0,
            VelocityDistribution::TruncatedMb { cutoff, .. } => *cutoff,
            VelocityDistribution::Tabulated { table } => table[0].0,
        }
    }

    /// Default integration cutoff: four thermal widths, or the table end.
    pub fn default_v_max(&self) -> f64 {
        match self {
            VelocityDistribution::MaxwellBoltzmann { width }
            | VelocityDistribution::TruncatedMb { width, .. } => 4.0 * width,
            VelocityDistribution::Tabulated { table } => table[table.len() - 1].0,
        }
    }

    /// Kinks of the density that the mesh should not straddle.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            VelocityDistribution::MaxwellBoltzmann { .. } => vec![],
            VelocityDistribution::TruncatedMb { cutoff, .. } => vec![*cutoff],
            VelocityDistribution::Tabulated { table } => table.iter().map(|(v, _)| *v).collect(),
        }
    }
}

fn check_width(w: f64) -> Result<()> {
    if w.is_finite() && w > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(format!("width {w}")))
    }
}

fn mb(v: f64, u: f64) -> f64 {
    (-(v / u) * (v / u)).exp() / (std::f64::consts::PI.sqrt() * u)
}

/// Velocity quadrature settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Smallest resolved |v_z|; the band below is closed analytically.
    pub v_min: f64,
    /// Integration cutoff; `None` means the distribution default (4u).
    pub v_max: Option<f64>,
    /// Quadrature nodes per decade of |v_z| on the log-graded mesh.
    pub nodes_per_decade: usize,
    /// Gauss-Legendre order on each panel.
    pub panel_order: usize,
    /// Re-run on a refined mesh and fail if the result moves by more than `tolerance`.
    pub convergence_check: bool,
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            v_min: 1e-6,
            v_max: None,
            nodes_per_decade: 16,
            panel_order: 8,
            convergence_check: true,
            tolerance: 1e-3,
        }
    }
}

/// End of the log-graded inner region of the mesh.
pub const GRADED_SPLIT: f64 = 0.1;

impl QuadratureConfig {
    pub fn validate(&self, dist: &VelocityDistribution) -> Result<()> {
        let v_max = self.v_max.unwrap_or_else(|| dist.default_v_max());
        if !(self.v_min > 0.0 && self.v_min.is_finite()) {
            return Err(Error::InvalidQuadrature(format!("v_min = {}", self.v_min)));
        }
        if !(v_max.is_finite() && self.v_min < v_max) {
            return Err(Error::InvalidQuadrature(format!("v_min = {} >= v_max = {v_max}", self.v_min)));
        }
        if self.nodes_per_decade == 0 || self.panel_order == 0 {
            return Err(Error::InvalidQuadrature("empty mesh".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidQuadrature(format!("tolerance = {}", self.tolerance)));
        }
        Ok(())
    }

    /// Same mesh with twice the node density.
    pub fn refined(&self) -> Self {
        QuadratureConfig { nodes_per_decade: 2 * self.nodes_per_decade, ..self.clone() }
    }
}

/// Quadrature nodes on |v_z| ∈ [lo, hi].
#[derive(Debug, Clone)]
pub struct VelocityMesh {
    /// (|v|, weight) with weights for ∫ f(v) dv.
    pub nodes: Vec<(f64, f64)>,
    /// Lower end of the meshed range.
    pub lo: f64,
    pub hi: f64,
}

impl VelocityMesh {
    /// Builds the mesh for |v| between the resolved minimum and `upper` (or v_max).
    ///
    /// Panels are log-graded with `nodes_per_decade` nodes per decade; around
    /// the Doppler-shifted resonance |v| ≈ |δω| they are additionally limited
    /// to a width of Γ/(4k). `extra` adds panel breakpoints.
    pub fn build(
        q: &QuadratureConfig,
        dist: &VelocityDistribution,
        laser_detuning: f64,
        upper: Option<f64>,
        extra: &[f64],
    ) -> Result<Self> {
        q.validate(dist)?;
        let v_max = q.v_max.unwrap_or_else(|| dist.default_v_max());
        let hi = upper.map_or(v_max, |u| u.min(v_max));
        let lo = q.v_min.max(dist.lower_support());
        if hi <= lo {
            return Ok(VelocityMesh { nodes: vec![], lo, hi: lo });
        }

        let mut edges = vec![lo, hi];
        // log-graded panels
        let per_decade = (q.nodes_per_decade as f64 / q.panel_order as f64).max(0.25);
        let decades = (hi / lo).log10();
        let n_panels = (decades * per_decade).ceil().max(1.0) as usize;
        let ratio = (hi / lo).powf(1.0 / n_panels as f64);
        let mut x = lo;
        for _ in 1..n_panels {
            x *= ratio;
            edges.push(x);
        }
        edges.push(GRADED_SPLIT);
        // resonance band
        let res = laser_detuning.abs();
        if res > 0.0 {
            let step = 0.25 * 16.0 / q.nodes_per_decade as f64;
            let mut v = (res - 4.0).max(0.0);
            while v <= res + 4.0 {
                edges.push(v);
                v += step;
            }
        }
        edges.extend(dist.breakpoints());
        edges.extend_from_slice(extra);
        edges.retain(|e| e.is_finite() && *e >= lo && *e <= hi);
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());

        let (gx, gw) = gauss_legendre(q.panel_order);
        let mut nodes = Vec::with_capacity(edges.len() * q.panel_order);
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b <= a {
                continue;
            }
            // integrate in ln v on panels spanning a wide ratio, linearly otherwise
            if b / a > 1.5 {
                let (la, lb) = (a.ln(), b.ln());
                let half = 0.5 * (lb - la);
                let mid = 0.5 * (lb + la);
                for (x, w) in gx.iter().zip(&gw) {
                    let v = (mid + half * x).exp();
                    nodes.push((v, w * half * v));
                }
            } else {
                let half = 0.5 * (b - a);
                let mid = 0.5 * (b + a);
                for (x, w) in gx.iter().zip(&gw) {
                    nodes.push((mid + half * x, w * half));
                }
            }
        }
        Ok(VelocityMesh { nodes, lo, hi })
    }
}

/// Gauss-Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
