//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated, optional values accept `auto`. Every key written by
//! [`RunConfig::to_text`] is read back by [`RunConfig::parse`] to the same value.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lineshape::{detuning_scale, DeltaGrid, ScanAxis};
use crate::params::PhysicalParams;
use crate::signal::{QuadratureConfig, VelocityDistribution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: PhysicalParams,
    /// Speed below which atoms are removed from the Maxwell-Boltzmann
    /// distribution; 0 keeps the full distribution.
    pub cutoff: f64,
    /// Tabulated (|v|, W) density replacing the thermal one.
    pub velocity_table: Option<Vec<(f64, f64)>>,
    pub quadrature: QuadratureConfig,
    pub grid: DeltaGrid,
    /// Explicit detunings δ/γ_p overriding `grid`.
    pub delta_over_gp: Option<Vec<f64>>,
    /// Upper |v_z| limits Δ_s/Γ for `velocity-select`.
    pub velocity_limits: Vec<f64>,
    pub scan_axis: Option<ScanAxis>,
    pub scan_values: Vec<f64>,
    /// Axis range of the power-law fit of a scan; `None` fits every point.
    pub fit_range: Option<(f64, f64)>,
    pub out: PathBuf,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Seed of the random draws in `validate`.
    pub seed: u64,
    pub draws: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: PhysicalParams::default(),
            cutoff: 0.0,
            velocity_table: None,
            quadrature: QuadratureConfig::default(),
            grid: DeltaGrid::default(),
            delta_over_gp: None,
            velocity_limits: (0..=24).map(|i| 10f64.powf(-4.0 + i as f64 / 4.0)).collect(),
            scan_axis: None,
            scan_values: Vec::new(),
            fit_range: None,
            out: PathBuf::from("out"),
            workers: 0,
            seed: 1,
            draws: 1000,
        }
    }
}

const KEYS: &[&str] = &[
    "rabi",
    "branching",
    "ground_relax",
    "feed",
    "raman_detuning",
    "laser_detuning",
    "cell_length",
    "phi",
    "doppler_width",
    "cutoff",
    "velocity_table",
    "v_min",
    "v_max",
    "nodes_per_decade",
    "panel_order",
    "convergence_check",
    "tolerance",
    "grid_min_ratio",
    "grid_max_ratio",
    "grid_points_per_decade",
    "delta_over_gp",
    "velocity_limits",
    "scan_axis",
    "scan_values",
    "fit_range",
    "out",
    "workers",
    "seed",
    "draws",
];

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("invalid value '{value}' for '{key}'"))
}

fn float(key: &str, value: &str) -> Result<f64> {
    let x: f64 = value.parse().map_err(|_| bad(key, value))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad(key, value))
    }
}

fn uint<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value))
}

/// Comma-separated floats; an empty value is an empty list.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|s| float(key, s.trim())).collect()
}

fn is_auto(value: &str) -> bool {
    value.eq_ignore_ascii_case("auto")
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key '{k}'", n + 1)));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key '{k}'", n + 1)));
            }
        }
        Self::from_map(&map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut c = RunConfig::default();
        let get = |k: &str| map.get(k).map(String::as_str);
        let p = &mut c.params;
        if let Some(v) = get("rabi") {
            p.rabi = float("rabi", v)?;
        }
        if let Some(v) = get("branching") {
            p.branching = float("branching", v)?;
        }
        if let Some(v) = get("ground_relax") {
            p.ground_relax = float("ground_relax", v)?;
        }
        p.feed = match get("feed") {
            Some(v) => float("feed", v)?,
            None => p.ground_relax / 2.0,
        };
        if let Some(v) = get("raman_detuning") {
            p.raman_detuning = float("raman_detuning", v)?;
        }
        if let Some(v) = get("laser_detuning") {
            p.laser_detuning = float("laser_detuning", v)?;
        }
        match (get("cell_length"), get("phi")) {
            (Some(_), Some(_)) => return Err(Error::Config("give either cell_length or phi".into())),
            (Some(v), None) => p.cell_length = float("cell_length", v)?,
            (None, Some(v)) => {
                if p.rabi == 0.0 {
                    return Err(Error::Config("phi needs a nonzero rabi".into()));
                }
                *p = p.with_phi(float("phi", v)?);
            }
            (None, None) => {}
        }
        if let Some(v) = get("doppler_width") {
            p.doppler_width = float("doppler_width", v)?;
        }
        if let Some(v) = get("cutoff") {
            c.cutoff = float("cutoff", v)?;
        }
        if let Some(v) = get("velocity_table") {
            let flat = parse_list("velocity_table", v)?;
            if flat.len() % 2 != 0 {
                return Err(bad("velocity_table", v));
            }
            c.velocity_table = Some(flat.chunks(2).map(|w| (w[0], w[1])).collect());
        }

        let q = &mut c.quadrature;
        if let Some(v) = get("v_min") {
            q.v_min = float("v_min", v)?;
        }
        if let Some(v) = get("v_max") {
            q.v_max = if is_auto(v) { None } else { Some(float("v_max", v)?) };
        }
        if let Some(v) = get("nodes_per_decade") {
            q.nodes_per_decade = uint("nodes_per_decade", v)?;
        }
        if let Some(v) = get("panel_order") {
            q.panel_order = uint("panel_order", v)?;
        }
        if let Some(v) = get("convergence_check") {
            q.convergence_check = v.parse().map_err(|_| bad("convergence_check", v))?;
        }
        if let Some(v) = get("tolerance") {
            q.tolerance = float("tolerance", v)?;
        }

        if let Some(v) = get("grid_min_ratio") {
            c.grid.min_ratio = float("grid_min_ratio", v)?;
        }
        if let Some(v) = get("grid_max_ratio") {
            c.grid.max_ratio = float("grid_max_ratio", v)?;
        }
        if let Some(v) = get("grid_points_per_decade") {
            c.grid.points_per_decade = uint("grid_points_per_decade", v)?;
        }
        if let Some(v) = get("delta_over_gp") {
            c.delta_over_gp = if is_auto(v) { None } else { Some(parse_list("delta_over_gp", v)?) };
        }
        if let Some(v) = get("velocity_limits") {
            c.velocity_limits = parse_list("velocity_limits", v)?;
        }
        if let Some(v) = get("scan_axis") {
            c.scan_axis = if is_auto(v) { None } else { Some(ScanAxis::parse(v)?) };
        }
        if let Some(v) = get("scan_values") {
            c.scan_values = parse_list("scan_values", v)?;
        }
        if let Some(v) = get("fit_range") {
            c.fit_range = if is_auto(v) {
                None
            } else {
                match parse_list("fit_range", v)?.as_slice() {
                    [a, b] => Some((*a, *b)),
                    _ => return Err(bad("fit_range", v)),
                }
            };
        }
        if let Some(v) = get("out") {
            c.out = PathBuf::from(v);
        }
        if let Some(v) = get("workers") {
            c.workers = uint("workers", v)?;
        }
        if let Some(v) = get("seed") {
            c.seed = uint("seed", v)?;
        }
        if let Some(v) = get("draws") {
            c.draws = uint("draws", v)?;
        }
        Ok(c)
    }

    /// Serializes every field; `parse(to_text())` returns an identical config.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let q = &self.quadrature;
        let auto = |o: Option<String>| o.unwrap_or_else(|| "auto".into());
        let lines = [
            ("rabi", p.rabi.to_string()),
            ("branching", p.branching.to_string()),
            ("ground_relax", p.ground_relax.to_string()),
            ("feed", p.feed.to_string()),
            ("raman_detuning", p.raman_detuning.to_string()),
            ("laser_detuning", p.laser_detuning.to_string()),
            ("cell_length", p.cell_length.to_string()),
            ("doppler_width", p.doppler_width.to_string()),
            ("cutoff", self.cutoff.to_string()),
            ("v_min", q.v_min.to_string()),
            ("v_max", auto(q.v_max.map(|v| v.to_string()))),
            ("nodes_per_decade", q.nodes_per_decade.to_string()),
            ("panel_order", q.panel_order.to_string()),
            ("convergence_check", q.convergence_check.to_string()),
            ("tolerance", q.tolerance.to_string()),
            ("grid_min_ratio", self.grid.min_ratio.to_string()),
            ("grid_max_ratio", self.grid.max_ratio.to_string()),
            ("grid_points_per_decade", self.grid.points_per_decade.to_string()),
            ("delta_over_gp", auto(self.delta_over_gp.as_deref().map(join))),
            ("velocity_limits", join(&self.velocity_limits)),
            ("scan_axis", auto(self.scan_axis.map(|a| a.name().to_string()))),
            ("scan_values", join(&self.scan_values)),
            ("fit_range", auto(self.fit_range.map(|(a, b)| join(&[a, b])))),
            ("out", self.out.display().to_string()),
            ("workers", self.workers.to_string()),
            ("seed", self.seed.to_string()),
            ("draws", self.draws.to_string()),
        ];
        let mut s = String::new();
        for (k, v) in lines {
            s.push_str(&format!("{k} = {v}\n"));
            if k == "cutoff" {
                if let Some(t) = &self.velocity_table {
                    let flat: Vec<f64> = t.iter().flat_map(|(v, w)| [*v, *w]).collect();
                    s.push_str(&format!("velocity_table = {}\n", join(&flat)));
                }
            }
        }
        s
    }

    pub fn distribution(&self) -> VelocityDistribution {
        let width = self.params.doppler_width;
        match &self.velocity_table {
            Some(t) => VelocityDistribution::Tabulated { table: t.clone() },
            None if self.cutoff > 0.0 => VelocityDistribution::truncated(width, self.cutoff),
            None => VelocityDistribution::maxwell_boltzmann(width),
        }
    }

    /// Checks everything a command needs before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(as_config)?;
        let dist = self.distribution();
        dist.validate().map_err(as_config)?;
        self.quadrature.validate(&dist).map_err(as_config)?;
        if self.workers > 1024 {
            return Err(Error::Config(format!("workers = {} is unreasonable", self.workers)));
        }
        self.delta_grid().map(|_| ())
    }

    /// Raman detunings δ (in Γ) of a spectrum.
    pub fn delta_grid(&self) -> Result<Vec<f64>> {
        match &self.delta_over_gp {
            Some(xs) => {
                if xs.is_empty() {
                    return Err(Error::Config("delta_over_gp is empty".into()));
                }
                if xs.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Config("delta_over_gp must be strictly increasing".into()));
                }
                let gp = self.params.derived().pump_rate;
                if !(gp > 0.0) {
                    return Err(Error::Config("delta_over_gp needs a nonzero rabi".into()));
                }
                Ok(xs.iter().map(|x| x * gp).collect())
            }
            None => {
                let scale = detuning_scale(&self.params).map_err(as_config)?;
                self.grid.build(scale).map_err(as_config)
            }
        }
    }
}

fn as_config(e: Error) -> Error {
    Error::Config(e.to_string())
}
