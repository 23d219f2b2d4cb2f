//! Config-file driven runs, as done by the command-line tool: parse a flat
//! key = value config, write a spectrum, a scan and their manifests.

use cpt_cell::cli::{cmd_scan, cmd_spectrum, RunConfig};
use cpt_cell::lineshape::ScanAxis;
use cpt_cell::Result;

const CONFIG: &str = "\
# weak field, open system
rabi = 0.01
branching = 0.7
ground_relax = 1e-6
phi = 1
grid_points_per_decade = 20
workers = 0
";

fn main() -> Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/config_run".into());
    let cfg = RunConfig { out: out.into(), ..RunConfig::parse(CONFIG)? };
    println!("resolved config:\n{}", cfg.to_text());
    for f in cmd_spectrum(&cfg)?.files {
        println!("wrote {}", f.display());
    }
    let scan = cmd_scan(&cfg, Some(ScanAxis::Branching), Some(vec![0.3, 0.5, 0.7, 0.9, 1.0]))?;
    for f in scan.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
