//! Runs a bundled figure configuration and prints its checks.
//!
//! cargo run --release --example reproduce_figure -- fig10 out/fig10

use std::path::PathBuf;

use cpt_cell::cli::{reproduce, FIGURES};
use cpt_cell::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let figure = args.next().unwrap_or_else(|| "fig10".into());
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out").join(&figure));
    if !FIGURES.contains(&figure.as_str()) {
        eprintln!("available: {}", FIGURES.join(" "));
    }
    let report = reproduce(&figure, &out, 0)?;
    for c in &report.checks {
        println!("{} {:<50} {:>12.4e}  expected {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.expected);
    }
    println!("files in {}: {}", out.display(), report.files.join(", "));
    Ok(())
}
