//! Minimal CSV writer: header row, `.` decimals, shortest round-trip floats.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Cell for a float; empty when absent, non-finite values spelled out.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = row.iter().map(|c| escape(c)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

fn escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_header_and_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![num(0.5), opt(None)]);
        t.push(vec![num(-1e-7), "x,y".into()]);
        assert_eq!(t.render(), "a,b\n5e-1,\n-1e-7,\"x,y\"\n");
        let back: f64 = num(0.1 + 0.2).parse().unwrap();
        assert_eq!(back, 0.1 + 0.2);
    }
}
