//! Plain CSV tables: header plus rows, `.` decimal point, LF newlines.

use std::io::{self, Write};
use std::path::Path;

/// Floats at 12 significant digits, switching to exponent form outside
/// `[1e−6, 1e15)` so tiny or huge values stay short.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if (1e-6..1e15).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes `table` to `path`, or to stdout when no path is given.
pub fn emit_csv(table: &Table, path: Option<&Path>) -> io::Result<()> {
    if table.rows.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "report has no rows"));
    }
    emit_text(&table.render(), path)
}

pub fn emit_text(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(14.103811572969501), "14.103811573");
        assert_eq!(num(0.9594945099624134), "0.959494509962");
        assert_eq!(num(100.0), "100");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-2.5e-9), "-2.5e-9");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
    }

    #[test]
    fn header_plus_rows() {
        let mut t = Table::new(&["a", "b"]);
        for i in 0..3 {
            t.push(vec![i.to_string(), num(i as f64 / 2.0)]);
        }
        let text = t.render();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text, "a,b\n0,0\n1,0.5\n2,1\n");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn empty_report_is_refused() {
        assert!(emit_csv(&Table::new(&["x"]), None).is_err());
    }
}
