//! Number formatting and CSV assembly.

use std::fmt::Write as _;

/// Largest denominator tried when recognizing exact fractions.
pub const MAX_DENOMINATOR: i64 = 200;

/// Smallest-denominator fraction within `1e-9` of `x`.
pub fn as_rational(x: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    (1..=MAX_DENOMINATOR).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() <= 1e-9).then_some((p as i64, q))
    })
}

/// Four decimals, followed by the exact fraction when one is recognized
/// and it is not an integer.
pub fn number(x: f64) -> String {
    let mut s = format!("{x:.4}");
    if s == "-0.0000" {
        s = "0.0000".into();
    }
    if let Some((p, q)) = as_rational(x) {
        if q > 1 {
            let _ = write!(s, " ({p}/{q})");
        }
    }
    s
}

/// A table with a header and string cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = line.iter().map(|c| quote(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}
