//! Versioned CSV tables used for plot data.

use crate::error::Result;

pub const TABLE_VERSION: u32 = 1;

/// Shortest round-trip form, switching to exponent notation outside
/// `[1e-4, 1e7)` so cells stay short.
pub fn fmt_f64(v: f64) -> String {
    let m = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e7).contains(&m) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// A CSV table preceded by a `# spectralstrip <kind> v1` line.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    kind: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(kind: &str, header: &[&str]) -> Self {
        Table { kind: kind.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_f64(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
            .expect("csv output is utf-8");
        Ok(format!("# spectralstrip {} v{TABLE_VERSION}\n{body}", self.kind))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.0, 1.5, -2.25e-21, 3e12, 0.4537531658603282, 1e-4, -7.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(1.2e-21), "1.2e-21");
    }
}
