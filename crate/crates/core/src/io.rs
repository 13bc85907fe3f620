//! Columnar CSV emission for fields and curves, with JSON chart headers.
//!
//! CSV uses '.' decimal separator, UTF-8, and a header row; floats are
//! written with Rust's shortest round-trip formatting, so identical inputs
//! produce byte-identical output.

use std::fmt::Write as _;

use crate::error::Result;
use crate::field::ScalarField;
use crate::metric::MetricField;

/// Chart descriptor as a JSON string.
pub fn chart_header_json(chart: &crate::chart::GridChart) -> Result<String> {
    Ok(serde_json::to_string_pretty(chart.axes())?)
}

/// Point coordinates plus upper-triangular metric entries, one row per grid
/// point.
pub fn metric_csv(g: &MetricField) -> String {
    let n = g.dim();
    let chart = g.chart();
    let mut out = String::new();
    for i in 0..n {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "x{i}");
    }
    for i in 0..n {
        for j in i..n {
            let _ = write!(out, ",g{i}{j}");
        }
    }
    out.push('\n');
    let mut p = vec![0.0; n];
    let mut buf = vec![0.0; n * n];
    for flat in 0..chart.len() {
        chart.point(flat, &mut p);
        g.at_index(flat, &mut buf);
        for (i, x) in p.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{x}");
        }
        for i in 0..n {
            for j in i..n {
                let _ = write!(out, ",{}", buf[i * n + j]);
            }
        }
        out.push('\n');
    }
    out
}

/// Coordinates plus a single sampled value per row.
pub fn scalar_csv(f: &ScalarField, value_name: &str) -> String {
    let chart = f.chart();
    let n = chart.dim();
    let mut out = String::new();
    for i in 0..n {
        let _ = write!(out, "x{i},");
    }
    out.push_str(value_name);
    out.push('\n');
    let mut p = vec![0.0; n];
    for flat in 0..chart.len() {
        chart.point(flat, &mut p);
        for x in p.iter() {
            let _ = write!(out, "{x},");
        }
        let _ = writeln!(out, "{}", f.value(flat));
    }
    out
}

/// Column-oriented CSV from named columns of equal length.
pub fn columns_csv(columns: &[(&str, &[f64])]) -> String {
    let mut out = String::new();
    for (i, (name, _)) in columns.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(name);
    }
    out.push('\n');
    let rows = columns.first().map(|(_, c)| c.len()).unwrap_or(0);
    for r in 0..rows {
        for (i, (_, c)) in columns.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", c[r]);
        }
        out.push('\n');
    }
    out
}

/// FNV-1a content hash used in run manifests.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn metric_csv_round_trips_header() {
        let g = models::flat_torus(&[1.0, 2.0], &[4, 4]).unwrap();
        let csv = metric_csv(&g);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x0,x1,g00,g01,g11");
        assert_eq!(csv.lines().count(), 1 + 16);
        assert!(chart_header_json(g.chart()).unwrap().contains("periodic"));
    }

    #[test]
    fn fnv_is_stable() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), fnv1a64(b"a"));
        assert_ne!(fnv1a64(b"a"), fnv1a64(b"b"));
    }
}
