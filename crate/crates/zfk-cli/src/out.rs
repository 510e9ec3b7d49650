//! Deterministic CSV output: comma-separated, LF line endings, UTF-8,
//! shortest round-trip float formatting (Rust's `Display` for `f64`).

use anyhow::{Context, Result};
use std::io::Write;
use std::path::Path;

/// Shortest round-trip rendering; scientific notation outside a moderate
/// range so exponentially small series terms stay readable.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && !(1e-5..1e17).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut buf = Vec::with_capacity(64 * (rows.len() + 1));
    buf.extend_from_slice(header.join(",").as_bytes());
    buf.push(b'\n');
    for row in rows {
        buf.extend_from_slice(row.join(",").as_bytes());
        buf.push(b'\n');
    }
    let mut file =
        std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    file.write_all(&buf)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Error text safe for an unquoted CSV cell.
pub fn csv_safe(text: &str) -> String {
    text.replace([',', '\n', '\r'], ";")
}
