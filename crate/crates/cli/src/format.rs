//! Deterministic output formatting: fixed-notation numbers with 12
//! significant digits, CSV assembly and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::Path;

/// Formats a finite number in fixed notation with 12 significant digits.
/// The output is byte-stable across platforms.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    // 340 decimals covers subnormals; never truncate below 12 significant digits
    let decimals = (11 - exp).clamp(0, 340) as usize;
    format!("{:.*}", decimals, x)
}

/// One CSV line; `None` cells stay empty.
pub fn csv_row(cells: &[Option<f64>]) -> String {
    cells
        .iter()
        .map(|c| c.map(fmt_num).unwrap_or_default())
        .collect::<Vec<_>>()
        .join(",")
}

/// Writes via a temp file in the same directory and renames into place.
pub fn atomic_write(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_file_name(format!(
        "{}.tmp",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("out")
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}
