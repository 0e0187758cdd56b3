//! Plain-text complex matrix format: first line "rows cols", then one line
//! per row of whitespace-separated "re,im" pairs.

use num_complex::Complex64;

use lzsweep::numerics::CMatrix;
use lzsweep::Error;

use crate::format::fmt_num;

pub fn parse_matrix(text: &str) -> Result<CMatrix, Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::input("empty matrix file"))?;
    let mut dims = header.split_whitespace();
    let rows: usize = dims
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::input("matrix header must be \"rows cols\""))?;
    let cols: usize = dims
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::input("matrix header must be \"rows cols\""))?;
    if rows == 0 || cols == 0 {
        return Err(Error::input("matrix dimensions must be positive"));
    }

    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        let line = lines
            .next()
            .ok_or_else(|| Error::input(format!("matrix file ends before row {}", i + 1)))?;
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != cols {
            return Err(Error::input(format!(
                "row {} has {} entries, expected {cols}",
                i + 1,
                entries.len()
            )));
        }
        for (j, e) in entries.iter().enumerate() {
            let (re, im) = e
                .split_once(',')
                .ok_or_else(|| Error::input(format!("entry \"{e}\" is not \"re,im\"")))?;
            let re: f64 = re
                .parse()
                .map_err(|_| Error::input(format!("bad real part \"{re}\"")))?;
            let im: f64 = im
                .parse()
                .map_err(|_| Error::input(format!("bad imaginary part \"{im}\"")))?;
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

pub fn format_matrix(m: &CMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| format!("{},{}", fmt_num(m[(i, j)].re), fmt_num(m[(i, j)].im)))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
