//! Closed-form transition probabilities: the classical linear-sweep survival
//! exp(-π ε²/2α) and its sinusoidal-sweep counterpart driven by the
//! instantaneous rate A ω cos(ω t), plus the table generators behind the
//! `classic` and `sine` CLI commands.

use crate::numerics::TimeGrid;
use crate::{Error, Result};

/// Below this rate magnitude the crossing-time denominator is singular.
const RATE_SINGULAR_TOL: f64 = 1e-9;

/// Reading of the sinusoidal formula.
///
/// `AbsRate` uses the magnitude of the instantaneous rate, keeping the
/// result a probability for all t. `LiteralCos` keeps the bare cos ω t
/// denominator, which exceeds 1 when cos < 0 and is only defined where
/// cos ω t > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SineMode {
    AbsRate,
    LiteralCos,
}

/// Survival probability for a linear sweep: exp(-π ε² / 2α).
pub fn lz_classic(eps: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::input("lz_classic requires alpha > 0 (degenerate sweep)"));
    }
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::input("lz_classic requires eps >= 0"));
    }
    Ok((-std::f64::consts::PI * eps * eps / (2.0 * alpha)).exp())
}

/// Survival probability for a sinusoidal sweep at time t:
/// exp(-π ε² / (2 A ω cos ω t)) in the chosen reading.
pub fn lz_sine(eps: f64, amplitude: f64, omega: f64, t: f64, mode: SineMode) -> Result<f64> {
    if !(amplitude > 0.0) || !(omega > 0.0) {
        return Err(Error::input("lz_sine requires A > 0 and omega > 0"));
    }
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::input("lz_sine requires eps >= 0"));
    }
    let cos = (omega * t).cos();
    match mode {
        SineMode::AbsRate => {
            if cos.abs() <= RATE_SINGULAR_TOL {
                return Err(Error::input(format!(
                    "crossing singularity: |cos ωt| = {:.3e} at t = {t}",
                    cos.abs()
                )));
            }
            Ok((-std::f64::consts::PI * eps * eps / (2.0 * amplitude * omega * cos.abs())).exp())
        }
        SineMode::LiteralCos => {
            if cos <= RATE_SINGULAR_TOL {
                return Err(Error::input(format!(
                    "domain error: cos ωt = {cos:.3e} <= 0 at t = {t} in the literal reading"
                )));
            }
            Ok((-std::f64::consts::PI * eps * eps / (2.0 * amplitude * omega * cos)).exp())
        }
    }
}

/// (α, P) table over logarithmically spaced rates.
pub fn figure1a_data(
    eps: f64,
    alpha_min: f64,
    alpha_max: f64,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(alpha_min > 0.0) || !(alpha_min < alpha_max) {
        return Err(Error::input("requires 0 < alpha_min < alpha_max"));
    }
    if points < 2 {
        return Err(Error::input("requires points >= 2"));
    }
    let log_min = alpha_min.ln();
    let log_max = alpha_max.ln();
    let mut out = Vec::with_capacity(points);
    for k in 0..points {
        let frac = k as f64 / (points - 1) as f64;
        let alpha = (log_min + frac * (log_max - log_min)).exp();
        out.push((alpha, lz_classic(eps, alpha)?));
    }
    Ok(out)
}

/// Per-omega columns of the sinusoidal formula in AbsRate mode; rows where a
/// column is singular carry `None` for that column only.
#[derive(Debug, Clone)]
pub struct Fig1bTable {
    pub times: Vec<f64>,
    pub omegas: Vec<f64>,
    /// columns[c][row]
    pub columns: Vec<Vec<Option<f64>>>,
}

pub fn figure1b_data(eps: f64, amplitude: f64, omegas: &[f64], grid: &TimeGrid) -> Result<Fig1bTable> {
    figure1b_data_mode(eps, amplitude, omegas, grid, SineMode::AbsRate)
}

pub fn figure1b_data_mode(
    eps: f64,
    amplitude: f64,
    omegas: &[f64],
    grid: &TimeGrid,
    mode: SineMode,
) -> Result<Fig1bTable> {
    if omegas.is_empty() {
        return Err(Error::input("omegas must be nonempty"));
    }
    if omegas.iter().any(|w| !(w > &0.0)) {
        return Err(Error::input("omegas must be positive"));
    }
    let times: Vec<f64> = grid.points().collect();
    let mut columns = Vec::with_capacity(omegas.len());
    for &w in omegas {
        let col = times
            .iter()
            .map(|&t| lz_sine(eps, amplitude, w, t, mode).ok())
            .collect();
        columns.push(col);
    }
    Ok(Fig1bTable {
        times,
        omegas: omegas.to_vec(),
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn classic_no_coupling() {
        assert_eq!(lz_classic(0.0, 0.3).unwrap(), 1.0);
    }

    #[test]
    fn classic_reference_value() {
        // eps = 0.1, alpha = 0.01 -> exp(-π/2)
        let p = lz_classic(0.1, 0.01).unwrap();
        assert!((p - (-PI / 2.0).exp()).abs() < 1e-15);
        assert!((p - 0.207880).abs() < 1e-6);
    }

    #[test]
    fn classic_sudden_limit() {
        let p = lz_classic(1.0, 1e6).unwrap();
        assert!((p - 1.0).abs() < 1e-5);
    }

    #[test]
    fn classic_rejects_degenerate() {
        assert!(lz_classic(0.1, 0.0).is_err());
        assert!(lz_classic(0.1, -1.0).is_err());
    }

    #[test]
    fn sine_reference_values() {
        let p = lz_sine(0.1, 1.0, 1.0, 0.0, SineMode::AbsRate).unwrap();
        assert!((p - (-0.005 * PI).exp()).abs() < 1e-15);
        assert!((p - 0.984414763).abs() < 1e-8);
        let q = lz_sine(0.1, 1.0, 1.0, 0.0, SineMode::LiteralCos).unwrap();
        assert_eq!(p, q);
        let r = lz_sine(0.1, 1.0, 2.0, 0.0, SineMode::AbsRate).unwrap();
        assert!((r - (-0.0025 * PI).exp()).abs() < 1e-15);
    }

    #[test]
    fn sine_singular_at_quarter_period() {
        assert!(lz_sine(0.1, 1.0, 1.0, PI / 2.0, SineMode::AbsRate).is_err());
    }

    #[test]
    fn sine_literal_rejects_negative_cos() {
        assert!(lz_sine(0.1, 1.0, 1.0, 0.8 * PI, SineMode::LiteralCos).is_err());
        // AbsRate is defined there
        let p = lz_sine(0.1, 1.0, 1.0, 0.8 * PI, SineMode::AbsRate).unwrap();
        assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn sine_no_coupling() {
        assert_eq!(lz_sine(0.0, 2.0, 3.0, 0.1, SineMode::AbsRate).unwrap(), 1.0);
    }

    #[test]
    fn rate_matching_identity() {
        // whenever A ω |cos ωt| = alpha the two formulas agree exactly
        let (amp, omega, t) = (1.7f64, 0.9f64, 0.4f64);
        let alpha = amp * omega * (omega * t).cos().abs();
        let a = lz_classic(0.23, alpha).unwrap();
        let b = lz_sine(0.23, amp, omega, t, SineMode::AbsRate).unwrap();
        assert!((a - b).abs() <= 1e-15);
    }

    #[test]
    fn fig1a_reference_rows_and_monotonicity() {
        let rows = figure1a_data(0.1, 0.005, 0.05, 17).unwrap();
        assert!((rows[0].1 - (-PI).exp()).abs() < 1e-12);
        assert!((rows[16].1 - (-0.1 * PI).exp()).abs() < 1e-12);
        for w in rows.windows(2) {
            assert!(w[1].1 > w[0].1, "P must increase with alpha");
        }
    }

    #[test]
    fn fig1a_all_one_at_zero_coupling() {
        let rows = figure1a_data(0.0, 0.001, 1.0, 5).unwrap();
        assert!(rows.iter().all(|(_, p)| *p == 1.0));
    }

    #[test]
    fn fig1a_validation() {
        assert!(figure1a_data(0.1, 0.0, 1.0, 5).is_err());
        assert!(figure1a_data(0.1, 0.1, 0.01, 5).is_err());
        assert!(figure1a_data(0.1, 0.001, 1.0, 1).is_err());
    }

    #[test]
    fn fig1b_reference_row() {
        let grid = TimeGrid::new(0.0, 2.0 * PI, 628).unwrap();
        let table = figure1b_data(0.1, 1.0, &[1.0, 2.0], &grid).unwrap();
        let p1 = table.columns[0][0].unwrap();
        let p2 = table.columns[1][0].unwrap();
        assert!((p1 - 0.984414763).abs() < 1e-8);
        assert!((p2 - 0.992176780).abs() < 1e-8);
    }

    #[test]
    fn fig1b_crossing_peak_ordering() {
        // P peaks at the crossing-rate maxima t = kπ/ω with value
        // exp(-π ε²/(2Aω)); a bigger omega leaves the peak closer to 1
        let grid = TimeGrid::new(0.01, 2.0 * PI - 0.01, 5000).unwrap();
        let table = figure1b_data(0.1, 1.0, &[1.0, 2.0], &grid).unwrap();
        let max_of = |c: &Vec<Option<f64>>| {
            c.iter().flatten().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
        };
        let peak1 = max_of(&table.columns[0]);
        let peak2 = max_of(&table.columns[1]);
        assert!(1.0 - peak2 < 1.0 - peak1, "peak ordering violated");
        // exact closed forms at the crossing times themselves
        let at1 = lz_sine(0.1, 1.0, 1.0, PI, SineMode::AbsRate).unwrap();
        let at2 = lz_sine(0.1, 1.0, 2.0, PI, SineMode::AbsRate).unwrap();
        assert!((at1 - (-0.005 * PI).exp()).abs() < 1e-9);
        assert!((at2 - (-0.0025 * PI).exp()).abs() < 1e-9);
        // the dense-grid peaks approach those values from below
        assert!(peak1 <= at1 + 1e-12 && at1 - peak1 < 1e-6);
        assert!(peak2 <= at2 + 1e-12 && at2 - peak2 < 1e-6);
    }

    #[test]
    fn fig1b_rejects_empty_omegas() {
        let grid = TimeGrid::new(0.0, 1.0, 10).unwrap();
        assert!(figure1b_data(0.1, 1.0, &[], &grid).is_err());
    }

    #[test]
    fn formulas_decrease_in_eps() {
        let mut prev_c = 2.0;
        let mut prev_s = 2.0;
        for k in 1..=10 {
            let eps = 0.05 * k as f64;
            let c = lz_classic(eps, 0.1).unwrap();
            let s = lz_sine(eps, 1.0, 1.0, 0.3, SineMode::AbsRate).unwrap();
            assert!(c < prev_c);
            assert!(s < prev_s);
            prev_c = c;
            prev_s = s;
        }
    }
}
