//! The external sweep field γ(t), its instantaneous rate γ'(t), and
//! location of level-crossing times (zeros of γ).

use crate::numerics::TimeGrid;
use crate::{Error, Result};

/// Refinement tolerance on |γ| at a reported crossing.
const CROSSING_GAMMA_TOL: f64 = 1e-12;
/// Below this rate magnitude a zero of γ is flagged as tangential.
const TANGENTIAL_RATE_TOL: f64 = 1e-10;
/// Minimum separation between reported crossings.
const CROSSING_MIN_GAP: f64 = 1e-9;

/// Time profile of the sweep field.
#[derive(Debug, Clone)]
pub enum SweepProfile {
    /// γ(t) = α t
    Linear { alpha: f64 },
    /// γ(t) = A sin(ω t)
    Sinusoidal { amplitude: f64, omega: f64 },
    /// Samples on a uniform grid, linearly interpolated.
    Tabulated { grid: TimeGrid, samples: Vec<f64> },
}

impl SweepProfile {
    pub fn linear(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::input("linear sweep rate must be finite"));
        }
        Ok(SweepProfile::Linear { alpha })
    }

    pub fn sinusoidal(amplitude: f64, omega: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(Error::input("sinusoidal sweep requires amplitude A > 0"));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::input("sinusoidal sweep requires omega > 0"));
        }
        Ok(SweepProfile::Sinusoidal { amplitude, omega })
    }

    pub fn tabulated(grid: TimeGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::input(format!(
                "tabulated sweep needs {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::input("tabulated sweep samples must be finite"));
        }
        Ok(SweepProfile::Tabulated { grid, samples })
    }

    /// γ(t).
    pub fn gamma(&self, t: f64) -> Result<f64> {
        match self {
            SweepProfile::Linear { alpha } => Ok(alpha * t),
            SweepProfile::Sinusoidal { amplitude, omega } => Ok(amplitude * (omega * t).sin()),
            SweepProfile::Tabulated { grid, samples } => {
                let (k, frac) = locate(grid, t)?;
                Ok(samples[k] * (1.0 - frac) + samples[k + 1] * frac)
            }
        }
    }

    /// γ'(t). For tabulated profiles: central differences, one-sided at the
    /// endpoints.
    pub fn gamma_rate(&self, t: f64) -> Result<f64> {
        match self {
            SweepProfile::Linear { alpha } => Ok(*alpha),
            SweepProfile::Sinusoidal { amplitude, omega } => {
                Ok(amplitude * omega * (omega * t).cos())
            }
            SweepProfile::Tabulated { grid, samples } => {
                let (k, frac) = locate(grid, t)?;
                let dt = grid.dt();
                // nearest grid node
                let node = if frac < 0.5 { k } else { k + 1 };
                let n = samples.len();
                let rate = if node == 0 {
                    (samples[1] - samples[0]) / dt
                } else if node == n - 1 {
                    (samples[n - 1] - samples[n - 2]) / dt
                } else {
                    (samples[node + 1] - samples[node - 1]) / (2.0 * dt)
                };
                Ok(rate)
            }
        }
    }

    /// Characteristic angular frequency used to size the crossing scan grid.
    fn omega_char(&self, t0: f64, t1: f64) -> f64 {
        match self {
            SweepProfile::Linear { .. } => 1.0 / (t1 - t0),
            SweepProfile::Sinusoidal { omega, .. } => *omega,
            SweepProfile::Tabulated { grid, .. } => std::f64::consts::PI / grid.dt(),
        }
    }
}

fn locate(grid: &TimeGrid, t: f64) -> Result<(usize, f64)> {
    if t < grid.t0() - 1e-12 || t > grid.t1() + 1e-12 {
        return Err(Error::input(format!(
            "time {t} outside tabulated range [{}, {}]",
            grid.t0(),
            grid.t1()
        )));
    }
    let dt = grid.dt();
    let x = ((t - grid.t0()) / dt).clamp(0.0, grid.steps() as f64);
    let mut k = x.floor() as usize;
    if k >= grid.steps() {
        k = grid.steps() - 1;
    }
    Ok((k, (x - k as f64).clamp(0.0, 1.0)))
}

/// A zero of γ located by [`find_crossings`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub time: f64,
    /// True when |γ'| < 1e-10 at the zero; rate-based LZ formulas reject these.
    pub tangential: bool,
}

/// Locates the zeros of γ on [t0, t1], ascending.
///
/// Sign changes on a scan grid are refined by bisection to |γ| <= 1e-12.
/// A profile that vanishes identically on a subinterval (e.g. α = 0) is
/// reported as a degenerate-profile error.
pub fn find_crossings(p: &SweepProfile, t0: f64, t1: f64) -> Result<Vec<Crossing>> {
    if !(t0 < t1) {
        return Err(Error::input("find_crossings requires t0 < t1"));
    }
    if let SweepProfile::Linear { alpha } = p {
        if *alpha == 0.0 {
            return Err(Error::input(
                "degenerate profile: linear sweep with alpha = 0 is identically zero",
            ));
        }
        let mut out = Vec::new();
        if t0 <= 0.0 && 0.0 <= t1 {
            out.push(Crossing { time: 0.0, tangential: false });
        }
        return Ok(out);
    }

    let omega_char = p.omega_char(t0, t1);
    let n_scan = 10 * ((t1 - t0) * omega_char / std::f64::consts::PI).ceil().max(1.0) as usize;
    let dt = (t1 - t0) / n_scan as f64;

    let scale = match p {
        SweepProfile::Sinusoidal { amplitude, .. } => *amplitude,
        SweepProfile::Tabulated { samples, .. } => {
            samples.iter().fold(0.0f64, |m, s| m.max(s.abs())).max(1e-300)
        }
        SweepProfile::Linear { .. } => unreachable!(),
    };
    let zero_tol = 1e-14 * scale;

    let samples: Vec<(f64, f64)> = (0..=n_scan)
        .map(|k| {
            let t = if k == n_scan { t1 } else { t0 + k as f64 * dt };
            p.gamma(t).map(|g| (t, g))
        })
        .collect::<Result<_>>()?;

    // An interval where both endpoints are numerically zero means the
    // profile is degenerate there.
    for w in samples.windows(2) {
        if w[0].1.abs() <= zero_tol && w[1].1.abs() <= zero_tol {
            return Err(Error::input(format!(
                "degenerate profile: gamma vanishes identically near [{}, {}]",
                w[0].0, w[1].0
            )));
        }
    }

    let mut times = Vec::new();
    for (k, w) in samples.windows(2).enumerate() {
        let (ta, ga) = w[0];
        let (tb, gb) = w[1];
        if ga.abs() <= zero_tol {
            times.push(ta);
            continue;
        }
        if gb.abs() <= zero_tol {
            if k == n_scan - 1 {
                times.push(tb);
            }
            continue;
        }
        if ga.signum() != gb.signum() {
            times.push(bisect(p, ta, tb, ga)?);
        }
    }

    let mut out: Vec<Crossing> = Vec::new();
    for t in times {
        if let Some(last) = out.last() {
            if t - last.time <= CROSSING_MIN_GAP {
                continue;
            }
        }
        let rate = p.gamma_rate(t)?;
        out.push(Crossing {
            time: t,
            tangential: rate.abs() < TANGENTIAL_RATE_TOL,
        });
    }
    Ok(out)
}

fn bisect(p: &SweepProfile, mut a: f64, mut b: f64, ga: f64) -> Result<f64> {
    let mut sign_a = ga.signum();
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let gm = p.gamma(mid)?;
        if gm.abs() <= CROSSING_GAMMA_TOL || (b - a) < f64::EPSILON * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        if gm.signum() == sign_a {
            a = mid;
            sign_a = gm.signum();
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
