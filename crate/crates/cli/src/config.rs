//! Flat key = value scenario configs with dotted sections, e.g.
//!
//! ```text
//! name = lz_linear
//! system.n = 2
//! system.couplings = 0.2
//! profile.kind = linear
//! profile.alpha = 0.05
//! grid.t0 = -400
//! grid.t1 = 400
//! grid.steps = 400000
//! integrator.method = midpoint-exp
//! outputs = trajectory
//! ```
//!
//! Multi-scenario files for `scan` prefix every key with `scenario.<name>.`;
//! scenario order is first-appearance order.

use std::collections::BTreeMap;

use num_complex::Complex64;

use lzsweep::dynamics::{Method, StateVector};
use lzsweep::model::{Hermiticity, LevelSystem, Scaling};
use lzsweep::numerics::TimeGrid;
use lzsweep::sweep::SweepProfile;
use lzsweep::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Trajectory,
    Adiabatic,
    Figure1a,
    Figure1b,
    Triangular,
    Ms,
}

#[derive(Debug, Clone)]
pub struct FigureParams {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub points: usize,
    pub omegas: Vec<f64>,
    pub amplitude: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub system: LevelSystem,
    pub profile: SweepProfile,
    pub grid: TimeGrid,
    pub method: Method,
    pub drift_tol: f64,
    pub initial: StateVector,
    pub outputs: Vec<OutputKind>,
    pub figure: FigureParams,
}

/// Parses key = value lines; '#' starts a comment; blank lines ignored.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::input(format!("line {}: expected key = value", lineno + 1)))?;
        out.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::input(format!("{key}: \"{s}\" is not a number")))
}

fn parse_f64_list(key: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| parse_f64(key, x.trim()))
        .collect()
}

struct KeyMap {
    map: BTreeMap<String, String>,
}

impl KeyMap {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::input(format!("missing required key {key}")))
    }
}

impl ScenarioConfig {
    pub fn from_pairs(pairs: &[(String, String)], default_name: &str) -> Result<Self> {
        let known_prefixes = [
            "name",
            "system.",
            "profile.",
            "grid.",
            "integrator.",
            "initial.",
            "outputs",
            "figure.",
            "ms.",
        ];
        for (k, _) in pairs {
            if !known_prefixes.iter().any(|p| k == p.trim_end_matches('.') || k.starts_with(p)) {
                return Err(Error::input(format!("unknown config key {k}")));
            }
        }
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            if map.insert(k.clone(), v.clone()).is_some() {
                return Err(Error::input(format!("duplicate config key {k}")));
            }
        }
        let keys = KeyMap { map };

        let name = keys.get("name").unwrap_or(default_name).to_string();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::input(format!(
                "scenario name \"{name}\" must be nonempty [A-Za-z0-9_-]"
            )));
        }

        // system
        let n: i64 = keys
            .require("system.n")?
            .parse()
            .map_err(|_| Error::input("system.n must be an integer"))?;
        if n < 1 {
            return Err(Error::input("system.n must be >= 1"));
        }
        let n = n as usize;
        let offsets = match keys.get("system.offsets") {
            Some(s) => parse_f64_list("system.offsets", s)?,
            None => vec![0.0; n],
        };
        let signs = match keys.get("system.signs") {
            Some(s) => parse_f64_list("system.signs", s)?,
            None => (0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        };
        let couplings = match keys.get("system.couplings") {
            Some(s) => parse_f64_list("system.couplings", s)?,
            None if n == 1 => vec![],
            None => return Err(Error::input("missing required key system.couplings")),
        };
        let hermiticity = match keys.get("system.hermiticity").unwrap_or("hermitian") {
            "hermitian" => Hermiticity::Hermitian,
            "paper-literal" => Hermiticity::PaperLiteral,
            other => return Err(Error::input(format!("system.hermiticity: unknown mode {other}"))),
        };
        let scaling = match keys.get("system.scaling").unwrap_or("calibrated") {
            "calibrated" => Scaling::Calibrated,
            "literal" => Scaling::Literal,
            other => return Err(Error::input(format!("system.scaling: unknown mode {other}"))),
        };
        if offsets.len() != n {
            return Err(Error::input("system.offsets length must equal system.n"));
        }
        let system = LevelSystem::new(offsets, signs, couplings, hermiticity, scaling)?;

        // grid
        let t0 = parse_f64("grid.t0", keys.require("grid.t0")?)?;
        let t1 = parse_f64("grid.t1", keys.require("grid.t1")?)?;
        let steps: i64 = keys
            .require("grid.steps")?
            .parse()
            .map_err(|_| Error::input("grid.steps must be an integer"))?;
        if steps < 1 {
            return Err(Error::input("grid.steps must be >= 1"));
        }
        let grid = TimeGrid::new(t0, t1, steps as usize)?;

        // profile
        let profile = match keys.require("profile.kind")? {
            "linear" => SweepProfile::linear(parse_f64("profile.alpha", keys.require("profile.alpha")?)?)?,
            "sinusoidal" => SweepProfile::sinusoidal(
                parse_f64("profile.amplitude", keys.require("profile.amplitude")?)?,
                parse_f64("profile.omega", keys.require("profile.omega")?)?,
            )?,
            "tabulated" => {
                let samples = parse_f64_list("profile.samples", keys.require("profile.samples")?)?;
                SweepProfile::tabulated(grid, samples)?
            }
            other => return Err(Error::input(format!("profile.kind: unknown kind {other}"))),
        };

        // integrator
        let method = match keys.get("integrator.method").unwrap_or("rk4") {
            "rk4" => Method::Rk4,
            "midpoint-exp" => Method::MidpointExponential,
            other => return Err(Error::input(format!("integrator.method: unknown method {other}"))),
        };
        let drift_tol = match keys.get("integrator.drift_tolerance") {
            Some(s) => {
                let tol = parse_f64("integrator.drift_tolerance", s)?;
                if tol < 1e-10 {
                    return Err(Error::input("integrator.drift_tolerance is bounded below by 1e-10"));
                }
                tol
            }
            None => 1e-6,
        };

        // initial state: a 1-based level index or explicit amplitudes
        let initial = match (keys.get("initial.level"), keys.get("initial.amplitudes")) {
            (Some(_), Some(_)) => {
                return Err(Error::input("give initial.level or initial.amplitudes, not both"))
            }
            (Some(s), None) => {
                let level: usize = s
                    .parse()
                    .map_err(|_| Error::input("initial.level must be a positive integer"))?;
                if level < 1 || level > n {
                    return Err(Error::input(format!("initial.level {level} out of range 1..={n}")));
                }
                StateVector::basis(n, level - 1)?
            }
            (None, Some(s)) => {
                // semicolon-separated "re im" pairs
                let amps: Vec<Complex64> = s
                    .split(';')
                    .map(|pair| {
                        let mut it = pair.split_whitespace();
                        let re = it.next().unwrap_or("");
                        let im = it.next().unwrap_or("0");
                        Ok(Complex64::new(
                            parse_f64("initial.amplitudes", re)?,
                            parse_f64("initial.amplitudes", im)?,
                        ))
                    })
                    .collect::<Result<_>>()?;
                if amps.len() != n {
                    return Err(Error::input("initial.amplitudes length must equal system.n"));
                }
                StateVector::normalized(amps)?
            }
            (None, None) => StateVector::basis(n, 0)?,
        };

        // outputs
        let outputs: Vec<OutputKind> = keys
            .get("outputs")
            .unwrap_or("trajectory")
            .split(',')
            .map(|s| match s.trim() {
                "trajectory" => Ok(OutputKind::Trajectory),
                "adiabatic" => Ok(OutputKind::Adiabatic),
                "figure1a" => Ok(OutputKind::Figure1a),
                "figure1b" => Ok(OutputKind::Figure1b),
                "triangular" => Ok(OutputKind::Triangular),
                "ms" => Ok(OutputKind::Ms),
                other => Err(Error::input(format!("outputs: unknown kind {other}"))),
            })
            .collect::<Result<_>>()?;
        if outputs.is_empty() {
            return Err(Error::input("outputs must be nonempty"));
        }

        let figure = FigureParams {
            alpha_min: match keys.get("figure.alpha_min") {
                Some(s) => parse_f64("figure.alpha_min", s)?,
                None => 0.001,
            },
            alpha_max: match keys.get("figure.alpha_max") {
                Some(s) => parse_f64("figure.alpha_max", s)?,
                None => 10.0,
            },
            points: match keys.get("figure.points") {
                Some(s) => s
                    .parse()
                    .map_err(|_| Error::input("figure.points must be an integer"))?,
                None => 50,
            },
            omegas: match keys.get("figure.omegas") {
                Some(s) => parse_f64_list("figure.omegas", s)?,
                None => vec![1.0, 2.0],
            },
            amplitude: match keys.get("figure.amplitude") {
                Some(s) => parse_f64("figure.amplitude", s)?,
                None => 1.0,
            },
        };

        Ok(ScenarioConfig {
            name,
            system,
            profile,
            grid,
            method,
            drift_tol,
            initial,
            outputs,
            figure,
        })
    }

    pub fn parse_single(text: &str) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        if pairs.iter().any(|(k, _)| k.starts_with("scenario.")) {
            return Err(Error::input(
                "config contains scenario.* keys; use the scan command for multi-scenario files",
            ));
        }
        ScenarioConfig::from_pairs(&pairs, "run")
    }

    /// Splits a `scenario.<name>.*` file into per-scenario configs, in
    /// first-appearance order. A scenario that fails validation is returned
    /// as its error so the caller can record it and keep going; malformed
    /// top-level structure is an error for the whole file.
    pub fn parse_multi(text: &str) -> Result<Vec<(String, Result<Self>)>> {
        let pairs = parse_pairs(text)?;
        let mut order: Vec<String> = Vec::new();
        let mut grouped: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
        for (k, v) in &pairs {
            let rest = k
                .strip_prefix("scenario.")
                .ok_or_else(|| Error::input(format!("scan config keys must start with scenario.: {k}")))?;
            let (name, sub) = rest
                .split_once('.')
                .ok_or_else(|| Error::input(format!("scenario key {k} needs scenario.<name>.<key>")))?;
            if !grouped.contains_key(name) {
                order.push(name.to_string());
            }
            grouped
                .entry(name.to_string())
                .or_default()
                .push((sub.to_string(), v.clone()));
        }
        if order.is_empty() {
            return Err(Error::input("empty scenario list"));
        }
        Ok(order
            .into_iter()
            .map(|name| {
                let cfg = ScenarioConfig::from_pairs(&grouped[&name], &name);
                (name, cfg)
            })
            .collect())
    }
}
