//! Runs one scenario and renders its output files in memory; callers decide
//! where and how to write them.

use serde_json::{json, Map, Value};

use lzsweep::analytic::{figure1a_data, figure1b_data};
use lzsweep::dynamics::{adiabatic_populations, evolve_with_drift_tol, StateTrajectory};
use lzsweep::model::hamiltonian_at;
use lzsweep::morris_shore::{ms_transform, BlockHamiltonian};
use lzsweep::numerics::CMatrix;
use lzsweep::triangular::{triangularize, Recursion};
use lzsweep::{Error, Result};

use crate::config::{OutputKind, ScenarioConfig};
use crate::format::csv_row;
use crate::matrixio::format_matrix;

pub struct RunOutput {
    /// (file name, contents), in a fixed order.
    pub files: Vec<(String, String)>,
    pub final_populations: Option<Vec<f64>>,
    pub max_norm_drift: Option<f64>,
}

fn trajectory_csv(traj: &StateTrajectory) -> String {
    let n = traj.n();
    let mut header = vec!["t".to_string(), "norm".to_string()];
    for k in 1..=n {
        header.push(format!("pop_{k}"));
    }
    for k in 1..=n {
        header.push(format!("re_psi_{k}"));
        header.push(format!("im_psi_{k}"));
    }
    let mut out = header.join(",");
    out.push('\n');
    for (k, t) in traj.grid().points().enumerate() {
        let state = traj.state(k);
        let mut cells = vec![Some(t), Some(traj.norm(k))];
        cells.extend(state.iter().map(|a| Some(a.norm_sqr())));
        for a in state {
            cells.push(Some(a.re));
            cells.push(Some(a.im));
        }
        out.push_str(&csv_row(&cells));
        out.push('\n');
    }
    out
}

fn adiabatic_csv(cfg: &ScenarioConfig, traj: &StateTrajectory) -> Result<String> {
    let dec = adiabatic_populations(&cfg.system, &cfg.profile, traj)?;
    let n = cfg.system.n();
    let mut header = vec!["t".to_string()];
    for k in 1..=n {
        header.push(format!("energy_{k}"));
    }
    for k in 1..=n {
        header.push(format!("apop_{k}"));
    }
    for k in 1..=n {
        header.push(format!("phase_{k}"));
    }
    let mut out = header.join(",");
    out.push('\n');
    for (k, t) in traj.grid().points().enumerate() {
        let mut cells = vec![Some(t)];
        cells.extend(dec.energies[k].iter().map(|&x| Some(x)));
        cells.extend(dec.populations[k].iter().map(|&x| Some(x)));
        cells.extend(dec.phases[k].iter().map(|&x| Some(x)));
        out.push_str(&csv_row(&cells));
        out.push('\n');
    }
    Ok(out)
}

fn triangular_csv(cfg: &ScenarioConfig) -> Result<String> {
    let n = cfg.system.n();
    let mut header = vec!["t".to_string()];
    for k in 1..=n {
        header.push(format!("h_{k}"));
    }
    let mut out = header.join(",");
    out.push('\n');
    for t in cfg.grid.points() {
        let snap = hamiltonian_at(&cfg.system, &cfg.profile, t)?;
        let fac = triangularize(&snap, Recursion::Corrected)?;
        let mut cells = vec![Some(t)];
        cells.extend(fac.h.iter().map(|&x| Some(x)));
        out.push_str(&csv_row(&cells));
        out.push('\n');
    }
    Ok(out)
}

fn figure1a_csv(cfg: &ScenarioConfig) -> Result<String> {
    let eps = cfg
        .system
        .couplings()
        .first()
        .copied()
        .ok_or_else(|| Error::input("figure1a output needs at least one coupling"))?;
    let rows = figure1a_data(eps, cfg.figure.alpha_min, cfg.figure.alpha_max, cfg.figure.points)?;
    let mut out = String::from("alpha,P\n");
    for (alpha, p) in rows {
        out.push_str(&csv_row(&[Some(alpha), Some(p)]));
        out.push('\n');
    }
    Ok(out)
}

pub fn figure1b_csv_from_table(table: &lzsweep::analytic::Fig1bTable) -> String {
    let mut header = vec!["t".to_string()];
    for k in 1..=table.omegas.len() {
        header.push(format!("P_omega{k}"));
    }
    let mut out = header.join(",");
    out.push('\n');
    for (row, &t) in table.times.iter().enumerate() {
        let mut cells = vec![Some(t)];
        cells.extend(table.columns.iter().map(|col| col[row]));
        out.push_str(&csv_row(&cells));
        out.push('\n');
    }
    out
}

fn figure1b_csv(cfg: &ScenarioConfig) -> Result<String> {
    let eps = cfg
        .system
        .couplings()
        .first()
        .copied()
        .ok_or_else(|| Error::input("figure1b output needs at least one coupling"))?;
    let table = figure1b_data(eps, cfg.figure.amplitude, &cfg.figure.omegas, &cfg.grid)?;
    Ok(figure1b_csv_from_table(&table))
}

/// Bipartite split of the tridiagonal snapshot at t0: even levels form the
/// upper manifold, odd levels the lower. Valid only when the even-level
/// diagonal entries coincide; that common value is subtracted globally so the
/// upper block is identically zero.
fn ms_files(cfg: &ScenarioConfig) -> Result<Vec<(String, String)>> {
    let snap = hamiltonian_at(&cfg.system, &cfg.profile, cfg.grid.t0())?;
    let n = snap.n();
    if n < 2 {
        return Err(Error::input("ms output needs at least two levels"));
    }
    let evens: Vec<usize> = (0..n).step_by(2).collect();
    let odds: Vec<usize> = (1..n).step_by(2).collect();
    let shift = snap.diag[0];
    for &i in &evens {
        if (snap.diag[i] - shift).abs() > 1e-10 {
            return Err(Error::input(
                "ms output needs a degenerate upper manifold: even-level diagonal entries must coincide at t0",
            ));
        }
    }
    let mut v = CMatrix::zeros(evens.len(), odds.len());
    for (a, &i) in evens.iter().enumerate() {
        for (b, &j) in odds.iter().enumerate() {
            // tridiagonal chain: level i couples only to i +/- 1
            if j == i + 1 {
                v[(a, b)] = snap.sup[i].into();
            } else if i == j + 1 {
                v[(a, b)] = snap.sub[j].into();
            }
        }
    }
    let d: Vec<f64> = odds.iter().map(|&j| snap.diag[j] - shift).collect();
    let block = BlockHamiltonian::new(v, d)?;
    let result = ms_transform(&block)?;

    let name = &cfg.name;
    let summary = json!({
        "n_a": evens.len(),
        "n_b": odds.len(),
        "diagonal_shift": shift,
        "singular_values": result.singular_values,
        "rank": result.rank(),
    });
    Ok(vec![
        (format!("{name}_ms_A.txt"), format_matrix(&result.a)),
        (format!("{name}_ms_B.txt"), format_matrix(&result.b)),
        (format!("{name}_ms_Vbar.txt"), format_matrix(&result.v_bar)),
        (
            format!("{name}_ms.json"),
            serde_json::to_string_pretty(&summary).expect("json") + "\n",
        ),
    ])
}

/// Renders a scenario's outputs. With `force_trajectory` the trajectory CSV
/// is produced even when the outputs list omits it (the evolve command always
/// writes one).
pub fn run_scenario(cfg: &ScenarioConfig, force_trajectory: bool) -> Result<RunOutput> {
    let needs_traj = force_trajectory
        || cfg
            .outputs
            .iter()
            .any(|o| matches!(o, OutputKind::Trajectory | OutputKind::Adiabatic));
    let traj = if needs_traj {
        Some(evolve_with_drift_tol(
            &cfg.system,
            &cfg.profile,
            &cfg.initial,
            &cfg.grid,
            cfg.method,
            cfg.drift_tol,
        )?)
    } else {
        None
    };

    let mut files = Vec::new();
    let name = &cfg.name;
    if force_trajectory && !cfg.outputs.contains(&OutputKind::Trajectory) {
        let traj = traj.as_ref().expect("trajectory");
        files.push((format!("{name}_trajectory.csv"), trajectory_csv(traj)));
    }
    for out in &cfg.outputs {
        match out {
            OutputKind::Trajectory => {
                let traj = traj.as_ref().expect("trajectory");
                files.push((format!("{name}_trajectory.csv"), trajectory_csv(traj)));
            }
            OutputKind::Adiabatic => {
                let traj = traj.as_ref().expect("trajectory");
                files.push((format!("{name}_adiabatic.csv"), adiabatic_csv(cfg, traj)?));
            }
            OutputKind::Triangular => {
                files.push((format!("{name}_triangular.csv"), triangular_csv(cfg)?));
            }
            OutputKind::Figure1a => {
                files.push((format!("{name}_figure1a.csv"), figure1a_csv(cfg)?));
            }
            OutputKind::Figure1b => {
                files.push((format!("{name}_figure1b.csv"), figure1b_csv(cfg)?));
            }
            OutputKind::Ms => {
                files.extend(ms_files(cfg)?);
            }
        }
    }

    let (final_populations, max_norm_drift) = match &traj {
        Some(t) => (
            Some(t.populations_at(t.grid().len() - 1)),
            Some(t.max_norm_drift()),
        ),
        None => (None, None),
    };
    Ok(RunOutput {
        files,
        final_populations,
        max_norm_drift,
    })
}

/// Run summary for the evolve command; key order is fixed.
pub fn summary_json(
    cfg_pairs: &[(String, String)],
    run: &RunOutput,
    wall_seconds: f64,
) -> String {
    let mut config = Map::new();
    for (k, v) in cfg_pairs {
        config.insert(k.clone(), Value::String(v.clone()));
    }
    let summary = json!({
        "config": Value::Object(config),
        "final_populations": run.final_populations,
        "max_norm_drift": run.max_norm_drift,
        "wall_seconds": wall_seconds,
    });
    serde_json::to_string_pretty(&summary).expect("json") + "\n"
}
