//! Seeded property suite behind the validate command. Every property is
//! deterministic given the seed; the report is byte-stable across runs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use lzsweep::dynamics::{evolve, evolve_with_drift_tol, Method, StateVector};
use lzsweep::model::{Hermiticity, LevelSystem, Scaling, TridiagonalMatrix};
use lzsweep::morris_shore::{ms_transform, BlockHamiltonian};
use lzsweep::numerics::{eigh, CMatrix, HermitianMatrix, TimeGrid};
use lzsweep::sweep::SweepProfile;
use lzsweep::triangular::{cascade_discrepancy, triangularize, Recursion};
use lzsweep::Result;

pub struct PropertyReport {
    pub name: &'static str,
    pub pass: bool,
    pub measured: Value,
}

/// Diagonal of U from dense LU without pivoting, the reference the O(n)
/// recursion is checked against.
fn elimination_pivots(diag: &[f64], sup: &[f64], sub: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut a = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        a[i][i] = diag[i];
        if i + 1 < n {
            a[i][i + 1] = sup[i];
            a[i + 1][i] = sub[i];
        }
    }
    for k in 0..n {
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

fn factorization_property(rng: &mut ChaCha8Rng) -> Result<PropertyReport> {
    let mut max_recon = 0.0f64;
    let mut max_pivot_err = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(2..=10);
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..=5.0)).collect();
        let sup: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-0.5..=0.5)).collect();
        let (sub, herm) = if rng.gen_bool(0.5) {
            (sup.clone(), Hermiticity::Hermitian)
        } else {
            (sup.iter().map(|e| -e).collect(), Hermiticity::PaperLiteral)
        };
        let m = TridiagonalMatrix::new(diag.clone(), sup.clone(), sub.clone(), herm)?;
        let fac = triangularize(&m, Recursion::Corrected)?;

        let recon = fac.reconstruct();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j {
                    diag[i]
                } else if j == i + 1 {
                    sup[i]
                } else if i == j + 1 {
                    sub[j]
                } else {
                    0.0
                };
                max_recon = max_recon.max((recon[i][j] - want).abs());
            }
        }
        let oracle = elimination_pivots(&diag, &sup, &sub);
        for (h, o) in fac.h.iter().zip(&oracle) {
            max_pivot_err = max_pivot_err.max((h - o).abs());
        }
    }
    Ok(PropertyReport {
        name: "factorization_reconstruction",
        pass: max_recon <= 1e-12 && max_pivot_err <= 1e-13,
        measured: json!({
            "max_reconstruction_error": max_recon,
            "max_pivot_error": max_pivot_err,
        }),
    })
}

/// Six calibrated two-level sweeps against the closed form, plus the norm
/// drift of each run.
fn lz_agreement_property() -> Result<(PropertyReport, f64)> {
    let mut max_err = 0.0f64;
    let mut max_drift = 0.0f64;
    let grid = TimeGrid::new(-400.0, 400.0, 400_000)?;
    for &eps in &[0.1, 0.2] {
        for &alpha in &[0.02, 0.05, 0.1] {
            let sys = LevelSystem::two_level_crossing(eps, Hermiticity::Hermitian, Scaling::Calibrated)?;
            let p = SweepProfile::linear(alpha)?;
            let psi0 = StateVector::basis(2, 0)?;
            let traj = evolve(&sys, &p, &psi0, &grid, Method::MidpointExponential)?;
            let survival = traj.final_state()[0].norm_sqr();
            let closed = (-std::f64::consts::PI * eps * eps / (2.0 * alpha)).exp();
            max_err = max_err.max((survival - closed).abs());
            max_drift = max_drift.max(traj.max_norm_drift());
        }
    }
    Ok((
        PropertyReport {
            name: "lz_formula_agreement",
            pass: max_err <= 0.01,
            measured: json!({ "max_abs_error": max_err }),
        },
        max_drift,
    ))
}

fn unitarity_property(lz_drift: f64) -> Result<PropertyReport> {
    // an extra sweep shape beyond the linear runs
    let sys = LevelSystem::alternating(3, vec![0.3, 0.2], Hermiticity::Hermitian, Scaling::Calibrated)?;
    let p = SweepProfile::sinusoidal(1.0, 1.0)?;
    let grid = TimeGrid::new(0.0, 10.0, 40_000)?;
    let psi0 = StateVector::basis(3, 0)?;
    let traj = evolve_with_drift_tol(&sys, &p, &psi0, &grid, Method::MidpointExponential, 1e-6)?;
    let max_drift = lz_drift.max(traj.max_norm_drift());
    Ok(PropertyReport {
        name: "unitarity",
        pass: max_drift <= 1e-8,
        measured: json!({ "max_norm_drift": max_drift }),
    })
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

fn ms_property(rng: &mut ChaCha8Rng) -> Result<PropertyReport> {
    let mut max_unitarity = 0.0f64;
    let mut max_offdiag = 0.0f64;
    let mut max_sv_err = 0.0f64;
    let mut max_spectrum = 0.0f64;
    for _ in 0..50 {
        let n_a = rng.gen_range(1..=5);
        let n_b = rng.gen_range(1..=4);
        let mut v = CMatrix::zeros(n_a, n_b);
        for i in 0..n_a {
            for j in 0..n_b {
                v[(i, j)] = random_unit(rng);
            }
        }
        let d: Vec<f64> = (0..n_b).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        let block = BlockHamiltonian::new(v.clone(), d)?;
        let res = ms_transform(&block)?;

        let s = res.s();
        let n = n_a + n_b;
        max_unitarity = max_unitarity.max(s.dagger().matmul(&s).sub(&CMatrix::identity(n)).max_abs());

        for i in 0..n_a {
            for j in 0..n_b {
                if i != j {
                    max_offdiag = max_offdiag.max(res.v_bar[(i, j)].norm());
                }
            }
        }

        // reference singular values from the Gram matrix spectrum
        let gram = HermitianMatrix::new(v.dagger().matmul(&v))?;
        let (gvals, _) = eigh(&gram)?;
        let mut svs: Vec<f64> = gvals.iter().map(|x| x.max(0.0).sqrt()).collect();
        svs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        svs.truncate(n_a.min(n_b));
        for (k, sv) in svs.iter().enumerate() {
            max_sv_err = max_sv_err.max((res.singular_values[k] - sv).abs());
            if k < n_a && k < n_b {
                max_sv_err = max_sv_err.max((res.v_bar[(k, k)] - sv).norm());
            }
        }

        let h0 = symmetrize(&block.assemble());
        let (e0, _) = eigh(&HermitianMatrix::new(h0)?)?;
        let (e1, _) = eigh(&HermitianMatrix::new(symmetrize(&res.h_transformed))?)?;
        for (a, b) in e0.iter().zip(&e1) {
            max_spectrum = max_spectrum.max((a - b).abs());
        }
    }
    Ok(PropertyReport {
        name: "morris_shore",
        pass: max_unitarity <= 1e-10
            && max_offdiag <= 1e-10
            && max_sv_err <= 1e-10
            && max_spectrum <= 1e-9,
        measured: json!({
            "max_unitarity_defect": max_unitarity,
            "max_offdiagonal": max_offdiag,
            "max_singular_value_error": max_sv_err,
            "max_spectrum_error": max_spectrum,
        }),
    })
}

/// Clears roundoff-level Hermiticity violations before the strict constructor.
fn symmetrize(m: &CMatrix) -> CMatrix {
    let n = m.rows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)].conj());
        }
    }
    out
}

fn cascade_property() -> Result<PropertyReport> {
    let offset_system = |eps: f64| {
        LevelSystem::new(
            vec![1.0, 3.0],
            vec![1.0, -1.0],
            vec![eps],
            Hermiticity::Hermitian,
            Scaling::Calibrated,
        )
    };
    let psi0 = StateVector::normalized(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])?;

    // uncoupled, linear diagonal: trapezoid phases are exact
    let p_lin = SweepProfile::linear(0.2)?;
    let grid_lin = TimeGrid::new(-5.0, 5.0, 20_000)?;
    let d0 = cascade_discrepancy(&offset_system(0.0)?, &p_lin, &psi0, &grid_lin)?;

    let p_sin = SweepProfile::sinusoidal(1.0, 1.0)?;
    let grid_sin = TimeGrid::new(0.0, 10.0, 10_000)?;
    let d1 = cascade_discrepancy(&offset_system(1e-3)?, &p_sin, &psi0, &grid_sin)?;
    let d2 = cascade_discrepancy(&offset_system(2e-3)?, &p_sin, &psi0, &grid_sin)?;
    let ratio = d2 / d1;

    Ok(PropertyReport {
        name: "cascade_scaling",
        pass: d0 <= 1e-10 && d1 <= 5e-2 && (1.4..=2.6).contains(&ratio),
        measured: json!({
            "uncoupled_discrepancy": d0,
            "discrepancy_eps_1e-3": d1,
            "doubling_ratio": ratio,
        }),
    })
}

/// Runs the suite; the report is serialized by the caller.
pub fn run_suite(seed: u64) -> Result<(Value, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();

    reports.push(factorization_property(&mut rng)?);
    let (lz, lz_drift) = lz_agreement_property()?;
    reports.push(lz);
    reports.push(unitarity_property(lz_drift)?);
    reports.push(ms_property(&mut rng)?);
    reports.push(cascade_property()?);

    let all_pass = reports.iter().all(|r| r.pass);
    let props: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "pass": r.pass,
                "measured": r.measured,
            })
        })
        .collect();
    let report = json!({
        "seed": seed,
        "properties": props,
        "all_pass": all_pass,
    });
    Ok((report, all_pass))
}
