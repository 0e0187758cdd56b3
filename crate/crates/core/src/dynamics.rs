//! Propagation of the n-dimensional Schrödinger equation i ∂_t ψ = H(t) ψ on
//! a uniform time grid, extraction of diabatic and adiabatic populations, and
//! the two-level survival probability used as the numerical oracle for the
//! closed-form transition formulas.

use num_complex::Complex64;

use crate::model::{hamiltonian_at, to_hermitian, Hermiticity, LevelSystem, Scaling};
use crate::numerics::{cumulative_trapezoid_real, eigh, unitary_step, CMatrix, TimeGrid};
use crate::sweep::SweepProfile;
use crate::{Error, Result};

/// Norm tolerance on state construction.
const STATE_NORM_TOL: f64 = 1e-12;
/// Hermitian-mode evolution is rejected when the norm drifts past this.
const DRIFT_ERROR_TOL: f64 = 1e-6;
/// Asymptotic-regime guard factor for [`lz_survival`] spans.
const SPAN_GUARD_FACTOR: f64 = 10.0;
/// Branch-matching ambiguity threshold in [`adiabatic_populations`].
const OVERLAP_AMBIGUITY_TOL: f64 = 1e-6;

/// Normalized complex state vector.
#[derive(Debug, Clone)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::input("state vector must have at least one level"));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::input(format!(
                "state vector norm² = {norm_sq} is not 1 within {STATE_NORM_TOL:e}"
            )));
        }
        Ok(StateVector { amps })
    }

    /// Unit amplitude in level `k` (zero based) of an n-level system.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::input(format!("level index {k} out of range for n = {n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::input("cannot normalize the zero vector"));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(StateVector { amps })
    }

    pub fn n(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }
}

/// Propagation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classical fixed-step Runge-Kutta 4, norm monitored.
    Rk4,
    /// U = exp(-i H(t + Δt/2) Δt) per step; exactly unitary up to roundoff.
    MidpointExponential,
}

/// Solution of a propagation run: raw amplitudes per grid point plus the
/// derived norms and per-level populations.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    grid: TimeGrid,
    states: Vec<Vec<Complex64>>,
}

impl StateTrajectory {
    pub fn from_states(grid: TimeGrid, states: Vec<Vec<Complex64>>) -> Result<Self> {
        if states.len() != grid.len() {
            return Err(Error::input("trajectory length does not match grid"));
        }
        Ok(StateTrajectory { grid, states })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.states[0].len()
    }

    pub fn states(&self) -> &[Vec<Complex64>] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &[Complex64] {
        &self.states[k]
    }

    pub fn final_state(&self) -> &[Complex64] {
        self.states.last().unwrap()
    }

    pub fn norm(&self, k: usize) -> f64 {
        self.states[k].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norms(&self) -> Vec<f64> {
        (0..self.states.len()).map(|k| self.norm(k)).collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norms()
            .iter()
            .map(|n| (n - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// |ψ_level(t_k)|² for all grid points.
    pub fn population(&self, level: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[level].norm_sqr()).collect()
    }

    /// Populations at grid point k, one entry per level.
    pub fn populations_at(&self, k: usize) -> Vec<f64> {
        self.states[k].iter().map(|a| a.norm_sqr()).collect()
    }
}

fn apply_tridiag_rhs(
    sys: &LevelSystem,
    p: &SweepProfile,
    t: f64,
    psi: &[Complex64],
) -> Result<Vec<Complex64>> {
    let h = hamiltonian_at(sys, p, t)?;
    let hpsi = h.mul_vec(psi);
    // dψ/dt = -i H ψ
    Ok(hpsi.into_iter().map(|z| z * Complex64::new(0.0, -1.0)).collect())
}

/// Integrates i ∂_t ψ = H(t) ψ over the grid.
///
/// In Hermitian mode the run fails if the norm drifts beyond 1e-6 (the grid
/// is then under-resolved); PaperLiteral evolution is permitted with RK4 and
/// its norms are reported, not asserted.
pub fn evolve(
    sys: &LevelSystem,
    p: &SweepProfile,
    psi0: &StateVector,
    grid: &TimeGrid,
    method: Method,
) -> Result<StateTrajectory> {
    evolve_with_drift_tol(sys, p, psi0, grid, method, DRIFT_ERROR_TOL)
}

/// [`evolve`] with an explicit norm-drift tolerance (>= 1e-10).
pub fn evolve_with_drift_tol(
    sys: &LevelSystem,
    p: &SweepProfile,
    psi0: &StateVector,
    grid: &TimeGrid,
    method: Method,
    drift_tol: f64,
) -> Result<StateTrajectory> {
    if drift_tol < 1e-10 {
        return Err(Error::input("drift tolerance is bounded below by 1e-10"));
    }
    if psi0.n() != sys.n() {
        return Err(Error::input(format!(
            "state dimension {} does not match system n = {}",
            psi0.n(),
            sys.n()
        )));
    }
    if method == Method::MidpointExponential && sys.hermiticity() != Hermiticity::Hermitian {
        return Err(Error::input(
            "MidpointExponential requires a Hermitian-mode system",
        ));
    }

    let dt = grid.dt();
    let mut states = Vec::with_capacity(grid.len());
    let mut psi: Vec<Complex64> = psi0.amplitudes().to_vec();
    states.push(psi.clone());

    match method {
        Method::Rk4 => {
            for k in 0..grid.steps() {
                let t = grid.point(k);
                let tm = t + 0.5 * dt;
                let k1 = apply_tridiag_rhs(sys, p, t, &psi)?;
                let y2: Vec<Complex64> = psi
                    .iter()
                    .zip(&k1)
                    .map(|(y, d)| y + d * (0.5 * dt))
                    .collect();
                let k2 = apply_tridiag_rhs(sys, p, tm, &y2)?;
                let y3: Vec<Complex64> = psi
                    .iter()
                    .zip(&k2)
                    .map(|(y, d)| y + d * (0.5 * dt))
                    .collect();
                let k3 = apply_tridiag_rhs(sys, p, tm, &y3)?;
                let y4: Vec<Complex64> = psi.iter().zip(&k3).map(|(y, d)| y + d * dt).collect();
                let k4 = apply_tridiag_rhs(sys, p, t + dt, &y4)?;
                for i in 0..psi.len() {
                    psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
                }
                states.push(psi.clone());
            }
        }
        Method::MidpointExponential => {
            for k in 0..grid.steps() {
                let tm = grid.point(k) + 0.5 * dt;
                let h = to_hermitian(&hamiltonian_at(sys, p, tm)?)?;
                let u = unitary_step(&h, dt)?;
                psi = u.mul_vec(&psi);
                states.push(psi.clone());
            }
        }
    }

    let traj = StateTrajectory::from_states(*grid, states)?;
    if sys.hermiticity() == Hermiticity::Hermitian {
        let drift = traj.max_norm_drift();
        if drift > drift_tol {
            return Err(Error::numerical(format!(
                "norm drift {drift:.3e} exceeds {drift_tol:e}; increase the step count"
            )));
        }
    }
    Ok(traj)
}

/// Adiabatic-basis decomposition of a trajectory: populations |c'_j(t)|² and
/// accumulated dynamical phases Φ_j(t) = ∫ ε_j(t') dt' per eigenbranch.
#[derive(Debug, Clone)]
pub struct AdiabaticDecomposition {
    /// populations[k][j] = |c'_j(t_k)|²
    pub populations: Vec<Vec<f64>>,
    /// phases[k][j] = Φ_j(t_k)
    pub phases: Vec<Vec<f64>>,
    /// energies[k][j] = ε_j(t_k), branch-continuous
    pub energies: Vec<Vec<f64>>,
}

/// Fixes the gauge of each eigenvector column: largest-magnitude component
/// made real positive.
fn gauge_fix(vecs: &mut CMatrix) {
    let n = vecs.rows();
    for j in 0..vecs.cols() {
        let mut best = 0;
        let mut best_mag = 0.0;
        for i in 0..n {
            let m = vecs[(i, j)].norm();
            if m > best_mag {
                best_mag = m;
                best = i;
            }
        }
        let pivot = vecs[(best, j)];
        if pivot.norm() > 0.0 {
            let phase = pivot / pivot.norm();
            for i in 0..n {
                vecs[(i, j)] /= phase;
            }
        }
    }
}

/// Decomposes a Hermitian-mode trajectory in the instantaneous eigenbasis.
///
/// Eigenbranch continuity between consecutive grid points is maintained by
/// maximal-overlap matching; an ambiguous match (two overlaps within 1e-6)
/// means a near-degenerate crossing is under-resolved and is an error.
pub fn adiabatic_populations(
    sys: &LevelSystem,
    p: &SweepProfile,
    traj: &StateTrajectory,
) -> Result<AdiabaticDecomposition> {
    if sys.hermiticity() != Hermiticity::Hermitian {
        return Err(Error::input(
            "adiabatic decomposition requires a Hermitian-mode system",
        ));
    }
    let grid = traj.grid();
    let n = sys.n();

    // Branch-continuous eigenpairs at every grid point.
    let mut branch_vals: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    let mut branch_vecs: Vec<CMatrix> = Vec::with_capacity(grid.len());

    for (k, t) in grid.points().enumerate() {
        let h = to_hermitian(&hamiltonian_at(sys, p, t)?)?;
        let (vals, mut vecs) = eigh(&h)?;
        gauge_fix(&mut vecs);

        if k == 0 {
            branch_vals.push(vals);
            branch_vecs.push(vecs);
            continue;
        }

        let prev = &branch_vecs[k - 1];
        // overlap[b][j] = |<new_j | prev_b>|
        let mut assignment = vec![usize::MAX; n];
        let mut taken = vec![false; n];
        for b in 0..n {
            let mut best_j = 0;
            let mut best = -1.0;
            let mut second = -1.0;
            for j in 0..n {
                let mut ov = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    ov += vecs[(i, j)].conj() * prev[(i, b)];
                }
                let mag = ov.norm();
                if mag > best {
                    second = best;
                    best = mag;
                    best_j = j;
                } else if mag > second {
                    second = mag;
                }
            }
            if (best - second).abs() < OVERLAP_AMBIGUITY_TOL {
                return Err(Error::numerical(format!(
                    "eigenbranch ambiguity at t = {t}: near-degenerate crossing under-resolved"
                )));
            }
            if taken[best_j] {
                return Err(Error::numerical(format!(
                    "eigenbranch matching collision at t = {t}"
                )));
            }
            taken[best_j] = true;
            assignment[b] = best_j;
        }

        let mut vals_b = vec![0.0; n];
        let mut vecs_b = CMatrix::zeros(n, n);
        for b in 0..n {
            let j = assignment[b];
            vals_b[b] = vals[j];
            for i in 0..n {
                vecs_b[(i, b)] = vecs[(i, j)];
            }
        }
        branch_vals.push(vals_b);
        branch_vecs.push(vecs_b);
    }

    // Dynamical phases per branch: cumulative trapezoid of the eigenvalues.
    let mut phases = vec![vec![0.0; n]; grid.len()];
    for j in 0..n {
        let samples: Vec<f64> = branch_vals.iter().map(|v| v[j]).collect();
        let cum = cumulative_trapezoid_real(grid, &samples)?;
        for k in 0..grid.len() {
            phases[k][j] = cum[k];
        }
    }

    let mut populations = vec![vec![0.0; n]; grid.len()];
    for k in 0..grid.len() {
        let psi = traj.state(k);
        let vecs = &branch_vecs[k];
        let mut total = 0.0;
        for j in 0..n {
            let mut c = Complex64::new(0.0, 0.0);
            for i in 0..n {
                c += vecs[(i, j)].conj() * psi[i];
            }
            // c'_j = <χ_j|ψ> exp(+i Φ_j); the phase does not change |c'_j|²
            // but is part of the contract for callers using the amplitudes.
            let cprime = c * Complex64::from_polar(1.0, phases[k][j]);
            populations[k][j] = cprime.norm_sqr();
            total += populations[k][j];
        }
        let norm_sq: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (total - norm_sq).abs() > 1e-8 {
            return Err(Error::numerical(format!(
                "adiabatic completeness violated at grid point {k}: Σ|c'|² = {total}"
            )));
        }
    }

    Ok(AdiabaticDecomposition {
        populations,
        phases,
        energies: branch_vals,
    })
}

/// Instantaneous ground eigenstate of the system at time t.
pub fn ground_state_at(sys: &LevelSystem, p: &SweepProfile, t: f64) -> Result<StateVector> {
    let h = to_hermitian(&hamiltonian_at(sys, p, t)?)?;
    let (_, mut vecs) = eigh(&h)?;
    gauge_fix(&mut vecs);
    StateVector::normalized(vecs.column(0))
}

/// Final population remaining in the initial diabatic level for a two-level
/// crossing with coupling `eps`, starting from level 1 at the left end of
/// the span.
///
/// The span must satisfy |γ(t0)|, |γ(t1)| >= 10 eps so the run starts and
/// ends in the asymptotic regime.
pub fn lz_survival(
    eps: f64,
    p: &SweepProfile,
    span: &TimeGrid,
    method: Method,
) -> Result<f64> {
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::input("coupling eps must be finite and >= 0"));
    }
    let g0 = p.gamma(span.t0())?.abs();
    let g1 = p.gamma(span.t1())?.abs();
    if g0 < SPAN_GUARD_FACTOR * eps || g1 < SPAN_GUARD_FACTOR * eps {
        return Err(Error::input(format!(
            "span violates the asymptotic guard: |γ| at the endpoints is ({g0}, {g1}), needs >= {}",
            SPAN_GUARD_FACTOR * eps
        )));
    }
    if eps == 0.0 {
        return Ok(1.0);
    }
    let sys = LevelSystem::two_level_crossing(eps, Hermiticity::Hermitian, Scaling::Calibrated)?;
    let psi0 = StateVector::basis(2, 0)?;
    let traj = evolve(&sys, p, &psi0, span, method)?;
    Ok(traj.final_state()[0].norm_sqr())
}
