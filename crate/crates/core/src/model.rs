//! Assembly of the n-level tridiagonal Hamiltonian at a time snapshot:
//! per-level offsets, spin signs times the sweep field on the diagonal, and
//! constant nearest-neighbor couplings off it.

use num_complex::Complex64;

use crate::numerics::{CMatrix, HermitianMatrix};
use crate::sweep::SweepProfile;
use crate::{Error, Result};

/// Sign convention for the subdiagonal.
///
/// `Hermitian` uses sub = sup (sound quantum dynamics); `PaperLiteral`
/// uses sub = -sup, the ε / -ε pattern whose sign structure the
/// triangularization recursion follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hermiticity {
    Hermitian,
    PaperLiteral,
}

/// Entry scaling convention.
///
/// `Calibrated` puts γ(t)/2 on the diagonal and ε/2 off it, which makes the
/// two-level crossing reproduce the closed-form survival exp(-π ε²/2α).
/// `Literal` uses the raw entries γ(t) and ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    Calibrated,
    Literal,
}

/// Specification of an n-level system.
#[derive(Debug, Clone)]
pub struct LevelSystem {
    n: usize,
    offsets: Vec<f64>,
    signs: Vec<f64>,
    couplings: Vec<f64>,
    hermiticity: Hermiticity,
    scaling: Scaling,
}

impl LevelSystem {
    pub fn new(
        offsets: Vec<f64>,
        signs: Vec<f64>,
        couplings: Vec<f64>,
        hermiticity: Hermiticity,
        scaling: Scaling,
    ) -> Result<Self> {
        let n = offsets.len();
        if n == 0 {
            return Err(Error::input("level system requires n >= 1"));
        }
        if signs.len() != n {
            return Err(Error::input(format!(
                "signs length {} does not match level count {n}",
                signs.len()
            )));
        }
        if couplings.len() != n.saturating_sub(1) {
            return Err(Error::input(format!(
                "couplings length {} does not match n - 1 = {}",
                couplings.len(),
                n - 1
            )));
        }
        if signs.iter().any(|s| *s != 1.0 && *s != -1.0) {
            return Err(Error::input("signs entries must be +1 or -1"));
        }
        if offsets.iter().any(|o| !o.is_finite()) {
            return Err(Error::input("offsets must be finite"));
        }
        // couplings strictly positive, or exact zero for decoupled blocks
        if couplings.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::input(
                "couplings must be finite and >= 0 (zero only for decoupled blocks)",
            ));
        }
        Ok(LevelSystem {
            n,
            offsets,
            signs,
            couplings,
            hermiticity,
            scaling,
        })
    }

    /// Two-level crossing with zero offsets and signs (+1, -1), the standard
    /// Landau-Zener configuration.
    pub fn two_level_crossing(coupling: f64, hermiticity: Hermiticity, scaling: Scaling) -> Result<Self> {
        LevelSystem::new(vec![0.0, 0.0], vec![1.0, -1.0], vec![coupling], hermiticity, scaling)
    }

    /// n levels, zero offsets, alternating signs starting with +1.
    pub fn alternating(n: usize, couplings: Vec<f64>, hermiticity: Hermiticity, scaling: Scaling) -> Result<Self> {
        let signs = (0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        LevelSystem::new(vec![0.0; n], signs, couplings, hermiticity, scaling)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn hermiticity(&self) -> Hermiticity {
        self.hermiticity
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }
}

/// One time snapshot of the Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub sub: Vec<f64>,
    hermiticity: Hermiticity,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, sup: Vec<f64>, sub: Vec<f64>, hermiticity: Hermiticity) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::input("empty tridiagonal matrix"));
        }
        if sup.len() != n - 1 || sub.len() != n - 1 {
            return Err(Error::input("off-diagonal lengths must be n - 1"));
        }
        for k in 0..n - 1 {
            let ok = match hermiticity {
                Hermiticity::Hermitian => sub[k] == sup[k],
                Hermiticity::PaperLiteral => sub[k] == -sup[k],
            };
            if !ok {
                return Err(Error::input(format!(
                    "off-diagonal pair at {k} violates the {hermiticity:?} sign convention"
                )));
            }
        }
        Ok(TridiagonalMatrix { diag, sup, sub, hermiticity })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn hermiticity(&self) -> Hermiticity {
        self.hermiticity
    }

    /// y = T x, O(n).
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        debug_assert_eq!(x.len(), n);
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = x[i] * self.diag[i];
            if i > 0 {
                acc += x[i - 1] * self.sub[i - 1];
            }
            if i + 1 < n {
                acc += x[i + 1] * self.sup[i];
            }
            y[i] = acc;
        }
        y
    }
}

/// Assembles H(t) from a level system and a sweep profile.
pub fn hamiltonian_at(sys: &LevelSystem, p: &SweepProfile, t: f64) -> Result<TridiagonalMatrix> {
    let gamma = p.gamma(t)?;
    let scale = match sys.scaling() {
        Scaling::Calibrated => 0.5,
        Scaling::Literal => 1.0,
    };
    let diag: Vec<f64> = sys
        .offsets()
        .iter()
        .zip(sys.signs())
        .map(|(o, s)| o + s * gamma * scale)
        .collect();
    let sup: Vec<f64> = sys.couplings().iter().map(|e| e * scale).collect();
    let sub: Vec<f64> = match sys.hermiticity() {
        Hermiticity::Hermitian => sup.clone(),
        Hermiticity::PaperLiteral => sup.iter().map(|e| -e).collect(),
    };
    TridiagonalMatrix::new(diag, sup, sub, sys.hermiticity())
}

/// Promotes a Hermitian-mode tridiagonal snapshot to a dense Hermitian matrix.
pub fn to_hermitian(m: &TridiagonalMatrix) -> Result<HermitianMatrix> {
    if m.hermiticity() != Hermiticity::Hermitian {
        return Err(Error::convention(
            "PaperLiteral tridiagonal matrix is not Hermitian and cannot be promoted",
        ));
    }
    let n = m.n();
    let mut dense = CMatrix::zeros(n, n);
    for i in 0..n {
        dense[(i, i)] = Complex64::new(m.diag[i], 0.0);
        if i + 1 < n {
            dense[(i, i + 1)] = Complex64::new(m.sup[i], 0.0);
            dense[(i + 1, i)] = Complex64::new(m.sub[i], 0.0);
        }
    }
    HermitianMatrix::new(dense)
}
