//! Small-scale numerical kernel shared by the dynamics and Morris-Shore
//! modules: uniform time grids, dense complex matrices, a cyclic-Jacobi
//! Hermitian eigensolver, trapezoid quadrature and the matrix exponential
//! step exp(-i H dt).
//!
//! Everything here is desk scale (n <= 64) and dependency free. ħ = 1
//! throughout; times, energies and rates are dimensionless.

use num_complex::Complex64;

use crate::{Error, Result};

/// Hermiticity check tolerance on construction.
const HERMITICITY_TOL: f64 = 1e-12;
/// Jacobi sweep budget before reporting non-convergence.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Uniform time grid over [t0, t1] with `steps` intervals (steps + 1 points).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if !t0.is_finite() || !t1.is_finite() {
            return Err(Error::input("time grid endpoints must be finite"));
        }
        if t1 <= t0 {
            return Err(Error::input(format!(
                "time grid requires t1 > t0, got [{t0}, {t1}]"
            )));
        }
        if steps == 0 {
            return Err(Error::input("time grid requires steps >= 1"));
        }
        Ok(TimeGrid { t0, t1, steps })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of grid points, steps + 1.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }

    /// k-th grid point, k = 0..=steps.
    pub fn point(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|k| self.point(k))
    }
}

/// Dense complex matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        CMatrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dagger(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    /// Max absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max absolute row sum (infinity norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Hermitian matrix, validated on construction.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    mat: CMatrix,
}

impl HermitianMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.rows() != mat.cols() {
            return Err(Error::input("Hermitian matrix must be square"));
        }
        let scale = mat.max_abs().max(1.0);
        for i in 0..mat.rows() {
            for j in i..mat.cols() {
                let d = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                if d > HERMITICITY_TOL * scale {
                    return Err(Error::input(format!(
                        "matrix is not Hermitian: |a[{i}][{j}] - conj(a[{j}][{i}])| = {d:.3e}"
                    )));
                }
            }
        }
        Ok(HermitianMatrix { mat })
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            mat: CMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the unitary matrix whose
/// columns are the paired eigenvectors. Within a degenerate cluster the
/// eigenvector ordering is arbitrary; callers must only rely on
/// basis-invariant quantities there.
pub fn eigh(m: &HermitianMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut v = CMatrix::identity(n);

    if n <= 1 {
        let vals = if n == 1 { vec![a[(0, 0)].re] } else { vec![] };
        return Ok((vals, v));
    }

    let scale = a.max_abs().max(1.0);
    let stop = 1e-15 * scale;

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off_max = 0.0f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                off_max = off_max.max(mag);
                if mag <= stop {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase * (t * c);

                // A <- J^† A J, columns then rows of the p/q plane.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c - aiq * s.conj();
                    a[(i, q)] = aip * s + aiq * c;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c - aqj * s;
                    a[(q, j)] = apj * s.conj() + aqj * c;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * s.conj();
                    v[(i, q)] = vip * s + viq * c;
                }
            }
        }
        if off_max <= stop {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numerical(format!(
            "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());

    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_vecs = CMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            sorted_vecs[(i, col)] = v[(i, src)];
        }
    }
    Ok((sorted_vals, sorted_vecs))
}

/// Composite trapezoid rule over the uniform grid.
pub fn integrate_samples(grid: &TimeGrid, values: &[Complex64]) -> Result<Complex64> {
    if values.len() != grid.len() {
        return Err(Error::input(format!(
            "expected {} samples, got {}",
            grid.len(),
            values.len()
        )));
    }
    let dt = grid.dt();
    let mut acc = (values[0] + values[grid.steps()]) * 0.5;
    for v in &values[1..grid.steps()] {
        acc += v;
    }
    Ok(acc * dt)
}

/// Cumulative trapezoid: out[k] = integral of the samples from t0 to t_k.
/// out[steps] agrees with [`integrate_samples`] up to rounding.
pub fn cumulative_trapezoid(grid: &TimeGrid, values: &[Complex64]) -> Result<Vec<Complex64>> {
    if values.len() != grid.len() {
        return Err(Error::input(format!(
            "expected {} samples, got {}",
            grid.len(),
            values.len()
        )));
    }
    let dt = grid.dt();
    let mut out = Vec::with_capacity(values.len());
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    for k in 1..values.len() {
        acc += (values[k - 1] + values[k]) * (0.5 * dt);
        out.push(acc);
    }
    Ok(out)
}

/// Real-valued cumulative trapezoid, same contract as [`cumulative_trapezoid`].
pub fn cumulative_trapezoid_real(grid: &TimeGrid, values: &[f64]) -> Result<Vec<f64>> {
    if values.len() != grid.len() {
        return Err(Error::input(format!(
            "expected {} samples, got {}",
            grid.len(),
            values.len()
        )));
    }
    let dt = grid.dt();
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(acc);
    for k in 1..values.len() {
        acc += (values[k - 1] + values[k]) * (0.5 * dt);
        out.push(acc);
    }
    Ok(out)
}

/// One unitary propagator step exp(-i h dt), via the eigendecomposition of h.
pub fn unitary_step(h: &HermitianMatrix, dt: f64) -> Result<CMatrix> {
    if !dt.is_finite() {
        return Err(Error::input("dt must be finite"));
    }
    let n = h.dim();
    let (vals, vecs) = eigh(h)?;
    // U = V exp(-i Λ dt) V^†
    let mut u = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let phase = Complex64::from_polar(1.0, -vals[k] * dt);
                acc += vecs[(i, k)] * phase * vecs[(j, k)].conj();
            }
            u[(i, j)] = acc;
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(rng.gen_range(-2.0..2.0), 0.0);
            for j in i + 1..n {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HermitianMatrix::new(m).unwrap()
    }

    fn reconstruct(vals: &[f64], vecs: &CMatrix) -> CMatrix {
        let n = vals.len();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = c(0.0, 0.0);
                for k in 0..n {
                    acc += vecs[(i, k)] * vals[k] * vecs[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    #[test]
    fn grid_rejects_bad_inputs() {
        assert!(TimeGrid::new(1.0, 1.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::new(0.0, f64::NAN, 10).is_err());
    }

    #[test]
    fn grid_points_are_uniform() {
        let g = TimeGrid::new(-1.0, 1.0, 4).unwrap();
        let pts: Vec<f64> = g.points().collect();
        assert_eq!(pts, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn hermitian_rejects_asymmetric() {
        let m = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(-1.0, 0.0), c(0.0, 0.0)]]);
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn eigh_identity() {
        let h = HermitianMatrix::new(CMatrix::identity(3)).unwrap();
        let (vals, vecs) = eigh(&h).unwrap();
        for v in &vals {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let gram = vecs.dagger().matmul(&vecs).sub(&CMatrix::identity(3));
        assert!(gram.max_abs() < 1e-10);
    }

    #[test]
    fn eigh_pauli_x() {
        let m = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let h = HermitianMatrix::new(m).unwrap();
        let (vals, _) = eigh(&h).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_reconstructs_random_6x6() {
        let h = random_hermitian(6, 42);
        let (vals, vecs) = eigh(&h).unwrap();
        let err = reconstruct(&vals, &vecs).sub(h.as_matrix()).max_abs();
        assert!(err < 1e-10, "reconstruction error {err:.3e}");
        let unit = vecs.dagger().matmul(&vecs).sub(&CMatrix::identity(6)).max_abs();
        assert!(unit < 1e-10, "unitarity defect {unit:.3e}");
        for w in vals.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn eigh_reconstructs_up_to_16() {
        for n in [2usize, 5, 9, 16] {
            for seed in 0..5u64 {
                let h = random_hermitian(n, 1000 * n as u64 + seed);
                let (vals, vecs) = eigh(&h).unwrap();
                let scale = h.as_matrix().norm_inf().max(1.0);
                let err = reconstruct(&vals, &vecs).sub(h.as_matrix()).norm_inf();
                assert!(err <= 1e-10 * scale, "n={n} seed={seed}: {err:.3e}");
                let unit = vecs.dagger().matmul(&vecs).sub(&CMatrix::identity(n)).norm_inf();
                assert!(unit <= 1e-10, "n={n} seed={seed}: {unit:.3e}");
            }
        }
    }

    #[test]
    fn trapezoid_constant() {
        let g = TimeGrid::new(0.0, 2.0, 7).unwrap();
        let vals = vec![c(1.0, 0.0); 8];
        let r = integrate_samples(&g, &vals).unwrap();
        assert!((r - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn trapezoid_sin() {
        let g = TimeGrid::new(0.0, std::f64::consts::PI, 1000).unwrap();
        let vals: Vec<Complex64> = g.points().map(|t| c(t.sin(), 0.0)).collect();
        let r = integrate_samples(&g, &vals).unwrap();
        assert!((r.re - 2.0).abs() < 1e-5);
        assert!(r.im.abs() < 1e-14);
    }

    #[test]
    fn trapezoid_zero() {
        let g = TimeGrid::new(0.0, 1.0, 3).unwrap();
        let r = integrate_samples(&g, &vec![c(0.0, 0.0); 4]).unwrap();
        assert_eq!(r, c(0.0, 0.0));
    }

    #[test]
    fn trapezoid_length_mismatch() {
        let g = TimeGrid::new(0.0, 1.0, 3).unwrap();
        assert!(integrate_samples(&g, &vec![c(0.0, 0.0); 5]).is_err());
    }

    #[test]
    fn cumulative_matches_full() {
        let g = TimeGrid::new(0.0, 3.0, 100).unwrap();
        let vals: Vec<Complex64> = g.points().map(|t| c(t.cos(), t.sin())).collect();
        let cum = cumulative_trapezoid(&g, &vals).unwrap();
        let full = integrate_samples(&g, &vals).unwrap();
        assert!((cum[100] - full).norm() < 1e-12);
        assert_eq!(cum[0], c(0.0, 0.0));
    }

    #[test]
    fn unitary_step_zero_hamiltonian() {
        let h = HermitianMatrix::zeros(3);
        let u = unitary_step(&h, 0.7).unwrap();
        assert!(u.sub(&CMatrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn unitary_step_diagonal() {
        let m = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]]);
        let h = HermitianMatrix::new(m).unwrap();
        let u = unitary_step(&h, std::f64::consts::PI).unwrap();
        // exp(-i π diag(1,-1)) = -I
        assert!((u[(0, 0)] + c(1.0, 0.0)).norm() < 1e-12);
        assert!((u[(1, 1)] + c(1.0, 0.0)).norm() < 1e-12);
        assert!(u[(0, 1)].norm() < 1e-12);
        assert!(u[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn unitary_step_is_unitary() {
        let h = random_hermitian(5, 7);
        let u = unitary_step(&h, 0.1).unwrap();
        let defect = u.dagger().matmul(&u).sub(&CMatrix::identity(5)).max_abs();
        assert!(defect < 1e-10);
    }

    #[test]
    fn unitary_step_composes() {
        let h = random_hermitian(4, 11);
        let u1 = unitary_step(&h, 0.2).unwrap();
        let u2 = unitary_step(&h, 0.4).unwrap();
        let diff = u1.matmul(&u1).sub(&u2).max_abs();
        assert!(diff < 1e-10);
    }
}
