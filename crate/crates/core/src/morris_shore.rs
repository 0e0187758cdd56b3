//! Block transform of a two-manifold Hamiltonian [[0, V], [V†, D]]:
//! unitaries A and B built from the eigenbases of V V† and V† V turn the
//! coupling block into a rectangular-diagonal matrix of singular values.

use num_complex::Complex64;

use crate::numerics::{eigh, CMatrix, HermitianMatrix};
use crate::{Error, Result};

/// Singular values below this are treated as numerically zero.
const SV_RANK_TOL: f64 = 1e-10;

/// Two-manifold Hamiltonian: upper block identically zero, coupling V,
/// diagonal detuning block D.
#[derive(Debug, Clone)]
pub struct BlockHamiltonian {
    n_a: usize,
    n_b: usize,
    v: CMatrix,
    d: Vec<f64>,
}

impl BlockHamiltonian {
    pub fn new(v: CMatrix, d: Vec<f64>) -> Result<Self> {
        let (n_a, n_b) = (v.rows(), v.cols());
        if n_a == 0 || n_b == 0 {
            return Err(Error::input("coupling block V must be nonempty"));
        }
        if d.len() != n_b {
            return Err(Error::input(format!(
                "detuning block length {} does not match V columns {n_b}",
                d.len()
            )));
        }
        if d.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("detuning entries must be finite"));
        }
        Ok(BlockHamiltonian { n_a, n_b, v, d })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// Dense (n_a + n_b)-dimensional Hermitian assembly.
    pub fn assemble(&self) -> CMatrix {
        let n = self.n_a + self.n_b;
        let mut h = CMatrix::zeros(n, n);
        for i in 0..self.n_a {
            for j in 0..self.n_b {
                h[(i, self.n_a + j)] = self.v[(i, j)];
                h[(self.n_a + j, i)] = self.v[(i, j)].conj();
            }
        }
        for j in 0..self.n_b {
            h[(self.n_a + j, self.n_a + j)] = Complex64::new(self.d[j], 0.0);
        }
        h
    }
}

/// Result of the block transform.
#[derive(Debug, Clone)]
pub struct MsResult {
    /// n_a x n_a unitary acting on the upper manifold.
    pub a: CMatrix,
    /// n_b x n_b unitary acting on the lower manifold.
    pub b: CMatrix,
    /// A V B†: rectangular-diagonal with the singular values of V descending.
    pub v_bar: CMatrix,
    /// Singular values, descending, length min(n_a, n_b).
    pub singular_values: Vec<f64>,
    /// S H S† with S = diag(A, B).
    pub h_transformed: CMatrix,
}

impl MsResult {
    /// Number of singular values above the rank tolerance.
    pub fn rank(&self) -> usize {
        self.singular_values.iter().filter(|s| **s > SV_RANK_TOL).count()
    }

    /// S = diag(A, B).
    pub fn s(&self) -> CMatrix {
        let n = self.a.rows() + self.b.rows();
        let mut s = CMatrix::zeros(n, n);
        for i in 0..self.a.rows() {
            for j in 0..self.a.cols() {
                s[(i, j)] = self.a[(i, j)];
            }
        }
        let off = self.a.rows();
        for i in 0..self.b.rows() {
            for j in 0..self.b.cols() {
                s[(off + i, off + j)] = self.b[(i, j)];
            }
        }
        s
    }
}

/// Orthonormal completion of a partial set of orthonormal columns to a full
/// unitary, by Gram-Schmidt against the canonical basis.
fn complete_unitary(cols: Vec<Vec<Complex64>>, n: usize) -> CMatrix {
    let mut basis = cols;
    let mut k = 0;
    while basis.len() < n && k < n {
        let mut cand = vec![Complex64::new(0.0, 0.0); n];
        cand[k] = Complex64::new(1.0, 0.0);
        for b in &basis {
            let proj: Complex64 = b.iter().zip(&cand).map(|(bi, ci)| bi.conj() * ci).sum();
            for i in 0..n {
                cand[i] -= proj * b[i];
            }
        }
        let norm: f64 = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for z in &mut cand {
                *z /= norm;
            }
            basis.push(cand);
        }
        k += 1;
    }
    let mut m = CMatrix::zeros(n, n);
    for (j, col) in basis.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    m
}

/// Constructs the transform: B from the eigenbasis of V†V (descending
/// eigenvalues), the upper-manifold basis as V b_k / σ_k for σ_k above the
/// rank tolerance (these are eigenvectors of V V†), completed on the null
/// space. The pairing makes A V B† rectangular-diagonal with real
/// non-negative diagonal even inside degenerate singular clusters.
pub fn ms_transform(h: &BlockHamiltonian) -> Result<MsResult> {
    let (n_a, n_b) = (h.n_a(), h.n_b());
    let v = h.v();

    if v.max_abs() == 0.0 {
        let a = CMatrix::identity(n_a);
        let b = CMatrix::identity(n_b);
        return Ok(MsResult {
            a,
            b,
            v_bar: v.clone(),
            singular_values: vec![0.0; n_a.min(n_b)],
            h_transformed: h.assemble(),
        });
    }

    // Gram matrix V†V and its eigenbasis, descending.
    let gram = HermitianMatrix::new(v.dagger().matmul(v))?;
    let (vals_asc, vecs_asc) = eigh(&gram)?;
    let mut order: Vec<usize> = (0..n_b).collect();
    order.sort_by(|&i, &j| vals_asc[j].partial_cmp(&vals_asc[i]).unwrap());

    let mut ub = CMatrix::zeros(n_b, n_b);
    let mut sigmas = Vec::with_capacity(n_a.min(n_b));
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n_b {
            ub[(i, col)] = vecs_asc[(i, src)];
        }
        if col < n_a.min(n_b) {
            sigmas.push(vals_asc[src].max(0.0).sqrt());
        }
    }

    // Upper-manifold columns u_k = V b_k / σ_k for σ_k above tolerance.
    let scale = sigmas.first().copied().unwrap_or(0.0).max(1.0);
    let mut u_cols = Vec::new();
    for (k, &sigma) in sigmas.iter().enumerate() {
        if sigma <= SV_RANK_TOL * scale {
            break;
        }
        let b_k = ub.column(k);
        let u_k: Vec<Complex64> = v.mul_vec(&b_k).into_iter().map(|z| z / sigma).collect();
        u_cols.push(u_k);
    }
    let ua = complete_unitary(u_cols, n_a);

    let a = ua.dagger();
    let b = ub.dagger();
    let v_bar = a.matmul(v).matmul(&b.dagger());

    let s_full = {
        let mut s = CMatrix::zeros(n_a + n_b, n_a + n_b);
        for i in 0..n_a {
            for j in 0..n_a {
                s[(i, j)] = a[(i, j)];
            }
        }
        for i in 0..n_b {
            for j in 0..n_b {
                s[(n_a + i, n_a + j)] = b[(i, j)];
            }
        }
        s
    };
    let h_transformed = s_full.matmul(&h.assemble()).matmul(&s_full.dagger());

    Ok(MsResult {
        a,
        b,
        v_bar,
        singular_values: sigmas,
        h_transformed,
    })
}
