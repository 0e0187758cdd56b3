//! Property tests for the spec-level invariants: eigensolver reconstruction,
//! quadrature linearity, Hamiltonian structure, factorization reconstruction
//! and the closed-form probability identities.

use num_complex::Complex64;
use proptest::prelude::*;

use lzsweep::analytic::{lz_classic, lz_sine, SineMode};
use lzsweep::model::{hamiltonian_at, Hermiticity, LevelSystem, Scaling, TridiagonalMatrix};
use lzsweep::numerics::{eigh, integrate_samples, CMatrix, HermitianMatrix, TimeGrid};
use lzsweep::sweep::SweepProfile;
use lzsweep::triangular::{triangularize, Recursion};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hermitian_strategy(max_n: usize) -> impl Strategy<Value = HermitianMatrix> {
    (2..=max_n).prop_flat_map(|n| {
        let n_off = n * (n - 1) / 2;
        (
            prop::collection::vec(-2.0..2.0f64, n),
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n_off),
        )
            .prop_map(move |(diag, off)| {
                let mut m = CMatrix::zeros(n, n);
                let mut it = off.into_iter();
                for i in 0..n {
                    m[(i, i)] = c(diag[i], 0.0);
                    for j in i + 1..n {
                        let (re, im) = it.next().unwrap();
                        m[(i, j)] = c(re, im);
                        m[(j, i)] = c(re, -im);
                    }
                }
                HermitianMatrix::new(m).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigh_reconstruction_and_unitarity(h in hermitian_strategy(16)) {
        let n = h.dim();
        let (vals, vecs) = eigh(&h).unwrap();
        let scale = h.as_matrix().norm_inf().max(1.0);

        let mut rec = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = c(0.0, 0.0);
                for k in 0..n {
                    acc += vecs[(i, k)] * vals[k] * vecs[(j, k)].conj();
                }
                rec[(i, j)] = acc;
            }
        }
        prop_assert!(rec.sub(h.as_matrix()).norm_inf() <= 1e-10 * scale);
        prop_assert!(vecs.dagger().matmul(&vecs).sub(&CMatrix::identity(n)).norm_inf() <= 1e-10);
        for w in vals.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn trapezoid_is_linear(
        steps in 1usize..50,
        a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 51),
        b in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 51),
        ca in -3.0..3.0f64,
        cb in -3.0..3.0f64,
    ) {
        let grid = TimeGrid::new(0.0, 1.0, steps).unwrap();
        let n = grid.len();
        let fa: Vec<Complex64> = a[..n].iter().map(|&(re, im)| c(re, im)).collect();
        let fb: Vec<Complex64> = b[..n].iter().map(|&(re, im)| c(re, im)).collect();
        let combo: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * ca + y * cb).collect();
        let lhs = integrate_samples(&grid, &combo).unwrap();
        let rhs = integrate_samples(&grid, &fa).unwrap() * ca
            + integrate_samples(&grid, &fb).unwrap() * cb;
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn hamiltonian_linear_in_gamma(
        alpha in 0.01..2.0f64,
        eps in 0.0..1.0f64,
        t1 in 0.1..5.0f64,
    ) {
        let sys = LevelSystem::two_level_crossing(eps, Hermiticity::Hermitian, Scaling::Calibrated).unwrap();
        let p = SweepProfile::linear(alpha).unwrap();
        let h0 = hamiltonian_at(&sys, &p, 0.0).unwrap();
        let h1 = hamiltonian_at(&sys, &p, t1).unwrap();
        let h2 = hamiltonian_at(&sys, &p, 2.0 * t1).unwrap();
        for i in 0..2 {
            let d1 = h1.diag[i] - h0.diag[i];
            let d2 = h2.diag[i] - h0.diag[i];
            prop_assert!((d2 - 2.0 * d1).abs() <= 1e-12 * (1.0 + d2.abs()));
        }
        prop_assert_eq!(h0.sup.clone(), h2.sup.clone());
    }

    #[test]
    fn factorization_reconstructs(
        n in 2usize..=10,
        raw_diag in prop::collection::vec(1.0..5.0f64, 10),
        raw_eps in prop::collection::vec(-0.5..0.5f64, 9),
    ) {
        let diag = raw_diag[..n].to_vec();
        let eps = raw_eps[..n - 1].to_vec();
        let m = TridiagonalMatrix::new(diag.clone(), eps.clone(), eps.clone(), Hermiticity::Hermitian).unwrap();
        let f = triangularize(&m, Recursion::Corrected).unwrap();
        let r = f.reconstruct();
        for i in 0..n {
            prop_assert!((r[i][i] - diag[i]).abs() <= 1e-12);
            if i + 1 < n {
                prop_assert!((r[i][i + 1] - eps[i]).abs() <= 1e-12);
                prop_assert!((r[i + 1][i] - eps[i]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rate_matched_formulas_agree(
        eps in 0.0..0.5f64,
        amp in 0.1..3.0f64,
        omega in 0.1..3.0f64,
        t in -2.0..2.0f64,
    ) {
        let cos = (omega * t).cos();
        prop_assume!(cos.abs() > 1e-3);
        let alpha = amp * omega * cos.abs();
        let a = lz_classic(eps, alpha).unwrap();
        let b = lz_sine(eps, amp, omega, t, SineMode::AbsRate).unwrap();
        prop_assert!((a - b).abs() <= 1e-15);
    }

    #[test]
    fn crossing_times_are_zeros(
        amp in 0.5..3.0f64,
        omega in 0.3..4.0f64,
        span in 2.0..12.0f64,
    ) {
        let p = SweepProfile::sinusoidal(amp, omega).unwrap();
        let xs = lzsweep::sweep::find_crossings(&p, -span, span).unwrap();
        prop_assert!(!xs.is_empty());
        let mut prev = f64::NEG_INFINITY;
        for x in &xs {
            prop_assert!(p.gamma(x.time).unwrap().abs() <= 1e-10);
            prop_assert!(x.time - prev > 1e-9);
            prev = x.time;
        }
    }
}
