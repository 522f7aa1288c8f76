//! Instance builders and oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

use relcond::linalg::EigenDecomposition;

pub fn mat(n: usize, x: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, &x[..n * n])
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// `P B P^-1` with `B` holding a rightmost pair `a +- ib` followed by real
/// eigenvalues `a - gaps[k]`, and `P = 2I + noise`.
pub fn pair_matrix(n: usize, a: f64, b: f64, gaps: &[f64], noise: &[f64]) -> DMatrix<f64> {
    let mut blk = DMatrix::zeros(n, n);
    blk[(0, 0)] = a;
    blk[(0, 1)] = b;
    blk[(1, 0)] = -b;
    blk[(1, 1)] = a;
    for k in 2..n {
        blk[(k, k)] = a - gaps[k - 2];
    }
    let p = DMatrix::identity(n, n) * 2.0 + mat(n, noise);
    let pinv = p.clone().try_inverse().unwrap();
    &p * blk * pinv
}

/// `P D P^-1` with distinct real eigenvalues `r1 - cumulative gaps`.
pub fn real_matrix(n: usize, r1: f64, gaps: &[f64], noise: &[f64]) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n);
    let mut lam = r1;
    for k in 0..n {
        d[(k, k)] = lam;
        if k + 1 < n {
            lam -= gaps[k];
        }
    }
    let p = DMatrix::identity(n, n) * 2.0 + mat(n, noise);
    let pinv = p.clone().try_inverse().unwrap();
    &p * d * pinv
}

pub fn taylor_expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm1 = (0..n).map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let s = if norm1 > 0.25 { (norm1 / 0.25).log2().ceil() as i32 } else { 0 };
    let b = a / 2f64.powi(s);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..40 {
        term = &term * &b / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn unit_phase_shift(dec: &EigenDecomposition, phases: &[f64]) -> EigenDecomposition {
    let mut d = dec.clone();
    let n = d.dim();
    for i in 0..n {
        // Keep conjugate partners conjugate.
        let lam = dec.values[i];
        let k = if lam.im >= 0.0 { i } else { (0..n).find(|&j| (dec.values[j] - lam.conj()).norm() < 1e-12).unwrap() };
        let phi = if lam.im >= 0.0 { phases[k] } else { -phases[k] };
        let e = Complex64::from_polar(1.0, phi);
        let mut c = d.vectors.column_mut(i);
        c *= e;
        let mut r = d.left.row_mut(i);
        r *= e.conj();
    }
    d
}
