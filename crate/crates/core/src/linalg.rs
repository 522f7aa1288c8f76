//! Vector and matrix norms, the matrix exponential and a full complex
//! eigendecomposition.
//!
//! Kernels are generic over [`Scalar`], which covers both `f64` and
//! `Complex64`, so the Monte-Carlo drivers can stay in real arithmetic.

use nalgebra::{ComplexField, DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Field of matrix entries accepted by the generic kernels.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}
impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}

/// Vector norm used throughout an analysis.
///
/// `MeanP(p)` is the p-norm scaled by `n^(-1/p)`; `p` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    P1,
    P2,
    PInf,
    MeanP(f64),
}

impl NormKind {
    pub fn validate(self) -> Result<Self> {
        match self {
            NormKind::MeanP(p) if !(p >= 1.0) => {
                Err(Error::Input(format!("mean p-norm needs p >= 1, got {p}")))
            }
            _ => Ok(self),
        }
    }

    /// Exponent of the underlying p-norm.
    pub fn exponent(self) -> f64 {
        match self {
            NormKind::P1 => 1.0,
            NormKind::P2 => 2.0,
            NormKind::PInf => f64::INFINITY,
            NormKind::MeanP(p) => p,
        }
    }

    /// Hoelder conjugate exponent.
    pub fn dual_exponent(self) -> f64 {
        conjugate_exponent(self.exponent())
    }

    /// Multiplier turning the plain p-norm of an n-vector into this norm.
    pub fn scale(self, n: usize) -> f64 {
        match self {
            NormKind::MeanP(p) if p.is_finite() => (n as f64).powf(-1.0 / p),
            _ => 1.0,
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormKind::P1 => write!(f, "1"),
            NormKind::P2 => write!(f, "2"),
            NormKind::PInf => write!(f, "inf"),
            NormKind::MeanP(p) => write!(f, "mean-p:{p}"),
        }
    }
}

/// Field over which a dual norm is maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Plain p-norm of a list of moduli, scaled to avoid overflow.
fn p_norm_of(mods: &[f64], p: f64) -> f64 {
    let big = mods.iter().fold(0.0f64, |m, &x| m.max(x));
    if p.is_infinite() || big == 0.0 || !big.is_finite() {
        return big;
    }
    if p == 1.0 {
        return mods.iter().sum();
    }
    let s: f64 = mods.iter().map(|&x| (x / big).powf(p)).sum();
    big * s.powf(1.0 / p)
}

/// Norm of a vector in the given norm.
pub fn vector_norm<T: Scalar>(v: &DVector<T>, norm: NormKind) -> f64 {
    match norm {
        NormKind::P1 => v.iter().map(|x| x.modulus()).sum(),
        NormKind::PInf => v.iter().fold(0.0, |m, x| m.max(x.modulus())),
        NormKind::P2 => {
            let mods: Vec<f64> = v.iter().map(|x| x.modulus()).collect();
            p_norm_of(&mods, 2.0)
        }
        NormKind::MeanP(p) => {
            let mods: Vec<f64> = v.iter().map(|x| x.modulus()).collect();
            p_norm_of(&mods, p) * norm.scale(v.len())
        }
    }
}

/// Dual norm of a row vector `w`, i.e. `max |w u|` over unit vectors `u`
/// taken from the given field.
///
/// Over the reals with a non-real `w` this is `max_theta ||Re(e^{-i theta} w)||_q`.
pub fn dual_row_norm(w: &CVector, norm: NormKind, field: Field) -> f64 {
    let n = w.len();
    let q = norm.dual_exponent();
    let rescale = 1.0 / norm.scale(n);
    let is_real = w.iter().all(|z| z.im == 0.0);
    if field == Field::Complex || is_real {
        let mods: Vec<f64> = w.iter().map(|z| z.norm()).collect();
        return p_norm_of(&mods, q) * rescale;
    }
    let base = if q.is_infinite() {
        w.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    } else if q == 2.0 {
        let (a11, a22, a12) = w.iter().fold((0.0, 0.0, 0.0), |(a, b, c), z| {
            (a + z.re * z.re, b + z.im * z.im, c + z.re * z.im)
        });
        let tr = 0.5 * (a11 + a22);
        let disc = (0.25 * (a11 - a22) * (a11 - a22) + a12 * a12).sqrt();
        (tr + disc).max(0.0).sqrt()
    } else if q == 1.0 {
        max_abs_cosine_sum(w)
    } else {
        max_real_projection(w, q)
    };
    base * rescale
}

/// `max_theta sum_k |w_k| |cos(theta - arg w_k)|`, maximized exactly over
/// the pieces on which the sign pattern is constant.
fn max_abs_cosine_sum(w: &CVector) -> f64 {
    use std::f64::consts::{FRAC_PI_2, PI};
    let eval = |th: f64| -> f64 { w.iter().map(|z| (z.norm() * (th - z.arg()).cos()).abs()).sum() };
    let mut cuts: Vec<f64> = w
        .iter()
        .filter(|z| z.norm() > 0.0)
        .map(|z| (z.arg() + FRAC_PI_2).rem_euclid(PI))
        .collect();
    if cuts.is_empty() {
        return 0.0;
    }
    cuts.sort_by(f64::total_cmp);
    let mut best = cuts.iter().fold(0.0f64, |m, &c| m.max(eval(c)));
    for i in 0..cuts.len() {
        let lo = cuts[i];
        let hi = if i + 1 < cuts.len() { cuts[i + 1] } else { cuts[0] + PI };
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (mut a, mut b) = (0.0, 0.0);
        for z in w.iter() {
            let s = (mid - z.arg()).cos().signum();
            a += s * z.re;
            b += s * z.im;
        }
        let star = b.atan2(a);
        let shifted = lo + (star - lo).rem_euclid(2.0 * PI);
        if shifted <= hi {
            best = best.max(eval(shifted));
        }
    }
    best
}

/// Same maximization for a general exponent `q`, by sampling and
/// golden-section refinement.
fn max_real_projection(w: &CVector, q: f64) -> f64 {
    use std::f64::consts::PI;
    let eval = |th: f64| -> f64 {
        let (c, s) = (th.cos(), th.sin());
        let mods: Vec<f64> = w.iter().map(|z| (z.re * c + z.im * s).abs()).collect();
        p_norm_of(&mods, q)
    };
    let samples = 2048;
    let h = PI / samples as f64;
    let (mut best_th, mut best) = (0.0, eval(0.0));
    for k in 1..samples {
        let th = k as f64 * h;
        let v = eval(th);
        if v > best {
            best = v;
            best_th = th;
        }
    }
    best.max(golden_max(&eval, best_th - h, best_th + h, 1e-14).1)
}

/// Golden-section search for a maximum of a unimodal function on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Operator norm induced by `norm` for a (possibly rectangular) matrix.
///
/// Exact for p in {1, 2, inf}; other mean p-norms are rejected.
pub fn induced_matrix_norm<T: Scalar>(m: &DMatrix<T>, norm: NormKind) -> Result<f64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(0.0);
    }
    let p = norm.exponent();
    let base = if p == 1.0 {
        (0..cols)
            .map(|j| m.column(j).iter().map(|x| x.modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    } else if p.is_infinite() {
        (0..rows)
            .map(|i| m.row(i).iter().map(|x| x.modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    } else if p == 2.0 {
        spectral_norm(m)
    } else {
        return Err(Error::UnsupportedNorm(format!(
            "induced matrix norm for p = {p} has no exact evaluation"
        )));
    };
    Ok(base * norm.scale(rows) / norm.scale(cols))
}

/// Largest singular value via the largest eigenvalue of the smaller Gram matrix.
fn spectral_norm<T: Scalar>(m: &DMatrix<T>) -> f64 {
    let (rows, cols) = m.shape();
    let scale = m.iter().fold(0.0f64, |s, x| s.max(x.modulus()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ms = m.unscale(scale);
    let gram = if rows >= cols { ms.ad_mul(&ms) } else { &ms * ms.adjoint() };
    let top = if gram.nrows() == 1 {
        gram[(0, 0)].real()
    } else {
        gram.symmetric_eigenvalues().iter().fold(0.0f64, |a, &b| a.max(b))
    };
    scale * top.max(0.0).sqrt()
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

fn one_norm<T: Scalar>(m: &DMatrix<T>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled<T: Scalar>(m: &DMatrix<T>, c: f64) -> DMatrix<T> {
    m * T::from_real(c)
}

/// `e^{tA}` by scaling and squaring with a diagonal Pade approximant whose
/// degree is picked from the 1-norm of `tA`.
pub fn mat_exp<T: Scalar>(a: &DMatrix<T>, t: f64) -> Result<DMatrix<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Input(format!("matrix must be square, got {}x{}", n, a.ncols())));
    }
    if !t.is_finite() || a.iter().any(|x| !x.modulus().is_finite()) {
        return Err(Error::Input("non-finite entries or time".into()));
    }
    let ident = DMatrix::<T>::identity(n, n);
    if t == 0.0 || n == 0 {
        return Ok(ident);
    }
    let b = scaled(a, t);
    let nrm = one_norm(&b);
    if nrm == 0.0 {
        return Ok(ident);
    }
    let b2 = &b * &b;
    for &(m, theta) in THETA.iter() {
        if nrm <= theta {
            let coeffs: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let mut pows = vec![ident.clone(), b2.clone()];
            while pows.len() <= m / 2 {
                let next = pows.last().unwrap() * &b2;
                pows.push(next);
            }
            let mut u = DMatrix::<T>::zeros(n, n);
            let mut v = DMatrix::<T>::zeros(n, n);
            for (k, p) in pows.iter().enumerate() {
                u += scaled(p, coeffs[2 * k + 1]);
                v += scaled(p, coeffs[2 * k]);
            }
            let u = &b * u;
            return pade_solve(&u, &v);
        }
    }
    let s = (nrm / THETA13).log2().ceil().max(0.0) as i32;
    let bs = scaled(&b, 2f64.powi(-s));
    let c = &PADE13;
    let b2 = &bs * &bs;
    let b4 = &b2 * &b2;
    let b6 = &b2 * &b4;
    let u_in = scaled(&b6, c[13]) + scaled(&b4, c[11]) + scaled(&b2, c[9]);
    let u = &bs * (&b6 * u_in + scaled(&b6, c[7]) + scaled(&b4, c[5]) + scaled(&b2, c[3]) + scaled(&ident, c[1]));
    let v_in = scaled(&b6, c[12]) + scaled(&b4, c[10]) + scaled(&b2, c[8]);
    let v = &b6 * v_in + scaled(&b6, c[6]) + scaled(&b4, c[4]) + scaled(&b2, c[2]) + scaled(&ident, c[0]);
    let mut r = pade_solve(&u, &v)?;
    for _ in 0..s {
        r = &r * &r;
    }
    check_finite(r)
}

fn pade_solve<T: Scalar>(u: &DMatrix<T>, v: &DMatrix<T>) -> Result<DMatrix<T>> {
    let num = v + u;
    let den = v - u;
    let r = den
        .lu()
        .solve(&num)
        .ok_or_else(|| Error::Range("singular Pade denominator".into()))?;
    check_finite(r)
}

fn check_finite<T: Scalar>(r: DMatrix<T>) -> Result<DMatrix<T>> {
    if r.iter().all(|x| x.modulus().is_finite()) {
        Ok(r)
    } else {
        Err(Error::Range("matrix exponential overflowed".into()))
    }
}

/// Anything that can produce the propagator `e^{tA}` on a time grid.
pub trait Evolution: Sync {
    type Scalar: Scalar;

    fn dim(&self) -> usize;

    fn propagator(&self, t: f64) -> Result<DMatrix<Self::Scalar>>;

    /// Visit `e^{t_k A}` for every grid time in order.
    fn sweep(
        &self,
        times: &[f64],
        visit: &mut dyn FnMut(usize, &DMatrix<Self::Scalar>) -> Result<()>,
    ) -> Result<()> {
        for (k, &t) in times.iter().enumerate() {
            visit(k, &self.propagator(t)?)?;
        }
        Ok(())
    }
}

/// Steps between direct re-evaluations on a uniform grid.
const REANCHOR: usize = 64;

/// Uniform spacing of a grid, if it has one.
pub fn uniform_step(times: &[f64]) -> Option<f64> {
    if times.len() < 3 {
        return None;
    }
    let n = times.len() - 1;
    let h = (times[n] - times[0]) / n as f64;
    let tol = 1e-12 * times[0].abs().max(times[n].abs()).max(1e-300);
    if h <= 0.0 {
        return None;
    }
    times
        .iter()
        .enumerate()
        .all(|(k, &t)| (t - (times[0] + k as f64 * h)).abs() <= tol)
        .then_some(h)
}

impl<T: Scalar> Evolution for DMatrix<T> {
    type Scalar = T;

    fn dim(&self) -> usize {
        self.nrows()
    }

    fn propagator(&self, t: f64) -> Result<DMatrix<T>> {
        mat_exp(self, t)
    }

    /// On a uniform grid the propagator is advanced by one-step products,
    /// re-evaluated directly every few dozen steps.
    fn sweep(
        &self,
        times: &[f64],
        visit: &mut dyn FnMut(usize, &DMatrix<T>) -> Result<()>,
    ) -> Result<()> {
        let Some(h) = uniform_step(times) else {
            for (k, &t) in times.iter().enumerate() {
                visit(k, &mat_exp(self, t)?)?;
            }
            return Ok(());
        };
        let step = mat_exp(self, h)?;
        let mut cur = mat_exp(self, times[0])?;
        for (k, &t) in times.iter().enumerate() {
            if k > 0 {
                cur = if k % REANCHOR == 0 { mat_exp(self, t)? } else { check_finite(&cur * &step)? };
            }
            visit(k, &cur)?;
        }
        Ok(())
    }
}

impl Evolution for EigenDecomposition {
    type Scalar = Complex64;

    fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(e^{t lambda}) V^-1`.
    fn propagator(&self, t: f64) -> Result<CMatrix> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, lam) in self.values.iter().enumerate() {
            let e = (lam * t).exp();
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::Range("exponential of an eigenvalue overflowed".into()));
            }
            let mut col = scaled.column_mut(k);
            col *= e;
        }
        debug_assert_eq!(scaled.ncols(), n);
        check_finite(scaled * &self.left)
    }
}

/// Eigenvalues, right eigenvectors (columns of `vectors`) and left
/// eigenvectors (rows of `left`, the inverse of `vectors`).
///
/// Ordered by decreasing real part, ties by decreasing imaginary part.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: CMatrix,
    pub left: CMatrix,
    /// Relative reconstruction error `||V L V^-1 - A||_F / ||A||_F`, or
    /// `||V V^-1 - I||_F` for a supplied basis.
    pub resid: f64,
    /// Frobenius-norm condition estimate of the eigenvector matrix.
    pub cond_v: f64,
    pub trustworthy: bool,
    /// Whether the decomposed matrix had real entries.
    pub is_real: bool,
}

/// Relative residual above which a decomposition is flagged.
pub const EIG_RESID_TOL: f64 = 1e-8;

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Left eigenvector `i` as the entries of row `i` of `V^-1`.
    pub fn left_row(&self, i: usize) -> CVector {
        self.left.row(i).transpose()
    }

    pub fn right_col(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    /// `V diag(values) V^-1`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&CVector::from_vec(self.values.clone()));
        &self.vectors * d * &self.left
    }

    /// Decomposition from a supplied eigenbasis, for matrices built as
    /// `V D V^-1` whose rounded entries no longer determine the basis well.
    ///
    /// `left` defaults to the LU inverse of `vectors`.
    pub fn from_basis(values: Vec<Complex64>, vectors: CMatrix, left: Option<CMatrix>) -> Result<Self> {
        let n = values.len();
        if vectors.shape() != (n, n) {
            return Err(Error::Input("eigenbasis shape does not match eigenvalue count".into()));
        }
        let left = match left {
            Some(l) if l.shape() == (n, n) => l,
            Some(_) => return Err(Error::Input("inverse basis has wrong shape".into())),
            None => vectors
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Unsupported("supplied eigenbasis is singular".into()))?,
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| spectral_order(values[i], values[j]));
        let values: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
        let left = CMatrix::from_fn(n, n, |r, c| left[(order[r], c)]);
        let resid = (&vectors * &left - CMatrix::identity(n, n)).norm();
        let cond_v = vectors.norm() * left.norm();
        let is_real = is_self_conjugate(&values);
        Ok(Self { values, vectors, left, resid, cond_v, trustworthy: resid <= EIG_RESID_TOL, is_real })
    }
}

fn is_self_conjugate(values: &[Complex64]) -> bool {
    values.iter().all(|z| values.iter().any(|w| (w - z.conj()).norm() <= 1e-12 * (1.0 + z.norm())))
}

fn spectral_order(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

pub fn to_complex<T: Scalar>(a: &DMatrix<T>) -> CMatrix {
    a.map(|x| Complex64::new(x.real(), x.imaginary()))
}

pub fn to_complex_vec<T: Scalar>(a: &DVector<T>) -> CVector {
    a.map(|x| Complex64::new(x.real(), x.imaginary()))
}

/// Real part of a complex matrix, failing if any imaginary part exceeds
/// `tol` times the largest modulus.
pub fn real_part(a: &CMatrix, tol: f64) -> Result<DMatrix<f64>> {
    let big = a.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if a.iter().any(|z| z.im.abs() > tol * big) {
        return Err(Error::Input("expected a real matrix".into()));
    }
    Ok(a.map(|z| z.re))
}

/// Full eigendecomposition via the complex Schur form.
///
/// For real input, eigenvalues within `1e-12 * ||A||` of the real axis are
/// snapped onto it and conjugate partners are made exact conjugates, so
/// that sums over a conjugate pair come out real.
pub fn eig_full<T: Scalar>(a: &DMatrix<T>) -> Result<EigenDecomposition> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::Input(format!("need a non-empty square matrix, got {}x{}", n, a.ncols())));
    }
    let c = to_complex(a);
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    let is_real = c.iter().all(|z| z.im == 0.0);
    let anorm = c.norm();
    if anorm == 0.0 {
        let id = CMatrix::identity(n, n);
        return Ok(EigenDecomposition {
            values: vec![Complex64::new(0.0, 0.0); n],
            vectors: id.clone(),
            left: id,
            resid: 0.0,
            cond_v: n as f64,
            trustworthy: true,
            is_real,
        });
    }
    let schur = Schur::try_new(c.clone(), f64::EPSILON, 1000 * n)
        .ok_or_else(|| Error::Range("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let mut values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let x = triangular_eigenvectors(&t);

    if is_real {
        let snap = 1e-12 * anorm;
        for v in values.iter_mut() {
            if v.im.abs() <= snap {
                v.im = 0.0;
            }
        }
    }
    let mut vectors = &q * &x;
    for k in 0..n {
        let mut col = vectors.column(k).into_owned();
        normalize_phase(&mut col);
        if is_real && values[k].im == 0.0 {
            col.iter_mut().for_each(|z| z.im = 0.0);
            let nn = col.norm();
            col /= Complex64::new(nn, 0.0);
        }
        vectors.set_column(k, &col);
    }
    if is_real {
        pair_conjugates(&mut values, &mut vectors);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| spectral_order(values[i], values[j]));
    let values: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| vectors[(r, order[k])]);
    let left = vectors
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Unsupported("eigenvector matrix is singular (defective matrix)".into()))?;
    let d = CMatrix::from_diagonal(&CVector::from_vec(values.clone()));
    let recon = &vectors * d * &left;
    let resid = (recon - &c).norm() / anorm;
    let cond_v = vectors.norm() * left.norm();
    let trustworthy = resid.is_finite() && resid <= EIG_RESID_TOL;
    Ok(EigenDecomposition { values, vectors, left, resid, cond_v, trustworthy, is_real })
}

/// Unit 2-norm, largest-modulus entry real and positive. Near-ties go to the
/// lowest index so roundoff cannot flip the choice.
pub fn normalize_phase(v: &mut CVector) {
    let nrm = v.norm();
    if nrm == 0.0 {
        return;
    }
    *v /= Complex64::new(nrm, 0.0);
    let big = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if let Some(z) = v.iter().find(|z| z.norm() >= big * (1.0 - 1e-10)).copied() {
        let rot = z.conj() / z.norm();
        *v *= rot;
    }
}

/// Eigenvectors of an upper triangular matrix by back substitution.
fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let small = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    let mut x = CMatrix::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        x[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * x[(j, k)];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            x[(i, k)] = -s / d;
        }
        let big = x.column(k).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if big > 1e100 {
            let mut col = x.column_mut(k);
            col /= Complex64::new(big, 0.0);
        }
    }
    x
}

/// Replace each eigenpair with negative imaginary part by the conjugate of
/// its closest partner with positive imaginary part.
fn pair_conjugates(values: &mut [Complex64], vectors: &mut CMatrix) {
    let n = values.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if values[i].im <= 0.0 || used[i] {
            continue;
        }
        let target = values[i].conj();
        let partner = (0..n)
            .filter(|&j| !used[j] && values[j].im < 0.0)
            .min_by(|&a, &b| (values[a] - target).norm().total_cmp(&(values[b] - target).norm()));
        if let Some(j) = partner {
            used[i] = true;
            used[j] = true;
            values[j] = target;
            let col = vectors.column(i).map(|z| z.conj());
            vectors.set_column(j, &col);
        }
    }
}
