//! Long-time limits of the condition numbers.
//!
//! Two independent routes are provided. The operator route evaluates the
//! leading term `Q1(t)` of `e^{-r1 t} e^{tA}` directly and works for any
//! rightmost structure, including a supplied Jordan basis. The closed-form
//! route uses the normalized rightmost eigenvectors: a constant for a real
//! rightmost eigenvalue, and an oscillating-term factor times a constant
//! for a conjugate pair, with an extra Euclidean closed form for the 2-norm.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::condition::{ConditionCurve, CurveKind};
use crate::error::{Error, Result};
use crate::linalg::{golden_max, induced_matrix_norm, vector_norm, CMatrix, CVector, EigenDecomposition, NormKind};
use crate::spectrum::{LevelKind, ModeData, ModeKind, RightmostData, SpectralPartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Q1Kind {
    Real,
    OscillatingPair,
    JordanSupplied,
}

/// `Q1(t) = sum_i e^{i omega_i t} v_i w_i` over the rightmost terms.
#[derive(Debug, Clone)]
pub struct Q1Operator {
    pub kind: Q1Kind,
    pub terms: Vec<Q1Term>,
}

#[derive(Debug, Clone)]
pub struct Q1Term {
    pub omega: f64,
    pub v: CVector,
    pub w: CVector,
}

/// Leading operator from a diagonalizable decomposition with a generic
/// rightmost level.
pub fn q1_build(dec: &EigenDecomposition, part: &SpectralPartition) -> Result<Q1Operator> {
    let level = part.rightmost();
    let kind = match level.kind {
        LevelKind::RealSimple => Q1Kind::Real,
        LevelKind::ComplexPairSimple => Q1Kind::OscillatingPair,
        LevelKind::NonGeneric => {
            return Err(Error::Unsupported(
                "rightmost level is not generic; supply a Jordan structure instead".into(),
            ))
        }
    };
    let terms = level
        .members
        .iter()
        .map(|&i| Q1Term { omega: dec.values[i].im, v: dec.right_col(i), w: dec.left_row(i) })
        .collect();
    Ok(Q1Operator { kind, terms })
}

/// Leading operator of a rightmost level with repeated eigenvalues, taken
/// as semisimple: every chain has length one. Only meaningful when the
/// eigenvector matrix is well conditioned.
pub fn q1_build_semisimple(dec: &EigenDecomposition, part: &SpectralPartition) -> Q1Operator {
    let level = part.rightmost();
    let kind = if level.members.iter().all(|&i| dec.values[i].im == 0.0) {
        Q1Kind::Real
    } else {
        Q1Kind::OscillatingPair
    };
    let terms = level
        .members
        .iter()
        .map(|&i| Q1Term { omega: dec.values[i].im, v: dec.right_col(i), w: dec.left_row(i) })
        .collect();
    Q1Operator { kind, terms }
}

impl Q1Operator {
    pub fn dim(&self) -> usize {
        self.terms.first().map_or(0, |t| t.v.len())
    }
}

pub fn q1_eval(op: &Q1Operator, t: f64) -> CMatrix {
    let n = op.dim();
    let mut m = CMatrix::zeros(n, n);
    for term in &op.terms {
        let ph = Complex64::from_polar(1.0, term.omega * t);
        m += (&term.v * ph) * term.w.transpose();
    }
    m
}

pub fn q1_apply(op: &Q1Operator, t: f64, u: &CVector) -> CVector {
    let mut out = CVector::zeros(op.dim());
    for term in &op.terms {
        out += &term.v * (Complex64::from_polar(1.0, term.omega * t) * term.w.dot(u));
    }
    out
}

fn unit(u: &CVector, norm: NormKind) -> Result<CVector> {
    let n = vector_norm(u, norm);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Input("vector must be non-zero and finite".into()));
    }
    Ok(u.unscale(n))
}

/// Relative size below which `Q1(t) y_hat` counts as zero.
const Q1_ZERO: f64 = 1e-12;

fn q1_denominator(op: &Q1Operator, t: f64, y: &CVector, norm: NormKind) -> Result<f64> {
    let d = vector_norm(&q1_apply(op, t, y), norm);
    let scale = op.terms.iter().map(|s| vector_norm(&s.v, norm) * s.w.norm()).sum::<f64>();
    if d <= Q1_ZERO * scale {
        return Err(Error::Rlge { margin: d / scale.max(f64::MIN_POSITIVE), tol: Q1_ZERO });
    }
    Ok(d)
}

/// `||Q1(t) z_hat|| / ||Q1(t) y_hat||` on a grid.
pub fn k_inf_directional_q1(
    op: &Q1Operator,
    y0: &CVector,
    z0: &CVector,
    norm: NormKind,
    times: &[f64],
) -> Result<ConditionCurve> {
    let norm = norm.validate()?;
    let (y, z) = (unit(y0, norm)?, unit(z0, norm)?);
    let values = times
        .iter()
        .map(|&t| Ok(vector_norm(&q1_apply(op, t, &z), norm) / q1_denominator(op, t, &y, norm)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ConditionCurve::new(times, values, norm, CurveKind::AsymptoticDirectional))
}

/// `||Q1(t)|| / ||Q1(t) y_hat||` on a grid.
pub fn k_inf_worst_q1(op: &Q1Operator, y0: &CVector, norm: NormKind, times: &[f64]) -> Result<ConditionCurve> {
    let norm = norm.validate()?;
    let y = unit(y0, norm)?;
    let values = times
        .iter()
        .map(|&t| Ok(induced_matrix_norm(&q1_eval(op, t), norm)? / q1_denominator(op, t, &y, norm)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ConditionCurve::new(times, values, norm, CurveKind::AsymptoticWorst))
}

fn require_pair(rm: &ModeData) -> Result<()> {
    if rm.kind != ModeKind::ComplexPair {
        return Err(Error::Input("oscillating terms need a conjugate-pair level".into()));
    }
    if !rm.real_matrix {
        return Err(Error::Unsupported("oscillating-term forms assume a real matrix".into()));
    }
    Ok(())
}

/// `Theta_hat(t, u)_k = |v_hat_k| cos(omega t + alpha_k + gamma(u))`, with
/// `gamma(u) = arg(w_hat u)`.
pub fn theta_vec(rm: &ModeData, t: f64, u: &CVector) -> Result<DVector<f64>> {
    require_pair(rm)?;
    let s = rm.w_hat.dot(u);
    if s.norm() == 0.0 {
        return Err(Error::Rlge { margin: 0.0, tol: 0.0 });
    }
    let ph = Complex64::from_polar(1.0, rm.omega * t + s.arg());
    Ok(rm.v_hat.map(|z| (z * ph).re))
}

/// `Theta_hat_1(t)_kl = |v_hat_k| |w_hat_l| cos(omega t + alpha_k + beta_l)`.
pub fn theta_mat(rm: &ModeData, t: f64) -> Result<DMatrix<f64>> {
    require_pair(rm)?;
    let ph = Complex64::from_polar(1.0, rm.omega * t);
    let n = rm.v_hat.len();
    Ok(DMatrix::from_fn(n, n, |k, l| (ph * rm.v_hat[k] * rm.w_hat[l]).re))
}

/// Oscillating-term factor of the directional limit at one time.
pub fn ot_directional(rm: &ModeData, t: f64, y0: &CVector, z0: &CVector) -> Result<f64> {
    let num = vector_norm(&theta_vec(rm, t, z0)?, rm.norm);
    let den = vector_norm(&theta_vec(rm, t, y0)?, rm.norm);
    pole_checked(num, den)
}

/// Oscillating-term factor of the worst-case limit at one time.
pub fn ot_worst(rm: &ModeData, t: f64, y0: &CVector) -> Result<f64> {
    let num = induced_matrix_norm(&theta_mat(rm, t)?, rm.norm)?;
    let den = vector_norm(&theta_vec(rm, t, y0)?, rm.norm);
    pole_checked(num, den)
}

fn pole_checked(num: f64, den: f64) -> Result<f64> {
    if den <= 1e-300 || !(num / den).is_finite() {
        return Err(Error::Range("oscillating-term denominator vanishes".into()));
    }
    Ok(num / den)
}

/// `|w_hat z_hat| / |w_hat y_hat|`.
pub fn osf_directional(rm: &ModeData, y0: &CVector, z0: &CVector) -> Result<f64> {
    let (y, z) = (unit(y0, rm.norm)?, unit(z0, rm.norm)?);
    let den = rm.w_hat.dot(&y).norm();
    if den == 0.0 {
        return Err(Error::Rlge { margin: 0.0, tol: 0.0 });
    }
    Ok(rm.w_hat.dot(&z).norm() / den)
}

/// `1 / |w_hat y_hat|`.
pub fn osf_worst(rm: &ModeData, y0: &CVector) -> Result<f64> {
    let y = unit(y0, rm.norm)?;
    let den = rm.w_hat.dot(&y).norm();
    if den == 0.0 {
        return Err(Error::Rlge { margin: 0.0, tol: 0.0 });
    }
    Ok(1.0 / den)
}

/// Directional limit on a grid: constant for a real rightmost eigenvalue,
/// OSF times OT for a pair.
pub fn k_inf_directional(rm: &RightmostData, y0: &CVector, z0: &CVector, times: &[f64]) -> Result<ConditionCurve> {
    let osf = osf_directional(rm, y0, z0)?;
    let values = match rm.kind {
        ModeKind::Real => vec![osf; times.len()],
        ModeKind::ComplexPair => times
            .iter()
            .map(|&t| Ok(osf * ot_directional(rm, t, y0, z0)?))
            .collect::<Result<_>>()?,
    };
    Ok(ConditionCurve::new(times, values, rm.norm, CurveKind::AsymptoticDirectional))
}

/// Worst-case limit on a grid.
pub fn k_inf_worst(rm: &RightmostData, y0: &CVector, times: &[f64]) -> Result<ConditionCurve> {
    let osf = osf_worst(rm, y0)?;
    let values = match rm.kind {
        ModeKind::Real => vec![osf; times.len()],
        ModeKind::ComplexPair => times.iter().map(|&t| Ok(osf * ot_worst(rm, t, y0)?)).collect::<Result<_>>()?,
    };
    Ok(ConditionCurve::new(times, values, rm.norm, CurveKind::AsymptoticWorst))
}

/// Minimum and maximum of the oscillating-term factor over one period
/// `pi / omega`, worst case when `z0` is `None`.
pub fn ot_extrema(rm: &RightmostData, y0: &CVector, z0: Option<&CVector>) -> Result<(f64, f64)> {
    require_pair(rm)?;
    let period = PI / rm.omega.abs();
    let f = |t: f64| -> Result<f64> {
        match z0 {
            Some(z) => ot_directional(rm, t, y0, z),
            None => ot_worst(rm, t, y0),
        }
    };
    let samples = 720;
    let h = period / samples as f64;
    let vals = (0..samples).map(|k| f(k as f64 * h)).collect::<Result<Vec<f64>>>()?;
    let imax = argbest(&vals, |a, b| a > b);
    let imin = argbest(&vals, |a, b| a < b);
    let safe = |t: f64| f(t).unwrap_or(f64::NAN);
    let (_, hi) = golden_max(&|t| safe(t), (imax as f64 - 1.0) * h, (imax as f64 + 1.0) * h, 1e-13);
    let (_, lo) = golden_max(&|t| -safe(t), (imin as f64 - 1.0) * h, (imin as f64 + 1.0) * h, 1e-13);
    Ok((vals[imin].min(-lo), vals[imax].max(hi)))
}

fn argbest(v: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if better(x, v[best]) {
            best = i;
        }
    }
    best
}

/// 2-norm geometry of a conjugate-pair rightmost level.
///
/// `r1 = [Re w_hat; Im w_hat]` maps the unit sphere onto an ellipse with
/// semi-axes `sigma1 >= mu1` along `alpha1`, `beta1`.
#[derive(Debug, Clone)]
pub struct EuclidGeometry {
    /// `|v_hat^T v_hat|` (plain transpose).
    pub v1: f64,
    /// `|w_hat w_hat^T|`.
    pub w1: f64,
    /// `arg(v_hat^T v_hat)`.
    pub phi_v: f64,
    /// `arg(w_hat w_hat^T)`.
    pub psi_w: f64,
    pub r1: DMatrix<f64>,
    pub sigma1: f64,
    pub mu1: f64,
    pub alpha1: Vector2<f64>,
    pub beta1: Vector2<f64>,
    pub right_sv1: DVector<f64>,
    pub right_sv2: DVector<f64>,
    /// Angle of the major semi-axis in `(-pi/2, pi/2]`.
    pub theta1: f64,
    pub omega: f64,
}

pub fn euclid_geometry(rm: &RightmostData) -> Result<EuclidGeometry> {
    require_pair(rm)?;
    if rm.norm != NormKind::P2 {
        return Err(Error::Input("Euclidean geometry needs the 2-norm".into()));
    }
    let n = rm.w_hat.len();
    let sv = rm.v_hat.dot(&rm.v_hat);
    let sw = rm.w_hat.dot(&rm.w_hat);
    let r1 = DMatrix::from_fn(2, n, |i, l| if i == 0 { rm.w_hat[l].re } else { rm.w_hat[l].im });
    let g = &r1 * r1.transpose();
    let g = Matrix2::new(g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let tr = 0.5 * (g[(0, 0)] + g[(1, 1)]);
    let disc = (0.25 * (g[(0, 0)] - g[(1, 1)]).powi(2) + g[(0, 1)].powi(2)).sqrt();
    let (l1, l2) = (tr + disc, (tr - disc).max(0.0));
    let mut theta1 = 0.5 * (2.0 * g[(0, 1)]).atan2(g[(0, 0)] - g[(1, 1)]);
    if theta1 <= -PI / 2.0 {
        theta1 += PI;
    }
    let alpha1 = Vector2::new(theta1.cos(), theta1.sin());
    let beta1 = Vector2::new(-theta1.sin(), theta1.cos());
    let (sigma1, mu1) = (l1.sqrt(), l2.sqrt());
    if mu1 <= 0.0 {
        return Err(Error::Range("degenerate ellipse: W1 = 1".into()));
    }
    let right_sv1 = r1.transpose() * DVector::from_column_slice(alpha1.as_slice()) / sigma1;
    let right_sv2 = r1.transpose() * DVector::from_column_slice(beta1.as_slice()) / mu1;
    Ok(EuclidGeometry {
        v1: sv.norm(),
        w1: sw.norm(),
        phi_v: sv.arg(),
        psi_w: sw.arg(),
        r1,
        sigma1,
        mu1,
        alpha1,
        beta1,
        right_sv1,
        right_sv2,
        theta1,
        omega: rm.omega,
    })
}

impl EuclidGeometry {
    /// Components `(c1, d1)` of a real unit vector along the two right
    /// singular vectors of `r1`.
    pub fn components(&self, u: &CVector) -> Result<(f64, f64)> {
        let u = unit(u, NormKind::P2)?;
        let re = u.map(|z| z.re);
        Ok((self.right_sv1.dot(&re), self.right_sv2.dot(&re)))
    }

    /// `sqrt(2 / ((1+W1) c1^2 + (1-W1) d1^2))`.
    pub fn osf_worst(&self, y0: &CVector) -> Result<f64> {
        let (c, d) = self.components(y0)?;
        let den = (1.0 + self.w1) * c * c + (1.0 - self.w1) * d * d;
        if den <= 0.0 {
            return Err(Error::Rlge { margin: 0.0, tol: 0.0 });
        }
        Ok((2.0 / den).sqrt())
    }

    /// `(1+W1) c_y c_z + (1-W1) d_y d_z`; zero when the directional limit vanishes.
    pub fn directional_orthogonality(&self, y0: &CVector, z0: &CVector) -> Result<f64> {
        let (cy, dy) = self.components(y0)?;
        let (cz, dz) = self.components(z0)?;
        Ok((1.0 + self.w1) * cy * cz + (1.0 - self.w1) * dy * dz)
    }

    /// `||Theta_hat(t, u)||_2 = sqrt((1 + V1 cos(2 omega t + 2 gamma + phi_v)) / 2)`.
    pub fn theta_vec_norm(&self, rm: &ModeData, t: f64, u: &CVector) -> f64 {
        let gamma = rm.w_hat.dot(u).arg();
        (0.5 * (1.0 + self.v1 * (2.0 * self.omega * t + 2.0 * gamma + self.phi_v).cos())).max(0.0).sqrt()
    }

    /// `||Theta_hat_1(t)||_2` from the largest eigenvalue of a product of
    /// two 2x2 Gram matrices.
    pub fn theta_mat_norm(&self, t: f64) -> f64 {
        let (v, w) = (self.v1, self.w1);
        let h = 0.25 * (1.0 + v * w * (2.0 * self.omega * t + self.phi_v + self.psi_w).cos());
        let det = (1.0 - v * v) * (1.0 - w * w) / 16.0;
        (h + (h * h - det).max(0.0).sqrt()).sqrt()
    }

    pub fn ot_worst(&self, rm: &ModeData, t: f64, y0: &CVector) -> Result<f64> {
        pole_checked(self.theta_mat_norm(t), self.theta_vec_norm(rm, t, y0))
    }

    pub fn ot_directional(&self, rm: &ModeData, t: f64, y0: &CVector, z0: &CVector) -> Result<f64> {
        pole_checked(self.theta_vec_norm(rm, t, z0), self.theta_vec_norm(rm, t, y0))
    }
}

/// Worst-case limit from the Euclidean closed forms only.
pub fn k_inf_worst_euclid(rm: &RightmostData, geom: &EuclidGeometry, y0: &CVector, times: &[f64]) -> Result<ConditionCurve> {
    let osf = geom.osf_worst(y0)?;
    let values = times.iter().map(|&t| Ok(osf * geom.ot_worst(rm, t, y0)?)).collect::<Result<_>>()?;
    Ok(ConditionCurve::new(times, values, NormKind::P2, CurveKind::AsymptoticWorst))
}

/// Directional limit from the Euclidean closed forms only.
pub fn k_inf_directional_euclid(
    rm: &RightmostData,
    geom: &EuclidGeometry,
    y0: &CVector,
    z0: &CVector,
    times: &[f64],
) -> Result<ConditionCurve> {
    let osf = osf_directional(rm, y0, z0)?;
    let values = times
        .iter()
        .map(|&t| Ok(osf * geom.ot_directional(rm, t, y0, z0)?))
        .collect::<Result<_>>()?;
    Ok(ConditionCurve::new(times, values, NormKind::P2, CurveKind::AsymptoticDirectional))
}

/// Bounds on the oscillating-term factors in the 2-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtBounds {
    pub directional_lower: f64,
    pub directional_upper: f64,
    /// `a(V1, W1)`, the lower bound of the worst-case factor.
    pub a_min: f64,
    /// Upper bound of the worst-case factor.
    pub a_max: f64,
}

pub fn ot_bounds(v1: f64, w1: f64) -> OtBounds {
    let r = ((1.0 + v1) / (1.0 - v1)).sqrt();
    let a_min = if v1 <= w1 {
        ((1.0 + w1) * (1.0 - v1) / (2.0 * (1.0 + v1))).sqrt()
    } else {
        ((1.0 - w1) / 2.0).sqrt()
    };
    OtBounds {
        directional_lower: 1.0 / r,
        directional_upper: r,
        a_min,
        a_max: ((1.0 + w1) * (1.0 + v1) / (2.0 * (1.0 - v1))).sqrt(),
    }
}

/// `sqrt(2 / (1 - V1))`, the factor bounding how far the worst-case limit
/// can exceed the smallest possible OSF.
pub fn k_factor(v1: f64) -> f64 {
    (2.0 / (1.0 - v1)).sqrt()
}
