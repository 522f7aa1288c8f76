//! How soon the condition numbers settle onto their asymptotic forms:
//! the sums `eps(t, u)` and `eps(t)`, the precision they guarantee, and the
//! closed-form onset-time bound.

use num_complex::Complex64;

use crate::asymptotic::{theta_mat, theta_vec};
use crate::error::{Error, Result};
use crate::linalg::{induced_matrix_norm, vector_norm, CVector, NormKind};
use crate::spectrum::{ModeData, ModeKind};

/// `G_j(t, u)` (when a vector was given) and `G_j(t)` for one level `j >= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GTerm {
    pub level: usize,
    pub g_u: Option<f64>,
    pub g: f64,
}

fn vec_theta(m: &ModeData, t: f64, u: &CVector) -> Result<f64> {
    Ok(vector_norm(&theta_vec(m, t, u)?, m.norm))
}

fn mat_theta(m: &ModeData, t: f64) -> Result<f64> {
    induced_matrix_norm(&theta_mat(m, t)?, m.norm)
}

fn pole(x: f64) -> Result<f64> {
    if x <= 1e-300 {
        Err(Error::Range("oscillating term of the rightmost level vanishes (pole of G_j)".into()))
    } else {
        Ok(x)
    }
}

/// `G_j` for every level after the first, dispatched on whether level `j`
/// and the rightmost level are real or conjugate pairs.
pub fn g_terms(modes: &[ModeData], t: f64, u: Option<&CVector>) -> Result<Vec<GTerm>> {
    let first = modes.first().ok_or_else(|| Error::Input("no levels".into()))?;
    let (d_u, d) = match first.kind {
        ModeKind::Real => (None, None),
        ModeKind::ComplexPair => {
            let du = u.map(|u| vec_theta(first, t, u).and_then(pole)).transpose()?;
            (du, Some(pole(mat_theta(first, t)?)?))
        }
    };
    modes[1..]
        .iter()
        .map(|m| {
            let (g_u, g) = match (m.kind, first.kind) {
                (ModeKind::Real, ModeKind::Real) => (u.map(|_| 1.0), 1.0),
                (ModeKind::ComplexPair, ModeKind::Real) => {
                    let gu = u.map(|u| vec_theta(m, t, u).map(|x| 2.0 * x)).transpose()?;
                    (gu, 2.0 * mat_theta(m, t)?)
                }
                (ModeKind::Real, ModeKind::ComplexPair) => (d_u.map(|x| 0.5 / x), 0.5 / d.unwrap()),
                (ModeKind::ComplexPair, ModeKind::ComplexPair) => {
                    let gu = match (u, d_u) {
                        (Some(u), Some(du)) => Some(vec_theta(m, t, u)? / du),
                        _ => None,
                    };
                    (gu, mat_theta(m, t)? / d.unwrap())
                }
            };
            Ok(GTerm { level: m.level, g_u, g })
        })
        .collect()
}

/// `a(V1, W1)`: `(1-V1)(1+W1)` if `V1 <= W1`, else `(1+V1)(1-W1)`.
pub fn a_vw(v1: f64, w1: f64) -> f64 {
    if v1 <= w1 {
        (1.0 - v1) * (1.0 + w1)
    } else {
        (1.0 + v1) * (1.0 - w1)
    }
}

/// 2-norm bounds `(G_j(t,u), G_j(t))` for a real level under a pair.
pub fn g_bounds_real_under_pair(v1: f64, w1: f64) -> (f64, f64) {
    ((0.5 / (1.0 - v1)).sqrt(), (1.0 / a_vw(v1, w1)).sqrt())
}

/// 2-norm bounds `(G_j(t,u), G_j(t))` for a pair level `j` under a pair.
pub fn g_bounds_pair_under_pair(v1: f64, w1: f64, vj: f64, wj: f64) -> (f64, f64) {
    (((1.0 + vj) / (1.0 - v1)).sqrt(), ((1.0 + wj) * (1.0 + vj) / a_vw(v1, w1)).sqrt())
}

/// Curves of the onset analysis on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OnsetReport {
    pub times: Vec<f64>,
    pub eps_y: Vec<f64>,
    pub eps_z: Option<Vec<f64>>,
    pub eps_worst: Vec<f64>,
    /// `(eps(t) + eps(t,y)) / (1 - eps(t,y))` where `eps(t,y) < 1`.
    pub precision_worst: Vec<Option<f64>>,
    /// `(eps(t,z) + eps(t,y)) / (1 - eps(t,y))` where `eps(t,y) < 1`.
    pub precision_directional: Option<Vec<Option<f64>>>,
    /// First grid time at which `precision_worst` is within the target.
    pub t_star: Option<f64>,
    /// Closed-form bound on the onset time, in absolute time units.
    pub formula_t_star: Option<f64>,
}

fn weights(modes: &[ModeData], u: &CVector) -> Result<Vec<f64>> {
    let un = vector_norm(u, modes[0].norm);
    let d = modes[0].w_hat.dot(u).norm() / un;
    if !(d > 0.0) {
        return Err(Error::Rlge { margin: d, tol: 0.0 });
    }
    Ok(modes[1..].iter().map(|m| m.w_hat.dot(u).norm() / un / d).collect())
}

/// `eps(t, y0)`, `eps(t, z0)`, `eps(t)` and the precision curves.
pub fn eps_curves(modes: &[ModeData], y0: &CVector, z0: Option<&CVector>, times: &[f64]) -> Result<OnsetReport> {
    let first = modes.first().ok_or_else(|| Error::Input("no levels".into()))?;
    if modes.iter().any(|m| !m.real_matrix) {
        return Err(Error::Unsupported("onset bounds assume a real matrix".into()))
    }
    let r1 = first.lambda.re;
    let f1 = first.f;
    let wy = weights(modes, y0)?;
    let wz = z0.map(|z| weights(modes, z)).transpose()?;
    let mut eps_y = Vec::with_capacity(times.len());
    let mut eps_z = wz.as_ref().map(|_| Vec::with_capacity(times.len()));
    let mut eps_worst = Vec::with_capacity(times.len());
    for &t in times {
        let decay: Vec<f64> = modes[1..]
            .iter()
            .map(|m| ((m.lambda.re - r1) * t).exp() * m.f / f1)
            .collect();
        let gy = g_terms(modes, t, Some(y0))?;
        let (mut sy, mut sw) = (0.0, 0.0);
        for (j, g) in gy.iter().enumerate() {
            sy += decay[j] * wy[j] * g.g_u.unwrap();
            sw += decay[j] * g.g;
        }
        eps_y.push(sy);
        eps_worst.push(sw);
        if let (Some(z), Some(wz), Some(ez)) = (z0, wz.as_ref(), eps_z.as_mut()) {
            let gz = g_terms(modes, t, Some(z))?;
            ez.push(gz.iter().enumerate().map(|(j, g)| decay[j] * wz[j] * g.g_u.unwrap()).sum());
        }
    }
    let prec = |other: &[f64]| -> Vec<Option<f64>> {
        eps_y
            .iter()
            .zip(other)
            .map(|(&ey, &eo)| (ey < 1.0).then(|| (eo + ey) / (1.0 - ey)))
            .collect()
    };
    let precision_worst = prec(&eps_worst);
    let precision_directional = eps_z.as_deref().map(prec);
    Ok(OnsetReport {
        times: times.to_vec(),
        eps_y,
        eps_z,
        eps_worst,
        precision_worst,
        precision_directional,
        t_star: None,
        formula_t_star: None,
    })
}

/// Closed-form onset bound in units of `t_hat`: the largest over `j >= 2` of
/// `(log 2 + log((2+e)/e) + log(q-1) [+ log(1/(1-V1))/2] + log(f_j/f_1)
///   + max(0, log(|w_j y| / |w_1 y|))) / ((r_1 - r_j) t_hat)`.
///
/// The bracketed term applies to a rightmost pair and needs the 2-norm.
pub fn onset_time(modes: &[ModeData], y0: &CVector, target: f64, t_hat: f64) -> Result<f64> {
    if !(target > 0.0) || !(t_hat > 0.0) {
        return Err(Error::Input("target precision and time unit must be positive".into()));
    }
    let first = modes.first().ok_or_else(|| Error::Input("no levels".into()))?;
    let q = modes.len();
    if q == 1 {
        return Ok(0.0);
    }
    let pair_term = match first.kind {
        ModeKind::Real => 0.0,
        ModeKind::ComplexPair => {
            if first.norm != NormKind::P2 {
                return Err(Error::UnsupportedNorm(
                    "onset bound for a rightmost conjugate pair is only available in the 2-norm".into(),
                ));
            }
            0.5 * (1.0 / (1.0 - overlap_v(first))).ln()
        }
    };
    let wy = weights(modes, y0)?;
    let base = 2f64.ln() + ((2.0 + target) / target).ln() + ((q - 1) as f64).ln() + pair_term;
    let r1 = first.lambda.re;
    Ok(modes[1..]
        .iter()
        .zip(&wy)
        .map(|(m, &w)| (base + (m.f / first.f).ln() + w.ln().max(0.0)) / ((r1 - m.lambda.re) * t_hat))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `|v_hat^T v_hat|` of a level normalized in the 2-norm.
pub fn overlap_v(m: &ModeData) -> f64 {
    m.v_hat.iter().map(|z| z * z).sum::<Complex64>().norm()
}

/// `|w_hat w_hat^T|` of a level normalized in the 2-norm.
pub fn overlap_w(m: &ModeData) -> f64 {
    m.w_hat.iter().map(|z| z * z).sum::<Complex64>().norm()
}

/// Curves plus the empirical and closed-form onset times for `target`.
pub fn onset_report(
    modes: &[ModeData],
    y0: &CVector,
    z0: Option<&CVector>,
    times: &[f64],
    target: f64,
    t_hat: f64,
) -> Result<OnsetReport> {
    let mut r = eps_curves(modes, y0, z0, times)?;
    r.t_star = r
        .precision_worst
        .iter()
        .zip(&r.times)
        .find(|(p, _)| p.is_some_and(|p| p <= target))
        .map(|(_, &t)| t);
    r.formula_t_star = match onset_time(modes, y0, target, t_hat) {
        Ok(x) => Some(x * t_hat),
        Err(Error::UnsupportedNorm(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(r)
}

/// First grid time from which `|K / K_inf - 1| <= target` holds for the
/// rest of the grid.
pub fn measured_onset(times: &[f64], k: &[f64], k_inf: &[f64], target: f64) -> Option<f64> {
    let mut idx = None;
    for i in (0..times.len()).rev() {
        if (k[i] / k_inf[i] - 1.0).abs() <= target {
            idx = Some(i);
        } else {
            break;
        }
    }
    idx.map(|i| times[i])
}
