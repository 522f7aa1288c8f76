//! Grouping of eigenvalues into real-part levels and the per-level data
//! (normalized eigenvectors, phases, `f_j`) used by the asymptotic analysis.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{dual_row_norm, vector_norm, CVector, EigenDecomposition, Field, NormKind};

/// Default relative tolerance for deciding equal real parts and real eigenvalues.
pub const LEVEL_TOL: f64 = 1e-9;

/// Default tolerance on the RLGE margin.
pub const RLGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelKind {
    /// One simple eigenvalue: real, or of any imaginary part when the
    /// matrix itself is complex.
    RealSimple,
    ComplexPairSimple,
    NonGeneric,
}

/// Eigenvalues sharing one real part.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub real_part: f64,
    /// Indices into the decomposition, in its order.
    pub members: Vec<usize>,
    pub kind: LevelKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPartition {
    pub levels: Vec<Level>,
    /// Absolute tolerance actually used.
    pub tol: f64,
    /// Set when some grouping or classification decision fell within a
    /// factor 100 of the tolerance.
    pub near_tolerance: bool,
}

impl SpectralPartition {
    pub fn is_generic(&self) -> bool {
        self.levels.iter().all(|l| l.kind != LevelKind::NonGeneric)
    }

    pub fn rightmost(&self) -> &Level {
        &self.levels[0]
    }
}

/// Group eigenvalues into levels of equal real part (within
/// `rel_tol * max(1, spectral radius)`) and classify each level.
///
/// Adjacent levels whose eigenvalues are close and whose eigenvectors are
/// numerically parallel are merged: that is how a defective eigenvalue shows
/// up after rounding.
pub fn partition_spectrum(dec: &EigenDecomposition, rel_tol: f64) -> SpectralPartition {
    let vals = &dec.values;
    let rho = vals.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let tol = rel_tol * rho.max(1.0);
    let mut near = false;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..vals.len() {
        match groups.last_mut() {
            Some(g) if (vals[g[0]].re - vals[i].re).abs() <= tol => {
                g.push(i);
            }
            _ => {
                if let Some(g) = groups.last() {
                    if (vals[g[0]].re - vals[i].re).abs() <= 100.0 * tol {
                        near = true;
                    }
                }
                groups.push(vec![i]);
            }
        }
    }
    let mut merged: Vec<Vec<usize>> = Vec::new();
    for g in groups {
        if let Some(prev) = merged.last_mut() {
            if looks_defective(dec, prev, &g, rho) {
                prev.extend(g);
                continue;
            }
        }
        merged.push(g);
    }
    let levels = merged
        .into_iter()
        .map(|members| {
            let (kind, close) = classify(vals, &members, tol, dec.is_real);
            near |= close;
            Level { real_part: vals[members[0]].re, members, kind }
        })
        .collect();
    SpectralPartition { levels, tol, near_tolerance: near }
}

fn looks_defective(dec: &EigenDecomposition, a: &[usize], b: &[usize], rho: f64) -> bool {
    let close = 1e-6 * rho.max(1.0);
    a.iter().any(|&i| {
        b.iter().any(|&j| {
            if (dec.values[i] - dec.values[j]).norm() > close {
                return false;
            }
            let vi = dec.vectors.column(i);
            let vj = dec.vectors.column(j);
            let cos = vi.dotc(&vj).norm() / (vi.norm() * vj.norm());
            cos > 1.0 - 1e-10
        })
    })
}

fn classify(vals: &[Complex64], members: &[usize], tol: f64, real_matrix: bool) -> (LevelKind, bool) {
    match members {
        [_] if !real_matrix => (LevelKind::RealSimple, false),
        [i] => {
            let im = vals[*i].im.abs();
            let near = im > 0.01 * tol && im <= 100.0 * tol;
            let kind = if im <= tol { LevelKind::RealSimple } else { LevelKind::NonGeneric };
            (kind, near)
        }
        [i, j] => {
            let (a, b) = (vals[*i], vals[*j]);
            let conj = (a - b.conj()).norm() <= tol;
            if conj && a.im.abs() > tol {
                (LevelKind::ComplexPairSimple, a.im.abs() <= 100.0 * tol)
            } else {
                (LevelKind::NonGeneric, false)
            }
        }
        _ => (LevelKind::NonGeneric, false),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Real,
    ComplexPair,
}

/// Data of one generic level.
///
/// For a conjugate pair the representative member is the one with positive
/// imaginary part. `w_hat` is normalized in the dual norm (over the reals for
/// a real level of a real matrix, over the complexes otherwise), `v_hat` in
/// the vector norm.
#[derive(Debug, Clone)]
pub struct ModeData {
    pub level: usize,
    pub kind: ModeKind,
    pub lambda: Complex64,
    pub omega: f64,
    pub w: CVector,
    pub v: CVector,
    pub w_hat: CVector,
    pub v_hat: CVector,
    /// `arg v_hat_k`.
    pub alpha: Vec<f64>,
    /// `arg w_hat_l`.
    pub beta: Vec<f64>,
    /// `||w|| ||v||`.
    pub f: f64,
    pub norm: NormKind,
    /// Whether the underlying matrix was real.
    pub real_matrix: bool,
}

/// Data of the rightmost level.
pub type RightmostData = ModeData;

/// Mode data of level `j`; fails on a non-generic level.
pub fn mode_data(dec: &EigenDecomposition, part: &SpectralPartition, j: usize, norm: NormKind) -> Result<ModeData> {
    let norm = norm.validate()?;
    let level = part
        .levels
        .get(j)
        .ok_or_else(|| Error::Input(format!("level {j} out of range")))?;
    let (kind, idx) = match level.kind {
        LevelKind::RealSimple => (ModeKind::Real, level.members[0]),
        LevelKind::ComplexPairSimple => {
            let (a, b) = (level.members[0], level.members[1]);
            (ModeKind::ComplexPair, if dec.values[a].im > 0.0 { a } else { b })
        }
        LevelKind::NonGeneric => {
            return Err(Error::Unsupported(format!(
                "level {j} (real part {:.6e}) is not a simple real eigenvalue or a simple conjugate pair",
                level.real_part
            )))
        }
    };
    let field = if kind == ModeKind::Real && dec.is_real { Field::Real } else { Field::Complex };
    let w = dec.left_row(idx);
    let v = dec.right_col(idx);
    let wn = dual_row_norm(&w, norm, field);
    let vn = vector_norm(&v, norm);
    if !(wn > 0.0 && vn > 0.0) || !(wn * vn).is_finite() {
        return Err(Error::Range(format!("degenerate eigenvector normalization on level {j}")));
    }
    let w_hat = w.unscale(wn);
    let v_hat = v.unscale(vn);
    let lambda = dec.values[idx];
    Ok(ModeData {
        level: j,
        kind,
        lambda,
        omega: if kind == ModeKind::Real { 0.0 } else { lambda.im },
        alpha: v_hat.iter().map(|z| z.arg()).collect(),
        beta: w_hat.iter().map(|z| z.arg()).collect(),
        w,
        v,
        w_hat,
        v_hat,
        f: wn * vn,
        norm,
        real_matrix: dec.is_real,
    })
}

/// Mode data of the rightmost level.
pub fn rightmost_data(dec: &EigenDecomposition, part: &SpectralPartition, norm: NormKind) -> Result<RightmostData> {
    mode_data(dec, part, 0, norm)
}

/// Mode data of every level; fails unless the partition is generic.
pub fn all_modes(dec: &EigenDecomposition, part: &SpectralPartition, norm: NormKind) -> Result<Vec<ModeData>> {
    (0..part.levels.len()).map(|j| mode_data(dec, part, j, norm)).collect()
}

/// `f_j = ||w^(j)|| ||v^(j)||` for every level.
pub fn f_values(dec: &EigenDecomposition, part: &SpectralPartition, norm: NormKind) -> Result<Vec<f64>> {
    Ok(all_modes(dec, part, norm)?.into_iter().map(|m| m.f).collect())
}

/// `|w_hat u_hat|`, the size of the component of `u` along the left
/// eigenvector of a mode.
pub fn component(mode: &ModeData, u: &CVector) -> Result<f64> {
    let un = vector_norm(u, mode.norm);
    if !(un > 0.0) || !un.is_finite() {
        return Err(Error::Input("vector must be non-zero and finite".into()));
    }
    Ok(mode.w_hat.dot(u).norm() / un)
}

/// RLGE margin `|w_hat^(1) u_hat|`; errors when it is at or below `tol`.
pub fn rlge_check(rm: &RightmostData, u: &CVector, tol: f64) -> Result<f64> {
    let margin = component(rm, u)?;
    if margin <= tol {
        Err(Error::Rlge { margin, tol })
    } else {
        Ok(margin)
    }
}
