//! Directional and worst-case condition numbers of `y(t) = e^{tA} y0` with
//! respect to the initial value, evaluated directly from the propagator.

use nalgebra::{DMatrix, DVector};

use crate::asymptotic::k_inf_worst;
use crate::error::{Error, Result};
use crate::linalg::{
    eig_full, golden_max, induced_matrix_norm, vector_norm, CVector, EigenDecomposition, Evolution, NormKind,
    Scalar,
};
use crate::spectrum::{partition_spectrum, rightmost_data, LEVEL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Directional,
    Worst,
    RelativeError,
    AbsoluteError,
    AsymptoticDirectional,
    AsymptoticWorst,
}

/// Values sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub norm: NormKind,
    pub kind: CurveKind,
}

impl ConditionCurve {
    pub fn new(times: &[f64], values: Vec<f64>, norm: NormKind, kind: CurveKind) -> Self {
        Self { times: times.to_vec(), values, norm, kind }
    }

    /// `(t, value)` at the largest value.
    pub fn max(&self) -> (f64, f64) {
        self.extreme(|a, b| a > b)
    }

    pub fn min(&self) -> (f64, f64) {
        self.extreme(|a, b| a < b)
    }

    fn extreme(&self, better: impl Fn(f64, f64) -> bool) -> (f64, f64) {
        let mut best = 0;
        for k in 1..self.values.len() {
            if better(self.values[k], self.values[best]) {
                best = k;
            }
        }
        (self.times[best], self.values[best])
    }

    /// Pointwise product with a scalar, e.g. the bound `delta(t) = K(t) eps`.
    pub fn scaled(&self, eps: f64, kind: CurveKind) -> ConditionCurve {
        ConditionCurve { values: self.values.iter().map(|v| v * eps).collect(), kind, ..self.clone() }
    }
}

/// `n` equally spaced points on `[t0, t1]`, both ends included.
pub fn uniform_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![t0],
        _ => {
            let h = (t1 - t0) / (n - 1) as f64;
            (0..n).map(|k| if k + 1 == n { t1 } else { t0 + k as f64 * h }).collect()
        }
    }
}

/// `1 / |r1|`, or 1 when the rightmost real part is zero.
pub fn characteristic_time(dec: &EigenDecomposition) -> f64 {
    let r1 = dec.values[0].re;
    let scale = dec.values.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1.0);
    if r1.abs() <= 1e-12 * scale {
        1.0
    } else {
        1.0 / r1.abs()
    }
}

/// Grid of 1000 points over fifty characteristic times.
pub fn default_grid(t_hat: f64) -> Vec<f64> {
    uniform_grid(0.0, 50.0 * t_hat, 1000)
}

/// An initial value and its perturbation, normalized into direction and size.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub y0: CVector,
    pub y0_tilde: CVector,
    /// `(y0_tilde - y0) / ||y0_tilde - y0||`.
    pub z0_hat: CVector,
    /// `||y0_tilde - y0|| / ||y0||`.
    pub epsilon: f64,
}

impl Perturbation {
    pub fn new(y0: CVector, y0_tilde: CVector, norm: NormKind) -> Result<Self> {
        if y0.len() != y0_tilde.len() {
            return Err(Error::Input("initial values differ in length".into()));
        }
        let diff = &y0_tilde - &y0;
        let dn = vector_norm(&diff, norm);
        let yn = vector_norm(&y0, norm);
        if !(dn > 0.0) || !(yn > 0.0) {
            return Err(Error::Input("need a non-zero initial value and a non-zero perturbation".into()));
        }
        Ok(Self { z0_hat: diff.unscale(dn), epsilon: dn / yn, y0, y0_tilde })
    }
}

fn unit<T: Scalar>(u: &DVector<T>, norm: NormKind, n: usize) -> Result<DVector<T>> {
    if u.len() != n {
        return Err(Error::Input(format!("vector has length {}, expected {n}", u.len())));
    }
    let nrm = vector_norm(u, norm);
    if !(nrm > 0.0) || !nrm.is_finite() {
        return Err(Error::Input("vector must be non-zero and finite".into()));
    }
    Ok(u.unscale(nrm))
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if !(den > 0.0) {
        return Err(Error::Range("solution norm underflowed to zero".into()));
    }
    Ok(num / den)
}

/// `K(t, y0, z0) = ||e^{tA} z0_hat|| / ||e^{tA} y0_hat||`.
pub fn k_directional<E: Evolution>(
    flow: &E,
    y0: &DVector<E::Scalar>,
    z0: &DVector<E::Scalar>,
    norm: NormKind,
    times: &[f64],
) -> Result<ConditionCurve> {
    let norm = norm.validate()?;
    let n = flow.dim();
    let (y, z) = (unit(y0, norm, n)?, unit(z0, norm, n)?);
    let mut values = vec![0.0; times.len()];
    flow.sweep(times, &mut |k, p| {
        values[k] = ratio(vector_norm(&(p * &z), norm), vector_norm(&(p * &y), norm))?;
        Ok(())
    })?;
    Ok(ConditionCurve::new(times, values, norm, CurveKind::Directional))
}

/// `K(t, y0) = ||e^{tA}|| / ||e^{tA} y0_hat||`.
pub fn k_worst<E: Evolution>(flow: &E, y0: &DVector<E::Scalar>, norm: NormKind, times: &[f64]) -> Result<ConditionCurve> {
    let norm = norm.validate()?;
    let y = unit(y0, norm, flow.dim())?;
    let mut values = vec![0.0; times.len()];
    flow.sweep(times, &mut |k, p| {
        values[k] = ratio(induced_matrix_norm(p, norm)?, vector_norm(&(p * &y), norm))?;
        Ok(())
    })?;
    Ok(ConditionCurve::new(times, values, norm, CurveKind::Worst))
}

/// Measured relative error `delta(t)` and absolute error `e(t)` of the
/// perturbed solution.
pub fn error_curves<E: Evolution>(
    flow: &E,
    y0: &DVector<E::Scalar>,
    y0_tilde: &DVector<E::Scalar>,
    norm: NormKind,
    times: &[f64],
) -> Result<(ConditionCurve, ConditionCurve)> {
    let norm = norm.validate()?;
    if y0.len() != flow.dim() || y0_tilde.len() != flow.dim() {
        return Err(Error::Input("initial value length does not match the matrix".into()));
    }
    let diff = y0_tilde - y0;
    let mut rel = vec![0.0; times.len()];
    let mut abs = vec![0.0; times.len()];
    flow.sweep(times, &mut |k, p| {
        abs[k] = vector_norm(&(p * &diff), norm);
        rel[k] = ratio(abs[k], vector_norm(&(p * y0), norm))?;
        Ok(())
    })?;
    Ok((
        ConditionCurve::new(times, rel, norm, CurveKind::RelativeError),
        ConditionCurve::new(times, abs, norm, CurveKind::AbsoluteError),
    ))
}

/// Componentwise relative errors of a perturbed vector against the
/// normwise one, with the ratios `||y|| / |y_l|` that bound them.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentwiseReport {
    /// `|y_tilde_l - y_l| / |y_l|` (infinite where `y_l = 0`).
    pub relative: Vec<f64>,
    /// `||y_tilde - y|| / ||y||`.
    pub normwise: f64,
    /// `||y|| / |y_l|`.
    pub ratios: Vec<f64>,
    /// `n^{1/p} ||y||_inf / |y_l|`, an upper bound on `ratios` for p-norms.
    pub inf_bounds: Vec<f64>,
    /// Whether every `relative[l] <= ratios[l] * normwise` (up to rounding).
    pub consistent: bool,
}

pub fn componentwise_errors<T: Scalar>(y: &DVector<T>, y_tilde: &DVector<T>, norm: NormKind) -> Result<ComponentwiseReport> {
    if y.len() != y_tilde.len() || y.is_empty() {
        return Err(Error::Input("vectors must be non-empty and of equal length".into()));
    }
    let yn = vector_norm(y, norm);
    if !(yn > 0.0) {
        return Err(Error::Input("reference vector is zero".into()));
    }
    let diff = y_tilde - y;
    let normwise = vector_norm(&diff, norm) / yn;
    let yinf = vector_norm(y, NormKind::PInf);
    let n = y.len() as f64;
    let p = norm.exponent();
    let nfac = if p.is_finite() { n.powf(1.0 / p) } else { 1.0 } * norm.scale(y.len());
    let mut relative = Vec::with_capacity(y.len());
    let mut ratios = Vec::with_capacity(y.len());
    let mut inf_bounds = Vec::with_capacity(y.len());
    for l in 0..y.len() {
        let m = y[l].modulus();
        relative.push(diff[l].modulus() / m);
        ratios.push(yn / m);
        inf_bounds.push(nfac * yinf / m);
    }
    let consistent = relative
        .iter()
        .zip(&ratios)
        .all(|(r, q)| !r.is_finite() || *r <= q * normwise * (1.0 + 1e-12));
    Ok(ComponentwiseReport { relative, normwise, ratios, inf_bounds, consistent })
}

/// Bounds on the largest error magnification over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthBounds {
    /// `max_t K(t, y0) eps`.
    pub e: f64,
    /// `max_t K_inf(t, y0) eps`, or why it is unavailable.
    pub e_inf: std::result::Result<f64, Error>,
}

pub fn transient_growth_bounds<T: Scalar>(
    a: &DMatrix<T>,
    y0: &DVector<T>,
    epsilon: f64,
    norm: NormKind,
    times: &[f64],
) -> Result<GrowthBounds> {
    let k = k_worst(a, y0, norm, times)?;
    let e = k.max().1 * epsilon;
    let e_inf = (|| {
        let dec = eig_full(a)?;
        let part = partition_spectrum(&dec, LEVEL_TOL);
        let rm = rightmost_data(&dec, &part, norm)?;
        let y = y0.map(|x| num_complex::Complex64::new(x.real(), x.imaginary()));
        crate::spectrum::rlge_check(&rm, &y, crate::spectrum::RLGE_TOL)?;
        Ok(k_inf_worst(&rm, &y, times)?.max().1 * epsilon)
    })();
    Ok(GrowthBounds { e, e_inf })
}

/// Largest solution norms of the exact and perturbed problems and the
/// errors made by using the perturbed one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxGrowthReport {
    pub t_max: f64,
    pub max_y: f64,
    pub t_max_tilde: f64,
    pub max_y_tilde: f64,
    /// `max ||y_tilde|| - max ||y||`.
    pub abs_err: f64,
    /// `abs_err / max ||y||`.
    pub rel_err: f64,
}

/// Maxima of `||e^{tA} y0||` and `||e^{tA} y0_tilde||` over a grid, each
/// refined by golden-section search around the best grid point.
pub fn max_growth_errors<E: Evolution>(
    flow: &E,
    y0: &DVector<E::Scalar>,
    y0_tilde: &DVector<E::Scalar>,
    norm: NormKind,
    times: &[f64],
) -> Result<MaxGrowthReport> {
    let norm = norm.validate()?;
    if times.is_empty() {
        return Err(Error::Input("empty time grid".into()));
    }
    let mut a = vec![0.0; times.len()];
    let mut b = vec![0.0; times.len()];
    flow.sweep(times, &mut |k, p| {
        a[k] = vector_norm(&(p * y0), norm);
        b[k] = vector_norm(&(p * y0_tilde), norm);
        Ok(())
    })?;
    let refine = |vals: &[f64], y: &DVector<E::Scalar>| -> (f64, f64) {
        let i = (0..vals.len()).fold(0, |m, k| if vals[k] > vals[m] { k } else { m });
        let lo = times[i.saturating_sub(1)];
        let hi = times[(i + 1).min(times.len() - 1)];
        let f = |t: f64| flow.propagator(t).map(|p| vector_norm(&(p * y), norm)).unwrap_or(f64::NAN);
        let (t, v) = golden_max(&f, lo, hi, 1e-12);
        if v > vals[i] {
            (t, v)
        } else {
            (times[i], vals[i])
        }
    };
    let (t_max, max_y) = refine(&a, y0);
    let (t_max_tilde, max_y_tilde) = refine(&b, y0_tilde);
    let abs_err = max_y_tilde - max_y;
    Ok(MaxGrowthReport { t_max, max_y, t_max_tilde, max_y_tilde, abs_err, rel_err: abs_err / max_y })
}
