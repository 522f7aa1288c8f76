//! Preset scenarios: the worked examples with their published constants,
//! plus the Jordan-basis path for a defective matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::asymptotic::{
    k_inf_directional, k_inf_worst, k_inf_worst_q1, osf_worst, ot_bounds, ot_extrema, Q1Kind, Q1Operator, Q1Term,
};
use crate::condition::{characteristic_time, error_curves, k_worst, uniform_grid, Perturbation};
use crate::error::{Error, Result};
use crate::linalg::{
    dual_row_norm, eig_full, to_complex, to_complex_vec, vector_norm, CMatrix, CVector, EigenDecomposition,
    Evolution, Field, NormKind,
};
use crate::onset::{measured_onset, onset_time, overlap_v, overlap_w};
use crate::spectrum::{all_modes, partition_spectrum, rightmost_data, ModeData, LEVEL_TOL, RLGE_TOL};

pub const PRESET_NAMES: [&str; 7] =
    ["gdp-nd", "building-heating", "wall-model", "magnetic", "hilbert", "oscillating", "jordan"];

pub fn preset_names() -> &'static [&'static str] {
    &PRESET_NAMES
}

/// Acceptance rule for one reference quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// `|x - value| <= tol`, or `<= tol * |value|` when `relative`.
    Approx { value: f64, tol: f64, relative: bool },
    Within { lo: f64, hi: f64 },
}

impl Target {
    pub fn rel(value: f64, tol: f64) -> Self {
        Target::Approx { value, tol, relative: true }
    }

    pub fn abs(value: f64, tol: f64) -> Self {
        Target::Approx { value, tol, relative: false }
    }

    pub fn accepts(&self, x: f64) -> bool {
        match *self {
            Target::Approx { value, tol, relative } => {
                let allowed = if relative { tol * value.abs() } else { tol };
                (x - value).abs() <= allowed
            }
            Target::Within { lo, hi } => (lo..=hi).contains(&x),
        }
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Target::Approx { value, tol, relative: true } => write!(f, "{value} (rel {tol:e})"),
            Target::Approx { value, tol, relative: false } => write!(f, "{value} (abs {tol:e})"),
            Target::Within { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub id: &'static str,
    pub target: Target,
}

fn exp(id: &'static str, target: Target) -> Expected {
    Expected { id, target }
}

/// One Jordan block of a supplied Jordan basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: Complex64,
    pub len: usize,
}

/// Jordan basis `V` (chains as consecutive columns, each chain starting with
/// its eigenvector) with `A V = V J`, `J` upper bidiagonal.
#[derive(Debug, Clone)]
pub struct JordanStructure {
    pub v: CMatrix,
    pub v_inv: CMatrix,
    pub blocks: Vec<JordanBlock>,
}

impl JordanStructure {
    pub fn new(v: CMatrix, blocks: Vec<JordanBlock>) -> Result<Self> {
        let n = v.nrows();
        if v.ncols() != n {
            return Err(Error::Input("Jordan basis must be square".into()));
        }
        if blocks.iter().any(|b| b.len == 0) || blocks.iter().map(|b| b.len).sum::<usize>() != n {
            return Err(Error::Input(format!("chain lengths must be positive and sum to {n}")));
        }
        let v_inv = v.clone().try_inverse().ok_or_else(|| Error::Input("Jordan basis is singular".into()))?;
        Ok(Self { v, v_inv, blocks })
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    /// Column index of the first vector of each chain.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let o = *acc;
                *acc += b.len;
                Some(o)
            })
            .collect()
    }

    pub fn jordan_form(&self) -> CMatrix {
        let n = self.dim();
        let mut j = CMatrix::zeros(n, n);
        for (b, o) in self.blocks.iter().zip(self.offsets()) {
            for k in 0..b.len {
                j[(o + k, o + k)] = b.eigenvalue;
                if k + 1 < b.len {
                    j[(o + k, o + k + 1)] = Complex64::new(1.0, 0.0);
                }
            }
        }
        j
    }

    /// `V J V^-1`.
    pub fn reconstruct(&self) -> CMatrix {
        &self.v * self.jordan_form() * &self.v_inv
    }

    /// Largest real part among the blocks.
    pub fn rightmost_real_part(&self) -> f64 {
        self.blocks.iter().map(|b| b.eigenvalue.re).fold(f64::NEG_INFINITY, f64::max)
    }

    fn is_rightmost(&self, b: &JordanBlock) -> bool {
        let r1 = self.rightmost_real_part();
        (b.eigenvalue.re - r1).abs() <= LEVEL_TOL * r1.abs().max(1.0)
    }

    /// Longest chain among the rightmost blocks.
    pub fn m1(&self) -> usize {
        self.blocks.iter().filter(|b| self.is_rightmost(b)).map(|b| b.len).max().unwrap_or(0)
    }

    /// `(v^(i,j,1), w^(i,j,M1), omega_i)` for every rightmost chain of length `M1`.
    pub fn leading_chains(&self) -> Vec<(CVector, CVector, f64)> {
        let m1 = self.m1();
        self.blocks
            .iter()
            .zip(self.offsets())
            .filter(|(b, _)| self.is_rightmost(b) && b.len == m1)
            .map(|(b, o)| {
                let v = self.v.column(o).into_owned();
                let w = self.v_inv.row(o + m1 - 1).transpose();
                (v, w, b.eigenvalue.im)
            })
            .collect()
    }

    /// `A x - lambda x - x_prev` summed over every chain vector, relative to `||A||`.
    pub fn chain_residual(&self, a: &CMatrix) -> f64 {
        let mut worst = 0.0f64;
        for (b, o) in self.blocks.iter().zip(self.offsets()) {
            for k in 0..b.len {
                let x = self.v.column(o + k);
                let mut r = a * x - x * b.eigenvalue;
                if k > 0 {
                    r -= self.v.column(o + k - 1);
                }
                worst = worst.max(r.norm() / x.norm());
            }
        }
        worst / a.norm().max(1.0)
    }
}

/// Leading operator `Q1(t) = sum e^{i omega t} v^(i,j,1) w^(i,j,M1)` over the
/// rightmost chains of maximal length.
pub fn jordan_q1(js: &JordanStructure) -> Result<Q1Operator> {
    let terms: Vec<Q1Term> =
        js.leading_chains().into_iter().map(|(v, w, omega)| Q1Term { omega, v, w }).collect();
    if terms.is_empty() {
        return Err(Error::Input("no rightmost chain".into()));
    }
    Ok(Q1Operator { kind: Q1Kind::JordanSupplied, terms })
}

/// Largest `|w^(i,j,M1) u| / (||w|| ||u||)` over the leading chains; the
/// RLGE condition holds when this exceeds `tol`.
pub fn jordan_rlge_margin(js: &JordanStructure, u: &CVector, norm: NormKind, tol: f64) -> Result<f64> {
    let un = vector_norm(u, norm);
    if !(un > 0.0) {
        return Err(Error::Input("vector must be non-zero".into()));
    }
    let margin = js
        .leading_chains()
        .iter()
        .map(|(_, w, _)| w.dot(u).norm() / (dual_row_norm(w, norm, Field::Complex) * un))
        .fold(0.0, f64::max);
    if margin <= tol {
        Err(Error::Rlge { margin, tol })
    } else {
        Ok(margin)
    }
}

/// Three-room heating system `x' = A x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatingSystem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    /// Equilibrium `-A^-1 b`.
    pub x_eq: DVector<f64>,
}

/// `k = [k_g1, k_a2, k_a3, k_12, k_23]`, ground and outside temperatures
/// `xg`, `xa`, heat sources `f`.
pub fn building_heating_assemble(k: [f64; 5], xg: f64, xa: f64, f: [f64; 3]) -> Result<HeatingSystem> {
    if k.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Input("heat transfer coefficients must be positive".into()));
    }
    let [kg1, ka2, ka3, k12, k23] = k;
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(3, 3, &[
        -kg1 - k12, k12, 0.0,
        k12, -ka2 - k12 - k23, k23,
        0.0, k23, -ka3 - k23,
    ]);
    let b = DVector::from_vec(vec![kg1 * xg + f[0], ka2 * xa + f[1], ka3 * xa + f[2]]);
    let x_eq = -a.clone().lu().solve(&b).ok_or_else(|| Error::Range("singular heating matrix".into()))?;
    Ok(HeatingSystem { a, b, x_eq })
}

/// Order-`n` Hilbert matrix.
pub fn hilbert(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64)
}

/// Propagator source: the dense matrix or a supplied eigenbasis.
#[derive(Debug, Clone)]
pub enum Flow {
    Dense(CMatrix),
    Spectral(EigenDecomposition),
}

impl Evolution for Flow {
    type Scalar = Complex64;

    fn dim(&self) -> usize {
        match self {
            Flow::Dense(a) => a.nrows(),
            Flow::Spectral(d) => d.dim(),
        }
    }

    fn propagator(&self, t: f64) -> Result<CMatrix> {
        match self {
            Flow::Dense(a) => a.propagator(t),
            Flow::Spectral(d) => d.propagator(t),
        }
    }

    fn sweep(&self, times: &[f64], visit: &mut dyn FnMut(usize, &CMatrix) -> Result<()>) -> Result<()> {
        match self {
            Flow::Dense(a) => a.sweep(times, visit),
            Flow::Spectral(d) => d.sweep(times, visit),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    pub a: DMatrix<f64>,
    /// Eigenbasis to use instead of decomposing `a`.
    pub basis: Option<EigenDecomposition>,
    pub jordan: Option<JordanStructure>,
    /// Initial values; the first is the primary one.
    pub y0: Vec<DVector<f64>>,
    pub y0_tilde: Option<DVector<f64>>,
    pub z0: Option<DVector<f64>>,
    pub norm: NormKind,
    pub horizon: f64,
    pub t_hat: f64,
    pub expected: Vec<Expected>,
}

impl Scenario {
    pub fn flow(&self) -> Flow {
        match &self.basis {
            Some(d) => Flow::Spectral(d.clone()),
            None => Flow::Dense(to_complex(&self.a)),
        }
    }

    pub fn decomposition(&self) -> Result<EigenDecomposition> {
        match &self.basis {
            Some(d) => Ok(d.clone()),
            None => eig_full(&self.a),
        }
    }

    /// Direction `z0_hat`: given explicitly, or from the perturbed initial value.
    pub fn direction(&self) -> Result<Option<CVector>> {
        if let Some(z) = &self.z0 {
            return Ok(Some(to_complex_vec(z)));
        }
        match &self.y0_tilde {
            Some(yt) => Ok(Some(Perturbation::new(cv(&self.y0[0]), to_complex_vec(yt), self.norm)?.z0_hat)),
            None => Ok(None),
        }
    }

    pub fn grid(&self, points: usize) -> Vec<f64> {
        uniform_grid(0.0, self.horizon, points)
    }
}

fn cv(x: &DVector<f64>) -> CVector {
    to_complex_vec(x)
}

fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

fn m(n: usize, x: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, x)
}

fn t_hat_of(a: &DMatrix<f64>) -> Result<f64> {
    Ok(characteristic_time(&eig_full(a)?))
}

pub fn preset(name: &str) -> Result<Scenario> {
    match name {
        "gdp-nd" => gdp_nd(),
        "building-heating" => building_heating(),
        "wall-model" => wall_model(),
        "magnetic" => magnetic(),
        "hilbert" => hilbert_preset(),
        "oscillating" => oscillating(),
        "jordan" => jordan(),
        _ => Err(Error::Input(format!("unknown preset '{name}'; known: {}", PRESET_NAMES.join(", ")))),
    }
}

fn gdp_nd() -> Result<Scenario> {
    let a = m(2, &[0.08, -0.07, 0.03, -0.02]);
    Ok(Scenario {
        name: "gdp-nd",
        description: "GDP and national debt, perturbation of the initial debt ratio",
        t_hat: t_hat_of(&a)?,
        a,
        basis: None,
        jordan: None,
        y0: vec![v(&[1.0, 0.61])],
        y0_tilde: Some(v(&[1.0, 0.60])),
        z0: Some(v(&[0.0, 1.0])),
        norm: NormKind::P2,
        horizon: 50.0,
        expected: vec![
            exp("lambda1", Target::rel(0.05, 1e-12)),
            exp("lambda2", Target::rel(0.01, 1e-12)),
            exp("k_inf_directional", Target::rel(3.0035, 1e-3)),
            exp("k_inf_directional_b060", Target::rel(2.29, 1e-2)),
            exp("delta_ratio_horizon", Target::Within { lo: 1.8, hi: 2.4 }),
        ],
    })
}

fn building_heating() -> Result<Scenario> {
    let sys = building_heating_assemble([0.5, 0.25, 0.25, 0.5, 1.0], 0.0, 0.0, [0.0; 3])?;
    let a = sys.a;
    Ok(Scenario {
        name: "building-heating",
        description: "three-room heating model around its equilibrium",
        t_hat: t_hat_of(&a)?,
        a,
        basis: None,
        jordan: None,
        y0: vec![v(&[3.5, -4.4, 2.5])],
        y0_tilde: Some(v(&[4.0, -4.0, 3.0])),
        z0: None,
        norm: NormKind::P2,
        horizon: 6.0,
        expected: vec![
            exp("lambda1", Target::abs(-0.31519, 1e-4)),
            exp("lambda2", Target::abs(-1.0560, 1e-4)),
            exp("lambda3", Target::abs(-2.6288, 1e-4)),
            exp("abs_w_hat_1", Target::abs(0.4462, 1e-3)),
            exp("abs_w_hat_2", Target::abs(0.6111, 1e-3)),
            exp("abs_w_hat_3", Target::abs(0.6538, 1e-3)),
            exp("k_inf_directional", Target::rel(11.8648, 1e-3)),
            exp("k_inf_worst", Target::rel(12.1330, 1e-3)),
            exp("k_inf_swapped", Target::rel(4.9195, 1e-3)),
            exp("one_sign_bound", Target::rel(2.2411, 1e-3)),
            exp("t_star", Target::abs(1.6362, 1e-3)),
            exp("t_star_tilde", Target::abs(3.0876, 1e-3)),
            exp("norm_ratio_at_t_star_tilde", Target::rel(2.3882, 1e-3)),
        ],
    })
}

fn wall_model() -> Result<Scenario> {
    #[rustfmt::skip]
    let a = m(4, &[
        -5.7215, 5.7215, 0.0, 0.0,
        0.23076, -0.39276, 0.162, 0.0,
        0.0, 0.081, -0.162, 0.081,
        0.0, 0.0, 0.162, -0.91116,
    ]);
    Ok(Scenario {
        name: "wall-model",
        description: "four-node heat conduction through a wall, max norm",
        t_hat: t_hat_of(&a)?,
        a,
        basis: None,
        jordan: None,
        y0: vec![v(&[1.0, 0.0, 0.0, 0.0])],
        y0_tilde: None,
        z0: None,
        norm: NormKind::PInf,
        horizon: 30.0,
        expected: vec![exp("k_inf_worst", Target::rel(65.987, 1e-3))],
    })
}

fn magnetic() -> Result<Scenario> {
    // m v' = q v x B - Gamma v with m = 1, qB = (-0.5, -1.3, -0.4), Gamma = diag(0.4, 0.8, 0.2).
    let (bx, by, bz) = (-0.5, -1.3, -0.4);
    let g = [0.4, 0.8, 0.2];
    #[rustfmt::skip]
    let a = m(3, &[
        -g[0], bz, -by,
        -bz, -g[1], bx,
        by, -bx, -g[2],
    ]);
    let t_hat = t_hat_of(&a)?;
    Ok(Scenario {
        name: "magnetic",
        description: "charged particle in a constant magnetic field with friction",
        a,
        basis: None,
        jordan: None,
        y0: vec![v(&[0.5, 1.0, 0.5])],
        y0_tilde: None,
        z0: None,
        norm: NormKind::P2,
        horizon: 6.0 * t_hat,
        t_hat,
        expected: vec![
            exp("v1", Target::abs(0.0587, 1e-2)),
            exp("w1", Target::abs(0.0937, 1e-2)),
            exp("osf", Target::abs(5.92, 1e-2)),
        ],
    })
}

const HILBERT_F: [f64; 8] = [5.2554e5, 1.677e7, 1.6347e8, 7.1819e8, 1.6407e9, 2.0252e9, 1.2815e9, 3.2603e8];
const HILBERT_F_IDS: [&str; 8] = ["f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8"];

fn hilbert_preset() -> Result<Scenario> {
    let n = 8;
    let vh = hilbert(n);
    let values: Vec<Complex64> = (1..=n).map(|k| Complex64::new(-0.1 * k as f64, 0.0)).collect();
    let basis = EigenDecomposition::from_basis(values, to_complex(&vh), None)?;
    let d = DMatrix::from_diagonal(&DVector::from_fn(n, |k, _| -0.1 * (k + 1) as f64));
    let vinv = vh.clone().lu().try_inverse().ok_or_else(|| Error::Range("singular Hilbert matrix".into()))?;
    let a = &vh * d * vinv;
    let mut expected: Vec<Expected> =
        HILBERT_F.iter().zip(HILBERT_F_IDS).map(|(&f, id)| exp(id, Target::rel(f, 1e-3))).collect();
    expected.push(exp("onset_f_term", Target::rel(3.4629, 1e-3)));
    expected.push(exp("measured_onset_chars_y1", Target::Within { lo: 0.0, hi: 5.5 }));
    expected.push(exp("measured_onset_chars_y2", Target::Within { lo: 0.0, hi: 5.5 }));
    expected.push(exp("max_k_over_k_inf_y1", Target::Within { lo: 1.0 / 3.0, hi: 3.0 }));
    expected.push(exp("max_k_over_k_inf_y2", Target::Within { lo: 1.0 / 3.0, hi: 3.0 }));
    Ok(Scenario {
        name: "hilbert",
        description: "V D V^-1 with V the order-8 Hilbert matrix and D = diag(-0.1, ..., -0.8)",
        a,
        basis: Some(basis),
        jordan: None,
        y0: vec![DVector::from_element(n, 1.0), v(&[1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0])],
        y0_tilde: None,
        z0: None,
        norm: NormKind::P2,
        horizon: 100.0,
        t_hat: 10.0,
        expected,
    })
}

fn oscillating() -> Result<Scenario> {
    let a = m(3, &[-1.0, 20.0, -20.0, 0.0, 19.0, -20.0, 0.0, 18.1, -19.0]);
    Ok(Scenario {
        name: "oscillating",
        description: "3x3 matrix with rightmost pair +-i and nearly parallel real and imaginary eigenvector parts",
        t_hat: t_hat_of(&a)?,
        a,
        basis: None,
        jordan: None,
        y0: vec![v(&[0.0, -0.7245, -0.6892]), v(&[0.0, 0.6892, -0.7245])],
        y0_tilde: None,
        z0: None,
        norm: NormKind::P2,
        horizon: 4.0 * std::f64::consts::PI,
        expected: vec![
            exp("v1", Target::abs(0.9988, 1e-3)),
            exp("w1", Target::abs(0.9986, 1e-3)),
            exp("osf", Target::rel(38.1, 1e-2)),
            exp("a_min", Target::rel(0.0263, 1e-2)),
            exp("a_max", Target::rel(41.0, 1e-2)),
            exp("k_inf_max", Target::rel(1563.0, 1e-2)),
            exp("k_inf_min", Target::rel(1.0, 1e-2)),
            exp("f1", Target::rel(23.5245, 1e-3)),
            exp("f2_over_f1", Target::rel(0.0601, 1e-3)),
        ],
    })
}

fn jordan() -> Result<Scenario> {
    let a = m(3, &[-1.0, 0.0, 0.0, 2.0, 1.0, 1.0, -1.0, -1.0, -1.0]);
    let vj = to_complex(&m(3, &[0.0, 0.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0]));
    let js = JordanStructure::new(
        vj,
        vec![
            JordanBlock { eigenvalue: Complex64::new(0.0, 0.0), len: 2 },
            JordanBlock { eigenvalue: Complex64::new(-1.0, 0.0), len: 1 },
        ],
    )?;
    Ok(Scenario {
        name: "jordan",
        description: "defective 3x3 matrix with a supplied Jordan basis, 1-norm",
        a,
        basis: None,
        jordan: Some(js),
        y0: vec![v(&[-0.8, -2.9, 1.4]), v(&[-1.0, 1.0, 0.05]), v(&[1.0, 2.0, 3.0])],
        y0_tilde: None,
        z0: None,
        norm: NormKind::P1,
        horizon: 50.0,
        t_hat: 1.0,
        expected: vec![
            exp("k_inf_y1", Target::rel(5.1 / 2.3, 1e-10)),
            exp("k_inf_y2", Target::rel(41.0, 1e-10)),
            exp("k_inf_y3", Target::rel(1.0, 1e-10)),
            exp("gap_ratio", Target::Within { lo: 1.6, hi: 2.4 }),
        ],
    })
}

/// A computed quantity of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub id: String,
    pub value: f64,
}

fn push(out: &mut Vec<Measured>, id: impl Into<String>, value: f64) {
    out.push(Measured { id: id.into(), value });
}

/// First time in `[0, t_max]` where `||e^{tA} y|| = level`, by a grid scan
/// and bisection.
pub fn threshold_time<E: Evolution>(flow: &E, y: &DVector<E::Scalar>, norm: NormKind, level: f64, t_max: f64) -> Result<Option<f64>> {
    let g = |t: f64| -> Result<f64> { Ok(vector_norm(&(flow.propagator(t)? * y), norm) - level) };
    let steps = 2000;
    let grid = uniform_grid(0.0, t_max, steps + 1);
    let mut prev = g(0.0)?;
    for w in grid.windows(2) {
        let cur = g(w[1])?;
        if prev.signum() != cur.signum() || cur == 0.0 {
            let (mut lo, mut hi) = (w[0], w[1]);
            let s_lo = prev.signum();
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid)?.signum() == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev = cur;
    }
    Ok(None)
}

/// Compute every quantity a preset refers to.
pub fn evaluate(s: &Scenario) -> Result<Vec<Measured>> {
    let mut out = Vec::new();
    if let Some(js) = &s.jordan {
        return evaluate_jordan(s, js);
    }
    let dec = s.decomposition()?;
    let part = partition_spectrum(&dec, LEVEL_TOL);
    let rm = rightmost_data(&dec, &part, s.norm)?;
    let y0 = cv(&s.y0[0]);
    for (k, lam) in dec.values.iter().enumerate() {
        push(&mut out, format!("lambda{}", k + 1), lam.re);
        if lam.im != 0.0 {
            push(&mut out, format!("lambda{}_im", k + 1), lam.im);
        }
    }
    push(&mut out, "t_hat", s.t_hat);
    push(&mut out, "rlge_margin", crate::spectrum::rlge_check(&rm, &y0, RLGE_TOL)?);
    let modes = all_modes(&dec, &part, s.norm).ok();
    match s.name {
        "gdp-nd" => {
            let z = s.direction()?.expect("gdp-nd has a direction");
            push(&mut out, "k_inf_directional", k_inf_directional(&rm, &y0, &z, &[0.0])?.values[0]);
            let y060 = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.60, 0.0)]);
            push(&mut out, "k_inf_directional_b060", k_inf_directional(&rm, &y060, &z, &[0.0])?.values[0]);
            let yt = cv(s.y0_tilde.as_ref().expect("gdp-nd has a perturbed value"));
            let (rel, _) = error_curves(&s.flow(), &y0, &yt, s.norm, &[0.0, s.horizon])?;
            push(&mut out, "delta_ratio_horizon", rel.values[1] / rel.values[0]);
        }
        "building-heating" => {
            for (k, w) in rm.w_hat.iter().enumerate() {
                push(&mut out, format!("abs_w_hat_{}", k + 1), w.norm());
            }
            let yt = cv(s.y0_tilde.as_ref().expect("building-heating has a perturbed value"));
            let z = s.direction()?.expect("building-heating has a direction");
            push(&mut out, "k_inf_directional", k_inf_directional(&rm, &y0, &z, &[0.0])?.values[0]);
            push(&mut out, "k_inf_worst", osf_worst(&rm, &y0)?);
            let zs = Perturbation::new(yt.clone(), y0.clone(), s.norm)?.z0_hat;
            push(&mut out, "k_inf_directional_swapped", k_inf_directional(&rm, &yt, &zs, &[0.0])?.values[0]);
            push(&mut out, "k_inf_swapped", osf_worst(&rm, &yt)?);
            let min_w = rm.w_hat.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);
            push(&mut out, "one_sign_bound", 1.0 / min_w);
            let flow = s.flow();
            let t1 = threshold_time(&flow, &y0, s.norm, 0.5, s.horizon)?
                .ok_or_else(|| Error::Range("threshold not reached".into()))?;
            let t2 = threshold_time(&flow, &yt, s.norm, 0.5, s.horizon)?
                .ok_or_else(|| Error::Range("threshold not reached".into()))?;
            push(&mut out, "t_star", t1);
            push(&mut out, "t_star_tilde", t2);
            let p = flow.propagator(t2)?;
            push(&mut out, "norm_ratio_at_t_star_tilde", vector_norm(&(&p * &yt), s.norm) / vector_norm(&(&p * &y0), s.norm));
            let (rel, _) = error_curves(&flow, &y0, &yt, s.norm, &s.grid(601))?;
            push(&mut out, "delta0", rel.values[0]);
            push(&mut out, "delta_growth", rel.max().1 / rel.values[0]);
        }
        "wall-model" => {
            push(&mut out, "k_inf_worst", osf_worst(&rm, &y0)?);
        }
        "magnetic" => {
            push(&mut out, "v1", overlap_v(&rm));
            push(&mut out, "w1", overlap_w(&rm));
            push(&mut out, "osf", osf_worst(&rm, &y0)?);
        }
        "hilbert" => {
            let modes = modes.ok_or_else(|| Error::Unsupported("non-generic spectrum".into()))?;
            let f1 = modes[0].f;
            for (j, md) in modes.iter().enumerate() {
                push(&mut out, format!("f{}", j + 1), md.f);
            }
            let term = modes
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, md)| (md.f / f1).ln() / j as f64)
                .fold(f64::NEG_INFINITY, f64::max);
            push(&mut out, "onset_f_term", term);
            let flow = s.flow();
            let times = s.grid(1000);
            for (i, y) in s.y0.iter().enumerate() {
                let y = cv(y);
                let k = k_worst(&flow, &y, s.norm, &times)?;
                let kinf = k_inf_worst(&rm, &y, &times)?;
                let onset = measured_onset(&times, &k.values, &kinf.values, 0.1).unwrap_or(f64::INFINITY);
                push(&mut out, format!("measured_onset_chars_y{}", i + 1), onset / s.t_hat);
                push(&mut out, format!("onset_bound_chars_y{}", i + 1), onset_time(&modes, &y, 0.1, s.t_hat)?);
                push(&mut out, format!("max_k_over_k_inf_y{}", i + 1), k.max().1 / kinf.values[0]);
            }
        }
        "oscillating" => {
            let v1 = overlap_v(&rm);
            let w1 = overlap_w(&rm);
            push(&mut out, "v1", v1);
            push(&mut out, "w1", w1);
            let osf = osf_worst(&rm, &y0)?;
            push(&mut out, "osf", osf);
            let b = ot_bounds(v1, w1);
            push(&mut out, "a_min", b.a_min);
            push(&mut out, "a_max", b.a_max);
            let (lo, hi) = ot_extrema(&rm, &y0, None)?;
            push(&mut out, "k_inf_max", osf * hi);
            push(&mut out, "k_inf_min", osf * lo);
            if let Some(y) = s.y0.get(1) {
                push(&mut out, "osf_y2", osf_worst(&rm, &cv(y))?);
            }
            let modes = modes.ok_or_else(|| Error::Unsupported("non-generic spectrum".into()))?;
            push(&mut out, "f1", modes[0].f);
            push(&mut out, "f2_over_f1", modes[1].f / modes[0].f);
            push(
                &mut out,
                "onset_f_term",
                (modes[1].f / modes[0].f).ln() / (modes[0].lambda.re - modes[1].lambda.re),
            );
        }
        _ => {}
    }
    Ok(out)
}

fn evaluate_jordan(s: &Scenario, js: &JordanStructure) -> Result<Vec<Measured>> {
    let mut out = Vec::new();
    let ac = to_complex(&s.a);
    push(&mut out, "reconstruction_error", (js.reconstruct() - &ac).norm() / ac.norm());
    push(&mut out, "chain_residual", js.chain_residual(&ac));
    let q1 = jordan_q1(js)?;
    let flow = s.flow();
    for (i, y) in s.y0.iter().enumerate() {
        let y = cv(y);
        jordan_rlge_margin(js, &y, s.norm, RLGE_TOL)?;
        let kinf = k_inf_worst_q1(&q1, &y, s.norm, &[0.0])?.values[0];
        push(&mut out, format!("k_inf_y{}", i + 1), kinf);
        if i == 0 {
            let k = k_worst(&flow, &y, s.norm, &[0.5 * s.horizon, s.horizon])?;
            push(&mut out, "gap_half_horizon", k.values[0] - kinf);
            push(&mut out, "gap_horizon", k.values[1] - kinf);
            push(&mut out, "gap_ratio", (k.values[0] - kinf) / (k.values[1] - kinf));
        }
    }
    Ok(out)
}

/// Outcome of one reference check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: &'static str,
    pub value: Option<f64>,
    pub target: Target,
    pub pass: bool,
}

/// Evaluate a scenario and compare with its references.
pub fn run_scenario(s: &Scenario) -> Result<(Vec<Measured>, Vec<Check>)> {
    let measured = evaluate(s)?;
    let checks = s
        .expected
        .iter()
        .map(|e| {
            let value = measured.iter().find(|m| m.id == e.id).map(|m| m.value);
            Check { id: e.id, value, target: e.target, pass: value.is_some_and(|x| e.target.accepts(x)) }
        })
        .collect();
    Ok((measured, checks))
}

/// Mode data of every level of a scenario, for reports.
pub fn scenario_modes(s: &Scenario) -> Result<Vec<ModeData>> {
    let dec = s.decomposition()?;
    let part = partition_spectrum(&dec, LEVEL_TOL);
    all_modes(&dec, &part, s.norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn every_preset_builds() {
        for name in preset_names() {
            let s = preset(name).unwrap();
            assert_eq!(s.name, *name);
            assert_eq!(s.a.nrows(), s.y0[0].len());
        }
        assert!(matches!(preset("nope"), Err(Error::Input(_))));
    }

    #[test]
    fn uniform_heating_equilibrium() {
        let sys = building_heating_assemble([0.7; 5], 3.0, 3.0, [0.0; 3]).unwrap();
        for x in sys.x_eq.iter() {
            assert_relative_eq!(*x, 3.0, max_relative = 1e-14);
        }
        assert_eq!(sys.a, sys.a.transpose());
    }

    #[test]
    fn jordan_structure_reproduces_matrix() {
        let s = preset("jordan").unwrap();
        let js = s.jordan.as_ref().unwrap();
        let a = to_complex(&s.a);
        assert!((js.reconstruct() - &a).norm() <= 1e-12);
        assert!(js.chain_residual(&a) <= 1e-14);
        assert_eq!(js.m1(), 2);
        let q1 = jordan_q1(js).unwrap();
        assert_eq!(q1.terms.len(), 1);
    }

    #[test]
    fn inconsistent_blocks_rejected() {
        let v = CMatrix::identity(3, 3);
        let b = vec![JordanBlock { eigenvalue: Complex64::new(0.0, 0.0), len: 2 }];
        assert!(JordanStructure::new(v, b).is_err());
    }
}
