use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relcond::asymptotic::{k_inf_directional, k_inf_worst_q1};
use relcond::condition::k_worst;
use relcond::linalg::{eig_full, to_complex_vec, NormKind};
use relcond::models::{jordan_q1, preset};
use relcond::onset::onset_time;
use relcond::spectrum::{all_modes, component, partition_spectrum, rightmost_data, rlge_check, LEVEL_TOL};

fn l1(y: &DVector<f64>) -> f64 {
    y.iter().map(|x| x.abs()).sum()
}

#[test]
fn jordan_limit_matches_left_null_vector_formula() {
    // (1, 1, 1) annihilates A from the left, so K_inf = ||y||_1 / |sum y|.
    let s = preset("jordan").unwrap();
    let js = s.jordan.clone().unwrap();
    let q1 = jordan_q1(&js).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let y = DVector::from_fn(3, |_, _| rng.random_range(-3.0..3.0));
        let sum: f64 = y.iter().sum();
        if sum.abs() < 0.1 {
            continue;
        }
        let oracle = l1(&y) / sum.abs();
        let kinf = k_inf_worst_q1(&q1, &to_complex_vec(&y), NormKind::P1, &[0.0, 3.0]).unwrap();
        for v in &kinf.values {
            assert!((v / oracle - 1.0).abs() < 1e-12, "{v} vs {oracle}");
        }
        let k = k_worst(&s.a, &y, NormKind::P1, &[1e5]).unwrap().values[0];
        assert!((k / oracle - 1.0).abs() < 1e-3, "{k} vs {oracle}");
    }
}

#[test]
fn gdp_nd_directional_limit_formula() {
    // Left eigenvector (1, -1), direction (0, 1): K_inf = sqrt(1 + B^2) / |1 - B|.
    let s = preset("gdp-nd").unwrap();
    let dec = s.decomposition().unwrap();
    let part = partition_spectrum(&dec, LEVEL_TOL);
    let rm = rightmost_data(&dec, &part, NormKind::P2).unwrap();
    let z = to_complex_vec(&DVector::from_vec(vec![0.0, 1.0]));
    for k in 0..=40 {
        let b = k as f64 * 0.05 - 0.5;
        if (b - 1.0).abs() < 1e-9 {
            continue;
        }
        let y = to_complex_vec(&DVector::from_vec(vec![1.0, b]));
        let got = k_inf_directional(&rm, &y, &z, &[0.0]).unwrap().values[0];
        let oracle = (1.0 + b * b).sqrt() / (1.0 - b).abs();
        assert!((got / oracle - 1.0).abs() < 1e-12, "B={b}: {got} vs {oracle}");
    }
}

fn diagonal_oracle(r: &[f64], y: &[f64], target: f64, t_hat: f64) -> f64 {
    let q = r.len();
    (1..q)
        .map(|j| {
            let w = (y[j].abs() / y[0].abs()).ln().max(0.0);
            (2f64.ln() + ((2.0 + target) / target).ln() + ((q - 1) as f64).ln() + w) / ((r[0] - r[j]) * t_hat)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn onset_bound_for_two_level_diagonal() {
    let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -2.0]));
    let dec = eig_full(&a).unwrap();
    let part = partition_spectrum(&dec, LEVEL_TOL);
    let modes = all_modes(&dec, &part, NormKind::P2).unwrap();
    let y = to_complex_vec(&DVector::from_vec(vec![1.0, 1.0]));
    let b = onset_time(&modes, &y, 0.01, 1.0).unwrap();
    assert!((b - (2f64.ln() + 201f64.ln())).abs() < 1e-12);
    assert!((b - 5.996).abs() < 5e-4);
}

#[test]
fn onset_bound_for_diagonal_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let q = rng.random_range(2..=6);
        let mut r: Vec<f64> = (0..q).map(|_| rng.random_range(-5.0..1.0)).collect();
        r.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if r.windows(2).any(|w| w[0] - w[1] < 1e-3) {
            continue;
        }
        let y: Vec<f64> = (0..q).map(|_| rng.random_range(0.1..2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let target = rng.random_range(1e-4..0.5);
        let t_hat = rng.random_range(0.1..3.0);
        let a = DMatrix::from_diagonal(&DVector::from_vec(r.clone()));
        let dec = eig_full(&a).unwrap();
        let part = partition_spectrum(&dec, LEVEL_TOL);
        let modes = all_modes(&dec, &part, NormKind::P2).unwrap();
        let got = onset_time(&modes, &to_complex_vec(&DVector::from_vec(y.clone())), target, t_hat).unwrap();
        let oracle = diagonal_oracle(&r, &y, target, t_hat);
        assert!((got - oracle).abs() <= 1e-10 * oracle.abs().max(1.0), "{got} vs {oracle}");
    }
}

#[test]
fn near_singular_heating_state_margin() {
    let s = preset("building-heating").unwrap();
    let dec = s.decomposition().unwrap();
    let part = partition_spectrum(&dec, LEVEL_TOL);
    let rm = rightmost_data(&dec, &part, NormKind::P2).unwrap();

    // The four-digit state sits about 1.5e-6 off the singular plane.
    let printed = to_complex_vec(&DVector::from_vec(vec![3.5, -5.2298, 2.5]));
    let margin = component(&rm, &printed).unwrap();
    assert!((1e-6..2e-6).contains(&margin), "margin {margin}");
    assert!(rlge_check(&rm, &printed, 1e-5).is_err());
    assert!(rlge_check(&rm, &printed, 1e-8).is_ok());

    // Solving w_1 y = 0 for the middle entry lands on the plane.
    let w = rm.w.map(|z| z.re);
    let y2 = -(w[0] * 3.5 + w[2] * 2.5) / w[1];
    assert!((y2 - -5.2298).abs() < 1e-4);
    let exact = to_complex_vec(&DVector::from_vec(vec![3.5, y2, 2.5]));
    assert!(component(&rm, &exact).unwrap() < 1e-14);
    assert!(rlge_check(&rm, &exact, 1e-8).is_err());
}
