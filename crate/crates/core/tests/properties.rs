use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use relcond::asymptotic::{
    euclid_geometry, k_inf_directional, k_inf_directional_euclid, k_inf_worst, k_inf_worst_euclid, osf_worst,
    ot_bounds, ot_directional, ot_extrema, ot_worst,
};
use relcond::condition::{characteristic_time, k_directional, k_worst, uniform_grid};
use relcond::experiments::{sample_gaussian_instance, RngSpec};
use relcond::linalg::{
    dual_row_norm, eig_full, induced_matrix_norm, mat_exp, to_complex_vec, vector_norm, CVector,
    Field, NormKind,
};
use relcond::onset::{eps_curves, onset_time, overlap_v, overlap_w};
use relcond::spectrum::{all_modes, component, mode_data, partition_spectrum, rightmost_data, ModeKind, LEVEL_TOL};

mod common;

use common::{mat, pair_matrix, real_matrix, rel, taylor_expm, unit_phase_shift};

const NORMS: [NormKind; 3] = [NormKind::P1, NormKind::P2, NormKind::PInf];

fn vector_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n).prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn condition_numbers_start_at_one(x in prop::collection::vec(-2.0f64..2.0, 16), y in vector_strategy(4), z in vector_strategy(4)) {
        let a = mat(4, &x);
        let (y, z) = (DVector::from_vec(y), DVector::from_vec(z));
        for norm in NORMS {
            let kw = k_worst(&a, &y, norm, &[0.0]).unwrap();
            let kd = k_directional(&a, &y, &z, norm, &[0.0]).unwrap();
            prop_assert!((kw.values[0] - 1.0).abs() <= 1e-14);
            prop_assert!((kd.values[0] - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn directional_never_exceeds_worst(x in prop::collection::vec(-2.0f64..2.0, 16), y in vector_strategy(4), z in vector_strategy(4)) {
        let a = mat(4, &x);
        let (y, z) = (DVector::from_vec(y), DVector::from_vec(z));
        let times = uniform_grid(0.0, 5.0, 41);
        for norm in NORMS {
            let kw = k_worst(&a, &y, norm, &times).unwrap();
            let kd = k_directional(&a, &y, &z, norm, &times).unwrap();
            for (d, w) in kd.values.iter().zip(&kw.values) {
                prop_assert!(*d <= *w * (1.0 + 1e-12), "{} > {}", d, w);
            }
        }
    }

    #[test]
    fn mean_norms_give_the_same_condition_numbers(x in prop::collection::vec(-1.5f64..1.5, 9), y in vector_strategy(3), z in vector_strategy(3)) {
        let a = mat(3, &x);
        let (y, z) = (DVector::from_vec(y), DVector::from_vec(z));
        let times = uniform_grid(0.0, 3.0, 13);
        for (p, mp) in [(NormKind::P1, NormKind::MeanP(1.0)), (NormKind::P2, NormKind::MeanP(2.0)), (NormKind::PInf, NormKind::MeanP(f64::INFINITY))] {
            let a1 = k_worst(&a, &y, p, &times).unwrap();
            let a2 = k_worst(&a, &y, mp, &times).unwrap();
            let d1 = k_directional(&a, &y, &z, p, &times).unwrap();
            let d2 = k_directional(&a, &y, &z, mp, &times).unwrap();
            for k in 0..times.len() {
                prop_assert!(rel(a2.values[k], a1.values[k]) <= 1e-12);
                prop_assert!(rel(d2.values[k], d1.values[k]) <= 1e-12);
            }
            let dec = eig_full(&a).unwrap();
            let part = partition_spectrum(&dec, LEVEL_TOL);
            if let (Ok(r1), Ok(r2)) = (rightmost_data(&dec, &part, p), rightmost_data(&dec, &part, mp)) {
                let yc = to_complex_vec(&y);
                prop_assert!(rel(osf_worst(&r2, &yc).unwrap(), osf_worst(&r1, &yc).unwrap()) <= 1e-10);
                prop_assert!(rel(r2.f, r1.f) <= 1e-10);
            }
        }
    }

    #[test]
    fn induced_norms_match_oracles(x in prop::collection::vec(-3.0f64..3.0, 16), u in vector_strategy(4)) {
        let m = mat(4, &x);
        let p2 = induced_matrix_norm(&m, NormKind::P2).unwrap();
        prop_assert!(rel(p2, m.clone().singular_values()[0].max(m.clone().singular_values().max())) <= 1e-12);
        let p1 = induced_matrix_norm(&m, NormKind::P1).unwrap();
        let col_max = (0..4).map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        prop_assert!(rel(p1, col_max) <= 1e-14);
        let pinf = induced_matrix_norm(&m, NormKind::PInf).unwrap();
        let mut best = 0.0f64;
        for mask in 0..16u32 {
            let s = DVector::from_fn(4, |k, _| if mask >> k & 1 == 1 { 1.0 } else { -1.0 });
            best = best.max(vector_norm(&(&m * s), NormKind::PInf));
        }
        prop_assert!(rel(pinf, best) <= 1e-14);
        let u = DVector::from_vec(u);
        for norm in NORMS {
            let lhs = vector_norm(&(&m * &u), norm);
            let rhs = induced_matrix_norm(&m, norm).unwrap() * vector_norm(&u, norm);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn dual_norm_bounds_the_pairing(wr in vector_strategy(3), wi in vector_strategy(3), u in vector_strategy(3), p in 1.0f64..6.0) {
        let w = CVector::from_fn(3, |k, _| Complex64::new(wr[k], wi[k]));
        let u = to_complex_vec(&DVector::from_vec(u));
        for norm in [NormKind::P1, NormKind::P2, NormKind::PInf, NormKind::MeanP(p)] {
            let d = dual_row_norm(&w, norm, Field::Complex);
            prop_assert!(w.dot(&u).norm() <= d * vector_norm(&u, norm) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn expm_group_property(x in prop::collection::vec(-1.0f64..1.0, 16), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let a = mat(4, &x);
        let lhs = mat_exp(&a, s + t).unwrap();
        let rhs = mat_exp(&a, s).unwrap() * mat_exp(&a, t).unwrap();
        prop_assert!((&lhs - &rhs).norm() <= 1e-12 * lhs.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn expm_matches_taylor_squaring(x in prop::collection::vec(-2.0f64..2.0, 16)) {
        let a = mat(4, &x);
        let e = mat_exp(&a, 1.0).unwrap();
        let o = taylor_expm(&a);
        prop_assert!((&e - &o).norm() <= 1e-12 * o.norm(), "{}", (&e - &o).norm() / o.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ot_bounds_hold(
        n in 3usize..=5,
        a in -1.0f64..1.0,
        b in 0.2f64..3.0,
        gaps in prop::collection::vec(0.1f64..3.0, 3),
        noise in prop::collection::vec(-1.0f64..1.0, 25),
        y in vector_strategy(5),
        z in vector_strategy(5),
    ) {
        let m = pair_matrix(n, a, b, &gaps, &noise);
        let dec = eig_full(&m).unwrap();
        let part = partition_spectrum(&dec, LEVEL_TOL);
        let rm = rightmost_data(&dec, &part, NormKind::P2).unwrap();
        prop_assert_eq!(rm.kind, ModeKind::ComplexPair);
        let y = to_complex_vec(&DVector::from_column_slice(&y[..n]));
        let z = to_complex_vec(&DVector::from_column_slice(&z[..n]));
        prop_assume!(component(&rm, &y).unwrap() > 1e-6 && component(&rm, &z).unwrap() > 1e-6);
        let bnd = ot_bounds(overlap_v(&rm), overlap_w(&rm));
        let period = std::f64::consts::PI / rm.omega;
        for k in 0..1000 {
            let t = period * k as f64 / 1000.0 * 3.0;
            let w = ot_worst(&rm, t, &y).unwrap();
            prop_assert!(w >= bnd.a_min * (1.0 - 1e-10) && w <= bnd.a_max * (1.0 + 1e-10), "worst {} not in [{}, {}]", w, bnd.a_min, bnd.a_max);
            let d = ot_directional(&rm, t, &y, &z).unwrap();
            prop_assert!(d >= bnd.directional_lower * (1.0 - 1e-10) && d <= bnd.directional_upper * (1.0 + 1e-10));
        }
    }

    #[test]
    fn theta_route_matches_euclidean_closed_forms(
        n in 3usize..=5,
        a in -1.0f64..1.0,
        b in 0.2f64..3.0,
        gaps in prop::collection::vec(0.1f64..3.0, 3),
        noise in prop::collection::vec(-1.0f64..1.0, 25),
        y in vector_strategy(5),
        z in vector_strategy(5),
    ) {
        let m = pair_matrix(n, a, b, &gaps, &noise);
        let dec = eig_full(&m).unwrap();
        let part = partition_spectrum(&dec, LEVEL_TOL);
        let rm = rightmost_data(&dec, &part, NormKind::P2).unwrap();
        let y = to_complex_vec(&DVector::from_column_slice(&y[..n]));
        let z = to_complex_vec(&DVector::from_column_slice(&z[..n]));
        prop_assume!(component(&rm, &y).unwrap() > 1e-6 && component(&rm, &z).unwrap() > 1e-6);
        let g = euclid_geometry(&rm).unwrap();
        let times = uniform_grid(0.0, 4.0 * std::f64::consts::PI / rm.omega, 101);
        let k1 = k_inf_worst(&rm, &y, &times).unwrap();
        let k2 = k_inf_worst_euclid(&rm, &g, &y, &times).unwrap();
        let d1 = k_inf_directional(&rm, &y, &z, &times).unwrap();
        let d2 = k_inf_directional_euclid(&rm, &g, &y, &z, &times).unwrap();
        for k in 0..times.len() {
            prop_assert!(rel(k2.values[k], k1.values[k]) <= 1e-10, "{} vs {}", k2.values[k], k1.values[k]);
            prop_assert!(rel(d2.values[k], d1.values[k]) <= 1e-10);
        }
    }

    #[test]
    fn onset_precision_bounds_are_sound(
        complex in any::<bool>(),
        n in 3usize..=5,
        a in -1.0f64..1.0,
        b in 0.2f64..3.0,
        gaps in prop::collection::vec(0.1f64..2.0, 4),
        noise in prop::collection::vec(-1.0f64..1.0, 25),
        y in vector_strategy(5),
        z in vector_strategy(5),
    ) {
        let m = if complex { pair_matrix(n, a, b, &gaps, &noise) } else { real_matrix(n, a, &gaps, &noise) };
        let dec = eig_full(&m).unwrap();
        let part = partition_spectrum(&dec, LEVEL_TOL);
        let modes = all_modes(&dec, &part, NormKind::P2).unwrap();
        let yr = DVector::from_column_slice(&y[..n]);
        let zr = DVector::from_column_slice(&z[..n]);
        let (yc, zc) = (to_complex_vec(&yr), to_complex_vec(&zr));
        prop_assume!(component(&modes[0], &yc).unwrap() > 1e-3 && component(&modes[0], &zc).unwrap() > 1e-3);
        let t_hat = characteristic_time(&dec);
        let times = uniform_grid(0.0, 10.0 * t_hat.min(5.0), 200);
        let rep = eps_curves(&modes, &yc, Some(&zc), &times).unwrap();
        let kw = k_worst(&m, &yr, NormKind::P2, &times).unwrap();
        let kd = k_directional(&m, &yr, &zr, NormKind::P2, &times).unwrap();
        let kiw = k_inf_worst(&modes[0], &yc, &times).unwrap();
        let kid = k_inf_directional(&modes[0], &yc, &zc, &times).unwrap();
        let pd = rep.precision_directional.as_ref().unwrap();
        for k in 0..times.len() {
            if let Some(p) = rep.precision_worst[k] {
                let dev = (kw.values[k] / kiw.values[k] - 1.0).abs();
                prop_assert!(dev <= p * (1.0 + 1e-9) + 1e-12, "t={} worst deviation {} above bound {}", times[k], dev, p);
            }
            if let Some(p) = pd[k] {
                let dev = (kd.values[k] / kid.values[k] - 1.0).abs();
                prop_assert!(dev <= p * (1.0 + 1e-9) + 1e-12, "t={} directional deviation {} above bound {}", times[k], dev, p);
            }
        }
    }

    #[test]
    fn phase_choice_does_not_change_level_data(
        n in 3usize..=5,
        a in -1.0f64..1.0,
        b in 0.2f64..3.0,
        gaps in prop::collection::vec(0.1f64..3.0, 3),
        noise in prop::collection::vec(-1.0f64..1.0, 25),
        phases in prop::collection::vec(-3.1f64..3.1, 5),
        y in vector_strategy(5),
    ) {
        let m = pair_matrix(n, a, b, &gaps, &noise);
        let dec = eig_full(&m).unwrap();
        let shifted = unit_phase_shift(&dec, &phases);
        let part = partition_spectrum(&dec, LEVEL_TOL);
        let y = to_complex_vec(&DVector::from_column_slice(&y[..n]));
        prop_assume!(component(&rightmost_data(&dec, &part, NormKind::P2).unwrap(), &y).unwrap() > 1e-6);
        for j in 0..part.levels.len() {
            let m1 = mode_data(&dec, &part, j, NormKind::P2).unwrap();
            let m2 = mode_data(&shifted, &part, j, NormKind::P2).unwrap();
            prop_assert!(rel(m2.f, m1.f) <= 1e-12);
            if m1.kind == ModeKind::ComplexPair {
                prop_assert!((overlap_v(&m2) - overlap_v(&m1)).abs() <= 1e-12);
                prop_assert!((overlap_w(&m2) - overlap_w(&m1)).abs() <= 1e-12);
            }
        }
        let r1 = rightmost_data(&dec, &part, NormKind::P2).unwrap();
        let r2 = rightmost_data(&shifted, &part, NormKind::P2).unwrap();
        prop_assert!(rel(osf_worst(&r2, &y).unwrap(), osf_worst(&r1, &y).unwrap()) <= 1e-12);
        let e1 = ot_extrema(&r1, &y, None).unwrap();
        let e2 = ot_extrema(&r2, &y, None).unwrap();
        prop_assert!(rel(e2.0, e1.0) <= 1e-8 && rel(e2.1, e1.1) <= 1e-8);
        let g1 = euclid_geometry(&r1).unwrap();
        let g2 = euclid_geometry(&r2).unwrap();
        prop_assert!(rel(g2.sigma1, g1.sigma1) <= 1e-10 && rel(g2.mu1, g1.mu1) <= 1e-10);
    }

    #[test]
    fn f_values_at_least_one_and_margin_at_most_one(x in prop::collection::vec(-2.0f64..2.0, 25), y in vector_strategy(5)) {
        let a = mat(5, &x);
        let dec = eig_full(&a).unwrap();
        let part = partition_spectrum(&dec, LEVEL_TOL);
        prop_assume!(part.is_generic());
        let y = to_complex_vec(&DVector::from_vec(y));
        for norm in NORMS {
            let modes = all_modes(&dec, &part, norm).unwrap();
            for m in &modes {
                prop_assert!(m.f >= 1.0 - 1e-12, "f = {}", m.f);
            }
            prop_assert!(component(&modes[0], &y).unwrap() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn well_separated_spectra_converge(
        n in 3usize..=5,
        gaps in prop::collection::vec(0.3f64..2.0, 4),
        noise in prop::collection::vec(-0.5f64..0.5, 25),
        y in vector_strategy(5),
    ) {
        let m = real_matrix(n, -0.5, &gaps, &noise);
        let dec = eig_full(&m).unwrap();
        let part = partition_spectrum(&dec, LEVEL_TOL);
        let rm = rightmost_data(&dec, &part, NormKind::P2).unwrap();
        let yr = DVector::from_column_slice(&y[..n]);
        let yc = to_complex_vec(&yr);
        prop_assume!(component(&rm, &yc).unwrap() > 1e-3);
        let t = 50.0 * characteristic_time(&dec);
        let k = k_worst(&m, &yr, NormKind::P2, &[t]).unwrap().values[0];
        let kinf = osf_worst(&rm, &yc).unwrap();
        prop_assert!((k / kinf - 1.0).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn onset_formula_is_sound(
        complex in any::<bool>(),
        n in 3usize..=5,
        a in -1.0f64..1.0,
        b in 0.2f64..3.0,
        gaps in prop::collection::vec(0.1f64..2.0, 4),
        noise in prop::collection::vec(-1.0f64..1.0, 25),
        y in vector_strategy(5),
        target in 1e-3f64..0.3,
    ) {
        let m = if complex { pair_matrix(n, a, b, &gaps, &noise) } else { real_matrix(n, a, &gaps, &noise) };
        let dec = eig_full(&m).unwrap();
        let part = partition_spectrum(&dec, LEVEL_TOL);
        let modes = all_modes(&dec, &part, NormKind::P2).unwrap();
        let yr = DVector::from_column_slice(&y[..n]);
        let yc = to_complex_vec(&yr);
        prop_assume!(component(&modes[0], &yc).unwrap() > 1e-3);
        let t_hat = characteristic_time(&dec);
        let bound = onset_time(&modes, &yc, target, t_hat).unwrap() * t_hat;
        let times = uniform_grid(bound, 3.0 * bound, 200);
        let k = k_worst(&m, &yr, NormKind::P2, &times).unwrap();
        let kinf = k_inf_worst(&modes[0], &yc, &times).unwrap();
        for i in 0..times.len() {
            let dev = (k.values[i] / kinf.values[i] - 1.0).abs();
            prop_assert!(dev <= target, "t={} deviation {} above target {}", times[i], dev, target);
        }
    }
}

#[test]
fn gaussian_spectra_are_generic() {
    for i in 0..1000 {
        let inst = sample_gaussian_instance(5, &mut RngSpec::new(314, i).rng());
        let dec = eig_full(&inst.a).unwrap();
        let part = partition_spectrum(&dec, LEVEL_TOL);
        assert!(part.is_generic(), "instance {i}");
        assert!(dec.trustworthy);
    }
}
