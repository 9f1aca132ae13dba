mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padic_mra::function::{fourier, lincomb, TestFunction};
use padic_mra::masks::{apply_refinement, haar_mask, mask_from_roots, refinable_from_mask, Mask};
use padic_mra::mra::{
    check_haar_equivalence, check_mra, check_orthonormal_shifts, l_set, recover_mask, shift_mask,
    MraConfig, ShiftScale,
};
use padic_mra::padic::{pow, PadicRational};

use common::{covering_roots, random_function, unit_pattern_mask, TOL};

/// A refinable function built from covering roots, or `None` when the
/// random roots leave the Fourier support unbounded.
fn refinable(seed: u64) -> Option<(Mask, TestFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = if rng.random_bool(0.5) { 2 } else { 3 };
    let n = rng.random_range(0..=2u32);
    let m = rng.random_range(0..=1u32);
    let roots = covering_roots(&mut rng, p, n, m);
    let mask = mask_from_roots(p, n, &roots).ok()?;
    let phi = refinable_from_mask(&mask, m as i32, TOL).ok()?;
    Some((mask, phi))
}

/// `max_d |⟨φ, φ(· - d/p^N)⟩ - δ_d0|` by explicit inner products.
fn gram_deviation(phi: &TestFunction) -> f64 {
    let p = phi.prime();
    let n = phi.support_exp().max(0) as u32;
    (0..pow(p, n))
        .map(|d| {
            let moved = phi.shift(&PadicRational::new(p, d as i64, n)).unwrap();
            let want = if d == 0 { 1.0 } else { 0.0 };
            (phi.inner_product(&moved).unwrap() - Complex64::new(want, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn recovered_mask_reproduces_phi(seed in any::<u64>()) {
        let Some((_, phi)) = refinable(seed) else { return Ok(()) };
        let rec = recover_mask(&phi, TOL).unwrap();
        prop_assert!(rec.residual < TOL);
        let image = apply_refinement(&rec.mask, &phi).unwrap();
        prop_assert!(image.max_abs_diff(&phi).unwrap() < 1e-8 * phi.max_abs());
    }

    #[test]
    fn lset_counts_nonzero_spectrum(seed in any::<u64>()) {
        let Some((_, phi)) = refinable(seed) else { return Ok(()) };
        let l = l_set(&phi, TOL).unwrap();
        let spec = fourier(&phi);
        let expected: Vec<u64> = (0..spec.len() as u64)
            .filter(|&k| spec.values()[k as usize].norm() > TOL)
            .collect();
        prop_assert_eq!(&l.members, &expected);
        prop_assert!(l.contains(0));
    }

    #[test]
    fn same_scale_expansion_rebuilds_the_shift(seed in any::<u64>(), j in any::<u64>()) {
        let Some((_, phi)) = refinable(seed) else { return Ok(()) };
        let p = phi.prime();
        let (n, m) = (phi.support_exp().max(0) as u32, phi.period_exp().max(0) as u32);
        let b = PadicRational::new(p, (j % pow(p, n + m)) as i64, n);
        let within = l_set(&phi, TOL).unwrap().within_bound();
        match shift_mask(&phi, &b, ShiftScale::Same, TOL) {
            Ok(sm) => {
                let shifts: Vec<TestFunction> = (0..pow(p, n))
                    .map(|k| phi.shift(&PadicRational::new(p, k as i64, n)).unwrap())
                    .collect();
                let rebuilt = lincomb(&sm.coeffs, &shifts).unwrap();
                let target = phi.shift(&b).unwrap();
                prop_assert!(rebuilt.max_abs_diff(&target).unwrap() < 1e-8 * phi.max_abs());
                // on the spectrum: m_b(ξ/p^N) = χ(bξ) wherever φ̂(ξ) ≠ 0
                let spec = fourier(&phi);
                for l in 0..spec.len() as u64 {
                    if spec.values()[l as usize].norm() > TOL {
                        let xi = PadicRational::new(p, l as i64, m);
                        let got = sm.poly().eval(&PadicRational::new(p, l as i64, m + n)).unwrap();
                        prop_assert!((got - b.mul(&xi).unwrap().character()).norm() < 1e-7);
                    }
                }
            }
            Err(_) => prop_assert!(!within),
        }
    }

    #[test]
    fn refined_expansion_exists_for_refinable_phi(seed in any::<u64>(), j in any::<u64>()) {
        let Some((_, phi)) = refinable(seed) else { return Ok(()) };
        let p = phi.prime();
        let n = phi.support_exp().max(0) as u32;
        let b = PadicRational::new(p, (j % pow(p, n)) as i64, n);
        let within = l_set(&phi, TOL).unwrap().within_bound();
        let res = shift_mask(&phi, &b, ShiftScale::Refined, TOL);
        if within {
            prop_assert!(res.is_ok(), "{:?}", res);
        }
    }

    #[test]
    fn orthonormality_agrees_with_inner_products(seed in any::<u64>(), unit in any::<bool>()) {
        let phi = if unit {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = if rng.random_bool(0.5) { 2 } else { 3 };
            let n = rng.random_range(0..=2u32);
            refinable_from_mask(&unit_pattern_mask(&mut rng, p, n), 0, TOL).unwrap()
        } else {
            let Some((_, phi)) = refinable(seed) else { return Ok(()) };
            phi
        };
        let report = check_orthonormal_shifts(&phi, TOL).unwrap();
        let dev = gram_deviation(&phi);
        prop_assert_eq!(report.gram_ok, dev < 1e-8);
        prop_assert!((report.gram_residual - dev).abs() < 1e-8);
        if unit {
            prop_assert!(report.gram_ok && report.periodization_ok);
        }
    }

    #[test]
    fn generic_functions_are_not_refinable(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = if rng.random_bool(0.5) { 2 } else { 3 };
        let mut phi = random_function(&mut rng, p, 1, 1);
        // keep φ̂(0) away from zero so the checks run
        let mean: Complex64 = phi.values().iter().sum();
        if mean.norm() < 0.5 {
            let bump = Complex64::new(1.0, 0.0);
            phi = TestFunction::from_fn(p, 1, 1, |a| phi.values()[a] + bump).unwrap();
        }
        let report = check_mra(&phi, &MraConfig::default()).unwrap();
        prop_assert!(!report.refinable);
        prop_assert!(!report.criterion_ok);
    }
}

#[test]
fn haar_scaling_function_generates_the_haar_mra() {
    for p in [2, 3, 5, 7] {
        let phi = refinable_from_mask(&haar_mask(p).unwrap(), 0, TOL).unwrap();
        assert!(phi.max_abs_diff(&TestFunction::omega(p).unwrap()).unwrap() < 1e-12);
        let report = check_mra(&phi, &MraConfig::default()).unwrap();
        assert!(report.criterion_ok && report.axiom_a_ok && report.shifts_ok && report.axiom_b.ok);
        assert!(check_haar_equivalence(&phi, &MraConfig::default()).unwrap());
    }
}

#[test]
fn coarser_ball_indicator_is_refused() {
    // φ(· - 1/2) = φ for the indicator of B_1, so the shifts are not
    // orthonormal and the Haar comparison has no footing
    let phi = TestFunction::ball_indicator(2, 1)
        .unwrap()
        .scale(Complex64::new(0.5f64.sqrt(), 0.0));
    let o = check_orthonormal_shifts(&phi, TOL).unwrap();
    assert!(!o.gram_ok);
    assert!(check_haar_equivalence(&phi, &MraConfig::default()).is_err());
}
