mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padic_mra::function::fourier;
use padic_mra::linalg::span_residuals;
use padic_mra::masks::{haar_mask, mask_from_roots, refinable_from_mask};
use padic_mra::mra::l_set;
use padic_mra::padic::PadicRational;
use padic_mra::wavelets::{
    analyze, construct_wavelet_set, frame_bounds, kozyrev_set, resultant, synthesize,
    verify_wavelet_set,
    WaveletSet,
};

use common::{covering_roots, mask_oracle, random_in_block, random_in_v, TOL};

/// Roots of `Σ c_k z^k` by Durand-Kerner iteration.
fn roots(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let lead = c[d];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, k| acc * z + k);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d).map(|i| seed.powi(i as i32)).collect();
    for _ in 0..2000 {
        let prev = z.clone();
        for i in 0..d {
            let denom: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| z[i] - z[j])
                .product();
            let step = eval(z[i]) / denom;
            z[i] -= step;
        }
        let moved = z.iter().zip(&prev).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn poly(rng: &mut ChaCha8Rng, degree: usize) -> Vec<Complex64> {
    (0..=degree)
        .map(|k| {
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            // keep the leading coefficient away from zero
            if k == degree { c + c / c.norm() } else { c }
        })
        .collect()
}

/// A wavelet set built from a random refinable function, if the
/// construction applies.
fn random_set(seed: u64) -> Option<WaveletSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = if rng.random_bool(0.5) { 2 } else { 3 };
    let n = rng.random_range(0..=1u32);
    let m = rng.random_range(0..=1u32);
    let mask = mask_from_roots(p, n, &covering_roots(&mut rng, p, n, m)).ok()?;
    let phi = refinable_from_mask(&mask, m as i32, TOL).ok()?;
    construct_wavelet_set(&phi, &mask, TOL).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn resultant_matches_root_product(seed in any::<u64>(), dh in 1usize..=4, dg in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = poly(&mut rng, dh);
        let g = poly(&mut rng, dg);
        // Res(h, g) = lc(h)^deg g Π_{h(r) = 0} g(r)
        let eval_g = |z: Complex64| g.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, k| acc * z + k);
        let want = h[dh].powi(dg as i32) * roots(&h).into_iter().map(eval_g).product::<Complex64>();
        let got = resultant(&h, &g);
        prop_assert!((got - want).norm() < 1e-8 * (1.0 + want.norm()), "{got} vs {want}");
    }

    #[test]
    fn common_root_kills_resultant(seed in any::<u64>(), dh in 0usize..=3, dg in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = Complex64::from_polar(1.0, rng.random_range(0.0..6.0));
        let factor = [-r, Complex64::new(1.0, 0.0)];
        let times = |c: &[Complex64]| {
            let mut out = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                out[i] += a * factor[0];
                out[i + 1] += a * factor[1];
            }
            out
        };
        let h = times(&poly(&mut rng, dh));
        let g = times(&poly(&mut rng, dg));
        prop_assert!(resultant(&h, &g).norm() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wavelet_spectrum_factorizes(seed in any::<u64>()) {
        let Some(ws) = random_set(seed) else { return Ok(()) };
        let p = ws.prime();
        let n = ws.scale();
        let phi_spec = fourier(&ws.phi);
        for (psi, mask) in ws.wavelets.iter().zip(&ws.masks) {
            let spec = fourier(psi);
            let (m1, _) = spec.frame();
            for l in 0..spec.len() as u64 {
                // ψ̂(ξ) = n(ξ/p^N) φ̂(pξ) at ξ = l/p^m1
                let xi = PadicRational::new(p, l as i64, m1 as u32);
                let arg = PadicRational::new(p, l as i64, m1 as u32 + n);
                let inner = phi_spec.evaluate(&xi.scale(p as i64)).unwrap();
                let want = mask_oracle(mask, &arg) * inner;
                prop_assert!((spec.values()[l as usize] - want).norm() < 1e-8 * (1.0 + want.norm()));
            }
        }
    }

    #[test]
    fn wavelet_masks_vanish_on_lset(seed in any::<u64>()) {
        let Some(ws) = random_set(seed) else { return Ok(()) };
        let p = ws.prime();
        let lset = l_set(&ws.phi, TOL).unwrap();
        for mask in &ws.masks {
            for &l in &lset.members {
                let xi = PadicRational::new(p, l as i64, lset.m + lset.n);
                prop_assert!(mask_oracle(mask, &xi).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn constructed_sets_verify(seed in any::<u64>()) {
        let Some(ws) = random_set(seed) else { return Ok(()) };
        let check = verify_wavelet_set(&ws, TOL).unwrap();
        prop_assert!(check.ok, "{:?}", check);
        prop_assert!(check.v0_residual < 1e-9);
    }

    #[test]
    fn frame_bounds_sandwich_block_energy(seed in any::<u64>()) {
        let Some(ws) = random_set(seed) else { return Ok(()) };
        let report = frame_bounds(&ws, TOL).unwrap();
        prop_assert!(0.0 < report.a && report.a <= report.b);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..5 {
            let f = random_in_block(&mut rng, &ws);
            let energy = analyze(&f, &ws, -1, 2).unwrap().detail_energy();
            let norm = f.norm_sq();
            prop_assert!(report.a * norm * (1.0 - 1e-8) <= energy);
            prop_assert!(energy <= report.b * norm * (1.0 + 1e-8));
        }
    }

    #[test]
    fn analysis_then_synthesis_is_identity(seed in any::<u64>(), j0 in -1i32..=0, depth in 1i32..=2) {
        let Some(ws) = random_set(seed) else { return Ok(()) };
        let j1 = j0 + depth;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf00d);
        let radius = ws.scale() as i32 + 1;
        let f = random_in_v(&mut rng, &ws.phi, j1, radius);
        let tree = analyze(&f, &ws, j0, j1).unwrap();
        prop_assert_eq!(tree.details.len(), depth as usize);
        let back = synthesize(&tree, &ws).unwrap();
        prop_assert!(back.max_abs_diff(&f).unwrap() < 1e-8 * (1.0 + f.max_abs()));
    }
}

#[test]
fn haar_wavelets_span_the_standard_set() {
    for p in [2, 3, 5] {
        let mask = haar_mask(p).unwrap();
        let phi = refinable_from_mask(&mask, 0, TOL).unwrap();
        let built = construct_wavelet_set(&phi, &mask, TOL).unwrap();
        let standard = kozyrev_set(p).unwrap();
        let a: Vec<Vec<Complex64>> = built.generators().unwrap().iter().map(|f| f.values().to_vec()).collect();
        let b: Vec<Vec<Complex64>> = standard.generators().unwrap().iter().map(|f| f.values().to_vec()).collect();
        assert!(span_residuals(&a, &b).into_iter().all(|r| r < 1e-10));
        assert!(span_residuals(&b, &a).into_iter().all(|r| r < 1e-10));
        let bounds = frame_bounds(&standard, TOL).unwrap();
        assert!((bounds.a - 1.0).abs() < 1e-10 && (bounds.b - 1.0).abs() < 1e-10);
    }
}
