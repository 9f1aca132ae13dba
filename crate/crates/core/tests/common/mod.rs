#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use padic_mra::function::{lincomb, TestFunction};
use padic_mra::masks::{mask_from_roots, Mask, TrigPolynomial};
use padic_mra::padic::{pow, PadicRational};
use padic_mra::wavelets::WaveletSet;

pub const TOL: f64 = 1e-9;

pub fn example_mask() -> Mask {
    let zeros: Vec<PadicRational> = ["1/4", "3/8", "7/16", "15/16"]
        .iter()
        .map(|s| PadicRational::parse(s, 2).unwrap())
        .collect();
    mask_from_roots(2, 2, &zeros).unwrap()
}

/// Roots chosen so that every unit `u mod p^(N+M+1)` hits a zero of some
/// factor `m(u/p^t)`, padded with a few extra random grid roots. The
/// covering can fail when the root budget runs out, so the result is not
/// guaranteed to pass the support test.
pub fn covering_roots<R: Rng>(rng: &mut R, p: u32, n: u32, m: u32) -> Vec<PadicRational> {
    let depth = n + m + 1;
    let modulus = pow(p, depth);
    let budget = pow(p, n + 1) as usize - 1;
    let mut roots: Vec<PadicRational> = Vec::new();
    let mut units: Vec<u64> = (0..modulus).filter(|u| u % p as u64 != 0).collect();
    units.shuffle(rng);
    let covered = |roots: &[PadicRational], u: u64| {
        (1..=depth).any(|t| {
            let z = PadicRational::new(p, u as i64, t).frac_part();
            roots.contains(&z)
        })
    };
    for u in units {
        if roots.len() >= budget {
            break;
        }
        if covered(&roots, u) {
            continue;
        }
        let t = rng.random_range(1..=depth);
        roots.push(PadicRational::new(p, u as i64, t).frac_part());
    }
    let extra = rng.random_range(0..=2usize);
    for _ in 0..extra {
        if roots.len() >= budget {
            break;
        }
        let t = rng.random_range(1..=depth);
        let k = rng.random_range(1..pow(p, t));
        let z = PadicRational::new(p, k as i64, t).frac_part();
        if !z.is_zero() && !roots.contains(&z) {
            roots.push(z);
        }
    }
    roots
}

/// A mask with random complex coefficients, normalized to `m(0) = 1`.
pub fn random_mask<R: Rng>(rng: &mut R, p: u32, n: u32) -> Mask {
    let len = rng.random_range(1..=pow(p, n + 1) as usize);
    loop {
        let coeffs: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let s: Complex64 = coeffs.iter().sum();
        if s.norm() > 0.1 {
            let coeffs = coeffs.iter().map(|c| c / s).collect();
            return Mask::new(n, TrigPolynomial::new(p, coeffs)).unwrap();
        }
    }
}

/// Mask of scale `N` whose values on the grid `k / p^(N+1)` are 1 at 0,
/// of unit modulus at the other multiples of `p`, and 0 elsewhere.
pub fn unit_pattern_mask<R: Rng>(rng: &mut R, p: u32, n: u32) -> Mask {
    let size = pow(p, n + 1) as usize;
    let values: Vec<Complex64> = (0..size)
        .map(|k| {
            if k == 0 {
                Complex64::new(1.0, 0.0)
            } else if k % p as usize == 0 {
                Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    // inverse DFT: c_j = p^-(N+1) Σ_k v_k e^{-2πi jk / p^(N+1)}
    let coeffs = (0..size)
        .map(|j| {
            values
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / size as f64))
                .sum::<Complex64>()
                / size as f64
        })
        .collect();
    Mask::new(n, TrigPolynomial::new(p, coeffs)).unwrap()
}

pub fn random_function<R: Rng>(rng: &mut R, p: u32, n: i32, m: i32) -> TestFunction {
    let len = pow(p, (n + m) as u32) as usize;
    let values = (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    TestFunction::new(p, n, m, values).unwrap()
}

/// Random element of `V_j` supported in `B_R(0)`:
/// `Σ_k c_k p^(j/2) φ(p^(-j) x - k/p^(R+j))`.
pub fn random_in_v<R: Rng>(rng: &mut R, phi: &TestFunction, j: i32, radius: i32) -> TestFunction {
    let p = phi.prime();
    let base = phi.dilate_normalized(-j);
    let count = pow(p, (radius + j) as u32);
    let terms: Vec<TestFunction> = (0..count)
        .map(|k| base.shift(&PadicRational::new(p, k as i64, radius as u32)).unwrap())
        .collect();
    let coeffs: Vec<Complex64> = (0..count)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    lincomb(&coeffs, &terms).unwrap()
}

/// Random element of the level-0 wavelet translation block.
pub fn random_in_block<R: Rng>(rng: &mut R, ws: &WaveletSet) -> TestFunction {
    let gens = ws.generators().unwrap();
    let coeffs: Vec<Complex64> = gens
        .iter()
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    lincomb(&coeffs, &gens).unwrap()
}

/// `m(ξ) = Σ c_k χ_p(ξ)^k` summed term by term.
pub fn mask_oracle(mask: &Mask, xi: &PadicRational) -> Complex64 {
    let z = xi.character();
    mask.poly()
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c * z.powi(k as i32))
        .sum()
}

/// `φ̂(u/p^s) = Π_{t=1}^{s+N} m(u/p^t)`.
pub fn product_oracle(mask: &Mask, u: u64, s: i32) -> Complex64 {
    let p = mask.prime();
    let top = s + mask.scale() as i32;
    (1..=top.max(0))
        .map(|t| mask_oracle(mask, &PadicRational::new(p, u as i64, t as u32)))
        .product()
}

/// Brute-force test of `supp φ̂ ⊆ B_M(0)` over the spheres
/// `p^(M+1) … p^(M+3)`.
pub fn brute_force_supported(mask: &Mask, m: i32, tol: f64) -> bool {
    let p = mask.prime() as u64;
    (m + 1..=m + 3).all(|s| {
        let top = (s + mask.scale() as i32) as u32;
        (0..pow(mask.prime(), top))
            .filter(|u| u % p != 0)
            .all(|u| product_oracle(mask, u, s).norm() <= tol)
    })
}
