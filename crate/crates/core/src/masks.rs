//! Masks (trigonometric polynomials over `Q_p`), the infinite-product
//! formula for refinable functions, and the refinement operator.
//!
//! A mask of scale `N` is `m(ξ) = Σ_k c_k χ_p(kξ)` with `k < p^(N+1)`;
//! the refinement taps are `h_k = p c_k`. Because `χ_p(kξ) = χ_p(ξ)^k`, the
//! mask is the ordinary polynomial `P(z) = Σ c_k z^k` evaluated at
//! `z = χ_p(ξ)`.

use num_complex::Complex64;

use crate::error::{MraError, Result};
use crate::function::{fourier, grid_size, inv_fourier, lincomb, TestFunction};
use crate::padic::{check_prime, pow, PadicRational, UnitRoots};

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    p: u32,
    coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    pub fn new(p: u32, coeffs: Vec<Complex64>) -> Self {
        TrigPolynomial { p, coeffs }
    }

    /// The polynomial with coefficients `taps / p`.
    pub fn from_taps(p: u32, taps: &[Complex64]) -> Self {
        let s = 1.0 / p as f64;
        TrigPolynomial::new(p, taps.iter().map(|h| h * s).collect())
    }

    pub fn constant(p: u32, c: Complex64) -> Self {
        TrigPolynomial::new(p, vec![c])
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Refinement taps `h_k = p c_k`.
    pub fn taps(&self) -> Vec<Complex64> {
        let p = self.p as f64;
        self.coeffs.iter().map(|c| c * p).collect()
    }

    /// Index of the last coefficient with modulus above `tol`, or `None`
    /// for the zero polynomial.
    pub fn degree(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() > tol)
    }

    /// `P(z)` by Horner's rule.
    pub fn eval_z(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `Σ_k c_k χ_p(kξ)`, summed with exact integer phases.
    pub fn eval(&self, xi: &PadicRational) -> Result<Complex64> {
        if xi.prime() != self.p {
            return Err(MraError::MixedPrimes(self.p, xi.prime()));
        }
        let f = xi.frac_part();
        let e = f.denom_exp();
        let r = f
            .scaled_residue(e as i64, e)
            .expect("fractional parts scale into Z_p");
        Ok(self.eval_grid(r, e))
    }

    /// `m(r / p^e)` for an integer `r`.
    pub fn eval_grid(&self, r: u64, e: u32) -> Complex64 {
        let n = pow(self.p, e);
        let roots = UnitRoots::new(n);
        self.eval_with(&roots, r)
    }

    /// `m(r / n)` with a precomputed table of `n`-th roots of unity.
    pub fn eval_with(&self, roots: &UnitRoots, r: u64) -> Complex64 {
        let n = roots.order();
        let r = r % n;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * roots.get((k as u64 % n) * r % n))
            .sum()
    }

    pub fn mul(&self, other: &TrigPolynomial) -> TrigPolynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return TrigPolynomial::new(self.p, Vec::new());
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TrigPolynomial::new(self.p, out)
    }
}

/// A scaling mask: a trigonometric polynomial together with the support
/// scale `N` of the refinement equation
/// `φ(x) = Σ_{k < p^(N+1)} h_k φ(x/p - k/p^(N+1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    scale: u32,
    poly: TrigPolynomial,
}

impl Mask {
    pub fn new(scale: u32, poly: TrigPolynomial) -> Result<Self> {
        check_prime(poly.p)?;
        let max_len = pow(poly.p, scale + 1) as usize;
        if poly.coeffs.len() > max_len {
            return Err(MraError::InvalidArgument(format!(
                "{} coefficients exceed p^(N+1) = {max_len}",
                poly.coeffs.len()
            )));
        }
        Ok(Mask { scale, poly })
    }

    pub fn from_taps(p: u32, scale: u32, taps: &[Complex64]) -> Result<Self> {
        Mask::new(scale, TrigPolynomial::from_taps(p, taps))
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn prime(&self) -> u32 {
        self.poly.p
    }

    pub fn poly(&self) -> &TrigPolynomial {
        &self.poly
    }

    pub fn taps(&self) -> Vec<Complex64> {
        self.poly.taps()
    }

    pub fn at_zero(&self) -> Complex64 {
        self.poly.coeffs.iter().sum()
    }
}

/// The Haar mask: taps `h_k = 1` for `k < p`, scale 0.
pub fn haar_mask(p: u32) -> Result<Mask> {
    check_prime(p)?;
    Mask::from_taps(p, 0, &vec![Complex64::new(1.0, 0.0); p as usize])
}

/// The minimal-degree mask of scale `N` vanishing at the given points and
/// equal to 1 at 0: `P(z) = Π (z - χ_p(ζ_i)) / Π (1 - χ_p(ζ_i))`.
pub fn mask_from_roots(p: u32, n: u32, zeros: &[PadicRational]) -> Result<Mask> {
    check_prime(p)?;
    let limit = pow(p, n + 1) as usize - 1;
    if zeros.len() > limit {
        return Err(MraError::InfeasibleMask(format!(
            "{} zeros exceed p^(N+1) - 1 = {limit}",
            zeros.len()
        )));
    }
    let mut phases: Vec<PadicRational> = Vec::with_capacity(zeros.len());
    for z in zeros {
        if z.prime() != p {
            return Err(MraError::MixedPrimes(p, z.prime()));
        }
        let f = z.frac_part();
        if f.is_zero() {
            return Err(MraError::InfeasibleMask(format!(
                "χ_p({z}) = 1 would force m(0) = 0"
            )));
        }
        if phases.contains(&f) {
            return Err(MraError::InfeasibleMask(format!(
                "zero {z} repeats the character of an earlier zero"
            )));
        }
        phases.push(f);
    }
    let one = Complex64::new(1.0, 0.0);
    let mut poly = TrigPolynomial::constant(p, one);
    for f in &phases {
        let root = f.character();
        let factor = TrigPolynomial::new(p, vec![-root / (one - root), one / (one - root)]);
        poly = poly.mul(&factor);
    }
    Mask::new(n, poly)
}

/// Values `m(r / p^t)` for `t = 1..=depth` and all residues `r < p^t`.
#[derive(Debug, Clone)]
pub struct ProductTable {
    p: u32,
    scale: u32,
    levels: Vec<Vec<Complex64>>,
}

impl ProductTable {
    pub fn new(mask: &Mask, depth: u32) -> Self {
        let p = mask.prime();
        let levels = (1..=depth)
            .map(|t| {
                let n = pow(p, t);
                let roots = UnitRoots::new(n);
                (0..n).map(|r| mask.poly.eval_with(&roots, r)).collect()
            })
            .collect();
        ProductTable {
            p,
            scale: mask.scale,
            levels,
        }
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    /// `φ̂(u / p^s) = Π_{t=1}^{s+N} m(u / p^t)` (factors with `t <= 0` are 1).
    pub fn product(&self, u: u64, s: i32) -> Complex64 {
        let top = s + self.scale as i32;
        assert!(
            top <= self.depth() as i32,
            "product table too shallow for sphere {s}"
        );
        let mut acc = Complex64::new(1.0, 0.0);
        let mut modulus = 1u64;
        for t in 1..=top.max(0) as usize {
            modulus *= self.p as u64;
            acc *= self.levels[t - 1][(u % modulus) as usize];
        }
        acc
    }
}

/// Decides `supp φ̂ ⊆ B_M(0)` by testing the product on the single sphere
/// `|ξ|_p = p^(M+1)`: `φ̂(u/p^(M+1))` for all units `u mod p^(N+M+1)`.
///
/// Returns the first witness `(u, |φ̂(u/p^(M+1))|)` above `tol`, if any.
pub fn support_witness(mask: &Mask, m: i32, tol: f64) -> Result<Option<(u64, f64)>> {
    let s = m + 1;
    let depth = s + mask.scale as i32;
    if depth <= 0 {
        return Ok(None);
    }
    grid_size(mask.prime(), depth, 0)?;
    let table = ProductTable::new(mask, depth as u32);
    Ok(sphere_witness(&table, s, tol))
}

/// First unit `u mod p^(s+N)` with `|φ̂(u/p^s)| > tol`.
pub fn sphere_witness(table: &ProductTable, s: i32, tol: f64) -> Option<(u64, f64)> {
    let p = table.p as u64;
    let top = (s + table.scale as i32).max(0) as u32;
    let count = pow(table.p, top);
    (0..count)
        .filter(|u| u % p != 0)
        .map(|u| (u, table.product(u, s).norm()))
        .find(|&(_, v)| v > tol)
}

/// Grid values `φ̂(l / p^M)`, `0 <= l < p^(N+M)`, of the normalized
/// solution of the refinement equation (`φ̂(0) = 1`), without any support
/// check.
pub fn refinable_spectrum(mask: &Mask, m: i32) -> Result<TestFunction> {
    let n = mask.scale as i32;
    let size = grid_size(mask.prime(), m, n)?;
    let depth = (n + m).max(0) as u32;
    let table = ProductTable::new(mask, depth);
    TestFunction::from_fn(mask.prime(), m, n, |l| {
        debug_assert!(l < size);
        // l/p^M: factors m(l/p^t) for t = 1..=N+M
        table.product(l as u64, m)
    })
}

/// Builds the refinable function `φ ∈ D_N^M` with
/// `φ̂(ξ) = Π_{j>=0} m(ξ / p^(N-j))`, after verifying that the product is
/// supported in `B_M(0)`.
pub fn refinable_from_mask(mask: &Mask, m: i32, tol: f64) -> Result<TestFunction> {
    let at0 = mask.at_zero();
    if (at0 - Complex64::new(1.0, 0.0)).norm() > tol {
        return Err(MraError::Precondition(format!(
            "mask value at 0 is {at0}, expected 1"
        )));
    }
    if mask.scale as i32 + m < 0 {
        return Err(MraError::InvalidFrame(format!(
            "N + M = {} is negative",
            mask.scale as i32 + m
        )));
    }
    if let Some((u, magnitude)) = support_witness(mask, m, tol)? {
        return Err(MraError::SupportViolation {
            witness: format!("{u}/{}^{}", mask.prime(), m + 1),
            radius_exp: m,
            magnitude,
        });
    }
    let spectrum = refinable_spectrum(mask, m)?;
    Ok(inv_fourier(&spectrum))
}

/// The refinement operator `φ ↦ Σ_k h_k φ(x/p - k/p^(N+1))`, computed in
/// the time domain. The result is framed in `(max(N_φ - 1, N), M_φ + 1)`.
pub fn apply_refinement(mask: &Mask, phi: &TestFunction) -> Result<TestFunction> {
    let p = phi.prime();
    if p != mask.prime() {
        return Err(MraError::MixedPrimes(mask.prime(), p));
    }
    let narrowed = phi.dilate(-1);
    let n_out = (phi.support_exp() - 1).max(mask.scale as i32);
    let m_out = phi.period_exp() + 1;
    let mut terms = Vec::new();
    let mut coeffs = Vec::new();
    for (k, h) in mask.taps().into_iter().enumerate() {
        if h == Complex64::new(0.0, 0.0) {
            continue;
        }
        let b = PadicRational::new(p, k as i64, mask.scale);
        terms.push(narrowed.shift(&b)?);
        coeffs.push(h);
    }
    if terms.is_empty() {
        return TestFunction::zeros(p, n_out, m_out);
    }
    lincomb(&coeffs, &terms)?.reframe(n_out, m_out)
}

/// The refinement operator evaluated on the Fourier side,
/// `ξ ↦ m(ξ / p^N) φ̂(pξ)`, then transformed back.
pub fn apply_refinement_fourier(mask: &Mask, phi: &TestFunction) -> Result<TestFunction> {
    let p = phi.prime();
    if p != mask.prime() {
        return Err(MraError::MixedPrimes(mask.prime(), p));
    }
    let n_out = (phi.support_exp() - 1).max(mask.scale as i32);
    let m_out = phi.period_exp() + 1;
    let spec = fourier(phi);
    let spec_len = spec.len() as u64;
    let roots = UnitRoots::new(pow(p, (m_out + mask.scale as i32) as u32));
    let out_spec = TestFunction::from_fn(p, m_out, n_out, |l| {
        // φ̂(p · l/p^(M+1)) = φ̂(l/p^M), entry l of the spectrum grid
        let inner = spec.values()[(l as u64 % spec_len) as usize];
        if inner == Complex64::new(0.0, 0.0) {
            return inner;
        }
        mask.poly.eval_with(&roots, l as u64) * inner
    })?;
    Ok(inv_fourier(&out_spec))
}
