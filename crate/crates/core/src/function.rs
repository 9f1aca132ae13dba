//! Test functions in `D_N^M`: locally constant functions supported on the
//! ball `B_N(0)` and constant on cosets of `p^M Z_p`.
//!
//! A function is stored as `p^(N+M)` complex values; entry `a` is the value
//! at the point `a / p^N`. The declared frame `(N, M)` need not be minimal
//! and can always be enlarged without changing the function.

use std::ops::{Add, Mul, Sub};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{MraError, Result};
use crate::padic::{check_prime, pow, PadicRational, UnitRoots};

/// Default cap on the number of grid points of any function.
pub const DEFAULT_GRID_CAP: usize = 1_000_000;

/// Environment variable overriding [`DEFAULT_GRID_CAP`].
pub const GRID_CAP_ENV: &str = "PADIC_MRA_GRID_CAP";

static GRID_CAP: AtomicUsize = AtomicUsize::new(0);

/// Current grid cap: an explicit [`set_grid_cap`] value, else the
/// environment override, else the default.
pub fn grid_cap() -> usize {
    match GRID_CAP.load(Ordering::Relaxed) {
        0 => std::env::var(GRID_CAP_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .filter(|&c: &usize| c > 0)
            .unwrap_or(DEFAULT_GRID_CAP),
        c => c,
    }
}

pub fn set_grid_cap(cap: usize) {
    GRID_CAP.store(cap, Ordering::Relaxed);
}

/// Number of grid points `p^(N+M)` of a frame, checked against the cap.
pub fn grid_size(p: u32, n: i32, m: i32) -> Result<usize> {
    if n + m < 0 {
        return Err(MraError::InvalidFrame(format!(
            "N + M = {} is negative",
            n + m
        )));
    }
    let cap = grid_cap();
    let mut size: u128 = 1;
    for _ in 0..(n + m) {
        size *= p as u128;
        if size > cap as u128 {
            return Err(MraError::GridTooLarge { size, cap });
        }
    }
    Ok(size as usize)
}

/// Inputs at least this long go through the FFT in [`fourier`].
const FAST_TRANSFORM_THRESHOLD: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    p: u32,
    n: i32,
    m: i32,
    values: Vec<Complex64>,
}

impl TestFunction {
    pub fn new(p: u32, n: i32, m: i32, values: Vec<Complex64>) -> Result<Self> {
        check_prime(p)?;
        let size = grid_size(p, n, m)?;
        if values.len() != size {
            return Err(MraError::InvalidFrame(format!(
                "expected {size} values for p = {p}, N = {n}, M = {m}, got {}",
                values.len()
            )));
        }
        Ok(TestFunction { p, n, m, values })
    }

    pub fn zeros(p: u32, n: i32, m: i32) -> Result<Self> {
        let size = grid_size(p, n, m)?;
        TestFunction::new(p, n, m, vec![Complex64::new(0.0, 0.0); size])
    }

    pub fn from_fn(
        p: u32,
        n: i32,
        m: i32,
        f: impl Fn(usize) -> Complex64,
    ) -> Result<Self> {
        let size = grid_size(p, n, m)?;
        TestFunction::new(p, n, m, (0..size).map(f).collect())
    }

    /// `Ω(|x|_p)`, the indicator of `Z_p`.
    pub fn omega(p: u32) -> Result<Self> {
        TestFunction::new(p, 0, 0, vec![Complex64::new(1.0, 0.0)])
    }

    /// Indicator of the ball `B_r(0)`, framed in `D_r^{-r}`.
    pub fn ball_indicator(p: u32, r: i32) -> Result<Self> {
        TestFunction::new(p, r, -r, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    /// Support exponent `N`.
    pub fn support_exp(&self) -> i32 {
        self.n
    }

    /// Period exponent `M`.
    pub fn period_exp(&self) -> i32 {
        self.m
    }

    pub fn frame(&self) -> (i32, i32) {
        (self.n, self.m)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn same_prime(&self, other: &TestFunction) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(MraError::MixedPrimes(self.p, other.p))
        }
    }

    /// Value at the point `t / p^k`, where `k >= N`, `k + M >= 0` and `t` is
    /// already reduced modulo `p^(k+M)`.
    fn value_at_scaled(&self, t: u64, k: i32) -> Complex64 {
        debug_assert!(k >= self.n);
        let q = pow(self.p, (k - self.n) as u32);
        if !t.is_multiple_of(q) {
            return Complex64::new(0.0, 0.0);
        }
        let idx = (t / q) % self.values.len() as u64;
        self.values[idx as usize]
    }

    pub fn evaluate(&self, x: &PadicRational) -> Result<Complex64> {
        if x.prime() != self.p {
            return Err(MraError::MixedPrimes(self.p, x.prime()));
        }
        if !x.norm_le_exp(self.n as i64) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let idx = x
            .scaled_residue(self.n as i64, (self.n + self.m) as u32)
            .expect("points of B_N(0) scale into Z_p");
        Ok(self.values[idx as usize])
    }

    /// The same function declared in the larger frame `(n, m)`.
    pub fn reframe(&self, n: i32, m: i32) -> Result<Self> {
        if n < self.n || m < self.m {
            return Err(MraError::InvalidFrame(format!(
                "cannot shrink frame ({}, {}) to ({n}, {m})",
                self.n, self.m
            )));
        }
        if (n, m) == (self.n, self.m) {
            return Ok(self.clone());
        }
        TestFunction::from_fn(self.p, n, m, |a| self.value_at_scaled(a as u64, n))
    }

    /// The function `x ↦ f(-x)`.
    pub fn reflect(&self) -> Self {
        let len = self.values.len();
        let values = (0..len).map(|a| self.values[(len - a) % len]).collect();
        TestFunction { values, ..*self }
    }

    /// `x ↦ f(x - b)`, framed in `(max(N, e_b), M)` with `e_b` the
    /// denominator exponent of `b`.
    pub fn shift(&self, b: &PadicRational) -> Result<Self> {
        if b.prime() != self.p {
            return Err(MraError::MixedPrimes(self.p, b.prime()));
        }
        let n2 = self.n.max(b.denom_exp() as i32);
        let size = grid_size(self.p, n2, self.m)? as u64;
        let bb = b
            .scaled_residue(n2 as i64, (n2 + self.m) as u32)
            .expect("b p^N' is integral");
        TestFunction::from_fn(self.p, n2, self.m, |a| {
            let t = (a as u64 + size - bb) % size;
            self.value_at_scaled(t, n2)
        })
    }

    /// `x ↦ f(p^j x)`, which lives in `D_{N+j}^{M-j}` with the same values.
    pub fn dilate(&self, j: i32) -> Self {
        TestFunction {
            p: self.p,
            n: self.n + j,
            m: self.m - j,
            values: self.values.clone(),
        }
    }

    /// `x ↦ p^{-j/2} f(p^j x)`, the norm-preserving dilation.
    pub fn dilate_normalized(&self, j: i32) -> Self {
        let s = (self.p as f64).powf(-(j as f64) / 2.0);
        self.dilate(j).scale(Complex64::new(s, 0.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TestFunction {
            values: self.values.iter().map(|v| v * c).collect(),
            ..*self
        }
    }

    pub fn conj(&self) -> Self {
        TestFunction {
            values: self.values.iter().map(|v| v.conj()).collect(),
            ..*self
        }
    }

    /// `⟨f, g⟩ = ∫ f ḡ dx`, exact for locally constant functions.
    pub fn inner_product(&self, other: &TestFunction) -> Result<Complex64> {
        self.same_prime(other)?;
        let (n, m) = common_frame(&[self, other]);
        let f = self.reframe(n, m)?;
        let g = other.reframe(n, m)?;
        let cell = (self.p as f64).powi(-m);
        let s: Complex64 = f
            .values
            .iter()
            .zip(&g.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * cell)
    }

    pub fn norm_sq(&self) -> f64 {
        let cell = (self.p as f64).powi(-self.m);
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell
    }

    /// The `L^2` norm.
    pub fn norm2(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Largest pointwise difference `sup |f - g|`.
    pub fn max_abs_diff(&self, other: &TestFunction) -> Result<f64> {
        self.same_prime(other)?;
        let (n, m) = common_frame(&[self, other]);
        let f = self.reframe(n, m)?;
        let g = other.reframe(n, m)?;
        Ok(f.values
            .iter()
            .zip(&g.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Smallest frame containing every function's frame.
pub fn common_frame(fs: &[&TestFunction]) -> (i32, i32) {
    let n = fs.iter().map(|f| f.n).max().unwrap_or(0);
    let m = fs.iter().map(|f| f.m).max().unwrap_or(0);
    (n, m)
}

/// Reframes all functions to their common frame.
pub fn align(fs: &[&TestFunction]) -> Result<Vec<TestFunction>> {
    let (n, m) = common_frame(fs);
    fs.iter().map(|f| f.reframe(n, m)).collect()
}

/// `Σ c_i f_i`, computed in the common frame.
pub fn lincomb(coeffs: &[Complex64], funcs: &[TestFunction]) -> Result<TestFunction> {
    if coeffs.len() != funcs.len() {
        return Err(MraError::InvalidArgument(format!(
            "{} coefficients for {} functions",
            coeffs.len(),
            funcs.len()
        )));
    }
    let first = funcs
        .first()
        .ok_or_else(|| MraError::InvalidArgument("empty linear combination".into()))?;
    for f in funcs {
        first.same_prime(f)?;
    }
    let refs: Vec<&TestFunction> = funcs.iter().collect();
    let (n, m) = common_frame(&refs);
    let mut out = TestFunction::zeros(first.p, n, m)?;
    for (c, f) in coeffs.iter().zip(funcs) {
        let g = f.reframe(n, m)?;
        for (o, v) in out.values.iter_mut().zip(&g.values) {
            *o += c * v;
        }
    }
    Ok(out)
}

impl Add for &TestFunction {
    type Output = TestFunction;
    fn add(self, rhs: &TestFunction) -> TestFunction {
        let one = Complex64::new(1.0, 0.0);
        lincomb(&[one, one], &[self.clone(), rhs.clone()]).expect("compatible functions")
    }
}

impl Sub for &TestFunction {
    type Output = TestFunction;
    fn sub(self, rhs: &TestFunction) -> TestFunction {
        let one = Complex64::new(1.0, 0.0);
        lincomb(&[one, -one], &[self.clone(), rhs.clone()]).expect("compatible functions")
    }
}

impl Mul<Complex64> for &TestFunction {
    type Output = TestFunction;
    fn mul(self, c: Complex64) -> TestFunction {
        self.scale(c)
    }
}

/// Character sum `p^{-M} Σ_a f_a exp(sign · 2πi l a / p^(N+M))` by direct
/// summation; the trusted reference for the fast path.
fn character_sum_direct(f: &TestFunction, sign: i64) -> Vec<Complex64> {
    let len = f.values.len() as u64;
    let roots = UnitRoots::new(len);
    let cell = (f.p as f64).powi(-f.m);
    (0..len)
        .map(|l| {
            let s: Complex64 = f
                .values
                .iter()
                .enumerate()
                .map(|(a, v)| {
                    let k = (l * a as u64) % len;
                    let k = if sign >= 0 { k } else { (len - k) % len };
                    v * roots.get(k)
                })
                .sum();
            s * cell
        })
        .collect()
}

fn character_sum_fast(f: &TestFunction, sign: i64) -> Vec<Complex64> {
    let len = f.values.len();
    let direction = if sign >= 0 {
        FftDirection::Inverse
    } else {
        FftDirection::Forward
    };
    let plan: Arc<dyn rustfft::Fft<f64>> = FftPlanner::new().plan_fft(len, direction);
    let mut buf = f.values.clone();
    plan.process(&mut buf);
    let cell = (f.p as f64).powi(-f.m);
    buf.iter_mut().for_each(|v| *v *= cell);
    buf
}

fn transformed(f: &TestFunction, values: Vec<Complex64>) -> TestFunction {
    TestFunction {
        p: f.p,
        n: f.m,
        m: f.n,
        values,
    }
}

/// Fourier transform `F[f](ξ) = ∫ χ_p(ξx) f(x) dx` by direct summation.
pub fn fourier_direct(f: &TestFunction) -> TestFunction {
    transformed(f, character_sum_direct(f, 1))
}

/// Fourier transform through an FFT of length `p^(N+M)`.
pub fn fourier_fast(f: &TestFunction) -> TestFunction {
    transformed(f, character_sum_fast(f, 1))
}

/// Fourier transform, mapping `D_N^M` onto `D_M^N`.
pub fn fourier(f: &TestFunction) -> TestFunction {
    if f.values.len() >= FAST_TRANSFORM_THRESHOLD {
        fourier_fast(f)
    } else {
        fourier_direct(f)
    }
}

/// Inverse transform with kernel `χ_p(-ξx)`.
pub fn inv_fourier(f: &TestFunction) -> TestFunction {
    let values = if f.values.len() >= FAST_TRANSFORM_THRESHOLD {
        character_sum_fast(f, -1)
    } else {
        character_sum_direct(f, -1)
    };
    transformed(f, values)
}
