//! Wavelet sets built from a scaling function: wavelet masks, wavelet
//! functions, verification of the wavelet-space conditions, frame bounds
//! from the Gram spectrum, and a finite multi-level transform.

mod kozyrev;
mod transform;

pub use kozyrev::kozyrev_set;
pub use transform::{analyze, synthesize, CoefficientTree, DetailLevel};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{MraError, Result};
use crate::function::{align, TestFunction};
use crate::linalg::{determinant, hermitian_eigenvalues, span_residuals, CMatrix};
use crate::masks::{apply_refinement, apply_refinement_fourier, Mask, TrigPolynomial};
use crate::mra::{l_set, nonnegative_frame};
use crate::padic::{enumerate_ip_ball, pow, unit_root, PadicRational};

/// Relative cut-off separating the kernel of a Gram matrix from its
/// smallest frame bound.
pub const ZERO_EIGEN_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletSet {
    pub phi: TestFunction,
    pub scaling: Mask,
    /// `ψ^(1) … ψ^(r)`, each in `D_N^(M+1)`.
    pub wavelets: Vec<TestFunction>,
    /// Wavelet masks of the same scale as `scaling`.
    pub masks: Vec<Mask>,
}

impl WaveletSet {
    pub fn prime(&self) -> u32 {
        self.phi.prime()
    }

    /// Scale `N` of the masks.
    pub fn scale(&self) -> u32 {
        self.scaling.scale()
    }

    pub fn count(&self) -> usize {
        self.wavelets.len()
    }

    /// Rescales every wavelet (and its mask) to unit `L^2` norm.
    pub fn normalized(&self) -> Result<WaveletSet> {
        let mut wavelets = Vec::with_capacity(self.wavelets.len());
        let mut masks = Vec::with_capacity(self.masks.len());
        for (psi, mask) in self.wavelets.iter().zip(&self.masks) {
            let norm = psi.norm2();
            if norm == 0.0 {
                return Err(MraError::Degenerate("zero wavelet cannot be normalized".into()));
            }
            let s = Complex64::new(1.0 / norm, 0.0);
            wavelets.push(psi.scale(s));
            let taps: Vec<Complex64> = mask.taps().iter().map(|g| g * s).collect();
            masks.push(Mask::from_taps(self.prime(), mask.scale(), &taps)?);
        }
        Ok(WaveletSet {
            phi: self.phi.clone(),
            scaling: self.scaling.clone(),
            wavelets,
            masks,
        })
    }

    /// Translation block `{ψ^(ν)(· - a) : a ∈ I_p ∩ B_N(0)}` in a common
    /// frame, ordered by `ν` then `a`.
    pub fn generators(&self) -> Result<Vec<TestFunction>> {
        let shifts = enumerate_ip_ball(self.prime(), self.scale());
        let mut out = Vec::with_capacity(shifts.len() * self.wavelets.len());
        for psi in &self.wavelets {
            for a in &shifts {
                out.push(psi.shift(a)?);
            }
        }
        let refs: Vec<&TestFunction> = out.iter().collect();
        align(&refs)
    }
}

/// Reframes `φ` to `D_N^M` with `N` the mask scale and `M >= 0`.
fn scaled_frame(phi: &TestFunction, scale: u32) -> Result<TestFunction> {
    let phi = nonnegative_frame(phi)?;
    if phi.support_exp() > scale as i32 {
        return Err(MraError::InvalidArgument(format!(
            "φ is supported in B_{} but the mask has scale {scale}",
            phi.support_exp()
        )));
    }
    phi.reframe(scale as i32, phi.period_exp())
}

/// Wavelet masks `n^(ν)`, `ν = 1 … p-1`, as polynomials in `z = χ_p(ξ)`:
/// `z^((ν-1)p^N) (z - 1)^(p^N - #L_φ) Π_{l ∈ L_φ} (z - χ_p(l / p^(M+N)))`.
pub fn wavelet_masks(phi: &TestFunction, m0: &Mask, tol: f64) -> Result<Vec<Mask>> {
    let p = m0.prime();
    if phi.prime() != p {
        return Err(MraError::MixedPrimes(p, phi.prime()));
    }
    let n = m0.scale();
    let phi = scaled_frame(phi, n)?;
    let pn = pow(p, n) as usize;
    let limit = (p as usize - 1) * pn;
    let degree = m0.poly().degree(tol).unwrap_or(0);
    if degree > limit {
        return Err(MraError::Unsupported(format!(
            "mask degree {degree} exceeds (p-1)p^N = {limit}; supply wavelet masks explicitly"
        )));
    }
    let lset = l_set(&phi, tol)?;
    if !lset.within_bound() {
        return Err(MraError::Unsupported(format!(
            "#L_φ = {} exceeds p^N = {pn}",
            lset.len()
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let order = pow(p, n + phi.period_exp() as u32);
    let mut core = TrigPolynomial::constant(p, one);
    for _ in lset.len()..pn {
        core = core.mul(&TrigPolynomial::new(p, vec![-one, one]));
    }
    for &l in &lset.members {
        let root = unit_root(l as i128, order);
        core = core.mul(&TrigPolynomial::new(p, vec![-root, one]));
    }
    (1..p as usize)
        .map(|nu| {
            let mut coeffs = vec![Complex64::new(0.0, 0.0); (nu - 1) * pn];
            coeffs.extend_from_slice(core.coeffs());
            Mask::new(n, TrigPolynomial::new(p, coeffs))
        })
        .collect()
}

fn pair_residual(f: &TestFunction, g: &TestFunction, scale: f64) -> Result<f64> {
    Ok(f.inner_product(g)?.norm() / scale)
}

/// `(a, b, ν)` of the worst pair found by [`v0_orthogonality`].
type PairWitness = (String, String, usize);

/// Largest `|⟨φ(· - a), ψ^(ν)(· - b)⟩| / (‖φ‖ ‖ψ^(ν)‖)` over
/// `a, b ∈ I_p ∩ B_N(0)`, with the offending `(a, b, ν)`.
fn v0_orthogonality(
    phi: &TestFunction,
    wavelets: &[TestFunction],
    n: u32,
) -> Result<(f64, Option<PairWitness>)> {
    let shifts = enumerate_ip_ball(phi.prime(), n);
    let phis = shifts.iter().map(|a| phi.shift(a)).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0;
    let mut at = None;
    for (nu, psi) in wavelets.iter().enumerate() {
        let scale = (phi.norm2() * psi.norm2()).max(f64::MIN_POSITIVE);
        for b in &shifts {
            let moved = psi.shift(b)?;
            for (a, f) in shifts.iter().zip(&phis) {
                let r = pair_residual(f, &moved, scale)?;
                if r > worst {
                    worst = r;
                    at = Some((a.to_string(), b.to_string(), nu + 1));
                }
            }
        }
    }
    Ok((worst, at))
}

/// Builds `ψ^(ν)(x) = Σ_k g_k^(ν) φ(x/p - k/p^(N+1))` and verifies the
/// Fourier factorization and orthogonality to `V_0` before returning.
pub fn wavelet_functions(
    phi: &TestFunction,
    scaling: &Mask,
    masks: &[Mask],
    tol: f64,
) -> Result<WaveletSet> {
    let p = scaling.prime();
    let n = scaling.scale();
    let phi = scaled_frame(phi, n)?;
    let mut wavelets = Vec::with_capacity(masks.len());
    for (i, mask) in masks.iter().enumerate() {
        let nu = i + 1;
        if mask.prime() != p {
            return Err(MraError::MixedPrimes(p, mask.prime()));
        }
        if mask.scale() != n {
            return Err(MraError::InvalidArgument(format!(
                "wavelet mask {nu} has scale {}, expected {n}",
                mask.scale()
            )));
        }
        let psi = apply_refinement(mask, &phi)?;
        let scale = psi.max_abs();
        if scale <= tol {
            return Err(MraError::WaveletVerification(format!(
                "wavelet {nu} is the zero function"
            )));
        }
        let spectral = apply_refinement_fourier(mask, &phi)?;
        let r = psi.max_abs_diff(&spectral)? / scale;
        if r > tol {
            return Err(MraError::WaveletVerification(format!(
                "wavelet {nu}: Fourier factorization residual {r:e}"
            )));
        }
        wavelets.push(psi);
    }
    let (worst, at) = v0_orthogonality(&phi, &wavelets, n)?;
    if worst > tol {
        let (a, b, nu) = at.expect("a worst pair exists");
        return Err(MraError::WaveletVerification(format!(
            "⟨φ(· - {a}), ψ^({nu})(· - {b})⟩ has relative size {worst:e}"
        )));
    }
    Ok(WaveletSet {
        phi,
        scaling: scaling.clone(),
        wavelets,
        masks: masks.to_vec(),
    })
}

/// Outcome of [`verify_wavelet_set`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveletVerification {
    /// Largest relative `|⟨φ(· - a), ψ^(ν)(· - b)⟩|`.
    pub v0_residual: f64,
    /// Relative distance of each `φ(x/p - k/p^(N+1))` to the span of the
    /// level-0 translates of `φ` and the `ψ^(ν)`.
    pub inclusion_residuals: Vec<f64>,
    pub inclusion_residual: f64,
    /// Determinant of the square tap system, when `r = p - 1` and every
    /// shifted tap row fits in `p^(N+1)` columns.
    pub system_determinant: Option<Complex64>,
    pub ok: bool,
}

/// Rows `h` and `g^(ν)` shifted by `l < p^N`, as a `p^(N+1)` square
/// matrix, or `None` when the system is not square.
pub fn system_matrix(ws: &WaveletSet) -> Option<CMatrix> {
    let p = ws.prime();
    let n = ws.scale();
    if ws.masks.len() != p as usize - 1 {
        return None;
    }
    let pn = pow(p, n) as usize;
    let size = pow(p, n + 1) as usize;
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(size);
    let mut taps = vec![ws.scaling.taps()];
    taps.extend(ws.masks.iter().map(|m| m.taps()));
    for t in &taps {
        let last = t.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0);
        if last + pn > size {
            return None;
        }
        for l in 0..pn {
            let mut row = vec![Complex64::new(0.0, 0.0); size];
            for (k, c) in t.iter().enumerate().take(last + 1) {
                row[k + l] = *c;
            }
            rows.push(row);
        }
    }
    Some(CMatrix::from_fn(size, size, |i, j| rows[i][j]))
}

pub fn verify_wavelet_set(ws: &WaveletSet, tol: f64) -> Result<WaveletVerification> {
    let p = ws.prime();
    let n = ws.scale();
    let phi = scaled_frame(&ws.phi, n)?;
    let (v0_residual, _) = v0_orthogonality(&phi, &ws.wavelets, n)?;

    let narrowed = phi.dilate(-1);
    let targets = (0..pow(p, n + 1))
        .map(|k| narrowed.shift(&PadicRational::new(p, k as i64, n)))
        .collect::<Result<Vec<_>>>()?;
    let mut generators = Vec::new();
    for a in enumerate_ip_ball(p, n) {
        generators.push(phi.shift(&a)?);
        for psi in &ws.wavelets {
            generators.push(psi.shift(&a)?);
        }
    }
    let mut all: Vec<&TestFunction> = generators.iter().collect();
    all.extend(targets.iter());
    let aligned = align(&all)?;
    let (gens, tgts) = aligned.split_at(generators.len());
    let as_vecs = |fs: &[TestFunction]| fs.iter().map(|f| f.values().to_vec()).collect::<Vec<_>>();
    let inclusion_residuals = span_residuals(&as_vecs(gens), &as_vecs(tgts));
    let inclusion_residual = inclusion_residuals.iter().copied().fold(0.0, f64::max);
    let system_determinant = system_matrix(ws).map(|m| determinant(&m));
    Ok(WaveletVerification {
        v0_residual,
        inclusion_residuals,
        inclusion_residual,
        system_determinant,
        ok: v0_residual <= tol && inclusion_residual <= tol,
    })
}

/// Sylvester resultant of `Σ h_k z^k` and `Σ g_k z^k`, taken with the
/// nominal degrees `len - 1`; equals `h_lead^deg g Π_{h(r)=0} g(r)`.
pub fn resultant(h: &[Complex64], g: &[Complex64]) -> Complex64 {
    let dh = h.len().saturating_sub(1);
    let dg = g.len().saturating_sub(1);
    let size = dh + dg;
    if size == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut a = CMatrix::zeros(size, size);
    for r in 0..dg {
        for (k, c) in h.iter().enumerate() {
            a[(r, r + dh - k)] = *c;
        }
    }
    for r in 0..dh {
        for (k, c) in g.iter().enumerate() {
            a[(dg + r, r + dg - k)] = *c;
        }
    }
    determinant(&a)
}

const FRAME_NOTE: &str = "bounds are the extreme nonzero Gram eigenvalues of the level-0 \
translation block; the same constants hold for every translated block and, with the p^(j/2) \
normalization, for every level";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameReport {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub spectrum: Vec<f64>,
    pub resultant: Option<[f64; 2]>,
    pub inclusion_residual: f64,
    pub v0_residual: f64,
    pub generators: usize,
    pub note: String,
}

/// Gram matrix `G_ij = ⟨g_j, g_i⟩` of the given functions (common frame).
pub fn gram(fs: &[TestFunction]) -> Result<CMatrix> {
    let n = fs.len();
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = fs[j].inner_product(&fs[i])?;
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

pub fn frame_bounds(ws: &WaveletSet, tol: f64) -> Result<FrameReport> {
    let check = verify_wavelet_set(ws, tol)?;
    let generators = ws.generators()?;
    let spectrum = hermitian_eigenvalues(&gram(&generators)?);
    let b = spectrum.last().copied().unwrap_or(0.0);
    if b <= 0.0 {
        return Err(MraError::Degenerate("Gram matrix has no positive eigenvalue".into()));
    }
    let a = spectrum
        .iter()
        .copied()
        .find(|&e| e > ZERO_EIGEN_RTOL * b)
        .unwrap_or(b);
    Ok(FrameReport {
        a,
        b,
        spectrum,
        resultant: check.system_determinant.map(|z| [z.re, z.im]),
        inclusion_residual: check.inclusion_residual,
        v0_residual: check.v0_residual,
        generators: generators.len(),
        note: FRAME_NOTE.to_string(),
    })
}

/// `φ`, its masks and the wavelet set from the construction above, in one call.
pub fn construct_wavelet_set(phi: &TestFunction, scaling: &Mask, tol: f64) -> Result<WaveletSet> {
    let masks = wavelet_masks(phi, scaling, tol)?;
    wavelet_functions(phi, scaling, &masks, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masks::{haar_mask, mask_from_roots, refinable_from_mask};
    use crate::mra::DEFAULT_TOL;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn haar_set(p: u32) -> WaveletSet {
        let mask = haar_mask(p).unwrap();
        let phi = refinable_from_mask(&mask, 0, DEFAULT_TOL).unwrap();
        construct_wavelet_set(&phi, &mask, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn haar_two_masks_and_function() {
        let ws = haar_set(2);
        assert_eq!(ws.masks.len(), 1);
        assert_eq!(ws.masks[0].taps(), vec![c(-2.0), c(2.0)]);
        // 2(1_{1+2Z_2} - 1_{2Z_2}) on the grid {0, 1} of Z_2 / 2Z_2
        let psi = ws.wavelets[0].reframe(0, 1).unwrap();
        assert_eq!(psi.values(), &[c(-2.0), c(2.0)]);
        assert!((psi.norm_sq() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn haar_three_masks() {
        let ws = haar_set(3);
        assert_eq!(ws.masks[0].taps(), vec![c(-3.0), c(3.0)]);
        assert_eq!(ws.masks[1].taps(), vec![c(0.0), c(-3.0), c(3.0)]);
        let v = verify_wavelet_set(&ws, DEFAULT_TOL).unwrap();
        assert!(v.ok);
        assert!((v.system_determinant.unwrap() - c(27.0)).norm() < 1e-9);
    }

    #[test]
    fn haar_resultant_by_hand() {
        assert!((resultant(&[c(1.0), c(1.0)], &[c(-2.0), c(2.0)]) - c(-4.0)).norm() < 1e-12);
        let h = [c(1.0), c(2.0), c(3.0)];
        let g: Vec<Complex64> = h.iter().map(|x| x * 2.5).collect();
        assert!(resultant(&h, &g).norm() < 1e-9);
    }

    #[test]
    fn haar_frame_bounds() {
        let ws = haar_set(2);
        let raw = frame_bounds(&ws, DEFAULT_TOL).unwrap();
        assert!((raw.a - 4.0).abs() < 1e-9 && (raw.b - 4.0).abs() < 1e-9);
        let unit = frame_bounds(&ws.normalized().unwrap(), DEFAULT_TOL).unwrap();
        assert!((unit.a - 1.0).abs() + (unit.b - 1.0).abs() < 1e-9);
        let [re, im] = unit.resultant.unwrap();
        assert!((re - 2.0).abs() < 1e-12 && im.abs() < 1e-12);
    }

    #[test]
    fn replacing_psi_by_phi_breaks_inclusion() {
        let mut ws = haar_set(2);
        ws.wavelets[0] = ws.phi.clone();
        let v = verify_wavelet_set(&ws, DEFAULT_TOL).unwrap();
        assert!(v.inclusion_residual > 1e-3);
        assert!(!v.ok);
    }

    #[test]
    fn zero_taps_rejected() {
        let mask = haar_mask(2).unwrap();
        let phi = refinable_from_mask(&mask, 0, DEFAULT_TOL).unwrap();
        let zero = Mask::from_taps(2, 0, &[c(0.0), c(0.0)]).unwrap();
        assert!(matches!(
            wavelet_functions(&phi, &mask, &[zero], DEFAULT_TOL),
            Err(MraError::WaveletVerification(_))
        ));
    }

    #[test]
    fn example_mask_wavelets() {
        let p = 2;
        let zeros: Vec<PadicRational> = ["1/4", "3/8", "7/16", "15/16"]
            .iter()
            .map(|s| PadicRational::parse(s, p).unwrap())
            .collect();
        let mask = mask_from_roots(p, 2, &zeros).unwrap();
        let phi = refinable_from_mask(&mask, 1, DEFAULT_TOL).unwrap();
        let ws = construct_wavelet_set(&phi, &mask, DEFAULT_TOL).unwrap();
        assert_eq!(ws.masks[0].poly().degree(1e-12), Some(4));
        let v = verify_wavelet_set(&ws, DEFAULT_TOL).unwrap();
        assert!(v.ok, "{v:?}");
        assert!(v.system_determinant.unwrap().norm() > 1e-9);
        let report = frame_bounds(&ws, DEFAULT_TOL).unwrap();
        assert!(report.a > 0.0 && report.a <= report.b);
    }
}
