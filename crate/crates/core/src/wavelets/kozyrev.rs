use num_complex::Complex64;

use super::{construct_wavelet_set, WaveletSet};
use crate::error::{MraError, Result};
use crate::function::TestFunction;
use crate::linalg::span_residuals;
use crate::masks::{haar_mask, Mask};
use crate::padic::{check_prime, unit_root};

const TOL: f64 = 1e-10;

/// The Haar-analog wavelets `ψ^(ν)(x) = χ_p(νx/p) Ω(|x|_p)`,
/// `ν = 1 … p-1`, with unit norm, orthogonality and agreement with the
/// constructed Haar wavelet space all checked before returning.
pub fn kozyrev_set(p: u32) -> Result<WaveletSet> {
    check_prime(p)?;
    let scaling = haar_mask(p)?;
    let phi = TestFunction::omega(p)?;
    let n = p as u64;
    let mut wavelets = Vec::new();
    let mut masks = Vec::new();
    for nu in 1..p as i128 {
        // value at the grid point k ∈ Z_p / pZ_p is χ_p(νk/p) = e^{2πiνk/p}
        let taps: Vec<Complex64> = (0..n).map(|k| unit_root(nu * k as i128, n)).collect();
        wavelets.push(TestFunction::new(p, 0, 1, taps.clone())?);
        masks.push(Mask::from_taps(p, 0, &taps)?);
    }
    let ws = WaveletSet {
        phi,
        scaling,
        wavelets,
        masks,
    };
    verify(&ws)?;
    Ok(ws)
}

fn fail(msg: String) -> MraError {
    MraError::WaveletVerification(msg)
}

fn verify(ws: &WaveletSet) -> Result<()> {
    let p = ws.prime();
    for (i, a) in ws.wavelets.iter().enumerate() {
        for (j, b) in ws.wavelets.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            let v = a.inner_product(b)?;
            if (v - Complex64::new(expect, 0.0)).norm() > TOL {
                return Err(fail(format!("⟨ψ^({}), ψ^({})⟩ = {v}", i + 1, j + 1)));
            }
        }
        let v = a.inner_product(&ws.phi)?;
        if v.norm() > TOL {
            return Err(fail(format!("⟨ψ^({}), Ω⟩ = {v}", i + 1)));
        }
    }
    let haar = construct_wavelet_set(&ws.phi, &ws.scaling, TOL)?;
    let ours: Vec<Vec<Complex64>> = ws.wavelets.iter().map(|f| f.values().to_vec()).collect();
    let theirs = haar
        .wavelets
        .iter()
        .map(|f| f.reframe(0, 1).map(|g| g.into_values()))
        .collect::<Result<Vec<_>>>()?;
    let worst = span_residuals(&ours, &theirs)
        .into_iter()
        .chain(span_residuals(&theirs, &ours))
        .fold(0.0, f64::max);
    if worst > TOL {
        return Err(fail(format!(
            "span differs from the constructed Haar wavelets for p = {p} (residual {worst:e})"
        )));
    }
    Ok(())
}
