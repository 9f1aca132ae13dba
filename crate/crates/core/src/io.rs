//! JSON documents for test functions, masks and wavelet sets. Complex
//! numbers are written as `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MraError, Result};
use crate::function::TestFunction;
use crate::masks::{refinable_from_mask, Mask};
use crate::wavelets::{wavelet_functions, WaveletSet};

fn to_pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionJson {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: i32,
    #[serde(rename = "M")]
    pub m: i32,
    pub values: Vec<[f64; 2]>,
}

impl From<&TestFunction> for FunctionJson {
    fn from(f: &TestFunction) -> Self {
        let (n, m) = f.frame();
        FunctionJson {
            p: f.prime(),
            n,
            m,
            values: to_pairs(f.values()),
        }
    }
}

impl FunctionJson {
    pub fn to_function(&self) -> Result<TestFunction> {
        TestFunction::new(self.p, self.n, self.m, from_pairs(&self.values))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskJson {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub taps: Vec<[f64; 2]>,
}

impl From<&Mask> for MaskJson {
    fn from(m: &Mask) -> Self {
        MaskJson {
            p: m.prime(),
            n: m.scale(),
            taps: to_pairs(&m.taps()),
        }
    }
}

impl MaskJson {
    pub fn to_mask(&self) -> Result<Mask> {
        crate::padic::check_prime(self.p)?;
        Mask::from_taps(self.p, self.n, &from_pairs(&self.taps))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletSetJson {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: i32,
    pub scaling_taps: Vec<[f64; 2]>,
    pub wavelet_taps: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<FunctionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelets: Option<Vec<FunctionJson>>,
}

impl WaveletSetJson {
    /// Full document including the cached functions.
    pub fn from_set(ws: &WaveletSet) -> Self {
        WaveletSetJson {
            p: ws.prime(),
            n: ws.scale(),
            m: ws.phi.period_exp(),
            scaling_taps: to_pairs(&ws.scaling.taps()),
            wavelet_taps: ws.masks.iter().map(|m| to_pairs(&m.taps())).collect(),
            phi: Some(FunctionJson::from(&ws.phi)),
            wavelets: Some(ws.wavelets.iter().map(FunctionJson::from).collect()),
        }
    }

    /// Rebuilds the set. Cached functions are used when present; otherwise
    /// `φ` comes from the scaling mask and the wavelets from their masks
    /// (and are verified on the way).
    pub fn to_set(&self, tol: f64) -> Result<WaveletSet> {
        crate::padic::check_prime(self.p)?;
        let scaling = Mask::from_taps(self.p, self.n, &from_pairs(&self.scaling_taps))?;
        let masks = self
            .wavelet_taps
            .iter()
            .map(|t| Mask::from_taps(self.p, self.n, &from_pairs(t)))
            .collect::<Result<Vec<_>>>()?;
        let phi = match &self.phi {
            Some(f) => f.to_function()?,
            None => refinable_from_mask(&scaling, self.m, tol)?,
        };
        if phi.prime() != self.p {
            return Err(MraError::MixedPrimes(self.p, phi.prime()));
        }
        match &self.wavelets {
            Some(ws) => {
                if ws.len() != masks.len() {
                    return Err(MraError::Schema(format!(
                        "{} wavelet functions for {} wavelet masks",
                        ws.len(),
                        masks.len()
                    )));
                }
                let wavelets = ws.iter().map(|f| f.to_function()).collect::<Result<Vec<_>>>()?;
                Ok(WaveletSet {
                    phi,
                    scaling,
                    wavelets,
                    masks,
                })
            }
            None => wavelet_functions(&phi, &scaling, &masks, tol),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| MraError::Schema(e.to_string()))
}

pub fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| MraError::Schema(e.to_string()))
}
