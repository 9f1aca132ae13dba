//! Finite multi-level expansion over `V_{j0} ⊕ W_{j0} ⊕ … ⊕ W_{j1-1}`
//! with elements `p^(j/2) g(p^(-j) x - a)`. Each block is inverted
//! through the pseudo-inverse of its Gram matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::WaveletSet;
use crate::error::{MraError, Result};
use crate::function::{grid_size, TestFunction};
use crate::linalg::{pseudo_inverse, CMatrix, CVector};
use crate::padic::{pow, PadicRational};

/// Largest number of elements in one block.
const MAX_BLOCK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailLevel {
    pub j: i32,
    /// `coeffs[ν-1][k]` is `⟨f, ψ^(ν)_{j,a}⟩` for `a = k / p^(R+j)`.
    pub coeffs: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTree {
    pub p: u32,
    pub j0: i32,
    pub j1: i32,
    /// Radius exponent `R` of the analysed region `B_R(0)`.
    pub radius: i32,
    /// Period exponent of the reconstruction grid.
    pub period: i32,
    /// `⟨f, φ_{j0,a}⟩` for `a = k / p^(R+j0)`.
    pub scaling: Vec<Complex64>,
    pub details: Vec<DetailLevel>,
}

impl CoefficientTree {
    /// `Σ |⟨f, ψ^(ν)_{j,a}⟩|^2` over all detail levels.
    pub fn detail_energy(&self) -> f64 {
        self.details
            .iter()
            .flat_map(|d| d.coeffs.iter().flatten())
            .map(|c| c.norm_sqr())
            .sum()
    }
}

/// `p^(j/2) g(p^(-j) x - k/p^(R+j))` for all `k < p^(R+j)`, as columns
/// on the `(R, period)` grid.
fn level_elements(g: &TestFunction, j: i32, radius: i32, period: i32) -> Result<Vec<TestFunction>> {
    let p = g.prime();
    let count = pow(p, (radius + j) as u32);
    if count > MAX_BLOCK {
        return Err(MraError::GridTooLarge {
            size: count as u128,
            cap: MAX_BLOCK as usize,
        });
    }
    let base = g.dilate_normalized(-j);
    (0..count)
        .map(|k| {
            base.shift(&PadicRational::new(p, k as i64, radius as u32))?
                .reframe(radius, period)
        })
        .collect()
}

fn matrix(elements: &[TestFunction]) -> CMatrix {
    let rows = elements.first().map_or(0, |e| e.len());
    CMatrix::from_fn(rows, elements.len(), |i, k| elements[k].values()[i])
}

struct Block {
    a: CMatrix,
    cell: f64,
}

impl Block {
    fn new(elements: &[TestFunction], period: i32, p: u32) -> Block {
        Block {
            a: matrix(elements),
            cell: (p as f64).powi(-period),
        }
    }

    fn coefficients(&self, f: &CVector) -> CVector {
        self.a.adjoint() * f * Complex64::new(self.cell, 0.0)
    }

    fn project(&self, c: &CVector) -> CVector {
        let g = self.a.adjoint() * &self.a * Complex64::new(self.cell, 0.0);
        &self.a * (pseudo_inverse(&g) * c)
    }
}

struct Layout {
    radius: i32,
    period: i32,
}

fn layout(ws: &WaveletSet, j0: i32, j1: i32, f: Option<&TestFunction>) -> Result<Layout> {
    if j0 > j1 {
        return Err(MraError::InvalidArgument(format!("level range {j0}..{j1} is empty")));
    }
    let n = ws.scale() as i32;
    let m = ws.phi.period_exp().max(0);
    let mut radius = n - j0;
    let mut period = m + j1;
    if let Some(f) = f {
        radius = radius.max(f.support_exp());
        period = period.max(f.period_exp());
    }
    grid_size(ws.prime(), radius, period)?;
    Ok(Layout { radius, period })
}

/// Analysis coefficients of `f` over levels `j0 … j1-1` on the smallest
/// ball `B_R(0)` containing `supp f` and the support of `φ_{j0,0}`.
pub fn analyze(f: &TestFunction, ws: &WaveletSet, j0: i32, j1: i32) -> Result<CoefficientTree> {
    let p = ws.prime();
    if f.prime() != p {
        return Err(MraError::MixedPrimes(p, f.prime()));
    }
    let Layout { radius, period } = layout(ws, j0, j1, Some(f))?;
    let fv = CVector::from_column_slice(f.reframe(radius, period)?.values());
    let v = level_elements(&ws.phi, j0, radius, period)?;
    let scaling = Block::new(&v, period, p).coefficients(&fv);
    let mut details = Vec::new();
    for j in j0..j1 {
        let mut coeffs = Vec::with_capacity(ws.count());
        for psi in &ws.wavelets {
            let e = level_elements(psi, j, radius, period)?;
            coeffs.push(Block::new(&e, period, p).coefficients(&fv).iter().copied().collect());
        }
        details.push(DetailLevel { j, coeffs });
    }
    Ok(CoefficientTree {
        p,
        j0,
        j1,
        radius,
        period,
        scaling: scaling.iter().copied().collect(),
        details,
    })
}

/// Reconstructs `P_{V_{j1}} f` from its analysis coefficients.
pub fn synthesize(tree: &CoefficientTree, ws: &WaveletSet) -> Result<TestFunction> {
    let p = ws.prime();
    if tree.p != p {
        return Err(MraError::MixedPrimes(p, tree.p));
    }
    let Layout { radius, period } = layout(ws, tree.j0, tree.j1, None)?;
    if tree.radius < radius || tree.period < period {
        return Err(MraError::Schema(format!(
            "coefficient tree frame ({}, {}) is smaller than the wavelet set needs",
            tree.radius, tree.period
        )));
    }
    let (radius, period) = (tree.radius, tree.period);
    let size = grid_size(p, radius, period)?;
    let mut out = CVector::zeros(size);
    let v = level_elements(&ws.phi, tree.j0, radius, period)?;
    if v.len() != tree.scaling.len() {
        return Err(MraError::Schema(format!(
            "{} scaling coefficients, expected {}",
            tree.scaling.len(),
            v.len()
        )));
    }
    out += Block::new(&v, period, p).project(&CVector::from_column_slice(&tree.scaling));
    if tree.details.len() != (tree.j1 - tree.j0) as usize {
        return Err(MraError::Schema("detail levels do not match j0..j1".into()));
    }
    for level in &tree.details {
        if level.coeffs.len() != ws.count() {
            return Err(MraError::Schema(format!(
                "level {} has {} wavelet rows, expected {}",
                level.j,
                level.coeffs.len(),
                ws.count()
            )));
        }
        let mut elements = Vec::new();
        let mut coeffs = Vec::new();
        for (psi, c) in ws.wavelets.iter().zip(&level.coeffs) {
            let e = level_elements(psi, level.j, radius, period)?;
            if e.len() != c.len() {
                return Err(MraError::Schema(format!(
                    "level {} has {} coefficients per wavelet, expected {}",
                    level.j,
                    c.len(),
                    e.len()
                )));
            }
            elements.extend(e);
            coeffs.extend_from_slice(c);
        }
        out += Block::new(&elements, period, p).project(&CVector::from_column_slice(&coeffs));
    }
    TestFunction::new(p, radius, period, out.iter().copied().collect())
}
