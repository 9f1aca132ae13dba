//! Dense complex linear algebra used by the verifiers: minimal-norm least
//! squares, span-inclusion residuals, Hermitian spectra and determinants.
//! Matrices are held as `nalgebra` values; factorizations go through `faer`.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative cut-off below which singular values count as zero.
const RANK_RTOL: f64 = 1e-11;

fn to_faer(a: &CMatrix) -> Mat<Complex64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Thin SVD `a = U diag(s) V^H` as `(U, s, V)`, or `None` if the
/// iteration fails to converge.
fn thin_svd(a: &CMatrix) -> Option<(CMatrix, Vec<f64>, CMatrix)> {
    let svd = to_faer(a).thin_svd().ok()?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S().column_vector().iter().map(|z| z.re).collect();
    let u = CMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]);
    let v = CMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]);
    Some((u, s, v))
}

fn cutoff(s: &[f64]) -> f64 {
    let smax = s.iter().copied().fold(0.0, f64::max);
    (smax * RANK_RTOL).max(f64::MIN_POSITIVE)
}

/// Moore-Penrose pseudo-inverse with the library's rank cut-off.
pub fn pseudo_inverse(a: &CMatrix) -> CMatrix {
    if a.nrows() == 0 || a.ncols() == 0 {
        return CMatrix::zeros(a.ncols(), a.nrows());
    }
    let Some((u, s, v)) = thin_svd(a) else {
        return CMatrix::zeros(a.ncols(), a.nrows());
    };
    let eps = cutoff(&s);
    let mut vs = v;
    for (j, &sj) in s.iter().enumerate() {
        let inv = if sj > eps { 1.0 / sj } else { 0.0 };
        vs.column_mut(j).scale_mut(inv);
    }
    vs * u.adjoint()
}

/// Minimal-norm least-squares solution of `a x = b`, together with the
/// Euclidean norm of the residual `a x - b`.
pub fn lstsq(a: &CMatrix, b: &CVector) -> (CVector, f64) {
    if a.ncols() == 0 || a.nrows() == 0 {
        return (CVector::zeros(a.ncols()), b.norm());
    }
    let x = pseudo_inverse(a) * b;
    let r = (a * &x - b).norm();
    (x, r)
}

/// Numerical rank with the same relative cut-off as [`lstsq`].
pub fn rank(a: &CMatrix) -> usize {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0;
    }
    let Ok(s) = to_faer(a).singular_values() else {
        return 0;
    };
    let smax = s.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > smax * RANK_RTOL).count()
}

/// Builds a matrix whose columns are the given vectors.
pub fn columns(cols: &[Vec<Complex64>]) -> CMatrix {
    let nrows = cols.first().map_or(0, |c| c.len());
    CMatrix::from_fn(nrows, cols.len(), |i, j| cols[j][i])
}

/// For each target, the relative distance `‖t - P t‖ / ‖t‖` to the span of
/// `generators` (all vectors on the same grid). Zero targets give zero.
pub fn span_residuals(generators: &[Vec<Complex64>], targets: &[Vec<Complex64>]) -> Vec<f64> {
    let a = columns(generators);
    let pinv = (!generators.is_empty()).then(|| pseudo_inverse(&a));
    targets
        .iter()
        .map(|t| {
            let b = CVector::from_column_slice(t);
            let nb = b.norm();
            if nb == 0.0 {
                return 0.0;
            }
            match &pinv {
                Some(pi) => (&a * (pi * &b) - &b).norm() / nb,
                None => 1.0,
            }
        })
        .collect()
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(g: &CMatrix) -> Vec<f64> {
    if g.nrows() == 0 {
        return Vec::new();
    }
    // Symmetrize to remove rounding asymmetry before the solver.
    let h = (g + g.adjoint()).map(|z| z * 0.5);
    let mut ev = to_faer(&h)
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("Hermitian eigenvalue iteration converges");
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn determinant(a: &CMatrix) -> Complex64 {
    if a.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    to_faer(a).determinant()
}
