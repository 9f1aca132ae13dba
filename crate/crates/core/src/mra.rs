//! MRA generation criteria for test functions: the index set `L_φ`,
//! refinement-mask recovery, shift expansions, and the orthonormality
//! characterization of scaling functions.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{MraError, Result};
use crate::function::{fourier, lincomb, TestFunction};
use crate::linalg::{lstsq, span_residuals, CMatrix, CVector};
use crate::masks::{apply_refinement, Mask, TrigPolynomial};
use crate::padic::{enumerate_ip_ball, pow, PadicRational, UnitRoots};

/// Default tolerance for "equals zero" decisions on floating values.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Knobs for [`check_mra`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MraConfig {
    pub tol: f64,
    /// Inclusive range of sphere exponents `s` checked for the density axiom.
    pub sphere_range: (i32, i32),
}

impl Default for MraConfig {
    fn default() -> Self {
        MraConfig {
            tol: DEFAULT_TOL,
            sphere_range: (-6, 6),
        }
    }
}

/// Reframes `φ` so that both `N` and `M` are nonnegative.
pub fn nonnegative_frame(phi: &TestFunction) -> Result<TestFunction> {
    phi.reframe(phi.support_exp().max(0), phi.period_exp().max(0))
}

fn frame_exps(phi: &TestFunction) -> (u32, u32) {
    (phi.support_exp() as u32, phi.period_exp() as u32)
}

/// Relative pointwise residual `sup|f - g| / sup|reference|`.
fn relative_residual(f: &TestFunction, g: &TestFunction, reference: &TestFunction) -> Result<f64> {
    let scale = reference.max_abs().max(f64::MIN_POSITIVE);
    Ok(f.max_abs_diff(g)? / scale)
}

/// The set `L_φ` of grid indices `l < p^(N+M)` with `φ̂(l/p^M) ≠ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LSet {
    pub p: u32,
    pub n: u32,
    pub m: u32,
    pub members: Vec<u64>,
    /// Smallest `|φ̂|` among members.
    pub min_included: Option<f64>,
    /// Largest `|φ̂|` among excluded grid points, to expose borderline cases.
    pub max_excluded: Option<f64>,
}

impl LSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, l: u64) -> bool {
        self.members.binary_search(&l).is_ok()
    }

    /// The bound `#L_φ <= p^N`.
    pub fn within_bound(&self) -> bool {
        self.members.len() as u64 <= pow(self.p, self.n)
    }
}

pub fn l_set(phi: &TestFunction, tol: f64) -> Result<LSet> {
    let phi = nonnegative_frame(phi)?;
    let (n, m) = frame_exps(&phi);
    let spec = fourier(&phi);
    let mut members = Vec::new();
    let mut min_included: Option<f64> = None;
    let mut max_excluded: Option<f64> = None;
    for (l, v) in spec.values().iter().enumerate() {
        let a = v.norm();
        if a > tol {
            members.push(l as u64);
            min_included = Some(min_included.map_or(a, |x| x.min(a)));
        } else {
            max_excluded = Some(max_excluded.map_or(a, |x| x.max(a)));
        }
    }
    Ok(LSet {
        p: phi.prime(),
        n,
        m,
        members,
        min_included,
        max_excluded,
    })
}

fn check_nonzero_mean(spec: &TestFunction, tol: f64) -> Result<()> {
    let v0 = spec.values()[0].norm();
    if v0 <= tol {
        return Err(MraError::Precondition(format!(
            "Fourier transform vanishes at 0 (|φ̂(0)| = {v0:e})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredMask {
    pub mask: Mask,
    /// Relative sup-norm residual of the time-domain refinement equation.
    pub residual: f64,
}

/// Solves `φ̂(ξ) = m(ξ/p^N) φ̂(pξ)` for the taps `h_0 … h_{p^(N+1)-1}` by
/// minimal-norm least squares, then checks the time-domain refinement
/// equation on the refined grid.
pub fn recover_mask(phi: &TestFunction, tol: f64) -> Result<RecoveredMask> {
    let phi = nonnegative_frame(phi)?;
    let (n, m) = frame_exps(&phi);
    let p = phi.prime();
    let spec = fourier(&phi);
    check_nonzero_mean(&spec, tol)?;
    // Grid ξ = l/p^(M+1), l < p^(N+M+1).
    let fine = spec.reframe(m as i32 + 1, n as i32)?;
    let coarse_len = spec.len() as u64;
    let roots = UnitRoots::new(pow(p, n + m + 1));
    let ntaps = pow(p, n + 1) as usize;
    let rows: Vec<usize> = (0..fine.len())
        .filter(|&l| spec.values()[(l as u64 % coarse_len) as usize].norm() > tol)
        .collect();
    let inv_p = 1.0 / p as f64;
    let a = CMatrix::from_fn(rows.len(), ntaps, |i, k| {
        let l = rows[i] as u64;
        roots.get(k as u64 * l) * spec.values()[(l % coarse_len) as usize] * inv_p
    });
    let b = CVector::from_fn(rows.len(), |i, _| fine.values()[rows[i]]);
    let (x, _) = lstsq(&a, &b);
    let taps: Vec<Complex64> = x.iter().copied().collect();
    let mask = Mask::from_taps(p, n, &taps)?;
    let refined = apply_refinement(&mask, &phi)?;
    let residual = relative_residual(&refined, &phi, &phi)?;
    if residual < tol {
        Ok(RecoveredMask { mask, residual })
    } else {
        Err(MraError::NotRefinable { residual })
    }
}

/// Which expansion a shift is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftScale {
    /// `φ(x - b) = Σ_{k < p^N} α_k φ(x - k/p^N)`.
    Same,
    /// `φ(x - b) = Σ_{k < p^(N+1)} h_k φ(x/p - k/p^(N+1))`.
    Refined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftMask {
    pub shift: PadicRational,
    pub scale: ShiftScale,
    /// `α_k` (same scale) or `h_k` (refined scale).
    pub coeffs: Vec<Complex64>,
    /// Relative sup-norm residual of the reconstructed shift.
    pub residual: f64,
}

impl ShiftMask {
    /// The shift mask `m_b`: `Σ α_k χ(kη)` (same scale) or
    /// `(1/p) Σ h_k χ(kη)` (refined scale).
    pub fn poly(&self) -> TrigPolynomial {
        let p = self.shift.prime();
        match self.scale {
            ShiftScale::Same => TrigPolynomial::new(p, self.coeffs.clone()),
            ShiftScale::Refined => TrigPolynomial::from_taps(p, &self.coeffs),
        }
    }
}

/// Finds the coefficients expressing `φ(· - b)` through the shifts of `φ`
/// (same scale) or through `φ(·/p - k/p^(N+1))` (refined scale), and
/// verifies the expansion pointwise.
pub fn shift_mask(
    phi: &TestFunction,
    b: &PadicRational,
    scale: ShiftScale,
    tol: f64,
) -> Result<ShiftMask> {
    let phi = nonnegative_frame(phi)?;
    let (n, m) = frame_exps(&phi);
    let p = phi.prime();
    if b.prime() != p {
        return Err(MraError::MixedPrimes(p, b.prime()));
    }
    if !b.norm_le_exp(n as i64) {
        return Err(MraError::Precondition(format!(
            "|{b}|_p exceeds p^N = {}",
            pow(p, n)
        )));
    }
    let spec = fourier(&phi);
    let target = phi.shift(b)?;
    let (coeffs, rebuilt) = match scale {
        ShiftScale::Same => {
            // m_b(l/p^(M+N)) = χ(b l / p^M) for l ∈ L_φ
            let roots = UnitRoots::new(pow(p, n + m));
            let rows: Vec<u64> = (0..spec.len() as u64)
                .filter(|&l| spec.values()[l as usize].norm() > tol)
                .collect();
            let cols = pow(p, n) as usize;
            let a = CMatrix::from_fn(rows.len(), cols, |i, k| roots.get(k as u64 * rows[i]));
            let rhs = CVector::from_fn(rows.len(), |i, _| {
                b.mul(&PadicRational::new(p, rows[i] as i64, m))
                    .expect("same prime")
                    .character()
            });
            let (x, _) = lstsq(&a, &rhs);
            let coeffs: Vec<Complex64> = x.iter().copied().collect();
            let shifts: Vec<TestFunction> = (0..cols)
                .map(|k| phi.shift(&PadicRational::new(p, k as i64, n)))
                .collect::<Result<_>>()?;
            let rebuilt = lincomb(&coeffs, &shifts)?;
            (coeffs, rebuilt)
        }
        ShiftScale::Refined => {
            // χ(bξ) φ̂(ξ) = m_b(ξ/p^N) φ̂(pξ) on ξ = l/p^(M+1)
            let fine = spec.reframe(m as i32 + 1, n as i32)?;
            let coarse_len = spec.len() as u64;
            let roots = UnitRoots::new(pow(p, n + m + 1));
            let ntaps = pow(p, n + 1) as usize;
            let rows: Vec<u64> = (0..fine.len() as u64)
                .filter(|&l| spec.values()[(l % coarse_len) as usize].norm() > tol)
                .collect();
            let inv_p = 1.0 / p as f64;
            let a = CMatrix::from_fn(rows.len(), ntaps, |i, k| {
                let l = rows[i];
                roots.get(k as u64 * l) * spec.values()[(l % coarse_len) as usize] * inv_p
            });
            let rhs = CVector::from_fn(rows.len(), |i, _| {
                let l = rows[i];
                let phase = b
                    .mul(&PadicRational::new(p, l as i64, m + 1))
                    .expect("same prime")
                    .character();
                phase * fine.values()[l as usize]
            });
            let (x, _) = lstsq(&a, &rhs);
            let coeffs: Vec<Complex64> = x.iter().copied().collect();
            let rebuilt = apply_refinement(&Mask::from_taps(p, n, &coeffs)?, &phi)?;
            (coeffs, rebuilt)
        }
    };
    let residual = relative_residual(&rebuilt, &target, &phi)?;
    if residual < tol {
        Ok(ShiftMask {
            shift: b.clone(),
            scale,
            coeffs,
            residual,
        })
    } else {
        Err(MraError::ShiftNotExpressible {
            shift: b.to_string(),
            residual,
        })
    }
}

/// One row of the per-shift residual table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftWitness {
    pub shift: String,
    pub residual: f64,
    pub ok: bool,
}

fn witness(phi: &TestFunction, b: &PadicRational, scale: ShiftScale, tol: f64) -> Result<ShiftWitness> {
    match shift_mask(phi, b, scale, tol) {
        Ok(s) => Ok(ShiftWitness {
            shift: b.to_string(),
            residual: s.residual,
            ok: true,
        }),
        Err(MraError::ShiftNotExpressible { residual, .. }) => Ok(ShiftWitness {
            shift: b.to_string(),
            residual,
            ok: false,
        }),
        Err(e) => Err(e),
    }
}

/// Evidence for the density axiom: `B_{-N}(0) ⊆ supp φ̂`, so sphere `p^s`
/// lies inside `supp φ̂(p^j ·)` for `j = s + N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEvidence {
    pub ok: bool,
    /// Exponent `r` of the ball `B_r(0)` on which `φ̂` is nonzero.
    pub witness_ball_exp: i32,
    /// `(s, j)`: sphere exponent and the dilation covering it.
    pub spheres: Vec<(i32, i32)>,
}

/// Three-stage orthonormality verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orthonormality {
    Orthonormal,
    NotOrthonormal,
    /// Stages disagree; points at a tolerance problem.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthoReport {
    pub verdict: Orthonormality,
    /// `|Σ_l |φ̂(l/p^M)|² χ(lk/p^(M+N)) - p^N δ_k0|` for `k < p^N`.
    pub periodization_residuals: Vec<f64>,
    pub periodization_ok: bool,
    /// Whether `supp φ̂ ⊆ B_0(0)`.
    pub unit_ball_support: bool,
    /// `|φ̂| = 1` on `B_0(0)`; only decided when `unit_ball_support`.
    pub unit_modulus: Option<bool>,
    /// `max_d |⟨φ, φ(· - d/p^N)⟩ - δ_d0|` over `|d| < p^N`.
    pub gram_residual: f64,
    pub gram_ok: bool,
    pub note: String,
}

const DISJOINT_SHIFTS_NOTE: &str = "shifts by a ∈ I_p with |a|_p > p^N move the support \
B_N(0) to a disjoint ball, so only differences d/p^N with |d| < p^N need checking";

pub fn check_orthonormal_shifts(phi: &TestFunction, tol: f64) -> Result<OrthoReport> {
    let phi = nonnegative_frame(phi)?;
    let (n, m) = frame_exps(&phi);
    let p = phi.prime();
    let spec = fourier(&phi);
    let pn = pow(p, n);
    let pm = pow(p, m);

    let roots = UnitRoots::new(pow(p, n + m));
    let periodization_residuals: Vec<f64> = (0..pn)
        .map(|k| {
            let s: Complex64 = spec
                .values()
                .iter()
                .enumerate()
                .map(|(l, v)| roots.get(l as u64 * k) * v.norm_sqr())
                .sum();
            let expected = if k == 0 { pn as f64 } else { 0.0 };
            (s - Complex64::new(expected, 0.0)).norm()
        })
        .collect();
    let periodization_ok = periodization_residuals.iter().all(|&r| r < tol);

    let unit_ball_support = spec
        .values()
        .iter()
        .enumerate()
        .all(|(l, v)| (l as u64).is_multiple_of(pm) || v.norm() <= tol);
    let unit_modulus = unit_ball_support.then(|| {
        spec.values()
            .iter()
            .step_by(pm as usize)
            .all(|v| (v.norm() - 1.0).abs() < tol)
    });

    let mut gram_residual: f64 = 0.0;
    for d in -(pn as i64 - 1)..(pn as i64) {
        let c = phi.inner_product(&phi.shift(&PadicRational::new(p, d, n))?)?;
        let expected = if d == 0 { 1.0 } else { 0.0 };
        gram_residual = gram_residual.max((c - Complex64::new(expected, 0.0)).norm());
    }
    let gram_ok = gram_residual < tol;

    let consistent = (!gram_ok || periodization_ok) && unit_modulus.is_none_or(|u| u == gram_ok);
    let verdict = match (consistent, gram_ok) {
        (false, _) => Orthonormality::Inconsistent,
        (true, true) => Orthonormality::Orthonormal,
        (true, false) => Orthonormality::NotOrthonormal,
    };
    Ok(OrthoReport {
        verdict,
        periodization_residuals,
        periodization_ok,
        unit_ball_support,
        unit_modulus,
        gram_residual,
        gram_ok,
        note: DISJOINT_SHIFTS_NOTE.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MraReport {
    pub p: u32,
    pub n: u32,
    pub m: u32,
    pub refinable: bool,
    /// Taps `h_k` of the recovered refinement mask.
    pub mask_taps: Option<Vec<[f64; 2]>>,
    pub refinement_residual: f64,
    pub lset: LSet,
    /// Refinable and `#L_φ <= p^N`.
    pub criterion_ok: bool,
    /// `φ(· - b) ∈ V_1` for `b ∈ I_p ∩ B_N(0)`.
    pub axiom_a_witnesses: Vec<ShiftWitness>,
    pub axiom_a_ok: bool,
    /// `φ(· - b) ∈ span{φ(· - k/p^N)}` for all `b = j/p^N`, `j < p^(N+M)`.
    pub shift_witnesses: Vec<ShiftWitness>,
    pub shifts_ok: bool,
    pub axiom_b: DensityEvidence,
    pub axiom_c_note: String,
    pub orthonormal: OrthoReport,
    pub config: MraConfig,
    #[serde(skip)]
    pub mask: Option<Mask>,
}

const AXIOM_C_NOTE: &str = "φ̂ is compactly supported, so the intersection of all V_j is {0}; \
orthonormal shifts would also imply it";

/// Runs every MRA check on `φ`.
pub fn check_mra(phi: &TestFunction, config: &MraConfig) -> Result<MraReport> {
    let tol = config.tol;
    let phi = nonnegative_frame(phi)?;
    let (n, m) = frame_exps(&phi);
    let p = phi.prime();
    let spec = fourier(&phi);
    check_nonzero_mean(&spec, tol)?;

    let lset = l_set(&phi, tol)?;
    let (refinable, mask, refinement_residual) = match recover_mask(&phi, tol) {
        Ok(r) => (true, Some(r.mask), r.residual),
        Err(MraError::NotRefinable { residual }) => (false, None, residual),
        Err(e) => return Err(e),
    };
    let criterion_ok = refinable && lset.within_bound();

    let axiom_a_witnesses = enumerate_ip_ball(p, n)
        .iter()
        .map(|b| witness(&phi, b, ShiftScale::Refined, tol))
        .collect::<Result<Vec<_>>>()?;
    let axiom_a_ok = axiom_a_witnesses.iter().all(|w| w.ok);
    let shift_witnesses = (0..pow(p, n + m))
        .map(|j| witness(&phi, &PadicRational::new(p, j as i64, n), ShiftScale::Same, tol))
        .collect::<Result<Vec<_>>>()?;
    let shifts_ok = shift_witnesses.iter().all(|w| w.ok);

    let (lo, hi) = config.sphere_range;
    let axiom_b = DensityEvidence {
        ok: true,
        witness_ball_exp: -(n as i32),
        spheres: (lo..=hi).map(|s| (s, s + n as i32)).collect(),
    };

    let orthonormal = check_orthonormal_shifts(&phi, tol)?;
    let mask_taps = mask
        .as_ref()
        .map(|mk| mk.taps().iter().map(|h| [h.re, h.im]).collect());
    Ok(MraReport {
        p,
        n,
        m,
        refinable,
        mask_taps,
        refinement_residual,
        lset,
        criterion_ok,
        axiom_a_witnesses,
        axiom_a_ok,
        shift_witnesses,
        shifts_ok,
        axiom_b,
        axiom_c_note: AXIOM_C_NOTE.to_string(),
        orthonormal,
        config: *config,
        mask,
    })
}

/// Whether the shifts of an orthonormal scaling function span the same
/// space as the shifts of `Ω` on `B_N(0)`, i.e. generate the Haar MRA.
pub fn check_haar_equivalence(phi: &TestFunction, config: &MraConfig) -> Result<bool> {
    let tol = config.tol;
    let phi = nonnegative_frame(phi)?;
    let ortho = check_orthonormal_shifts(&phi, tol)?;
    if ortho.verdict != Orthonormality::Orthonormal {
        return Err(MraError::Precondition(
            "shifts of φ are not orthonormal".into(),
        ));
    }
    let report = check_mra(&phi, config)?;
    if !report.criterion_ok {
        return Err(MraError::Precondition("φ does not generate an MRA".into()));
    }
    let (n, m) = frame_exps(&phi);
    let p = phi.prime();
    let omega = TestFunction::omega(p)?.reframe(n as i32, m as i32)?;
    let mut ours = Vec::new();
    let mut haar = Vec::new();
    for a in enumerate_ip_ball(p, n) {
        ours.push(phi.shift(&a)?.reframe(n as i32, m as i32)?.into_values());
        haar.push(omega.shift(&a)?.reframe(n as i32, m as i32)?.into_values());
    }
    let forward = span_residuals(&ours, &haar);
    let backward = span_residuals(&haar, &ours);
    Ok(forward.iter().chain(&backward).all(|&r| r < tol))
}
