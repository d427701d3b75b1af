//! Integral representations of pFq at negative argument: generalized
//! Stieltjes, kernel-split, Laplace, cosine, and hyper-Bessel forms, each
//! integrating an elementary kernel against a Meijer G density.
//!
//! Every representation here computes F(A; B; -z) as
//! prefactor * integral of inner(-z t) * G(t) dt/t, where `inner` is a lower
//! hypergeometric kernel (a power, an exponential, a cosine, or a small pFq)
//! and G is a `gkernel` density. Atom variants add a point mass at t = 1
//! when the density's endpoint exponent degenerates (psi = 0 for the Laplace
//! form, psi = 1/2 for the cosine form).
//!
//! Besides cross-validating the series evaluator inside its disk, the
//! Stieltjes form extends Gauss-type functions beyond it: for p = q+1 the
//! series only converges on |z| < 1, while the integral converges for every
//! z > -1 and agrees with the analytic continuation.

use crate::error::{Error, Result};
use crate::gamma::ln_gamma_sum;
use crate::gkernel::{KernelEvaluator, KernelKind, KernelSpec, Method};
use crate::params::ParamVec;
use crate::quad::{integrate_01, integrate_0inf, QuadratureConfig};
use crate::series::{eval_pfq, EvalResult, HyperSpec};
use serde::Serialize;
use std::cell::RefCell;

/// Numbers closer to an atom threshold than this are snapped onto it.
const ATOM_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Split representation
// ---------------------------------------------------------------------------

/// Parameter split for the kernel-times-measure representation: the inner
/// p1Fq1(A1; B1; -zt) kernel integrated against the G density built from
/// (A2, B2). Requires p2 >= 1, p2 >= q2, p <= q+1 (which forces
/// p1 <= q1+1) and A2 > 0; for p2 = q2 the density lives on (0,1) and
/// psi2 = sum(B2) - sum(A2) must be nonnegative, with psi2 = 0 handled by
/// the variant with a unit atom at t = 1.
#[derive(Clone, Debug)]
pub struct SplitSpec {
    pub a1: ParamVec,
    pub b1: ParamVec,
    pub a2: ParamVec,
    pub b2: ParamVec,
}

impl SplitSpec {
    pub fn new(a1: ParamVec, b1: ParamVec, a2: ParamVec, b2: ParamVec) -> Result<Self> {
        let (p1, q1) = (a1.len(), b1.len());
        let (p2, q2) = (a2.len(), b2.len());
        if p2 < 1 || p2 < q2 {
            return Err(Error::SpecViolation(format!(
                "measure side needs at least one numerator entry and p2 >= q2, got p2={p2}, q2={q2}"
            )));
        }
        if p1 + p2 > q1 + q2 + 1 {
            return Err(Error::ShapeError {
                p: p1 + p2,
                q: q1 + q2,
            });
        }
        for &a in a2.iter() {
            if a <= 0.0 {
                return Err(Error::NonPositiveParameter { value: a });
            }
        }
        let spec = SplitSpec { a1, b1, a2, b2 };
        if p2 == q2 && spec.psi2() < -ATOM_TOL {
            return Err(Error::SpecViolation(format!(
                "unit-interval measure requires sum(B2) >= sum(A2), got psi2 = {}",
                spec.psi2()
            )));
        }
        Ok(spec)
    }

    /// Endpoint exponent of the measure side.
    pub fn psi2(&self) -> f64 {
        self.b2.sum() - self.a2.sum()
    }

    /// The hypergeometric function this split represents.
    pub fn series_spec(&self) -> Result<HyperSpec> {
        HyperSpec::new(self.a1.concat(&self.a2), self.b1.concat(&self.b2))
    }
}

// ---------------------------------------------------------------------------
// Inner kernels
// ---------------------------------------------------------------------------

/// Inner hypergeometric factor p1Fq1(A1; B1; x). The empty and single-upper
/// shapes are closed forms (exact for any x, which matters on half-line
/// measures where the series would cancel catastrophically); everything
/// else goes through the series evaluator.
fn inner_pfq(a1: &ParamVec, b1: &ParamVec, x: f64, tol: f64) -> Result<f64> {
    match (a1.len(), b1.len()) {
        (0, 0) => Ok(x.exp()),
        (1, 0) => {
            if x >= 1.0 {
                return Err(Error::DomainError(format!(
                    "binomial kernel (1-x)^-sigma needs x < 1, got {x}"
                )));
            }
            Ok((1.0 - x).powf(-a1[0]))
        }
        _ => {
            let spec = HyperSpec::new(a1.clone(), b1.clone())?;
            Ok(eval_pfq(&spec, x, tol)?.value)
        }
    }
}

/// Integrates inner(-z t) G(t) / t over the kernel support. Inner failures
/// at nonconvergent points are skipped as zero when the weight there is in
/// the kernel's exponential underflow tail (large |z t| on the half line is
/// exactly where G has decayed below every other scale); any other failure
/// aborts the evaluation.
fn integrate_against_kernel<F: Fn(f64) -> Result<f64>>(
    ev: &KernelEvaluator,
    inner: F,
    z: f64,
    cfg: &QuadratureConfig,
) -> Result<EvalResult> {
    let fatal: RefCell<Option<Error>> = RefCell::new(None);
    let sample = |t: f64, tc: f64| -> f64 {
        let g = match ev.eval_at(t, tc, Method::Auto) {
            Ok(g) => g,
            Err(e) => {
                fatal.borrow_mut().get_or_insert(e);
                return f64::NAN;
            }
        };
        if g.value == 0.0 {
            return 0.0;
        }
        match inner(-z * t) {
            Ok(f) => f * g.value / t,
            Err(Error::NonConvergence { .. }) => f64::NAN,
            Err(e) => {
                fatal.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let integral = match ev.spec().kind {
        KernelKind::Balanced => integrate_01(|t, tc| sample(t, tc), cfg)?,
        KernelKind::Laplace => {
            // window scale: kernel decay e^{-mu t^{1/mu}} sharpened by e^{-zt}
            let scale = if z > 0.0 { (1.0 + z).recip() } else { 1.0 };
            integrate_0inf(|t| sample(t, 1.0 - t), scale, cfg)?
        }
    };
    if let Some(e) = fatal.into_inner() {
        return Err(e);
    }
    Ok(integral)
}

fn prefixed(pref: f64, integral: EvalResult, atom: Option<f64>) -> EvalResult {
    let value = pref * (integral.value + atom.unwrap_or(0.0));
    EvalResult {
        value,
        abs_err: pref * integral.abs_err + value.abs() * 1e-14,
        terms_used: integral.terms_used,
    }
}

// ---------------------------------------------------------------------------
// The representations
// ---------------------------------------------------------------------------

/// Generalized Stieltjes transform: (q+1)Fq(sigma, A; B; -z) as the integral
/// of (1 + z t)^-sigma against the G density of (A, B). Valid for all
/// z > -1, including |z| >= 1 where the defining series diverges.
pub fn stieltjes_rep_eval(
    sigma: f64,
    a: ParamVec,
    b: ParamVec,
    z: f64,
    cfg: &QuadratureConfig,
) -> Result<EvalResult> {
    if sigma <= 0.0 {
        return Err(Error::NonPositiveParameter { value: sigma });
    }
    if !(z > -1.0) {
        return Err(Error::DomainError(format!(
            "Stieltjes argument -z lies on the cut (-inf, -1], got z = {z}"
        )));
    }
    let spec = SplitSpec::new(
        ParamVec::new(vec![sigma])?,
        ParamVec::new(vec![])?,
        a,
        b,
    )?;
    general_split_eval(&spec, z, cfg)
}

/// Kernel-split representation: inner p1Fq1 integrated against the (A2, B2)
/// density; the psi2 = 0 degeneration adds the unit atom at t = 1.
pub fn general_split_eval(spec: &SplitSpec, z: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    if spec.a1.len() == spec.b1.len() + 1 && !(z > -1.0) {
        return Err(Error::DomainError(format!(
            "Gauss-type inner kernel restricts to z > -1, got z = {z}"
        )));
    }
    let kernel = KernelSpec::new(spec.a2.clone(), spec.b2.clone())?;
    let atom = if kernel.kind == KernelKind::Balanced && spec.psi2().abs() <= ATOM_TOL {
        Some(inner_pfq(&spec.a1, &spec.b1, -z, cfg.rel_tol.min(1e-12))?)
    } else {
        None
    };
    let ev = KernelEvaluator::new(&kernel);
    let tol = (cfg.rel_tol * 1e-2).clamp(1e-15, 1e-10);
    let integral = integrate_against_kernel(
        &ev,
        |x| inner_pfq(&spec.a1, &spec.b1, x, tol),
        z,
        cfg,
    )?;
    let pref = (ln_gamma_sum(&spec.b2) - ln_gamma_sum(&spec.a2)).exp();
    Ok(prefixed(pref, integral, atom))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplaceVariant {
    /// (q+1)Fq over the half line: Laplace transform of the G density with
    /// one extra numerator gamma.
    QPlus1,
    /// qFq over (0,1), requiring psi > 0.
    QQ,
    /// qFq with psi = 0: unit-interval integral plus an e^-z atom.
    QQPsi0,
}

/// Laplace-kernel representations of (q+1)Fq and qFq at argument -z.
pub fn laplace_rep_eval(
    a: ParamVec,
    b: ParamVec,
    z: f64,
    variant: LaplaceVariant,
    cfg: &QuadratureConfig,
) -> Result<EvalResult> {
    let psi = b.sum() - a.sum();
    match variant {
        LaplaceVariant::QPlus1 => {
            if a.len() != b.len() + 1 {
                return Err(Error::ShapeError {
                    p: a.len(),
                    q: b.len(),
                });
            }
            if !(z > -1.0) {
                return Err(Error::DomainError(format!(
                    "half-line Laplace transform diverges for z <= -1, got z = {z}"
                )));
            }
        }
        LaplaceVariant::QQ => {
            if a.len() != b.len() {
                return Err(Error::ShapeError {
                    p: a.len(),
                    q: b.len(),
                });
            }
            if psi <= ATOM_TOL {
                return Err(Error::SpecViolation(format!(
                    "unit-interval Laplace form needs psi > 0, got {psi} (use the psi = 0 atom variant)"
                )));
            }
        }
        LaplaceVariant::QQPsi0 => {
            if a.len() != b.len() {
                return Err(Error::ShapeError {
                    p: a.len(),
                    q: b.len(),
                });
            }
            if psi.abs() > ATOM_TOL {
                return Err(Error::SpecViolation(format!(
                    "atom variant applies only at psi = 0, got {psi}"
                )));
            }
        }
    }
    let spec = SplitSpec::new(
        ParamVec::new(vec![])?,
        ParamVec::new(vec![])?,
        a,
        b,
    )?;
    general_split_eval(&spec, z, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CosineVariant {
    /// psi > 1/2: plain cosine transform of the augmented density.
    PsiGtHalf,
    /// psi = 1/2: adds the cos(2 sqrt z) atom.
    PsiEqHalf,
}

/// Cosine-kernel representation of (q-1)Fq at argument -z, z >= 0: the
/// cos(2 sqrt(z t)) transform of the G density with bottom row (A, 1/2).
pub fn cosine_rep_eval(
    a: ParamVec,
    b: ParamVec,
    z: f64,
    variant: CosineVariant,
    cfg: &QuadratureConfig,
) -> Result<EvalResult> {
    if a.len() + 1 != b.len() {
        return Err(Error::ShapeError {
            p: a.len(),
            q: b.len(),
        });
    }
    if !(z >= 0.0) {
        return Err(Error::DomainError(format!(
            "cosine representation needs z >= 0, got {z}"
        )));
    }
    let psi = b.sum() - a.sum();
    match variant {
        CosineVariant::PsiGtHalf => {
            if psi <= 0.5 + ATOM_TOL {
                return Err(Error::SpecViolation(format!(
                    "cosine form needs psi > 1/2, got {psi} (use the psi = 1/2 atom variant)"
                )));
            }
        }
        CosineVariant::PsiEqHalf => {
            if (psi - 0.5).abs() > ATOM_TOL {
                return Err(Error::SpecViolation(format!(
                    "atom variant applies only at psi = 1/2, got {psi}"
                )));
            }
        }
    }
    for &v in a.iter() {
        if v <= 0.0 {
            return Err(Error::NonPositiveParameter { value: v });
        }
    }
    let bottom = a.concat(&ParamVec::new(vec![0.5])?);
    let kernel = KernelSpec::balanced(bottom, b.clone())?;
    let ev = KernelEvaluator::new(&kernel);
    let sqrt_z = z.sqrt();
    let integral = integrate_against_kernel(
        &ev,
        |x| {
            // x = -z t, so 2 sqrt(z t) = 2 sqrt(-x)
            Ok((2.0 * (-x).max(0.0).sqrt()).cos())
        },
        z,
        cfg,
    )?;
    let atom = match variant {
        CosineVariant::PsiGtHalf => None,
        CosineVariant::PsiEqHalf => Some((2.0 * sqrt_z).cos()),
    };
    // Gamma(1/2) of the augmented row is the sqrt(pi) in the prefactor
    let pref = (ln_gamma_sum(&b) - ln_gamma_sum(&a)).exp() / std::f64::consts::PI.sqrt();
    Ok(prefixed(pref, integral, atom))
}

/// Hyper-Bessel representation for p < q: artificial parameters `alphas`
/// complete the bottom row, the inner kernel is 0F{q-p}(-; alphas; -zt).
/// With alphas = (i/(q-p+1))_i the inner kernel is the generalized cosine.
pub fn small_p_rep_eval(
    a: ParamVec,
    b: ParamVec,
    alphas: ParamVec,
    z: f64,
    cfg: &QuadratureConfig,
) -> Result<EvalResult> {
    if a.len() >= b.len() || a.len() + alphas.len() != b.len() {
        return Err(Error::ShapeError {
            p: a.len(),
            q: b.len(),
        });
    }
    for &v in alphas.iter() {
        if v <= 0.0 {
            return Err(Error::NonPositiveParameter { value: v });
        }
    }
    let excess = b.sum() - a.sum() - alphas.sum();
    if excess <= 0.0 {
        return Err(Error::ConvergenceConditionViolated { excess });
    }
    let spec = SplitSpec::new(
        ParamVec::new(vec![])?,
        alphas.clone(),
        a.concat(&alphas),
        b,
    )?;
    general_split_eval(&spec, z, cfg)
}

// ---------------------------------------------------------------------------
// Cross-validation against the series
// ---------------------------------------------------------------------------

/// One representation instance, bundled with enough information to name the
/// series it must reproduce.
#[derive(Clone, Debug)]
pub enum RepSpec {
    Stieltjes {
        sigma: f64,
        a: ParamVec,
        b: ParamVec,
    },
    Split(SplitSpec),
    Laplace {
        a: ParamVec,
        b: ParamVec,
        variant: LaplaceVariant,
    },
    Cosine {
        a: ParamVec,
        b: ParamVec,
        variant: CosineVariant,
    },
    SmallP {
        a: ParamVec,
        b: ParamVec,
        alphas: ParamVec,
    },
}

impl RepSpec {
    pub fn eval(&self, z: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
        match self {
            RepSpec::Stieltjes { sigma, a, b } => {
                stieltjes_rep_eval(*sigma, a.clone(), b.clone(), z, cfg)
            }
            RepSpec::Split(s) => general_split_eval(s, z, cfg),
            RepSpec::Laplace { a, b, variant } => {
                laplace_rep_eval(a.clone(), b.clone(), z, *variant, cfg)
            }
            RepSpec::Cosine { a, b, variant } => {
                cosine_rep_eval(a.clone(), b.clone(), z, *variant, cfg)
            }
            RepSpec::SmallP { a, b, alphas } => {
                small_p_rep_eval(a.clone(), b.clone(), alphas.clone(), z, cfg)
            }
        }
    }

    /// The function both sides evaluate, as a series spec.
    pub fn series_spec(&self) -> Result<HyperSpec> {
        match self {
            RepSpec::Stieltjes { sigma, a, b } => {
                let mut ap = vec![*sigma];
                ap.extend_from_slice(a);
                HyperSpec::new(ParamVec::new(ap)?, b.clone())
            }
            RepSpec::Split(s) => s.series_spec(),
            RepSpec::Laplace { a, b, .. } | RepSpec::Cosine { a, b, .. } => {
                HyperSpec::new(a.clone(), b.clone())
            }
            RepSpec::SmallP { a, b, .. } => HyperSpec::new(a.clone(), b.clone()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RepCheckPoint {
    pub z: f64,
    pub rep: f64,
    pub series: f64,
    pub abs_diff: f64,
    /// Ten times the combined error estimates of the two sides plus the
    /// requested relative tolerance at the scale of the value. Each side only
    /// promises rel_tol accuracy, so a gap of that size is not a discrepancy.
    pub budget: f64,
    pub within_budget: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub max_abs: f64,
    pub max_rel: f64,
    /// z at which the largest relative discrepancy occurred.
    pub argmax: f64,
    pub all_within_budget: bool,
    pub points: Vec<RepCheckPoint>,
}

/// Evaluates a representation and the defining series over a z grid and
/// reports their discrepancies. Per-point failures are recorded, not raised.
pub fn rep_vs_series(rep: &RepSpec, z_grid: &[f64], cfg: &QuadratureConfig) -> DiscrepancyReport {
    let mut points = Vec::with_capacity(z_grid.len());
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    let mut argmax = f64::NAN;
    let mut all_within = true;
    let series_spec = rep.series_spec();
    for &z in z_grid {
        let mut point = RepCheckPoint {
            z,
            rep: f64::NAN,
            series: f64::NAN,
            abs_diff: f64::NAN,
            budget: f64::NAN,
            within_budget: false,
            error: None,
        };
        let outcome = series_spec.as_ref().map_err(|e| e.clone()).and_then(|s| {
            let rv = rep.eval(z, cfg)?;
            let sv = eval_pfq(s, -z, 1e-13)?;
            Ok((rv, sv))
        });
        match outcome {
            Ok((rv, sv)) => {
                point.rep = rv.value;
                point.series = sv.value;
                point.abs_diff = (rv.value - sv.value).abs();
                let scale = rv.value.abs().max(sv.value.abs());
                point.budget = 10.0 * (rv.abs_err + sv.abs_err + cfg.rel_tol * scale);
                point.within_budget = point.abs_diff <= point.budget;
                all_within &= point.within_budget;
                if point.abs_diff > max_abs {
                    max_abs = point.abs_diff;
                }
                let rel = point.abs_diff / sv.value.abs().max(1e-300);
                if rel > max_rel {
                    max_rel = rel;
                    argmax = z;
                }
            }
            Err(e) => {
                point.error = Some(e.to_string());
                all_within = false;
            }
        }
        points.push(point);
    }
    DiscrepancyReport {
        max_abs,
        max_rel,
        argmax,
        all_within_budget: all_within,
        points,
    }
}

/// Series evaluation with representation fallback: when the series diverges
/// (p = q+1, z <= -1) or fails to converge, a Stieltjes split around the
/// largest upper parameter evaluates the analytic continuation on x < 1.
pub fn eval_pfq_extended(spec: &HyperSpec, x: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    match eval_pfq(spec, x, cfg.rel_tol.max(1e-14)) {
        Ok(r) => Ok(r),
        Err(first) => {
            if spec.p() != spec.q() + 1 || !(x < 1.0) {
                return Err(first);
            }
            // split off the largest upper parameter as sigma to maximize the
            // measure's endpoint exponent psi2
            let mut rest: Vec<f64> = spec.a.to_vec();
            let (imax, _) = rest
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap();
            let sigma = rest.remove(imax);
            if sigma <= 0.0 || rest.iter().any(|&v| v <= 0.0) {
                return Err(first);
            }
            let psi2 = spec.b.sum() - rest.iter().sum::<f64>();
            if psi2 <= ATOM_TOL {
                return Err(first);
            }
            stieltjes_rep_eval(
                sigma,
                ParamVec::new(rest)?,
                spec.b.clone(),
                -x,
                cfg,
            )
        }
    }
}
