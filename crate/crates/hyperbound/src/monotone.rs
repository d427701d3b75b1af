//! Grid scanners for the monotonicity theorems: complete monotonicity of
//! x -> F(A;B;-x), the inverse-argument composite x^-s F(s,A;B;-1/x) and its
//! logarithmic variant, ratio decrease under a parameter shift, and
//! log-convexity in the shift. Every check here is a finite scan: it
//! certifies "no counterexample found at this resolution", never a proof.

use crate::error::{Error, Result};
use crate::params::{check_weak_supermajorization, coeff_f, v_nonneg_check, ParamVec};
use crate::quad::QuadratureConfig;
use crate::report::{MonotoneReport, Status};
use crate::representations::{eval_pfq_extended, SplitSpec};
use crate::series::HyperSpec;

/// Resolution of the unit-interval kernel scan backing hypothesis checks.
const V_SCAN_POINTS: usize = 400;

/// The ratio theorems leave the endpoint x = -1 open in the p = q+1 clause;
/// the scanner stops this far to the right of it.
const RATIO_EDGE: f64 = 1e-3;

/// Function whose complete monotonicity is scanned.
pub enum CmTarget {
    /// x -> F(A;B;-x) on (0, inf), via the contiguous shift identity.
    Direct(HyperSpec),
    /// x -> x^-sigma F(sigma,A;B;-1/x) on (0, inf), via finite differences.
    InverseArgument {
        sigma: f64,
        a: ParamVec,
        b: ParamVec,
    },
}

// ---------------------------------------------------------------------------
// Hypothesis predicates
// ---------------------------------------------------------------------------

/// Whether t^a-sums dominate t^b-sums on (0,1]: first by weak
/// supermajorization (sufficient), else by a direct kernel scan.
fn kernel_nonneg_status(a: &ParamVec, b: &ParamVec) -> Status {
    if a.len() != b.len() {
        return Status::NotApplicable;
    }
    if a.is_empty() {
        return Status::Holds;
    }
    if a.iter().chain(b.iter()).any(|&v| v <= 0.0) {
        return Status::Fails;
    }
    if let Ok(rep) = check_weak_supermajorization(a, b) {
        if rep.holds {
            return Status::Holds;
        }
    }
    match v_nonneg_check(a, b, V_SCAN_POINTS) {
        Ok(scan) => Status::from_bool(scan.nonneg),
        Err(_) => Status::Fails,
    }
}

fn without_index(values: &ParamVec, idx: usize) -> ParamVec {
    let rest: Vec<f64> = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, &v)| v)
        .collect();
    ParamVec::new(rest).expect("subset of finite values stays finite")
}

fn argmax(values: &ParamVec) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.map_or(true, |j| v > values[j]) {
            best = Some(i);
        }
    }
    best
}

/// Complete-monotonicity hypothesis for the direct target. Shapes p = q use
/// the kernel condition on (A, B); shapes p = q+1 look for one positive
/// numerator entry whose removal leaves a dominating pair; other shapes are
/// outside the theorem.
fn cm_direct_hypothesis(spec: &HyperSpec) -> Status {
    if spec.p() == spec.q() {
        kernel_nonneg_status(&spec.a, &spec.b)
    } else if spec.p() == spec.q() + 1 {
        for i in 0..spec.a.len() {
            if spec.a[i] <= 0.0 {
                continue;
            }
            let rest = without_index(&spec.a, i);
            if kernel_nonneg_status(&rest, &spec.b) == Status::Holds {
                return Status::Holds;
            }
        }
        Status::Fails
    } else {
        Status::NotApplicable
    }
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// Central-difference step. Order-n differences amplify evaluation noise by
/// (2/h_rel)^n, so the top order gets a wider stencil: at evaluation error
/// ~1e-12 the tighter step would drown order 4 entirely.
fn fd_step(n: u32, x: f64) -> f64 {
    if n <= 3 {
        (1e-3 * x).max(1e-4)
    } else {
        (1e-2 * x).max(1e-3)
    }
}

/// Order-2-accurate central estimate of the n-th derivative at x.
fn central_diff<F>(f: &mut F, n: u32, x: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let half = n as f64 / 2.0;
    let mut acc = 0.0;
    let mut binom = 1.0;
    for j in 0..=n {
        let node = x + (half - j as f64) * h;
        let weight = if j % 2 == 0 { binom } else { -binom };
        acc += weight * f(node)?;
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    Ok(acc / h.powi(n as i32))
}

fn check_stencil_fits(n_max: u32, x: f64) -> Result<()> {
    let reach = 0.5 * n_max as f64 * fd_step(n_max, x);
    if !(x > 0.0) || x - reach <= 0.0 {
        return Err(Error::DomainError(format!(
            "grid point {x} cannot host an order-{n_max} stencil on (0, inf)"
        )));
    }
    Ok(())
}

fn parity(n: u32) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

// ---------------------------------------------------------------------------
// Complete monotonicity
// ---------------------------------------------------------------------------

/// n-th derivative magnitude (-1)^n d^n/dx^n F(A;B;-x), computed exactly via
/// the contiguous shift identity as f_n * F(A+n;B+n;-x).
pub fn shift_derivative(
    spec: &HyperSpec,
    n: u32,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let coeff = coeff_f(&spec.a, &spec.b, n)?;
    let shifted = spec.shifted(n)?;
    let eval = eval_pfq_extended(&shifted, -x, cfg)?;
    Ok(coeff * eval.value)
}

/// Scan (-1)^n f^(n)(x) >= 0 for n = 0..n_max over a positive grid.
///
/// The direct target uses the analytic shift identity (any n_max up to 8);
/// the composite target uses central differences and is capped at order 4,
/// past which difference noise swamps the signal.
pub fn cm_check(
    target: &CmTarget,
    n_max: u32,
    x_grid: &[f64],
    tol: f64,
) -> Result<MonotoneReport> {
    match target {
        CmTarget::Direct(spec) => cm_direct(spec, n_max, x_grid, tol),
        CmTarget::InverseArgument { sigma, a, b } => {
            cm_inverse(*sigma, a, b, n_max, x_grid, tol)
        }
    }
}

fn cm_direct(spec: &HyperSpec, n_max: u32, x_grid: &[f64], tol: f64) -> Result<MonotoneReport> {
    if n_max > 8 {
        return Err(Error::DomainError(format!(
            "shift scan supports n_max <= 8, got {n_max}"
        )));
    }
    for &x in x_grid {
        if !(x > 0.0) {
            return Err(Error::DomainError(format!(
                "complete monotonicity is scanned on (0, inf); grid contains {x}"
            )));
        }
    }
    let hypothesis = cm_direct_hypothesis(spec);
    let cfg = QuadratureConfig::default();
    let mut min_margin = f64::INFINITY;
    let mut argmin = f64::NAN;
    for n in 0..=n_max {
        for &x in x_grid {
            let margin = shift_derivative(spec, n, x, &cfg)?;
            if margin < min_margin {
                min_margin = margin;
                argmin = x;
            }
        }
    }
    Ok(MonotoneReport::new(
        &format!("cm[n<={n_max}]"),
        min_margin,
        argmin,
        tol,
        x_grid.len(),
        hypothesis,
    ))
}

fn cm_inverse(
    sigma: f64,
    a: &ParamVec,
    b: &ParamVec,
    n_max: u32,
    x_grid: &[f64],
    tol: f64,
) -> Result<MonotoneReport> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if n_max > 4 {
        return Err(Error::DomainError(format!(
            "composite scan caps differences at order 4, got {n_max}"
        )));
    }
    for &x in x_grid {
        check_stencil_fits(n_max, x)?;
    }
    let hypothesis = if sigma > 0.0 {
        kernel_nonneg_status(a, b)
    } else {
        Status::Fails
    };
    let cfg = QuadratureConfig::default();
    let mut f = |x: f64| stieltjes_composite(sigma, a, b, x, &cfg);
    let mut min_margin = f64::INFINITY;
    let mut argmin = f64::NAN;
    for n in 0..=n_max {
        for &x in x_grid {
            let margin = parity(n) * central_diff(&mut f, n, x, fd_step(n, x))?;
            if margin < min_margin {
                min_margin = margin;
                argmin = x;
            }
        }
    }
    Ok(MonotoneReport::new(
        &format!("cm[n<={n_max}]"),
        min_margin,
        argmin,
        tol,
        x_grid.len(),
        hypothesis,
    ))
}

/// x^-sigma F(sigma,A;B;-1/x) for x > 0, the repeated-Laplace composite.
pub fn stieltjes_composite(
    sigma: f64,
    a: &ParamVec,
    b: &ParamVec,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::DomainError(format!(
            "composite is defined on (0, inf), got {x}"
        )));
    }
    let top = ParamVec::new(vec![sigma])?.concat(a);
    let spec = HyperSpec::new(top, b.clone())?;
    let eval = eval_pfq_extended(&spec, -1.0 / x, cfg)?;
    Ok(x.powf(-sigma) * eval.value)
}

/// Scan logarithmic complete monotonicity of the composite: -(log f)' must
/// itself be completely monotone, checked through sign alternation of
/// log-derivatives up to order 4.
pub fn log_cm_check(
    sigma: f64,
    a: &ParamVec,
    b: &ParamVec,
    x_grid: &[f64],
    tol: f64,
) -> Result<MonotoneReport> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::DomainError(format!(
            "logarithmic complete monotonicity needs 0 < sigma <= 1, got {sigma}"
        )));
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    for &x in x_grid {
        check_stencil_fits(4, x)?;
    }
    let hypothesis = kernel_nonneg_status(a, b);
    let cfg = QuadratureConfig::default();
    let mut log_f = |x: f64| {
        let value = stieltjes_composite(sigma, a, b, x, &cfg)?;
        if !(value > 0.0) {
            return Err(Error::DomainError(format!(
                "log scan needs positive composite values, got {value} at x={x}"
            )));
        }
        Ok(value.ln())
    };
    let mut min_margin = f64::INFINITY;
    let mut argmin = f64::NAN;
    for n in 1..=4u32 {
        for &x in x_grid {
            let margin = parity(n) * central_diff(&mut log_f, n, x, fd_step(n, x))?;
            if margin < min_margin {
                min_margin = margin;
                argmin = x;
            }
        }
    }
    Ok(MonotoneReport::new(
        "log_cm",
        min_margin,
        argmin,
        tol,
        x_grid.len(),
        hypothesis,
    ))
}

// ---------------------------------------------------------------------------
// Ratio monotonicity and log-convexity in the shift
// ---------------------------------------------------------------------------

fn split_value(split: &SplitSpec, mu: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let spec = HyperSpec::new(
        split.a1.concat(&split.a2.shifted(mu)),
        split.b1.concat(&split.b2.shifted(mu)),
    )?;
    Ok(eval_pfq_extended(&spec, -x, cfg)?.value)
}

struct ClauseDomain {
    lo: f64,
    hi: f64,
    base: bool,
}

/// Shared hypothesis evaluation for the ratio and log-convexity theorems:
/// positivity of the split-off rows, the measure-side kernel condition, and
/// the clause-dependent domain extension.
fn shift_theorem_domain(split: &SplitSpec) -> Result<ClauseDomain> {
    let (p2, q2) = (split.a2.len(), split.b2.len());
    if p2 != q2 {
        return Err(Error::HypothesisFailed(format!(
            "shift theorems pair numerator and denominator entries, got p2={p2}, q2={q2}"
        )));
    }
    let rows_positive = split.a1.iter().all(|&v| v > 0.0) && split.b1.iter().all(|&v| v > 0.0);
    let base = rows_positive && kernel_nonneg_status(&split.a2, &split.b2).holds();
    let p = split.a1.len() + p2;
    let q = split.b1.len() + q2;
    let domain = if p <= q {
        let extended = kernel_nonneg_status(&split.a1, &split.b1).holds();
        if extended {
            ClauseDomain {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                base,
            }
        } else {
            ClauseDomain {
                lo: f64::NEG_INFINITY,
                hi: 0.0,
                base,
            }
        }
    } else {
        // p = q+1: the extension drops the largest numerator entry from the
        // split-off row and asks the remaining pair to dominate
        let extended = match argmax(&split.a1) {
            Some(idx) => {
                kernel_nonneg_status(&without_index(&split.a1, idx), &split.b1).holds()
            }
            None => false,
        };
        let lo = -1.0 + RATIO_EDGE;
        if extended {
            ClauseDomain {
                lo,
                hi: f64::INFINITY,
                base,
            }
        } else {
            ClauseDomain { lo, hi: 0.0, base }
        }
    };
    Ok(domain)
}

/// Scan r(x) = F(A1,A2+mu;B1,B2+mu;-x) / F(A1,A2;B1,B2;-x) for decrease over
/// the grid. Grid points outside the clause-certified domain demote the
/// hypothesis to advisory; points the evaluator cannot reach at all (left of
/// -1 for p = q+1 shapes) are rejected.
pub fn ratio_monotone_check(
    split: &SplitSpec,
    mu: f64,
    x_grid: &[f64],
    tol: f64,
) -> Result<MonotoneReport> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::DomainError(format!(
            "shift must be a finite nonnegative real, got {mu}"
        )));
    }
    let domain = shift_theorem_domain(split)?;
    let p_excess = split.a1.len() + split.a2.len() > split.b1.len() + split.b2.len();
    let mut xs: Vec<f64> = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        if !x.is_finite() {
            return Err(Error::DomainError(format!("grid contains {x}")));
        }
        if p_excess && x <= -1.0 + RATIO_EDGE {
            return Err(Error::DomainError(format!(
                "p = q+1 ratios are scanned right of -1 + {RATIO_EDGE}, got {x}"
            )));
        }
        xs.push(x);
    }
    if xs.len() < 2 {
        return Err(Error::DomainError(
            "ratio scan needs at least two grid points".to_string(),
        ));
    }
    xs.sort_by(f64::total_cmp);
    let in_domain = xs.iter().all(|&x| x >= domain.lo && x <= domain.hi);
    let hypothesis = Status::from_bool(domain.base && in_domain);
    let cfg = QuadratureConfig::default();
    let mut min_margin = f64::INFINITY;
    let mut argmin = f64::NAN;
    let mut prev: Option<f64> = None;
    for &x in &xs {
        let den = split_value(split, 0.0, x, &cfg)?;
        let num = split_value(split, mu, x, &cfg)?;
        let r = num / den;
        if !r.is_finite() {
            return Err(Error::DomainError(format!(
                "ratio evaluation produced {r} at x={x}"
            )));
        }
        if let Some(last) = prev {
            let margin = last - r;
            if margin < min_margin {
                min_margin = margin;
                argmin = x;
            }
        }
        prev = Some(r);
    }
    Ok(MonotoneReport::new(
        "ratio_decreasing",
        min_margin,
        argmin,
        tol,
        xs.len(),
        hypothesis,
    ))
}

/// Scan log-convexity of mu -> F(A1,A2+mu;B1,B2+mu;-x) over a strictly
/// increasing shift grid at fixed x, via second divided differences.
///
/// The certified domain is x > 0 only. At x = 0 the function is identically
/// one, and for x < 0 the trigamma deficit of the shifted denominators
/// outweighs the log-moment variance, tipping the second log-derivative
/// negative; dominated q = 1 pairs already exhibit this, so the domain
/// extensions of the ratio theorem do not carry over. Scans elsewhere are
/// advisory.
pub fn logconvex_check(
    split: &SplitSpec,
    mu_grid: &[f64],
    x: f64,
    tol: f64,
) -> Result<MonotoneReport> {
    let domain = shift_theorem_domain(split)?;
    let p_excess = split.a1.len() + split.a2.len() > split.b1.len() + split.b2.len();
    if !x.is_finite() || (p_excess && x <= -1.0 + RATIO_EDGE) {
        return Err(Error::DomainError(format!(
            "evaluation point {x} is outside the reachable argument range"
        )));
    }
    if mu_grid.len() < 3 {
        return Err(Error::DomainError(
            "log-convexity needs at least three shift values".to_string(),
        ));
    }
    let mut mus = mu_grid.to_vec();
    mus.sort_by(f64::total_cmp);
    for pair in mus.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::DomainError(
                "shift grid must be strictly increasing".to_string(),
            ));
        }
    }
    if !mus[0].is_finite() || mus[0] < 0.0 || !mus[mus.len() - 1].is_finite() {
        return Err(Error::DomainError(
            "shift grid must consist of finite nonnegative reals".to_string(),
        ));
    }
    let hypothesis = Status::from_bool(domain.base && x > 0.0);
    let cfg = QuadratureConfig::default();
    let mut logs = Vec::with_capacity(mus.len());
    for &mu in &mus {
        let value = split_value(split, mu, x, &cfg)?;
        if !(value > 0.0) {
            return Err(Error::DomainError(format!(
                "log-convexity scan needs positive values, got {value} at mu={mu}"
            )));
        }
        logs.push(value.ln());
    }
    let mut min_margin = f64::INFINITY;
    let mut argmin = f64::NAN;
    for i in 0..mus.len() - 2 {
        let s0 = (logs[i + 1] - logs[i]) / (mus[i + 1] - mus[i]);
        let s1 = (logs[i + 2] - logs[i + 1]) / (mus[i + 2] - mus[i + 1]);
        let margin = s1 - s0;
        if margin < min_margin {
            min_margin = margin;
            argmin = mus[i + 1];
        }
    }
    Ok(MonotoneReport::new(
        "log_convex",
        min_margin,
        argmin,
        tol,
        mus.len(),
        hypothesis,
    ))
}

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

/// n points spaced logarithmically over [lo, hi]; endpoints are exact.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(Error::DomainError(format!(
            "log grid needs 0 < lo <= hi < inf, got [{lo}, {hi}]"
        )));
    }
    if n == 0 {
        return Err(Error::DomainError("grid needs at least one point".to_string()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    Ok(grid)
}

/// n points spaced linearly over [lo, hi]; endpoints are exact.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::DomainError(format!(
            "linear grid needs finite lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if n == 0 {
        return Err(Error::DomainError("grid needs at least one point".to_string()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let mut grid: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::eval_pfq;

    fn pv(values: &[f64]) -> ParamVec {
        ParamVec::new(values.to_vec()).unwrap()
    }

    fn spec(a: &[f64], b: &[f64]) -> HyperSpec {
        HyperSpec::new(pv(a), pv(b)).unwrap()
    }

    fn close(got: f64, want: f64, tol: f64) -> bool {
        (got - want).abs() <= tol * want.abs().max(1.0)
    }

    #[test]
    fn grid_helpers() {
        let lg = log_grid(0.1, 10.0, 5).unwrap();
        assert_eq!(lg[0], 0.1);
        assert_eq!(lg[4], 10.0);
        assert!(close(lg[2], 1.0, 1e-12));
        assert!(lg.windows(2).all(|w| w[1] > w[0]));

        let ln = linear_grid(-1.0, 3.0, 9).unwrap();
        assert_eq!(ln[0], -1.0);
        assert_eq!(ln[8], 3.0);
        assert!(close(ln[4], 1.0, 1e-12));

        assert!(log_grid(0.0, 1.0, 4).is_err());
        assert!(log_grid(2.0, 1.0, 4).is_err());
        assert!(linear_grid(0.0, 1.0, 0).is_err());
        assert_eq!(linear_grid(2.0, 2.0, 1).unwrap(), vec![2.0]);
    }

    #[test]
    fn cm_direct_worked_example() {
        // F(1;2;-x) = (1-e^-x)/x is completely monotone
        let target = CmTarget::Direct(spec(&[1.0], &[2.0]));
        let grid = log_grid(0.1, 10.0, 24).unwrap();
        let report = cm_check(&target, 6, &grid, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.hypothesis, Status::Holds);
        assert!(report.min_margin > 0.0);
        assert_eq!(report.argmin, 10.0);
        assert_eq!(report.points, 24);
        assert_eq!(report.property, "cm[n<=6]");
    }

    #[test]
    fn cm_direct_identity_case() {
        // A = B: every shifted evaluation collapses to e^-x
        let target = CmTarget::Direct(spec(&[1.5], &[1.5]));
        let grid = log_grid(0.1, 10.0, 16).unwrap();
        let report = cm_check(&target, 4, &grid, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.hypothesis, Status::Holds);
        assert!(close(report.min_margin, (-10.0f64).exp(), 1e-11));
    }

    #[test]
    fn cm_direct_shift_margins_nonincreasing_in_order() {
        // diagnostic specific to F(1;2;-x): the derivative magnitudes are
        // moments of t^n e^{-xt} on [0,1], so they shrink as n grows
        let s = spec(&[1.0], &[2.0]);
        let cfg = QuadratureConfig::default();
        for &x in &[0.3, 1.0, 4.0] {
            let mut last = f64::INFINITY;
            for n in 0..=6u32 {
                let margin = shift_derivative(&s, n, x, &cfg).unwrap();
                assert!(margin <= last + 1e-12, "order {n} grew at x={x}");
                last = margin;
            }
        }
    }

    #[test]
    fn cm_direct_gauss_shape() {
        // F(1,1;2;-x) = ln(1+x)/x, scanned beyond the series disk
        let s = spec(&[1.0, 1.0], &[2.0]);
        let cfg = QuadratureConfig::default();
        let value = shift_derivative(&s, 0, 5.0, &cfg).unwrap();
        assert!(close(value, 6.0f64.ln() / 5.0, 1e-10));

        let target = CmTarget::Direct(s);
        let grid = log_grid(0.1, 5.0, 12).unwrap();
        let report = cm_check(&target, 3, &grid, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.hypothesis, Status::Holds);
    }

    #[test]
    fn cm_direct_scan_catches_oscillation() {
        // 0F1(;1;-x) = J_0(2 sqrt x) oscillates; the theorem does not cover
        // p < q shapes, and the scan must find the sign change
        let target = CmTarget::Direct(spec(&[], &[1.0]));
        let grid = linear_grid(1.0, 40.0, 40).unwrap();
        let report = cm_check(&target, 0, &grid, 1e-9).unwrap();
        assert!(!report.pass);
        assert_eq!(report.hypothesis, Status::NotApplicable);
    }

    #[test]
    fn cm_direct_rejects() {
        let target = CmTarget::Direct(spec(&[1.0], &[2.0]));
        assert!(cm_check(&target, 9, &[1.0], 1e-9).is_err());
        assert!(cm_check(&target, 2, &[1.0, 0.0], 1e-9).is_err());
        assert!(cm_check(&target, 2, &[-0.5], 1e-9).is_err());
    }

    #[test]
    fn composite_matches_log_closed_form() {
        // sigma=1, A=(1), B=(2): x^-1 F(1,1;2;-1/x) = ln(1 + 1/x)
        let (a, b) = (pv(&[1.0]), pv(&[2.0]));
        let cfg = QuadratureConfig::default();
        for &x in &[0.3, 0.7, 1.5, 7.0, 40.0] {
            let got = stieltjes_composite(1.0, &a, &b, x, &cfg).unwrap();
            let want = (1.0 / x).ln_1p();
            assert!(
                (got / want - 1.0).abs() <= 1e-8,
                "composite off at x={x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn cm_inverse_worked_example() {
        let target = CmTarget::InverseArgument {
            sigma: 1.0,
            a: pv(&[1.0]),
            b: pv(&[2.0]),
        };
        let grid = log_grid(1.2, 20.0, 10).unwrap();
        let report = cm_check(&target, 4, &grid, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.hypothesis, Status::Holds);
        assert!(report.min_margin > 0.0);

        // low orders stay clean even on the quadrature side of the composite
        let small = log_grid(0.2, 1.0, 4).unwrap();
        let report = cm_check(&target, 2, &small, 1e-9).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn cm_inverse_rejects() {
        let target = CmTarget::InverseArgument {
            sigma: 1.0,
            a: pv(&[1.0]),
            b: pv(&[2.0]),
        };
        assert!(cm_check(&target, 5, &[2.0], 1e-9).is_err());
        assert!(cm_check(&target, 4, &[1e-4], 1e-9).is_err());
        let mismatched = CmTarget::InverseArgument {
            sigma: 1.0,
            a: pv(&[1.0, 2.0]),
            b: pv(&[2.0]),
        };
        assert!(cm_check(&mismatched, 2, &[1.0], 1e-9).is_err());
    }

    #[test]
    fn log_cm_worked_example() {
        let (a, b) = (pv(&[1.0]), pv(&[2.0]));
        let grid = log_grid(1.5, 8.0, 6).unwrap();
        let report = log_cm_check(1.0, &a, &b, &grid, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.hypothesis, Status::Holds);
        assert!(report.min_margin > 0.0);
        assert_eq!(report.property, "log_cm");
    }

    #[test]
    fn log_cm_identity_case() {
        // A = B cancels, so F(s,A;A;-1/x) = (1+1/x)^-s and the composite is
        // (1+x)^-s; its negated log-derivative s/(1+x) is completely
        // monotone, with n-th scan margin (n-1)! s (1+x)^-n
        let (a, b) = (pv(&[2.0]), pv(&[2.0]));
        let cfg = QuadratureConfig::default();
        for &x in &[0.5, 1.5, 6.0] {
            let got = stieltjes_composite(0.7, &a, &b, x, &cfg).unwrap();
            let want = (1.0 + x).powf(-0.7);
            assert!(close(got, want, 1e-9), "composite off at x={x}");
        }
        let grid = log_grid(1.5, 6.0, 5).unwrap();
        let report = log_cm_check(0.7, &a, &b, &grid, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.hypothesis, Status::Holds);
        let want_min = 6.0 * 0.7 * (1.0 + 6.0f64).powi(-4);
        assert!(
            (report.min_margin / want_min - 1.0).abs() < 0.05,
            "min margin {} vs closed form {want_min}",
            report.min_margin
        );
    }

    #[test]
    fn log_cm_rejects() {
        let (a, b) = (pv(&[1.0]), pv(&[2.0]));
        assert!(log_cm_check(1.5, &a, &b, &[2.0], 1e-9).is_err());
        assert!(log_cm_check(0.0, &a, &b, &[2.0], 1e-9).is_err());
        assert!(log_cm_check(1.0, &pv(&[1.0, 2.0]), &b, &[2.0], 1e-9).is_err());
    }

    #[test]
    fn ratio_worked_q1() {
        // 1F1(2;3;-x)/1F1(1;2;-x) decreases on the whole line: p = q and the
        // split-off rows are empty, so the extension clause is vacuous
        let split = SplitSpec::new(
            ParamVec::empty(),
            ParamVec::empty(),
            pv(&[1.0]),
            pv(&[2.0]),
        )
        .unwrap();
        let grid = linear_grid(-0.9, 5.0, 30).unwrap();
        let report = ratio_monotone_check(&split, 1.0, &grid, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.hypothesis, Status::Holds);
        assert!(report.min_margin > 0.0);
        assert_eq!(report.property, "ratio_decreasing");

        // mu = 0 gives the constant ratio 1 with exactly zero margins
        let report = ratio_monotone_check(&split, 0.0, &grid, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.min_margin, 0.0);

        assert!(ratio_monotone_check(&split, -0.5, &grid, 1e-9).is_err());
        assert!(ratio_monotone_check(&split, 1.0, &[1.0], 1e-9).is_err());
    }

    #[test]
    fn ratio_is_one_at_zero_argument() {
        for mu in [0.5, 1.0, 3.0] {
            let num = spec(&[1.0 + mu], &[2.0 + mu]);
            let den = spec(&[1.0], &[2.0]);
            assert_eq!(eval_pfq(&num, 0.0, 1e-14).unwrap().value, 1.0);
            assert_eq!(eval_pfq(&den, 0.0, 1e-14).unwrap().value, 1.0);
        }
    }

    #[test]
    fn ratio_gauss_clause() {
        // p = q+1 with empty B1: dropping the largest A1 entry leaves an
        // empty pair, so the scan extends to (-1, inf)
        let split = SplitSpec::new(pv(&[1.5]), ParamVec::empty(), pv(&[1.0]), pv(&[2.0])).unwrap();
        let grid = linear_grid(-0.9, 3.0, 25).unwrap();
        let report = ratio_monotone_check(&split, 0.7, &grid, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.hypothesis, Status::Holds);

        let mut bad = grid.clone();
        bad.push(-1.0);
        assert!(ratio_monotone_check(&split, 0.7, &bad, 1e-9).is_err());
    }

    #[test]
    fn ratio_domain_extension_gates_hypothesis() {
        // A1' = (0.9) does not dominate B1 = (0.5), so the certified domain
        // stays left of zero; the measure side still satisfies its condition
        let split = SplitSpec::new(pv(&[3.0, 0.9]), pv(&[0.5]), pv(&[1.0]), pv(&[2.0])).unwrap();
        let left = linear_grid(-0.9, -0.1, 8).unwrap();
        let report = ratio_monotone_check(&split, 1.0, &left, 1e-9).unwrap();
        assert_eq!(report.hypothesis, Status::Holds);

        let right = linear_grid(0.5, 2.0, 8).unwrap();
        let report = ratio_monotone_check(&split, 1.0, &right, 1e-9).unwrap();
        assert_eq!(report.hypothesis, Status::Fails);
    }

    #[test]
    fn ratio_measure_side_shape_is_structural() {
        let split = SplitSpec::new(
            ParamVec::empty(),
            ParamVec::empty(),
            pv(&[1.0, 2.0]),
            pv(&[2.5]),
        )
        .unwrap();
        match ratio_monotone_check(&split, 1.0, &[-0.5, -0.1], 1e-9) {
            Err(Error::HypothesisFailed(_)) => {}
            other => panic!("expected HypothesisFailed, got {other:?}"),
        }
    }

    #[test]
    fn logconvex_worked() {
        let split = SplitSpec::new(
            ParamVec::empty(),
            ParamVec::empty(),
            pv(&[1.0]),
            pv(&[2.0]),
        )
        .unwrap();
        let mus = [0.0, 0.5, 1.0, 1.5, 2.0];
        let report = logconvex_check(&split, &mus, 1.0, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.hypothesis, Status::Holds);
        assert!(report.min_margin >= 0.0);
        assert_eq!(report.property, "log_convex");

        // x = 0: log F vanishes identically, second differences are exact zeros
        let report = logconvex_check(&split, &mus, 0.0, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.min_margin, 0.0);
    }

    #[test]
    fn logconvex_full_case() {
        let split = SplitSpec::new(
            ParamVec::empty(),
            ParamVec::empty(),
            pv(&[1.0, 2.0]),
            pv(&[2.0, 3.0]),
        )
        .unwrap();
        let mus = linear_grid(0.0, 2.5, 6).unwrap();
        let report = logconvex_check(&split, &mus, 2.0, 1e-9).unwrap();
        assert!(report.pass);
        assert_eq!(report.hypothesis, Status::Holds);
    }

    #[test]
    fn logconvex_rejects() {
        let split = SplitSpec::new(
            ParamVec::empty(),
            ParamVec::empty(),
            pv(&[1.0]),
            pv(&[2.0]),
        )
        .unwrap();
        assert!(logconvex_check(&split, &[0.0, 1.0], 1.0, 1e-9).is_err());
        assert!(logconvex_check(&split, &[0.0, 1.0, 1.0], 2.0, 1e-9).is_err());
        assert!(logconvex_check(&split, &[-1.0, 0.0, 1.0], 2.0, 1e-9).is_err());
    }

    #[test]
    fn shift_derivative_matches_finite_differences() {
        // analytic shift identity vs Richardson-extrapolated central
        // differences of the plain evaluation, relative 1e-5 for n <= 3
        let cases = [spec(&[0.8], &[2.3]), spec(&[1.0, 2.0], &[2.5, 3.0])];
        let cfg = QuadratureConfig::default();
        for s in &cases {
            for n in 1..=3u32 {
                for &x in &[0.3, 0.7, 1.8] {
                    let shift = shift_derivative(s, n, x, &cfg).unwrap();
                    let mut f = |u: f64| Ok(eval_pfq_extended(s, -u, &cfg)?.value);
                    let h = 0.04 * x;
                    let coarse = central_diff(&mut f, n, x, h).unwrap();
                    let fine = central_diff(&mut f, n, x, 0.5 * h).unwrap();
                    let fd = parity(n) * (4.0 * fine - coarse) / 3.0;
                    assert!(
                        (fd / shift - 1.0).abs() <= 1e-5,
                        "spec mismatch at n={n}, x={x}: shift {shift} vs fd {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn ratio_property_random_splits() {
        // dominated measure-side pairs with equal or empty split-off rows:
        // hypotheses hold, and the scanned ratio never increases beyond noise
        let mut state: u64 = 0x0123456789abcdef;
        let mut rand = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64)
        };
        for trial in 0..40 {
            let m = 1 + (rand() * 2.0) as usize;
            let mut a2 = Vec::new();
            let mut b2 = Vec::new();
            for _ in 0..m {
                let a = 0.3 + 3.7 * rand();
                a2.push(a);
                b2.push(a + 3.0 * rand());
            }
            let split = SplitSpec::new(
                ParamVec::empty(),
                ParamVec::empty(),
                pv(&a2),
                pv(&b2),
            )
            .unwrap();
            let mu = 0.1 + 2.4 * rand();
            let grid = linear_grid(-2.0, 4.0, 9).unwrap();
            let report = ratio_monotone_check(&split, mu, &grid, 1e-9).unwrap();
            assert_eq!(report.hypothesis, Status::Holds, "trial {trial}");
            assert!(
                report.min_margin >= -1e-9,
                "trial {trial}: ratio increased by {}",
                -report.min_margin
            );
        }
    }
}
