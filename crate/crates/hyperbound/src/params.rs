//! Parameter vectors and the order/positivity conditions on them.
//!
//! The conditions here decide when series coefficients f_n = prod (a_i)_n /
//! prod (b_j)_n behave monotonically, when the power-sum gap
//! v(t) = sum t^{a_j} - sum t^{b_j} is nonnegative on (0, 1], and at what
//! rates f_n is squeezed between 1/(c)_n and 1/(d)_n. Everything downstream
//! (kernels, bounds, monotonicity certificates) keys off these predicates.

use crate::error::{Error, Result};
use crate::gamma::{ln_gamma, ln_gamma_sign};
use crate::report::Status;
use serde::Serialize;

/// A finite vector of real parameters. Construction validates finiteness
/// only; positivity and shape requirements are enforced per operation.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVec {
    values: Vec<f64>,
}

impl ParamVec {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            if !v.is_finite() {
                return Err(Error::NonFiniteParameter { value: v });
            }
        }
        Ok(ParamVec { values })
    }

    pub fn empty() -> Self {
        ParamVec { values: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Ascending copy; the stored order is preserved.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.iter().cloned().fold(None, |m, v| {
            Some(match m {
                None => v,
                Some(m) => m.min(v),
            })
        })
    }

    pub fn all_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// Every entry shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> ParamVec {
        ParamVec {
            values: self.values.iter().map(|v| v + delta).collect(),
        }
    }

    /// Concatenation with another vector.
    pub fn concat(&self, other: &ParamVec) -> ParamVec {
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        ParamVec { values }
    }
}

impl std::ops::Deref for ParamVec {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl std::fmt::Display for ParamVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| format!("{v}")).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Elementary symmetric polynomials e_0..e_n of the given values, via the
/// product recurrence (numerically benign for positive inputs).
pub fn elem_sym(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// Rising factorial (a)_n = a (a+1) ... (a+n-1); (a)_0 = 1.
pub fn rising_factorial(a: f64, n: u32) -> f64 {
    let mut p = 1.0;
    for k in 0..n {
        p *= a + k as f64;
    }
    p
}

/// Log-space rising factorial: (ln |(a)_n|, sign). The sign is 0.0 when the
/// product hits zero exactly (a is a non-positive integer with -a < n).
pub fn rising_factorial_log(a: f64, n: u32) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    if a > 0.0 {
        // No sign changes; use the gamma-ratio form to stay O(1).
        return (ln_gamma(a + n as f64) - ln_gamma(a), 1.0);
    }
    let mut ln_abs = 0.0;
    let mut sign = 1.0;
    for k in 0..n {
        let f = a + k as f64;
        if f == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        ln_abs += f.abs().ln();
        if f < 0.0 {
            sign = -sign;
        }
    }
    (ln_abs, sign)
}

/// Term-ratio function R(x) = prod (a_i + x) / prod (b_j + x).
pub fn coeff_ratio(a: &ParamVec, b: &ParamVec, x: f64) -> f64 {
    let num: f64 = a.iter().map(|ai| ai + x).product();
    let den: f64 = b.iter().map(|bj| bj + x).product();
    num / den
}

/// Series coefficient f_n = prod (a_i)_n / prod (b_j)_n.
pub fn coeff_f(a: &ParamVec, b: &ParamVec, n: u32) -> Result<f64> {
    let (ln, sign) = coeff_f_log(a, b, n)?;
    Ok(sign * ln.exp())
}

/// Log-space series coefficient: (ln |f_n|, sign).
pub fn coeff_f_log(a: &ParamVec, b: &ParamVec, n: u32) -> Result<(f64, f64)> {
    let mut ln_abs = 0.0;
    let mut sign = 1.0;
    for &ai in a.iter() {
        let (l, s) = rising_factorial_log(ai, n);
        if s == 0.0 {
            return Ok((f64::NEG_INFINITY, 0.0));
        }
        ln_abs += l;
        sign *= s;
    }
    for &bj in b.iter() {
        let (l, s) = rising_factorial_log(bj, n);
        if s == 0.0 {
            return Err(Error::PoleError { value: bj });
        }
        ln_abs -= l;
        sign *= s;
    }
    Ok((ln_abs, sign))
}

/// Parametric excess psi = sum(B) - sum(A).
pub fn parametric_excess(a: &ParamVec, b: &ParamVec) -> f64 {
    b.sum() - a.sum()
}

/// Outcome of the weak-supermajorization comparison of two equal-length
/// positive vectors: after ascending sort, every prefix sum of A must be
/// bounded by the matching prefix sum of B.
#[derive(Clone, Debug, Serialize)]
pub struct SupermajorizationReport {
    pub holds: bool,
    /// 1-based index of the first failing prefix, when any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<usize>,
    /// Weak supermajorization plus equal total sums.
    pub majorized: bool,
}

/// Checks whether B is weakly supermajorized by A (prefix sums of the
/// ascending sort of A bounded by those of B, all entries positive).
pub fn check_weak_supermajorization(
    a: &ParamVec,
    b: &ParamVec,
) -> Result<SupermajorizationReport> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    for &v in a.iter().chain(b.iter()) {
        if v <= 0.0 {
            return Err(Error::NonPositiveParameter { value: v });
        }
    }
    let sa = a.sorted();
    let sb = b.sorted();
    let mut pa = 0.0;
    let mut pb = 0.0;
    let mut witness = None;
    for k in 0..sa.len() {
        pa += sa[k];
        pb += sb[k];
        if pa > pb && witness.is_none() {
            witness = Some(k + 1);
        }
    }
    let holds = witness.is_none();
    let majorized = holds && (pa - pb).abs() <= 1e-12 * (1.0 + pa.abs());
    Ok(SupermajorizationReport {
        holds,
        witness,
        majorized,
    })
}

/// Composite scan grid on (0, 1): geometric toward 0, uniform in the middle,
/// geometric toward 1. Always includes the endpoint t = 1.
pub fn unit_interval_grid(points: usize) -> Vec<f64> {
    let points = points.max(16);
    let n_low = 3 * points / 8;
    let n_high = 3 * points / 8;
    let n_mid = points - n_low - n_high;
    let mut grid = Vec::with_capacity(points + 1);
    // 1e-12 .. 0.1 geometric
    let lo_span = (0.1f64 / 1e-12).ln();
    for i in 0..n_low {
        let f = i as f64 / n_low as f64;
        grid.push(1e-12 * (lo_span * f).exp());
    }
    // 0.1 .. 0.9 uniform
    for i in 0..n_mid {
        grid.push(0.1 + 0.8 * i as f64 / n_mid as f64);
    }
    // 0.9 .. 1 - 1e-12 geometric in the complement
    let hi_span = (0.1f64 / 1e-12).ln();
    for i in 0..n_high {
        let f = i as f64 / n_high as f64;
        grid.push(1.0 - 0.1 * (-hi_span * f).exp());
    }
    grid.push(1.0);
    grid
}

/// Grid report for the power-sum gap v(t) = sum t^{a_j} - sum t^{b_j}.
#[derive(Clone, Debug, Serialize)]
pub struct VScanReport {
    pub v_min: f64,
    pub argmin: f64,
    pub nonneg: bool,
    pub psi: f64,
}

/// Scans v on a composite grid of (0, 1] and applies two analytic
/// necessities: v(1) = 0 exactly, and v'(1) = -psi, so psi < 0 forces a
/// negative dip just left of 1 regardless of grid resolution.
pub fn v_nonneg_check(a: &ParamVec, b: &ParamVec, points: usize) -> Result<VScanReport> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    for &v in a.iter().chain(b.iter()) {
        if v <= 0.0 {
            return Err(Error::NonPositiveParameter { value: v });
        }
    }
    const TOL: f64 = 1e-12;
    let psi = parametric_excess(a, b);
    let mut v_min = 0.0;
    let mut argmin = 1.0;
    for &t in &unit_interval_grid(points) {
        let v: f64 = a.iter().map(|&ai| t.powf(ai)).sum::<f64>()
            - b.iter().map(|&bj| t.powf(bj)).sum::<f64>();
        if v < v_min {
            v_min = v;
            argmin = t;
        }
    }
    let nonneg = v_min >= -TOL && psi >= -TOL;
    Ok(VScanReport {
        v_min,
        argmin,
        nonneg,
        psi,
    })
}

/// Squeeze rates for coefficients of series with p = q - 1: the smallest c
/// with f_n >= 1/(c)_n and the largest d with f_n (d)_n <= 1.
#[derive(Clone, Debug, Serialize)]
pub struct BesselRates {
    pub c: f64,
    pub d: f64,
    pub d_positive: bool,
}

/// Computes the rates c = max_i [e_i(b) - e_i(a)] / e_{i-1}(a) and
/// d = min_i of the same quantity, with the convention e_q(a) = 0 for the
/// missing top-degree term. Requires |A| = |B| - 1 and positive entries.
pub fn bessel_rates(a: &ParamVec, b: &ParamVec) -> Result<BesselRates> {
    if a.len() + 1 != b.len() {
        return Err(Error::ShapeError {
            p: a.len(),
            q: b.len(),
        });
    }
    for &v in a.iter().chain(b.iter()) {
        if v <= 0.0 {
            return Err(Error::NonPositiveParameter { value: v });
        }
    }
    let q = b.len();
    let ea = elem_sym(a); // degrees 0..q-1
    let eb = elem_sym(b); // degrees 0..q
    let mut c = f64::NEG_INFINITY;
    let mut d = f64::INFINITY;
    for i in 1..=q {
        let ea_i = if i < ea.len() { ea[i] } else { 0.0 };
        let r = (eb[i] - ea_i) / ea[i - 1];
        c = c.max(r);
        d = d.min(r);
    }
    Ok(BesselRates {
        c,
        d,
        d_positive: d > 0.0,
    })
}

/// Full predicate panel for a parameter pair. Every predicate is
/// three-state so shape or positivity failures degrade to NotApplicable
/// instead of errors.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub psi: f64,
    pub weak_supermajorized: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak_witness: Option<usize>,
    pub majorized: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_min: Option<f64>,
    pub v_nonneg: Status,
    /// Ratio chain e_q(b)/e_q(a) >= ... >= e_1(b)/e_1(a) >= 1 (|A| = |B|).
    pub symmetric_chain: Status,
    /// Each e_i(b) >= e_i(a) (|A| = |B|).
    pub symmetric_each_geq1: Status,
    /// e_{q-i}(B) >= e_{p-i}(A) for i = 0..p (needs p < q).
    pub elem_sym_dominance: Status,
    /// e_q(b)/e_p(a) <= e_{q-1}(b)/e_{p-1}(a) <= ... <= e_{q-p}(b) (p < q).
    pub upper_ratio_chain: Status,
    /// Exact nonnegativity criterion for q = 2: min(A) <= min(B) and psi >= 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q2_exact: Option<bool>,
    /// Whether the q = 2 exact criterion agrees with the grid scan verdict.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q2_matches_v: Option<bool>,
}

pub fn condition_report(a: &ParamVec, b: &ParamVec) -> ConditionReport {
    let psi = parametric_excess(a, b);
    let positive = a.all_positive() && b.all_positive();
    let same_len = a.len() == b.len() && !a.is_empty();

    let (weak, weak_witness, major) = if same_len && positive {
        match check_weak_supermajorization(a, b) {
            Ok(r) => (
                Status::from_bool(r.holds),
                r.witness,
                Status::from_bool(r.majorized),
            ),
            Err(_) => (Status::NotApplicable, None, Status::NotApplicable),
        }
    } else {
        (Status::NotApplicable, None, Status::NotApplicable)
    };

    let (v_min, v_nonneg) = if same_len && positive {
        match v_nonneg_check(a, b, 2048) {
            Ok(r) => (Some(r.v_min), Status::from_bool(r.nonneg)),
            Err(_) => (None, Status::NotApplicable),
        }
    } else {
        (None, Status::NotApplicable)
    };

    let (symmetric_chain, symmetric_each) = if same_len && positive {
        let ea = elem_sym(a);
        let eb = elem_sym(b);
        let q = a.len();
        let each = (1..=q).all(|i| eb[i] >= ea[i]);
        // chain nondecreasing in degree: e_i(b)/e_i(a) <= e_{i+1}(b)/e_{i+1}(a),
        // compared cross-multiplied to avoid division.
        let mut chain = eb[1] >= ea[1];
        for i in 1..q {
            if eb[i + 1] * ea[i] < eb[i] * ea[i + 1] {
                chain = false;
            }
        }
        (Status::from_bool(chain && each), Status::from_bool(each))
    } else {
        (Status::NotApplicable, Status::NotApplicable)
    };

    let (dominance, upper_chain) = if positive && a.len() < b.len() && !b.is_empty() {
        let p = a.len();
        let q = b.len();
        let ea = elem_sym(a);
        let eb = elem_sym(b);
        let dom = (0..=p).all(|i| eb[q - i] >= ea[p - i]);
        // e_{q-i}(b)/e_{p-i}(a) nondecreasing as i runs 0..p
        let mut chain = true;
        for i in 0..p {
            // r_i <= r_{i+1}: e_{q-i}(b) e_{p-i-1}(a) <= e_{q-i-1}(b) e_{p-i}(a)
            if eb[q - i] * ea[p - i - 1] > eb[q - i - 1] * ea[p - i] {
                chain = false;
            }
        }
        (Status::from_bool(dom), Status::from_bool(chain))
    } else {
        (Status::NotApplicable, Status::NotApplicable)
    };

    let (q2_exact, q2_matches) = if same_len && positive && a.len() == 2 {
        let exact = a.min().unwrap() <= b.min().unwrap() + 1e-10 && psi >= -1e-10;
        let matches = match v_nonneg {
            Status::Holds => Some(exact),
            Status::Fails => Some(!exact),
            Status::NotApplicable => None,
        };
        (Some(exact), matches)
    } else {
        (None, None)
    };

    ConditionReport {
        psi,
        weak_supermajorized: weak,
        weak_witness,
        majorized: major,
        v_min,
        v_nonneg,
        symmetric_chain,
        symmetric_each_geq1: symmetric_each,
        elem_sym_dominance: dominance,
        upper_ratio_chain: upper_chain,
        q2_exact,
        q2_matches_v: q2_matches,
    }
}

/// Log-gamma sum over a vector, with sign tracking for possibly negative
/// arguments: returns (sum ln |Gamma|, product of signs).
pub fn ln_gamma_vec(values: &[f64]) -> Result<(f64, f64)> {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for &v in values {
        let (l, s) = ln_gamma_sign(v)?;
        ln += l;
        sign *= s;
    }
    Ok((ln, sign))
}
