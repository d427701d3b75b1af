//! Power-series evaluation of pFq with rigorous truncation control.
//!
//! The series sum_k f_k x^k / k! is summed by the term recurrence
//! t_{k+1} = t_k * prod(a_i + k) / prod(b_j + k) * x / (k + 1) with
//! compensated accumulation. Truncation uses a rigorous envelope on all
//! future term ratios: for k >= 2 max|params|, the ratio at any m >= k is
//! at most |x| k^{p-q-1} e^{2C/k} with C = sum|a| + sum|b| + 1, so once that
//! envelope drops below 1 the tail is geometric. Alternating series with
//! heavy cancellation escalate to double-double accumulation; if even that
//! cannot reach the tolerance the evaluation reports NonConvergence so the
//! caller can switch to an integral representation.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::params::ParamVec;

/// Top/bottom parameter pair for pFq. Shape p <= q+1 and pole-free bottom
/// row are enforced at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperSpec {
    pub a: ParamVec,
    pub b: ParamVec,
}

impl HyperSpec {
    pub fn new(a: ParamVec, b: ParamVec) -> Result<Self> {
        if a.len() > b.len() + 1 {
            return Err(Error::ShapeError {
                p: a.len(),
                q: b.len(),
            });
        }
        for &bj in b.iter() {
            if bj <= 0.0 && bj.fract() == 0.0 {
                return Err(Error::PoleError { value: bj });
            }
        }
        Ok(HyperSpec { a, b })
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    /// Degree of the terminating series when some a_i is a non-positive
    /// integer; the first zero factor cuts everything after it.
    pub fn polynomial_degree(&self) -> Option<u32> {
        self.a
            .iter()
            .filter(|&&ai| ai <= 0.0 && ai.fract() == 0.0)
            .map(|&ai| (-ai) as u32)
            .min()
    }

    /// All parameters shifted up by n (the contiguous derivative shift).
    pub fn shifted(&self, n: u32) -> Result<HyperSpec> {
        HyperSpec::new(self.a.shifted(n as f64), self.b.shifted(n as f64))
    }
}

impl std::fmt::Display for HyperSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F{};{}", self.a, self.b)
    }
}

/// Value with an estimated absolute error (truncation tail plus a rounding
/// allowance) and the number of series terms consumed.
#[derive(Clone, Copy, Debug)]
pub struct EvalResult {
    pub value: f64,
    pub abs_err: f64,
    pub terms_used: usize,
}

const MAX_TERMS: usize = 200_000;
/// Partial sums above this multiple of the result trigger the
/// double-double pass.
const CANCEL_ESCALATE: f64 = 1e8;
/// Beyond this the double-double pass itself cannot certify the tolerance.
const CANCEL_FAIL: f64 = 1e17;

/// Upper envelope for every term ratio |t_{m+1}/t_m| with m >= k, valid for
/// k at least twice the largest parameter magnitude. Wraps each factor
/// (1 + u/m) with |ln(1+u/m)| <= 2|u|/m.
struct RatioEnvelope {
    k0: f64,
    c2: f64,
    abs_x: f64,
    drop: i32, // p - q - 1 <= 0
}

impl RatioEnvelope {
    fn new(spec: &HyperSpec, x: f64) -> Self {
        let max_par = spec
            .a
            .iter()
            .chain(spec.b.iter())
            .fold(1.0f64, |m, &v| m.max(v.abs()));
        let c: f64 = spec.a.iter().map(|v| v.abs()).sum::<f64>()
            + spec.b.iter().map(|v| v.abs()).sum::<f64>()
            + 1.0;
        RatioEnvelope {
            k0: 2.0 * max_par,
            c2: 2.0 * c,
            abs_x: x.abs(),
            drop: spec.p() as i32 - spec.q() as i32 - 1,
        }
    }

    /// Bound for all ratios from step k on, or None while k is too small.
    fn bound(&self, k: usize) -> Option<f64> {
        let kf = k as f64;
        if kf < self.k0 {
            return None;
        }
        Some(self.abs_x * kf.powi(self.drop) * (self.c2 / kf).exp())
    }
}

struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    fn new() -> Self {
        Neumaier { s: 0.0, c: 0.0 }
    }
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }
    #[inline]
    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Evaluates pFq(A; B; x) to relative tolerance `tol`.
///
/// For p = q+1 the series only converges on |x| < 1 (unless the series
/// terminates); outside that the caller gets DomainError and should use an
/// integral representation instead.
pub fn eval_pfq(spec: &HyperSpec, x: f64, tol: f64) -> Result<EvalResult> {
    if !(tol > 0.0) || !x.is_finite() {
        return Err(Error::DomainError(format!(
            "need finite x and tol > 0, got x={x}, tol={tol}"
        )));
    }
    let poly = spec.polynomial_degree();
    if spec.p() == spec.q() + 1 && x.abs() >= 1.0 && poly.is_none() {
        return Err(Error::DomainError(format!(
            "series diverges for p=q+1 at |x| = {} >= 1",
            x.abs()
        )));
    }

    let first = sum_f64(spec, x, tol);
    match first {
        Pass::Done(r) => Ok(r),
        Pass::Escalate => match sum_dd(spec, x, tol) {
            Pass::Done(r) => Ok(r),
            Pass::Escalate => Err(Error::NonConvergence { terms: MAX_TERMS }),
            Pass::TooLong(t) => Err(Error::NonConvergence { terms: t }),
        },
        Pass::TooLong(t) => Err(Error::NonConvergence { terms: t }),
    }
}

enum Pass {
    Done(EvalResult),
    Escalate,
    TooLong(usize),
}

fn sum_f64(spec: &HyperSpec, x: f64, tol: f64) -> Pass {
    let a = spec.a.as_slice();
    let b = spec.b.as_slice();
    let env = RatioEnvelope::new(spec, x);
    let mut sum = Neumaier::new();
    let mut sum_abs = 0.0;
    let mut term = 1.0f64;
    for k in 0..MAX_TERMS {
        sum.add(term);
        sum_abs += term.abs();
        let kf = k as f64;
        let mut next = term * x / (kf + 1.0);
        for &ai in a {
            next *= ai + kf;
        }
        for &bj in b {
            next /= bj + kf;
        }
        if next == 0.0 {
            // terminating series (or underflow past relevance)
            let value = sum.value();
            return finish_f64(value, sum_abs, 0.0, k + 1, spec, tol);
        }
        if let Some(r) = env.bound(k + 1) {
            if r < 1.0 {
                let tail = next.abs() / (1.0 - r);
                let s = sum.value();
                if tail <= tol * s.abs().max(f64::MIN_POSITIVE) {
                    return finish_f64(s, sum_abs, tail, k + 1, spec, tol);
                }
            }
        }
        term = next;
    }
    Pass::TooLong(MAX_TERMS)
}

fn finish_f64(value: f64, sum_abs: f64, tail: f64, terms: usize, spec: &HyperSpec, tol: f64) -> Pass {
    // Terms carry roughly one rounding per factor per step; treat the walk
    // as random for the allowance.
    let factors = (spec.p() + spec.q() + 2) as f64;
    let round = sum_abs * f64::EPSILON * factors * (terms as f64).sqrt();
    if value != 0.0 && sum_abs > CANCEL_ESCALATE * value.abs() {
        return Pass::Escalate;
    }
    if value != 0.0 && round > tol * value.abs() {
        return Pass::Escalate;
    }
    Pass::Done(EvalResult {
        value,
        abs_err: tail + round,
        terms_used: terms,
    })
}

fn sum_dd(spec: &HyperSpec, x: f64, tol: f64) -> Pass {
    let a = spec.a.as_slice();
    let b = spec.b.as_slice();
    let env = RatioEnvelope::new(spec, x);
    let xd = Dd::from_f64(x);
    let mut sum = Dd::from_f64(0.0);
    let mut sum_abs = 0.0f64;
    let mut term = Dd::from_f64(1.0);
    for k in 0..MAX_TERMS {
        sum = sum.add(term);
        sum_abs += term.value().abs();
        let kf = k as f64;
        let mut next = term.mul(xd).div(Dd::from_f64(kf + 1.0));
        for &ai in a {
            next = next.mul(Dd::from_sum(ai, kf));
        }
        for &bj in b {
            next = next.div(Dd::from_sum(bj, kf));
        }
        if next.value() == 0.0 {
            let value = sum.value();
            return finish_dd(value, sum_abs, 0.0, k + 1, tol);
        }
        if let Some(r) = env.bound(k + 1) {
            if r < 1.0 {
                let tail = next.value().abs() / (1.0 - r);
                let s = sum.value();
                if tail <= tol * s.abs().max(f64::MIN_POSITIVE) {
                    return finish_dd(s, sum_abs, tail, k + 1, tol);
                }
            }
        }
        term = next;
    }
    Pass::TooLong(MAX_TERMS)
}

fn finish_dd(value: f64, sum_abs: f64, tail: f64, terms: usize, tol: f64) -> Pass {
    if value != 0.0 && sum_abs > CANCEL_FAIL * value.abs() {
        return Pass::Escalate; // treated as failure by the caller
    }
    // double-double keeps ~31 digits; the surviving error is the final
    // rounding plus the dd tail of the cancelled mass
    let round = value.abs() * f64::EPSILON + sum_abs * 1e-31 * terms as f64;
    if value != 0.0 && round > tol * value.abs() {
        return Pass::Escalate;
    }
    Pass::Done(EvalResult {
        value,
        abs_err: tail + round,
        terms_used: terms,
    })
}

/// n-th derivative of pFq at x via the contiguous shift
/// d^n/dx^n F(A;B;x) = [prod (a_i)_n / prod (b_j)_n] F(A+n; B+n; x).
pub fn derivative_pfq(spec: &HyperSpec, x: f64, n: u32, tol: f64) -> Result<EvalResult> {
    if n == 0 {
        return eval_pfq(spec, x, tol);
    }
    let f = crate::params::coeff_f(&spec.a, &spec.b, n)?;
    if f == 0.0 {
        // differentiated past a terminating series' degree
        return Ok(EvalResult {
            value: 0.0,
            abs_err: 0.0,
            terms_used: 1,
        });
    }
    let shifted = spec.shifted(n)?;
    let inner = eval_pfq(&shifted, x, tol)?;
    Ok(EvalResult {
        value: f * inner.value,
        abs_err: f.abs() * inner.abs_err + (f * inner.value).abs() * f64::EPSILON,
        terms_used: inner.terms_used,
    })
}

/// Generalized cosine cos_n(z) = sum_j (-1)^j z^{nj} / (nj)!.
/// cos_1 = exp(-z), cos_2 = cos(z).
pub fn cos_n(n: u32, z: f64) -> f64 {
    assert!(n >= 1, "cos_n needs n >= 1");
    let zn = {
        let mut p = 1.0;
        for _ in 0..n {
            p *= z;
        }
        p
    };
    let mut sum = Neumaier::new();
    let mut term = 1.0f64;
    for j in 0..10_000u32 {
        sum.add(term);
        let base = (n * j) as f64;
        let mut next = -term * zn;
        for i in 1..=n {
            next /= base + i as f64;
        }
        if next.abs() <= f64::EPSILON * (sum.value().abs() + 1.0) * 0.25 {
            sum.add(next);
            break;
        }
        term = next;
    }
    sum.value()
}
