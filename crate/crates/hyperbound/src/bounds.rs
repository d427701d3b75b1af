//! Closed-form two-sided envelopes for hypergeometric values.
//!
//! Every operation returns a certificate carrying the envelope endpoints
//! together with the status of each hypothesis the enclosing theorem needs,
//! so a scan can tell "bound violated" apart from "bound not promised here".
//! Envelope values are computed even when a hypothesis fails (they are then
//! advisory); hunting for counterexamples needs the numbers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{
    check_weak_supermajorization, coeff_f, elem_sym, v_nonneg_check, ParamVec,
};
use crate::quad::QuadratureConfig;
use crate::representations::eval_pfq_extended;
use crate::series::{eval_pfq, HyperSpec};

/// One named predicate from a theorem's hypothesis list. `margin` is the
/// smallest signed slack found while checking it; the predicate holds iff
/// the margin is nonnegative. A margin of -inf marks a structural failure
/// (nonpositive parameter, vanishing denominator) rather than a near miss.
#[derive(Clone, Debug, Serialize)]
pub struct BoundHypothesis {
    pub name: &'static str,
    pub holds: bool,
    pub margin: f64,
}

impl BoundHypothesis {
    fn from_margin(name: &'static str, margin: f64) -> Self {
        BoundHypothesis {
            name,
            holds: margin >= 0.0,
            margin,
        }
    }

    fn structural_failure(name: &'static str) -> Self {
        BoundHypothesis {
            name,
            holds: false,
            margin: f64::NEG_INFINITY,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCertificate {
    pub hypotheses: Vec<BoundHypothesis>,
    /// Lower envelope; None when the theorem offers none.
    pub lower: Option<f64>,
    /// Upper envelope; None when the theorem offers none, or when its rate
    /// constant makes the formula undefined.
    pub upper: Option<f64>,
    /// Series value at the same point, when the sum is within reach there.
    pub reference_value: Option<f64>,
}

impl BoundCertificate {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.holds)
    }

    /// Smallest signed slack of the reference inside [lower, upper]; None
    /// without a reference value.
    pub fn containment_margin(&self) -> Option<f64> {
        let r = self.reference_value?;
        let mut m = f64::INFINITY;
        if let Some(l) = self.lower {
            m = m.min(r - l);
        }
        if let Some(u) = self.upper {
            m = m.min(u - r);
        }
        if m == f64::INFINITY {
            None
        } else {
            Some(m)
        }
    }
}

const SYM_CHAIN: &str = "sym-ratio-chain-increasing";
const SYM_DOMINATION: &str = "sym-domination";
const NONNEG_KERNEL: &str = "nonneg-kernel";
const UPPER1_GATE: &str = "upper1-sym-domination";
const UPPER2_GATE: &str = "upper2-ratio-chain-decreasing";
const LOWER_RATE: &str = "lower-rate-positive";
const UPPER_RATE: &str = "upper-rate-positive";

/// Chain of elementary-symmetric ratios
/// e_q(B)/e_q(A) >= ... >= e_1(B)/e_1(A) >= 1, every polynomial positive.
/// Under it the term-ratio map n -> prod (a_i+n)/(b_i+n) increases, which is
/// what the lower envelopes lean on.
fn sym_chain_hypothesis(a: &[f64], b: &[f64]) -> BoundHypothesis {
    let ea = elem_sym(a);
    let eb = elem_sym(b);
    for k in 1..=a.len() {
        if ea[k] <= 0.0 || eb[k] < 0.0 {
            return BoundHypothesis::structural_failure(SYM_CHAIN);
        }
    }
    let mut margin = f64::INFINITY;
    let mut prev = 1.0;
    for k in 1..=a.len() {
        let r = eb[k] / ea[k];
        margin = margin.min(r - prev);
        prev = r;
    }
    BoundHypothesis::from_margin(SYM_CHAIN, margin)
}

/// e_k(B) >= e_k(A) for every k >= 1: makes the term ratio at most 1, hence
/// the Taylor coefficients nonincreasing. This is all the upper envelopes
/// ask for.
fn sym_domination_hypothesis(a: &[f64], b: &[f64]) -> BoundHypothesis {
    let ea = elem_sym(a);
    let eb = elem_sym(b);
    let mut margin = f64::INFINITY;
    for k in 1..=a.len() {
        margin = margin.min(eb[k] - ea[k]);
    }
    BoundHypothesis::from_margin(SYM_DOMINATION, margin)
}

/// Nonnegativity of the weight behind the negative-argument envelopes:
/// weak supermajorization of B by A when it holds, otherwise a grid scan of
/// the power-sum gap v(t) = sum t^a - sum t^b. Positivity of all parameters
/// is part of the predicate (the weight only exists for A, B > 0).
fn nonneg_kernel_hypothesis(a: &ParamVec, b: &ParamVec) -> BoundHypothesis {
    if a.iter().chain(b.iter()).any(|&v| v <= 0.0) {
        return BoundHypothesis::structural_failure(NONNEG_KERNEL);
    }
    let major = check_weak_supermajorization(a, b)
        .map(|r| r.holds)
        .unwrap_or(false);
    match v_nonneg_check(a, b, 400) {
        Ok(scan) => BoundHypothesis {
            name: NONNEG_KERNEL,
            holds: scan.nonneg || major,
            margin: scan.v_min,
        },
        Err(_) => BoundHypothesis::structural_failure(NONNEG_KERNEL),
    }
}

const REFERENCE_TOL: f64 = 1e-13;

/// Series value at the same point when the sum converges there; None keeps
/// the certificate usable where the reference is out of reach.
fn series_reference(a: &ParamVec, b: &ParamVec, x: f64) -> Option<f64> {
    let spec = HyperSpec::new(a.clone(), b.clone()).ok()?;
    eval_pfq(&spec, x, REFERENCE_TOL).ok().map(|r| r.value)
}

/// Reference for the Gauss-type function F(sigma, A; B; x), continued
/// through the integral form when |x| reaches past the disk.
fn stieltjes_reference(sigma: f64, a: &ParamVec, b: &ParamVec, x: f64) -> Option<f64> {
    let top = ParamVec::new(vec![sigma]).ok()?.concat(a);
    let spec = HyperSpec::new(top, b.clone()).ok()?;
    eval_pfq_extended(&spec, x, &QuadratureConfig::default())
        .ok()
        .map(|r| r.value)
}

fn require_equal_len(a: &ParamVec, b: &ParamVec) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

fn require_nonneg_x(x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::DomainError(format!("x = {x} must be nonnegative")));
    }
    Ok(())
}

/// Exponential sandwich e^{f_1 x} <= F(A;B;x) <= 1 - f_1 + f_1 e^x for the
/// Kummer-type function at x >= 0, with the tighter second-order pair when
/// `refined` is set. The lower envelope needs the full increasing ratio
/// chain; the upper needs only domination.
pub fn luke_bounds(a: &ParamVec, b: &ParamVec, x: f64, refined: bool) -> Result<BoundCertificate> {
    require_equal_len(a, b)?;
    require_nonneg_x(x)?;
    let f1 = coeff_f(a, b, 1)?;
    let hypotheses = vec![sym_chain_hypothesis(a, b), sym_domination_hypothesis(a, b)];
    let (lower, upper) = if refined {
        let f2 = coeff_f(a, b, 2)?;
        if f2 == 0.0 || f1 == 0.0 {
            return Err(Error::PoleError { value: 0.0 });
        }
        // exp_m1 keeps the x -> 0 limit exactly 1
        let lower = 1.0 + f1 * f1 / f2 * (f2 / f1 * x).exp_m1();
        let upper = 1.0 - f2 + (f1 - f2) * x + f2 * x.exp();
        (lower, upper)
    } else {
        ((f1 * x).exp(), 1.0 - f1 + f1 * x.exp())
    };
    Ok(BoundCertificate {
        hypotheses,
        lower: Some(lower),
        upper: Some(upper),
        reference_value: series_reference(a, b, x),
    })
}

/// Side of the argument for the Gauss-type envelopes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ArgSign {
    /// F(sigma, A; B; x) on 0 <= x < 1, under the positive-argument chain.
    Positive,
    /// F(sigma, A; B; -x) on x >= 0, under kernel nonnegativity.
    Negative,
}

/// Power-law sandwich for the Gauss-type function obtained by damping the
/// exponential pair through the Laplace integral: positive side
/// (1-f_1 x)^-sigma <= F <= 1 - f_1 + f_1 (1-x)^-sigma on [0,1), negative
/// side (1+f_1 x)^-sigma <= F(-x) <= 1 - f_1 + f_1 (1+x)^-sigma. The
/// refined variant exists on the positive side only.
pub fn stieltjes_bounds(
    sigma: f64,
    a: &ParamVec,
    b: &ParamVec,
    x: f64,
    refined: bool,
    sign: ArgSign,
) -> Result<BoundCertificate> {
    require_equal_len(a, b)?;
    if !(sigma > 0.0) {
        return Err(Error::DomainError(format!("sigma = {sigma} must be positive")));
    }
    let f1 = coeff_f(a, b, 1)?;
    match sign {
        ArgSign::Positive => {
            if !(0.0..1.0).contains(&x) {
                return Err(Error::DomainError(format!("x = {x} outside [0, 1)")));
            }
            let hypotheses = vec![sym_chain_hypothesis(a, b), sym_domination_hypothesis(a, b)];
            let (lower, upper) = if refined {
                let f2 = coeff_f(a, b, 2)?;
                if f2 == 0.0 || f1 == 0.0 {
                    return Err(Error::PoleError { value: 0.0 });
                }
                let g = f1 * f1 / f2;
                let lower = 1.0 - g + g * (1.0 - f2 * x / f1).powf(-sigma);
                let upper = 1.0 - f2 + sigma * (f1 - f2) * x + f2 * (1.0 - x).powf(-sigma);
                (lower, upper)
            } else {
                (
                    (1.0 - f1 * x).powf(-sigma),
                    1.0 - f1 + f1 * (1.0 - x).powf(-sigma),
                )
            };
            Ok(BoundCertificate {
                hypotheses,
                lower: Some(lower),
                upper: Some(upper),
                reference_value: stieltjes_reference(sigma, a, b, x),
            })
        }
        ArgSign::Negative => {
            require_nonneg_x(x)?;
            if refined {
                return Err(Error::DomainError(
                    "refined pair exists only for the positive-argument side".into(),
                ));
            }
            let hypotheses = vec![nonneg_kernel_hypothesis(a, b)];
            let lower = (1.0 + f1 * x).powf(-sigma);
            let upper = 1.0 - f1 + f1 * (1.0 + x).powf(-sigma);
            Ok(BoundCertificate {
                hypotheses,
                lower: Some(lower),
                upper: Some(upper),
                reference_value: stieltjes_reference(sigma, a, b, -x),
            })
        }
    }
}

/// Exponential sandwich e^{-f_1 x} <= F(A;B;-x) <= 1 - f_1 + f_1 e^{-x},
/// valid for every real x under kernel nonnegativity: the lower side is
/// Jensen's inequality for the unit-mass weight, the upper its converse.
pub fn jensen_bounds(a: &ParamVec, b: &ParamVec, x: f64) -> Result<BoundCertificate> {
    require_equal_len(a, b)?;
    if !x.is_finite() {
        return Err(Error::DomainError(format!("x = {x} must be finite")));
    }
    let f1 = coeff_f(a, b, 1)?;
    let hypotheses = vec![nonneg_kernel_hypothesis(a, b)];
    Ok(BoundCertificate {
        hypotheses,
        lower: Some((-f1 * x).exp()),
        upper: Some(1.0 - f1 + f1 * (-x).exp()),
        reference_value: series_reference(a, b, -x),
    })
}

/// The two raw upper envelopes for p < q at x >= 0, before gating:
/// (1 - f_1 + f_1 e^x, e^{f_1 x}).
pub fn p_lt_q_envelopes(a: &ParamVec, b: &ParamVec, x: f64) -> Result<(f64, f64)> {
    if a.len() >= b.len() {
        return Err(Error::ShapeError {
            p: a.len(),
            q: b.len(),
        });
    }
    require_nonneg_x(x)?;
    let f1 = coeff_f(a, b, 1)?;
    Ok((1.0 - f1 + f1 * x.exp(), (f1 * x).exp()))
}

/// Gate for the first envelope: e_{q-i}(B) >= e_{p-i}(A) for i = 0..p keeps
/// the term ratio at most 1.
fn upper1_gate(a: &[f64], b: &[f64]) -> BoundHypothesis {
    let ea = elem_sym(a);
    let eb = elem_sym(b);
    let (p, q) = (a.len(), b.len());
    let mut margin = f64::INFINITY;
    for i in 0..=p {
        margin = margin.min(eb[q - i] - ea[p - i]);
    }
    BoundHypothesis::from_margin(UPPER1_GATE, margin)
}

/// Gate for the second envelope: the decreasing chain
/// e_q(B)/e_p(A) <= e_{q-1}(B)/e_{p-1}(A) <= ... <= e_{q-p}(B) makes the
/// term-ratio map decreasing, so every coefficient sits under f_1^n.
fn upper2_gate(a: &[f64], b: &[f64]) -> BoundHypothesis {
    let ea = elem_sym(a);
    let eb = elem_sym(b);
    let (p, q) = (a.len(), b.len());
    for k in 1..=p {
        if ea[k] <= 0.0 {
            return BoundHypothesis::structural_failure(UPPER2_GATE);
        }
    }
    let mut margin = f64::INFINITY;
    let mut prev = f64::NEG_INFINITY;
    for j in 0..=p {
        let term = eb[q - j] / ea[p - j];
        margin = margin.min(term - prev);
        prev = term;
    }
    BoundHypothesis::from_margin(UPPER2_GATE, margin)
}

/// Upper envelopes for F(A;B;x) with fewer upper than lower parameters.
/// The certificate's upper is the tightest envelope whose gate holds (the
/// smaller of both, advisory, when neither does); there is no lower side.
pub fn upper_bounds_p_lt_q(a: &ParamVec, b: &ParamVec, x: f64) -> Result<BoundCertificate> {
    let (u1, u2) = p_lt_q_envelopes(a, b, x)?;
    let g1 = upper1_gate(a, b);
    let g2 = upper2_gate(a, b);
    let upper = match (g1.holds, g2.holds) {
        (true, false) => u1,
        (false, true) => u2,
        _ => u1.min(u2),
    };
    Ok(BoundCertificate {
        hypotheses: vec![g1, g2],
        lower: None,
        upper: Some(upper),
        reference_value: series_reference(a, b, x),
    })
}

/// Rate constants (c, d) for the Bessel-type shape |A| = |B| - 1: the
/// largest and smallest of the elementary-symmetric increments
/// (e_i(B) - e_i(A)) / e_{i-1}(A) over i = 1..q, with e_k(A) = 0 past the
/// length of A. They certify f_n >= 1/(c)_n for every n, and
/// f_n (d)_n <= 1 whenever d > 0.
pub fn bessel_rates(a: &ParamVec, b: &ParamVec) -> Result<(f64, f64)> {
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
    let ea = elem_sym(a);
    let eb = elem_sym(b);
    let mut c = f64::NEG_INFINITY;
    let mut d = f64::INFINITY;
    for i in 1..=b.len() {
        let eai = if i < ea.len() { ea[i] } else { 0.0 };
        let r = (eb[i] - eai) / ea[i - 1];
        c = c.max(r);
        d = d.min(r);
    }
    Ok((c, d))
}

/// Lower branch of the confluent sandwich at rate c:
/// e^{s-c} (1/2 + s/(2c))^{-c} with s = sqrt(4x + c^2). The exponent is
/// computed as 4x/(s+c) so the x = 0 value is exactly 1.
fn f01_lower_value(c: f64, x: f64) -> f64 {
    let s = (4.0 * x + c * c).sqrt();
    (4.0 * x / (s + c)).exp() * (0.5 + s / (2.0 * c)).powf(-c)
}

/// Upper branch at rate d: e^{s-d-1} ((d-1+s)/(2d))^{1-d} with
/// s = sqrt(4x + (d+1)^2). At d = 1 the power is the removable 1.
fn f01_upper_value(d: f64, x: f64) -> f64 {
    let s = (4.0 * x + (d + 1.0) * (d + 1.0)).sqrt();
    (4.0 * x / (s + d + 1.0)).exp() * ((d - 1.0 + s) / (2.0 * d)).powf(1.0 - d)
}

/// Two-sided envelope for the Bessel-type function F(A;B;x), |A| = |B| - 1,
/// through the confluent minorant/majorant at the rates of `bessel_rates`.
/// The upper side exists only when the d rate is positive.
pub fn bessel_bounds(a: &ParamVec, b: &ParamVec, x: f64) -> Result<BoundCertificate> {
    let (c, d) = bessel_rates(a, b)?;
    require_nonneg_x(x)?;
    let hypotheses = vec![
        BoundHypothesis {
            name: LOWER_RATE,
            holds: c > 0.0,
            margin: c,
        },
        BoundHypothesis {
            name: UPPER_RATE,
            holds: d > 0.0,
            margin: d,
        },
    ];
    Ok(BoundCertificate {
        hypotheses,
        lower: (c > 0.0).then(|| f01_lower_value(c, x)),
        upper: (d > 0.0).then(|| f01_upper_value(d, x)),
        reference_value: series_reference(a, b, x),
    })
}

/// The confluent sandwich itself, exposed because it carries both the
/// Bessel-type envelopes and the classical ratio bounds it derives from.
pub fn f01_bounds(c: f64, x: f64) -> Result<BoundCertificate> {
    if !(c > 0.0) {
        return Err(Error::DomainError(format!("c = {c} must be positive")));
    }
    require_nonneg_x(x)?;
    let a = ParamVec::empty();
    let b = ParamVec::new(vec![c])?;
    Ok(BoundCertificate {
        hypotheses: Vec::new(),
        lower: Some(f01_lower_value(c, x)),
        upper: Some(f01_upper_value(c, x)),
        reference_value: series_reference(&a, &b, x),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{coeff_f_log, rising_factorial_log};

    fn pv(values: &[f64]) -> ParamVec {
        ParamVec::new(values.to_vec()).unwrap()
    }

    fn assert_close(actual: f64, expected: f64, rel: f64) {
        let scale = expected.abs().max(1e-300);
        assert!(
            (actual - expected).abs() <= rel * scale,
            "{actual} vs {expected} (rel {:.3e})",
            (actual - expected).abs() / scale
        );
    }

    fn lcg(state: &mut u64) -> f64 {
        *state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*state >> 11) as f64) / ((1u64 << 53) as f64)
    }

    #[test]
    fn luke_plain_worked() {
        let cert = luke_bounds(&pv(&[1.0]), &pv(&[2.0]), 1.0, false).unwrap();
        assert_close(cert.lower.unwrap(), 1.6487212707001281, 5e-15);
        assert_close(cert.upper.unwrap(), 1.8591409142295226, 5e-15);
        assert_close(cert.reference_value.unwrap(), std::f64::consts::E - 1.0, 1e-12);
        assert!(cert.hypotheses_hold());
        assert!(cert.containment_margin().unwrap() > 0.0);

        let origin = luke_bounds(&pv(&[1.0]), &pv(&[2.0]), 0.0, false).unwrap();
        assert_eq!(origin.lower.unwrap(), 1.0);
        assert_eq!(origin.upper.unwrap(), 1.0);
    }

    #[test]
    fn luke_refined_worked() {
        let plain = luke_bounds(&pv(&[1.0]), &pv(&[2.0]), 1.0, false).unwrap();
        let cert = luke_bounds(&pv(&[1.0]), &pv(&[2.0]), 1.0, true).unwrap();
        assert_close(cert.lower.unwrap(), 1.7108005307910069, 5e-15);
        assert_close(cert.upper.unwrap(), 1.7394272761530151, 5e-15);
        let reference = std::f64::consts::E - 1.0;
        assert!(cert.lower.unwrap() <= reference && reference <= cert.upper.unwrap());
        // second-order pair is strictly tighter
        assert!(cert.lower.unwrap() > plain.lower.unwrap());
        assert!(cert.upper.unwrap() < plain.upper.unwrap());

        let origin = luke_bounds(&pv(&[1.0]), &pv(&[2.0]), 0.0, true).unwrap();
        assert!((origin.lower.unwrap() - 1.0).abs() < 1e-15);
        assert!((origin.upper.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn luke_input_validation() {
        assert!(matches!(
            luke_bounds(&pv(&[1.0]), &pv(&[2.0]), -0.5, false),
            Err(Error::DomainError(_))
        ));
        assert!(matches!(
            luke_bounds(&pv(&[1.0, 2.0]), &pv(&[2.0]), 1.0, false),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn luke_advisory_when_chain_fails() {
        // b < a reverses the chain; values still come back, flagged
        let cert = luke_bounds(&pv(&[2.0]), &pv(&[1.0]), 1.0, false).unwrap();
        assert!(!cert.hypotheses_hold());
        assert!(cert.lower.is_some() && cert.upper.is_some());
        let chain = &cert.hypotheses[0];
        assert_eq!(chain.name, SYM_CHAIN);
        assert!(!chain.holds && chain.margin < 0.0);
    }

    #[test]
    fn stieltjes_worked() {
        let a = pv(&[1.0]);
        let b = pv(&[2.0]);
        let plain = stieltjes_bounds(1.0, &a, &b, 0.5, false, ArgSign::Positive).unwrap();
        assert_close(plain.lower.unwrap(), 4.0 / 3.0, 5e-15);
        assert_close(plain.upper.unwrap(), 1.5, 5e-15);
        let two_ln_2 = 2.0 * std::f64::consts::LN_2;
        assert_close(plain.reference_value.unwrap(), two_ln_2, 1e-10);
        assert!(plain.hypotheses_hold());
        assert!(plain.containment_margin().unwrap() > 0.0);

        let refined = stieltjes_bounds(1.0, &a, &b, 0.5, true, ArgSign::Positive).unwrap();
        assert_close(refined.lower.unwrap(), 1.375, 5e-15);
        assert_close(refined.upper.unwrap(), 17.0 / 12.0, 5e-15);
        assert!(refined.lower.unwrap() <= two_ln_2 && two_ln_2 <= refined.upper.unwrap());
        assert!(refined.lower.unwrap() > plain.lower.unwrap());
        assert!(refined.upper.unwrap() < plain.upper.unwrap());

        let neg = stieltjes_bounds(1.0, &a, &b, 1.0, false, ArgSign::Negative).unwrap();
        assert_close(neg.lower.unwrap(), 2.0 / 3.0, 5e-15);
        assert_close(neg.upper.unwrap(), 0.75, 5e-15);
        // reference continues through the integral form at the disk edge
        assert_close(neg.reference_value.unwrap(), std::f64::consts::LN_2, 1e-9);
        assert!(neg.containment_margin().unwrap() > 0.0);

        let neg_half = stieltjes_bounds(1.0, &a, &b, 0.5, false, ArgSign::Negative).unwrap();
        assert_close(neg_half.lower.unwrap(), 0.8, 5e-15);
        assert_close(neg_half.upper.unwrap(), 5.0 / 6.0, 5e-15);
        assert_close(neg_half.reference_value.unwrap(), 0.81093021621632876, 1e-10);
    }

    #[test]
    fn stieltjes_input_validation() {
        let a = pv(&[1.0]);
        let b = pv(&[2.0]);
        assert!(matches!(
            stieltjes_bounds(1.0, &a, &b, 1.0, false, ArgSign::Positive),
            Err(Error::DomainError(_))
        ));
        assert!(matches!(
            stieltjes_bounds(0.0, &a, &b, 0.5, false, ArgSign::Positive),
            Err(Error::DomainError(_))
        ));
        assert!(matches!(
            stieltjes_bounds(1.0, &a, &b, 0.5, true, ArgSign::Negative),
            Err(Error::DomainError(_))
        ));
        assert!(matches!(
            stieltjes_bounds(1.0, &a, &b, -0.5, false, ArgSign::Negative),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn jensen_worked() {
        let a = pv(&[1.0]);
        let b = pv(&[2.0]);
        let cert = jensen_bounds(&a, &b, 1.0).unwrap();
        assert_close(cert.lower.unwrap(), 0.60653065971263342, 5e-15);
        assert_close(cert.upper.unwrap(), 0.68393972058572116, 5e-15);
        assert_close(cert.reference_value.unwrap(), 0.63212055882855768, 1e-12);
        assert!(cert.hypotheses_hold());
        assert!(cert.containment_margin().unwrap() > 0.0);

        let origin = jensen_bounds(&a, &b, 0.0).unwrap();
        assert_eq!(origin.lower.unwrap(), 1.0);
        assert_eq!(origin.upper.unwrap(), 1.0);

        // negative x lands on the positive-argument exponential pair
        let neg = jensen_bounds(&a, &b, -1.0).unwrap();
        let luke = luke_bounds(&a, &b, 1.0, false).unwrap();
        assert_close(neg.lower.unwrap(), luke.lower.unwrap(), 1e-15);
        assert_close(neg.upper.unwrap(), luke.upper.unwrap(), 1e-15);
    }

    #[test]
    fn jensen_hypothesis_fails_for_reversed_pair() {
        // v(t) = t^2 - t^1.5 < 0 on (0,1)
        let cert = jensen_bounds(&pv(&[2.0]), &pv(&[1.5]), 1.0).unwrap();
        assert!(!cert.hypotheses_hold());
        assert!(cert.hypotheses[0].margin < 0.0);
        assert!(cert.lower.is_some() && cert.upper.is_some());
    }

    #[test]
    fn p_lt_q_worked() {
        let a = pv(&[1.0]);
        let b = pv(&[1.0, 2.0]);
        let (u1, u2) = p_lt_q_envelopes(&a, &b, 1.0).unwrap();
        assert_close(u1, 1.8591409142295226, 5e-15);
        assert_close(u2, 1.6487212707001281, 5e-15);

        let cert = upper_bounds_p_lt_q(&a, &b, 1.0).unwrap();
        assert!(cert.hypotheses_hold());
        assert!(cert.lower.is_none());
        assert_close(cert.upper.unwrap(), u2, 1e-15);
        let reference = cert.reference_value.unwrap();
        assert_close(reference, 1.5906368546373291, 1e-12);
        assert!(reference <= u1 && reference <= u2);

        let origin = upper_bounds_p_lt_q(&a, &b, 0.0).unwrap();
        assert_eq!(origin.upper.unwrap(), 1.0);

        assert!(matches!(
            upper_bounds_p_lt_q(&pv(&[1.0, 2.0]), &pv(&[3.0]), 1.0),
            Err(Error::ShapeError { .. })
        ));
    }

    #[test]
    fn bessel_worked() {
        let a = pv(&[1.0]);
        let b = pv(&[1.0, 2.0]);
        let (c, d) = bessel_rates(&a, &b).unwrap();
        assert_eq!((c, d), (2.0, 2.0));

        let cert = bessel_bounds(&a, &b, 1.0).unwrap();
        assert_close(cert.lower.unwrap(), 1.5714115813666065, 5e-15);
        assert_close(cert.upper.unwrap(), 1.5913508737791439, 5e-15);
        assert_close(cert.reference_value.unwrap(), 1.5906368546373291, 1e-12);
        assert!(cert.hypotheses_hold());
        assert!(cert.containment_margin().unwrap() > 0.0);

        let origin = bessel_bounds(&a, &b, 0.0).unwrap();
        assert_eq!(origin.lower.unwrap(), 1.0);
        assert_eq!(origin.upper.unwrap(), 1.0);

        // d = 0 gates the upper side off, the lower survives
        let gated = bessel_bounds(&pv(&[2.0]), &pv(&[1.0, 1.0]), 1.0).unwrap();
        let (c2, d2) = bessel_rates(&pv(&[2.0]), &pv(&[1.0, 1.0])).unwrap();
        assert_eq!((c2, d2), (0.5, 0.0));
        assert!(gated.lower.is_some());
        assert!(gated.upper.is_none());
        assert!(!gated.hypotheses_hold());
    }

    #[test]
    fn f01_worked() {
        let cert = f01_bounds(2.0, 1.0).unwrap();
        assert_close(cert.lower.unwrap(), 1.5714115813666065, 5e-15);
        assert_close(cert.upper.unwrap(), 1.5913508737791439, 5e-15);

        let origin = f01_bounds(2.0, 0.0).unwrap();
        assert_eq!(origin.lower.unwrap(), 1.0);
        assert_eq!(origin.upper.unwrap(), 1.0);

        // 0F1(-;3/2;z^2/4) = sinh(z)/z at z = 1
        let sinh1 = 1.0f64.sinh();
        let cert = f01_bounds(1.5, 0.25).unwrap();
        assert_close(cert.lower.unwrap(), 1.1718096283392558, 5e-15);
        assert_close(cert.upper.unwrap(), 1.1752412995132134, 5e-15);
        assert!(cert.lower.unwrap() <= sinh1 && sinh1 <= cert.upper.unwrap());
        assert_close(cert.reference_value.unwrap(), sinh1, 1e-12);

        assert!(matches!(f01_bounds(0.0, 1.0), Err(Error::DomainError(_))));

        // the Bessel-type envelope with no upper parameters is the sandwich
        let via_rates = bessel_bounds(&ParamVec::empty(), &pv(&[1.5]), 0.25).unwrap();
        assert_eq!(via_rates.lower, cert.lower);
        assert_eq!(via_rates.upper, cert.upper);
    }

    /// Draws q pairs with b_i = a_i + gap_i >= a_i; pairwise domination
    /// implies the ratio chain, domination, and kernel nonnegativity, so
    /// every certificate below must report its hypotheses as holding.
    fn random_dominated_pair(state: &mut u64, q: usize) -> (ParamVec, ParamVec) {
        let mut a = Vec::with_capacity(q);
        let mut b = Vec::with_capacity(q);
        for _ in 0..q {
            let ai = 0.2 + 7.8 * lcg(state);
            let gap = 4.0 * lcg(state);
            a.push(ai);
            b.push(ai + gap);
        }
        (pv(&a), pv(&b))
    }

    #[test]
    fn sandwich_property_random_specs() {
        let mut state = 0x9e3779b97f4a7c15u64;
        for case in 0..60 {
            let q = 1 + case % 3;
            let (a, b) = random_dominated_pair(&mut state, q);
            let sigma = 0.3 + 2.7 * lcg(&mut state);

            for i in 0..16 {
                let x = 6.0 * i as f64 / 15.0;
                for refined in [false, true] {
                    let cert = luke_bounds(&a, &b, x, refined).unwrap();
                    assert!(cert.hypotheses_hold(), "case {case} luke hypotheses");
                    assert!(
                        cert.containment_margin().unwrap() >= -1e-9,
                        "case {case} luke refined={refined} x={x} margin {:?}",
                        cert.containment_margin()
                    );
                }

                let xj = -3.0 + 7.0 * i as f64 / 15.0;
                let cert = jensen_bounds(&a, &b, xj).unwrap();
                assert!(cert.hypotheses_hold(), "case {case} jensen hypotheses");
                assert!(
                    cert.containment_margin().unwrap() >= -1e-9,
                    "case {case} jensen x={xj}"
                );

                let xs = 0.9 * i as f64 / 15.0;
                for refined in [false, true] {
                    let cert =
                        stieltjes_bounds(sigma, &a, &b, xs, refined, ArgSign::Positive).unwrap();
                    assert!(
                        cert.containment_margin().unwrap() >= -1e-9,
                        "case {case} stieltjes positive refined={refined} x={xs}"
                    );
                }
                let cert = stieltjes_bounds(sigma, &a, &b, xs, false, ArgSign::Negative).unwrap();
                assert!(
                    cert.containment_margin().unwrap() >= -1e-9,
                    "case {case} stieltjes negative x={xs}"
                );
            }
        }
    }

    #[test]
    fn bessel_and_p_lt_q_property() {
        let mut state = 0x2545f4914f6cdd1du64;
        for case in 0..40 {
            let q = 2 + case % 3;
            let mut av = Vec::new();
            let mut bv = Vec::new();
            for _ in 0..q - 1 {
                av.push(0.2 + 7.8 * lcg(&mut state));
            }
            for _ in 0..q {
                bv.push(0.2 + 7.8 * lcg(&mut state));
            }
            let (a, b) = (pv(&av), pv(&bv));

            for i in 0..16 {
                let x = 10.0 * i as f64 / 15.0;
                let cert = bessel_bounds(&a, &b, x).unwrap();
                let reference = cert.reference_value.unwrap();
                assert!(
                    reference >= cert.lower.unwrap() - 1e-9,
                    "case {case} bessel lower x={x}"
                );
                if let Some(u) = cert.upper {
                    assert!(reference <= u + 1e-9, "case {case} bessel upper x={x}");
                }

                let gated = upper_bounds_p_lt_q(&a, &b, x).unwrap();
                let (u1, u2) = p_lt_q_envelopes(&a, &b, x).unwrap();
                if gated.hypotheses[0].holds {
                    assert!(reference <= u1 + 1e-9, "case {case} envelope 1 x={x}");
                }
                if gated.hypotheses[1].holds {
                    assert!(reference <= u2 + 1e-9, "case {case} envelope 2 x={x}");
                }
            }
        }
    }

    /// The four coefficient facts the envelope proofs rest on, checked in
    /// log space where hundred-term products stay representable.
    #[test]
    fn coefficient_lemmas_log_space() {
        let mut state = 0x6a09e667f3bcc909u64;
        const SLACK: f64 = 1e-9;
        for case in 0..50 {
            let q = 1 + case % 3;
            let (a, b) = random_dominated_pair(&mut state, q);
            let (ln_f1, _) = coeff_f_log(&a, &b, 1).unwrap();
            let mut prev = 0.0;
            for n in 1..=100u32 {
                let (ln_fn, sign) = coeff_f_log(&a, &b, n).unwrap();
                assert_eq!(sign, 1.0);
                // domination: f_{n+1} <= f_n
                assert!(
                    ln_fn <= prev + SLACK,
                    "case {case} nonincreasing failed at n={n}"
                );
                // chain: f_1^n <= f_n
                assert!(
                    n as f64 * ln_f1 <= ln_fn + SLACK,
                    "case {case} geometric floor failed at n={n}"
                );
                prev = ln_fn;
            }
        }
        for case in 0..50 {
            let q = 2 + case % 3;
            let mut av = Vec::new();
            let mut bv = Vec::new();
            for _ in 0..q - 1 {
                av.push(0.2 + 7.8 * lcg(&mut state));
            }
            for _ in 0..q {
                bv.push(0.2 + 7.8 * lcg(&mut state));
            }
            let (a, b) = (pv(&av), pv(&bv));
            let (c, d) = bessel_rates(&a, &b).unwrap();
            for n in 1..=100u32 {
                let (ln_fn, _) = coeff_f_log(&a, &b, n).unwrap();
                let (ln_cn, _) = rising_factorial_log(c, n);
                // f_n >= 1/(c)_n
                assert!(
                    ln_fn + ln_cn >= -SLACK,
                    "case {case} lower rate failed at n={n}"
                );
                if d > 0.0 {
                    let (ln_dn, _) = rising_factorial_log(d, n);
                    // f_n (d)_n <= 1
                    assert!(
                        ln_fn + ln_dn <= SLACK,
                        "case {case} upper rate failed at n={n}"
                    );
                }
            }
        }
    }
}
