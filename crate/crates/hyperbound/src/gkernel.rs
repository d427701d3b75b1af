//! Meijer G^{m,0} kernel densities: the measures behind every integral
//! representation in this crate.
//!
//! A kernel is defined by its Mellin transform
//! M(s) = prod_i Gamma(bottom_i + s) / prod_l Gamma(top_l + s),
//! inverted along a vertical contour. Equal row lengths give a density on
//! (0,1) that vanishes identically for t >= 1; an excess of bottom entries
//! gives a density on (0,inf) with stretched-exponential decay.
//!
//! Evaluation strategies:
//! * residue expansion over the left poles s = -(bottom_i + k). Bottom
//!   entries that differ by integers merge poles into higher-order ones;
//!   these confluent cases are handled exactly by expanding every gamma
//!   factor as a truncated power series (jet) around the pole, so kernels
//!   like -t ln t come out to machine precision rather than through an
//!   epsilon-perturbation.
//! * an endpoint fit near t = 1 for the balanced kind: the kernel obeys
//!   G ~ (1-t)^{psi-1} K(1-t) with K analytic, so K is interpolated from
//!   residue evaluations just outside the cancellation-dominated strip.
//! * Mellin-Barnes contour quadrature: for the half-line kind along a
//!   vertical line through the integrand's saddle (exponential decay in
//!   Im s), which takes over where the residue series loses digits; for the
//!   balanced kind along Re s = -min(bottom)+1, offered when psi > 1 since
//!   the integrand only decays like |Im s|^{-psi}.
//! * closed forms for the beta-density case (one gamma per row) and the
//!   single-gamma half-line case t^a e^{-t}.

use crate::error::{Error, Result};
use crate::gamma::{ln_gamma, ln_gamma_complex, ln_gamma_sign};
use crate::jet::{gamma_jet, gamma_one_plus_jet, Jet};
use crate::params::{unit_interval_grid, v_nonneg_check, ParamVec};
use crate::quad::{integrate_01, QuadratureConfig};
use crate::report::{MonotoneReport, Status};
use crate::series::EvalResult;
use num_complex::Complex64;
use serde::Serialize;
use std::sync::OnceLock;

pub use crate::gamma::ln_gamma_complex as log_gamma_complex;

/// Two entries are treated as integer-congruent when their difference is
/// within this distance of an integer. Exactly-congruent rows (the common
/// case: integer or equal parameters) are then computed exactly; snapping a
/// nearly-congruent pair perturbs the kernel by at most the snap distance.
const CONGRUENCE_TOL: f64 = 1e-9;

/// Residue summation is abandoned for the half-line kernel once the
/// cancellation factor e^{2 mu t^{1/mu}} would eat more than ~8 digits.
const SADDLE_EXPONENT_SWITCH: f64 = 9.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// Equal row lengths; density supported on (0,1).
    Balanced,
    /// More bottom than top entries; density supported on (0,inf).
    Laplace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Auto,
    Residue,
    MellinBarnes,
    ClosedForm,
}

#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub bottom: ParamVec,
    pub top: ParamVec,
    pub kind: KernelKind,
}

impl KernelSpec {
    /// Builds a kernel, inferring the kind from the row lengths.
    pub fn new(bottom: ParamVec, top: ParamVec) -> Result<Self> {
        if bottom.is_empty() {
            return Err(Error::ShapeError {
                p: bottom.len(),
                q: top.len(),
            });
        }
        let kind = if bottom.len() == top.len() {
            KernelKind::Balanced
        } else if bottom.len() > top.len() {
            KernelKind::Laplace
        } else {
            // fewer numerator than denominator gammas: no density exists
            return Err(Error::ShapeError {
                p: bottom.len(),
                q: top.len(),
            });
        };
        Ok(KernelSpec { bottom, top, kind })
    }

    pub fn balanced(bottom: ParamVec, top: ParamVec) -> Result<Self> {
        let s = Self::new(bottom, top)?;
        if s.kind != KernelKind::Balanced {
            return Err(Error::ShapeError {
                p: s.bottom.len(),
                q: s.top.len(),
            });
        }
        Ok(s)
    }

    pub fn laplace(bottom: ParamVec, top: ParamVec) -> Result<Self> {
        let s = Self::new(bottom, top)?;
        if s.kind != KernelKind::Laplace {
            return Err(Error::ShapeError {
                p: s.bottom.len(),
                q: s.top.len(),
            });
        }
        Ok(s)
    }

    /// psi = sum(top) - sum(bottom); controls the (1-t)^{psi-1} endpoint law.
    pub fn psi(&self) -> f64 {
        self.top.sum() - self.bottom.sum()
    }

    /// Gamma-count excess; 0 for balanced kernels.
    pub fn mu(&self) -> usize {
        self.bottom.len() - self.top.len()
    }

    pub fn min_bottom(&self) -> f64 {
        self.bottom.min().unwrap()
    }
}

/// Vertical Mellin-Barnes contour: the line Re s = re_offset, truncated at
/// |Im s| = height, resolved by at least `nodes` points.
#[derive(Clone, Copy, Debug)]
pub struct ContourSpec {
    pub re_offset: f64,
    pub height: f64,
    pub nodes: usize,
}

impl ContourSpec {
    pub fn new(re_offset: f64, height: f64, nodes: usize, spec: &KernelSpec) -> Result<Self> {
        if re_offset <= -spec.min_bottom() {
            return Err(Error::DomainError(format!(
                "contour abscissa {re_offset} must lie right of -min(bottom) = {}",
                -spec.min_bottom()
            )));
        }
        if nodes < 32 {
            return Err(Error::DomainError(format!(
                "contour needs at least 32 nodes, got {nodes}"
            )));
        }
        if !(height > 0.0) {
            return Err(Error::DomainError(format!(
                "contour height must be positive, got {height}"
            )));
        }
        Ok(ContourSpec {
            re_offset,
            height,
            nodes,
        })
    }

    /// Abscissa one unit right of the last pole; height picked adaptively
    /// at evaluation time (0 = auto).
    pub fn default_for(spec: &KernelSpec) -> Self {
        ContourSpec {
            re_offset: -spec.min_bottom() + 1.0,
            height: 0.0,
            nodes: 64,
        }
    }
}

/// t -> 0 and t -> inf behavior.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KernelAsymptotics {
    /// G(t) = O(t^a ln^{m-1} t) with a = zero_exponent.
    pub zero_exponent: f64,
    /// m - 1 in the law above.
    pub zero_log_power: u32,
    /// (mu, alpha) of the large-t law
    /// G ~ (2 pi)^{(mu-1)/2} mu^{-1/2} t^{(1-alpha)/mu} e^{-mu t^{1/mu}},
    /// present for the half-line kind only.
    pub inf_params: Option<(f64, f64)>,
}

// ---------------------------------------------------------------------------
// Residue engine
// ---------------------------------------------------------------------------

/// One pole's contribution: t^{base+k} e^{ln_scale} sum_i coeffs[i] L^i with
/// L = ln(1/t). Empty coeffs mean the pole is cancelled.
struct Term {
    ln_scale: f64,
    coeffs: Vec<f64>,
}

struct ClassTable {
    base: f64,
    /// Index after the last structural change (pole orders settle here).
    settle_k: usize,
    terms: Vec<Term>,
}

enum FactorKind {
    /// Bottom entry past its pole threshold: (-1)^{k-n} / prod_{j=1}^{k-n} (j-u).
    BotSing { n: i64 },
    /// Bottom entry before it: prod_{j=1}^{n-k-1} (j+u).
    BotReg { n: i64 },
    /// Bottom entry of another congruence class: Gamma(delta - k + u).
    BotOther { delta: f64 },
    /// Congruent top past threshold: (-1)^{k-c} prod_{j=1}^{k-c} (j-u).
    TopSing { c: i64 },
    /// Congruent top before it: 1 / prod_{j=1}^{c-k-1} (j+u).
    TopReg { c: i64 },
    /// Non-congruent top: 1 / Gamma(delta - k + u).
    TopOther { delta: f64 },
}

struct Factor {
    kind: FactorKind,
    jet: Jet,
    ln_scale: f64,
}

impl Factor {
    fn normalize(&mut self) {
        let m = self.jet.c.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if m > 0.0 && m.is_finite() {
            self.jet.scale(1.0 / m);
            self.ln_scale += m.ln();
        }
    }
}

struct ClassPlan {
    base: f64,
    bot_offsets: Vec<i64>, // sorted ascending, first is 0
    top_offsets: Vec<i64>, // sorted ascending (congruent tops only)
    other_bottoms: Vec<f64>,
    other_tops: Vec<f64>,
}

fn integer_offset(x: f64) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() < CONGRUENCE_TOL && r.abs() < 1e15 {
        Some(r as i64)
    } else {
        None
    }
}

/// Groups bottom entries into integer-congruence classes and attaches each
/// top entry to its class when one exists.
fn plan_classes(spec: &KernelSpec) -> Vec<ClassPlan> {
    let mut sorted = spec.bottom.sorted();
    sorted.reverse(); // descending; pop() yields ascending
    let mut plans: Vec<ClassPlan> = Vec::new();
    while let Some(v) = sorted.pop() {
        match plans
            .iter_mut()
            .find(|p| integer_offset(v - p.base).is_some())
        {
            Some(p) => p.bot_offsets.push(integer_offset(v - p.base).unwrap()),
            None => plans.push(ClassPlan {
                base: v,
                bot_offsets: vec![0],
                top_offsets: Vec::new(),
                other_bottoms: Vec::new(),
                other_tops: Vec::new(),
            }),
        }
    }
    for p in 0..plans.len() {
        let base = plans[p].base;
        for &tp in spec.top.iter() {
            match integer_offset(tp - base) {
                Some(c) => plans[p].top_offsets.push(c),
                None => plans[p].other_tops.push(tp),
            }
        }
        plans[p].top_offsets.sort_unstable();
        let others: Vec<f64> = plans
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != p)
            .flat_map(|(_, pl)| pl.bot_offsets.iter().map(|&off| pl.base + off as f64))
            .collect();
        plans[p].other_bottoms = others;
    }
    plans
}

/// Hard ceiling on residue terms per class.
const TERM_CAP: usize = 32_768;

fn build_class_table(plan: &ClassPlan, ln_t_ref: f64) -> Result<ClassTable> {
    let len = plan.bot_offsets.len();
    let g = plan.bot_offsets.len() as i64 - plan.top_offsets.len() as i64;
    let gamma1 = gamma_one_plus_jet(len);
    let mut gpow = Jet::constant(1.0, len);
    for _ in 0..g.abs() {
        gpow = gpow.mul(&gamma1);
    }
    if g < 0 {
        gpow = gpow.recip();
    }
    let mut gpow_ln = 0.0;
    {
        let m = gpow.c.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if m > 0.0 && m.is_finite() {
            gpow.scale(1.0 / m);
            gpow_ln = m.ln();
        }
    }

    let mut factors: Vec<Factor> = Vec::new();
    for &n in &plan.bot_offsets {
        if n == 0 {
            factors.push(Factor {
                kind: FactorKind::BotSing { n },
                jet: Jet::constant(1.0, len),
                ln_scale: 0.0,
            });
        } else {
            let mut j = Jet::constant(1.0, len);
            for i in 1..n {
                j.mul_linear(i as f64, 1.0);
            }
            factors.push(Factor {
                kind: FactorKind::BotReg { n },
                jet: j,
                ln_scale: 0.0,
            });
        }
    }
    for &c in &plan.top_offsets {
        if c <= 0 {
            let mut j = Jet::constant(1.0, len);
            for i in 1..=(-c) {
                j.mul_linear(i as f64, -1.0);
            }
            if c % 2 != 0 {
                j.scale(-1.0);
            }
            factors.push(Factor {
                kind: FactorKind::TopSing { c },
                jet: j,
                ln_scale: 0.0,
            });
        } else {
            let mut j = Jet::constant(1.0, len);
            for i in 1..c {
                j.mul_linear(i as f64, 1.0);
            }
            factors.push(Factor {
                kind: FactorKind::TopReg { c },
                jet: j.recip(),
                ln_scale: 0.0,
            });
        }
    }
    for &b in &plan.other_bottoms {
        factors.push(Factor {
            kind: FactorKind::BotOther { delta: b - plan.base },
            jet: gamma_jet(b - plan.base, len)?,
            ln_scale: 0.0,
        });
    }
    for &tp in &plan.other_tops {
        factors.push(Factor {
            kind: FactorKind::TopOther { delta: tp - plan.base },
            jet: gamma_jet(tp - plan.base, len)?.recip(),
            ln_scale: 0.0,
        });
    }
    for f in &mut factors {
        f.normalize();
    }

    let max_bot = *plan.bot_offsets.last().unwrap();
    let max_top = plan.top_offsets.last().copied().unwrap_or(0).max(0);
    let settle_k = (max_bot.max(max_top) as usize) + 1;

    let mut inv_fact = vec![1.0f64; len];
    for i in 1..len {
        inv_fact[i] = inv_fact[i - 1] / i as f64;
    }

    let mut terms: Vec<Term> = Vec::with_capacity(256);
    let mut peak = f64::NEG_INFINITY;
    let mut quiet = 0usize;
    for k in 0..TERM_CAP {
        let ki = k as i64;
        let m_k = plan.bot_offsets.iter().filter(|&&n| n <= ki).count();
        let z_k = plan.top_offsets.iter().filter(|&&c| c <= ki).count();
        let d = m_k as i64 - z_k as i64;
        if d >= 1 {
            let d = d as usize;
            let mut h = gpow.clone();
            let mut ln_scale = gpow_ln;
            for f in &factors {
                h = h.mul(&f.jet);
                ln_scale += f.ln_scale;
            }
            // residue = coeff of u^{d-1} in H(u) e^{Lu}: sum_i H[d-1-i] L^i / i!
            let mut coeffs: Vec<f64> = (0..d).map(|i| h.c[d - 1 - i] * inv_fact[i]).collect();
            let m = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if m > 0.0 && m.is_finite() {
                for c in &mut coeffs {
                    *c /= m;
                }
                terms.push(Term {
                    ln_scale: ln_scale + m.ln(),
                    coeffs,
                });
            } else {
                terms.push(Term {
                    ln_scale: 0.0,
                    coeffs: Vec::new(),
                });
            }
        } else {
            terms.push(Term {
                ln_scale: 0.0,
                coeffs: Vec::new(),
            });
        }

        // stop once the term magnitude at the largest t this table serves
        // has fallen 55 e-folds below its peak
        if k >= settle_k {
            if let Some(t) = terms.last() {
                if t.coeffs.is_empty() {
                    // constant structure past settle_k: all-cancelled forever
                    break;
                }
                let mag = t.ln_scale + (plan.base + k as f64) * ln_t_ref;
                peak = peak.max(mag);
                if mag < peak - 55.0 {
                    quiet += 1;
                    if quiet >= 8 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
            }
        }

        // advance factor states k -> k+1
        let k1 = ki + 1;
        for f in &mut factors {
            match f.kind {
                FactorKind::BotSing { n } => {
                    f.jet.div_linear((k1 - n) as f64, -1.0);
                    f.jet.scale(-1.0);
                }
                FactorKind::BotReg { n } => {
                    if k1 == n {
                        f.kind = FactorKind::BotSing { n };
                        f.jet = Jet::constant(1.0, len);
                        f.ln_scale = 0.0;
                    } else {
                        f.jet.div_linear((n - k1) as f64, 1.0);
                    }
                }
                FactorKind::BotOther { delta } => {
                    f.jet.div_linear(delta - k1 as f64, 1.0);
                }
                FactorKind::TopSing { c } => {
                    f.jet.mul_linear((k1 - c) as f64, -1.0);
                    f.jet.scale(-1.0);
                }
                FactorKind::TopReg { c } => {
                    if k1 == c {
                        f.kind = FactorKind::TopSing { c };
                        f.jet = Jet::constant(1.0, len);
                        f.ln_scale = 0.0;
                    } else {
                        f.jet.mul_linear((c - k1) as f64, 1.0);
                    }
                }
                FactorKind::TopOther { delta } => {
                    f.jet.mul_linear(delta - k1 as f64, 1.0);
                }
            }
            f.normalize();
        }
    }

    Ok(ClassTable {
        base: plan.base,
        settle_k,
        terms,
    })
}

/// Trapezoid rule on [0, tau_max] with step halving, reusing previous sums.
/// Returns (integral, last halving difference, evaluation count). Suited to
/// even analytic integrands on a vertical Mellin contour, where the error
/// dies like e^{-2 pi d / h} with d the width of the analyticity strip.
fn halving_trapezoid<F: Fn(f64) -> f64>(
    f: &F,
    tau_max: f64,
    h0: f64,
    rel: f64,
) -> (f64, f64, usize) {
    let mut evals = 1usize;
    let mut h = h0;
    let mut sum = 0.5 * f(0.0);
    let mut j = 1usize;
    while (j as f64) * h <= tau_max {
        sum += f(j as f64 * h);
        evals += 1;
        j += 1;
    }
    let mut value = sum * h;
    let mut diff = f64::INFINITY;
    let mut prev_diff = f64::INFINITY;
    for level in 0..12 {
        let h2 = 0.5 * h;
        let mut j = 1usize;
        while (j as f64) * h2 <= tau_max {
            sum += f(j as f64 * h2);
            evals += 1;
            j += 2;
        }
        h = h2;
        let next = sum * h;
        diff = (next - value).abs();
        value = next;
        if diff <= rel * value.abs().max(1e-300) {
            break;
        }
        // geometric gain has stalled: further halving only spends work on
        // the roundoff floor
        if level >= 2 && diff >= 0.25 * prev_diff {
            break;
        }
        prev_diff = diff;
        if evals > 2_000_000 {
            break;
        }
    }
    (value, diff, evals)
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

const STRIP_NODES: usize = 6;

struct StripFit {
    /// Exponent of the leading endpoint law: psi - 1, except 0 when psi = 0
    /// (the delta at t = 1 absorbs the leading term and the function part
    /// tends to a constant).
    law: f64,
    /// Relative error coefficient, measured against the residue series at
    /// the validation point during construction.
    err_coeff: f64,
    nodes: [f64; STRIP_NODES],
    kvals: [f64; STRIP_NODES],
}

impl StripFit {
    /// Lagrange value of K(w) = G(1-w) w^-law at w inside (0, nodes[0]);
    /// the endpoint expansion of G is a power series in -ln t = w + w^2/2
    /// + ..., so K extrapolates to 0 with plain quintic accuracy, and the
    /// elementary closed-form kernels are polynomial in w exactly.
    fn eval(&self, w: f64) -> f64 {
        let mut k = 0.0;
        for i in 0..STRIP_NODES {
            let mut l = 1.0;
            for j in 0..STRIP_NODES {
                if j != i {
                    l *= (w - self.nodes[j]) / (self.nodes[i] - self.nodes[j]);
                }
            }
            k += l * self.kvals[i];
        }
        k
    }
}

/// Residue tables and the endpoint fit, built together because both are
/// keyed to the strip width: the tables extend far enough to be accurate at
/// the fit nodes, and shrinking the strip deepens the tables.
struct Engine {
    /// Largest 1-t for which the endpoint fit replaces the residue series.
    w0: f64,
    tables: Vec<ClassTable>,
    strip: Option<StripFit>,
}

pub struct KernelEvaluator {
    spec: KernelSpec,
    /// Residue -> saddle-contour handover point for the half-line kind.
    t_switch: f64,
    engine: OnceLock<Result<Engine>>,
}

fn w0_for(psi: f64) -> f64 {
    if psi <= 1.5 {
        return 0.02;
    }
    // keep the residue cancellation factor Gamma(psi) w^{1-psi} under ~1e7;
    // the upper clamp keeps all six fit nodes below w = 0.72
    let w = ((ln_gamma(psi) - 7.0 * std::f64::consts::LN_10) / (psi - 1.0)).exp();
    w.clamp(0.02, 0.12)
}

/// Strip accuracy target; the fit width shrinks until the validation error
/// passes this or the residue tables hit their size cap.
const STRIP_TARGET: f64 = 5e-8;
/// Smallest strip width the table cap supports (terms scale like 55/w0).
const STRIP_MIN_W0: f64 = 2.5e-3;

/// Residue-series value at t from prebuilt class tables, with `tc` the exact
/// complement 1 - t (ignored for the half-line kind).
fn residue_sum(kind: KernelKind, tables: &[ClassTable], t: f64, tc: f64) -> EvalResult {
    let lt = if kind == KernelKind::Balanced && tc < 0.5 {
        (-tc).ln_1p()
    } else {
        t.ln()
    };
    let lam = -lt;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64; // Neumaier compensation
    let mut err_acc = 0.0f64;
    let mut terms_used = 0usize;
    let mut tail = 0.0f64;
    for table in tables {
        let mut quiet = 0usize;
        let mut local_peak = 0.0f64;
        let mut last_mag = 0.0f64;
        let mut prev_mag = 0.0f64;
        let mut terminated = false;
        for (k, term) in table.terms.iter().enumerate() {
            if term.coeffs.is_empty() {
                if k >= table.settle_k {
                    // structure settled: every later pole cancels, so this
                    // class is a finite sum with no tail at all
                    terminated = true;
                    break;
                }
                continue;
            }
            let arg = term.ln_scale + (table.base + k as f64) * lt;
            let scale = arg.exp();
            let mut poly = 0.0;
            for &c in term.coeffs.iter().rev() {
                poly = poly * lam + c;
            }
            let v = scale * poly;
            terms_used += 1;
            // compensated add
            let t_new = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - t_new) + v;
            } else {
                comp += (v - t_new) + sum;
            }
            sum = t_new;
            // each term carries roundoff from its exponent (built up over
            // k normalization steps) and the polynomial evaluation
            err_acc += v.abs() * f64::EPSILON * (8.0 + arg.abs() + k as f64);
            prev_mag = last_mag;
            last_mag = v.abs();
            local_peak = local_peak.max(last_mag);
            if k >= table.settle_k {
                if last_mag <= 1e-18 * local_peak.max(sum.abs()) {
                    quiet += 1;
                    if quiet >= 6 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
            }
        }
        if !terminated {
            let ratio = if prev_mag > 0.0 {
                (last_mag / prev_mag).clamp(0.0, 0.995)
            } else {
                t.min(0.995)
            };
            let r = ratio.max(t.min(0.995));
            tail += last_mag * r / (1.0 - r);
        }
    }
    EvalResult {
        value: sum + comp,
        abs_err: tail + err_acc,
        terms_used,
    }
}

impl KernelEvaluator {
    pub fn new(spec: &KernelSpec) -> Self {
        let mu = spec.mu() as f64;
        let t_switch = if spec.kind == KernelKind::Laplace {
            (SADDLE_EXPONENT_SWITCH / mu).powf(mu)
        } else {
            f64::INFINITY
        };
        KernelEvaluator {
            spec: spec.clone(),
            t_switch,
            engine: OnceLock::new(),
        }
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    fn engine(&self) -> Result<&Engine> {
        let built = self.engine.get_or_init(|| self.build_engine());
        match built {
            Ok(e) => Ok(e),
            Err(e) => Err(e.clone()),
        }
    }

    fn build_tables(&self, w0: f64) -> Result<Vec<ClassTable>> {
        let ln_t_ref = match self.spec.kind {
            KernelKind::Balanced => (1.0f64 - w0).ln(),
            KernelKind::Laplace => self.t_switch.max(1.5).ln(),
        };
        plan_classes(&self.spec)
            .iter()
            .map(|p| build_class_table(p, ln_t_ref))
            .collect()
    }

    /// Builds the residue tables and, for the unit-interval kind, the
    /// endpoint fit. The fit is validated against the residue series at half
    /// the strip width; if the extrapolation error misses the target, the
    /// strip shrinks (deepening the tables) until it passes or the table cap
    /// is reached, and the measured error is recorded either way.
    fn build_engine(&self) -> Result<Engine> {
        if self.spec.kind == KernelKind::Laplace {
            return Ok(Engine {
                w0: 0.0,
                tables: self.build_tables(0.0)?,
                strip: None,
            });
        }
        let psi = self.spec.psi();
        let law = if psi.abs() <= 1e-12 { 0.0 } else { psi - 1.0 };
        let mut w0 = w0_for(psi);
        loop {
            let tables = self.build_tables(w0)?;
            let mut nodes = [0.0; STRIP_NODES];
            let mut kvals = [0.0; STRIP_NODES];
            for i in 0..STRIP_NODES {
                let w = (i + 1) as f64 * w0;
                let g = residue_sum(self.spec.kind, &tables, 1.0 - w, w);
                nodes[i] = w;
                kvals[i] = g.value * w.powf(-law);
            }
            let mut fit = StripFit {
                law,
                err_coeff: STRIP_TARGET,
                nodes,
                kvals,
            };
            // validate at w0/2: the tables still reach it (their horizon is
            // cut at w0, half a width further out), and the Lagrange error
            // there is about a tenth of its w -> 0 limit
            let wv = 0.5 * w0;
            let direct = residue_sum(self.spec.kind, &tables, 1.0 - wv, wv);
            let fitted = fit.eval(wv) * wv.powf(law);
            let scale = direct.value.abs().max(1e-300);
            let measured = 10.0 * ((fitted - direct.value).abs() + direct.abs_err) / scale;
            if measured <= STRIP_TARGET || w0 * 0.5 < STRIP_MIN_W0 {
                fit.err_coeff = measured.max(STRIP_TARGET);
                return Ok(Engine {
                    w0,
                    tables,
                    strip: Some(fit),
                });
            }
            w0 *= 0.5;
        }
    }

    fn eval_residue(&self, t: f64, tc: f64) -> Result<EvalResult> {
        let engine = self.engine()?;
        Ok(residue_sum(self.spec.kind, &engine.tables, t, tc))
    }

    fn eval_strip(&self, w: f64) -> Result<EvalResult> {
        let engine = self.engine()?;
        let fit = engine.strip.as_ref().expect("strip exists for this kind");
        let k = fit.eval(w);
        let value = k * w.powf(fit.law);
        Ok(EvalResult {
            value,
            abs_err: value.abs() * fit.err_coeff + 1e-300,
            terms_used: STRIP_NODES,
        })
    }

    /// Half-line kernel by saddle-line contour quadrature: vertical line
    /// through c ~ mu t^{1/mu}. Near the saddle the integrand decays like a
    /// Gaussian of width sqrt(c/mu), turning into e^{-(pi/2) mu |Im s|}
    /// further out, so the truncation point is found by sampling.
    fn eval_mb_laplace(&self, t: f64) -> Result<EvalResult> {
        let mu = self.spec.mu() as f64;
        let saddle = mu * t.powf(1.0 / mu);
        if saddle > 750.0 {
            // G ~ algebraic * e^{-mu t^{1/mu}}: below every subnormal
            return Ok(EvalResult {
                value: 0.0,
                abs_err: 1e-300,
                terms_used: 0,
            });
        }
        let c = saddle.max(-self.spec.min_bottom() + 1.0);
        let c = self.dodge_top_poles(c);
        let lt = t.ln();
        let peak = self.mellin_integrand(c, 0.0, lt).norm().max(1e-300);
        let mut tau_max = (8.0 / mu).max((8.0 * c / mu).sqrt());
        while tau_max < 1e5 && self.mellin_integrand(c, tau_max, lt).norm() > 1e-18 * peak {
            tau_max *= 1.5;
        }
        // Gaussian width on the line is sqrt(c/mu); no need to step finer
        let h0 = 0.5f64.max(0.05 * (c / mu).sqrt());
        let f = |tau: f64| self.mellin_integrand(c, tau, lt).re;
        let (raw, diff, evals) = halving_trapezoid(&f, tau_max, h0, 5e-15);
        let inv_pi = 1.0 / std::f64::consts::PI;
        let value = raw * inv_pi; // (1/2pi) * 2 * int_0^inf by symmetry
        // remaining decay is at least e^{-(pi/2) mu tau}
        let edge = self.mellin_integrand(c, tau_max, lt).norm();
        let tail = edge * 2.0 / (mu * std::f64::consts::PI);
        Ok(EvalResult {
            value,
            abs_err: diff * inv_pi + tail + 4.0 * f64::EPSILON * value.abs(),
            terms_used: evals,
        })
    }

    /// Balanced kernel by contour quadrature along Re s = contour.re_offset.
    /// The integrand decays only algebraically (|Im s|^{-psi}), so this is
    /// offered for psi > 1 and reports the truncation tail honestly.
    fn eval_mb_balanced(&self, t: f64, tc: f64, contour: &ContourSpec) -> Result<EvalResult> {
        let psi = self.spec.psi();
        if psi <= 1.0 {
            return Err(Error::ContourDivergence { psi });
        }
        if tc <= 0.0 {
            return Ok(EvalResult {
                value: 0.0,
                abs_err: 0.0,
                terms_used: 0,
            });
        }
        let lt = if tc < 0.5 { (-tc).ln_1p() } else { t.ln() };
        let c = self.dodge_top_poles(contour.re_offset);
        let peak = self.mellin_integrand(c, 0.0, lt).norm().max(1e-300);
        let mut tau_max = contour.height;
        if tau_max <= 0.0 {
            tau_max = 8.0;
            while tau_max < 5e4 {
                let e = self.mellin_integrand(c, tau_max, lt).norm();
                if e < 1e-13 * peak {
                    break;
                }
                tau_max *= 2.0;
            }
        }
        let h0 = 0.5f64.min(2.0 * tau_max / contour.nodes as f64);
        let f = |tau: f64| self.mellin_integrand(c, tau, lt).re;
        let (raw, diff, evals) = halving_trapezoid(&f, tau_max, h0, 5e-14);
        let inv_pi = 1.0 / std::f64::consts::PI;
        let value = raw * inv_pi;
        let edge = self.mellin_integrand(c, tau_max, lt).norm();
        let tail = edge * tau_max / (psi - 1.0) * inv_pi;
        Ok(EvalResult {
            value,
            abs_err: diff * inv_pi + tail + 4.0 * f64::EPSILON * value.abs(),
            terms_used: evals,
        })
    }

    /// exp( sum ln Gamma(bottom + s) - sum ln Gamma(top + s) - s ln t ) at
    /// s = c + i tau.
    fn mellin_integrand(&self, c: f64, tau: f64, lt: f64) -> Complex64 {
        let s = Complex64::new(c, tau);
        let mut acc = -s * lt;
        for &b in self.spec.bottom.iter() {
            match ln_gamma_complex(Complex64::new(b + c, tau)) {
                Ok(l) => acc += l,
                Err(_) => return Complex64::new(0.0, 0.0),
            }
        }
        for &tp in self.spec.top.iter() {
            match ln_gamma_complex(Complex64::new(tp + c, tau)) {
                Ok(l) => acc -= l,
                Err(_) => return Complex64::new(0.0, 0.0),
            }
        }
        acc.exp()
    }

    /// Shifts the abscissa slightly when a denominator gamma sits exactly on
    /// a nonpositive integer there (a zero of the integrand, but a pole of
    /// ln Gamma).
    fn dodge_top_poles(&self, c: f64) -> f64 {
        let hits = |c: f64| {
            self.spec
                .top
                .iter()
                .any(|&tp| tp + c <= 0.5 && (tp + c).fract().abs() < 1e-12)
        };
        if hits(c) {
            c + 0.25
        } else {
            c
        }
    }

    fn closed_form(&self, t: f64, tc: f64) -> Result<EvalResult> {
        match (self.spec.kind, self.spec.bottom.len(), self.spec.top.len()) {
            (KernelKind::Balanced, 1, 1) => {
                let a = self.spec.bottom[0];
                let b = self.spec.top[0];
                let d = b - a;
                if d.fract() == 0.0 && d <= 0.0 {
                    // 1/Gamma at a pole: the density degenerates to zero
                    return Ok(EvalResult {
                        value: 0.0,
                        abs_err: 0.0,
                        terms_used: 1,
                    });
                }
                let (lg, sign) = ln_gamma_sign(d)?;
                let lt = if tc < 0.5 { (-tc).ln_1p() } else { t.ln() };
                let value = sign * (a * lt + (d - 1.0) * tc.ln() - lg).exp();
                Ok(EvalResult {
                    value,
                    abs_err: 4.0 * f64::EPSILON * value.abs(),
                    terms_used: 1,
                })
            }
            (KernelKind::Laplace, 1, 0) => {
                let a = self.spec.bottom[0];
                let value = (a * t.ln() - t).exp();
                Ok(EvalResult {
                    value,
                    abs_err: 4.0 * f64::EPSILON * value.abs(),
                    terms_used: 1,
                })
            }
            _ => Err(Error::DomainError(
                "no closed form for this kernel shape".into(),
            )),
        }
    }

    /// Kernel value at t; `tc` must be the exact complement 1 - t for the
    /// balanced kind (callers inside quadrature already have it).
    pub fn eval_at(&self, t: f64, tc: f64, method: Method) -> Result<EvalResult> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::DomainError(format!(
                "kernel argument must be positive and finite, got {t}"
            )));
        }
        if self.spec.kind == KernelKind::Balanced && tc <= 0.0 {
            // support ends at 1: exact zero, no computation. The complement
            // decides, not t, which rounds to 1.0 once tc drops under an ulp.
            return Ok(EvalResult {
                value: 0.0,
                abs_err: 0.0,
                terms_used: 0,
            });
        }
        match method {
            Method::Auto => match self.spec.kind {
                KernelKind::Balanced => {
                    if tc < self.engine()?.w0 {
                        self.eval_strip(tc)
                    } else {
                        self.eval_residue(t, tc)
                    }
                }
                KernelKind::Laplace => {
                    if t <= self.t_switch {
                        self.eval_residue(t, tc)
                    } else {
                        self.eval_mb_laplace(t)
                    }
                }
            },
            Method::Residue => self.eval_residue(t, tc),
            Method::MellinBarnes => match self.spec.kind {
                KernelKind::Balanced => {
                    self.eval_mb_balanced(t, tc, &ContourSpec::default_for(&self.spec))
                }
                KernelKind::Laplace => self.eval_mb_laplace(t),
            },
            Method::ClosedForm => self.closed_form(t, tc),
        }
    }

    pub fn eval(&self, t: f64, method: Method) -> Result<EvalResult> {
        self.eval_at(t, 1.0 - t, method)
    }

    /// Balanced kernel by a caller-supplied contour.
    pub fn eval_contour(&self, t: f64, contour: &ContourSpec) -> Result<EvalResult> {
        match self.spec.kind {
            KernelKind::Balanced => self.eval_mb_balanced(t, 1.0 - t, contour),
            KernelKind::Laplace => self.eval_mb_laplace(t),
        }
    }

    pub fn asymptotics(&self) -> Result<KernelAsymptotics> {
        let tables = &self.engine()?.tables;
        let mut best: Option<(f64, u32)> = None;
        for table in tables {
            for (k, term) in table.terms.iter().enumerate() {
                if term.coeffs.is_empty() {
                    if k >= table.settle_k {
                        break;
                    }
                    continue;
                }
                let a = table.base + k as f64;
                let m = term.coeffs.len() as u32;
                match best {
                    Some((ba, _)) if ba <= a => {}
                    _ => best = Some((a, m)),
                }
                break; // only the first live pole of each class matters
            }
        }
        let (zero_exponent, order) = best.unwrap_or((f64::INFINITY, 1));
        let inf_params = if self.spec.kind == KernelKind::Laplace {
            let mu = self.spec.mu() as f64;
            let alpha = self.spec.top.sum() - self.spec.bottom.sum() + (mu + 1.0) / 2.0;
            Some((mu, alpha))
        } else {
            None
        };
        Ok(KernelAsymptotics {
            zero_exponent,
            zero_log_power: order.saturating_sub(1),
            inf_params,
        })
    }
}

// ---------------------------------------------------------------------------
// Spec-level entry points
// ---------------------------------------------------------------------------

pub fn kernel_eval(spec: &KernelSpec, t: f64, method: Method) -> Result<EvalResult> {
    KernelEvaluator::new(spec).eval(t, method)
}

pub fn kernel_asymptotics(spec: &KernelSpec) -> Result<KernelAsymptotics> {
    KernelEvaluator::new(spec).asymptotics()
}

/// Scans a balanced kernel for sign violations on a composite grid of (0,1).
/// The hypothesis field reports whether the power-sum gap
/// v(t) = sum t^bottom - sum t^top is nonnegative (the sufficient condition
/// for kernel nonnegativity); the scan itself is unconditional.
pub fn kernel_nonneg_scan(spec: &KernelSpec, points: usize) -> Result<MonotoneReport> {
    if spec.kind != KernelKind::Balanced {
        return Err(Error::DomainError(
            "nonnegativity scan applies to the (0,1)-supported kind".into(),
        ));
    }
    let ev = KernelEvaluator::new(spec);
    let tol = 1e-9;
    let mut min_margin = f64::INFINITY;
    let mut argmin = 0.0;
    let grid = unit_interval_grid(points);
    for &t in &grid {
        let tc = 1.0 - t;
        let r = ev.eval_at(t, tc, Method::Auto)?;
        if r.value < min_margin {
            min_margin = r.value;
            argmin = t;
        }
    }
    let hypothesis = match v_nonneg_check(&spec.bottom, &spec.top, 2048) {
        Ok(v) => Status::from_bool(v.nonneg),
        Err(_) => Status::NotApplicable,
    };
    Ok(MonotoneReport::new(
        "kernel_nonneg",
        min_margin,
        argmin,
        tol,
        grid.len(),
        hypothesis,
    ))
}

/// Moment check: integral of t^{n-1} G(t) over the support against the
/// gamma-ratio value of the Mellin transform at s = n.
pub fn kernel_moment(spec: &KernelSpec, n: u32) -> Result<(f64, f64)> {
    let ev = KernelEvaluator::new(spec);
    let cfg = QuadratureConfig::new(1e-10, 1e-300, 12)?;
    let nn = n as f64;
    let measured = match spec.kind {
        KernelKind::Balanced => integrate_01(
            |t, tc| match ev.eval_at(t, tc, Method::Auto) {
                Ok(r) => t.powf(nn - 1.0) * r.value,
                Err(_) => f64::NAN,
            },
            &cfg,
        )?,
        KernelKind::Laplace => crate::quad::integrate_0inf(
            |t| match ev.eval_at(t, 1.0 - t, Method::Auto) {
                Ok(r) => t.powf(nn - 1.0) * r.value,
                Err(_) => f64::NAN,
            },
            1.0,
            &cfg,
        )?,
    };
    let mut ln = 0.0;
    let mut sign = 1.0;
    for &b in spec.bottom.iter() {
        let (l, s) = ln_gamma_sign(b + nn)?;
        ln += l;
        sign *= s;
    }
    for &tp in spec.top.iter() {
        let (l, s) = ln_gamma_sign(tp + nn)?;
        ln -= l;
        sign *= s;
    }
    Ok((measured.value, sign * ln.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ParamVec {
        ParamVec::new(v.to_vec()).unwrap()
    }

    fn balanced(bottom: &[f64], top: &[f64]) -> KernelSpec {
        KernelSpec::balanced(pv(bottom), pv(top)).unwrap()
    }

    fn laplace(bottom: &[f64], top: &[f64]) -> KernelSpec {
        KernelSpec::laplace(pv(bottom), pv(top)).unwrap()
    }

    fn check_rel(got: f64, want: f64, rel: f64, what: &str) {
        assert!(
            (got - want).abs() <= rel * want.abs().max(1e-300),
            "{what}: got {got}, want {want}"
        );
    }

    #[test]
    fn shape_validation() {
        assert!(KernelSpec::new(pv(&[1.0]), pv(&[1.0, 2.0])).is_err());
        assert!(KernelSpec::new(pv(&[]), pv(&[])).is_err());
        assert!(KernelSpec::balanced(pv(&[1.0, 2.0]), pv(&[3.0])).is_err());
        let s = KernelSpec::new(pv(&[1.0, 2.0]), pv(&[3.0])).unwrap();
        assert_eq!(s.kind, KernelKind::Laplace);
        assert_eq!(s.mu(), 1);
    }

    #[test]
    fn beta_density_closed_form_and_residue() {
        let s = balanced(&[1.0], &[2.0]);
        for m in [Method::Auto, Method::Residue, Method::ClosedForm] {
            let r = kernel_eval(&s, 0.25, m).unwrap();
            check_rel(r.value, 0.25, 1e-12, "beta kernel t");
        }
        // general beta: bottom 0.7, top 2.2 -> t^0.7 (1-t)^0.5 / Gamma(1.5)
        let s = balanced(&[0.7], &[2.2]);
        let r = kernel_eval(&s, 0.5, Method::Auto).unwrap();
        check_rel(r.value, 0.49115555976330493, 1e-11, "beta kernel");
        let c = kernel_eval(&s, 0.5, Method::ClosedForm).unwrap();
        check_rel(c.value, 0.49115555976330493, 1e-13, "beta closed form");
    }

    #[test]
    fn support_vanishes_at_one_and_beyond() {
        let s = balanced(&[1.0, 3.0], &[2.0, 2.0]);
        for t in [1.0, 1.5, 7.0] {
            let r = kernel_eval(&s, t, Method::Auto).unwrap();
            assert_eq!(r.value, 0.0);
            assert_eq!(r.terms_used, 0);
        }
    }

    #[test]
    fn confluent_log_kernel_is_exact() {
        // bottom (1,1), top (2,2): G = -t ln t
        let s = balanced(&[1.0, 1.0], &[2.0, 2.0]);
        let e = (-1.0f64).exp();
        let r = kernel_eval(&s, e, Method::Auto).unwrap();
        check_rel(r.value, e, 1e-13, "-t ln t at 1/e");
        for t in [0.01, 0.25, 0.5, 0.75, 0.95] {
            let r = kernel_eval(&s, t, Method::Auto).unwrap();
            check_rel(r.value, -t * t.ln(), 1e-12, "log kernel");
            assert!(r.terms_used <= 4, "should be a finite residue sum");
        }
        // bottom (1,3), top (2,2): G = t exactly
        let s = balanced(&[1.0, 3.0], &[2.0, 2.0]);
        for t in [0.1, 0.5, 0.9] {
            let r = kernel_eval(&s, t, Method::Auto).unwrap();
            check_rel(r.value, t, 1e-13, "linear kernel");
        }
    }

    #[test]
    fn generic_balanced_golden_values() {
        let s = balanced(&[0.5, 1.2], &[2.5, 3.6]);
        let r = kernel_eval(&s, 0.3, Method::Auto).unwrap();
        check_rel(r.value, 0.033034379045991776, 1e-10, "generic t=0.3");
        let r = kernel_eval(&s, 0.8, Method::Auto).unwrap();
        check_rel(r.value, 0.00043240508073325535, 1e-10, "generic t=0.8");
    }

    #[test]
    fn congruent_balanced_golden_values() {
        // two bottoms one integer apart
        let s = balanced(&[0.5, 1.5], &[2.5, 3.5]);
        let r = kernel_eval(&s, 0.3, Method::Auto).unwrap();
        check_rel(r.value, 0.051380844599230006, 1e-10, "congruent t=0.3");
        let r = kernel_eval(&s, 0.8, Method::Auto).unwrap();
        check_rel(r.value, 0.0013283665466134829, 1e-10, "congruent t=0.8");
        // repeated tops as well
        let s = balanced(&[0.5, 1.5], &[2.5, 2.5]);
        let r = kernel_eval(&s, 0.4, Method::Auto).unwrap();
        check_rel(r.value, 0.14766806229020753, 1e-10, "congruent tops");
        // triple bottom: third-order poles
        let s = balanced(&[0.5, 0.5, 0.5], &[1.7, 1.9, 2.1]);
        let r = kernel_eval(&s, 0.5, Method::Auto).unwrap();
        check_rel(r.value, 0.024503740710262102, 1e-10, "triple pole");
    }

    #[test]
    fn endpoint_strip_values() {
        let s = balanced(&[0.5, 1.2], &[1.3, 1.7]);
        // w = 0.1: plain residue range
        let r = kernel_eval(&s, 0.9, Method::Auto).unwrap();
        check_rel(r.value, 0.53190147890148404, 1e-10, "t=0.9");
        // inside the strip: extrapolated endpoint law (measured fit accuracy
        // is a few 1e-7; the reported abs_err of 1e-6 stays a true bound)
        let r = kernel_eval(&s, 0.995, Method::Auto).unwrap();
        check_rel(r.value, 0.2268119460326007, 2e-6, "t=0.995");
        let r = kernel_eval(&s, 0.9999, Method::Auto).unwrap();
        check_rel(r.value, 0.070300704540623954, 2e-6, "t=0.9999");
        // deep strip for a steep kernel
        let s = balanced(&[0.5, 0.5, 0.5], &[1.7, 1.9, 2.1]);
        let r = kernel_eval(&s, 0.99, Method::Auto).unwrap();
        check_rel(r.value, 5.1785108499751248e-8, 2e-6, "steep strip");
    }

    #[test]
    fn laplace_kernel_golden_values() {
        let s = laplace(&[2.0], &[]);
        let r = kernel_eval(&s, 3.0, Method::Auto).unwrap();
        check_rel(r.value, 0.44808361531077549, 1e-12, "t^2 e^-t");
        let c = kernel_eval(&s, 3.0, Method::ClosedForm).unwrap();
        check_rel(c.value, 0.44808361531077549, 1e-14, "closed form");

        let s = laplace(&[0.5, 1.0], &[2.0]);
        let r = kernel_eval(&s, 2.0, Method::Auto).unwrap();
        check_rel(r.value, 0.060197514200372933, 1e-10, "laplace t=2");
        for (t, want) in [
            (12.0, 1.5882117194366752e-6),
            (30.0, 1.629431174070644e-14),
            (45.0, 4.1322935347504015e-21),
        ] {
            let r = kernel_eval(&s, t, Method::Auto).unwrap();
            check_rel(r.value, want, 1e-8, "laplace saddle");
        }

        // gamma-pair excess 2: Bessel K kernel, residue path
        let s = laplace(&[1.0, 1.0], &[]);
        let r = kernel_eval(&s, 1.0, Method::Auto).unwrap();
        check_rel(r.value, 0.22778774549906687, 1e-11, "2 t K_0(2 sqrt t)");
    }

    #[test]
    fn methods_agree_within_reported_errors() {
        // balanced, psi = 4 > 1: contour vs residue
        let s = balanced(&[0.5, 1.5], &[2.5, 3.5]);
        let ev = KernelEvaluator::new(&s);
        for t in [0.25, 0.5, 0.75] {
            let a = ev.eval(t, Method::Residue).unwrap();
            let b = ev.eval(t, Method::MellinBarnes).unwrap();
            assert!(
                (a.value - b.value).abs() <= a.abs_err + b.abs_err + 1e-10 * a.value.abs(),
                "disagreement at t={t}: {} vs {} (errs {} {})",
                a.value,
                b.value,
                a.abs_err,
                b.abs_err
            );
        }
        // half-line: residue vs saddle contour inside the handover window
        let s = laplace(&[0.5, 1.0], &[2.0]);
        let ev = KernelEvaluator::new(&s);
        for t in [1.0, 4.0, 8.0] {
            let a = ev.eval(t, Method::Residue).unwrap();
            let b = ev.eval(t, Method::MellinBarnes).unwrap();
            assert!(
                (a.value - b.value).abs() <= (a.abs_err + b.abs_err).max(1e-12 * a.value.abs()),
                "halfline disagreement at t={t}: {} vs {}",
                a.value,
                b.value
            );
        }
    }

    #[test]
    fn contour_divergence_for_small_psi() {
        let s = balanced(&[1.0, 1.0], &[1.2, 1.3]); // psi = 0.5
        let r = kernel_eval(&s, 0.5, Method::MellinBarnes);
        assert!(matches!(r, Err(Error::ContourDivergence { .. })));
    }

    #[test]
    fn contour_spec_validation() {
        let s = balanced(&[1.0], &[2.0]);
        assert!(ContourSpec::new(-1.5, 100.0, 64, &s).is_err());
        assert!(ContourSpec::new(0.5, 100.0, 16, &s).is_err());
        assert!(ContourSpec::new(0.5, 100.0, 64, &s).is_ok());
    }

    #[test]
    fn shift_identity() {
        // t^alpha G(bottom,top) = G(bottom+alpha, top+alpha)
        let bottom = [0.6, 1.4];
        let top = [1.9, 2.8];
        for alpha in [0.5, 1.0, 2.0] {
            let s0 = balanced(&bottom, &top);
            let s1 = balanced(
                &bottom.map(|v| v + alpha),
                &top.map(|v| v + alpha),
            );
            for t in [0.2f64, 0.5, 0.85] {
                let g0 = kernel_eval(&s0, t, Method::Auto).unwrap().value;
                let g1 = kernel_eval(&s1, t, Method::Auto).unwrap().value;
                check_rel(t.powf(alpha) * g0, g1, 1e-8, "shift identity");
            }
        }
    }

    #[test]
    fn moment_identities() {
        // frozen: n=2 moment of the congruent-top kernel
        let s = balanced(&[0.5, 1.5], &[2.5, 2.5]);
        let (measured, predicted) = kernel_moment(&s, 2).unwrap();
        check_rel(predicted, 0.032653061224489796, 1e-12, "moment formula");
        check_rel(measured, predicted, 1e-6, "moment quadrature");
        // generic kernel, three moments
        let s = balanced(&[0.5, 1.2], &[2.5, 3.6]);
        for n in 1..=3u32 {
            let (measured, predicted) = kernel_moment(&s, n).unwrap();
            check_rel(measured, predicted, 1e-6, "balanced moment");
        }
        // half-line kernel moment
        let s = laplace(&[0.5, 1.0], &[2.0]);
        let (measured, predicted) = kernel_moment(&s, 2).unwrap();
        check_rel(measured, predicted, 1e-6, "laplace moment");
    }

    #[test]
    fn asymptotics_records() {
        let a = kernel_asymptotics(&balanced(&[1.0], &[2.0])).unwrap();
        assert_eq!(a.zero_exponent, 1.0);
        assert_eq!(a.zero_log_power, 0);
        assert!(a.inf_params.is_none());

        let a = kernel_asymptotics(&balanced(&[1.0, 1.0], &[2.0, 2.0])).unwrap();
        assert_eq!(a.zero_exponent, 1.0);
        assert_eq!(a.zero_log_power, 1);

        let a = kernel_asymptotics(&laplace(&[1.5], &[])).unwrap();
        assert_eq!(a.zero_exponent, 1.5);
        let (mu, alpha) = a.inf_params.unwrap();
        assert_eq!(mu, 1.0);
        check_rel(alpha, 1.0 - 1.5, 1e-14, "alpha");

        // cancelled pole: bottom 1 against top 1 leaves the pole at s=-3
        let a = kernel_asymptotics(&balanced(&[1.0, 3.0], &[1.0, 4.0])).unwrap();
        assert_eq!(a.zero_exponent, 3.0);
    }

    #[test]
    fn small_t_power_law() {
        let s = balanced(&[0.5, 1.2], &[2.5, 3.6]);
        let a = kernel_asymptotics(&s).unwrap();
        assert_eq!(a.zero_exponent, 0.5);
        assert_eq!(a.zero_log_power, 0);
        // ratios approach Gamma(0.7)/(Gamma(2) Gamma(3.1)) ~ 0.590664
        let g6 = kernel_eval(&s, 1e-6, Method::Auto).unwrap().value;
        check_rel(g6 / 1e-6f64.powf(0.5), 0.590426322210375, 1e-9, "t=1e-6 law");
        let g7 = kernel_eval(&s, 1e-7, Method::Auto).unwrap().value;
        check_rel(g7 / 1e-7f64.powf(0.5), 0.590616219652908, 1e-9, "t=1e-7 law");
    }

    #[test]
    fn nonneg_scan_cases() {
        let r = kernel_nonneg_scan(&balanced(&[1.0, 3.0], &[2.0, 2.0]), 512).unwrap();
        assert!(r.pass, "t(1-t)^2-generating rows scan: {r:?}");
        assert!(r.hypothesis.holds());
        let r = kernel_nonneg_scan(&balanced(&[1.0, 1.0], &[2.0, 2.0]), 512).unwrap();
        assert!(r.pass);
        // beta density with Gamma(-0.5) < 0: genuinely negative kernel
        let r = kernel_nonneg_scan(&balanced(&[2.0], &[1.5]), 512).unwrap();
        assert!(!r.pass);
        assert!(r.min_margin < -1e-3);
        assert!(!r.hypothesis.holds());
        // scan is for the (0,1) kind only
        assert!(kernel_nonneg_scan(&laplace(&[1.0], &[]), 128).is_err());
    }

    #[test]
    fn degenerate_cancellation_gives_zero() {
        // bottom (2), top (1): Mellin ratio is the polynomial (1+s), no poles
        let s = balanced(&[2.0], &[1.0]);
        let r = kernel_eval(&s, 0.5, Method::Residue).unwrap();
        assert_eq!(r.value, 0.0);
        let a = kernel_asymptotics(&s).unwrap();
        assert!(a.zero_exponent.is_infinite());
    }
}
