//! Command-line front end: series evaluation, kernel densities, parameter
//! predicates, bound certificates, representation cross-checks, and parallel
//! grid campaigns, all with byte-deterministic machine output.
//!
//! Exit codes: 0 = computed and every asserted property passed; 1 = usage or
//! domain error; 2 = computed, but a hypothesis or scanned property failed
//! (advisory results still emitted); 3 = numerical failure.

use std::fmt::Write as _;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{Map, Value};

use hyperbound::bounds::{
    bessel_bounds, f01_bounds, jensen_bounds, luke_bounds, stieltjes_bounds,
    upper_bounds_p_lt_q, ArgSign, BoundCertificate,
};
use hyperbound::error::Error;
use hyperbound::gkernel::{kernel_eval, kernel_nonneg_scan, KernelSpec, Method};
use hyperbound::monotone::{cm_check, log_cm_check, logconvex_check, ratio_monotone_check, CmTarget};
use hyperbound::params::{check_weak_supermajorization, v_nonneg_check, ParamVec};
use hyperbound::quad::QuadratureConfig;
use hyperbound::report::MonotoneReport;
use hyperbound::representations::{
    eval_pfq_extended, rep_vs_series, CosineVariant, LaplaceVariant, RepSpec, SplitSpec,
};
use hyperbound::series::HyperSpec;

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_HYPOTHESIS: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser)]
#[command(
    name = "hyperbound",
    version,
    about = "Generalized hypergeometric evaluation, positivity certificates, and two-sided bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate F(A;B;x), continuing past the series disk where possible
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate the kernel density at t, or scan it for sign changes
    Kernel {
        #[command(flatten)]
        params: ParamArgs,
        /// Evaluation point
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        /// Evaluation grid start:stop:count (log: prefix for geometric)
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Scan for negativity at this many interior points instead
        #[arg(long)]
        scan: Option<usize>,
        /// Evaluation method
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the parameter-order conditions behind the positivity theorems
    Check {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit a two-sided bound certificate at one or many points
    Bounds {
        #[command(flatten)]
        params: ParamArgs,
        /// Bound family
        #[arg(long, value_enum)]
        family: Family,
        /// Use the refined variant where one exists
        #[arg(long)]
        refined: bool,
        /// Stieltjes exponent
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
        /// Argument sign convention for the Stieltjes family
        #[arg(long, value_enum, default_value_t = SignArg::Pos)]
        sign: SignArg,
        /// Rate constant for the f01 family
        #[arg(long, allow_hyphen_values = true)]
        rate: Option<f64>,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare an integral representation with the defining series on a grid
    VerifyRep {
        #[command(flatten)]
        params: ParamArgs,
        /// Representation to verify
        #[arg(long, value_enum)]
        rep: RepArg,
        /// Stieltjes exponent (rep = stieltjes)
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
        /// Completing bottom-row entries (rep = small-p)
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        alphas: String,
        #[command(flatten)]
        split: SplitArgs,
        /// z grid; both sides evaluate the function at -z
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Scan complete monotonicity of F(A;B;-x) or of the inverse-argument composite
    CmScan {
        #[command(flatten)]
        params: ParamArgs,
        /// Scan x^-sigma F(sigma,A;B;-1/x) instead of F(A;B;-x)
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
        /// Check logarithmic complete monotonicity (needs --sigma in (0,1])
        #[arg(long)]
        log: bool,
        /// Highest derivative order (default 6 direct, 4 composite)
        #[arg(long)]
        n_max: Option<u32>,
        /// Positive x grid start:stop:count (log: prefix for geometric)
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Scan log-convexity in the parameter shift at a fixed argument
    ConvexityScan {
        #[command(flatten)]
        split: SplitArgs,
        /// Shift grid start:stop:count
        #[arg(long, allow_hyphen_values = true)]
        mu_grid: String,
        /// Fixed argument; the function is evaluated at -x
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Scan the shifted-to-base ratio for decrease in the argument
    RatioScan {
        #[command(flatten)]
        split: SplitArgs,
        /// Parameter shift applied to A2 and B2
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        /// x grid start:stop:count
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run eval or bounds over a grid in parallel; output order is by index
    Campaign {
        /// Operation to sweep
        #[arg(long, value_enum)]
        op: CampaignOp,
        #[command(flatten)]
        params: ParamArgs,
        /// Bound family (op = bounds)
        #[arg(long, value_enum)]
        family: Option<Family>,
        #[arg(long)]
        refined: bool,
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
        #[arg(long, value_enum, default_value_t = SignArg::Pos)]
        sign: SignArg,
        #[arg(long, allow_hyphen_values = true)]
        rate: Option<f64>,
        /// Sweep grid start:stop:count (log: prefix for geometric)
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Numerator parameters, comma separated (may be empty)
    #[arg(long = "A", value_name = "REALS", default_value = "", allow_hyphen_values = true)]
    a: String,
    /// Denominator parameters, comma separated (may be empty)
    #[arg(long = "B", value_name = "REALS", default_value = "", allow_hyphen_values = true)]
    b: String,
}

#[derive(Args)]
struct SplitArgs {
    /// Unshifted numerator entries
    #[arg(long = "A1", value_name = "REALS", default_value = "", allow_hyphen_values = true)]
    a1: String,
    /// Unshifted denominator entries
    #[arg(long = "B1", value_name = "REALS", default_value = "", allow_hyphen_values = true)]
    b1: String,
    /// Shift-side numerator entries
    #[arg(long = "A2", value_name = "REALS", default_value = "", allow_hyphen_values = true)]
    a2: String,
    /// Shift-side denominator entries
    #[arg(long = "B2", value_name = "REALS", default_value = "", allow_hyphen_values = true)]
    b2: String,
}

#[derive(Args)]
struct PointArgs {
    /// Single evaluation point
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    /// Evaluation grid start:stop:count (log: prefix for geometric)
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Pass tolerance for certificates and scans (env HYPERBOUND_TOL, default 1e-9)
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    /// Relative tolerance for numerical evaluation
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Residue,
    MellinBarnes,
    ClosedForm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Luke,
    Stieltjes,
    Jensen,
    Envelope,
    Bessel,
    F01,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SignArg {
    Pos,
    Neg,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepArg {
    Stieltjes,
    LaplaceQ1,
    LaplaceQq,
    LaplaceAtom,
    Cosine,
    CosineAtom,
    SmallP,
    Split,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CampaignOp {
    Eval,
    Bounds,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(EXIT_USAGE);
        }
    }
}

// ---------------------------------------------------------------------------
// Input parsing
// ---------------------------------------------------------------------------

type UsageResult<T> = std::result::Result<T, String>;

fn parse_reals(field: &str, s: &str) -> UsageResult<ParamVec> {
    let trimmed = s.trim();
    if trimmed.is_empty() {
        return Ok(ParamVec::empty());
    }
    let mut values = Vec::new();
    for part in trimmed.split(',') {
        let v: f64 = part
            .trim()
            .parse()
            .map_err(|_| format!("{field}: cannot parse '{part}' as a real"))?;
        values.push(v);
    }
    ParamVec::new(values).map_err(|e| format!("{field}: {e}"))
}

/// start:stop:count linear, or log:start:stop:count geometric. Grids need
/// count >= 2 and start < stop; geometric spacing needs start > 0.
fn parse_grid(s: &str) -> UsageResult<Vec<f64>> {
    let (geometric, body) = match s.strip_prefix("log:") {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let parts: Vec<&str> = body.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid '{s}' is not start:stop:count"));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| format!("grid start '{}' is not a real", parts[0]))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| format!("grid stop '{}' is not a real", parts[1]))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| format!("grid count '{}' is not an integer", parts[2]))?;
    if count < 2 {
        return Err(format!("grid count must be at least 2, got {count}"));
    }
    if !(start < stop) || !start.is_finite() || !stop.is_finite() {
        return Err(format!("grid needs finite start < stop, got {start}:{stop}"));
    }
    if geometric && !(start > 0.0) {
        return Err(format!("geometric grid needs start > 0, got {start}"));
    }
    let grid = if geometric {
        let (llo, lhi) = (start.ln(), stop.ln());
        (0..count)
            .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
            .collect()
    } else {
        (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect()
    };
    let mut grid: Vec<f64> = grid;
    grid[0] = start;
    grid[count - 1] = stop;
    Ok(grid)
}

impl ParamArgs {
    fn parse(&self) -> UsageResult<(ParamVec, ParamVec)> {
        Ok((parse_reals("--A", &self.a)?, parse_reals("--B", &self.b)?))
    }
}

impl SplitArgs {
    fn parse(&self) -> UsageResult<SplitSpec> {
        let a1 = parse_reals("--A1", &self.a1)?;
        let b1 = parse_reals("--B1", &self.b1)?;
        let a2 = parse_reals("--A2", &self.a2)?;
        let b2 = parse_reals("--B2", &self.b2)?;
        SplitSpec::new(a1, b1, a2, b2).map_err(|e| e.to_string())
    }
}

impl PointArgs {
    fn points(&self) -> UsageResult<Vec<f64>> {
        match (self.x, &self.grid) {
            (Some(x), None) => {
                if !x.is_finite() {
                    return Err(format!("--x must be finite, got {x}"));
                }
                Ok(vec![x])
            }
            (None, Some(g)) => parse_grid(g),
            (Some(_), Some(_)) => Err("--x and --grid are mutually exclusive".to_string()),
            (None, None) => Err("one of --x or --grid is required".to_string()),
        }
    }

    fn describe(&self) -> Value {
        match (&self.x, &self.grid) {
            (Some(x), _) => json_f64(*x),
            (_, Some(g)) => Value::String(g.clone()),
            _ => Value::Null,
        }
    }
}

impl OutputArgs {
    fn tolerance(&self) -> UsageResult<f64> {
        if let Some(t) = self.tol {
            if !(t >= 0.0) {
                return Err(format!("--tol must be nonnegative, got {t}"));
            }
            return Ok(t);
        }
        match std::env::var("HYPERBOUND_TOL") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| format!("HYPERBOUND_TOL is not a real: '{s}'")),
            Err(_) => Ok(1e-9),
        }
    }

    fn quad_config(&self) -> UsageResult<QuadratureConfig> {
        QuadratureConfig::new(self.rel_tol, 1e-300, 12).map_err(|e| e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Output rendering
// ---------------------------------------------------------------------------

fn params_json(p: &ParamVec) -> Value {
    Value::Array(p.iter().map(|&v| json_f64(v)).collect())
}

fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Serializes with sorted keys (the map type is ordered) and a fixed
/// 15-significant-digit float format, so identical requests give identical
/// bytes.
fn render_json(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Number(n) => {
            if n.is_f64() {
                let _ = write!(out, "{:.14e}", n.as_f64().unwrap_or(f64::NAN));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).unwrap_or_else(|_| "\"\"".to_string()));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                render_json(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, val)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).unwrap_or_else(|_| "\"\"".to_string()));
                out.push(':');
                render_json(val, out);
            }
            out.push('}');
        }
    }
}

fn csv_scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => {
            if n.is_f64() {
                format!("{:.14e}", n.as_f64().unwrap_or(f64::NAN))
            } else {
                n.to_string()
            }
        }
        Value::String(s) => s.clone(),
        _ => String::new(),
    }
}

/// Columns resolve against the row itself, then its `inputs`, then its
/// `certificate`; absent fields render empty.
fn csv_lookup(row: &Value, col: &str) -> Value {
    for scope in [Some(row), row.get("inputs"), row.get("certificate")]
        .into_iter()
        .flatten()
    {
        if let Some(v) = scope.get(col) {
            return v.clone();
        }
    }
    Value::Null
}

fn render_text(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                render_text(&key, val, out);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                render_text(&format!("{prefix}[{i}]"), item, out);
            }
        }
        scalar => {
            let _ = writeln!(out, "{prefix} = {}", csv_scalar(scalar));
        }
    }
}

struct Output {
    request: Value,
    rows: Vec<Value>,
    summary: Option<Value>,
    columns: &'static [&'static str],
}

fn emit(output: &Output, format: Format) {
    let mut text = String::new();
    match format {
        Format::Json => {
            let mut top = Map::new();
            top.insert("request".to_string(), output.request.clone());
            top.insert("results".to_string(), Value::Array(output.rows.clone()));
            if let Some(summary) = &output.summary {
                top.insert("summary".to_string(), summary.clone());
            }
            render_json(&Value::Object(top), &mut text);
            text.push('\n');
        }
        Format::Csv => {
            text.push_str(&output.columns.join(","));
            text.push('\n');
            for row in &output.rows {
                let cells: Vec<String> = output
                    .columns
                    .iter()
                    .map(|c| csv_scalar(&csv_lookup(row, c)))
                    .collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
        }
        Format::Text => {
            render_text("request", &output.request, &mut text);
            for (i, row) in output.rows.iter().enumerate() {
                let _ = writeln!(text, "-- result {i}");
                render_text("", row, &mut text);
            }
            if let Some(summary) = &output.summary {
                text.push_str("-- summary\n");
                render_text("", summary, &mut text);
            }
        }
    }
    print!("{text}");
}

// ---------------------------------------------------------------------------
// Row builders
// ---------------------------------------------------------------------------

fn classify(e: &Error) -> i32 {
    match e {
        Error::HypothesisFailed(_) => EXIT_HYPOTHESIS,
        Error::DomainError(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn error_row(inputs: Value, e: &Error) -> (Value, i32) {
    let mut row = Map::new();
    row.insert("inputs".to_string(), inputs);
    row.insert("error".to_string(), Value::String(e.to_string()));
    row.insert("status".to_string(), Value::String("error".to_string()));
    (Value::Object(row), classify(e))
}

fn inputs_x(x: f64) -> Value {
    let mut m = Map::new();
    m.insert("x".to_string(), json_f64(x));
    Value::Object(m)
}

fn eval_row(spec: &HyperSpec, x: f64, cfg: &QuadratureConfig) -> (Value, i32) {
    match eval_pfq_extended(spec, x, cfg) {
        Ok(r) => {
            let mut row = Map::new();
            row.insert("inputs".to_string(), inputs_x(x));
            row.insert("value".to_string(), json_f64(r.value));
            row.insert("error_estimate".to_string(), json_f64(r.abs_err));
            row.insert("status".to_string(), Value::String("ok".to_string()));
            (Value::Object(row), EXIT_OK)
        }
        Err(e) => error_row(inputs_x(x), &e),
    }
}

fn certificate_row(x: f64, cert: &BoundCertificate) -> (Value, i32) {
    let holds = cert.hypotheses_hold();
    let mut body = Map::new();
    body.insert("hypotheses".to_string(), to_value(&cert.hypotheses));
    body.insert(
        "containment_margin".to_string(),
        cert.containment_margin().map(json_f64).unwrap_or(Value::Null),
    );
    let mut row = Map::new();
    row.insert("inputs".to_string(), inputs_x(x));
    row.insert(
        "lower".to_string(),
        cert.lower.map(json_f64).unwrap_or(Value::Null),
    );
    row.insert(
        "upper".to_string(),
        cert.upper.map(json_f64).unwrap_or(Value::Null),
    );
    row.insert(
        "value".to_string(),
        cert.reference_value.map(json_f64).unwrap_or(Value::Null),
    );
    row.insert("hypotheses_hold".to_string(), Value::Bool(holds));
    row.insert("certificate".to_string(), Value::Object(body));
    let status = if holds { "ok" } else { "hypothesis_failed" };
    row.insert("status".to_string(), Value::String(status.to_string()));
    (
        Value::Object(row),
        if holds { EXIT_OK } else { EXIT_HYPOTHESIS },
    )
}

fn scan_row(inputs: Value, report: &MonotoneReport) -> (Value, i32) {
    let mut row = Map::new();
    row.insert("inputs".to_string(), inputs);
    row.insert("certificate".to_string(), to_value(report));
    let (status, code) = if !report.hypothesis.holds() {
        ("hypothesis_failed", EXIT_HYPOTHESIS)
    } else if !report.pass {
        ("failed", EXIT_HYPOTHESIS)
    } else {
        ("ok", EXIT_OK)
    };
    row.insert("status".to_string(), Value::String(status.to_string()));
    (Value::Object(row), code)
}

struct BoundRequest {
    family: Family,
    refined: bool,
    sigma: Option<f64>,
    sign: ArgSign,
    rate: Option<f64>,
}

impl BoundRequest {
    fn validate(&self) -> UsageResult<()> {
        if self.family == Family::Stieltjes && self.sigma.is_none() {
            return Err("--family stieltjes requires --sigma".to_string());
        }
        if self.family == Family::F01 && self.rate.is_none() {
            return Err("--family f01 requires --rate".to_string());
        }
        Ok(())
    }

    fn certificate(
        &self,
        a: &ParamVec,
        b: &ParamVec,
        x: f64,
    ) -> hyperbound::Result<BoundCertificate> {
        match self.family {
            Family::Luke => luke_bounds(a, b, x, self.refined),
            Family::Stieltjes => {
                stieltjes_bounds(self.sigma.unwrap_or(f64::NAN), a, b, x, self.refined, self.sign)
            }
            Family::Jensen => jensen_bounds(a, b, x),
            Family::Envelope => upper_bounds_p_lt_q(a, b, x),
            Family::Bessel => bessel_bounds(a, b, x),
            Family::F01 => f01_bounds(self.rate.unwrap_or(f64::NAN), x),
        }
    }

    fn row(&self, a: &ParamVec, b: &ParamVec, x: f64) -> (Value, i32) {
        match self.certificate(a, b, x) {
            Ok(cert) => certificate_row(x, &cert),
            Err(e) => error_row(inputs_x(x), &e),
        }
    }

    fn describe(&self, request: &mut Map<String, Value>) {
        let family = match self.family {
            Family::Luke => "luke",
            Family::Stieltjes => "stieltjes",
            Family::Jensen => "jensen",
            Family::Envelope => "envelope",
            Family::Bessel => "bessel",
            Family::F01 => "f01",
        };
        request.insert("family".to_string(), Value::String(family.to_string()));
        request.insert("refined".to_string(), Value::Bool(self.refined));
        if let Some(s) = self.sigma {
            request.insert("sigma".to_string(), json_f64(s));
        }
        if self.family == Family::Stieltjes {
            let sign = match self.sign {
                ArgSign::Positive => "pos",
                ArgSign::Negative => "neg",
            };
            request.insert("sign".to_string(), Value::String(sign.to_string()));
        }
        if let Some(r) = self.rate {
            request.insert("rate".to_string(), json_f64(r));
        }
    }
}

// ---------------------------------------------------------------------------
// Command dispatch
// ---------------------------------------------------------------------------

fn base_request(command: &str, out: &OutputArgs) -> UsageResult<Map<String, Value>> {
    let mut m = Map::new();
    m.insert("command".to_string(), Value::String(command.to_string()));
    m.insert("tol".to_string(), json_f64(out.tolerance()?));
    m.insert("rel_tol".to_string(), json_f64(out.rel_tol));
    Ok(m)
}

fn insert_params(m: &mut Map<String, Value>, a: &ParamVec, b: &ParamVec) {
    m.insert("A".to_string(), params_json(a));
    m.insert("B".to_string(), params_json(b));
}

fn worst(codes: impl IntoIterator<Item = i32>) -> i32 {
    codes.into_iter().max().unwrap_or(EXIT_OK)
}

const SCAN_COLUMNS: &[&str] = &[
    "property",
    "pass",
    "min_margin",
    "argmin",
    "tolerance",
    "points",
    "hypothesis",
    "status",
];

fn run(command: Command) -> UsageResult<i32> {
    match command {
        Command::Eval { params, point, out } => {
            let (a, b) = params.parse()?;
            let spec = HyperSpec::new(a.clone(), b.clone()).map_err(|e| e.to_string())?;
            let points = point.points()?;
            let cfg = out.quad_config()?;
            let mut request = base_request("eval", &out)?;
            insert_params(&mut request, &a, &b);
            request.insert("x".to_string(), point.describe());
            let (rows, codes): (Vec<_>, Vec<_>) =
                points.iter().map(|&x| eval_row(&spec, x, &cfg)).unzip();
            let output = Output {
                request: Value::Object(request),
                rows,
                summary: None,
                columns: &["x", "value", "error_estimate", "status"],
            };
            emit(&output, out.format);
            Ok(worst(codes))
        }
        Command::Kernel {
            params,
            t,
            grid,
            scan,
            method,
            out,
        } => {
            let (a, b) = params.parse()?;
            let spec = KernelSpec::new(a.clone(), b.clone()).map_err(|e| e.to_string())?;
            let mut request = base_request("kernel", &out)?;
            insert_params(&mut request, &a, &b);
            if let Some(points) = scan {
                if t.is_some() || grid.is_some() {
                    return Err("--scan excludes --t and --grid".to_string());
                }
                request.insert("scan".to_string(), Value::Number(points.into()));
                let (row, code) = match kernel_nonneg_scan(&spec, points) {
                    Ok(report) => scan_row(Value::Object(Map::new()), &report),
                    Err(e) => error_row(Value::Object(Map::new()), &e),
                };
                let output = Output {
                    request: Value::Object(request),
                    rows: vec![row],
                    summary: None,
                    columns: SCAN_COLUMNS,
                };
                emit(&output, out.format);
                return Ok(code);
            }
            let point = PointArgs { x: t, grid };
            let points = point.points().map_err(|e| e.replace("--x", "--t"))?;
            request.insert("t".to_string(), point.describe());
            let m = match method {
                MethodArg::Auto => Method::Auto,
                MethodArg::Residue => Method::Residue,
                MethodArg::MellinBarnes => Method::MellinBarnes,
                MethodArg::ClosedForm => Method::ClosedForm,
            };
            let mut rows = Vec::new();
            let mut codes = Vec::new();
            for &tv in &points {
                let mut inputs = Map::new();
                inputs.insert("t".to_string(), json_f64(tv));
                let (row, code) = match kernel_eval(&spec, tv, m) {
                    Ok(r) => {
                        let mut row = Map::new();
                        row.insert("inputs".to_string(), Value::Object(inputs));
                        row.insert("value".to_string(), json_f64(r.value));
                        row.insert("error_estimate".to_string(), json_f64(r.abs_err));
                        row.insert("status".to_string(), Value::String("ok".to_string()));
                        (Value::Object(row), EXIT_OK)
                    }
                    Err(e) => error_row(Value::Object(inputs), &e),
                };
                rows.push(row);
                codes.push(code);
            }
            let output = Output {
                request: Value::Object(request),
                rows,
                summary: None,
                columns: &["t", "value", "error_estimate", "status"],
            };
            emit(&output, out.format);
            Ok(worst(codes))
        }
        Command::Check { params, out } => {
            let (a, b) = params.parse()?;
            let weak = check_weak_supermajorization(&a, &b).map_err(|e| e.to_string())?;
            let scan = v_nonneg_check(&a, &b, 400).map_err(|e| e.to_string())?;
            let mut request = base_request("check", &out)?;
            insert_params(&mut request, &a, &b);
            let mut body = Map::new();
            body.insert("psi".to_string(), json_f64(scan.psi));
            body.insert(
                "weak_supermajorized".to_string(),
                Value::Bool(weak.holds),
            );
            if let Some(k) = weak.witness {
                body.insert("witness".to_string(), Value::Number(k.into()));
            }
            body.insert("v_min".to_string(), json_f64(scan.v_min));
            body.insert("v_argmin".to_string(), json_f64(scan.argmin));
            body.insert("v_nonneg".to_string(), Value::Bool(scan.nonneg));
            let status = if scan.nonneg { "ok" } else { "hypothesis_failed" };
            let mut row = Map::new();
            row.insert("inputs".to_string(), Value::Object(Map::new()));
            row.insert("certificate".to_string(), Value::Object(body));
            row.insert("status".to_string(), Value::String(status.to_string()));
            let code = if scan.nonneg { EXIT_OK } else { EXIT_HYPOTHESIS };
            let output = Output {
                request: Value::Object(request),
                rows: vec![Value::Object(row)],
                summary: None,
                columns: &[
                    "psi",
                    "weak_supermajorized",
                    "v_min",
                    "v_argmin",
                    "v_nonneg",
                    "status",
                ],
            };
            emit(&output, out.format);
            Ok(code)
        }
        Command::Bounds {
            params,
            family,
            refined,
            sigma,
            sign,
            rate,
            point,
            out,
        } => {
            let (a, b) = params.parse()?;
            let req = BoundRequest {
                family,
                refined,
                sigma,
                sign: match sign {
                    SignArg::Pos => ArgSign::Positive,
                    SignArg::Neg => ArgSign::Negative,
                },
                rate,
            };
            req.validate()?;
            let points = point.points()?;
            let mut request = base_request("bounds", &out)?;
            insert_params(&mut request, &a, &b);
            request.insert("x".to_string(), point.describe());
            req.describe(&mut request);
            let (rows, codes): (Vec<_>, Vec<_>) =
                points.iter().map(|&x| req.row(&a, &b, x)).unzip();
            let output = Output {
                request: Value::Object(request),
                rows,
                summary: None,
                columns: &[
                    "x",
                    "lower",
                    "upper",
                    "value",
                    "containment_margin",
                    "hypotheses_hold",
                    "status",
                ],
            };
            emit(&output, out.format);
            Ok(worst(codes))
        }
        Command::VerifyRep {
            params,
            rep,
            sigma,
            alphas,
            split,
            grid,
            out,
        } => {
            let (a, b) = params.parse()?;
            let rep_spec = match rep {
                RepArg::Stieltjes => RepSpec::Stieltjes {
                    sigma: sigma.ok_or("--rep stieltjes requires --sigma")?,
                    a: a.clone(),
                    b: b.clone(),
                },
                RepArg::LaplaceQ1 => RepSpec::Laplace {
                    a: a.clone(),
                    b: b.clone(),
                    variant: LaplaceVariant::QPlus1,
                },
                RepArg::LaplaceQq => RepSpec::Laplace {
                    a: a.clone(),
                    b: b.clone(),
                    variant: LaplaceVariant::QQ,
                },
                RepArg::LaplaceAtom => RepSpec::Laplace {
                    a: a.clone(),
                    b: b.clone(),
                    variant: LaplaceVariant::QQPsi0,
                },
                RepArg::Cosine => RepSpec::Cosine {
                    a: a.clone(),
                    b: b.clone(),
                    variant: CosineVariant::PsiGtHalf,
                },
                RepArg::CosineAtom => RepSpec::Cosine {
                    a: a.clone(),
                    b: b.clone(),
                    variant: CosineVariant::PsiEqHalf,
                },
                RepArg::SmallP => RepSpec::SmallP {
                    a: a.clone(),
                    b: b.clone(),
                    alphas: parse_reals("--alphas", &alphas)?,
                },
                RepArg::Split => RepSpec::Split(split.parse()?),
            };
            let z_grid = parse_grid(&grid)?;
            let cfg = out.quad_config()?;
            let report = rep_vs_series(&rep_spec, &z_grid, &cfg);
            let mut request = base_request("verify-rep", &out)?;
            insert_params(&mut request, &a, &b);
            request.insert("grid".to_string(), Value::String(grid));
            if let Some(s) = sigma {
                request.insert("sigma".to_string(), json_f64(s));
            }
            let mut rows = Vec::new();
            let mut codes = Vec::new();
            for point in &report.points {
                let mut inputs = Map::new();
                inputs.insert("z".to_string(), json_f64(point.z));
                let mut row = Map::new();
                row.insert("inputs".to_string(), Value::Object(inputs));
                row.insert("certificate".to_string(), to_value(point));
                let (status, code) = if point.error.is_some() {
                    ("error", EXIT_NUMERICAL)
                } else if point.within_budget {
                    ("ok", EXIT_OK)
                } else {
                    ("failed", EXIT_NUMERICAL)
                };
                row.insert("status".to_string(), Value::String(status.to_string()));
                rows.push(Value::Object(row));
                codes.push(code);
            }
            let mut summary = Map::new();
            summary.insert("max_abs".to_string(), json_f64(report.max_abs));
            summary.insert("max_rel".to_string(), json_f64(report.max_rel));
            summary.insert("argmax".to_string(), json_f64(report.argmax));
            summary.insert(
                "all_within_budget".to_string(),
                Value::Bool(report.all_within_budget),
            );
            let output = Output {
                request: Value::Object(request),
                rows,
                summary: Some(Value::Object(summary)),
                columns: &[
                    "z",
                    "rep",
                    "series",
                    "abs_diff",
                    "budget",
                    "within_budget",
                    "status",
                ],
            };
            emit(&output, out.format);
            Ok(worst(codes))
        }
        Command::CmScan {
            params,
            sigma,
            log,
            n_max,
            grid,
            out,
        } => {
            let (a, b) = params.parse()?;
            let x_grid = parse_grid(&grid)?;
            let tol = out.tolerance()?;
            let mut request = base_request("cm-scan", &out)?;
            insert_params(&mut request, &a, &b);
            request.insert("grid".to_string(), Value::String(grid));
            if let Some(s) = sigma {
                request.insert("sigma".to_string(), json_f64(s));
            }
            request.insert("log".to_string(), Value::Bool(log));
            let result = if log {
                let s = sigma.ok_or("--log requires --sigma")?;
                log_cm_check(s, &a, &b, &x_grid, tol)
            } else if let Some(s) = sigma {
                let order = n_max.unwrap_or(4);
                request.insert("n_max".to_string(), Value::Number(order.into()));
                cm_check(
                    &CmTarget::InverseArgument {
                        sigma: s,
                        a: a.clone(),
                        b: b.clone(),
                    },
                    order,
                    &x_grid,
                    tol,
                )
            } else {
                let order = n_max.unwrap_or(6);
                request.insert("n_max".to_string(), Value::Number(order.into()));
                let spec = HyperSpec::new(a.clone(), b.clone()).map_err(|e| e.to_string())?;
                cm_check(&CmTarget::Direct(spec), order, &x_grid, tol)
            };
            let (row, code) = match result {
                Ok(report) => scan_row(Value::Object(Map::new()), &report),
                Err(e) => error_row(Value::Object(Map::new()), &e),
            };
            let output = Output {
                request: Value::Object(request),
                rows: vec![row],
                summary: None,
                columns: SCAN_COLUMNS,
            };
            emit(&output, out.format);
            Ok(code)
        }
        Command::ConvexityScan {
            split,
            mu_grid,
            x,
            out,
        } => {
            let spec = split.parse()?;
            let mus = parse_grid(&mu_grid)?;
            let tol = out.tolerance()?;
            let mut request = base_request("convexity-scan", &out)?;
            request.insert("A1".to_string(), params_json(&spec.a1));
            request.insert("B1".to_string(), params_json(&spec.b1));
            request.insert("A2".to_string(), params_json(&spec.a2));
            request.insert("B2".to_string(), params_json(&spec.b2));
            request.insert("mu_grid".to_string(), Value::String(mu_grid));
            request.insert("x".to_string(), json_f64(x));
            let (row, code) = match logconvex_check(&spec, &mus, x, tol) {
                Ok(report) => scan_row(Value::Object(Map::new()), &report),
                Err(e) => error_row(Value::Object(Map::new()), &e),
            };
            let output = Output {
                request: Value::Object(request),
                rows: vec![row],
                summary: None,
                columns: SCAN_COLUMNS,
            };
            emit(&output, out.format);
            Ok(code)
        }
        Command::RatioScan {
            split,
            mu,
            grid,
            out,
        } => {
            let spec = split.parse()?;
            let xs = parse_grid(&grid)?;
            let tol = out.tolerance()?;
            let mut request = base_request("ratio-scan", &out)?;
            request.insert("A1".to_string(), params_json(&spec.a1));
            request.insert("B1".to_string(), params_json(&spec.b1));
            request.insert("A2".to_string(), params_json(&spec.a2));
            request.insert("B2".to_string(), params_json(&spec.b2));
            request.insert("mu".to_string(), json_f64(mu));
            request.insert("grid".to_string(), Value::String(grid));
            let (row, code) = match ratio_monotone_check(&spec, mu, &xs, tol) {
                Ok(report) => scan_row(Value::Object(Map::new()), &report),
                Err(e) => error_row(Value::Object(Map::new()), &e),
            };
            let output = Output {
                request: Value::Object(request),
                rows: vec![row],
                summary: None,
                columns: SCAN_COLUMNS,
            };
            emit(&output, out.format);
            Ok(code)
        }
        Command::Campaign {
            op,
            params,
            family,
            refined,
            sigma,
            sign,
            rate,
            grid,
            out,
        } => {
            let (a, b) = params.parse()?;
            let points = parse_grid(&grid)?;
            let cfg = out.quad_config()?;
            let mut request = base_request("campaign", &out)?;
            insert_params(&mut request, &a, &b);
            request.insert("grid".to_string(), Value::String(grid));
            request.insert("points".to_string(), Value::Number(points.len().into()));
            match op {
                CampaignOp::Eval => {
                    request.insert("op".to_string(), Value::String("eval".to_string()));
                    let spec =
                        HyperSpec::new(a.clone(), b.clone()).map_err(|e| e.to_string())?;
                    let results: Vec<(Value, i32)> = points
                        .par_iter()
                        .map(|&x| eval_row(&spec, x, &cfg))
                        .collect();
                    let (rows, codes): (Vec<_>, Vec<_>) = results.into_iter().unzip();
                    let output = Output {
                        request: Value::Object(request),
                        rows,
                        summary: None,
                        columns: &["x", "value", "error_estimate", "status"],
                    };
                    emit(&output, out.format);
                    Ok(worst(codes))
                }
                CampaignOp::Bounds => {
                    request.insert("op".to_string(), Value::String("bounds".to_string()));
                    let req = BoundRequest {
                        family: family.ok_or("--op bounds requires --family")?,
                        refined,
                        sigma,
                        sign: match sign {
                            SignArg::Pos => ArgSign::Positive,
                            SignArg::Neg => ArgSign::Negative,
                        },
                        rate,
                    };
                    req.validate()?;
                    req.describe(&mut request);
                    let results: Vec<(Value, i32)> = points
                        .par_iter()
                        .map(|&x| req.row(&a, &b, x))
                        .collect();
                    let (rows, codes): (Vec<_>, Vec<_>) = results.into_iter().unzip();
                    let output = Output {
                        request: Value::Object(request),
                        rows,
                        summary: None,
                        columns: &[
                            "x",
                            "lower",
                            "upper",
                            "value",
                            "containment_margin",
                            "hypotheses_hold",
                            "status",
                        ],
                    };
                    emit(&output, out.format);
                    Ok(worst(codes))
                }
            }
        }
    }
}
