//! The `padyn` command line: certification, periodic tables, height traces and
//! bound monitors, written as JSON lines or CSV with exact rational fields.
//!
//! Exit codes: 0 success, 1 parse or input error, 3 bad reduction, 4 degree
//! cap exceeded, 5 periodic or torsion base point, 6 inconclusive at the
//! maximal truncation, 7 a certified violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::Error;
use crate::heights::{
    elliptic_height_trace, height_limit_trace, jensen_sum, repulsion_monitor, ConvergenceTrace, LocalCrossCheck,
};
use crate::local::{attracting_check, bound_reports, BoundOutcome, TruncatedSeries, DEFAULT_ORDER_CAP};
use crate::morphism::FormPair;
use crate::newton::{lower_hull, root_valuations, RootValuations, ValuedPoly};
use crate::valuation::{fmt_rational, parse_rational, vp, Prime, Valuation};

#[derive(Parser, Debug)]
#[command(name = "padyn", version, about = "Exact p-adic dynamics on the projective line")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Add natural-log float columns next to exact log-p values.
    #[arg(long, global = true)]
    pub ln: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certify good reduction of a map.
    Check(MapArgs),
    /// Periodic polynomials, least-period parts and their root valuations.
    Periodic(PeriodicArgs),
    /// Height limit trace for a map, the squaring example or a duplication map.
    Height(HeightArgs),
    /// Repulsion monitor around a base point.
    Monitor(MonitorArgs),
    /// Periodic-point norm bound for a power series at a fixed point.
    Local(LocalArgs),
    /// Height trace of the squaring map computed from `x^(2^n) - x`.
    Jensen(JensenArgs),
    /// Height trace of the duplication map of `y^2 = x^3 + a x + b`.
    Elliptic(EllipticArgs),
}

#[derive(Args, Debug)]
pub struct MapArgs {
    /// Map specification (TOML).
    #[arg(long)]
    pub map: PathBuf,
    /// Prime; overrides the one in the specification.
    #[arg(long)]
    pub prime: Option<u64>,
}

#[derive(Args, Debug)]
pub struct PeriodicArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    /// Largest admissible iterate degree `d^n`.
    #[arg(long, default_value_t = 5000)]
    pub cap: u64,
}

#[derive(Args, Debug)]
pub struct HeightArgs {
    /// Map specification (TOML).
    #[arg(long, conflicts_with_all = ["elliptic", "jensen"])]
    pub map: Option<PathBuf>,
    /// Duplication map of `y^2 = x^3 + A x + B`.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true, conflicts_with = "jensen")]
    pub elliptic: Option<Vec<String>>,
    /// The squaring map.
    #[arg(long)]
    pub jensen: bool,
    #[arg(long)]
    pub prime: Option<u64>,
    /// Base point, `num/den`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    #[arg(long, default_value_t = 5000)]
    pub cap: u64,
}

#[derive(Args, Debug)]
pub struct MonitorArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    #[arg(long, default_value_t = 5000)]
    pub cap: u64,
}

#[derive(Args, Debug)]
pub struct LocalArgs {
    /// Series specification (TOML).
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub prime: Option<u64>,
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    /// Starting truncation order; doubled for inconclusive periods.
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Args, Debug)]
pub struct JensenArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    #[arg(long, default_value_t = 5000)]
    pub cap: u64,
}

#[derive(Args, Debug)]
pub struct EllipticArgs {
    #[arg(allow_hyphen_values = true)]
    pub a: String,
    #[arg(allow_hyphen_values = true)]
    pub b: String,
    #[arg(long)]
    pub prime: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 5000)]
    pub cap: u64,
}

/// A rational given as `"num/den"`, a bare integer string, or a TOML integer.
#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
enum RatField {
    Text(String),
    Int(i64),
}

impl RatField {
    fn parse(&self) -> Result<BigRational, Failure> {
        match self {
            RatField::Text(s) => parse_rational(s).map_err(Failure::from),
            RatField::Int(n) => Ok(BigRational::from_integer(BigInt::from(*n))),
        }
    }
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct MapSpec {
    prime: Option<u64>,
    degree: Option<usize>,
    #[serde(rename = "F")]
    f: Option<Vec<RatField>>,
    #[serde(rename = "G")]
    g: Option<Vec<RatField>>,
    a: Option<RatField>,
    b: Option<RatField>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct SeriesSpec {
    prime: Option<u64>,
    order: usize,
    coefficients: Vec<RatField>,
}

/// Why a command stopped; each maps to one exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    BadReduction(String),
    DegreeCap { degree: String, cap: u64 },
    Periodic(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BadReduction(v) => Failure::BadReduction(format!("bad, v(Res)={v}")),
            Error::Periodic(n) => Failure::Periodic(format!("periodic, period {n}")),
            Error::Torsion(n) => Failure::Periodic(format!("torsion, level {n}")),
            Error::NotPrime(_)
            | Error::Invalid(_)
            | Error::DegreeMismatch(..)
            | Error::ZeroForms
            | Error::ZeroPoint
            | Error::NegativeValuation { .. } => Failure::Input(e.to_string()),
            other => Failure::Math(other),
        }
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) | Failure::Math(_) => 1,
            Failure::BadReduction(_) => 3,
            Failure::DegreeCap { .. } => 4,
            Failure::Periodic(_) => 5,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(m) | Failure::BadReduction(m) | Failure::Periodic(m) => m.clone(),
            Failure::DegreeCap { degree, cap } => format!("iterate degree {degree} exceeds the cap {cap}"),
            Failure::Math(e) => e.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Text(String),
    Int(i64),
    Bool(bool),
    Float(f64),
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Text(t) => s.serialize_str(t),
            Value::Int(n) => s.serialize_i64(*n),
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Float(f) => s.serialize_f64(*f),
        }
    }
}

impl Value {
    fn csv_field(&self) -> String {
        match self {
            Value::Text(t) => t.clone(),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Float(f) => format!("{f:.6}"),
        }
    }
}

/// An output record; fields keep insertion order.
#[derive(Clone, Debug, Default)]
struct Record(Vec<(&'static str, Value)>);

impl Record {
    fn kind(kind: &str) -> Self {
        Record(vec![("kind", Value::Text(kind.into()))])
    }

    fn text(mut self, k: &'static str, v: impl Into<String>) -> Self {
        self.0.push((k, Value::Text(v.into())));
        self
    }

    fn rat(self, k: &'static str, v: &BigRational) -> Self {
        self.text(k, fmt_rational(v))
    }

    fn int(mut self, k: &'static str, v: i64) -> Self {
        self.0.push((k, Value::Int(v)));
        self
    }

    fn flag(mut self, k: &'static str, v: bool) -> Self {
        self.0.push((k, Value::Bool(v)));
        self
    }

    fn float(mut self, k: &'static str, v: f64) -> Self {
        self.0.push((k, Value::Float(v)));
        self
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

struct Output {
    records: Vec<Record>,
    ln_prime: Option<f64>,
}

impl Output {
    fn new(ln: bool, p: Prime) -> Self {
        Output {
            records: Vec::new(),
            ln_prime: ln.then(|| (p.get() as f64).ln()),
        }
    }

    fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    /// Appends `k` (exact, units of log p) and, if requested, `k_ln`.
    fn log_value(&self, r: Record, k: &'static str, kl: &'static str, v: &BigRational) -> Record {
        let r = r.rat(k, v);
        match self.ln_prime {
            Some(l) => r.float(kl, v.to_f64().unwrap_or(f64::NAN) * l),
            None => r,
        }
    }
}

fn write_records(records: &[Record], format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Jsonl => {
            for r in records {
                let line = serde_json::to_string(r).map_err(std::io::Error::other)?;
                writeln!(out, "{line}")?;
            }
        }
        Format::Csv => {
            // one header per run of records with the same fields, runs
            // separated by a blank line
            let mut start = 0;
            while start < records.len() {
                let keys: Vec<&str> = records[start].0.iter().map(|(k, _)| *k).collect();
                let same = |r: &Record| r.0.len() == keys.len() && r.0.iter().zip(&keys).all(|((k, _), j)| k == j);
                let end = start + records[start..].iter().take_while(|r| same(r)).count();
                if start > 0 {
                    writeln!(out)?;
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&keys)?;
                for r in &records[start..end] {
                    w.write_record(r.0.iter().map(|(_, v)| v.csv_field()))?;
                }
                let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
                out.write_all(&bytes)?;
                start = end;
            }
        }
    }
    Ok(())
}

/// Parses arguments and runs one command, writing records to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 1;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    let (records, code) = match execute(&cli) {
        Ok(result) => result,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            return f.code();
        }
    };
    if let Err(e) = write_records(&records, cli.format, out) {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    code
}

/// Entry point for the binary.
pub fn main_entry() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    code
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Input(format!("{}: {}", path.display(), e.message())))
}

fn resolve_prime(flag: Option<u64>, spec: Option<u64>) -> Result<Prime, Failure> {
    let p = flag.or(spec).ok_or_else(|| Failure::Input("no prime given".into()))?;
    Ok(Prime::new(p)?)
}

fn parse_x(s: &str) -> Result<BigRational, Failure> {
    Ok(parse_rational(s)?)
}

fn load_map(args: &MapArgs) -> Result<FormPair, Failure> {
    let spec: MapSpec = read_toml(&args.map)?;
    let p = resolve_prime(args.prime, spec.prime)?;
    match (&spec.f, &spec.g, &spec.a, &spec.b) {
        (Some(f), Some(g), None, None) => {
            let f: Vec<BigRational> = f.iter().map(RatField::parse).collect::<Result<_, _>>()?;
            let g: Vec<BigRational> = g.iter().map(RatField::parse).collect::<Result<_, _>>()?;
            if let Some(d) = spec.degree {
                for v in [&f, &g] {
                    if v.len() != d + 1 {
                        return Err(Error::DegreeMismatch(d, v.len().saturating_sub(1)).into());
                    }
                }
            }
            Ok(FormPair::new(&f, &g, p)?)
        }
        (None, None, Some(a), Some(b)) => Ok(FormPair::duplication(&a.parse()?, &b.parse()?, p)?),
        _ => Err(Failure::Input(
            "map specification needs either F and G, or a and b".into(),
        )),
    }
}

fn check_cap(d: usize, n: usize, cap: u64) -> Result<(), Failure> {
    let deg = num_traits::pow(BigInt::from(d), n);
    if deg > BigInt::from(cap) {
        return Err(Failure::DegreeCap {
            degree: deg.to_string(),
            cap,
        });
    }
    Ok(())
}

fn check_n(n_max: usize) -> Result<(), Failure> {
    if n_max == 0 {
        return Err(Failure::Input("--n-max must be at least 1".into()));
    }
    Ok(())
}

fn join_coeffs(c: &[BigRational]) -> String {
    c.iter().map(fmt_rational).collect::<Vec<_>>().join(" ")
}

fn fmt_multiset(r: &RootValuations) -> String {
    r.pairs()
        .iter()
        .map(|(v, m)| format!("{}:{m}", fmt_rational(v)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn fmt_opt(v: Option<&BigRational>) -> String {
    v.map(fmt_rational).unwrap_or_else(|| "none".into())
}

fn fmt_opt_val(v: Option<&Valuation>) -> String {
    v.map(Valuation::to_string).unwrap_or_else(|| "none".into())
}

type Outcome = Result<(Vec<Record>, i32), Failure>;

fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check(a) => cmd_check(a, cli.ln),
        Command::Periodic(a) => cmd_periodic(a, cli.ln),
        Command::Height(a) => cmd_height(a, cli.ln),
        Command::Monitor(a) => cmd_monitor(a, cli.ln),
        Command::Local(a) => cmd_local(a, cli.ln),
        Command::Jensen(a) => trace_jensen(a.prime, &a.x, a.n_max, a.cap, cli.ln),
        Command::Elliptic(a) => trace_elliptic(&a.a, &a.b, a.prime, &a.x, a.n_max, a.cap, cli.ln),
    }
}

fn cmd_check(args: &MapArgs, _ln: bool) -> Outcome {
    let phi = load_map(args)?;
    let d = phi.degree();
    let cert = phi.good_reduction();
    let verdict = if cert.good { "good" } else { "bad" };
    let rec = Record::kind("check")
        .int("prime", phi.prime().get() as i64)
        .int("degree", phi.form_degree() as i64)
        .text("resultant", cert.resultant.to_string())
        .text("resultant_valuation", cert.valuation.to_string())
        .text("verdict", verdict)
        .flag("coprime", d.is_ok())
        .text("summary", format!("{verdict}, v(Res)={}", short_val(&cert.valuation)));
    Ok((vec![rec], if cert.good { 0 } else { 3 }))
}

/// Integer valuations without the `/1`, for human-readable summaries.
fn short_val(v: &Valuation) -> String {
    match v.finite() {
        Some(r) if r.is_integer() => r.numer().to_string(),
        _ => v.to_string(),
    }
}

fn nonzero_root_valuations(coeffs: &[BigRational], p: Prime) -> Result<RootValuations, Failure> {
    let vp_poly = ValuedPoly::from_coeffs(coeffs, p);
    if vp_poly.is_empty() {
        return Ok(RootValuations::default());
    }
    Ok(root_valuations(&lower_hull(&vp_poly)?))
}

fn cmd_periodic(args: &PeriodicArgs, _ln: bool) -> Outcome {
    check_n(args.n_max)?;
    let phi = load_map(&args.map)?;
    check_cap(phi.form_degree(), args.n_max, args.cap)?;
    phi.require_good_reduction()?;
    let p = phi.prime();
    let all = phi.periodic_polynomials(args.n_max)?;
    let least = phi.least_period_parts(args.n_max)?;
    let mut records = Vec::new();
    for (pn, q) in all.iter().zip(&least) {
        let roots = nonzero_root_valuations(q.coeffs(), p)?;
        records.push(
            Record::kind("periodic")
                .int("n", pn.n as i64)
                .int("degree", pn.degree() as i64)
                .text("p_n", join_coeffs(pn.coeffs()))
                .int("least_degree", q.degree() as i64)
                .text("least_part", join_coeffs(q.coeffs()))
                .text("root_valuations", fmt_multiset(&roots)),
        );
    }
    Ok((records, 0))
}

fn trace_records(trace: &ConvergenceTrace, out: &mut Output) {
    for row in &trace.rows {
        let r = Record::kind("trace").int("n", row.n as i64);
        let r = out.log_value(r, "value", "value_ln", &row.value);
        let r = out.log_value(r, "error", "error_ln", &row.error);
        out.push(r);
    }
    let r = out.log_value(Record::kind("limit"), "limit", "limit_ln", &trace.limit);
    out.push(r);
}

fn cmd_height(args: &HeightArgs, ln: bool) -> Outcome {
    check_n(args.n_max)?;
    if args.jensen {
        let p = args
            .prime
            .ok_or_else(|| Failure::Input("--jensen needs --prime".into()))?;
        return trace_jensen(p, &args.x, args.n_max, args.cap, ln);
    }
    if let Some(ab) = &args.elliptic {
        let p = args
            .prime
            .ok_or_else(|| Failure::Input("--elliptic needs --prime".into()))?;
        return trace_elliptic(&ab[0], &ab[1], p, &args.x, args.n_max, args.cap, ln);
    }
    let map = args
        .map
        .clone()
        .ok_or_else(|| Failure::Input("height needs --map, --elliptic A B or --jensen".into()))?;
    let phi = load_map(&MapArgs { map, prime: args.prime })?;
    check_cap(phi.form_degree(), args.n_max, args.cap)?;
    let x = parse_x(&args.x)?;
    let trace = height_limit_trace(&x, &phi, args.n_max)?;
    let mut out = Output::new(ln, phi.prime());
    trace_records(&trace, &mut out);
    Ok((out.records, 0))
}

fn trace_jensen(p: u64, x: &str, n_max: usize, cap: u64, ln: bool) -> Outcome {
    check_n(n_max)?;
    check_cap(2, n_max, cap)?;
    let p = Prime::new(p)?;
    let trace = jensen_sum(&parse_x(x)?, p, n_max)?;
    let mut out = Output::new(ln, p);
    trace_records(&trace, &mut out);
    Ok((out.records, 0))
}

fn trace_elliptic(a: &str, b: &str, p: u64, x: &str, n_max: usize, cap: u64, ln: bool) -> Outcome {
    check_n(n_max)?;
    check_cap(4, n_max, cap)?;
    let p = Prime::new(p)?;
    let (a, b) = (parse_rational(a)?, parse_rational(b)?);
    let trace = elliptic_height_trace(&a, &b, &parse_x(x)?, p, n_max)?;
    let mut out = Output::new(ln, p);
    trace_records(&trace, &mut out);
    Ok((out.records, 0))
}

fn cmd_monitor(args: &MonitorArgs, ln: bool) -> Outcome {
    check_n(args.n_max)?;
    let phi = load_map(&args.map)?;
    check_cap(phi.form_degree(), args.n_max, args.cap)?;
    let x = parse_x(&args.x)?;
    let m = repulsion_monitor(&x, &phi, args.n_max)?;
    let mut out = Output::new(ln, phi.prime());
    for row in &m.rows {
        out.push(
            Record::kind("monitor")
                .int("n", row.n as i64)
                .rat("v", &row.v)
                .rat("witness", &row.witness)
                .rat("running_max", &row.running_max),
        );
    }
    let mut code = 0;
    if m.growing_tail() {
        code = 7;
    }
    let local = match &m.local {
        None => "none".to_string(),
        Some(LocalCrossCheck::Degenerate) => "degenerate".to_string(),
        Some(LocalCrossCheck::Attracting { isolated, consistent }) => {
            if !consistent {
                code = 7;
            }
            format!("attracting isolated={isolated} consistent={consistent}")
        }
        Some(LocalCrossCheck::Repelling { reports, consistent }) => {
            if !consistent || reports.iter().any(|r| r.outcome == BoundOutcome::Violated) {
                code = 7;
            } else if code == 0 && reports.iter().any(|r| r.outcome == BoundOutcome::Inconclusive) {
                code = 6;
            }
            format!("unit-multiplier consistent={consistent}")
        }
    };
    let summary = Record::kind("monitor_summary").text("kappa_valuation", fmt_opt(m.running_max.as_ref()));
    let summary = match (&m.running_max, out.ln_prime) {
        (Some(r), Some(l)) => summary.float("kappa_ln", -r.to_f64().unwrap_or(f64::NAN) * l),
        _ => summary,
    };
    out.push(
        summary
            .text(
                "period",
                m.period.map(|n| n.to_string()).unwrap_or_else(|| "none".into()),
            )
            .flag("growing", m.growing_tail())
            .text("local", local),
    );
    Ok((out.records, code))
}

fn cmd_local(args: &LocalArgs, _ln: bool) -> Outcome {
    check_n(args.n_max)?;
    let spec: SeriesSpec = read_toml(&args.series)?;
    let p = resolve_prime(args.prime, spec.prime)?;
    let coeffs: Vec<BigRational> = spec
        .coefficients
        .iter()
        .map(RatField::parse)
        .collect::<Result<_, _>>()?;
    let order = args.order.unwrap_or(spec.order);
    if coeffs.len() > order {
        return Err(Failure::Input(format!(
            "{} coefficients exceed order {order}",
            coeffs.len()
        )));
    }
    let first = TruncatedSeries::polynomial(&coeffs, order, p)?;
    let a1v = vp(&first.multiplier(), p);
    if a1v > Valuation::zero() {
        let isolated = attracting_check(&first, args.n_max)?;
        let rec = Record::kind("attracting")
            .text("multiplier_valuation", a1v.to_string())
            .int("n_max", args.n_max as i64)
            .flag("isolated", isolated);
        return Ok((vec![rec], if isolated { 0 } else { 7 }));
    }
    let cap = DEFAULT_ORDER_CAP.max(order);
    let reports = bound_reports(|o| TruncatedSeries::polynomial(&coeffs, o, p), args.n_max, order, cap)?;
    let mut records = Vec::new();
    for r in &reports {
        let outcome = match r.outcome {
            BoundOutcome::Satisfied => "satisfied",
            BoundOutcome::Violated => "violated",
            BoundOutcome::Inconclusive => "inconclusive",
        };
        records.push(
            Record::kind("bound")
                .int("n", r.n as i64)
                .text("kappa_valuation", fmt_opt_val(r.kappa_val.as_ref()))
                .text("extremal_valuation", fmt_opt(r.extremal_valuation.as_ref()))
                .text("bound", fmt_opt(r.bound_val.as_ref()))
                .text("outcome", outcome)
                .int("order", r.order as i64)
                .text("roots", fmt_multiset(&r.roots)),
        );
    }
    let violated = reports.iter().any(|r| r.outcome == BoundOutcome::Violated);
    let inconclusive = reports
        .iter()
        .filter(|r| r.outcome == BoundOutcome::Inconclusive)
        .count();
    let kappa = reports.iter().find_map(|r| r.kappa_val.clone());
    records.push(
        Record::kind("local_summary")
            .text("kappa_valuation", fmt_opt_val(kappa.as_ref()))
            .int("inconclusive", inconclusive as i64)
            .flag("violated", violated),
    );
    let code = if violated {
        7
    } else if inconclusive > 0 {
        6
    } else {
        0
    };
    Ok((records, code))
}
