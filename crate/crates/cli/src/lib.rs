//! IO side of the density toolkit: input parsing, the table ledger,
//! parallel empirical counts and text/JSON/CSV rendering.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use lucas_density_core::density::{self, DensityResult, Interval, NormalForm};
use lucas_density_core::lucasrank::{self, Counts, EmpiricalReport, RankRecord, SpfTable};
use lucas_density_core::quadfield::{self, context_from_gamma, make_context, power_index, QuadElem, SequenceContext};
use lucas_density_core::{Error as CoreError, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CONSISTENCY: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            _ => EXIT_CONSISTENCY,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::OracleMismatch(_) | CoreError::UnreachableCase(_) | CoreError::PrecisionExhausted => {
                CliError::Consistency(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Either a Lucas pair or a root quotient `u + v√radicand`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputSpec {
    Pair { a1: i64, a2: i64 },
    Gamma { u: Rational, v: Rational, radicand: i64 },
}

impl InputSpec {
    pub fn context(&self) -> CliResult<SequenceContext> {
        Ok(match self {
            InputSpec::Pair { a1, a2 } => make_context(*a1, *a2)?,
            InputSpec::Gamma { u, v, radicand } => context_from_gamma(u.clone(), v.clone(), *radicand)?,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            InputSpec::Pair { a1, a2 } => format!("U({a1}, {a2})"),
            InputSpec::Gamma { u, v, radicand } => format!("{u} + {v}·√{radicand}"),
        }
    }
}

pub fn parse_rational(s: &str) -> CliResult<Rational> {
    let r = Rational::from_str(s.trim()).map_err(|_| CliError::Invalid(format!("cannot parse rational {s:?}")))?;
    Ok(r)
}

/// Decimal expansion truncated to `places` digits.
pub fn truncate_decimal(q: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let neg = q.is_negative();
    let a = q.abs();
    let n = (a.numer() * &scale) / a.denom();
    let int = &n / &scale;
    let frac = (&n % &scale).to_string();
    let pad = "0".repeat(places as usize - frac.len());
    format!("{}{int}.{pad}{frac}", if neg { "-" } else { "" })
}

pub fn to_f64(q: &Rational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

fn int_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

pub fn rational_json(q: &Rational) -> Value {
    json!({ "num": int_json(q.numer()), "den": int_json(q.denom()) })
}

/// Inverse of [`rational_json`].
pub fn rational_from_json(v: &Value) -> Option<Rational> {
    let part = |k: &str| -> Option<BigInt> {
        match &v[k] {
            Value::Number(n) => n.as_i64().map(BigInt::from),
            Value::String(s) => BigInt::from_str(s).ok(),
            _ => None,
        }
    };
    let den = part("den")?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(part("num")?, den))
}

pub fn density_json(res: &DensityResult) -> Value {
    let trace: Vec<Value> = res
        .trace
        .iter()
        .map(|t| {
            json!({
                "d": t.d, "e": t.e, "h": t.h, "nu": t.nu,
                "coeff": rational_json(&(&t.coeff_plus + &t.coeff_minus)),
                "coeff_plus": rational_json(&t.coeff_plus),
                "coeff_minus": rational_json(&t.coeff_minus),
                "value": rational_json(&t.value),
            })
        })
        .collect();
    json!({
        "delta": rational_json(&res.delta),
        "delta_plus": rational_json(&res.delta_plus),
        "delta_minus": rational_json(&res.delta_minus),
        "case": res.case_tag.name(),
        "route": res.echo.route.iter().map(|t| t.name()).collect::<Vec<_>>(),
        "h": res.echo.h,
        "zeta": res.echo.zeta,
        "trace": trace,
    })
}

pub fn density_text(res: &DensityResult) -> String {
    let mut s = String::new();
    for (label, q) in [("delta", &res.delta), ("delta+", &res.delta_plus), ("delta-", &res.delta_minus)] {
        let _ = writeln!(s, "{label:<7} {q} ({})", truncate_decimal(q, 6));
    }
    let _ = writeln!(s, "case    {}", res.case_tag);
    s
}

pub fn density_csv(res: &DensityResult) -> String {
    format!(
        "case,delta,delta_plus,delta_minus\n{},{},{},{}\n",
        res.case_tag, res.delta, res.delta_plus, res.delta_minus
    )
}

/// Oracle enclosure of the closed form. Reduced routes are checked on the
/// `h = h(1)` form at the reduced level.
pub fn oracle_check(gamma: &QuadElem, d: u64, res: &DensityResult, cutoff: u64) -> CliResult<(Rational, Interval)> {
    let (target, iv) = match &res.echo.reduction {
        Some(red) => {
            let nf = NormalForm::new(res.echo.normal_form.as_ref().expect("reduced routes record their normal form"))?;
            let iv = if red.d_prime == 1 {
                Interval { lo: red.base.clone(), hi: red.base.clone() }
            } else {
                density::series_oracle(&nf, red.d_prime, cutoff)?
            };
            (red.base.clone(), iv)
        }
        None => (res.delta.clone(), density::oracle_for(gamma, d, cutoff)?),
    };
    if !iv.contains(&target) {
        return Err(CliError::Consistency(format!("{target} lies outside [{}, {}]", iv.lo, iv.hi)));
    }
    Ok((target, iv))
}

/// Every level the closed form touched, as a narrative.
pub fn explain_text(gamma: &QuadElem, d: u64, res: &DensityResult) -> CliResult<String> {
    let mut s = String::new();
    let pix = power_index(gamma)?;
    let _ = writeln!(s, "gamma   {gamma}");
    let _ = writeln!(s, "d       {d}");
    if d == 1 {
        let _ = writeln!(s, "trivial: density 1");
        return Ok(s);
    }
    let names: Vec<String> = (0..pix.table.len() as u32)
        .map(|k| format!("{}:{}", quadfield::root_of_unity_name(pix.disc, k), pix.table[k as usize]))
        .collect();
    let _ = writeln!(s, "h table {}", names.join(" "));
    let _ = writeln!(s, "h = {}, zeta* = {}", pix.h, pix.zeta_name());
    let route: Vec<&str> = res.echo.route.iter().map(|t| t.name()).collect();
    let _ = writeln!(s, "route   {}", route.join(" -> "));
    if let Some(g) = &res.echo.normal_form {
        let nf = NormalForm::new(g)?;
        let _ = writeln!(s, "formulas run on {g} (h = {})", nf.h());
        let _ = writeln!(s, "Q = {}", u8::from(nf.sqrt.q_flag));
        if let Some(sp) = &nf.sqrt.split {
            let _ = writeln!(s, "c = {}, Delta1 = {}, Delta2 = {}", sp.c, sp.delta1, sp.delta2);
        }
        if let Some(c) = &nf.conductor {
            let _ = writeln!(s, "conductor f(L) = {}", c.value);
        }
    }
    for e in &res.echo.e_values {
        let _ = writeln!(s, "  at d={}: {} = {}", e.at_d, e.name, e.value);
    }
    if let Some(k) = res.echo.k {
        let _ = writeln!(s, "k = {k}");
    }
    if let Some(m) = res.echo.m {
        let _ = writeln!(s, "m = {m}");
    }
    if let Some(red) = &res.echo.reduction {
        let _ = writeln!(s, "d' = {}, base delta(d') = {}, factor {}", red.d_prime, red.base, red.factor);
    }
    let _ = writeln!(s, "terms (coefficient in delta+, delta-):");
    for t in &res.trace {
        let _ = writeln!(
            s,
            "  S_{{{},{},{}}}({}) = {}  [{}, {}]",
            t.d, t.e, t.h, t.nu, t.value, t.coeff_plus, t.coeff_minus
        );
    }
    s.push_str(&density_text(res));
    Ok(s)
}

// ---------------------------------------------------------------------------
// Empirical runs

const BLOCK: u64 = 1 << 15;

/// Counts over `p ≤ x` in parallel blocks; records come back in `p` order
/// when `keep` is set.
pub fn empirical(
    ctx: &SequenceContext,
    d: u64,
    x: u64,
    spf: &SpfTable,
    keep: bool,
) -> CliResult<(Counts, Vec<RankRecord>)> {
    if x > spf.limit() {
        return Err(CliError::Invalid(format!("limit {x} exceeds the sieve size {}", spf.limit())));
    }
    let starts: Vec<u64> = (0..=x / BLOCK).map(|i| i * BLOCK).collect();
    let parts: Vec<(Counts, Vec<RankRecord>)> = starts
        .par_iter()
        .map(|&lo| {
            let mut recs = Vec::new();
            let c = lucasrank::scan_block(ctx, d, lo..(lo + BLOCK).min(x + 1), spf, |r| {
                if keep {
                    recs.push(*r)
                }
            })?;
            Ok((c, recs))
        })
        .collect::<Result<_, CoreError>>()?;
    let mut total = Counts::default();
    let mut records = Vec::new();
    for (c, r) in parts {
        total = total.merge(c);
        records.extend(r);
    }
    Ok((total, records))
}

pub fn write_ranks(path: &Path, records: &[RankRecord]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["p", "rank", "jacobi", "divisible"])?;
    for r in records {
        w.write_record([r.p.to_string(), r.rank.to_string(), r.jacobi.to_string(), u8::from(r.divisible).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `(deviation, tolerance, pass)` of a report against its reference.
pub fn judge(report: &EmpiricalReport) -> Option<(f64, f64, bool)> {
    let delta = to_f64(report.reference_delta.as_ref()?);
    let dev = (to_f64(&report.ratio()) - delta).abs();
    let tol = lucasrank::tolerance(delta, report.counts.eligible);
    Some((dev, tol, dev <= tol))
}

pub fn report_json(report: &EmpiricalReport, runtime_s: f64) -> Value {
    let verdict = judge(report);
    json!({
        "a1": report.a1, "a2": report.a2, "d": report.d, "x": report.x,
        "eligible": report.counts.eligible,
        "counted": report.counts.counted,
        "counted_plus": report.counts.counted_plus,
        "counted_minus": report.counts.counted_minus,
        "ratio": to_f64(&report.ratio()),
        "ratio_plus": to_f64(&report.ratio_plus()),
        "ratio_minus": to_f64(&report.ratio_minus()),
        "reference": report.reference_delta.as_ref().map(rational_json),
        "deviation": verdict.map(|v| v.0),
        "tolerance": verdict.map(|v| v.1),
        "pass": verdict.map(|v| v.2),
        "runtime_s": runtime_s,
    })
}

pub fn report_text(report: &EmpiricalReport, runtime_s: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "primes  {} eligible up to {}", report.counts.eligible, report.x);
    let _ = writeln!(
        s,
        "count   {} ({} with (D/p)=1, {} with (D/p)=-1)",
        report.counts.counted, report.counts.counted_plus, report.counts.counted_minus
    );
    let _ = writeln!(s, "ratio   {:.6}", to_f64(&report.ratio()));
    if let Some(delta) = &report.reference_delta {
        let _ = writeln!(s, "exact   {delta} ({})", truncate_decimal(delta, 6));
    }
    if let Some((dev, tol, pass)) = judge(report) {
        let _ = writeln!(s, "dev     {dev:.6} (tolerance {tol:.6}) {}", if pass { "PASS" } else { "FAIL" });
    }
    let _ = writeln!(s, "time    {runtime_s:.2}s");
    s
}

// ---------------------------------------------------------------------------
// Ledger

/// One `(γ, d)` entry of the reference ledger.
#[derive(Clone, Debug)]
pub struct LedgerRow {
    pub table: u8,
    pub u: &'static str,
    pub v: &'static str,
    pub radicand: i64,
    pub d: u64,
    /// Expected exact value (with the one correction applied).
    pub expected: (i64, i64),
    /// Value as printed, where it differs.
    pub printed: Option<(i64, i64)>,
    /// Reference prime-count ratio at `x = 10^7`.
    pub experimental: f64,
    pub h: u64,
    pub zeta: &'static str,
    pub conductor: Option<u64>,
}

impl LedgerRow {
    pub fn spec(&self) -> InputSpec {
        InputSpec::Gamma {
            u: parse_rational(self.u).expect("ledger literal"),
            v: parse_rational(self.v).expect("ledger literal"),
            radicand: self.radicand,
        }
    }

    pub fn gamma(&self) -> QuadElem {
        self.spec().context().expect("ledger row is valid").gamma
    }

    pub fn expected(&self) -> Rational {
        lucas_density_core::ratio(self.expected.0, self.expected.1)
    }

    pub fn note(&self) -> Option<String> {
        self.printed.map(|(n, d)| {
            format!("printed as {n}/{d}; numeric column and closed form give {}/{}", self.expected.0, self.expected.1)
        })
    }
}

macro_rules! row {
    ($t:expr, $u:expr, $v:expr, $r:expr, $d:expr, $e:expr, $x:expr, $h:expr, $z:expr, $c:expr) => {
        LedgerRow { table: $t, u: $u, v: $v, radicand: $r, d: $d, expected: $e, printed: None, experimental: $x, h: $h, zeta: $z, conductor: $c }
    };
}

pub fn ledger() -> Vec<LedgerRow> {
    let mut rows = vec![
        row!(1, "3", "1", 8, 6, (17, 64), 0.265670, 2, "1", None),
        row!(1, "3", "1", 8, 20, (25, 288), 0.086782, 2, "1", None),
        row!(1, "-27/2", "-5/2", 29, 8, (1, 6), 0.166473, 2, "-1", None),
        row!(1, "-27/2", "-5/2", 29, 10, (5, 36), 0.139166, 2, "-1", None),
        row!(1, "17/32", "7/32", -15, 10, (5, 288), 0.017287, 4, "1", None),
        row!(1, "17/32", "7/32", -15, 30, (5, 384), 0.013017, 4, "1", None),
        row!(2, "-3/5", "2/5", -4, 8, (1, 3), 0.333427, 1, "1", Some(20)),
        row!(2, "-3/5", "2/5", -4, 10, (5, 72), 0.069279, 1, "1", Some(20)),
        row!(2, "48/50", "7/50", -4, 10, (235, 1152), 0.203844, 2, "i", Some(40)),
        row!(2, "48/50", "7/50", -4, 24, (1, 16), 0.062553, 2, "i", Some(40)),
        row!(2, "-240/338", "-119/338", -4, 26, (611, 8064), 0.075771, 2, "i", Some(208)),
        row!(2, "-240/338", "-119/338", -4, 28, (35, 288), 0.121457, 2, "i", Some(208)),
        row!(3, "-13/14", "3/14", -3, 3, (3, 4), 0.750058, 1, "1", Some(7)),
        row!(3, "-13/14", "3/14", -3, 14, (35, 288), 0.121231, 1, "1", Some(7)),
        row!(3, "683/686", "37/686", -3, 9, (1, 12), 0.083407, 3, "omega^2", Some(63)),
        row!(3, "683/686", "37/686", -3, 42, (1225, 10368), 0.117806, 3, "omega^2", Some(63)),
        row!(3, "1031/1369", "-520/1369", -3, 6, (5, 8), 0.624809, 2, "-1", Some(333)),
        row!(3, "1031/1369", "-520/1369", -3, 111, (407, 16416), 0.024823, 2, "-1", Some(333)),
    ];
    rows[10].printed = Some((661, 8064));
    rows
}

/// Outcome of recomputing one ledger row.
#[derive(Clone, Debug)]
pub struct LedgerCheck {
    pub row: LedgerRow,
    pub got: Rational,
    pub case: String,
    pub matches: bool,
    pub empirical: Option<EmpiricalReport>,
}

pub fn check_ledger(limit: Option<u64>) -> CliResult<Vec<LedgerCheck>> {
    let spf = limit.map(|x| lucasrank::spf_sieve(x + 1)).transpose()?;
    let mut out = Vec::new();
    for row in ledger() {
        let ctx = row.spec().context()?;
        let res = density::dispatch(&ctx.gamma, row.d)?;
        let empirical = match (&spf, limit) {
            (Some(spf), Some(x)) => {
                let (counts, _) = empirical(&ctx, row.d, x, spf, false)?;
                Some(EmpiricalReport::new(&ctx, row.d, x, counts, Some(res.delta.clone())))
            }
            _ => None,
        };
        out.push(LedgerCheck {
            matches: res.delta == row.expected(),
            got: res.delta,
            case: res.case_tag.name().to_string(),
            row,
            empirical,
        });
    }
    Ok(out)
}

pub fn ledger_json(checks: &[LedgerCheck]) -> Value {
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| {
            let mut v = json!({
                "table": c.row.table,
                "gamma": { "u": c.row.u, "v": c.row.v, "radicand": c.row.radicand },
                "d": c.row.d,
                "expected": rational_json(&c.row.expected()),
                "computed": rational_json(&c.got),
                "case": c.case,
                "match": c.matches,
                "reference_exp": c.row.experimental,
                "note": c.row.note(),
            });
            if let Some(rep) = &c.empirical {
                v["empirical"] = report_json(rep, 0.0);
            }
            v
        })
        .collect();
    json!({ "matches": checks.iter().filter(|c| c.matches).count(), "rows": rows })
}

pub fn ledger_text(checks: &[LedgerCheck]) -> String {
    let mut s = String::new();
    for c in checks {
        let _ = write!(
            s,
            "T{} {:>9} {:>9} sqrt({:>3}) d={:<4} {:>12} {:<8} {}",
            c.row.table,
            c.row.u,
            c.row.v,
            c.row.radicand,
            c.row.d,
            c.got.to_string(),
            truncate_decimal(&c.got, 6),
            if c.matches { "ok" } else { "MISMATCH" }
        );
        if let Some(rep) = &c.empirical {
            let (dev, _, pass) = judge(rep).expect("reference set");
            let _ = write!(s, "  exp {:.6} dev {dev:.6} {}", to_f64(&rep.ratio()), if pass { "pass" } else { "FAIL" });
        }
        if let Some(n) = c.row.note() {
            let _ = write!(s, "  ({n})");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "{}/{} exact matches", checks.iter().filter(|c| c.matches).count(), checks.len());
    s
}

pub fn ledger_csv(checks: &[LedgerCheck]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["table", "u", "v", "radicand", "d", "expected", "computed", "case", "match"])?;
    for c in checks {
        w.write_record([
            c.row.table.to_string(),
            c.row.u.to_string(),
            c.row.v.to_string(),
            c.row.radicand.to_string(),
            c.row.d.to_string(),
            c.row.expected().to_string(),
            c.got.to_string(),
            c.case.clone(),
            c.matches.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
