//! Subcommand implementations. Each one computes a serializable result and
//! renders it in the requested format.

use std::path::PathBuf;

use robin_core::abundant::{abundant_below, alpha_p, verify_xk_lemma, x_k, Parity, XkLemmaReport};
use robin_core::constants::{self, NamedConstant, CONSTANT_NAMES};
use robin_core::criteria::{
    chain_check, lagarias_check, lagarias_scan, robin_check, robin_scan, LemmaId, LemmaReport, SampleCheck,
    SampleSpec, ScanReport, ThresholdKind,
};
use robin_core::divisors::{factorize, is_prime_u64};
use robin_core::growth::{build_ca_like, curve_csv, curve_gnuplot, emit_g_curve, max_k, CaLikeResult, CaLikeVerdict, GRow};
use robin_core::{AbundantRecord, CheckReport, Evaluator, Factorization, PrimeTable, RealExpr, RealInterval, Verdict};
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::render::{self, aligned, csv, Format, Sink};
use crate::{CmdResult, Command, Failure, Global, ScanKind, Status, Subject};

/// The first odd colossally abundant number satisfying the odd analogue.
pub const C0: &str = "18565284664427130919514350125";

pub struct Context {
    pub ev: Evaluator,
    sieve_cache: Option<PathBuf>,
}

impl Context {
    pub fn new(g: &Global) -> Self {
        Context { ev: Evaluator::new(g.precision_ceiling), sieve_cache: g.sieve_cache.clone() }
    }

    fn table(&self, limit: u64) -> Result<PrimeTable, Failure> {
        Ok(match &self.sieve_cache {
            Some(p) => PrimeTable::load_or_build(limit, p)?,
            None => PrimeTable::sieve(limit)?,
        })
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn verdict_status(v: Verdict) -> Status {
    match v {
        Verdict::Satisfies => Status::Ok,
        Verdict::Violates => Status::Violation,
        Verdict::Unresolved => Status::Unresolved,
    }
}

/// Accepts plain decimal, `10^k` and `1e7`-style integers.
pub fn parse_integer(s: &str) -> Result<Integer, Failure> {
    let s = s.trim().replace('_', "");
    let bad = || usage(format!("not an integer: {s:?}"));
    if let Some((b, e)) = s.split_once('^') {
        let b: Integer = b.parse().map_err(|_| bad())?;
        let e: u32 = e.parse().map_err(|_| bad())?;
        return Ok(b.pow(e));
    }
    if let Some((m, e)) = s.split_once(['e', 'E']) {
        let m: Integer = m.parse().map_err(|_| bad())?;
        let e: u32 = e.parse().map_err(|_| bad())?;
        return Ok(m * Integer::from(10).pow(e));
    }
    s.parse().map_err(|_| bad())
}

/// Exact value of a decimal literal such as `0.67`.
pub fn parse_decimal(s: &str) -> Result<Rational, Failure> {
    let s = s.trim();
    let bad = || usage(format!("not a decimal: {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: Integer = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let r = Rational::from((digits, Integer::from(10).pow(frac.len() as u32)));
    Ok(if neg { -r } else { r })
}

fn subject(s: &Subject) -> Result<Factorization, Failure> {
    match (&s.n, &s.factored) {
        (Some(n), None) => {
            let v = parse_integer(n)?;
            if v < 1 {
                return Err(usage("n must be positive"));
            }
            Ok(factorize(&v)?)
        }
        (None, Some(f)) => f.parse::<Factorization>().map_err(|e| usage(e.to_string())),
        _ => Err(usage("give exactly one of --n and --factored")),
    }
}

pub fn dispatch(ctx: &Context, name: &str, cmd: Command, sink: &mut Sink) -> CmdResult {
    match cmd {
        Command::GenCa { below, count, threshold } => {
            gen(ctx, name, Parity::All, parse_integer(&below)?, count, threshold.into(), sink)
        }
        Command::GenOca { below_c0: _, through_c0, below, count, threshold } => {
            let bound = match below {
                Some(b) => parse_integer(&b)?,
                None if through_c0 => C0.parse::<Integer>().unwrap() + 1u32,
                None => C0.parse().unwrap(),
            };
            gen(ctx, name, Parity::Odd, bound, count, threshold.into(), sink)
        }
        Command::CheckRobin { subject: s, threshold } => {
            let f = subject(&s)?;
            if f.value() < 3 {
                return Err(usage("the inequality needs n ≥ 3"));
            }
            check(name, robin_check(&f, threshold.into(), &ctx.ev)?, sink)
        }
        Command::CheckLagarias { subject: s, chain } => {
            let f = subject(&s)?;
            if f.value() < 3 {
                return Err(usage("the inequality needs n ≥ 3"));
            }
            let rep = if chain { chain_check(&f, &ctx.ev)? } else { lagarias_check(&f, &ctx.ev)? };
            check(name, rep, sink)
        }
        Command::Scan { kind, threshold, filter, from, to } => scan(ctx, name, kind, threshold.into(), filter.into(), from, to, sink),
        Command::CaLike { x, schedule, odd } => ca_like(ctx, name, x, &schedule, odd, sink),
        Command::MaxK { n } => max_k_cmd(ctx, name, &n, sink),
        Command::GCurve { subject: s, p, k_max, gnuplot } => g_curve(ctx, name, &subject(&s)?, p, k_max, gnuplot, sink),
        Command::Xk { epsilon, k_max, lemma } => xk(ctx, name, &epsilon, k_max, lemma, sink),
        Command::Constants { name: which, digits, prime_limit } => constants_cmd(name, which, digits, prime_limit, sink),
        Command::VerifyLemma { lemma, samples } => verify_lemma(ctx, name, &lemma, samples.as_deref(), sink),
        Command::Tables { table } => tables(ctx, name, table, sink),
    }
}

// ---------------------------------------------------------------------------
// gen-ca / gen-oca

#[derive(Serialize)]
struct Step {
    p: u64,
    a: u32,
}

#[derive(Serialize)]
struct EpsRange {
    lo: RealInterval,
    hi: RealInterval,
}

#[derive(Serialize)]
struct RecordRow {
    index: usize,
    n: String,
    factorization: Factorization,
    sigma: String,
    step: Step,
    /// The record maximizes sigma(m)/m^(1+eps) for eps in [lo, hi).
    epsilon_range: EpsRange,
    /// Absent for n < 3, where log log n is not positive.
    check: Option<CheckReport>,
}

#[derive(Serialize)]
struct GenResult {
    parity: &'static str,
    below: String,
    threshold: &'static str,
    records: Vec<RecordRow>,
}

/// Primes needed to reach `bound`: the largest prime in a record is about
/// `log bound`.
fn sieve_limit_for(bound: &Integer) -> u64 {
    (bound.significant_bits() as u64 * 4).max(1 << 12)
}

fn enclose(ev: &Evaluator, e: &RealExpr) -> Result<RealInterval, Failure> {
    Ok(ev.eval(e, &Rational::from((1, Integer::from(1) << 64u32)))?)
}

fn gen(ctx: &Context, name: &str, parity: Parity, bound: Integer, count: Option<usize>, kind: ThresholdKind, sink: &mut Sink) -> CmdResult {
    let table = ctx.table(sieve_limit_for(&bound))?;
    let mut recs: Vec<AbundantRecord> = abundant_below(&table, &bound, parity, &ctx.ev)?;
    if let Some(c) = count {
        recs.truncate(c);
    }
    let mut status = Status::Ok;
    let mut rows = Vec::with_capacity(recs.len());
    for r in recs {
        let check = if r.n >= 3 { Some(robin_check(&r.factorization, kind, &ctx.ev)?) } else { None };
        if check.as_ref().is_some_and(|c| c.verdict == Verdict::Unresolved) {
            status = Status::Unresolved;
        }
        rows.push(RecordRow {
            index: r.index,
            n: r.n.to_string(),
            factorization: r.factorization,
            sigma: r.sigma.to_string(),
            step: Step { p: r.step.0, a: r.step.1 },
            epsilon_range: EpsRange { lo: enclose(&ctx.ev, &r.eps_range.0)?, hi: enclose(&ctx.ev, &r.eps_range.1)? },
            check,
        });
    }
    let res = GenResult {
        parity: if parity == Parity::Odd { "odd" } else { "all" },
        below: bound.to_string(),
        threshold: kind.label(),
        records: rows,
    };
    let verdict = |r: &RecordRow| r.check.as_ref().map_or("-".to_string(), |c| format!("{:?}", c.verdict));
    match sink.format {
        Format::Json => sink.json(name, &res)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = res
                .records
                .iter()
                .map(|r| {
                    let (lo, hi) = r.check.as_ref().map_or((String::new(), String::new()), |c| (render::lo(&c.lhs), render::hi(&c.lhs)));
                    vec![r.index.to_string(), r.n.clone(), r.factorization.to_string(), lo, hi, res.threshold.to_string(), verdict(r)]
                })
                .collect();
            sink.write_str(&csv(&["index", "n", "factorization", "f_lo", "f_hi", "threshold", "verdict"], &rows))?
        }
        Format::Text => {
            let rows: Vec<Vec<String>> = res
                .records
                .iter()
                .map(|r| {
                    let f = r.check.as_ref().map_or("-".to_string(), |c| c.lhs.decimal_bounds(12).0);
                    vec![r.index.to_string(), r.n.clone(), render::table_factorization(&r.factorization), f, verdict(r)]
                })
                .collect();
            let mut s = aligned(&["#", "n", "factorization", "f(n)", res.threshold], &rows, true);
            s.push_str(&format!("{} records below {}\n", res.records.len(), res.below));
            sink.write_str(&s)?
        }
    }
    Ok(status)
}

// ---------------------------------------------------------------------------
// tables

#[derive(Serialize)]
struct TableRow {
    n: String,
    factorization: String,
}

#[derive(Serialize)]
struct TableResult {
    table: u8,
    rows: Vec<TableRow>,
}

/// Rows of the published tables: all CA numbers below 10^7, or the odd ones
/// below c0.
pub fn table_rows(table_no: u8, table: &PrimeTable, ev: &Evaluator) -> robin_core::Result<Vec<(String, String)>> {
    let (bound, parity) = match table_no {
        1 => (Integer::from(10_000_000), Parity::All),
        _ => (C0.parse().unwrap(), Parity::Odd),
    };
    Ok(abundant_below(table, &bound, parity, ev)?
        .into_iter()
        .map(|r| (r.n.to_string(), render::table_factorization(&r.factorization)))
        .collect())
}

fn tables(ctx: &Context, name: &str, which: u8, sink: &mut Sink) -> CmdResult {
    let table = ctx.table(1 << 12)?;
    let rows = table_rows(which, &table, &ctx.ev)?;
    let var = if which == 1 { "M" } else { "N" };
    match sink.format {
        Format::Json => {
            let res = TableResult {
                table: which,
                rows: rows.into_iter().map(|(n, factorization)| TableRow { n, factorization }).collect(),
            };
            sink.json(name, &res)?
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = rows.into_iter().map(|(a, b)| vec![a, b]).collect();
            sink.write_str(&csv(&[var, "factorization"], &rows))?
        }
        Format::Text => {
            let mut s = format!("{var}\tFactorization of {var}\n");
            for (n, f) in rows {
                s.push_str(&format!("{n}\t{f}\n"));
            }
            sink.write_str(&s)?
        }
    }
    Ok(Status::Ok)
}

// ---------------------------------------------------------------------------
// check-robin / check-lagarias

fn check(name: &str, rep: CheckReport, sink: &mut Sink) -> CmdResult {
    match sink.format {
        Format::Json => sink.json(name, &rep)?,
        Format::Csv => {
            let row = vec![
                rep.n.to_string(),
                rep.subject.to_string(),
                rep.threshold_kind.clone(),
                render::lo(&rep.lhs),
                render::hi(&rep.lhs),
                render::lo(&rep.rhs),
                render::hi(&rep.rhs),
                format!("{:?}", rep.verdict),
                rep.precision_bits.to_string(),
            ];
            let header = ["n", "factorization", "threshold", "lhs_lo", "lhs_hi", "rhs_lo", "rhs_hi", "verdict", "precision_bits"];
            sink.write_str(&csv(&header, &[row]))?
        }
        Format::Text => {
            let strict = match rep.strictness {
                robin_core::divisors::Strictness::Strict => "lhs < rhs",
                robin_core::divisors::Strictness::NonStrict => "lhs <= rhs",
            };
            let mut s = format!(
                "n             {}\nfactorization {}\ninequality    {} ({})\nlhs           {}\nrhs           {}\n",
                rep.n,
                rep.subject,
                rep.threshold_kind,
                strict,
                render::interval(&rep.lhs),
                render::interval(&rep.rhs)
            );
            if let Some(e) = &rep.exact {
                s.push_str(&format!("exact         {e}\n"));
            }
            s.push_str(&format!("precision     {} bits\nverdict       {:?}\n", rep.precision_bits, rep.verdict));
            sink.write_str(&s)?
        }
    }
    Ok(verdict_status(rep.verdict))
}

// ---------------------------------------------------------------------------
// scan

#[allow(clippy::too_many_arguments)]
fn scan(
    ctx: &Context,
    name: &str,
    kind: ScanKind,
    threshold: ThresholdKind,
    filter: robin_core::criteria::ScanFilter,
    from: u64,
    to: Option<u64>,
    sink: &mut Sink,
) -> CmdResult {
    let rep: ScanReport = match kind {
        ScanKind::Robin => {
            let to = to.unwrap_or(1_000_000);
            if to < from {
                return Err(usage("--to must not be below --from"));
            }
            robin_scan(from, to, threshold, filter, &ctx.ev)?
        }
        ScanKind::Lagarias => {
            if from != 3 {
                return Err(usage("the lagarias scan always starts at 3"));
            }
            lagarias_scan(to.unwrap_or(100_000), &ctx.ev)?
        }
    };
    match sink.format {
        Format::Json => sink.json(name, &rep)?,
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = rep.violations.iter().map(|n| vec![n.to_string(), "Violates".into()]).collect();
            rows.extend(rep.unresolved.iter().map(|n| vec![n.to_string(), "Unresolved".into()]));
            sink.write_str(&csv(&["n", "verdict"], &rows))?
        }
        Format::Text => {
            let list = |v: &[u64]| if v.is_empty() { "none".to_string() } else { v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ") };
            let s = format!(
                "scan        {} ({:?}) over [{}, {}]\nchecked     {}\nviolations  {}\nunresolved  {}\nverdict     {:?}\n",
                rep.kind,
                rep.filter,
                rep.lo,
                rep.hi,
                rep.checked,
                list(&rep.violations),
                list(&rep.unresolved),
                rep.verdict()
            );
            sink.write_str(&s)?
        }
    }
    Ok(verdict_status(rep.verdict()))
}

// ---------------------------------------------------------------------------
// ca-like

pub fn parse_schedule(s: &str) -> Result<Vec<(u64, Rational)>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (p, c) = t.split_once(':').ok_or_else(|| usage(format!("schedule entry {t:?} is not p:c")))?;
            let p: u64 = p.trim().parse().map_err(|_| usage(format!("bad prime in {t:?}")))?;
            Ok((p, parse_decimal(c)?))
        })
        .collect()
}

/// `a/b` rendered as a decimal with up to 12 significant digits.
fn exact_to_decimal(s: &str) -> String {
    match s.parse::<Rational>() {
        Ok(q) => robin_core::realnum::rational_to_decimal(&q, 12, rug::float::Round::Nearest),
        Err(_) => s.to_string(),
    }
}

fn ca_like(ctx: &Context, name: &str, x: u64, schedule: &str, odd: bool, sink: &mut Sink) -> CmdResult {
    let sched = parse_schedule(schedule)?;
    if sched.is_empty() {
        return Err(usage("empty schedule"));
    }
    let res: CaLikeResult = build_ca_like(x, &sched, odd, &ctx.ev)?;
    match sink.format {
        Format::Json => sink.json(name, &res)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = res
                .steps
                .iter()
                .map(|s| vec![s.p.to_string(), s.c.clone(), render::lo(&s.k_bound), render::hi(&s.k_bound), s.l.to_string(), s.n.to_string()])
                .collect();
            sink.write_str(&csv(&["p", "c", "k_lo", "k_hi", "L", "N"], &rows))?
        }
        Format::Text => {
            let rows: Vec<Vec<String>> = res
                .steps
                .iter()
                .map(|s| vec![s.p.to_string(), exact_to_decimal(&s.c), s.k_bound.decimal_bounds(8).0, s.l.to_string(), s.n.to_string()])
                .collect();
            let mut s = aligned(&["p", "c", "k", "L", "N"], &rows, true);
            s.push_str(&format!(
                "N          {} = {}\nprod c     {}\ne^g/f(x)   {}\nverdict    {:?}\n",
                res.value,
                res.n,
                exact_to_decimal(&res.product_c),
                render::interval(&res.threshold),
                res.verdict
            ));
            sink.write_str(&s)?
        }
    }
    Ok(match res.verdict {
        CaLikeVerdict::CertifiedRobin => Status::Ok,
        CaLikeVerdict::Inconclusive => Status::Unresolved,
    })
}

// ---------------------------------------------------------------------------
// max-k / g-curve

#[derive(Serialize)]
struct MaxKResult {
    n: String,
    max_k: RealInterval,
}

fn max_k_cmd(ctx: &Context, name: &str, n: &str, sink: &mut Sink) -> CmdResult {
    let n = parse_integer(n)?;
    let res = MaxKResult { max_k: max_k(&n, &ctx.ev)?, n: n.to_string() };
    match sink.format {
        Format::Json => sink.json(name, &res)?,
        Format::Csv => sink.write_str(&csv(&["n", "lo", "hi"], &[vec![res.n.clone(), render::lo(&res.max_k), render::hi(&res.max_k)]]))?,
        Format::Text => sink.write_str(&format!("max_k({}) in {}\n", res.n, render::interval(&res.max_k)))?,
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct CurveResult {
    n: String,
    p: u64,
    rows: Vec<GRow>,
}

fn g_curve(ctx: &Context, name: &str, f: &Factorization, p: u64, k_max: u32, gnuplot: bool, sink: &mut Sink) -> CmdResult {
    let rows = emit_g_curve(f, p, k_max, &ctx.ev)?;
    if gnuplot {
        sink.write_str(&curve_gnuplot(&rows))?;
        return Ok(Status::Ok);
    }
    match sink.format {
        Format::Json => sink.json(name, &CurveResult { n: f.value().to_string(), p, rows })?,
        Format::Csv => sink.write_str(&curve_csv(&rows))?,
        Format::Text => {
            let body: Vec<Vec<String>> = rows.iter().map(|r| vec![r.k.to_string(), r.g_lo.clone(), r.g_hi.clone()]).collect();
            sink.write_str(&aligned(&["k", "g_lo", "g_hi"], &body, true))?
        }
    }
    Ok(Status::Ok)
}

// ---------------------------------------------------------------------------
// xk

#[derive(Serialize)]
struct Exponent {
    p: u64,
    alpha: u32,
}

#[derive(Serialize)]
struct XkRow {
    k: u32,
    x: RealInterval,
}

#[derive(Serialize)]
struct XkResult {
    epsilon: String,
    exponents: Vec<Exponent>,
    x: Vec<XkRow>,
    lemma: Option<XkLemmaReport>,
}

fn xk(ctx: &Context, name: &str, epsilon: &str, k_max: u32, lemma: bool, sink: &mut Sink) -> CmdResult {
    let eps_q = parse_decimal(epsilon)?;
    if eps_q <= 0 {
        return Err(usage("epsilon must be positive"));
    }
    if k_max == 0 {
        return Err(usage("--k-max must be at least 1"));
    }
    let eps = RealExpr::rational(eps_q.clone());
    // Every prime with a positive exponent, then the first with exponent 0.
    let mut exponents = Vec::new();
    let mut p = 2u64;
    loop {
        let alpha = alpha_p(p, &eps, &ctx.ev)?;
        exponents.push(Exponent { p, alpha });
        if alpha == 0 {
            break;
        }
        p += 1;
        while !is_prime_u64(p) {
            p += 1;
        }
    }
    let tol = Rational::from((1, 1u64 << 48));
    let x = (1..=k_max).map(|k| Ok(XkRow { k, x: x_k(&eps, k, &tol, &ctx.ev)? })).collect::<Result<Vec<_>, Failure>>()?;
    let lemma = if lemma { Some(verify_xk_lemma(&eps, &ctx.ev)?) } else { None };
    let status = lemma.as_ref().map_or(Status::Ok, |l| sample_status(&l.checks));
    let res = XkResult { epsilon: epsilon.trim().to_string(), exponents, x, lemma };
    match sink.format {
        Format::Json => sink.json(name, &res)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = res.x.iter().map(|r| vec![r.k.to_string(), render::lo(&r.x), render::hi(&r.x)]).collect();
            sink.write_str(&csv(&["k", "x_lo", "x_hi"], &rows))?
        }
        Format::Text => {
            let mut s = format!("epsilon  {}\n", res.epsilon);
            let ex: Vec<String> = res.exponents.iter().map(|e| format!("{}^{}", e.p, e.alpha)).collect();
            s.push_str(&format!("alpha_p  {}\n", ex.join(" ")));
            for r in &res.x {
                s.push_str(&format!("x_{:<6} {}\n", r.k, render::interval(&r.x)));
            }
            if let Some(l) = &res.lemma {
                s.push_str(&checks_text(&l.checks));
            }
            sink.write_str(&s)?
        }
    }
    Ok(status)
}

fn sample_status(checks: &[SampleCheck]) -> Status {
    checks.iter().fold(Status::Ok, |s, c| s.worst(verdict_status(c.verdict)))
}

fn checks_text(checks: &[SampleCheck]) -> String {
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| vec![c.id.clone(), c.lhs.decimal_bounds(12).0, c.rhs.decimal_bounds(12).0, format!("{:?}", c.verdict)])
        .collect();
    aligned(&["check", "lhs", "rhs", "verdict"], &rows, false)
}

// ---------------------------------------------------------------------------
// constants

/// Published approximations, compared against each enclosure.
const LITERATURE: [(&str, &str); 6] = [
    ("gamma", "0.5772156649"),
    ("egamma", "1.7810724180"),
    ("pi", "3.1415926536"),
    ("B", "0.2615"),
    ("alpha41", "0.7738"),
    ("alpha43", "1.1508"),
];

#[derive(Serialize)]
struct ConstantRow {
    #[serde(flatten)]
    constant: NamedConstant,
    width: String,
    literature: Option<String>,
    /// Whether the literature value agrees with the enclosure up to its own
    /// last printed digit.
    literature_consistent: Option<bool>,
}

/// `v` is consistent with `iv` if it lies within half a unit in its last
/// place of the enclosure.
pub fn consistent_with_rounding(iv: &RealInterval, v: &str) -> bool {
    let Ok(q) = parse_decimal(v) else { return false };
    let places = v.split_once('.').map_or(0, |(_, f)| f.len()) as u32;
    let half = Rational::from((1, Integer::from(10).pow(places) * 2u32));
    Rational::from(iv.lo_rational() - &half) <= q && q <= Rational::from(iv.hi_rational() + &half)
}

fn constant_with_limit(name: &str, limit: u64) -> Result<NamedConstant, Failure> {
    let (value, derivation, tail) = match name {
        "B" | "b" => (
            constants::meissel_mertens_at(limit)?,
            format!("gamma + sum over p <= {limit} of log(1-1/p) + 1/p"),
            format!("[-1/(2*{limit}), 0]"),
        ),
        "alpha41" => (constants::alpha_4_1(limit)?, format!("Euler product over p = 3 mod 4, p <= {limit}"), format!("product factor in [1 - 1/{limit}, 1]")),
        "alpha43" => (constants::alpha_4_3(limit)?, format!("Euler product over p = 3 mod 4, p <= {limit}"), format!("product factor in [1 - 1/{limit}, 1]")),
        _ => return Err(usage(format!("--prime-limit does not apply to {name}"))),
    };
    Ok(NamedConstant { name: if name == "b" { "B".into() } else { name.into() }, value, derivation, tail_bound: Some(tail) })
}

fn constants_cmd(cmd: &str, which: Option<String>, digits: u32, prime_limit: Option<u64>, sink: &mut Sink) -> CmdResult {
    let names: Vec<String> = match which {
        Some(n) => vec![n],
        None => CONSTANT_NAMES.iter().map(|s| s.to_string()).collect(),
    };
    let mut rows = Vec::new();
    for n in &names {
        let c = match prime_limit {
            Some(l) if matches!(n.as_str(), "B" | "b" | "alpha41" | "alpha43") => constant_with_limit(n, l)?,
            _ => match constants::named_constant(n, digits) {
                Err(robin_core::Error::Domain(m)) => return Err(usage(m)),
                other => other?,
            },
        };
        let lit = LITERATURE.iter().find(|(k, _)| *k == c.name).map(|(_, v)| v.to_string());
        let ok = lit.as_deref().map(|v| consistent_with_rounding(&c.value, v));
        let width = robin_core::realnum::rational_to_decimal(&c.value.width_exact(), 3, rug::float::Round::Up);
        rows.push(ConstantRow { constant: c, width, literature: lit, literature_consistent: ok });
    }
    match sink.format {
        Format::Json => sink.json(cmd, &rows)?,
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.constant.name.clone(),
                        render::lo(&r.constant.value),
                        render::hi(&r.constant.value),
                        r.constant.derivation.clone(),
                        r.constant.tail_bound.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            sink.write_str(&csv(&["name", "lo", "hi", "method", "tail_bound"], &body))?
        }
        Format::Text => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let (lo, hi) = r.constant.value.decimal_bounds(digits as usize + 4);
                    let flag = match r.literature_consistent {
                        Some(false) => format!(" (literature {} outside)", r.literature.as_deref().unwrap_or("")),
                        _ => String::new(),
                    };
                    vec![
                        r.constant.name.clone(),
                        format!("[{lo}, {hi}]{flag}"),
                        r.constant.derivation.clone(),
                        r.constant.tail_bound.clone().unwrap_or_else(|| "-".into()),
                    ]
                })
                .collect();
            sink.write_str(&aligned(&["name", "enclosure", "method", "tail bound"], &body, false))?
        }
    }
    Ok(Status::Ok)
}

// ---------------------------------------------------------------------------
// verify-lemma

/// `int:LO..HI`, `geo:LO..HI:POINTS`, joined with `+`.
pub fn parse_samples(s: &str) -> Result<SampleSpec, Failure> {
    let part = |t: &str| -> Result<SampleSpec, Failure> {
        let bad = || usage(format!("bad sample spec {t:?}"));
        let (kind, rest) = t.trim().split_once(':').ok_or_else(bad)?;
        let (range, points) = match kind {
            "geo" => {
                let (r, p) = rest.rsplit_once(':').ok_or_else(bad)?;
                (r, Some(p.parse::<usize>().map_err(|_| bad())?))
            }
            "int" => (rest, None),
            _ => return Err(bad()),
        };
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo = parse_integer(lo)?.to_u64().ok_or_else(bad)?;
        let hi = parse_integer(hi)?.to_u64().ok_or_else(bad)?;
        if lo > hi || lo == 0 {
            return Err(bad());
        }
        Ok(match points {
            Some(points) => SampleSpec::Geometric { lo, hi, points },
            None => SampleSpec::Integers { lo, hi },
        })
    };
    let mut parts: Vec<SampleSpec> = s.split('+').map(part).collect::<Result<_, _>>()?;
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { SampleSpec::Union { parts } })
}

fn verify_lemma(ctx: &Context, name: &str, lemma: &str, samples: Option<&str>, sink: &mut Sink) -> CmdResult {
    let id = LemmaId::parse(lemma).ok_or_else(|| {
        let all: Vec<&str> = LemmaId::ALL.iter().map(|l| l.name()).collect();
        usage(format!("unknown lemma {lemma:?}; expected one of {}", all.join(", ")))
    })?;
    let spec = match samples {
        Some(s) => parse_samples(s)?,
        None => id.default_samples(),
    };
    let rep: LemmaReport = match robin_core::criteria::verify_lemma_bounds(id, &spec, &ctx.ev) {
        Err(robin_core::Error::Domain(m)) => return Err(usage(m)),
        other => other?,
    };
    match sink.format {
        Format::Json => sink.json(name, &rep)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = rep
                .checks
                .iter()
                .map(|c| vec![c.id.clone(), render::lo(&c.lhs), render::hi(&c.lhs), render::lo(&c.rhs), render::hi(&c.rhs), format!("{:?}", c.verdict)])
                .collect();
            sink.write_str(&csv(&["id", "lhs_lo", "lhs_hi", "rhs_lo", "rhs_hi", "verdict"], &rows))?
        }
        Format::Text => {
            let mut s = format!(
                "lemma       {}\nchecked     {}\npassed      {}\nfailed      {}\nunresolved  {}\n",
                rep.lemma.name(),
                rep.checked,
                rep.passed,
                rep.failed,
                rep.unresolved
            );
            for (k, v) in &rep.derived {
                s.push_str(&format!("{k}: {}\n", render::interval(v)));
            }
            let bad: Vec<SampleCheck> = rep.checks.iter().filter(|c| c.verdict != Verdict::Satisfies).cloned().collect();
            if !bad.is_empty() {
                s.push_str(&checks_text(&bad));
            }
            sink.write_str(&s)?
        }
    }
    Ok(if rep.failed > 0 {
        Status::Violation
    } else if rep.unresolved > 0 {
        Status::Unresolved
    } else {
        Status::Ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_in_several_notations() {
        assert_eq!(parse_integer("10^7").unwrap(), 10_000_000);
        assert_eq!(parse_integer("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_integer("4_324_320").unwrap(), 4_324_320);
        assert!(parse_integer("12x").is_err());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("0.67").unwrap(), Rational::from((67, 100)));
        assert_eq!(parse_decimal("-1.5").unwrap(), Rational::from((-3, 2)));
        assert_eq!(parse_decimal("2").unwrap(), 2);
        assert!(parse_decimal("1e3").is_err());
        assert!(parse_decimal(".").is_err());
    }

    #[test]
    fn schedule_and_samples() {
        let s = parse_schedule("13:0.67, 11:0.91").unwrap();
        assert_eq!(s, vec![(13, Rational::from((67, 100))), (11, Rational::from((91, 100)))]);
        assert!(parse_schedule("13=0.67").is_err());
        assert_eq!(parse_samples("int:3..10").unwrap(), SampleSpec::Integers { lo: 3, hi: 10 });
        let u = parse_samples("int:347..559+geo:560..1e5:200").unwrap();
        assert_eq!(u, LemmaId::L3_1.default_samples());
        assert!(parse_samples("geo:5..2:3").is_err());
    }

    #[test]
    fn rounding_consistency() {
        let iv = RealInterval::from_rational_bounds(&Rational::from((773811, 1_000_000)), &Rational::from((773812, 1_000_000)), 64);
        assert!(consistent_with_rounding(&iv, "0.7738"));
        assert!(!consistent_with_rounding(&iv, "0.7737"));
        assert!(!consistent_with_rounding(&iv, "0.77382"));
    }
}
