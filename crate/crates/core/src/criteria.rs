//! Robin- and Lagarias-type inequalities: single certified checks, range
//! scans, harmonic numbers and numeric verification of supporting bounds.

use rayon::prelude::*;
use rug::float::Round;
use rug::ops::AddAssignRound;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::abundant::{AbundantRecord, Parity};
use crate::divisors::{
    decide_inequality, factorize_u64, interval_verdict, sigma, CheckReport, Decided, DivisorSegment, Factorization,
    Strictness, Verdict,
};
use crate::error::{Error, Result};
use crate::primes::{a_func, PrimeTable, ThetaTable};
use crate::realnum::{Comparison, Evaluator, Fault, RealExpr, RealInterval};

/// One certified comparison `lhs < rhs` (or `≤`) at a sample point.
#[derive(Clone, Debug, Serialize)]
pub struct SampleCheck {
    pub id: String,
    pub lhs: RealInterval,
    pub rhs: RealInterval,
    pub verdict: Verdict,
}

// ---------------------------------------------------------------------------
// Harmonic numbers

fn range_sum(a: u64, b: u64) -> (Integer, Integer) {
    // Σ_{k=a}^{b-1} 1/k as an unreduced fraction, by binary splitting.
    if b - a == 1 {
        return (Integer::from(1), Integer::from(a));
    }
    let m = a + (b - a) / 2;
    let ((p1, q1), (p2, q2)) = if b - a > 2048 {
        rayon::join(|| range_sum(a, m), || range_sum(m, b))
    } else {
        (range_sum(a, m), range_sum(m, b))
    };
    (p1 * &q2 + p2 * &q1, q1 * q2)
}

/// `H_n = Σ_{k ≤ n} 1/k` exactly.
pub fn harmonic(n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::domain("harmonic numbers start at n = 1"));
    }
    let (p, q) = range_sum(1, n + 1);
    Ok(Rational::from((p, q)))
}

/// `H′_n = 2H_n − H_{2n} = H_n − Σ_{n<k≤2n} 1/k` exactly.
pub fn harmonic_prime(n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::domain("H′ starts at n = 1"));
    }
    let (p1, q1) = range_sum(1, n + 1);
    let (p2, q2) = range_sum(n + 1, 2 * n + 1);
    Ok(Rational::from((p1 * &q2 - p2 * &q1, q1 * q2)))
}

/// Exact `H_n` and `H′_n` for n = 1, 2, … by O(1) rational updates.
pub struct HarmonicSeries {
    n: u64,
    h: Rational,
    hp: Rational,
}

impl Default for HarmonicSeries {
    fn default() -> Self {
        HarmonicSeries::new()
    }
}

impl HarmonicSeries {
    pub fn new() -> Self {
        HarmonicSeries { n: 0, h: Rational::new(), hp: Rational::new() }
    }
}

impl Iterator for HarmonicSeries {
    /// `(n, H_n, H′_n)`
    type Item = (u64, Rational, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        let n = self.n;
        // H′_{n+1} − H′_n = 2/(n+1) − 1/(2n+1) − 1/(2n+2)
        self.h += Rational::from((1, n + 1));
        self.hp += Rational::from((2, n + 1));
        self.hp -= Rational::from((1, 2 * n + 1));
        self.hp -= Rational::from((1, 2 * n + 2));
        self.n = n + 1;
        Some((self.n, self.h.clone(), self.hp.clone()))
    }
}

/// Interval enclosures of `H′_n` for n = 1, 2, … at a fixed precision,
/// accumulated with directed rounding. Much cheaper than exact rationals.
struct HarmonicPrimeIntervals {
    n: u64,
    lo: Float,
    hi: Float,
    prec: u32,
}

impl HarmonicPrimeIntervals {
    fn new(prec: u32) -> Self {
        HarmonicPrimeIntervals { n: 0, lo: Float::new(prec), hi: Float::new(prec), prec }
    }

    fn step(&mut self) -> RealInterval {
        let k = self.n;
        // H′_{k+1} − H′_k = 3/(2k+2) − 1/(2k+1)
        let a = Rational::from((3, 2 * k + 2)) - Rational::from((1, 2 * k + 1));
        self.lo.add_assign_round(Float::with_val_round(self.prec, &a, Round::Down).0, Round::Down);
        self.hi.add_assign_round(Float::with_val_round(self.prec, &a, Round::Up).0, Round::Up);
        self.n += 1;
        RealInterval::new(self.lo.clone(), self.hi.clone())
    }
}

// ---------------------------------------------------------------------------
// Robin-type checks

/// Threshold constant `T` in `σ(n)/(n log log n) < T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdKind {
    /// `e^γ`
    Egamma,
    /// `e^γ/2`
    HalfEgamma,
    /// `(3/4)e^γ`
    ThreequarterEgamma,
    /// `0.45e^γ`
    C045Egamma,
}

impl ThresholdKind {
    pub fn factor(self) -> Rational {
        match self {
            ThresholdKind::Egamma => Rational::from(1),
            ThresholdKind::HalfEgamma => Rational::from((1, 2)),
            ThresholdKind::ThreequarterEgamma => Rational::from((3, 4)),
            ThresholdKind::C045Egamma => Rational::from((9, 20)),
        }
    }

    pub fn expr(self) -> RealExpr {
        RealExpr::rational(self.factor()) * RealExpr::gamma().exp()
    }

    pub fn label(self) -> &'static str {
        match self {
            ThresholdKind::Egamma => "egamma",
            ThresholdKind::HalfEgamma => "half-egamma",
            ThresholdKind::ThreequarterEgamma => "threequarter-egamma",
            ThresholdKind::C045Egamma => "c045-egamma",
        }
    }
}

/// Certified verdict of `σ(n)/(n log log n) < T` for `n ≥ 3`.
pub fn robin_check(f: &Factorization, kind: ThresholdKind, ev: &Evaluator) -> Result<CheckReport> {
    let lhs = crate::divisors::f_ratio_expr(f)?;
    let d = decide_inequality(&lhs, &kind.expr(), Strictness::Strict, ev)?;
    let mut rep = CheckReport::from_decision(f, kind.label(), Strictness::Strict, d);
    rep.exact = Some(format!("sigma(n)/n = {}", crate::divisors::abundancy(f)));
    Ok(rep)
}

/// Values of `n` above which `H′_n` is enclosed by the two-sided bound
/// `log n + γ − log 2 < H′_n < log n + γ − log 2 + 3/(4n)` instead of exactly.
pub const EXACT_HARMONIC_LIMIT: u64 = 100_000;

/// `exp(H′_n) log H′_n` for an exact `H′_n`.
fn lagarias_term(hp: &Rational) -> RealExpr {
    let h = RealExpr::rational(hp.clone());
    h.clone().exp() * h.ln()
}

/// Certified enclosure of `exp(H′_n) log(H′_n)` through the two-sided bound;
/// `x ↦ e^x log x` is increasing for `x > 1`.
fn lagarias_term_bounded(n: &Integer, bits: u32) -> std::result::Result<RealInterval, Fault> {
    let base = (RealExpr::Int(n.clone()).ln() + RealExpr::gamma() - RealExpr::int(2).ln()).interval_at(bits)?;
    let hi = base.add(&RealInterval::from_rational(&Rational::from((Integer::from(3), Integer::from(4) * n)), bits));
    if !base.certainly_positive() || base.lo() <= &1 {
        return Err(Fault::Domain("bounded H′ needs log n + γ − log 2 > 1".into()));
    }
    let g = |x: &RealInterval| -> std::result::Result<RealInterval, Fault> { Ok(x.exp().mul(&x.ln()?)) };
    let lo = g(&RealInterval::new(base.lo().clone(), base.lo().clone()))?;
    let up = g(&RealInterval::new(hi.hi().clone(), hi.hi().clone()))?;
    Ok(lo.hull(&up))
}

/// Certified verdict of `σ(n) ≤ 3n/log n + exp(H′_n) log H′_n` for odd `n ≥ 3`.
pub fn lagarias_check(f: &Factorization, ev: &Evaluator) -> Result<CheckReport> {
    let n = f.value();
    if n < 3 || n.is_even() {
        return Err(Error::domain(format!("the odd Lagarias analogue needs odd n ≥ 3, got {n}")));
    }
    let s = sigma(f);
    let lhs = RealExpr::Int(s.clone());
    let first = RealExpr::int(3) * RealExpr::Int(n.clone()) / RealExpr::Int(n.clone()).ln();
    if n <= EXACT_HARMONIC_LIMIT {
        let hp = harmonic_prime(n.to_u64().unwrap())?;
        let rhs = first + lagarias_term(&hp);
        let d = decide_inequality(&lhs, &rhs, Strictness::NonStrict, ev)?;
        let mut rep = CheckReport::from_decision(f, "lagarias", Strictness::NonStrict, d);
        rep.exact = Some(format!("sigma(n) = {s}"));
        return Ok(rep);
    }
    let mut last = None;
    let res = ev.escalate("odd Lagarias analogue", |bits| {
        let l = lhs.interval_at(bits)?;
        let r = first.canonical().interval_at(bits)?.add(&lagarias_term_bounded(&n, bits)?);
        let v = interval_verdict(&l, &r, Strictness::NonStrict);
        let d = Decided { verdict: v, lhs: l, rhs: r, precision_bits: bits };
        if v == Verdict::Unresolved {
            last = Some(d);
            Ok(None)
        } else {
            Ok(Some(d))
        }
    });
    let d = match res {
        Err(Error::PrecisionExhausted { .. }) if last.is_some() => last.unwrap(),
        other => other?,
    };
    let mut rep = CheckReport::from_decision(f, "lagarias", Strictness::NonStrict, d);
    rep.exact = Some(format!("sigma(n) = {s}"));
    Ok(rep)
}

/// Certified verdict of `σ(n) ≤ (e^γ/2) n log log n + 2.8 n/log n` for an odd record.
pub fn lagarias_chain_check(rec: &AbundantRecord, ev: &Evaluator) -> Result<CheckReport> {
    if rec.parity != Parity::Odd {
        return Err(Error::domain("the chain inequality applies to odd records"));
    }
    chain_check(&rec.factorization, ev)
}

/// `σ(n) ≤ (e^γ/2) n log log n + 2.8 n/log n` for any odd `n ≥ 3`.
pub fn chain_check(f: &Factorization, ev: &Evaluator) -> Result<CheckReport> {
    let n = f.value();
    if n < 3 || n.is_even() {
        return Err(Error::domain(format!("chain inequality needs odd n ≥ 3, got {n}")));
    }
    let ni = RealExpr::Int(n.clone());
    let rhs = ThresholdKind::HalfEgamma.expr() * ni.clone() * ni.clone().ln().ln()
        + RealExpr::rat(14, 5) * ni.clone() / ni.ln();
    let d = decide_inequality(&RealExpr::Int(sigma(f)), &rhs, Strictness::NonStrict, ev)?;
    Ok(CheckReport::from_decision(f, "chain", Strictness::NonStrict, d))
}

// ---------------------------------------------------------------------------
// Range scans

/// Which integers a scan visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanFilter {
    All,
    Odd,
    OddSquarefree,
    /// `2^k·m` with `m` odd and squarefree, `k ≥ 0`.
    TwoPowerTimesSquarefree,
}

impl ScanFilter {
    fn accepts(self, n: u64, seg: &DivisorSegment, i: usize) -> bool {
        match self {
            ScanFilter::All => true,
            ScanFilter::Odd => n % 2 == 1,
            ScanFilter::OddSquarefree => n % 2 == 1 && seg.odd_squarefree[i],
            ScanFilter::TwoPowerTimesSquarefree => seg.odd_squarefree[i],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub kind: String,
    pub filter: ScanFilter,
    /// Inclusive bounds.
    pub lo: u64,
    pub hi: u64,
    pub checked: u64,
    pub violations: Vec<u64>,
    pub unresolved: Vec<u64>,
}

impl ScanReport {
    pub fn verdict(&self) -> Verdict {
        if !self.violations.is_empty() {
            Verdict::Violates
        } else if !self.unresolved.is_empty() {
            Verdict::Unresolved
        } else {
            Verdict::Satisfies
        }
    }
}

const SCAN_BITS: u32 = 64;
const SCAN_CHUNK: u64 = 1 << 16;

fn base_primes_for(hi: u64) -> Result<PrimeTable> {
    PrimeTable::sieve(((hi as f64).sqrt() as u64 + 2).max(2))
}

/// Scans `lo ≤ n ≤ hi` (n ≥ 3) for violations of `σ(n)/(n log log n) < T`.
/// Each integer is first decided at 64 bits; undecided ones are re-checked
/// through the escalating evaluator.
pub fn robin_scan(lo: u64, hi: u64, kind: ThresholdKind, filter: ScanFilter, ev: &Evaluator) -> Result<ScanReport> {
    let lo = lo.max(3);
    let base = base_primes_for(hi)?;
    let thr = kind.expr().canonical().interval_at(SCAN_BITS).map_err(|_| Error::domain("threshold"))?;
    let starts: Vec<u64> = (lo..=hi).step_by(SCAN_CHUNK as usize).collect();
    let parts: Vec<Result<(u64, Vec<u64>, Vec<u64>)>> = starts
        .par_iter()
        .map(|&s| {
            let len = (hi - s + 1).min(SCAN_CHUNK) as usize;
            let seg = DivisorSegment::compute(s, len, &base);
            let (mut checked, mut bad, mut unres) = (0u64, Vec::new(), Vec::new());
            for i in 0..len {
                let n = s + i as u64;
                if !filter.accepts(n, &seg, i) {
                    continue;
                }
                checked += 1;
                let ratio = RealInterval::from_rational(&Rational::from((seg.sigma[i], n)), SCAN_BITS);
                let ll = RealInterval::from_u64(n, SCAN_BITS).ln().and_then(|x| x.ln());
                let v = match ll.and_then(|ll| ratio.div(&ll)) {
                    Ok(f) => interval_verdict(&f, &thr, Strictness::Strict),
                    Err(_) => Verdict::Unresolved,
                };
                let v = if v == Verdict::Unresolved {
                    robin_check(&factorize_u64(n), kind, ev)?.verdict
                } else {
                    v
                };
                match v {
                    Verdict::Satisfies => {}
                    Verdict::Violates => bad.push(n),
                    Verdict::Unresolved => unres.push(n),
                }
            }
            Ok((checked, bad, unres))
        })
        .collect();
    let mut rep = ScanReport {
        kind: kind.label().to_string(),
        filter,
        lo,
        hi,
        checked: 0,
        violations: Vec::new(),
        unresolved: Vec::new(),
    };
    for p in parts {
        let (c, b, u) = p?;
        rep.checked += c;
        rep.violations.extend(b);
        rep.unresolved.extend(u);
    }
    Ok(rep)
}

/// Checks `σ(n) ≤ 3n/log n + exp(H′_n) log H′_n` for every odd `3 ≤ n ≤ hi`.
/// `H′_n` is accumulated in interval arithmetic; undecided integers fall
/// back to [`lagarias_check`] with exact harmonic numbers.
pub fn lagarias_scan(hi: u64, ev: &Evaluator) -> Result<ScanReport> {
    let bits = 128;
    let base = base_primes_for(hi)?;
    let mut series = HarmonicPrimeIntervals::new(bits);
    let hps: Vec<RealInterval> = (1..=hi).map(|_| series.step()).collect();
    let starts: Vec<u64> = (3..=hi).step_by(SCAN_CHUNK as usize).collect();
    let parts: Vec<Result<(u64, Vec<u64>, Vec<u64>)>> = starts
        .par_iter()
        .map(|&s| {
            let len = (hi - s + 1).min(SCAN_CHUNK) as usize;
            let seg = DivisorSegment::compute(s, len, &base);
            let (mut checked, mut bad, mut unres) = (0u64, Vec::new(), Vec::new());
            for i in 0..len {
                let n = s + i as u64;
                if n % 2 == 0 {
                    continue;
                }
                checked += 1;
                let hp = &hps[(n - 1) as usize];
                let v = (|| -> std::result::Result<Verdict, Fault> {
                    let ni = RealInterval::from_u64(n, bits);
                    let first = ni.mul_rational(&Rational::from(3)).div(&ni.ln()?)?;
                    let rhs = first.add(&hp.exp().mul(&hp.ln()?));
                    let lhs = RealInterval::from_u64(seg.sigma[i], bits);
                    Ok(interval_verdict(&lhs, &rhs, Strictness::NonStrict))
                })()
                .unwrap_or(Verdict::Unresolved);
                let v = if v == Verdict::Unresolved { lagarias_check(&factorize_u64(n), ev)?.verdict } else { v };
                match v {
                    Verdict::Satisfies => {}
                    Verdict::Violates => bad.push(n),
                    Verdict::Unresolved => unres.push(n),
                }
            }
            Ok((checked, bad, unres))
        })
        .collect();
    let mut rep = ScanReport {
        kind: "lagarias".into(),
        filter: ScanFilter::Odd,
        lo: 3,
        hi,
        checked: 0,
        violations: Vec::new(),
        unresolved: Vec::new(),
    };
    for p in parts {
        let (c, b, u) = p?;
        rep.checked += c;
        rep.violations.extend(b);
        rep.unresolved.extend(u);
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Numeric verification of supporting bounds

/// Which bound [`verify_lemma_bounds`] checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LemmaId {
    /// `A(n) − 0.998n ≥ 1` on integers and `A(x) > 0.998x` on a real grid.
    #[serde(rename = "L3_1")]
    L3_1,
    /// `0.998√(2x) − log 2 + (0.998√(2x) − log 2 + 1.000081x) log(1.000081x) ≤ (0.996/C) x log x`
    /// with `C = 0.99154`, plus the largest admissible `C` on the grid.
    #[serde(rename = "L3_3_C")]
    L3_3C,
    /// Sign change of `−0.7702/(√x log x) + 7.1476/(√x (log x)²)`.
    #[serde(rename = "P3_5_threshold")]
    P3_5Threshold,
    /// `0.12n/log n + exp(H′_n) log H′_n ≥ (e^γ/2) n log log n`.
    #[serde(rename = "L4_1")]
    L4_1,
    /// `0 < H′_n − (log n + γ − log 2) < 3/(4n)` with exact `H′_n`.
    #[serde(rename = "L4_2")]
    L4_2,
    /// `exp(H′_n) log H′_n ≤ (e^γ/2) n log log n + 0.3n/log n`.
    #[serde(rename = "L4_3")]
    L4_3,
    /// Concavity of `s(t) = log(3/t + (e^γ/2) log t) − εt` beyond the
    /// inflection point.
    #[serde(rename = "L4_4_concavity")]
    L4_4Concavity,
}

impl LemmaId {
    pub const ALL: [LemmaId; 7] = [
        LemmaId::L3_1,
        LemmaId::L3_3C,
        LemmaId::P3_5Threshold,
        LemmaId::L4_1,
        LemmaId::L4_2,
        LemmaId::L4_3,
        LemmaId::L4_4Concavity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::L3_1 => "L3_1",
            LemmaId::L3_3C => "L3_3_C",
            LemmaId::P3_5Threshold => "P3_5_threshold",
            LemmaId::L4_1 => "L4_1",
            LemmaId::L4_2 => "L4_2",
            LemmaId::L4_3 => "L4_3",
            LemmaId::L4_4Concavity => "L4_4_concavity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        LemmaId::ALL.into_iter().find(|l| l.name().eq_ignore_ascii_case(s))
    }

    pub fn default_samples(self) -> SampleSpec {
        match self {
            LemmaId::L3_1 => SampleSpec::Union {
                parts: vec![
                    SampleSpec::Integers { lo: 347, hi: 559 },
                    SampleSpec::Geometric { lo: 560, hi: 100_000, points: 200 },
                ],
            },
            LemmaId::L3_3C => SampleSpec::Geometric { lo: 120409, hi: 10_000_000, points: 400 },
            LemmaId::P3_5Threshold => SampleSpec::Integers { lo: 2, hi: 1_000_000 },
            LemmaId::L4_1 | LemmaId::L4_2 | LemmaId::L4_3 => SampleSpec::Integers { lo: 3, hi: 100_000 },
            LemmaId::L4_4Concavity => SampleSpec::Geometric { lo: 7, hi: 1_000_000, points: 400 },
        }
    }
}

/// Sample points for [`verify_lemma_bounds`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SampleSpec {
    /// Every integer in `[lo, hi]`.
    Integers { lo: u64, hi: u64 },
    /// `points` integers spaced geometrically from `lo` to `hi` inclusive.
    Geometric { lo: u64, hi: u64, points: usize },
    /// Points of every member, sorted and deduplicated.
    Union { parts: Vec<SampleSpec> },
}

impl SampleSpec {
    pub fn points(&self) -> Vec<u64> {
        match *self {
            SampleSpec::Integers { lo, hi } => (lo..=hi).collect(),
            SampleSpec::Geometric { lo, hi, points } => {
                let mut v: Vec<u64> = (0..points.max(2))
                    .map(|i| {
                        let t = i as f64 / (points.max(2) - 1) as f64;
                        ((lo as f64) * ((hi as f64) / (lo as f64)).powf(t)).round() as u64
                    })
                    .map(|x| x.clamp(lo, hi))
                    .collect();
                v.dedup();
                v
            }
            SampleSpec::Union { ref parts } => {
                let mut v: Vec<u64> = parts.iter().flat_map(|p| p.points()).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
        }
    }

    fn bounds(&self) -> (u64, u64) {
        match self {
            SampleSpec::Integers { lo, hi } | SampleSpec::Geometric { lo, hi, .. } => (*lo, *hi),
            SampleSpec::Union { parts } => parts
                .iter()
                .map(|p| p.bounds())
                .fold((u64::MAX, 0), |(a, b), (c, d)| (a.min(c), b.max(d))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub samples: SampleSpec,
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    pub unresolved: usize,
    /// Every check when there are few, otherwise only the ones that did not pass.
    pub checks: Vec<SampleCheck>,
    /// Named derived quantities (largest admissible constant, root locations).
    pub derived: Vec<(String, RealInterval)>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.unresolved == 0
    }

    fn from_checks(lemma: LemmaId, samples: SampleSpec, checks: Vec<SampleCheck>, derived: Vec<(String, RealInterval)>) -> Self {
        let passed = checks.iter().filter(|c| c.verdict == Verdict::Satisfies).count();
        let failed = checks.iter().filter(|c| c.verdict == Verdict::Violates).count();
        let unresolved = checks.len() - passed - failed;
        let checked = checks.len();
        let checks = if checks.len() <= 64 {
            checks
        } else {
            checks.into_iter().filter(|c| c.verdict != Verdict::Satisfies).collect()
        };
        LemmaReport { lemma, samples, checked, passed, failed, unresolved, checks, derived }
    }
}

fn fault(f: Fault) -> Error {
    match f {
        Fault::Domain(m) => Error::Domain(m),
        Fault::Indeterminate => Error::domain("indeterminate interval operation"),
    }
}

/// Decides `lhs < rhs` (or `≤`) with the given expressions, escalating.
fn sample(id: String, lhs: &RealExpr, rhs: &RealExpr, strictness: Strictness, ev: &Evaluator) -> Result<SampleCheck> {
    let d = decide_inequality(lhs, rhs, strictness, ev)?;
    Ok(SampleCheck { id, lhs: d.lhs, rhs: d.rhs, verdict: d.verdict })
}

fn ln(x: RealExpr) -> RealExpr {
    x.ln()
}

fn int(n: u64) -> RealExpr {
    RealExpr::int(n)
}

fn dec(s: &str) -> RealExpr {
    RealExpr::decimal(s).expect("literal")
}

/// Left side of the constant inequality, as a function of `x`.
fn loglog_constant_lhs(x: &RealExpr) -> RealExpr {
    let s = dec("0.998") * (int(2) * x.clone()).sqrt() - ln(int(2));
    s.clone() + (s + dec("1.000081") * x.clone()) * ln(dec("1.000081") * x.clone())
}

/// Exponent expression whose sign change is located.
fn sign_change_expr(x: &RealExpr) -> RealExpr {
    let sx = x.clone().sqrt();
    let lx = ln(x.clone());
    -(dec("0.7702") / (sx.clone() * lx.clone())) + dec("7.1476") / (sx * lx.powi(2))
}

/// Numerator of `s''(t)` up to a positive factor: `u''u − u'²` with
/// `u = 3/t + (e^γ/2) log t`.
fn concavity_numerator(t: &RealExpr) -> RealExpr {
    let c = ThresholdKind::HalfEgamma.expr();
    let u = int(3) / t.clone() + c.clone() * ln(t.clone());
    let u1 = -(int(3) / t.clone().powi(2)) + c.clone() / t.clone();
    let u2 = int(6) / t.clone().powi(3) - c / t.clone().powi(2);
    u2 * u - u1.powi(2)
}

/// Bisection for the sign change of `f` on `[lo, hi]` (rationals); `f(lo)`
/// and `f(hi)` must have certified opposite signs. Returns the final bracket.
fn bisect_sign(
    f: impl Fn(&RealExpr) -> RealExpr,
    mut lo: Rational,
    mut hi: Rational,
    width: &Rational,
    ev: &Evaluator,
) -> Result<(Rational, Rational)> {
    let s_lo = ev.sign(&f(&RealExpr::rational(lo.clone())));
    let s_hi = ev.sign(&f(&RealExpr::rational(hi.clone())));
    if s_lo == s_hi || s_lo == Comparison::Unresolved || s_hi == Comparison::Unresolved {
        return Err(Error::domain("no certified sign change on the bracket"));
    }
    while Rational::from(&hi - &lo) > *width {
        let mid = Rational::from(&lo + &hi) / 2u32;
        let s = ev.sign(&f(&RealExpr::rational(mid.clone())));
        if s == Comparison::Unresolved || s == Comparison::Equal {
            return Ok((mid.clone(), mid));
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Smallest integer in `[lo, hi]` where `pred` holds, assuming it is monotone.
fn first_integer(lo: u64, hi: u64, pred: impl Fn(u64) -> Result<bool>) -> Result<Option<u64>> {
    if !pred(hi)? {
        return Ok(None);
    }
    let (mut a, mut b) = (lo, hi);
    if pred(a)? {
        return Ok(Some(a));
    }
    while b - a > 1 {
        let m = a + (b - a) / 2;
        if pred(m)? {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(Some(b))
}

/// Certified per-sample verification of one supporting bound.
pub fn verify_lemma_bounds(lemma: LemmaId, samples: &SampleSpec, ev: &Evaluator) -> Result<LemmaReport> {
    let pts = samples.points();
    let mut derived = Vec::new();
    let checks: Vec<SampleCheck> = match lemma {
        LemmaId::L3_1 => {
            // Integers up to 559 need the margin A(n) − 0.998n ≥ 1; beyond
            // that A(x) > 0.998x is checked.
            let (_, hi) = samples.bounds();
            let table = PrimeTable::sieve(hi.max(3) + 1)?;
            let thetas = ThetaTable::new(&table, 128);
            pts.par_iter()
                .filter(|&&n| n >= 3)
                .map(|&n| {
                    let a = a_func(&thetas, &int(n), ev)?;
                    let margin = n <= 559;
                    let mut rhs = Rational::from((998, 1000)) * n;
                    if margin {
                        rhs += 1u32;
                    }
                    let rhs = RealInterval::from_rational(&rhs, 128);
                    let verdict = if (margin && rhs.certainly_le(&a)) || (!margin && rhs.certainly_lt(&a)) {
                        Verdict::Satisfies
                    } else if (margin && a.certainly_lt(&rhs)) || (!margin && a.certainly_le(&rhs)) {
                        Verdict::Violates
                    } else {
                        Verdict::Unresolved
                    };
                    let id = if margin { format!("A({n}) - 0.998*{n} >= 1") } else { format!("A({n}) > 0.998*{n}") };
                    Ok(SampleCheck { id, lhs: rhs, rhs: a, verdict })
                })
                .collect::<Result<_>>()?
        }
        LemmaId::L3_3C => {
            let c = dec("0.99154");
            let rows: Vec<(SampleCheck, RealInterval)> = pts
                .par_iter()
                .map(|&x| {
                    let xe = int(x);
                    let lhs = loglog_constant_lhs(&xe);
                    let rhs = dec("0.996") / c.clone() * xe.clone() * ln(xe.clone());
                    let chk = sample(format!("x1 = {x}"), &lhs, &rhs, Strictness::NonStrict, ev)?;
                    let cmax = ev.eval(
                        &(dec("0.996") * xe.clone() * ln(xe) / lhs),
                        &Rational::from((1, 1u64 << 40)),
                    )?;
                    Ok((chk, cmax))
                })
                .collect::<Result<_>>()?;
            let mut best: Option<RealInterval> = None;
            for (_, c) in &rows {
                best = Some(match best {
                    None => c.clone(),
                    Some(b) => {
                        let lo = if c.lo() < b.lo() { c.lo().clone() } else { b.lo().clone() };
                        let hi = if c.hi() < b.hi() { c.hi().clone() } else { b.hi().clone() };
                        RealInterval::new(lo, hi)
                    }
                });
            }
            if let Some(b) = best {
                derived.push(("largest admissible C on grid".to_string(), b));
            }
            rows.into_iter().map(|(c, _)| c).collect()
        }
        LemmaId::P3_5Threshold => {
            let (lo, hi) = samples.bounds();
            let lo = lo.max(2);
            let nonpos = |x: u64| -> Result<bool> {
                Ok(matches!(ev.sign(&sign_change_expr(&int(x))), Comparison::Less | Comparison::Equal))
            };
            let first = first_integer(lo, hi, nonpos)?;
            let root = (dec("7.1476") / dec("0.7702")).exp();
            let tol = Rational::from((1, 1u64 << 40));
            derived.push(("root exp(7.1476/0.7702)".to_string(), ev.eval(&root, &tol)?));
            let mut out = Vec::new();
            if let Some(x) = first {
                let at = |v: u64| ev.eval(&sign_change_expr(&int(v)), &tol);
                derived.push(("first integer with nonpositive exponent".to_string(), RealInterval::from_u64(x, 64)));
                let zero = RealInterval::from_u64(0, 64);
                let before = at(x - 1)?;
                let here = at(x)?;
                out.push(SampleCheck {
                    id: format!("exponent at {} is positive", x - 1),
                    verdict: if zero.certainly_lt(&before) { Verdict::Satisfies } else { Verdict::Violates },
                    lhs: zero.clone(),
                    rhs: before,
                });
                out.push(SampleCheck {
                    id: format!("exponent at {x} is negative"),
                    verdict: if here.certainly_lt(&zero) { Verdict::Satisfies } else { Verdict::Violates },
                    lhs: here,
                    rhs: zero,
                });
            }
            out
        }
        LemmaId::L4_1 | LemmaId::L4_3 => {
            let (lo, hi) = samples.bounds();
            if lo < 3 {
                return Err(Error::domain("harmonic bounds need n ≥ 3"));
            }
            let wanted: std::collections::HashSet<u64> = pts.iter().copied().collect();
            let bits = 128;
            let mut series = HarmonicPrimeIntervals::new(bits);
            let hps: Vec<RealInterval> = (1..=hi).map(|_| series.step()).collect();
            let half = ThresholdKind::HalfEgamma.expr().canonical().interval_at(bits).map_err(fault)?;
            let items: Vec<u64> = (lo..=hi).filter(|n| wanted.contains(n)).collect();
            items
                .par_iter()
                .map(|&n| {
                    let hp = &hps[(n - 1) as usize];
                    let quick = (|| -> std::result::Result<SampleCheck, Fault> {
                        let ni = RealInterval::from_u64(n, bits);
                        let lnn = ni.ln()?;
                        let term = hp.exp().mul(&hp.ln()?);
                        let main = half.mul(&ni).mul(&lnn.ln()?);
                        Ok(match lemma {
                            LemmaId::L4_1 => {
                                let lhs = main;
                                let rhs = ni.mul_rational(&Rational::from((12, 100))).div(&lnn)?.add(&term);
                                let v = interval_verdict(&lhs, &rhs, Strictness::NonStrict);
                                SampleCheck { id: format!("n = {n}"), lhs, rhs, verdict: v }
                            }
                            _ => {
                                let rhs = main.add(&ni.mul_rational(&Rational::from((3, 10))).div(&lnn)?);
                                let v = interval_verdict(&term, &rhs, Strictness::NonStrict);
                                SampleCheck { id: format!("n = {n}"), lhs: term, rhs, verdict: v }
                            }
                        })
                    })();
                    match quick {
                        Ok(c) if c.verdict != Verdict::Unresolved => Ok(c),
                        _ => {
                            let hp = RealExpr::rational(harmonic_prime(n)?);
                            let term = hp.clone().exp() * hp.ln();
                            let ni = int(n);
                            let main = ThresholdKind::HalfEgamma.expr() * ni.clone() * ln(ln(ni.clone()));
                            let (l, r) = if lemma == LemmaId::L4_1 {
                                (main, RealExpr::rat(12, 100) * ni.clone() / ln(ni) + term)
                            } else {
                                (term, main + RealExpr::rat(3, 10) * ni.clone() / ln(ni))
                            };
                            sample(format!("n = {n}"), &l, &r, Strictness::NonStrict, ev)
                        }
                    }
                })
                .collect::<Result<_>>()?
        }
        LemmaId::L4_2 => {
            let (_, hi) = samples.bounds();
            let wanted: std::collections::HashSet<u64> = pts.iter().copied().collect();
            let bits = 128;
            let base = (RealExpr::gamma() - ln(int(2))).canonical().interval_at(bits).map_err(fault)?;
            let exact: Vec<(u64, Rational)> = HarmonicSeries::new()
                .take(hi as usize)
                .filter(|(n, _, _)| wanted.contains(n))
                .map(|(n, _, hp)| (n, hp))
                .collect();
            exact
                .par_iter()
                .map(|(n, hp)| {
                    let n = *n;
                    let check = |bits: u32| -> std::result::Result<Option<SampleCheck>, Fault> {
                        let base = if bits == 128 { base.clone() } else { (RealExpr::gamma() - ln(int(2))).canonical().interval_at(bits)? };
                        let approx = RealInterval::from_u64(n, bits).ln()?.add(&base);
                        let diff = RealInterval::from_rational(hp, bits).sub(&approx);
                        let bound = RealInterval::from_rational(&Rational::from((3, 4 * n)), bits);
                        let zero = RealInterval::from_u64(0, bits);
                        let v = if zero.certainly_lt(&diff) && diff.certainly_lt(&bound) {
                            Verdict::Satisfies
                        } else if diff.hi() <= zero.lo() || diff.lo() >= bound.hi() {
                            Verdict::Violates
                        } else {
                            Verdict::Unresolved
                        };
                        let c = SampleCheck { id: format!("n = {n}"), lhs: diff, rhs: bound, verdict: v };
                        Ok((v != Verdict::Unresolved).then_some(c))
                    };
                    ev.with_start(128).escalate("harmonic sandwich", check).or_else(|_| {
                        Ok(SampleCheck {
                            id: format!("n = {n}"),
                            lhs: RealInterval::from_rational(hp, 64),
                            rhs: RealInterval::from_rational(&Rational::from((3, 4 * n)), 64),
                            verdict: Verdict::Unresolved,
                        })
                    })
                })
                .collect::<Result<_>>()?
        }
        LemmaId::L4_4Concavity => {
            let (a, b) = bisect_sign(concavity_numerator, Rational::from(4), Rational::from(10), &Rational::from((1, 1u64 << 40)), ev)?;
            let root = RealInterval::from_rational_bounds(&a, &b, 128);
            derived.push(("inflection point t".to_string(), root.clone()));
            derived.push(("exp(t)".to_string(), root.exp()));
            let zero = int(0);
            pts.par_iter()
                .map(|&t| {
                    sample(format!("s''({t}) < 0"), &concavity_numerator(&int(t)), &zero, Strictness::Strict, ev)
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(LemmaReport::from_checks(lemma, samples.clone(), checks, derived))
}

/// Boundary witnesses for the odd squarefree analogue: the smallest cases,
/// by number of prime factors, that satisfy `f(n) < e^γ/2`.
pub fn squarefree_witnesses() -> Vec<Factorization> {
    ["29", "3*37", "3*5*41", "3*5*7*37", "3*5*7*11*29", "3*5*7*11*13*23"]
        .iter()
        .map(|s| s.parse().expect("valid"))
        .collect()
}
