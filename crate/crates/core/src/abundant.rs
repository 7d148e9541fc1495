//! Colossally abundant and odd colossally abundant numbers.
//!
//! For ε > 0 the (odd) colossally abundant number is `∏ p^{α_p(ε)}` with
//! `α_p(ε) = ⌊(log(p^{1+ε} − 1) − log(p^ε − 1))/log p⌋ − 1`. The exponent of
//! `p` steps from `a − 1` to `a` as ε decreases through
//! `t(p, a) = log_p((p^{a+1} − 1)/(p^{a+1} − p))`, so sorting these critical
//! values in decreasing order enumerates the numbers one prime at a time.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::criteria::SampleCheck;
use crate::divisors::{sigma, sigma_prime_power, Factorization, Verdict};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::realnum::{Comparison, Evaluator, Fault, RealExpr, RealInterval};

/// Which family is generated: all integers or odd integers only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    All,
    Odd,
}

impl Parity {
    pub fn smallest_prime(self) -> u64 {
        match self {
            Parity::All => 2,
            Parity::Odd => 3,
        }
    }

    /// Largest admissible ε: `log₂3 − 1` for all integers, `log₃4 − 1` for odd.
    pub fn epsilon_ceiling(self) -> RealExpr {
        match self {
            Parity::All => RealExpr::int(3).log_base(RealExpr::int(2)) - RealExpr::int(1),
            Parity::Odd => RealExpr::int(4).log_base(RealExpr::int(3)) - RealExpr::int(1),
        }
    }
}

/// The ratio `(p^{a+1} − 1)/(p^{a+1} − p)` whose base-`p` logarithm is `t(p, a)`.
pub fn threshold_ratio(p: u64, a: u32) -> Rational {
    let pa1 = Integer::from(p).pow(a + 1);
    Rational::from((Integer::from(&pa1 - 1u32), pa1 - p))
}

/// Symbolic `t(p, a)`.
pub fn threshold_expr(p: u64, a: u32) -> RealExpr {
    RealExpr::rational(threshold_ratio(p, a)).log_base(RealExpr::int(p))
}

/// A critical value of ε: below it, `p` carries exponent at least `a`.
#[derive(Clone, Debug)]
pub struct CriticalEpsilon {
    pub p: u64,
    pub a: u32,
    pub threshold: RealExpr,
    enclosure: RealInterval,
}

impl CriticalEpsilon {
    pub fn new(p: u64, a: u32) -> Self {
        let threshold = threshold_expr(p, a);
        let enclosure = threshold.interval_at(ENCLOSURE_BITS).expect("threshold is well defined");
        CriticalEpsilon { p, a, threshold, enclosure }
    }

    pub fn enclosure(&self) -> &RealInterval {
        &self.enclosure
    }
}

const ENCLOSURE_BITS: u32 = 128;

/// Compares two critical values, first by cached enclosures and then by
/// certified escalation.
fn compare_thresholds(x: &CriticalEpsilon, y: &CriticalEpsilon, ev: &Evaluator) -> Comparison {
    if x.enclosure.certainly_lt(&y.enclosure) {
        Comparison::Less
    } else if y.enclosure.certainly_lt(&x.enclosure) {
        Comparison::Greater
    } else if x.p == y.p && x.a == y.a {
        Comparison::Equal
    } else {
        ev.compare(&x.threshold, &y.threshold)
    }
}

/// Two adjacent thresholds whose order could not be certified.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdTie {
    pub first: (u64, u32),
    pub second: (u64, u32),
    pub position: usize,
}

/// The critical values above `minEpsilon`, sorted in decreasing order.
#[derive(Clone, Debug)]
pub struct CriticalStream {
    pub parity: Parity,
    pub prime_limit: u64,
    /// Largest prime `P ≤ prime_limit`.
    pub largest_prime: u64,
    /// `t(P, 1) = log_P(P + 1) − 1`.
    pub min_epsilon: RealExpr,
    pub events: Vec<CriticalEpsilon>,
    /// Adjacent pairs left in tie-break order (smaller prime first).
    pub ties: Vec<ThresholdTie>,
}

/// Every `(p, a)` with `t(p, a) > t(P, 1)`, where `P` is the largest prime
/// not exceeding `prime_limit`, in strictly decreasing order of threshold.
pub fn critical_epsilons(table: &PrimeTable, prime_limit: u64, parity: Parity, ev: &Evaluator) -> Result<CriticalStream> {
    if prime_limit < parity.smallest_prime() {
        return Err(Error::domain(format!("prime limit must be at least {}", parity.smallest_prime())));
    }
    if prime_limit > table.limit() {
        return Err(Error::domain(format!("prime limit {prime_limit} exceeds sieve limit {}", table.limit())));
    }
    let primes: Vec<u64> = table.up_to(prime_limit).iter().copied().filter(|&p| p >= parity.smallest_prime()).collect();
    let largest = *primes.last().expect("at least one prime");
    let min = CriticalEpsilon::new(largest, 1);

    let per_prime: Vec<Result<Vec<CriticalEpsilon>>> = primes
        .par_iter()
        .map(|&p| {
            let mut out = Vec::new();
            if p == largest {
                return Ok(out);
            }
            let mut a = 1;
            loop {
                let c = CriticalEpsilon::new(p, a);
                match compare_thresholds(&c, &min, ev) {
                    Comparison::Greater => out.push(c),
                    Comparison::Less => break,
                    Comparison::Equal | Comparison::Unresolved => {
                        return Err(Error::ThresholdTie { p, a, q: largest, b: 1, bits: ev.ceiling_bits() })
                    }
                }
                a += 1;
            }
            Ok(out)
        })
        .collect();
    let mut events = Vec::new();
    for r in per_prime {
        events.extend(r?);
    }

    // Sort by enclosure midpoint, then repair with certified comparisons.
    events.par_sort_by(|x, y| {
        let (mx, my) = (x.enclosure.midpoint(), y.enclosure.midpoint());
        my.partial_cmp(&mx).unwrap_or(Ordering::Equal).then(x.p.cmp(&y.p))
    });
    let mut ties = Vec::new();
    let mut i = 1;
    while i < events.len() {
        match compare_thresholds(&events[i - 1], &events[i], ev) {
            Comparison::Greater => i += 1,
            Comparison::Less => {
                events.swap(i - 1, i);
                i = i.saturating_sub(1).max(1);
            }
            Comparison::Equal | Comparison::Unresolved => {
                if events[i - 1].p > events[i].p {
                    events.swap(i - 1, i);
                }
                i += 1;
            }
        }
    }
    for i in 1..events.len() {
        if !matches!(compare_thresholds(&events[i - 1], &events[i], ev), Comparison::Greater) {
            ties.push(ThresholdTie {
                first: (events[i - 1].p, events[i - 1].a),
                second: (events[i].p, events[i].a),
                position: i - 1,
            });
        }
    }
    Ok(CriticalStream { parity, prime_limit, largest_prime: largest, min_epsilon: min.threshold, events, ties })
}

/// One number in the enumeration.
#[derive(Clone, Debug)]
pub struct AbundantRecord {
    /// 1-based position in the enumeration.
    pub index: usize,
    pub n: Integer,
    pub factorization: Factorization,
    pub sigma: Integer,
    pub parity: Parity,
    /// The record is generated exactly by ε in `[eps_range.0, eps_range.1)`.
    pub eps_range: (RealExpr, RealExpr),
    /// The prime whose exponent was raised to produce this record, and its new exponent.
    pub step: (u64, u32),
}

impl AbundantRecord {
    /// `σ(n)/n` exactly.
    pub fn abundancy(&self) -> Rational {
        Rational::from((self.sigma.clone(), self.n.clone()))
    }
}

/// Walks a critical stream and yields the records in increasing order.
pub struct AbundantStream {
    stream: CriticalStream,
    pos: usize,
    exps: Vec<(u64, u32)>,
    n: Integer,
    sigma: Integer,
}

impl AbundantStream {
    pub fn new(stream: CriticalStream) -> Self {
        AbundantStream { stream, pos: 0, exps: Vec::new(), n: Integer::from(1), sigma: Integer::from(1) }
    }

    pub fn critical(&self) -> &CriticalStream {
        &self.stream
    }
}

impl Iterator for AbundantStream {
    type Item = AbundantRecord;

    fn next(&mut self) -> Option<AbundantRecord> {
        let ev = self.stream.events.get(self.pos)?;
        let (p, a) = (ev.p, ev.a);
        match self.exps.binary_search_by_key(&p, |&(q, _)| q) {
            Ok(i) => {
                debug_assert_eq!(self.exps[i].1 + 1, a);
                self.exps[i].1 = a;
            }
            Err(i) => {
                debug_assert_eq!(a, 1);
                self.exps.insert(i, (p, a));
            }
        }
        // σ(p^a) / σ(p^{a-1}) applied exactly.
        self.sigma /= sigma_prime_power(p, a - 1);
        self.sigma *= sigma_prime_power(p, a);
        self.n *= p;
        let upper = ev.threshold.clone();
        let lower = match self.stream.events.get(self.pos + 1) {
            Some(next) => next.threshold.clone(),
            None => self.stream.min_epsilon.clone(),
        };
        self.pos += 1;
        Some(AbundantRecord {
            index: self.pos,
            n: self.n.clone(),
            factorization: Factorization::from_pairs(self.exps.clone()).expect("valid"),
            sigma: self.sigma.clone(),
            parity: self.stream.parity,
            eps_range: (lower, upper),
            step: (p, a),
        })
    }
}

pub fn enumerate_abundant(table: &PrimeTable, prime_limit: u64, parity: Parity, ev: &Evaluator) -> Result<AbundantStream> {
    Ok(AbundantStream::new(critical_epsilons(table, prime_limit, parity, ev)?))
}

/// All records with `n < bound`, growing the prime limit until the stream
/// provably extends past `bound`.
pub fn abundant_below(table: &PrimeTable, bound: &Integer, parity: Parity, ev: &Evaluator) -> Result<Vec<AbundantRecord>> {
    let mut limit = 8u64;
    loop {
        if limit > table.limit() {
            return Err(Error::domain(format!("sieve limit {} too small to reach {bound}", table.limit())));
        }
        let recs: Vec<AbundantRecord> = enumerate_abundant(table, limit, parity, ev)?.collect();
        if recs.last().is_some_and(|r| r.n >= *bound) {
            return Ok(recs.into_iter().take_while(|r| r.n < *bound).collect());
        }
        limit *= 2;
    }
}

// ---------------------------------------------------------------------------
// Exponent formula

/// `(log(p^{1+ε} − 1) − log(p^ε − 1))/log p`, whose floor minus one is `α_p(ε)`.
/// `p^{1+ε}` is written as `p·p^ε` so that thresholds of `p` simplify exactly.
pub fn alpha_argument(p: u64, eps: &RealExpr) -> RealExpr {
    let pe = RealExpr::int(p).pow_real(eps.clone());
    let one = RealExpr::int(1);
    ((RealExpr::int(p) * pe.clone() - one.clone()).ln() - (pe - one).ln()) / RealExpr::int(p).ln()
}

/// `α_p(ε)`. At an exact critical value the smaller exponent is returned; a
/// critical value that cannot be recognised symbolically and is not
/// separated by the interval engine is reported as [`Error::Tie`].
pub fn alpha_p(p: u64, eps: &RealExpr, ev: &Evaluator) -> Result<u32> {
    if ev.sign(eps) != Comparison::Greater {
        return Err(Error::domain("α_p(ε) requires ε > 0"));
    }
    let arg = alpha_argument(p, eps).canonical();
    if let Some(v) = arg.as_rational() {
        if *v.denom() == 1 {
            // ε = t(p, v − 1): both v − 2 and v − 1 are optimal; take the smaller.
            let v = v.numer().to_u32().ok_or_else(|| Error::domain("exponent overflow"))?;
            return Ok(v.saturating_sub(2));
        }
    }
    match ev.floor_exact(&arg) {
        Ok(fl) => Ok(fl.to_u32().ok_or_else(|| Error::domain("exponent overflow"))?.saturating_sub(1)),
        Err(Error::UnresolvedFloor { .. }) => {
            let iv = ev.enclose_at(&arg, ev.ceiling_bits())?;
            let (lo, hi) = iv.floors();
            Err(Error::Tie {
                p,
                lower: lo.to_u32().unwrap_or(0).saturating_sub(1),
                upper: hi.to_u32().unwrap_or(0).saturating_sub(1),
            })
        }
        Err(e) => Err(e),
    }
}

/// The (odd) colossally abundant number generated by `eps`.
pub fn assemble(eps: &RealExpr, parity: Parity, table: &PrimeTable, ev: &Evaluator) -> Result<Factorization> {
    if ev.sign(eps) != Comparison::Greater {
        return Err(Error::domain("ε must be positive"));
    }
    if ev.compare(eps, &parity.epsilon_ceiling()) == Comparison::Greater {
        return Err(Error::domain("ε exceeds the admissible ceiling for this parity"));
    }
    let mut out = Vec::new();
    for &p in table.primes() {
        if p < parity.smallest_prime() {
            continue;
        }
        let a = alpha_p(p, eps, ev)?;
        if a == 0 {
            // exponents are non-increasing in p, so every larger prime is absent
            return Factorization::from_pairs(out);
        }
        out.push((p, a));
    }
    Err(Error::domain("sieve limit reached before the exponents vanished"))
}

// ---------------------------------------------------------------------------
// x_k

/// `F(x, k) = log(1 + 1/(x + x² + ⋯ + x^k))/log x` at a rational `x > 1`.
pub fn f_xk_expr(x: &Rational, k: u32) -> RealExpr {
    let mut s = Rational::new();
    let mut pw = Rational::from(1);
    for _ in 0..k {
        pw *= x;
        s += &pw;
    }
    let arg = Rational::from(1) + s.recip();
    RealExpr::rational(arg).ln() / RealExpr::rational(x.clone()).ln()
}

fn dyadic_mid(a: &Rational, b: &Rational) -> Rational {
    Rational::from(a + b) / 2u32
}

/// Encloses the unique `x > 1` with `F(x, k) = ε` to width at most `tol`, by
/// bisection on the strictly decreasing `F(·, k)`.
pub fn x_k(eps: &RealExpr, k: u32, tol: &Rational, ev: &Evaluator) -> Result<RealInterval> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if *tol <= 0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    let eps_iv = ev.eval(eps, &Rational::from((1, 1u64 << 20)))?;
    let eps_lo = eps_iv.lo_rational();
    if eps_lo <= 0 {
        return Err(Error::domain("x_k requires ε > 0"));
    }
    // sign of F(x) − ε: Greater means the root lies above x
    let side = |x: &Rational| -> Result<Comparison> {
        match ev.compare(&f_xk_expr(x, k), eps) {
            Comparison::Unresolved => Err(Error::PrecisionExhausted {
                bits: ev.ceiling_bits(),
                detail: format!("F({x}, {k}) against ε"),
            }),
            c => Ok(c),
        }
    };
    let mut lo = Rational::from(1) + Rational::from((1, 1u64 << 20));
    let mut hi = {
        let h = Rational::from(4) / Rational::from(&eps_lo * &eps_lo);
        if h > 4 {
            h.ceil()
        } else {
            Rational::from(4)
        }
    };
    while side(&lo)? == Comparison::Less {
        lo = Rational::from(1) + Rational::from(&lo - 1u32) / 1024u32;
    }
    while side(&hi)? == Comparison::Greater {
        hi *= 2u32;
    }
    let bits = 64 + tol.denom().significant_bits() + 64;
    for x in [&lo, &hi] {
        if side(x)? == Comparison::Equal {
            return Ok(RealInterval::from_rational(x, bits));
        }
    }
    while Rational::from(&hi - &lo) > *tol {
        let mid = dyadic_mid(&lo, &hi);
        match side(&mid)? {
            Comparison::Greater => lo = mid,
            Comparison::Less => hi = mid,
            _ => return Ok(RealInterval::from_rational(&mid, bits)),
        }
    }
    Ok(RealInterval::from_rational_bounds(&lo, &hi, bits))
}

/// Certified checks of `x_k > x_1^{1/k}` (k = 2..=6), `√(2x_1) > x_2 > √x_1`,
/// and, when `x_1 ≥ 1530`, `x_2 > √(2x_1) − √(2x_1)·log 2/(2 log x_1)`.
#[derive(Clone, Debug, Serialize)]
pub struct XkLemmaReport {
    pub epsilon: String,
    pub x: Vec<RealInterval>,
    pub checks: Vec<SampleCheck>,
}

fn check_lt(id: String, l: RealInterval, r: RealInterval) -> SampleCheck {
    let verdict = if l.certainly_lt(&r) {
        Verdict::Satisfies
    } else if r.certainly_le(&l) {
        Verdict::Violates
    } else {
        Verdict::Unresolved
    };
    SampleCheck { id, lhs: l, rhs: r, verdict }
}

pub fn verify_xk_lemma(eps: &RealExpr, ev: &Evaluator) -> Result<XkLemmaReport> {
    let tol = Rational::from((1, 1u64 << 48));
    let xs: Vec<RealInterval> = (1..=6).map(|k| x_k(eps, k, &tol, ev)).collect::<Result<_>>()?;
    let fault = |f: Fault| match f {
        Fault::Domain(m) => Error::Domain(m),
        Fault::Indeterminate => Error::domain("indeterminate"),
    };
    let x1 = &xs[0];
    let mut checks = Vec::new();
    for k in 2..=6u32 {
        let root = x1.pow_rational(&Rational::from((1, k))).map_err(fault)?;
        checks.push(check_lt(format!("x_{k} > x_1^(1/{k})"), root, xs[k as usize - 1].clone()));
    }
    let two_x1 = x1.mul_rational(&Rational::from(2));
    let s2 = two_x1.sqrt().map_err(fault)?;
    checks.push(check_lt("x_2 < sqrt(2 x_1)".into(), xs[1].clone(), s2.clone()));
    checks.push(check_lt("sqrt(x_1) < x_2".into(), x1.sqrt().map_err(fault)?, xs[1].clone()));
    if Rational::from(1530) <= x1.lo_rational() {
        let ln2 = RealInterval::from_u64(2, x1.precision_bits()).ln().map_err(fault)?;
        let corr = s2.mul(&ln2).div(&x1.ln().map_err(fault)?.mul_rational(&Rational::from(2))).map_err(fault)?;
        checks.push(check_lt("x_2 > sqrt(2x_1)(1 - log 2/(2 log x_1))".into(), s2.sub(&corr), xs[1].clone()));
    }
    Ok(XkLemmaReport { epsilon: eps.to_string(), x: xs, checks })
}

/// Recomputes σ from the factorization; used to audit incremental updates.
pub fn sigma_from_scratch(rec: &AbundantRecord) -> Integer {
    sigma(&rec.factorization)
}
