//! Factorizations and divisor sums: σ, σ_{k,l}, φ, the ratio `f(n)` and its
//! residue-class variant, and the certified inequality reports built on them.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rug::integer::IsPrime;
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::realnum::{Evaluator, RealExpr, RealInterval};

/// Prime-power decomposition `n = ∏ p^e` with strictly increasing primes.
/// The empty factorization is `n = 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u64, u32)>", into = "Vec<(u64, u32)>")]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl TryFrom<Vec<(u64, u32)>> for Factorization {
    type Error = Error;

    fn try_from(v: Vec<(u64, u32)>) -> Result<Self> {
        Factorization::from_pairs(v)
    }
}

impl From<Factorization> for Vec<(u64, u32)> {
    fn from(f: Factorization) -> Self {
        f.factors
    }
}

impl Factorization {
    pub fn one() -> Self {
        Factorization::default()
    }

    /// Validates and wraps `(p, e)` pairs.
    pub fn from_pairs(factors: Vec<(u64, u32)>) -> Result<Self> {
        for w in factors.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Parse(format!("primes not strictly increasing: {} then {}", w[0].0, w[1].0)));
            }
        }
        for &(p, e) in &factors {
            if e == 0 {
                return Err(Error::Parse(format!("zero exponent for {p}")));
            }
            if !is_prime_u64(p) {
                return Err(Error::Parse(format!("{p} is not prime")));
            }
        }
        Ok(Factorization { factors })
    }

    /// Builds from pairs in any order, merging repeated primes.
    pub fn from_unsorted(mut factors: Vec<(u64, u32)>) -> Result<Self> {
        factors.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        merged.retain(|&(_, e)| e > 0);
        Factorization::from_pairs(merged)
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn value(&self) -> Integer {
        let mut n = Integer::from(1);
        for &(p, e) in &self.factors {
            n *= Integer::from(p).pow(e);
        }
        n
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        match self.factors.binary_search_by_key(&p, |&(q, _)| q) {
            Ok(i) => self.factors[i].1,
            Err(_) => 0,
        }
    }

    pub fn divides_by(&self, p: u64) -> bool {
        self.exponent_of(p) > 0
    }

    pub fn is_odd(&self) -> bool {
        !self.divides_by(2)
    }

    /// `n · p^k` for a prime `p`.
    pub fn times_prime_power(&self, p: u64, k: u32) -> Self {
        let mut factors = self.factors.clone();
        if k == 0 {
            return self.clone();
        }
        match factors.binary_search_by_key(&p, |&(q, _)| q) {
            Ok(i) => factors[i].1 += k,
            Err(i) => factors.insert(i, (p, k)),
        }
        Factorization { factors }
    }

    /// `n` with the full power of `p` removed.
    pub fn without(&self, p: u64) -> Self {
        Factorization { factors: self.factors.iter().copied().filter(|&(q, _)| q != p).collect() }
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    /// True when exponents do not increase as the primes increase.
    pub fn exponents_non_increasing(&self) -> bool {
        self.factors.windows(2).all(|w| w[0].1 >= w[1].1)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Factorization {
    type Err = Error;

    /// Parses `2^5*3^3*5`; `·` and `.` are accepted as separators, `1` is the
    /// empty product.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Factorization::one());
        }
        let mut pairs = Vec::new();
        for term in s.split(['*', '·', '.']) {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Parse(format!("empty factor in {s:?}")));
            }
            let (p, e) = match term.split_once('^') {
                Some((p, e)) => (p.trim(), e.trim()),
                None => (term, "1"),
            };
            let p: u64 = p.parse().map_err(|_| Error::Parse(format!("bad prime {p:?}")))?;
            let e: u32 = e.parse().map_err(|_| Error::Parse(format!("bad exponent {e:?}")))?;
            pairs.push((p, e));
        }
        let f = Factorization::from_unsorted(pairs)?;
        Ok(f)
    }
}

// ---------------------------------------------------------------------------
// Factoring

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const TRIAL_LIMIT: u64 = 10_000_000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin; the base set is exact for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard's rho; returns a nontrivial factor of an odd
/// composite `n`. Deterministic: the polynomial constant is stepped.
fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1..n {
        let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
        let (mut y, m) = (2u64, 128u64);
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("composite input always splits")
}

fn factor_u64_into(n: u64, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push((n, 1));
        return;
    }
    let d = pollard_brent(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

/// Factorization of a 64-bit integer `n ≥ 1`.
pub fn factorize_u64(mut n: u64) -> Factorization {
    assert!(n >= 1, "factorize_u64 requires n >= 1");
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    factor_u64_into(n, &mut out);
    Factorization::from_unsorted(out).expect("factors are prime")
}

fn trial_primes() -> &'static [u64] {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::sieve(TRIAL_LIMIT).expect("valid limit")).primes()
}

/// Exact factorization of `n ≥ 1`. Inputs above 64 bits are reduced by trial
/// division up to 10^7 and finished with Pollard–Brent once the cofactor
/// fits in 64 bits. A prime factor above 2^64 is reported as an error.
pub fn factorize(n: &Integer) -> Result<Factorization> {
    if *n < 1 {
        return Err(Error::domain(format!("cannot factor {n}")));
    }
    if let Some(v) = n.to_u64() {
        return Ok(factorize_u64(v));
    }
    let mut rest = n.clone();
    let mut out = Vec::new();
    for &p in trial_primes() {
        if rest.is_divisible_u(p as u32) {
            let mut e = 0;
            while rest.is_divisible_u(p as u32) {
                rest.div_exact_u_mut(p as u32);
                e += 1;
            }
            out.push((p, e));
            if let Some(v) = rest.to_u64() {
                let tail = factorize_u64(v);
                out.extend_from_slice(tail.factors());
                return Factorization::from_unsorted(out);
            }
        }
        if Integer::from(p) * p > rest {
            break;
        }
    }
    if let Some(v) = rest.to_u64() {
        out.extend_from_slice(factorize_u64(v).factors());
        return Factorization::from_unsorted(out);
    }
    if rest.is_probably_prime(40) != IsPrime::No {
        return Err(Error::domain(format!("prime factor {rest} exceeds 64 bits")));
    }
    Err(Error::domain(format!("cofactor {rest} has no prime factor below {TRIAL_LIMIT} and exceeds 64 bits")))
}

// ---------------------------------------------------------------------------
// Divisor sums

/// σ(p^e) = (p^{e+1} − 1)/(p − 1).
pub fn sigma_prime_power(p: u64, e: u32) -> Integer {
    let pe1 = Integer::from(p).pow(e + 1);
    (pe1 - 1u32) / (p - 1)
}

pub fn sigma(f: &Factorization) -> Integer {
    let mut s = Integer::from(1);
    for &(p, e) in f.factors() {
        s *= sigma_prime_power(p, e);
    }
    s
}

fn check_residue(k: u64, l: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    if gcd(l % k, k) != 1 {
        return Err(Error::domain(format!("gcd({l}, {k}) ≠ 1")));
    }
    Ok(())
}

/// σ_{k,l}(n): product of σ(p^e) over prime powers with `p ≡ l (mod k)`.
pub fn sigma_mod(f: &Factorization, k: u64, l: u64) -> Result<Integer> {
    check_residue(k, l)?;
    let mut s = Integer::from(1);
    for &(p, e) in f.factors() {
        if p % k == l % k {
            s *= sigma_prime_power(p, e);
        }
    }
    Ok(s)
}

pub fn euler_phi(f: &Factorization) -> Integer {
    let mut phi = Integer::from(1);
    for &(p, e) in f.factors() {
        phi *= Integer::from(p).pow(e - 1) * (p - 1);
    }
    phi
}

pub fn is_squarefree(f: &Factorization) -> bool {
    f.factors().iter().all(|&(_, e)| e == 1)
}

/// `σ(n)/n` as an exact rational.
pub fn abundancy(f: &Factorization) -> Rational {
    Rational::from((sigma(f), f.value()))
}

/// Symbolic `f(n) = σ(n)/(n log log n)`, defined for `n ≥ 3`.
pub fn f_ratio_expr(f: &Factorization) -> Result<RealExpr> {
    let n = f.value();
    if n < 3 {
        return Err(Error::domain(format!("f(n) requires n ≥ 3, got {n}")));
    }
    Ok(RealExpr::rational(abundancy(f)) / RealExpr::Int(n).ln().ln())
}

/// Certified enclosure of `f(n)` of width at most `tol`.
pub fn f_ratio(f: &Factorization, tol: &Rational, ev: &Evaluator) -> Result<RealInterval> {
    ev.eval(&f_ratio_expr(f)?, tol)
}

/// Symbolic `f_{k,l}(n) = σ_{k,l}(n) / (n (log(φ(k) log n))^{1/φ(k)})`.
pub fn f_mod_expr(f: &Factorization, k: u64, l: u64) -> Result<RealExpr> {
    check_residue(k, l)?;
    let n = f.value();
    if n < 2 {
        return Err(Error::domain("f_{k,l}(1) is undefined: log n = 0"));
    }
    let phi = euler_phi(&factorize_u64(k));
    let phi_r = Rational::from(phi.clone());
    let inner = RealExpr::Int(phi) * RealExpr::Int(n.clone()).ln();
    let denom = RealExpr::Int(n) * inner.ln().powr(phi_r.recip());
    Ok(RealExpr::Int(sigma_mod(f, k, l)?) / denom)
}

pub fn f_mod(f: &Factorization, k: u64, l: u64, tol: &Rational, ev: &Evaluator) -> Result<RealInterval> {
    check_residue(k, l)?;
    let n = f.value();
    if n >= 2 {
        // The outer logarithm needs φ(k)·log n > 1.
        let phi = euler_phi(&factorize_u64(k));
        let arg = RealExpr::Int(phi) * RealExpr::Int(n).ln();
        if ev.compare(&arg, &RealExpr::int(1)) != crate::realnum::Comparison::Greater {
            return Err(Error::domain("f_{k,l} requires φ(k)·log n > 1"));
        }
    }
    ev.eval(&f_mod_expr(f, k, l)?, tol)
}

// ---------------------------------------------------------------------------
// Certified inequality decisions

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Satisfies,
    Violates,
    Unresolved,
}

/// Whether the inequality being tested is `lhs < rhs` or `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strictness {
    Strict,
    NonStrict,
}

fn serialize_integer<S: Serializer>(n: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// Outcome of one certified inequality test on a specific integer.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub subject: Factorization,
    #[serde(serialize_with = "serialize_integer")]
    pub n: Integer,
    pub threshold_kind: String,
    pub strictness: Strictness,
    pub lhs: RealInterval,
    pub rhs: RealInterval,
    pub verdict: Verdict,
    pub precision_bits: u32,
    /// Exact value of the rational part of the left side, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

/// Outcome of [`decide_inequality`].
#[derive(Clone, Debug)]
pub struct Decided {
    pub verdict: Verdict,
    pub lhs: RealInterval,
    pub rhs: RealInterval,
    pub precision_bits: u32,
}

/// Decides `lhs < rhs` (strict) or `lhs ≤ rhs` (non-strict), escalating
/// precision until the enclosures separate.
pub fn decide_inequality(lhs: &RealExpr, rhs: &RealExpr, strictness: Strictness, ev: &Evaluator) -> Result<Decided> {
    let (cl, cr) = (lhs.canonical(), rhs.canonical());
    let mut last: Option<Decided> = None;
    if cl == cr {
        let bits = ev.start_bits();
        let iv = ev.enclose_at(&cl, bits)?;
        let verdict = match strictness {
            Strictness::Strict => Verdict::Violates,
            Strictness::NonStrict => Verdict::Satisfies,
        };
        return Ok(Decided { verdict, lhs: iv.clone(), rhs: iv, precision_bits: bits });
    }
    let res = ev.escalate("inequality", |bits| {
        let l = cl.interval_at(bits)?;
        let r = cr.interval_at(bits)?;
        let verdict = interval_verdict(&l, &r, strictness);
        let d = Decided { verdict, lhs: l, rhs: r, precision_bits: bits };
        if verdict == Verdict::Unresolved {
            last = Some(d);
            Ok(None)
        } else {
            Ok(Some(d))
        }
    });
    match res {
        Err(Error::PrecisionExhausted { .. }) if last.is_some() => Ok(last.unwrap()),
        other => other,
    }
}

/// Verdict certified by a pair of enclosures, if any.
pub fn interval_verdict(l: &RealInterval, r: &RealInterval, strictness: Strictness) -> Verdict {
    match strictness {
        Strictness::Strict => {
            if l.hi() < r.lo() {
                Verdict::Satisfies
            } else if l.lo() >= r.hi() {
                Verdict::Violates
            } else {
                Verdict::Unresolved
            }
        }
        Strictness::NonStrict => {
            if l.hi() <= r.lo() {
                Verdict::Satisfies
            } else if l.lo() > r.hi() {
                Verdict::Violates
            } else {
                Verdict::Unresolved
            }
        }
    }
}

impl CheckReport {
    pub fn from_decision(subject: &Factorization, kind: &str, strictness: Strictness, d: Decided) -> Self {
        CheckReport {
            n: subject.value(),
            subject: subject.clone(),
            threshold_kind: kind.to_string(),
            strictness,
            lhs: d.lhs,
            rhs: d.rhs,
            verdict: d.verdict,
            precision_bits: d.precision_bits,
            exact: None,
        }
    }
}

// ---------------------------------------------------------------------------
// Segmented σ sieve for range scans

/// σ(n), the 2-adic valuation and squarefreeness of the odd part for every
/// `n` in `[lo, lo + len)`.
#[derive(Clone, Debug)]
pub struct DivisorSegment {
    pub lo: u64,
    pub sigma: Vec<u64>,
    pub v2: Vec<u8>,
    pub odd_squarefree: Vec<bool>,
}

impl DivisorSegment {
    /// `base` must contain every prime up to `√(lo + len − 1)`.
    pub fn compute(lo: u64, len: usize, base: &PrimeTable) -> Self {
        assert!(lo >= 1);
        let hi = lo + len as u64; // exclusive
        assert!(base.limit().saturating_mul(base.limit()) >= hi - 1, "base primes too small for segment");
        let mut rest: Vec<u64> = (lo..hi).collect();
        let mut sigma = vec![1u64; len];
        let mut v2 = vec![0u8; len];
        let mut odd_squarefree = vec![true; len];
        for &p in base.primes() {
            if p * p > hi - 1 {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut m = first;
            while m < hi {
                let i = (m - lo) as usize;
                let mut pe = 1u64;
                let mut e = 0u8;
                while rest[i] % p == 0 {
                    rest[i] /= p;
                    pe *= p;
                    e += 1;
                }
                sigma[i] *= (pe * p - 1) / (p - 1);
                if p == 2 {
                    v2[i] = e;
                } else if e > 1 {
                    odd_squarefree[i] = false;
                }
                m += p;
            }
        }
        for i in 0..len {
            if rest[i] > 1 {
                // a single prime factor above √hi remains
                sigma[i] *= rest[i] + 1;
            }
        }
        DivisorSegment { lo, sigma, v2, odd_squarefree }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Factorization {
        s.parse().unwrap()
    }

    fn brute_sigma(n: u64) -> u64 {
        (1..=n).filter(|d| n % d == 0).sum()
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize_u64(1).is_one());
        assert_eq!(factorize_u64(4324320).to_string(), "2^5*3^3*5*7*11*13");
        assert_eq!(factorize_u64(4849845).to_string(), "3*5*7*11*13*17*19");
        assert_eq!(factorize_u64(u64::MAX).to_string(), "3*5*17*257*641*65537*6700417");
        // product of two primes near 2^32
        let n = 4294967291u64 * 4294967279u64;
        assert_eq!(factorize_u64(n).to_string(), "4294967279*4294967291");
        assert!(factorize(&Integer::from(0)).is_err());
    }

    #[test]
    fn factorize_big() {
        let c0 = f("3^4*5^3*7^2*11*13*17*19*23*29*31*37*41*43*47*53*59*61*67");
        assert_eq!(c0.value().to_string(), "18565284664427130919514350125");
        assert_eq!(factorize(&c0.value()).unwrap(), c0);
        let p = Integer::from(18446744073709551557u64); // largest 64-bit prime
        let big = Integer::from(&p * &p);
        assert!(factorize(&big).is_err());
        let ok = Integer::from(&p * 1000003u32);
        assert_eq!(factorize(&ok).unwrap().to_string(), "1000003*18446744073709551557");
    }

    #[test]
    fn miller_rabin_matches_sieve() {
        let t = PrimeTable::sieve(100_000).unwrap();
        for n in 0..=100_000u64 {
            assert_eq!(is_prime_u64(n), t.is_prime(n), "{n}");
        }
        // strong pseudoprimes to several small bases
        for n in [3215031751u64, 2152302898747, 3474749660383, 341550071728321, 3825123056546413051] {
            assert!(!is_prime_u64(n), "{n}");
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        let x = f("2^5*3^3*5*7*11*13");
        assert_eq!(x.value(), 4324320);
        assert_eq!(x.to_string(), "2^5*3^3*5*7*11*13");
        assert_eq!(f("13*2^5*3^3*5*7*11"), x);
        assert_eq!(f("2·2·3"), f("2^2*3"));
        assert!(f("1").is_one());
        assert!("4^2".parse::<Factorization>().is_err());
        assert!("2^x".parse::<Factorization>().is_err());
        assert!("".parse::<Factorization>().is_err());
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "[[2,5],[3,3],[5,1],[7,1],[11,1],[13,1]]");
        assert_eq!(serde_json::from_str::<Factorization>(&json).unwrap(), x);
        assert!(serde_json::from_str::<Factorization>("[[3,1],[2,1]]").is_err());
        assert!(serde_json::from_str::<Factorization>("[[2,0]]").is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&Factorization::one()), 1);
        assert_eq!(sigma(&factorize_u64(12)), 28);
        assert_eq!(sigma(&factorize_u64(9)), 13);
        for n in 1..=10_000u64 {
            assert_eq!(sigma(&factorize_u64(n)), brute_sigma(n), "{n}");
        }
    }

    #[test]
    fn sigma_mod_examples() {
        let n = factorize_u64(15);
        assert_eq!(sigma_mod(&n, 2, 1).unwrap(), 24);
        assert_eq!(sigma_mod(&n, 4, 1).unwrap(), 6);
        assert_eq!(sigma_mod(&n, 4, 3).unwrap(), 4);
        assert!(sigma_mod(&n, 4, 2).is_err());
        assert!(sigma_mod(&n, 6, 3).is_err());
    }

    #[test]
    fn phi_and_squarefree() {
        assert_eq!(euler_phi(&factorize_u64(2)), 1);
        assert_eq!(euler_phi(&factorize_u64(4)), 2);
        assert_eq!(euler_phi(&factorize_u64(12)), 4);
        assert_eq!(euler_phi(&Factorization::one()), 1);
        assert!(is_squarefree(&factorize_u64(15)));
        assert!(!is_squarefree(&factorize_u64(45)));
        assert!(is_squarefree(&factorize_u64(4849845)));
    }

    #[test]
    fn f_ratio_domain() {
        let ev = Evaluator::default();
        let tol = Rational::from((1, 1000));
        assert!(f_ratio(&factorize_u64(2), &tol, &ev).is_err());
        assert!(f_ratio(&Factorization::one(), &tol, &ev).is_err());
        assert!(f_ratio(&factorize_u64(3), &tol, &ev).is_ok());
    }

    #[test]
    fn f_mod_matches_f_for_odd_n() {
        let ev = Evaluator::default();
        let tol = Rational::from((1, 1u64 << 50));
        for n in [15u64, 135135] {
            let x = factorize_u64(n);
            let a = f_ratio(&x, &tol, &ev).unwrap();
            let b = f_mod(&x, 2, 1, &tol, &ev).unwrap();
            assert!(a.overlaps(&b), "{n}");
        }
        assert!(f_mod(&Factorization::one(), 4, 1, &tol, &ev).is_err());
    }

    #[test]
    fn f_mod_four_one_at_five() {
        let ev = Evaluator::default();
        let tol = Rational::from((1, 1u64 << 50));
        let v = f_mod(&factorize_u64(5), 4, 1, &tol, &ev).unwrap();
        // 6/(5·(log(2 log 5))^{1/2})
        let want = RealExpr::int(6) / (RealExpr::int(5) * (RealExpr::int(2) * RealExpr::int(5).ln()).ln().sqrt());
        let w = ev.eval(&want, &tol).unwrap();
        assert!(v.overlaps(&w));
    }

    #[test]
    fn segment_sigma_matches_direct() {
        let base = PrimeTable::sieve(1000).unwrap();
        for lo in [1u64, 2, 97, 5000, 123_457] {
            let seg = DivisorSegment::compute(lo, 2000, &base);
            for i in 0..seg.len() {
                let n = lo + i as u64;
                let fz = factorize_u64(n);
                assert_eq!(Integer::from(seg.sigma[i]), sigma(&fz), "{n}");
                assert_eq!(seg.v2[i] as u32, fz.exponent_of(2), "{n}");
                assert_eq!(seg.odd_squarefree[i], is_squarefree(&fz.without(2)), "{n}");
            }
        }
    }

    #[test]
    fn strict_and_non_strict_decisions() {
        let ev = Evaluator::default();
        let one = RealExpr::int(1);
        let e = RealExpr::int(1).exp();
        assert_eq!(decide_inequality(&one, &e, Strictness::Strict, &ev).unwrap().verdict, Verdict::Satisfies);
        assert_eq!(decide_inequality(&e, &one, Strictness::Strict, &ev).unwrap().verdict, Verdict::Violates);
        assert_eq!(decide_inequality(&e, &e, Strictness::Strict, &ev).unwrap().verdict, Verdict::Violates);
        assert_eq!(decide_inequality(&e, &e, Strictness::NonStrict, &ev).unwrap().verdict, Verdict::Satisfies);
        let a = RealExpr::int(6).ln();
        let b = RealExpr::int(2).ln() + RealExpr::int(3).ln();
        let d = decide_inequality(&a, &b, Strictness::Strict, &Evaluator::new(256)).unwrap();
        assert_eq!(d.verdict, Verdict::Unresolved);
        assert_eq!(d.precision_bits, 256);
    }
}
