//! Prime tables, Chebyshev's θ and the auxiliary `A(x)` bound.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use rug::float::Round;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::realnum::{down, up, Evaluator, RealExpr, RealInterval};

const CACHE_MAGIC: &[u8; 8] = b"RBNSIEV1";
const SEGMENT_WORDS: usize = 4096;

/// All primes up to `limit`, plus an odd-only bitset for O(1) primality.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    // bit i set <=> 2i+1 is prime
    bits: Vec<u64>,
}

fn odd_bitset(limit: u64) -> Vec<u64> {
    let n_odds = (limit as usize + 1) / 2;
    let n_words = n_odds.div_ceil(64).max(1);
    let mut bits = vec![!0u64; n_words];
    let root = (limit as f64).sqrt() as u64 + 1;
    let base: Vec<u64> = small_primes(root).into_iter().filter(|&p| p > 2).collect();

    bits.par_chunks_mut(SEGMENT_WORDS).enumerate().for_each(|(ci, chunk)| {
        let first_idx = (ci * SEGMENT_WORDS * 64) as u64;
        let end_idx = first_idx + (chunk.len() * 64) as u64;
        for &p in &base {
            // first odd multiple of p that is >= p*p and lies in the segment
            let pp_idx = p * p / 2;
            let start = if pp_idx >= first_idx {
                pp_idx
            } else {
                let lo = 2 * first_idx + 1;
                let mut m = lo.div_ceil(p) * p;
                if m % 2 == 0 {
                    m += p;
                }
                m / 2
            };
            let mut i = start;
            while i < end_idx {
                let local = (i - first_idx) as usize;
                chunk[local / 64] &= !(1u64 << (local % 64));
                i += p;
            }
        }
    });

    bits[0] &= !1; // 1 is not prime
    let tail = n_odds % 64;
    if tail != 0 {
        let last = bits.len() - 1;
        bits[last] &= (1u64 << tail) - 1;
    }
    if n_odds == 0 {
        bits[0] = 0;
    }
    bits
}

fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if is[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
    }
    out
}

fn primes_from_bits(limit: u64, bits: &[u64]) -> Vec<u64> {
    let mut primes = Vec::with_capacity(approx_pi(limit));
    if limit >= 2 {
        primes.push(2);
    }
    for (w, &word) in bits.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let b = word.trailing_zeros() as u64;
            let n = 2 * (w as u64 * 64 + b) + 1;
            if n > limit {
                break;
            }
            primes.push(n);
            word &= word - 1;
        }
    }
    primes
}

fn approx_pi(x: u64) -> usize {
    if x < 10 {
        return 4;
    }
    let lx = (x as f64).ln();
    (1.3 * x as f64 / lx) as usize
}

impl PrimeTable {
    /// Sieves all primes up to `limit`.
    pub fn sieve(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::domain(format!("sieve limit must be at least 2, got {limit}")));
        }
        let bits = odd_bitset(limit);
        let primes = primes_from_bits(limit, &bits);
        Ok(PrimeTable { limit, primes, bits })
    }

    /// Loads a table covering `limit` from `path`, or sieves and writes one.
    /// A cached table with a larger limit is reused and truncated.
    pub fn load_or_build(limit: u64, path: &Path) -> Result<Self> {
        if path.exists() {
            if let Ok(t) = Self::read_cache(path) {
                if t.limit >= limit {
                    return Ok(t.truncated(limit));
                }
            }
        }
        let t = Self::sieve(limit)?;
        t.write_cache(path)?;
        Ok(t)
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(16 + self.bits.len() * 8);
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&self.limit.to_le_bytes());
        for w in &self.bits {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        let tmp = path.with_extension("tmp");
        fs::File::create(&tmp)?.write_all(&buf)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        let mut buf = Vec::new();
        fs::File::open(path)?.read_to_end(&mut buf)?;
        if buf.len() < 16 || &buf[..8] != CACHE_MAGIC {
            return Err(Error::Cache(format!("{}: bad header", path.display())));
        }
        let limit = u64::from_le_bytes(buf[8..16].try_into().unwrap());
        if limit < 2 {
            return Err(Error::Cache(format!("{}: bad limit {limit}", path.display())));
        }
        let n_words = ((limit as usize + 1) / 2).div_ceil(64).max(1);
        let body = &buf[16..];
        if body.len() != n_words * 8 {
            return Err(Error::Cache(format!(
                "{}: expected {} bytes of bitset, found {}",
                path.display(),
                n_words * 8,
                body.len()
            )));
        }
        let bits: Vec<u64> = body.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
        let primes = primes_from_bits(limit, &bits);
        Ok(PrimeTable { limit, primes, bits })
    }

    fn truncated(mut self, limit: u64) -> Self {
        if limit == self.limit {
            return self;
        }
        let n_odds = (limit as usize + 1) / 2;
        let n_words = n_odds.div_ceil(64).max(1);
        self.bits.truncate(n_words);
        let tail = n_odds % 64;
        if tail != 0 {
            let last = self.bits.len() - 1;
            self.bits[last] &= (1u64 << tail) - 1;
        }
        let keep = self.primes.partition_point(|&p| p <= limit);
        self.primes.truncate(keep);
        self.limit = limit;
        self
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primality of `n ≤ limit`.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} beyond sieve limit {}", self.limit);
        if n == 2 {
            return true;
        }
        if n % 2 == 0 {
            return false;
        }
        let i = (n / 2) as usize;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of primes ≤ `x` (requires `x ≤ limit`).
    pub fn pi(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    pub fn up_to(&self, x: u64) -> &[u64] {
        &self.primes[..self.pi(x)]
    }

    pub fn largest_at_most(&self, x: u64) -> Option<u64> {
        self.up_to(x).last().copied()
    }

    fn require(&self, x: u64) -> Result<()> {
        if x > self.limit {
            return Err(Error::domain(format!("{x} exceeds sieve limit {}", self.limit)));
        }
        Ok(())
    }
}

/// Product of a slice of primes by a balanced product tree.
pub fn product(ps: &[u64]) -> Integer {
    const LEAF: usize = 64;
    if ps.len() <= LEAF {
        let mut acc = Integer::from(1);
        for &p in ps {
            acc *= p;
        }
        return acc;
    }
    let (a, b) = ps.split_at(ps.len() / 2);
    let (x, y) = rayon::join(|| product(a), || product(b));
    x * y
}

/// θ(x) (or θ′(x) when `odd_only`) for integer `x`, enclosed to width at
/// most `tol` as the logarithm of the primorial.
pub fn theta(table: &PrimeTable, x: u64, odd_only: bool, tol: &Rational, ev: &Evaluator) -> Result<RealInterval> {
    table.require(x)?;
    let ps = table.up_to(x);
    let ps = if odd_only { ps.strip_prefix(&[2]).unwrap_or(ps) } else { ps };
    if ps.is_empty() {
        return Ok(RealInterval::from_u64(0, ev.start_bits()));
    }
    let prim = product(ps);
    ev.eval(&RealExpr::Int(prim).ln(), tol)
}

/// θ(x) for real `x`, which depends only on ⌊x⌋.
pub fn theta_real(table: &PrimeTable, x: &RealExpr, odd_only: bool, tol: &Rational, ev: &Evaluator) -> Result<RealInterval> {
    let m = ev.floor_exact(x)?;
    if m < 2 {
        return Err(Error::domain("θ requires x ≥ 2"));
    }
    let m = m.to_u64().ok_or_else(|| Error::domain("argument too large"))?;
    theta(table, m, odd_only, tol, ev)
}

/// Cumulative enclosures of θ at every prime, built once at a fixed
/// precision and then queried in O(log π(x)).
pub struct ThetaTable<'a> {
    table: &'a PrimeTable,
    lo: Vec<Float>,
    hi: Vec<Float>,
    prec: u32,
}

impl<'a> ThetaTable<'a> {
    pub fn new(table: &'a PrimeTable, prec: u32) -> Self {
        let logs: Vec<(Float, Float)> = table
            .primes()
            .par_iter()
            .map(|&p| {
                let lo = Float::with_val_round(prec, Float::with_val(prec, p).ln_ref(), Round::Down).0;
                let hi = Float::with_val_round(prec, Float::with_val(prec, p).ln_ref(), Round::Up).0;
                (lo, hi)
            })
            .collect();
        let mut lo = Vec::with_capacity(logs.len());
        let mut hi = Vec::with_capacity(logs.len());
        let mut sl = Float::with_val(prec, 0);
        let mut sh = Float::with_val(prec, 0);
        for (l, h) in logs {
            sl.add_assign_round(&l, Round::Down);
            sh.add_assign_round(&h, Round::Up);
            lo.push(sl.clone());
            hi.push(sh.clone());
        }
        ThetaTable { table, lo, hi, prec }
    }

    pub fn precision_bits(&self) -> u32 {
        self.prec
    }

    /// θ(x) or θ′(x) for integer `x ≤ limit`.
    pub fn theta(&self, x: u64, odd_only: bool) -> Result<RealInterval> {
        self.table.require(x)?;
        let k = self.table.pi(x);
        if k == 0 || (odd_only && k == 1) {
            return Ok(RealInterval::from_u64(0, self.prec));
        }
        let (lo, hi) = (&self.lo[k - 1], &self.hi[k - 1]);
        if odd_only {
            let (l2, h2) = (&self.lo[0], &self.hi[0]);
            Ok(RealInterval::new(down(self.prec, lo - h2), up(self.prec, hi - l2)))
        } else {
            Ok(RealInterval::new(lo.clone(), hi.clone()))
        }
    }
}

use rug::ops::AddAssignRound;

/// Integer floors of the three arguments of `A(x)`: `x`, `(x²/2)^{1/3}` and
/// `(x²/2)^{1/4}`.
pub fn a_func_arguments(x: &RealExpr, ev: &Evaluator) -> Result<[Integer; 3]> {
    let half_sq = x.clone().powi(2) / RealExpr::int(2);
    Ok([
        ev.floor_exact(x)?,
        ev.floor_exact(&half_sq.clone().powr(Rational::from((1, 3))))?,
        ev.floor_exact(&half_sq.powr(Rational::from((1, 4))))?,
    ])
}

fn theta_odd_at(thetas: &ThetaTable<'_>, m: &Integer) -> Result<RealInterval> {
    if *m < 3 {
        return Ok(RealInterval::from_u64(0, thetas.precision_bits()));
    }
    let m = m.to_u64().ok_or_else(|| Error::domain("argument beyond sieve"))?;
    thetas.theta(m, true)
}

/// `A(x) = θ′(x) + θ′(x^{2/3}/2^{1/3}) + θ′(x^{1/2}/2^{1/4})` for `x ≥ 3`.
pub fn a_func(thetas: &ThetaTable<'_>, x: &RealExpr, ev: &Evaluator) -> Result<RealInterval> {
    if ev.compare(x, &RealExpr::int(3)) == crate::realnum::Comparison::Less {
        return Err(Error::domain("A(x) requires x ≥ 3"));
    }
    let args = a_func_arguments(x, ev)?;
    let mut acc = RealInterval::from_u64(0, thetas.precision_bits());
    for m in &args {
        acc = acc.add(&theta_odd_at(thetas, m)?);
    }
    Ok(acc)
}

/// First integer `x` in `[2, upto]` violating `θ(x) > x − 2.05282·√x`, or
/// `None`. Between primes θ is constant and the right side increases, so
/// only the integers just before each prime (and `upto`) need checking.
pub fn rosser_schoenfeld_check(thetas: &ThetaTable<'_>, upto: u64) -> Result<Option<u64>> {
    let c = Rational::from((205282, 100000));
    let prec = thetas.precision_bits();
    let ps = thetas.table.up_to(upto);
    let mut candidates: Vec<u64> = ps.windows(2).map(|w| w[1] - 1).collect();
    candidates.push(upto);
    let bad = candidates.par_iter().copied().filter(|&x| x >= 2).find_first(|&x| {
        let th = thetas.theta(x, false).expect("within sieve");
        let xi = RealInterval::from_u64(x, prec);
        let rhs = xi.sub(&xi.sqrt().expect("positive").mul_rational(&c));
        !rhs.certainly_lt(&th)
    });
    Ok(bad)
}

/// First prime `p ≤ upto` at which `θ(p) < 1.000081·p` fails, or `None`.
/// θ(x)/x is largest just at primes, so checking primes covers all real x.
pub fn theta_upper_check(thetas: &ThetaTable<'_>, upto: u64) -> Result<Option<u64>> {
    let c = Rational::from((1000081, 1000000));
    let prec = thetas.precision_bits();
    let ps = thetas.table.up_to(upto);
    Ok(ps.par_iter().copied().find_first(|&p| {
        let th = thetas.theta(p, false).expect("within sieve");
        let rhs = RealInterval::from_u64(p, prec).mul_rational(&c);
        !th.certainly_lt(&rhs)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_count(n: u64) -> usize {
        (2..=n).filter(|&k| (2..).take_while(|d| d * d <= k).all(|d| k % d != 0)).count()
    }

    #[test]
    fn small_sieves() {
        assert_eq!(PrimeTable::sieve(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(PrimeTable::sieve(2).unwrap().primes(), &[2]);
        assert_eq!(PrimeTable::sieve(3).unwrap().primes(), &[2, 3]);
        assert!(PrimeTable::sieve(1).is_err());
        assert!(PrimeTable::sieve(0).is_err());
    }

    #[test]
    fn counts_match_trial_division() {
        for n in [2u64, 3, 4, 63, 64, 127, 128, 129, 1000, 9973, 20000] {
            assert_eq!(PrimeTable::sieve(n).unwrap().len(), trial_division_count(n), "n = {n}");
        }
    }

    #[test]
    fn segment_boundaries() {
        // Segments span SEGMENT_WORDS * 128 integers; sieve across several.
        let n = (SEGMENT_WORDS as u64) * 128 * 3 + 17;
        let t = PrimeTable::sieve(n).unwrap();
        for w in t.primes().windows(2) {
            assert!(w[0] < w[1]);
        }
        for &p in t.primes().iter().step_by(97) {
            assert!((2..).take_while(|d| d * d <= p).all(|d| p % d != 0), "{p}");
        }
        assert_eq!(t.len(), 119_270); // π(1572881)
    }

    #[test]
    fn is_prime_agrees_with_list() {
        let t = PrimeTable::sieve(5000).unwrap();
        let count = (0..=5000).filter(|&n| t.is_prime(n)).count();
        assert_eq!(count, t.len());
        assert!(!t.is_prime(0) && !t.is_prime(1) && t.is_prime(2) && t.is_prime(4999));
    }

    #[test]
    fn cache_round_trip_and_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sieve.bin");
        let t = PrimeTable::load_or_build(10_000, &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        assert_eq!(&bytes[..8], CACHE_MAGIC);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 10_000);
        let again = PrimeTable::load_or_build(10_000, &path).unwrap();
        assert_eq!(t.primes(), again.primes());
        let smaller = PrimeTable::load_or_build(100, &path).unwrap();
        assert_eq!(smaller.len(), 25);
        assert_eq!(smaller.limit(), 100);
        fs::write(&path, b"garbage").unwrap();
        assert!(PrimeTable::read_cache(&path).is_err());
        // A corrupt cache is rebuilt.
        assert_eq!(PrimeTable::load_or_build(100, &path).unwrap().len(), 25);
    }

    #[test]
    fn theta_small_values() {
        let t = PrimeTable::sieve(100).unwrap();
        let ev = Evaluator::default();
        let tol = Rational::from((1, 1u64 << 40));
        let th2 = theta(&t, 2, false, &tol, &ev).unwrap();
        assert!(th2.contains_float(&Float::with_val(200, 2).ln()));
        let th10 = theta(&t, 10, false, &tol, &ev).unwrap();
        assert!(th10.contains_float(&Float::with_val(200, 210).ln()));
        let odd10 = theta(&t, 10, true, &tol, &ev).unwrap();
        assert!(odd10.contains_float(&Float::with_val(200, 105).ln()));
        assert!(theta(&t, 101, false, &tol, &ev).is_err());
    }

    #[test]
    fn theta_table_matches_primorial() {
        let t = PrimeTable::sieve(3000).unwrap();
        let tt = ThetaTable::new(&t, 128);
        let ev = Evaluator::default();
        let tol = Rational::from((1, 1u64 << 60));
        for x in [2u64, 3, 10, 97, 1000, 2999] {
            let a = tt.theta(x, false).unwrap();
            let b = theta(&t, x, false, &tol, &ev).unwrap();
            assert!(a.overlaps(&b), "x = {x}");
            let a = tt.theta(x, true).unwrap();
            let b = theta(&t, x, true, &tol, &ev).unwrap();
            assert!(a.overlaps(&b), "odd x = {x}");
        }
        assert!(tt.theta(2, true).unwrap().is_point());
    }

    #[test]
    fn a_at_three_is_log_three() {
        let t = PrimeTable::sieve(100).unwrap();
        let tt = ThetaTable::new(&t, 128);
        let ev = Evaluator::default();
        let a = a_func(&tt, &RealExpr::int(3), &ev).unwrap();
        assert!(a.contains_float(&Float::with_val(200, 3).ln()));
        assert!(a_func(&tt, &RealExpr::int(2), &ev).is_err());
    }

    #[test]
    fn a_func_arguments_exact_at_perfect_powers() {
        let ev = Evaluator::default();
        // x = 4: x²/2 = 8, cube root exactly 2, fourth root 1.68…
        let args = a_func_arguments(&RealExpr::int(4), &ev).unwrap();
        assert_eq!(args, [Integer::from(4), Integer::from(2), Integer::from(1)]);
    }
}
