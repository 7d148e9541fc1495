//! How `f(n) = σ(n)/(n log log n)` changes when `n` is multiplied by a prime
//! power, the exponent bound that forces the change below a chosen constant,
//! and the greedy construction built on that bound.

use rayon::prelude::*;
use rug::float::Round;
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::divisors::{decide_inequality, f_ratio_expr, sigma_prime_power, Factorization, Strictness, Verdict};
use crate::error::{Error, Result};
use crate::realnum::{float_to_decimal, Comparison, Evaluator, RealExpr, RealInterval};

/// Default enclosure width for growth quantities.
fn tol() -> Rational {
    Rational::from((1, 1u64 << 60))
}

fn check_coprime(f: &Factorization, p: u64) -> Result<Integer> {
    if !crate::divisors::is_prime_u64(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if f.divides_by(p) {
        return Err(Error::domain(format!("{p} divides n = {}", f.value())));
    }
    let n = f.value();
    if n < 3 {
        return Err(Error::domain(format!("growth factors need n ≥ 3, got {n}")));
    }
    Ok(n)
}

/// `g(n,k,p) = (σ(p^k)/p^k)·(1 + log(1 + k log p/log n)/log log n)^{-1}`.
pub fn g_expr(f: &Factorization, k: u32, p: u64) -> Result<RealExpr> {
    let n = check_coprime(f, p)?;
    if k == 0 {
        return Ok(RealExpr::int(1));
    }
    let pk = Integer::from(p).pow(k);
    let head = RealExpr::rational(Rational::from((sigma_prime_power(p, k), pk)));
    let ln_n = RealExpr::Int(n).ln();
    let inner = RealExpr::int(1) + RealExpr::int(k as i64) * RealExpr::int(p as i64).ln() / ln_n.clone();
    Ok(head / (RealExpr::int(1) + inner.ln() / ln_n.ln()))
}

/// Certified enclosure of `g(n,k,p)`; `p` must not divide `n`.
pub fn g_factor(f: &Factorization, k: u32, p: u64, ev: &Evaluator) -> Result<RealInterval> {
    ev.eval(&g_expr(f, k, p)?, &tol())
}

/// `(log n/log p)((log n)^{(p+c−cp)/(c(p−1))} − 1)`: any integer `k` above it
/// gives `g(n,k,p) < c`.
pub fn k_bound_expr(f: &Factorization, p: u64, c: &Rational) -> Result<RealExpr> {
    let n = check_coprime(f, p)?;
    if *c <= 0 {
        return Err(Error::domain("c must be positive"));
    }
    let pr = Rational::from(p);
    let e = (pr.clone() + c - Rational::from(c * &pr)) / (Rational::from(c * (pr - 1u32)));
    let ln_n = RealExpr::Int(n).ln();
    let ln_p = RealExpr::int(p as i64).ln();
    let power = (RealExpr::rational(e) * ln_n.clone().ln()).exp();
    Ok(ln_n / ln_p * (power - RealExpr::int(1)))
}

pub fn k_bound(f: &Factorization, p: u64, c: &Rational, ev: &Evaluator) -> Result<RealInterval> {
    ev.eval(&k_bound_expr(f, p, c)?, &tol())
}

/// The `c = 1` case: for `k` above this, `f(p^k n) < f(n)`.
pub fn no_growth_bound(f: &Factorization, p: u64, ev: &Evaluator) -> Result<RealInterval> {
    k_bound(f, p, &Rational::from(1), ev)
}

#[derive(Clone, Debug, Serialize)]
pub struct CaLikeStep {
    pub p: u64,
    /// Chosen constant, exact.
    pub c: String,
    pub k_bound: RealInterval,
    /// Smallest integer exponent strictly above the bound (at least 1).
    #[serde(rename = "L")]
    pub l: u32,
    pub running_product_c: RealInterval,
    /// Partial product after this step.
    #[serde(serialize_with = "ser_display")]
    pub n: Integer,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaLikeVerdict {
    CertifiedRobin,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaLikeResult {
    pub x: u64,
    pub steps: Vec<CaLikeStep>,
    pub n: Factorization,
    #[serde(serialize_with = "ser_display")]
    pub value: Integer,
    /// `∏ c_i`, exact.
    pub product_c: String,
    /// `e^γ/f(x)`.
    pub threshold: RealInterval,
    pub verdict: CaLikeVerdict,
}

/// Greedy construction: start at the prime `x`, and for each `(p, c)` in
/// the (strictly descending) schedule multiply by `p^L` with `L` the least
/// integer above the exponent bound for the current partial product. With
/// `odd` set, steps at `p = 2` are skipped. Robin's inequality for the result
/// is certified when `∏ c < e^γ/f(x)`.
pub fn build_ca_like(x: u64, schedule: &[(u64, Rational)], odd: bool, ev: &Evaluator) -> Result<CaLikeResult> {
    if !crate::divisors::is_prime_u64(x) || x < 3 {
        return Err(Error::domain(format!("start must be a prime ≥ 3, got {x}")));
    }
    let mut prev = x;
    for (p, c) in schedule {
        if *p >= prev {
            return Err(Error::domain("schedule primes must be strictly descending below x"));
        }
        if *c <= 0 {
            return Err(Error::domain("schedule constants must be positive"));
        }
        prev = *p;
    }
    let mut n = Factorization::from_pairs(vec![(x, 1)])?;
    let mut prod = Rational::from(1);
    let mut steps = Vec::new();
    for (p, c) in schedule {
        if odd && *p == 2 {
            break;
        }
        let expr = k_bound_expr(&n, *p, c)?;
        let bound = ev.eval(&expr, &tol())?;
        let floor = ev.floor_exact(&expr)?;
        let l = (floor + 1u32).max(Integer::from(1));
        let l = l.to_u32().ok_or_else(|| Error::domain("exponent overflow"))?;
        n = n.times_prime_power(*p, l);
        prod *= c;
        steps.push(CaLikeStep {
            p: *p,
            c: c.to_string(),
            k_bound: bound,
            l,
            running_product_c: RealInterval::from_rational(&prod, 128),
            n: n.value(),
        });
    }
    let fx = f_ratio_expr(&Factorization::from_pairs(vec![(x, 1)])?)?;
    let thr = RealExpr::gamma().exp() / fx;
    let d = decide_inequality(&RealExpr::rational(prod.clone()), &thr, Strictness::Strict, ev)?;
    let verdict = if d.verdict == Verdict::Satisfies { CaLikeVerdict::CertifiedRobin } else { CaLikeVerdict::Inconclusive };
    Ok(CaLikeResult {
        x,
        steps,
        value: n.value(),
        n,
        product_c: prod.to_string(),
        threshold: d.rhs,
        verdict,
    })
}

/// `log(2^k n) log log(2^k n) − 2^{k+1} + 1`, whose positive root locates the
/// maximum of `g(n, k, 2)` in `k`.
fn max_k_lhs(n: &Integer, k: &Rational) -> RealExpr {
    let ln2 = RealExpr::int(2).ln();
    let l = RealExpr::rational(k.clone()) * ln2.clone() + RealExpr::Int(n.clone()).ln();
    l.clone() * l.ln() - (RealExpr::rational(Rational::from(k + 1u32)) * ln2).exp() + RealExpr::int(1)
}

/// Certified enclosure of the positive root of the max-k equation, width at
/// most `2^-40`. For `n ≤ 5` the left side is already negative at `k = 0`
/// and decreasing, so `g(n, ·, 2)` peaks at `k = 0` and `[0, 0]` is returned.
pub fn max_k(n: &Integer, ev: &Evaluator) -> Result<RealInterval> {
    if *n < 3 {
        return Err(Error::domain(format!("max_k needs n ≥ 3, got {n}")));
    }
    let sign = |k: &Rational| -> Result<Comparison> {
        match ev.sign(&max_k_lhs(n, k)) {
            Comparison::Unresolved => Err(Error::PrecisionExhausted {
                bits: ev.ceiling_bits(),
                detail: format!("sign of the max-k equation at k = {k}"),
            }),
            s => Ok(s),
        }
    };
    if sign(&Rational::new())? != Comparison::Greater {
        return Ok(RealInterval::from_u64(0, 64));
    }
    let mut lo = Rational::new();
    let mut hi = Rational::from(1);
    while sign(&hi)? == Comparison::Greater {
        lo = hi.clone();
        hi *= 2u32;
    }
    let width = Rational::from((1, 1u64 << 40));
    while Rational::from(&hi - &lo) > width {
        let mid = Rational::from(&lo + &hi) / 2u32;
        match sign(&mid)? {
            Comparison::Greater => lo = mid,
            Comparison::Less => hi = mid,
            _ => return Ok(RealInterval::from_rational(&mid, 64)),
        }
    }
    Ok(RealInterval::from_rational_bounds(&lo, &hi, 64))
}

#[derive(Clone, Debug, Serialize)]
pub struct GRow {
    pub k: u32,
    pub g_lo: String,
    pub g_hi: String,
    pub midpoint: f64,
    #[serde(skip)]
    pub interval: RealInterval,
}

/// Rows `(k, g(n,k,p))` for `k = 0..=k_max`.
pub fn emit_g_curve(f: &Factorization, p: u64, k_max: u32, ev: &Evaluator) -> Result<Vec<GRow>> {
    check_coprime(f, p)?;
    if k_max < 1 {
        return Err(Error::domain("k_max must be at least 1"));
    }
    (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let iv = g_factor(f, k, p, ev)?;
            Ok(GRow {
                k,
                g_lo: float_to_decimal(iv.lo(), 20, Round::Down),
                g_hi: float_to_decimal(iv.hi(), 20, Round::Up),
                midpoint: iv.midpoint_f64(),
                interval: iv,
            })
        })
        .collect()
}

/// CSV with header `k,g_lo,g_hi,midpoint`.
pub fn curve_csv(rows: &[GRow]) -> String {
    let mut s = String::from("k,g_lo,g_hi,midpoint\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.k, r.g_lo, r.g_hi, r.midpoint));
    }
    s
}

/// Two whitespace-separated columns `k midpoint` for gnuplot.
pub fn curve_gnuplot(rows: &[GRow]) -> String {
    let mut s = String::from("# k g\n");
    for r in rows {
        s.push_str(&format!("{} {}\n", r.k, r.midpoint));
    }
    s
}
