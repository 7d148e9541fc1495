//! Certified values of γ, the Meissel–Mertens constant `B` and the mod-4
//! limits `α_{4,1}`, `α_{4,3}`, the latter two from truncated Euler products
//! with explicit tail bounds.

use std::sync::OnceLock;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::realnum::consts::literal_enclosure;
use crate::realnum::{Fault, NamedConst, RealExpr, RealInterval};

/// Working precision for products and sums over primes.
const PREC: u32 = 192;

/// Largest sieve the constant routines will build.
pub const MAX_PRIME_LIMIT: u64 = 2_000_000_000;

/// Prime limit behind [`meissel_mertens_default`].
pub const DEFAULT_B_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct NamedConstant {
    pub name: String,
    pub value: RealInterval,
    /// How the enclosure was obtained.
    pub derivation: String,
    /// Bound on the truncation error, if any.
    pub tail_bound: Option<String>,
}

fn fault(f: Fault) -> Error {
    match f {
        Fault::Domain(m) => Error::Domain(m),
        Fault::Indeterminate => Error::domain("indeterminate interval operation"),
    }
}

fn pow10(d: u32) -> Integer {
    Integer::from(10).pow(d)
}

fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

fn gamma_interval(prec: u32) -> RealInterval {
    let (lo, hi) = literal_enclosure(NamedConst::EulerGamma).expect("literal constant");
    RealInterval::from_rational_bounds(&lo, &hi, prec)
}

/// Enclosure of γ with width at most `10^-digits`, `1 ≤ digits ≤ 200`.
pub fn gamma_const(digits: u32) -> Result<RealInterval> {
    if !(1..=200).contains(&digits) {
        return Err(Error::domain(format!("gamma digits must be in 1..=200, got {digits}")));
    }
    Ok(gamma_interval(bits_for_digits(digits)))
}

fn sieve(limit: u64) -> Result<PrimeTable> {
    if limit > MAX_PRIME_LIMIT {
        return Err(Error::PrecisionExhausted {
            bits: PREC,
            detail: format!("needs primes up to {limit}, above the sieve cap {MAX_PRIME_LIMIT}"),
        });
    }
    PrimeTable::sieve(limit)
}

/// Interval sum of `term(p)` over `ps`, in parallel blocks.
fn prime_sum(ps: &[u64], term: impl Fn(u64) -> std::result::Result<RealInterval, Fault> + Sync) -> Result<RealInterval> {
    ps.par_chunks(1 << 14)
        .map(|chunk| {
            let mut acc = RealInterval::from_u64(0, PREC);
            for &p in chunk {
                acc = acc.add(&term(p)?);
            }
            Ok(acc)
        })
        .reduce(|| Ok(RealInterval::from_u64(0, PREC)), |a, b| Ok(a?.add(&b?)))
        .map_err(fault)
}

/// Interval product of `factor(p)` over `ps`, in parallel blocks.
fn prime_product(ps: &[u64], factor: impl Fn(u64) -> Rational + Sync) -> RealInterval {
    ps.par_chunks(1 << 14)
        .map(|chunk| {
            let mut acc = RealInterval::from_u64(1, PREC);
            for &p in chunk {
                acc = acc.mul(&RealInterval::from_rational(&factor(p), PREC));
            }
            acc
        })
        .reduce(|| RealInterval::from_u64(1, PREC), |a, b| a.mul(&b))
}

/// `B = γ + Σ_p (log(1 − 1/p) + 1/p)` summed over `p ≤ limit`. Each term
/// lies in `[−1/(2p(p−1)), 0]` and `Σ_{n>X} 1/(2n(n−1)) = 1/(2X)`, so the
/// tail is enclosed by `[−1/(2X), 0]`.
pub fn meissel_mertens_at(limit: u64) -> Result<RealInterval> {
    if limit < 2 {
        return Err(Error::domain("prime limit must be at least 2"));
    }
    let table = sieve(limit)?;
    let s = prime_sum(table.primes(), |p| {
        let x = Rational::from((-1, p));
        let l = RealInterval::from_rational(&x, PREC).ln_1p()?;
        Ok(l.sub(&RealInterval::from_rational(&x, PREC)))
    })?;
    let tail = RealInterval::from_rational_bounds(&Rational::from((-1, 2 * limit)), &Rational::new(), PREC);
    Ok(gamma_interval(PREC).add(&s).add(&tail))
}

/// `B` with width at most `10^-digits`, `1 ≤ digits ≤ 15`. The prime limit
/// is the least one whose tail bound fits; digits beyond what the sieve cap
/// can reach fail with `PrecisionExhausted`.
pub fn meissel_mertens(digits: u32) -> Result<RealInterval> {
    if !(1..=15).contains(&digits) {
        return Err(Error::domain(format!("Meissel–Mertens digits must be in 1..=15, got {digits}")));
    }
    let target = Rational::from((1, pow10(digits)));
    // The tail alone has width 1/(2X).
    let need = pow10(digits) / 2u32 + 1u32;
    let limit = need.to_u64().filter(|&x| x <= MAX_PRIME_LIMIT).ok_or_else(|| Error::PrecisionExhausted {
        bits: PREC,
        detail: format!("{digits} digits of B need primes beyond {MAX_PRIME_LIMIT}"),
    })?;
    let limit = limit.max(1000);
    let iv = meissel_mertens_at(limit)?;
    if iv.width_exact() > target {
        return Err(Error::PrecisionExhausted { bits: PREC, detail: format!("B to {digits} digits") });
    }
    Ok(iv)
}

/// `B` at the default prime limit, computed once per process.
pub fn meissel_mertens_default() -> Result<RealInterval> {
    static CELL: OnceLock<std::result::Result<RealInterval, String>> = OnceLock::new();
    CELL.get_or_init(|| meissel_mertens_at(DEFAULT_B_LIMIT).map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::Domain)
}

fn egamma(prec: u32) -> RealInterval {
    gamma_interval(prec).exp()
}

/// `∏_{p ≡ 3 (4), p ≤ X} (1 − 1/p²)` times the tail factor `[1 − 1/X, 1]`.
fn mod4_product(limit: u64) -> Result<RealInterval> {
    let table = sieve(limit)?;
    let ps: Vec<u64> = table.primes().iter().copied().filter(|p| p % 4 == 3).collect();
    let head = prime_product(&ps, |p| Rational::from((p * p - 1, p * p)));
    let tail = RealInterval::from_rational_bounds(&Rational::from((limit - 1, limit)), &Rational::from(1), PREC);
    Ok(head.mul(&tail))
}

/// `α_{4,1} = (π e^γ/8 ∏_{p ≡ 3 (4)} (1 − 1/p²))^{1/2}`, product truncated
/// at `prime_limit ≥ 10^4`.
pub fn alpha_4_1(prime_limit: u64) -> Result<RealInterval> {
    if prime_limit < 10_000 {
        return Err(Error::domain("prime_limit must be at least 10^4"));
    }
    let (lo, hi) = literal_enclosure(NamedConst::Pi).expect("literal constant");
    let pi = RealInterval::from_rational_bounds(&lo, &hi, PREC);
    let prod = mod4_product(prime_limit)?;
    pi.mul(&egamma(PREC)).mul_rational(&Rational::from((1, 8))).mul(&prod).sqrt().map_err(fault)
}

/// `α_{4,3} = e^γ/(2 α_{4,1})`.
pub fn alpha_4_3(prime_limit: u64) -> Result<RealInterval> {
    let a = alpha_4_1(prime_limit)?;
    egamma(PREC).mul_rational(&Rational::from((1, 2))).div(&a).map_err(fault)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductCheck {
    pub limit: u64,
    /// The truncated product itself.
    pub truncated: RealInterval,
    /// Truncated product times the tail enclosure.
    pub corrected: RealInterval,
    pub target: RealInterval,
}

/// `∏_{3 ≤ p ≤ X} (1 − p^{−2})^{−1}` against `π²/8`; the tail factor over
/// `p > X` lies in `[1, X/(X−1)]`.
pub fn odd_zeta2_product(limit: u64) -> Result<ProductCheck> {
    let table = sieve(limit.max(3))?;
    let ps: Vec<u64> = table.primes().iter().copied().filter(|&p| p > 2).collect();
    let truncated = prime_product(&ps, |p| Rational::from((p * p, p * p - 1)));
    let tail = RealInterval::from_rational_bounds(&Rational::from(1), &Rational::from((limit, limit - 1)), PREC);
    let (lo, hi) = literal_enclosure(NamedConst::Pi).expect("literal constant");
    let pi = RealInterval::from_rational_bounds(&lo, &hi, PREC);
    Ok(ProductCheck {
        limit,
        corrected: truncated.mul(&tail),
        truncated,
        target: pi.mul(&pi).mul_rational(&Rational::from((1, 8))),
    })
}

/// `∏_{3 ≤ p ≤ x} (1 − 1/p)^{−1} / ((e^γ/2) log x)`.
pub fn mertens_odd_ratio(x: u64) -> Result<RealInterval> {
    if x < 3 {
        return Err(Error::domain("need x ≥ 3"));
    }
    let table = sieve(x)?;
    let ps: Vec<u64> = table.primes().iter().copied().filter(|&p| p > 2).collect();
    let prod = prime_product(&ps, |p| Rational::from((p, p - 1)));
    let den = egamma(PREC).mul_rational(&Rational::from((1, 2))).mul(&RealInterval::from_u64(x, PREC).ln().map_err(fault)?);
    prod.div(&den).map_err(fault)
}

/// `Σ_{p ≤ x} 1/p` as an interval.
pub fn prime_reciprocal_sum(x: u64) -> Result<RealInterval> {
    let table = sieve(x.max(2))?;
    prime_sum(table.primes(), |p| Ok(RealInterval::from_rational(&Rational::from((1, p)), PREC)))
}

/// Names accepted by [`named_constant`].
pub const CONSTANT_NAMES: [&str; 6] = ["gamma", "egamma", "pi", "B", "alpha41", "alpha43"];

/// Prime limit giving `α_{4,1}` to `digits` digits: the tail makes the
/// relative width about `1/(2X)`.
fn alpha_limit(digits: u32) -> Result<u64> {
    let need = pow10(digits + 1);
    need.to_u64()
        .filter(|&x| x <= MAX_PRIME_LIMIT)
        .map(|x| x.max(10_000))
        .ok_or_else(|| Error::PrecisionExhausted {
            bits: PREC,
            detail: format!("{digits} digits of the mod-4 limits need primes beyond {MAX_PRIME_LIMIT}"),
        })
}

/// One constant by name with width at most `10^-digits`.
pub fn named_constant(name: &str, digits: u32) -> Result<NamedConstant> {
    let target = Rational::from((1, pow10(digits)));
    let c = match name {
        "gamma" => NamedConstant {
            name: "gamma".into(),
            value: gamma_const(digits)?,
            derivation: "stored 205-decimal expansion, outward rounded".into(),
            tail_bound: Some("literal truncation 1e-205".into()),
        },
        "egamma" => {
            if !(1..=200).contains(&digits) {
                return Err(Error::domain("digits must be in 1..=200"));
            }
            NamedConstant {
                name: "egamma".into(),
                value: gamma_interval(bits_for_digits(digits) + 8).exp(),
                derivation: "exp of the stored γ enclosure".into(),
                tail_bound: None,
            }
        }
        "pi" => {
            if !(1..=200).contains(&digits) {
                return Err(Error::domain("digits must be in 1..=200"));
            }
            let (lo, hi) = literal_enclosure(NamedConst::Pi).expect("literal constant");
            NamedConstant {
                name: "pi".into(),
                value: RealInterval::from_rational_bounds(&lo, &hi, bits_for_digits(digits)),
                derivation: "stored 205-decimal expansion, outward rounded".into(),
                tail_bound: Some("literal truncation 1e-205".into()),
            }
        }
        "B" | "b" | "meissel-mertens" => {
            let v = meissel_mertens(digits)?;
            let limit = (pow10(digits) / 2u32 + 1u32).to_u64().unwrap_or(u64::MAX).max(1000);
            NamedConstant {
                name: "B".into(),
                value: v,
                derivation: format!("gamma + sum over p <= {limit} of log(1-1/p) + 1/p"),
                tail_bound: Some(format!("[-1/(2*{limit}), 0]")),
            }
        }
        "alpha41" | "alpha43" => {
            if !(1..=15).contains(&digits) {
                return Err(Error::domain("digits must be in 1..=15"));
            }
            let limit = alpha_limit(digits)?;
            let v = if name == "alpha41" { alpha_4_1(limit)? } else { alpha_4_3(limit)? };
            NamedConstant {
                name: name.into(),
                value: v,
                derivation: format!("Euler product over p = 3 mod 4, p <= {limit}"),
                tail_bound: Some(format!("product factor in [1 - 1/{limit}, 1]")),
            }
        }
        other => {
            return Err(Error::domain(format!(
                "unknown constant {other:?}; expected one of {}",
                CONSTANT_NAMES.join(", ")
            )))
        }
    };
    if c.value.width_exact() > target {
        return Err(Error::PrecisionExhausted { bits: c.value.precision_bits(), detail: format!("{name} to {digits} digits") });
    }
    Ok(c)
}

/// `B` as a symbolic leaf, for use inside expressions.
pub fn meissel_mertens_expr() -> RealExpr {
    RealExpr::constant(NamedConst::MeisselMertens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        crate::realnum::RealExpr::decimal(s).unwrap().as_rational().unwrap()
    }

    #[test]
    fn gamma_contains_known_digits_and_nests() {
        let g10 = gamma_const(10).unwrap();
        let g20 = gamma_const(20).unwrap();
        assert!(g10.contains_rational(&r("0.57721566490153286060")));
        assert!(g10.lo() <= g20.lo() && g20.hi() <= g10.hi());
        assert!(g20.width_exact() <= Rational::from((1, pow10(20))));
        assert!(gamma_const(0).is_err() && gamma_const(201).is_err());
        let half = egamma(128).mul_rational(&Rational::from((1, 2)));
        assert!((half.midpoint_f64() - 0.8905).abs() < 1e-4);
    }

    #[test]
    fn gamma_literal_agrees_with_euler_maclaurin() {
        // γ = H_n − log n − 1/(2n) + 1/(12n²) − 1/(120n⁴) + 1/(252n⁶) − θ/(240n⁸)
        let n = 1000u64;
        let h = crate::criteria::harmonic(n).unwrap();
        let nn = Rational::from(n);
        let inv = |c: u32, k: u32| Rational::from((Integer::from(1), Integer::from(c) * Integer::from(n).pow(k)));
        let corr = -inv(2, 1) + inv(12, 2) - inv(120, 4) + inv(252, 6);
        let base = RealInterval::from_rational(&(h + corr), 256)
            .sub(&RealInterval::from_rational(&nn, 256).ln().unwrap());
        let err = inv(240, 8);
        let em = RealInterval::from_rational_bounds(
            &(base.lo_rational() - err.clone()),
            &base.hi_rational(),
            256,
        );
        assert!(em.overlaps(&gamma_interval(256)));
        assert!(em.width_exact() < Rational::from((1, pow10(25))));
    }

    #[test]
    fn meissel_mertens_digits() {
        let b = meissel_mertens(4).unwrap();
        assert!(b.contains_rational(&r("0.26149721")));
        assert!(b.width_exact() <= Rational::from((1, 10000)));
        let b6 = meissel_mertens(6).unwrap();
        assert!(b.lo() <= b6.lo() && b6.hi() <= b.hi());
        assert!(matches!(meissel_mertens(15), Err(Error::PrecisionExhausted { .. })));
        assert!(meissel_mertens(0).is_err());
    }

    #[test]
    fn mertens_second_theorem_at_1e5() {
        let x = 100_000u64;
        let s = prime_reciprocal_sum(x).unwrap();
        let ll = RealInterval::from_u64(x, PREC).ln().unwrap().ln().unwrap();
        let d = s.sub(&ll).sub(&meissel_mertens_default().unwrap());
        let lx = (x as f64).ln();
        assert!(d.midpoint_f64() > -1e-3);
        assert!(d.midpoint_f64() < 1e-3 + 1.0 / (2.0 * lx * lx));
    }

    #[test]
    fn mod4_limits() {
        let a1 = alpha_4_1(10_000).unwrap();
        assert!(a1.contains_rational(&r("0.7738116417477")));
        let a3 = alpha_4_3(10_000).unwrap();
        assert!(a3.contains_rational(&r("1.1508436432718")));
        let half = egamma(PREC).mul_rational(&Rational::from((1, 2)));
        assert!(a1.mul(&a3).overlaps(&half));
        let fine = alpha_4_1(1_000_000).unwrap();
        assert!(a1.lo() <= fine.lo() && fine.hi() <= a1.hi());
        assert!(alpha_4_1(100).is_err());
    }

    #[test]
    fn product_identities() {
        let c = odd_zeta2_product(1_000_000).unwrap();
        assert!(c.corrected.overlaps(&c.target));
        assert!((c.truncated.midpoint_f64() - c.target.midpoint_f64()).abs() < 1e-5);
        let m = mertens_odd_ratio(1_000_000).unwrap().midpoint_f64();
        assert!((0.98..=1.02).contains(&m));
    }

    #[test]
    fn named_lookup() {
        let a = named_constant("alpha41", 4).unwrap();
        assert!(a.value.width_exact() <= Rational::from((1, 10000)));
        assert!((a.value.midpoint_f64() - 0.7738116417477).abs() < 1e-4);
        assert!(named_constant("zeta3", 4).is_err());
        assert_eq!(named_constant("gamma", 30).unwrap().name, "gamma");
    }
}
