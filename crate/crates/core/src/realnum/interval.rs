use std::cmp::Ordering;
use std::fmt;

use rug::float::Round;
use rug::ops::{AssignRound, Pow};
use rug::{Float, Integer, Rational};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Why an interval operation could not produce an enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fault {
    /// The operation is undefined on every point of the input.
    Domain(String),
    /// The input straddles a singularity; more precision may separate it.
    Indeterminate,
}

pub(crate) fn down<T>(prec: u32, v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Down).0
}

pub(crate) fn up<T>(prec: u32, v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Up).0
}

fn fmin(a: Float, b: Float) -> Float {
    if b < a {
        b
    } else {
        a
    }
}

fn fmax(a: Float, b: Float) -> Float {
    if b > a {
        b
    } else {
        a
    }
}

/// A closed enclosure `[lo, hi]` of a real number. Both endpoints are
/// binary floating-point values, i.e. dyadic rationals, and every operation
/// rounds them outward so the enclosed value is never lost.
#[derive(Clone, Debug, PartialEq)]
pub struct RealInterval {
    lo: Float,
    hi: Float,
    precision_bits: u32,
}

impl RealInterval {
    /// Builds an interval from explicit endpoints. Panics if `lo > hi` or
    /// either endpoint is NaN.
    pub fn new(lo: Float, hi: Float) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        let precision_bits = lo.prec().max(hi.prec());
        RealInterval { lo, hi, precision_bits }
    }

    pub fn from_integer(n: &Integer, prec: u32) -> Self {
        RealInterval { lo: down(prec, n), hi: up(prec, n), precision_bits: prec }
    }

    pub fn from_u64(n: u64, prec: u32) -> Self {
        RealInterval { lo: down(prec, n), hi: up(prec, n), precision_bits: prec }
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        RealInterval { lo: down(prec, r), hi: up(prec, r), precision_bits: prec }
    }

    /// Encloses the closed rational range `[lo, hi]`.
    pub fn from_rational_bounds(lo: &Rational, hi: &Rational, prec: u32) -> Self {
        assert!(lo <= hi);
        RealInterval { lo: down(prec, lo), hi: up(prec, hi), precision_bits: prec }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> Float {
        up(self.precision_bits, &self.hi - &self.lo)
    }

    /// Exact width as a rational.
    pub fn width_exact(&self) -> Rational {
        self.hi_rational() - self.lo_rational()
    }

    pub fn lo_rational(&self) -> Rational {
        self.lo.to_rational().expect("finite endpoint")
    }

    pub fn hi_rational(&self) -> Rational {
        self.hi.to_rational().expect("finite endpoint")
    }

    pub fn midpoint(&self) -> Float {
        let mut m = Float::with_val(self.precision_bits + 1, &self.lo + &self.hi);
        m /= 2;
        m
    }

    pub fn midpoint_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        self.lo <= *r && self.hi >= *r
    }

    pub fn contains_float(&self, f: &Float) -> bool {
        self.lo <= *f && self.hi >= *f
    }

    /// True when `other` lies entirely inside `self`.
    pub fn contains(&self, other: &RealInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &RealInterval) -> bool {
        !(self.hi < other.lo || other.hi < self.lo)
    }

    /// Certified strict order: every point of `self` is below every point of
    /// `other`.
    pub fn certainly_lt(&self, other: &RealInterval) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_le(&self, other: &RealInterval) -> bool {
        self.hi <= other.lo
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo > 0
    }

    pub fn certainly_negative(&self) -> bool {
        self.hi < 0
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// `(floor(lo), floor(hi))`.
    pub fn floors(&self) -> (Integer, Integer) {
        let lo = self.lo.to_integer_round(Round::Down).expect("finite").0;
        let hi = self.hi.to_integer_round(Round::Down).expect("finite").0;
        (lo, hi)
    }

    /// `(ceil(lo), ceil(hi))`.
    pub fn ceils(&self) -> (Integer, Integer) {
        let lo = self.lo.to_integer_round(Round::Up).expect("finite").0;
        let hi = self.hi.to_integer_round(Round::Up).expect("finite").0;
        (lo, hi)
    }

    /// Re-rounds both endpoints outward to `prec` bits.
    pub fn with_precision(&self, prec: u32) -> Self {
        RealInterval { lo: down(prec, &self.lo), hi: up(prec, &self.hi), precision_bits: prec }
    }

    fn prec2(&self, other: &RealInterval) -> u32 {
        self.precision_bits.max(other.precision_bits)
    }

    pub fn neg(&self) -> Self {
        RealInterval {
            lo: Float::with_val(self.hi.prec(), -&self.hi),
            hi: Float::with_val(self.lo.prec(), -&self.lo),
            precision_bits: self.precision_bits,
        }
    }

    pub fn add(&self, other: &RealInterval) -> Self {
        let p = self.prec2(other);
        RealInterval {
            lo: down(p, &self.lo + &other.lo),
            hi: up(p, &self.hi + &other.hi),
            precision_bits: p,
        }
    }

    pub fn sub(&self, other: &RealInterval) -> Self {
        let p = self.prec2(other);
        RealInterval {
            lo: down(p, &self.lo - &other.hi),
            hi: up(p, &self.hi - &other.lo),
            precision_bits: p,
        }
    }

    pub fn mul(&self, other: &RealInterval) -> Self {
        let p = self.prec2(other);
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo = down(p, pairs[0].0 * pairs[0].1);
        let mut hi = up(p, pairs[0].0 * pairs[0].1);
        for (a, b) in &pairs[1..] {
            lo = fmin(lo, down(p, *a * *b));
            hi = fmax(hi, up(p, *a * *b));
        }
        RealInterval { lo, hi, precision_bits: p }
    }

    pub fn div(&self, other: &RealInterval) -> Result<Self, Fault> {
        if other.contains_zero() {
            return Err(if other.is_point() {
                Fault::Domain("division by zero".into())
            } else {
                Fault::Indeterminate
            });
        }
        let p = self.prec2(other);
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo = down(p, pairs[0].0 / pairs[0].1);
        let mut hi = up(p, pairs[0].0 / pairs[0].1);
        for (a, b) in &pairs[1..] {
            lo = fmin(lo, down(p, *a / *b));
            hi = fmax(hi, up(p, *a / *b));
        }
        Ok(RealInterval { lo, hi, precision_bits: p })
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        self.mul(&RealInterval::from_rational(r, self.precision_bits))
    }

    pub fn ln(&self) -> Result<Self, Fault> {
        if self.hi <= 0 {
            return Err(Fault::Domain(format!("logarithm of non-positive value {}", self.hi)));
        }
        if self.lo <= 0 {
            return Err(Fault::Indeterminate);
        }
        let p = self.precision_bits;
        Ok(RealInterval { lo: down(p, self.lo.ln_ref()), hi: up(p, self.hi.ln_ref()), precision_bits: p })
    }

    /// `ln(1 + self)`, accurate when `self` is tiny.
    pub fn ln_1p(&self) -> Result<Self, Fault> {
        if self.hi <= -1 {
            return Err(Fault::Domain("ln_1p of value <= -1".into()));
        }
        if self.lo <= -1 {
            return Err(Fault::Indeterminate);
        }
        let p = self.precision_bits;
        Ok(RealInterval {
            lo: down(p, self.lo.ln_1p_ref()),
            hi: up(p, self.hi.ln_1p_ref()),
            precision_bits: p,
        })
    }

    pub fn exp(&self) -> Self {
        let p = self.precision_bits;
        RealInterval { lo: down(p, self.lo.exp_ref()), hi: up(p, self.hi.exp_ref()), precision_bits: p }
    }

    pub fn sqrt(&self) -> Result<Self, Fault> {
        if self.hi < 0 {
            return Err(Fault::Domain("square root of negative value".into()));
        }
        if self.lo < 0 {
            return Err(Fault::Indeterminate);
        }
        let p = self.precision_bits;
        Ok(RealInterval { lo: down(p, self.lo.sqrt_ref()), hi: up(p, self.hi.sqrt_ref()), precision_bits: p })
    }

    /// Integer power.
    pub fn powi(&self, n: i32) -> Result<Self, Fault> {
        let p = self.precision_bits;
        if n == 0 {
            return Ok(RealInterval::from_u64(1, p));
        }
        if n < 0 {
            let pos = self.powi(-n)?;
            return RealInterval::from_u64(1, p).div(&pos);
        }
        let n = n as u32;
        if self.lo >= 0 {
            return Ok(RealInterval {
                lo: down(p, (&self.lo).pow(n)),
                hi: up(p, (&self.hi).pow(n)),
                precision_bits: p,
            });
        }
        if self.hi <= 0 {
            let m = self.neg().powi(n as i32)?;
            return Ok(if n % 2 == 0 { m } else { m.neg() });
        }
        // straddles zero
        if n % 2 == 1 {
            return Ok(RealInterval {
                lo: down(p, (&self.lo).pow(n)),
                hi: up(p, (&self.hi).pow(n)),
                precision_bits: p,
            });
        }
        let mag = fmax(Float::with_val(p, self.lo.abs_ref()), Float::with_val(p, self.hi.abs_ref()));
        Ok(RealInterval { lo: Float::with_val(p, 0), hi: up(p, (&mag).pow(n)), precision_bits: p })
    }

    /// Real power with a rational exponent, defined for positive bases.
    pub fn pow_rational(&self, e: &Rational) -> Result<Self, Fault> {
        if *e.denom() == 1 {
            if let Some(n) = e.numer().to_i32() {
                return self.powi(n);
            }
        }
        let p = self.precision_bits;
        if *e > 0 && self.is_point() && self.lo == 0 {
            return Ok(RealInterval::from_u64(0, p));
        }
        let ln = self.ln()?;
        Ok(ln.mul(&RealInterval::from_rational(e, p)).exp())
    }

    /// Interval hull of two intervals.
    pub fn hull(&self, other: &RealInterval) -> Self {
        let p = self.prec2(other);
        let lo = if self.lo <= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi >= other.hi { self.hi.clone() } else { other.hi.clone() };
        RealInterval { lo, hi, precision_bits: p }
    }

    /// Decimal rendering of the endpoints, rounded outward to `sig`
    /// significant digits.
    pub fn decimal_bounds(&self, sig: usize) -> (String, String) {
        (
            float_to_decimal(&self.lo, sig, Round::Down),
            float_to_decimal(&self.hi, sig, Round::Up),
        )
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.decimal_bounds(20);
        write!(f, "[{lo}, {hi}]")
    }
}

impl Serialize for RealInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (lo, hi) = self.decimal_bounds(20);
        let mut s = serializer.serialize_struct("RealInterval", 3)?;
        s.serialize_field("lo", &lo)?;
        s.serialize_field("hi", &hi)?;
        s.serialize_field("precision_bits", &self.precision_bits)?;
        s.end()
    }
}

/// Plain (non-scientific) decimal rendering of a finite float with `sig`
/// significant digits, rounded in the given direction.
pub fn float_to_decimal(f: &Float, sig: usize, round: Round) -> String {
    let r = f.to_rational().expect("finite float");
    rational_to_decimal(&r, sig, round)
}

/// Plain decimal rendering of a rational with `sig` significant digits.
/// `Round::Down` rounds toward −∞ and `Round::Up` toward +∞.
pub fn rational_to_decimal(r: &Rational, sig: usize, round: Round) -> String {
    assert!(sig >= 1);
    if *r == 0 {
        return "0".to_string();
    }
    let negative = *r < 0;
    let mag = Rational::from(r.abs_ref());
    // Decimal exponent e with 10^e <= mag < 10^(e+1).
    let approx = mag.to_f64();
    let mut e = if approx.is_finite() && approx > 0.0 {
        approx.log10().floor() as i64
    } else {
        (mag.numer().significant_bits() as i64 - mag.denom().significant_bits() as i64) * 3 / 10
    };
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from(Integer::from(10).pow(k as u32))
        } else {
            Rational::from((Integer::from(1), Integer::from(10).pow((-k) as u32)))
        }
    };
    while pow10(e) > mag {
        e -= 1;
    }
    while pow10(e + 1) <= mag {
        e += 1;
    }
    let shift = sig as i64 - 1 - e;
    let scaled = mag * pow10(shift);
    // Magnitude rounding direction depends on the sign.
    let toward_infinity = matches!((round, negative), (Round::Up, false) | (Round::Down, true));
    let digits = if toward_infinity {
        scaled.ceil().numer().clone()
    } else {
        scaled.floor().numer().clone()
    };
    let mut s = digits.to_string();
    let mut shift = shift;
    // A carry may add a digit (e.g. 9.99 -> 10.0); keep the value exact.
    if s.len() > sig {
        let trimmed = s.len() - sig;
        if s[s.len() - trimmed..].bytes().all(|b| b == b'0') {
            s.truncate(sig);
            shift -= trimmed as i64;
        }
    }
    let body = if shift <= 0 {
        let mut out = s;
        out.extend(std::iter::repeat('0').take((-shift) as usize));
        out
    } else {
        let shift = shift as usize;
        if s.len() > shift {
            let (int, frac) = s.split_at(s.len() - shift);
            format!("{int}.{frac}")
        } else {
            format!("0.{}{}", "0".repeat(shift - s.len()), s)
        }
    };
    let body = if body.contains('.') {
        let t = body.trim_end_matches('0');
        t.trim_end_matches('.').to_string()
    } else {
        body
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> RealInterval {
        RealInterval::new(Float::with_val(64, lo), Float::with_val(64, hi))
    }

    #[test]
    fn arithmetic_encloses_exact_results() {
        let third = RealInterval::from_rational(&Rational::from((1, 3)), 64);
        let one = third.add(&third).add(&third);
        assert!(one.contains_rational(&Rational::from(1)));
        assert!(!one.is_point());
        let prod = iv(-2.0, 3.0).mul(&iv(-5.0, 1.0));
        assert_eq!(prod.lo().to_f64(), -15.0);
        assert_eq!(prod.hi().to_f64(), 10.0);
    }

    #[test]
    fn division_by_straddling_interval_is_indeterminate() {
        assert_eq!(iv(1.0, 2.0).div(&iv(-1.0, 1.0)), Err(Fault::Indeterminate));
        assert!(matches!(iv(1.0, 2.0).div(&iv(0.0, 0.0)), Err(Fault::Domain(_))));
    }

    #[test]
    fn ln_domain() {
        assert!(matches!(iv(-2.0, -1.0).ln(), Err(Fault::Domain(_))));
        assert_eq!(iv(-1.0, 1.0).ln(), Err(Fault::Indeterminate));
        let l = RealInterval::from_u64(3, 128).ln().unwrap();
        assert!(l.lo().to_f64() < 1.0986123 && l.hi().to_f64() > 1.0986122);
    }

    #[test]
    fn even_power_of_straddling_interval() {
        let sq = iv(-3.0, 2.0).powi(2).unwrap();
        assert_eq!(sq.lo().to_f64(), 0.0);
        assert_eq!(sq.hi().to_f64(), 9.0);
        let cube = iv(-3.0, 2.0).powi(3).unwrap();
        assert_eq!(cube.lo().to_f64(), -27.0);
    }

    #[test]
    fn decimal_rendering() {
        let r = Rational::from((1, 3));
        assert_eq!(rational_to_decimal(&r, 5, Round::Down), "0.33333");
        assert_eq!(rational_to_decimal(&r, 5, Round::Up), "0.33334");
        assert_eq!(rational_to_decimal(&Rational::from(-r.clone()), 3, Round::Down), "-0.334");
        assert_eq!(rational_to_decimal(&Rational::from(123456), 3, Round::Up), "124000");
        assert_eq!(rational_to_decimal(&Rational::from((999, 100)), 2, Round::Up), "10");
        assert_eq!(rational_to_decimal(&Rational::from(5), 20, Round::Down), "5");
        let tiny = Rational::from((1, Integer::from(10).pow(30)));
        assert_eq!(rational_to_decimal(&tiny, 2, Round::Down), "0.000000000000000000000000000001");
    }
}
