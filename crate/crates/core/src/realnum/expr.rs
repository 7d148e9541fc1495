use std::fmt;
use std::ops;

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::consts;
use super::interval::{Fault, RealInterval};

/// Constants that may appear as leaves of a [`RealExpr`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NamedConst {
    EulerGamma,
    Pi,
    Ln2,
    /// Meissel–Mertens constant `B`.
    MeisselMertens,
}

impl NamedConst {
    pub fn symbol(self) -> &'static str {
        match self {
            NamedConst::EulerGamma => "γ",
            NamedConst::Pi => "π",
            NamedConst::Ln2 => "log2",
            NamedConst::MeisselMertens => "B",
        }
    }
}

/// Expression tree over exact literals, named constants and the elementary
/// operations needed by the rest of the crate. Values are only ever observed
/// through enclosures produced by an [`Evaluator`](super::Evaluator).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RealExpr {
    Int(Integer),
    Rat(Rational),
    Const(NamedConst),
    Add(Box<RealExpr>, Box<RealExpr>),
    Sub(Box<RealExpr>, Box<RealExpr>),
    Mul(Box<RealExpr>, Box<RealExpr>),
    Div(Box<RealExpr>, Box<RealExpr>),
    Neg(Box<RealExpr>),
    /// Power with an exact rational exponent.
    Pow(Box<RealExpr>, Rational),
    Ln(Box<RealExpr>),
    Exp(Box<RealExpr>),
}

// Literal powers beyond this many bits are left symbolic.
const MAX_LITERAL_POW_BITS: u64 = 1 << 16;

impl RealExpr {
    pub fn int(v: impl Into<Integer>) -> Self {
        RealExpr::Int(v.into())
    }

    pub fn rat(num: impl Into<Integer>, den: impl Into<Integer>) -> Self {
        RealExpr::rational(Rational::from((num.into(), den.into())))
    }

    pub fn rational(r: Rational) -> Self {
        if *r.denom() == 1 {
            RealExpr::Int(r.into_numer_denom().0)
        } else {
            RealExpr::Rat(r)
        }
    }

    /// Parses a decimal literal such as `0.021`, `-3`, or `1.5e-3` exactly.
    pub fn decimal(s: &str) -> Option<Self> {
        parse_decimal(s).map(RealExpr::rational)
    }

    pub fn constant(c: NamedConst) -> Self {
        RealExpr::Const(c)
    }

    pub fn gamma() -> Self {
        RealExpr::Const(NamedConst::EulerGamma)
    }

    pub fn ln(self) -> Self {
        RealExpr::Ln(Box::new(self))
    }

    pub fn exp(self) -> Self {
        RealExpr::Exp(Box::new(self))
    }

    pub fn powr(self, e: Rational) -> Self {
        RealExpr::Pow(Box::new(self), e)
    }

    pub fn powi(self, e: i64) -> Self {
        RealExpr::Pow(Box::new(self), Rational::from(e))
    }

    pub fn sqrt(self) -> Self {
        self.powr(Rational::from((1, 2)))
    }

    /// `self^exponent` for a real exponent, as `exp(exponent · ln self)`.
    pub fn pow_real(self, exponent: RealExpr) -> Self {
        (exponent * self.ln()).exp()
    }

    /// `log_base(self)`.
    pub fn log_base(self, base: RealExpr) -> Self {
        self.ln() / base.ln()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            RealExpr::Int(n) => Some(Rational::from(n)),
            RealExpr::Rat(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, RealExpr::Int(_) | RealExpr::Rat(_))
    }

    /// Rewrites the tree into a canonical form: literal subtrees are folded
    /// exactly, identities that hold for every admissible value are applied,
    /// and operands of `+` and `×` are ordered. Two expressions are treated as
    /// equal exactly when their canonical forms coincide.
    pub fn canonical(&self) -> RealExpr {
        use RealExpr::*;
        match self {
            Int(_) | Const(_) => self.clone(),
            Rat(r) => RealExpr::rational(r.clone()),
            Neg(a) => {
                let a = a.canonical();
                match a {
                    Neg(inner) => *inner,
                    ref x if x.is_literal() => RealExpr::rational(-x.as_rational().unwrap()),
                    x => Neg(Box::new(x)),
                }
            }
            Add(a, b) => {
                let (a, b) = (a.canonical(), b.canonical());
                if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
                    return RealExpr::rational(x + y);
                }
                if is_zero(&a) {
                    return b;
                }
                if is_zero(&b) {
                    return a;
                }
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                Add(Box::new(a), Box::new(b))
            }
            Sub(a, b) => {
                let (a, b) = (a.canonical(), b.canonical());
                if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
                    return RealExpr::rational(x - y);
                }
                if is_zero(&b) {
                    return a;
                }
                if let (Some(x), Some(y)) = (positive_log_arg(&a), positive_log_arg(&b)) {
                    return Ln(Box::new(RealExpr::rational(x / y))).canonical();
                }
                Sub(Box::new(a), Box::new(b))
            }
            Mul(a, b) => {
                let (a, b) = (a.canonical(), b.canonical());
                if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
                    return RealExpr::rational(x * y);
                }
                if is_one(&a) {
                    return b;
                }
                if is_one(&b) {
                    return a;
                }
                // (x / y) · y = x for y certainly nonzero.
                for (q, other) in [(&a, &b), (&b, &a)] {
                    if let Div(num, den) = q {
                        if **den == *other && certainly_nonzero(other) {
                            return (**num).clone();
                        }
                    }
                }
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                Mul(Box::new(a), Box::new(b))
            }
            Div(a, b) => {
                let (a, b) = (a.canonical(), b.canonical());
                if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
                    if y != 0 {
                        return RealExpr::rational(x / y);
                    }
                }
                if is_one(&b) {
                    return a;
                }
                if let (Some(x), Some(base)) = (positive_log_arg(&a), positive_log_arg(&b)) {
                    if let Some(k) = exact_log(&x, &base) {
                        return RealExpr::Int(Integer::from(k));
                    }
                }
                Div(Box::new(a), Box::new(b))
            }
            Pow(a, e) => {
                let a = a.canonical();
                if *e == 0 {
                    return RealExpr::int(1);
                }
                if *e == 1 {
                    return a;
                }
                if let Some(base) = a.as_rational() {
                    if let Some(v) = exact_rational_power(&base, e) {
                        return RealExpr::rational(v);
                    }
                }
                Pow(Box::new(a), e.clone())
            }
            Ln(a) => {
                let a = a.canonical();
                if is_one(&a) {
                    return RealExpr::int(0);
                }
                match a {
                    Exp(inner) => *inner,
                    x => Ln(Box::new(x)),
                }
            }
            Exp(a) => {
                let a = a.canonical();
                if is_zero(&a) {
                    return RealExpr::int(1);
                }
                if let Some(c) = positive_log_arg(&a) {
                    return RealExpr::rational(c);
                }
                Exp(Box::new(a))
            }
        }
    }

    /// Encloses the value at working precision `prec`, without escalation.
    pub(crate) fn interval_at(&self, prec: u32) -> Result<RealInterval, Fault> {
        use RealExpr::*;
        Ok(match self {
            Int(n) => RealInterval::from_integer(n, prec),
            Rat(r) => RealInterval::from_rational(r, prec),
            Const(c) => consts::enclosure(*c, prec)?,
            Add(a, b) => a.interval_at(prec)?.add(&b.interval_at(prec)?),
            Sub(a, b) => a.interval_at(prec)?.sub(&b.interval_at(prec)?),
            Mul(a, b) => a.interval_at(prec)?.mul(&b.interval_at(prec)?),
            Div(a, b) => a.interval_at(prec)?.div(&b.interval_at(prec)?)?,
            Neg(a) => a.interval_at(prec)?.neg(),
            Pow(a, e) => a.interval_at(prec)?.pow_rational(e)?,
            Ln(a) => match a.as_rational() {
                Some(r) if r <= 0 => return Err(Fault::Domain(format!("logarithm of {r}"))),
                // ln(1 + (r - 1)) keeps full relative accuracy near 1.
                Some(r) if r > Rational::from((1, 2)) && r < 2 => {
                    RealInterval::from_rational(&(r - 1u32), prec).ln_1p()?
                }
                _ => a.interval_at(prec)?.ln()?,
            },
            Exp(a) => a.interval_at(prec)?.exp(),
        })
    }
}

fn is_zero(e: &RealExpr) -> bool {
    matches!(e, RealExpr::Int(n) if *n == 0)
}

fn is_one(e: &RealExpr) -> bool {
    matches!(e, RealExpr::Int(n) if *n == 1)
}

/// If `e` is `ln(c)` for a positive literal `c`, returns `c`.
fn positive_log_arg(e: &RealExpr) -> Option<Rational> {
    match e {
        RealExpr::Ln(inner) => inner.as_rational().filter(|c| *c > 0),
        _ => None,
    }
}

fn certainly_nonzero(e: &RealExpr) -> bool {
    match e {
        RealExpr::Int(n) => *n != 0,
        RealExpr::Rat(r) => *r != 0,
        RealExpr::Const(_) => true,
        RealExpr::Exp(_) => true,
        RealExpr::Ln(inner) => matches!(inner.as_rational(), Some(c) if c > 0 && c != 1),
        _ => false,
    }
}

/// Integer `k` with `base^k == x`, if one exists.
fn exact_log(x: &Rational, base: &Rational) -> Option<i64> {
    if *base == 1 || *base <= 0 || *x <= 0 {
        return None;
    }
    if *x == 1 {
        return Some(0);
    }
    let (b, target) = if *base > 1 { (base.clone(), x.clone()) } else { (Rational::from(base.recip_ref()), Rational::from(x.recip_ref())) };
    let (t, sign) = if target >= 1 { (target, 1) } else { (target.recip(), -1) };
    let bits = t.numer().significant_bits() as u64 + t.denom().significant_bits() as u64;
    let mut acc = Rational::from(1);
    let mut k = 0i64;
    while acc < t && (k as u64) <= bits {
        acc *= &b;
        k += 1;
    }
    if acc == t {
        Some(sign * k)
    } else {
        None
    }
}

/// `base^e` when it is rational and of manageable size.
fn exact_rational_power(base: &Rational, e: &Rational) -> Option<Rational> {
    let q = e.denom().to_u32()?;
    let p = e.numer().to_i64()?;
    let size = base.numer().significant_bits() as u64 + base.denom().significant_bits() as u64;
    if size.saturating_mul(p.unsigned_abs()) > MAX_LITERAL_POW_BITS {
        return None;
    }
    let root = if q == 1 {
        base.clone()
    } else {
        if *base < 0 {
            return None;
        }
        let n = base.numer().clone().root(q);
        let d = base.denom().clone().root(q);
        let candidate = Rational::from((n, d));
        if Rational::from((&candidate).pow(q)) != *base {
            return None;
        }
        candidate
    };
    if p < 0 && root == 0 {
        return None;
    }
    let mag = Rational::from((&root).pow(p.unsigned_abs() as u32));
    Some(if p < 0 { mag.recip() } else { mag })
}

/// Exact rational value of a decimal string.
pub(crate) fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: Integer = num.trim().parse().ok()?;
        let d: Integer = den.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational::from((n, d)));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: Integer = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / 10u32;
    let scale = exp - frac_part.len() as i32;
    let ten = Integer::from(10);
    let mut r = Rational::from(digits);
    if scale >= 0 {
        r *= Integer::from((&ten).pow(scale as u32));
    } else {
        r /= Integer::from((&ten).pow((-scale) as u32));
    }
    Some(if neg { -r } else { r })
}

macro_rules! binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl ops::$trait for RealExpr {
            type Output = RealExpr;
            fn $method(self, rhs: RealExpr) -> RealExpr {
                RealExpr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl ops::Neg for RealExpr {
    type Output = RealExpr;
    fn neg(self) -> RealExpr {
        RealExpr::Neg(Box::new(self))
    }
}

impl From<i64> for RealExpr {
    fn from(v: i64) -> Self {
        RealExpr::int(v)
    }
}

impl From<u64> for RealExpr {
    fn from(v: u64) -> Self {
        RealExpr::int(v)
    }
}

impl From<Integer> for RealExpr {
    fn from(v: Integer) -> Self {
        RealExpr::Int(v)
    }
}

impl From<Rational> for RealExpr {
    fn from(v: Rational) -> Self {
        RealExpr::rational(v)
    }
}

impl fmt::Display for RealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RealExpr::*;
        match self {
            Int(n) => write!(f, "{n}"),
            Rat(r) => write!(f, "({r})"),
            Const(c) => f.write_str(c.symbol()),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "{a}·{b}"),
            Div(a, b) => write!(f, "{a}/{b}"),
            Neg(a) => write!(f, "-{a}"),
            Pow(a, e) => write!(f, "{a}^({e})"),
            Ln(a) => write!(f, "log({a})"),
            Exp(a) => write!(f, "exp({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_fold_exactly() {
        let e = RealExpr::rat(1, 3) + RealExpr::rat(2, 3);
        assert_eq!(e.canonical(), RealExpr::int(1));
        let e = RealExpr::int(8).powr(Rational::from((2, 3)));
        assert_eq!(e.canonical(), RealExpr::int(4));
        let e = RealExpr::rat(16, 2).powr(Rational::from((1, 3)));
        assert_eq!(e.canonical(), RealExpr::int(2));
        assert!(matches!(RealExpr::int(2).powr(Rational::from((1, 2))).canonical(), RealExpr::Pow(..)));
    }

    #[test]
    fn exact_logs_simplify() {
        let e = RealExpr::int(81).log_base(RealExpr::int(3));
        assert_eq!(e.canonical(), RealExpr::int(4));
        let e = RealExpr::rat(1, 8).log_base(RealExpr::int(2));
        assert_eq!(e.canonical(), RealExpr::int(-3));
        let e = RealExpr::int(10).log_base(RealExpr::int(3));
        assert!(matches!(e.canonical(), RealExpr::Div(..)));
    }

    #[test]
    fn power_of_log_quotient_collapses() {
        // p^(log_p r) = r
        let r = RealExpr::rat(26, 24);
        let eps = r.clone().log_base(RealExpr::int(3));
        let e = RealExpr::int(3).pow_real(eps);
        assert_eq!(e.canonical(), r.canonical());
    }

    #[test]
    fn commutative_operands_are_ordered() {
        let a = RealExpr::gamma() + RealExpr::int(2).ln();
        let b = RealExpr::int(2).ln() + RealExpr::gamma();
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_decimal("0.021").unwrap(), Rational::from((21, 1000)));
        assert_eq!(parse_decimal("-1.5e-3").unwrap(), Rational::from((-3, 2000)));
        assert_eq!(parse_decimal("12").unwrap(), Rational::from(12));
        assert_eq!(parse_decimal("3/4").unwrap(), Rational::from((3, 4)));
        assert!(parse_decimal("abc").is_none());
        assert!(parse_decimal("1/0").is_none());
    }

    #[test]
    fn near_one_logs_keep_relative_accuracy() {
        let tiny = Rational::from((1, Integer::from(10).pow(40)));
        let e = RealExpr::rational(Rational::from(1) + &tiny).ln();
        let iv = e.interval_at(64).unwrap();
        // ln(1 + t) ≈ t with relative error far below 2^-50.
        let rel = Rational::from(iv.width_exact() / &tiny);
        assert!(rel < Rational::from((1, 1u64 << 50)));
    }
}
