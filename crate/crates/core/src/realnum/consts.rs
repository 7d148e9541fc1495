//! Stored decimal expansions of the named constants. Each literal is the true
//! value truncated after 205 decimals, so the value lies in `[L, L + 10^-205]`.

use std::sync::OnceLock;

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::expr::{parse_decimal, NamedConst};
use super::interval::{Fault, RealInterval};

pub const LITERAL_DECIMALS: u32 = 205;

pub const EULER_GAMMA: &str = "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495146314472498070824809605040144865428362241739976449235362535003337429373377376739427925952582470949160087";
pub const PI: &str = "3.1415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679821480865132823066470938446095505822317253594081284811174502841027019385211055596446229489549303819644288";
pub const LN2: &str = "0.6931471805599453094172321214581765680755001343602552541206800094933936219696947156058633269964186875420014810205706857336855202357581305570326707516350759619307275708283714351903070386238916734711233501153";

fn literal_bounds(s: &str) -> (Rational, Rational) {
    let lo = parse_decimal(s).expect("well-formed literal");
    let ulp = Rational::from((1, Integer::from(10).pow(LITERAL_DECIMALS)));
    let hi = Rational::from(&lo + &ulp);
    (lo, hi)
}

fn cached(cell: &'static OnceLock<(Rational, Rational)>, s: &str) -> &'static (Rational, Rational) {
    cell.get_or_init(|| literal_bounds(s))
}

/// Exact rational bounds for a literal-backed constant.
pub fn literal_enclosure(c: NamedConst) -> Option<(Rational, Rational)> {
    static G: OnceLock<(Rational, Rational)> = OnceLock::new();
    static P: OnceLock<(Rational, Rational)> = OnceLock::new();
    static L: OnceLock<(Rational, Rational)> = OnceLock::new();
    match c {
        NamedConst::EulerGamma => Some(cached(&G, EULER_GAMMA).clone()),
        NamedConst::Pi => Some(cached(&P, PI).clone()),
        NamedConst::Ln2 => Some(cached(&L, LN2).clone()),
        NamedConst::MeisselMertens => None,
    }
}

pub(crate) fn enclosure(c: NamedConst, prec: u32) -> Result<RealInterval, Fault> {
    match literal_enclosure(c) {
        Some((lo, hi)) => Ok(RealInterval::from_rational_bounds(&lo, &hi, prec)),
        None => Ok(crate::constants::meissel_mertens_default()
            .map_err(|e| Fault::Domain(e.to_string()))?
            .with_precision(prec)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;
    use rug::Float;

    fn check(c: NamedConst, mpfr: Float) {
        let (lo, hi) = literal_enclosure(c).unwrap();
        let exact = mpfr.to_rational().unwrap();
        // MPFR value at 1000 bits is within 2^-990 of the truth.
        let slack = Rational::from((1, Integer::from(1) << 990));
        assert!(lo <= Rational::from(&exact + &slack), "{c:?} lower bound");
        assert!(Rational::from(&exact - &slack) <= hi, "{c:?} upper bound");
    }

    #[test]
    fn literals_agree_with_mpfr() {
        check(NamedConst::EulerGamma, Float::with_val(1000, Constant::Euler));
        check(NamedConst::Pi, Float::with_val(1000, Constant::Pi));
        check(NamedConst::Ln2, Float::with_val(1000, Constant::Log2));
    }

    #[test]
    fn literals_have_expected_length() {
        for s in [EULER_GAMMA, PI, LN2] {
            let frac = s.split_once('.').unwrap().1;
            assert_eq!(frac.len(), LITERAL_DECIMALS as usize);
        }
    }
}
