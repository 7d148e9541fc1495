use robin_core::abundant::{abundant_below, alpha_p, assemble, verify_xk_lemma, Parity};
use robin_core::criteria::{
    chain_check, lagarias_check, lagarias_scan, robin_check, robin_scan, squarefree_witnesses, ScanFilter,
    ThresholdKind,
};
use robin_core::divisors::{f_ratio, factorize_u64};
use robin_core::{Evaluator, Factorization, PrimeTable, RealExpr, Verdict};
use rug::{Integer, Rational};

const TABLE_ODD: [&str; 23] = [
    "3",
    "15",
    "45",
    "315",
    "3465",
    "45045",
    "135135",
    "675675",
    "11486475",
    "218243025",
    "5019589575",
    "145568097675",
    // Often printed as ...975, which is not 3^3·5^2·7·…·31.
    "4512611027925",
    "31588277195475",
    "94764831586425",
    "3506298768697725",
    "143758249516606725",
    "6181604729214089175",
    "290535422273062191225",
    "15398377380472296134925",
    "908504265447865471960575",
    "4542521327239327359802875",
    "277093800961598968947975375",
];

const C0: &str = "18565284664427130919514350125";

const TABLE_ALL: [u64; 12] = [2, 6, 12, 60, 120, 360, 2520, 5040, 55440, 720720, 1441440, 4324320];

fn table() -> PrimeTable {
    PrimeTable::sieve(1 << 12).unwrap()
}

#[test]
fn odd_records_below_c0() {
    let ev = Evaluator::default();
    let c0: Integer = C0.parse().unwrap();
    let recs = abundant_below(&table(), &c0, Parity::Odd, &ev).unwrap();
    let got: Vec<String> = recs.iter().map(|r| r.n.to_string()).collect();
    assert_eq!(got, TABLE_ODD);
    let through = abundant_below(&table(), &(c0.clone() + 1u32), Parity::Odd, &ev).unwrap();
    assert_eq!(through.len(), 24);
    assert_eq!(through[23].n, c0);
}

#[test]
fn all_records_first_twelve() {
    let ev = Evaluator::default();
    let recs = abundant_below(&table(), &Integer::from(4324321), Parity::All, &ev).unwrap();
    let got: Vec<Integer> = recs.iter().map(|r| r.n.clone()).collect();
    assert_eq!(got, TABLE_ALL.map(Integer::from));
}

#[test]
fn chain_inequality_on_odd_records() {
    let ev = Evaluator::default();
    let c0: Integer = C0.parse().unwrap();
    let recs = abundant_below(&table(), &(c0 + 1u32), Parity::Odd, &ev).unwrap();
    for r in recs.iter().filter(|r| r.n >= 3) {
        let rep = chain_check(&r.factorization, &ev).unwrap();
        assert_eq!(rep.verdict, Verdict::Satisfies, "n = {}", r.n);
    }
}

#[test]
fn exponents_at_small_epsilon() {
    let ev = Evaluator::default();
    let eps = RealExpr::decimal("0.021").unwrap();
    let ps = [2u64, 3, 5, 7, 11, 13, 17];
    let got: Vec<u32> = ps.iter().map(|&p| alpha_p(p, &eps, &ev).unwrap()).collect();
    assert_eq!(got, vec![5, 3, 1, 1, 1, 1, 0]);
    assert_eq!(assemble(&eps, Parity::All, &table(), &ev).unwrap().value(), 4324320);
    let rep = verify_xk_lemma(&eps, &ev).unwrap();
    assert!(rep.checks.iter().all(|c| c.verdict == Verdict::Satisfies));
}

#[test]
fn shifted_ratios_for_135135() {
    let ev = Evaluator::default();
    let tol = Rational::from((1, 1u64 << 50));
    let n = factorize_u64(135135);
    let a = f_ratio(&n.times_prime_power(2, 4), &tol, &ev).unwrap();
    let b = f_ratio(&n.times_prime_power(2, 5), &tol, &ev).unwrap();
    assert!((a.midpoint_f64() - 1.7255702285261329).abs() < 1e-12);
    assert!((b.midpoint_f64() - 1.7235466598633696).abs() < 1e-12);
}

#[test]
fn robin_exceptions_end_at_5040() {
    let ev = Evaluator::default();
    let rep = robin_scan(3, 1_000_000, ThresholdKind::Egamma, ScanFilter::All, &ev).unwrap();
    assert_eq!(rep.violations.last(), Some(&5040));
    assert!(rep.unresolved.is_empty());
}

#[test]
fn odd_integers_above_21_stay_below_three_quarters() {
    let ev = Evaluator::default();
    let rep = robin_scan(23, 1_000_000, ThresholdKind::ThreequarterEgamma, ScanFilter::Odd, &ev).unwrap();
    assert_eq!(rep.verdict(), Verdict::Satisfies);
    let small = robin_scan(3, 21, ThresholdKind::ThreequarterEgamma, ScanFilter::Odd, &ev).unwrap();
    assert!(small.violations.contains(&21));
}

#[test]
fn two_power_times_squarefree_exceptions() {
    let ev = Evaluator::default();
    let rep = robin_scan(3, 1_000_000, ThresholdKind::Egamma, ScanFilter::TwoPowerTimesSquarefree, &ev).unwrap();
    assert!(rep.unresolved.is_empty());
    assert_eq!(rep.violations.last(), Some(&840));
    for n in [3u64, 4, 5, 6, 8, 10, 12, 16, 24, 30, 48, 60, 84, 120, 240, 840] {
        assert!(rep.violations.contains(&n), "{n}");
    }
}

#[test]
fn squarefree_witnesses_and_range() {
    let ev = Evaluator::default();
    for w in squarefree_witnesses() {
        let rep = robin_check(&w, ThresholdKind::HalfEgamma, &ev).unwrap();
        assert_eq!(rep.verdict, Verdict::Satisfies, "{w}");
    }
    let rep = robin_scan(4849845, 10_000_000, ThresholdKind::HalfEgamma, ScanFilter::OddSquarefree, &ev).unwrap();
    assert_eq!(rep.verdict(), Verdict::Satisfies);
}

#[test]
fn many_prime_factors_bound() {
    let ev = Evaluator::default();
    let f: Factorization = "3^4*5^3*7^2*11*13*17*19*23*29*31*37*41*43*47*53*59*61*67".parse().unwrap();
    assert_eq!(robin_check(&f, ThresholdKind::HalfEgamma, &ev).unwrap().verdict, Verdict::Satisfies);
    let thirteen: Factorization = "3*5*7*11*13*17*19*23*29*31*37*41*43".parse().unwrap();
    assert_eq!(robin_check(&thirteen, ThresholdKind::C045Egamma, &ev).unwrap().verdict, Verdict::Satisfies);
}

#[test]
fn lagarias_analogue_small_odd_range() {
    let ev = Evaluator::default();
    let rep = lagarias_scan(100_000, &ev).unwrap();
    assert_eq!(rep.checked, 49_999);
    assert_eq!(rep.verdict(), Verdict::Satisfies);
}

#[test]
fn lagarias_analogue_at_c0() {
    let ev = Evaluator::default();
    let f = robin_core::divisors::factorize(&C0.parse().unwrap()).unwrap();
    assert_eq!(lagarias_check(&f, &ev).unwrap().verdict, Verdict::Satisfies);
}
