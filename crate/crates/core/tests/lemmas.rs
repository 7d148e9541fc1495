use robin_core::criteria::{verify_lemma_bounds, LemmaId};
use robin_core::Evaluator;

fn run(l: LemmaId) -> robin_core::criteria::LemmaReport {
    let rep = verify_lemma_bounds(l, &l.default_samples(), &Evaluator::default()).unwrap();
    for (name, iv) in &rep.derived {
        println!("{} {name}: {iv}", l.name());
    }
    println!("{}: {} checked, {} passed", l.name(), rep.checked, rep.passed);
    rep
}

#[test]
fn theta_sum_margin() {
    let rep = run(LemmaId::L3_1);
    assert!(rep.all_passed(), "{:?}", rep.checks.first());
    assert!(rep.checked >= 213);
}

#[test]
fn loglog_constant_on_grid() {
    let rep = run(LemmaId::L3_3C);
    assert!(rep.all_passed());
    let c = &rep.derived[0].1;
    assert!(c.midpoint_f64() > 0.99154 && (c.midpoint_f64() - 0.9915412606).abs() < 1e-9);
}

#[test]
fn exponent_sign_change() {
    let rep = run(LemmaId::P3_5Threshold);
    assert!(rep.all_passed());
    let root = &rep.derived[0].1;
    assert!(root.midpoint_f64() > 10723.0 && root.midpoint_f64() < 10725.0);
    assert_eq!(rep.derived[1].1.midpoint_f64(), 10724.0);
}

#[test]
fn harmonic_lower_bound() {
    assert!(run(LemmaId::L4_1).all_passed());
}

#[test]
fn harmonic_sandwich_exact() {
    let rep = run(LemmaId::L4_2);
    assert!(rep.all_passed());
    assert_eq!(rep.checked, 99_998);
}

#[test]
fn harmonic_upper_bound() {
    assert!(run(LemmaId::L4_3).all_passed());
}

#[test]
fn concavity_beyond_inflection() {
    let rep = run(LemmaId::L4_4Concavity);
    assert!(rep.all_passed());
    let t = &rep.derived[0].1;
    assert!((t.midpoint_f64() - 6.1933661381).abs() < 1e-8);
    let et = &rep.derived[1].1;
    assert!(et.midpoint_f64() < 490.0 && et.midpoint_f64() > 489.0);
}
