use lucas_density_core::density::{self, CaseTag};
use lucas_density_core::lucasrank;
use lucas_density_core::quadfield::{context_from_gamma, make_context};
use lucas_density_core::{ratio, Error};

#[test]
fn pair_and_gamma_inputs_agree() {
    let pair = make_context(4, 2).unwrap();
    let direct = context_from_gamma(ratio(3, 1), ratio(1, 1), 8).unwrap();
    for d in [2, 6, 20, 35] {
        assert_eq!(density::density(&pair, d).unwrap(), density::density(&direct, d).unwrap());
    }
}

#[test]
fn radicand_is_renormalized() {
    // √32 = 2√8, so both describe 3+√8
    let a = context_from_gamma(ratio(3, 1), ratio(1, 2), 32).unwrap();
    let b = context_from_gamma(ratio(3, 1), ratio(1, 1), 8).unwrap();
    assert_eq!(a.gamma, b.gamma);
}

#[test]
fn rejected_inputs() {
    assert_eq!(make_context(2, 1).unwrap_err(), Error::Reducible);
    assert_eq!(context_from_gamma(ratio(0, 1), ratio(1, 2), -4).unwrap_err(), Error::Torsion);
    assert_eq!(context_from_gamma(ratio(1, 1), ratio(1, 1), 2).unwrap_err(), Error::NormNotOne);
    let fib = make_context(1, -1).unwrap();
    assert_eq!(density::density(&fib, 0).unwrap_err(), Error::Zero("d"));
}

#[test]
fn odd_levels_are_certified() {
    let ctx = context_from_gamma(ratio(3, 2), ratio(1, 2), 5).unwrap();
    let res = density::density(&ctx, 5).unwrap();
    assert_eq!(res.delta, ratio(5, 24));
    assert_eq!(res.case_tag, CaseTag::OddGeneric);
}

#[test]
fn empirical_close_to_exact() {
    let ctx = make_context(1, -1).unwrap();
    let spf = lucasrank::spf_sieve(300_001).unwrap();
    let exact = density::density(&ctx, 2).unwrap().delta;
    let rep = lucasrank::empirical_density(&ctx, 2, 300_000, &spf, Some(exact)).unwrap();
    let got = rep.counts.counted as f64 / rep.counts.eligible as f64;
    assert!((got - 2.0 / 3.0).abs() <= lucasrank::tolerance(2.0 / 3.0, rep.counts.eligible));
}
