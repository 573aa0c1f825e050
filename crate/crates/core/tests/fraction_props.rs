use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use ratkh::fraction::{
    canonical_form, canonical_standard_form, links_isotopic, parse_tangle, ContinuedFraction, Fraction, Notation,
    StandardForm, TangleOp,
};

fn fraction() -> impl Strategy<Value = Fraction> {
    (-500i64..500, 1i64..200).prop_map(|(p, q)| Fraction::new(p, q).unwrap())
}

/// Independent evaluation of `[a1, ..., an] = a1 + 1/(a2 + ...)` with plain
/// numerator/denominator pairs.
fn eval_by_hand(terms: &[i64]) -> (i128, i128) {
    let (mut p, mut q) = (1i128, 0i128);
    for &a in terms.iter().rev() {
        (p, q) = (a as i128 * p + q, p);
    }
    if q < 0 {
        (-p, -q)
    } else {
        (p, q)
    }
}

proptest! {
    #[test]
    fn display_parses_back(f in fraction()) {
        prop_assert_eq!(parse_tangle(&f.to_string()).unwrap().fraction(), f);
    }

    #[test]
    fn canonical_form_is_odd_coherent_and_exact(f in fraction()) {
        let cf = canonical_form(&f).unwrap();
        prop_assert_eq!(cf.len() % 2, 1);
        let pos = cf.terms().iter().all(|t| !t.is_negative());
        let neg = cf.terms().iter().all(|t| !t.is_positive());
        prop_assert!(pos || neg);
        prop_assert!(cf.terms()[1..].iter().all(|t| !t.is_zero()));
        prop_assert!(cf.is_canonical());
        prop_assert_eq!(cf.eval(), f.clone());
        let terms: Vec<i64> = cf.terms().iter().map(|t| i64::try_from(t).unwrap()).collect();
        let (p, q) = eval_by_hand(&terms);
        prop_assert_eq!(Fraction::new(BigInt::from(p), BigInt::from(q)).unwrap(), f);
    }

    #[test]
    fn reversal_keeps_the_fraction(terms in prop::collection::vec(1i64..6, 1..7), lead in 0i64..6) {
        let mut t = vec![lead];
        t.extend(terms);
        let cf = ContinuedFraction::from_i64(&t).unwrap();
        let sf = cf.to_standard_form();
        // Odd length reads the same tangle; even length ends on a bottom
        // twist and gives the reciprocal.
        let expect = if t.len() % 2 == 1 { cf.eval() } else { cf.eval().invert() };
        prop_assert_eq!(sf.fraction(), expect);
        prop_assert_eq!(sf.crossing_count() as i64, t.iter().sum::<i64>());
    }

    #[test]
    fn canonical_standard_form_round_trips(f in fraction()) {
        let sf = canonical_standard_form(&f).unwrap();
        prop_assert_eq!(sf.fraction(), f.clone());
        prop_assert!(sf.is_sign_coherent());
        let text = sf.to_string();
        prop_assert_eq!(parse_tangle(&text).unwrap(), Notation::Standard(sf));
    }

    #[test]
    fn tangle_operations(f in fraction()) {
        prop_assert_eq!(f.invert().invert(), f.clone());
        prop_assert_eq!(f.negate().negate(), f.clone());
        prop_assert_eq!(f.rotate().rotate(), f.clone());
        prop_assert_eq!(f.apply(TangleOp::AddOne).apply(TangleOp::SubOne), f.clone());
        // Mirror then rotate is rotate then mirror.
        prop_assert_eq!(f.negate().rotate(), f.rotate().negate());
    }

    #[test]
    fn negated_standard_form_negates_fraction(twists in prop::collection::vec(0i64..5, 1..6)) {
        let sf = StandardForm::from_i64(&twists);
        prop_assume!(sf.is_ok());
        let sf = sf.unwrap();
        let f = sf.fraction();
        prop_assume!(!f.is_infinite());
        prop_assert_eq!(sf.negate().fraction(), f.negate());
    }

    #[test]
    fn link_isotopy_is_an_equivalence(p in 1i64..60, q in 1i64..60, k in -3i64..3) {
        let g = num_integer::gcd(p, q);
        let (p, q) = (p / g, q / g);
        let b = BigInt::from;
        // Reflexive, invariant under q ↦ q + kp, symmetric.
        prop_assert!(links_isotopic(&b(p), &b(q), &b(p), &b(q)).unwrap());
        prop_assert!(links_isotopic(&b(p), &b(q), &b(p), &b(q + k * p)).unwrap());
        if let Some(inv) = (1..=p).find(|x| (x * q - 1).rem_euclid(p) == 0) {
            prop_assert!(links_isotopic(&b(p), &b(q), &b(p), &b(inv)).unwrap());
            prop_assert!(links_isotopic(&b(p), &b(inv), &b(p), &b(q)).unwrap());
        }
    }
}

#[test]
fn documented_examples() {
    let f = |s: &str| parse_tangle(s).unwrap().fraction();
    assert_eq!(canonical_form(&Fraction::new(5, 2).unwrap()).unwrap().to_string(), "[2,1,1]");
    assert_eq!(f("⟨-3,1,1⟩"), Fraction::new(5, 2).unwrap());
    assert_eq!(f("<2,2>"), Fraction::new(2, 5).unwrap());
    assert_eq!(f("[2,1,1]"), Fraction::new(5, 2).unwrap());
    assert!(f("∞").is_infinite());
    assert!(Fraction::new(0, 1).unwrap().invert().is_infinite());
}
