//! The zig-zag engine against the cube engine, and the polynomial identities
//! that tie homology to the bracket.

use proptest::prelude::*;

use ratkh::closure::{compare, is_thin, kh_fast, knight_move_decomposition, oracle_diagram, sweep_links};
use ratkh::cobcat::LaurentPoly;
use ratkh::cube::{bracket_jones, jones, substitute, unnormalized_jones, Closure, OrientationRequest, OrientationType};
use ratkh::fraction::{parse_tangle, Fraction, Notation};

fn fraction_up_to(max: usize) -> impl Strategy<Value = Fraction> {
    let links = sweep_links(max);
    (0..links.len()).prop_map(move |i| links[i].fraction.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn denominator_closures_agree(f in fraction_up_to(7)) {
        let n = Notation::Fraction(f.clone());
        let c = compare(&n, Closure::Denominator, OrientationRequest::Auto, 14).unwrap();
        prop_assert!(c.agrees(), "{}: {:?}", f, c.differences());
    }

    #[test]
    fn orientation_types_agree_where_both_exist(f in fraction_up_to(7)) {
        let n = Notation::Fraction(f);
        for t in [OrientationType::TypeI, OrientationType::TypeII] {
            let req = OrientationRequest::Fixed(t);
            if oracle_diagram(&n, Closure::Numerator, req).is_ok() {
                prop_assert!(compare(&n, Closure::Numerator, req, 14).unwrap().agrees());
            }
        }
    }

    #[test]
    fn rational_knots_are_thin_with_knight_moves(f in fraction_up_to(9)) {
        prop_assume!(num_integer::Integer::is_odd(f.numer()));
        let h = kh_fast(&Notation::Fraction(f.clone()), Closure::Numerator, OrientationRequest::Auto).unwrap().homology;
        let s = knight_move_decomposition(&h);
        prop_assert!(s.is_some(), "{}", f);
        prop_assert!(is_thin(&h, s.unwrap()));
    }

    #[test]
    fn bracket_normalization_matches_jones(f in fraction_up_to(8)) {
        let d = oracle_diagram(&Notation::Fraction(f), Closure::Numerator, OrientationRequest::Auto).unwrap();
        let j = jones(&d, 14).unwrap();
        prop_assert_eq!(substitute(&j, -2, true), bracket_jones(&d, 14).unwrap());
    }
}

#[test]
fn mirror_images_have_dual_homology() {
    for s in ["7/3", "⟨2,1,2⟩", "5"] {
        let a = kh_fast(&parse_tangle(s).unwrap(), Closure::Numerator, OrientationRequest::Auto).unwrap().homology;
        let m = Notation::Fraction(parse_tangle(s).unwrap().fraction().negate());
        let b = kh_fast(&m, Closure::Numerator, OrientationRequest::Auto).unwrap().homology;
        assert_eq!(a.total_rank(), b.total_rank());
        for ((t, q), g) in a.entries() {
            assert_eq!(g.free, b.get(-t, -q).free, "{s} at ({t},{q})");
        }
    }
}

#[test]
fn figure_eight_jones() {
    let d = oracle_diagram(&parse_tangle("5/2").unwrap(), Closure::Numerator, OrientationRequest::Auto).unwrap();
    // V = t^{-2} - t^{-1} + 1 - t + t^2 with t = q^2 after normalizing.
    let expect = LaurentPoly::from_terms(&[(-4, 1), (-2, -1), (0, 1), (2, -1), (4, 1)]);
    assert_eq!(jones(&d, 14).unwrap(), expect);
    let fast = kh_fast(&parse_tangle("5/2").unwrap(), Closure::Numerator, OrientationRequest::Auto).unwrap();
    assert_eq!(fast.homology.graded_euler(), unnormalized_jones(&d, 14).unwrap());
    assert_eq!(d.writhe(), 0);
}
