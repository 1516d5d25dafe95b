mod common;

use common::*;
use mac_core::taylor::nested_taylor_cycle;
use mac_core::zigzag::{classes_equal, classes_equal_up_to_sign, horizontal_diff, koszul_to_taylor, vertical_diff};
use mac_core::{BicomplexElement, CellChain, TaylorChain};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zigzag_matches_closed_formula(seed in any::<u64>()) {
        let w = random_nested(&mut rng(seed), 8, 3);
        let k = w.delta_w().unwrap();
        let h = w.hurewicz_chain().unwrap();
        let (t, trace) = koszul_to_taylor(&k, &h).unwrap();
        prop_assert!(trace.check(&k, &BicomplexElement::from_cell_chain(&h)));
        let closed = nested_taylor_cycle(&w, &k).unwrap();
        prop_assert!(classes_equal_up_to_sign(&k, &t, &closed).unwrap());
    }

    #[test]
    fn differentials_commute_and_square_to_zero(seed in any::<u64>()) {
        let w = random_nested(&mut rng(seed), 7, 2);
        let k = w.delta_w().unwrap();
        let e = BicomplexElement::from_cell_chain(&w.hurewicz_chain().unwrap());
        let v = vertical_diff(&e);
        prop_assert!(vertical_diff(&v).is_zero());
        let hz = horizontal_diff(&k, &e);
        prop_assert!(horizontal_diff(&k, &hz).is_zero());
        let a = horizontal_diff(&k, &v);
        let b = vertical_diff(&hz);
        prop_assert!(a.sub(&b).is_zero());
    }
}

#[test]
fn two_point_sphere() {
    let k = mac_core::SimplicialComplex::from_facets(2, &[]).unwrap();
    let z: CellChain = "D1S2 + S1D2".parse().unwrap();
    let (t, _) = koszul_to_taylor(&k, &z).unwrap();
    let w12: TaylorChain = "w12".parse().unwrap();
    assert!(t == w12 || t == w12.scaled(&mac_core::Int::from(-1)));
}

#[test]
fn non_cycles_are_rejected() {
    let k = wedge_example();
    let z: CellChain = "D1D2S3".parse().unwrap();
    assert!(koszul_to_taylor(&k, &z).is_err());
    let a: TaylorChain = "w123".parse().unwrap();
    let b: TaylorChain = "w145^w123".parse().unwrap();
    assert!(classes_equal(&k, &a, &b).is_err());
}

#[test]
fn element_text_round_trip() {
    let e: BicomplexElement = "D4*S5*w123 - S6*w145^w123".parse().unwrap();
    let again: BicomplexElement = e.to_string().parse().unwrap();
    assert!(e.sub(&again).is_zero());
}
