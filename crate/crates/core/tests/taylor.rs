mod common;

use std::collections::BTreeMap;

use common::*;
use mac_core::moment_angle::zk_homology;
use mac_core::taylor::{
    cone_reconstruction, nested_taylor_cycle, taylor_face_complex, taylor_homology, verify_taylor_is_resolution,
};
use mac_core::{Face, Int, MonomialIdeal, TaylorChain};
use proptest::prelude::*;
use rand::Rng;

fn random_ideal(seed: u64, vars: usize, gens: usize) -> MonomialIdeal {
    let mut r = rng(seed);
    let mut sets: Vec<Face> = (0..gens).map(|_| Face::from_bits(r.gen_range(1u64..1 << vars))).collect();
    sets.sort();
    sets.dedup();
    let minimal: Vec<Face> =
        sets.iter().copied().filter(|s| !sets.iter().any(|t| t != s && t.is_subset(*s))).collect();
    MonomialIdeal::square_free(vars, &minimal).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn taylor_route_matches_cellular(seed in any::<u64>(), m in 2u32..=5) {
        let k = random_complex(&mut rng(seed), m);
        if k.missing_faces().len() <= 10 {
            let a: BTreeMap<_, _> = zk_homology(&k).unwrap().into_iter().filter(|(_, g)| !g.is_zero()).collect();
            prop_assert_eq!(a, taylor_homology(&k).unwrap());
        }
    }

    #[test]
    fn square_free_ideals_resolve(seed in any::<u64>(), vars in 1usize..=5, gens in 1usize..=6) {
        let ideal = random_ideal(seed, vars, gens);
        let rep = verify_taylor_is_resolution(&ideal, None).unwrap();
        prop_assert!(rep.exact, "{:?}", rep);
        if ideal.generators().len() <= 5 {
            prop_assert!(cone_reconstruction(&ideal).unwrap().matches);
        }
    }

    #[test]
    fn general_ideals_resolve(exps in prop::collection::vec(prop::collection::vec(0u32..=2, 2), 1..=4)) {
        let mut gens: Vec<Vec<u32>> = Vec::new();
        for e in exps {
            if e.iter().all(|x| *x == 0) || gens.contains(&e) {
                continue;
            }
            gens.push(e);
        }
        let minimal: Vec<Vec<u32>> = gens
            .iter()
            .filter(|g| !gens.iter().any(|h| h != *g && h.iter().zip(g.iter()).all(|(a, b)| a <= b)))
            .cloned()
            .collect();
        prop_assume!(!minimal.is_empty());
        let ideal = MonomialIdeal::new(2, minimal).unwrap();
        prop_assert!(verify_taylor_is_resolution(&ideal, None).unwrap().exact);
        prop_assert!(cone_reconstruction(&ideal).unwrap().matches);
    }

    #[test]
    fn nested_cycles_are_cycles(seed in any::<u64>()) {
        let w = random_nested(&mut rng(seed), 8, 3);
        let k = w.delta_w().unwrap();
        let t = taylor_face_complex(&k).unwrap();
        let z = nested_taylor_cycle(&w, &k).unwrap();
        prop_assert!(t.is_cycle(&z));
        prop_assert!(!t.is_boundary(&z).unwrap());
        prop_assert_eq!(z.degree, w.dimension().unwrap());
    }
}

#[test]
fn text_round_trip() {
    let z: TaylorChain = "(w145 + w245 + w345)^w123".parse().unwrap();
    assert_eq!(z.to_string(), "w145^w123 + w245^w123 + w345^w123");
    let again: TaylorChain = z.to_string().parse().unwrap();
    assert_eq!(z, again);
    let swapped: TaylorChain = "w123^w145".parse().unwrap();
    let direct: TaylorChain = "w145^w123".parse().unwrap();
    assert_eq!(swapped, direct.scaled(&Int::from(-1)));
}

#[test]
fn wedge_example_ranks() {
    let t = taylor_face_complex(&wedge_example()).unwrap();
    let r: Vec<usize> = (0..=4).map(|s| t.rank_in_index(s)).collect();
    assert_eq!(r, vec![1, 4, 6, 4, 1]);
}

#[test]
fn invalid_ideals_are_rejected() {
    assert!(MonomialIdeal::new(2, vec![vec![1, 0], vec![1, 1]]).is_err());
    assert!(MonomialIdeal::new(2, vec![vec![1]]).is_err());
}
