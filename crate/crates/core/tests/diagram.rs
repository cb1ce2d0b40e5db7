mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vassiliev::Diagram;

fn arb(seed: u64, degree: usize, connected: bool) -> Diagram {
    Diagram::random(&mut ChaCha8Rng::seed_from_u64(seed), degree, connected)
}

#[test]
fn text_round_trip() {
    let mut rng = common::rng(21);
    for i in 0..200 {
        let d = Diagram::random(&mut rng, 1 + i % 5, i % 2 == 0);
        let s = d.to_string();
        assert_eq!(s.parse::<Diagram>().unwrap(), d, "{s}");
    }
}

#[test]
fn tadpoles_have_sign_zero() {
    // a vertex with a loop and one leg, next to a chord
    let d = Diagram::new(3, 1, vec![3, 2, 1, 0, 5, 4]).unwrap();
    assert_eq!(d.canonicalize().sign, 0);
    assert_eq!(Diagram::tripod().canonicalize().sign.abs(), 1);
}

#[test]
fn overlapping_products_are_detected() {
    let x = Diagram::from_chords(&[(0, 2), (1, 3)]).unwrap();
    let r = x.decompose();
    assert_eq!(r.components.len(), 2);
    assert!(r.overlapping);
    let par = Diagram::chord().product(&Diagram::chord());
    assert!(!par.decompose().overlapping);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonicalize_is_idempotent(seed in any::<u64>(), degree in 1usize..6, connected in any::<bool>()) {
        let d = arb(seed, degree, connected);
        let c = d.canonicalize();
        if c.sign != 0 {
            let again = c.diagram.canonicalize();
            prop_assert_eq!(again.sign, 1);
            prop_assert_eq!(again.diagram, c.diagram);
        }
    }

    #[test]
    fn canonicalize_ignores_relabeling(seed in any::<u64>(), degree in 1usize..6, connected in any::<bool>()) {
        let d = arb(seed, degree, connected);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let r = d.random_relabel(&mut rng);
        let (a, b) = (d.canonicalize(), r.canonicalize());
        prop_assert_eq!(a.diagram, b.diagram);
        prop_assert_eq!(a.sign, b.sign);
    }

    #[test]
    fn flipping_a_vertex_flips_the_sign(seed in any::<u64>(), degree in 2usize..6) {
        let d = arb(seed, degree, true);
        if d.verts() > 0 {
            let (a, b) = (d.canonicalize(), d.flip_vertex(0).canonicalize());
            prop_assert_eq!(a.diagram, b.diagram);
            prop_assert_eq!(a.sign, -b.sign);
        }
    }

    #[test]
    fn product_adds_degree_and_components(s1 in any::<u64>(), s2 in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let a = arb(s1, d1, true);
        let b = arb(s2, d2, true);
        let p = a.product(&b);
        prop_assert_eq!(p.degree(), a.degree() + b.degree());
        let r = p.decompose();
        prop_assert!(!r.overlapping);
        let mut expected = a.component_multiset();
        expected.extend(b.component_multiset());
        expected.sort();
        prop_assert_eq!(p.component_multiset(), expected);
    }

    #[test]
    fn products_of_non_overlapping_inputs(s1 in any::<u64>(), s2 in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let a = arb(s1, d1, false);
        let b = arb(s2, d2, false);
        prop_assume!(!a.decompose().overlapping && !b.decompose().overlapping);
        let p = a.product(&b);
        prop_assert!(!p.decompose().overlapping);
        prop_assert_eq!(p.decompose().components.len(), a.decompose().components.len() + b.decompose().components.len());
    }
}
