mod common;

use std::sync::OnceLock;

use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vassiliev::basis::CanonicalBasis;
use vassiliev::changes::{divides, is_valid_sum, validate_basis_change, BasisChangeError};
use vassiliev::linalg::Matrix;
use vassiliev::rational::q;
use vassiliev::relations::{dimension, reduce_to_chords_by, stu_terms, DegreeQuotient};
use vassiliev::weights::{weight_sun, WeightConfig};
use vassiliev::{Diagram, Q};

fn unreduced() -> &'static CanonicalBasis {
    static B: OnceLock<CanonicalBasis> = OnceLock::new();
    B.get_or_init(|| CanonicalBasis::build(5, false).unwrap())
}

fn reduced() -> &'static CanonicalBasis {
    static B: OnceLock<CanonicalBasis> = OnceLock::new();
    B.get_or_init(|| CanonicalBasis::build(5, true).unwrap())
}

#[test]
fn chord_diagram_counts() {
    for n in 0..=5 {
        assert_eq!(common::chord_classes(n).len(), common::chord_diagram_count(n));
        assert_eq!(DegreeQuotient::get(n, false).chords().len(), common::chord_diagram_count(n));
    }
}

#[test]
fn dims_match_direct_four_term_oracle() {
    for n in 0..=5 {
        for red in [false, true] {
            assert_eq!(dimension(n, red), common::chord_dimension(n, red), "degree {n} reduced {red}");
        }
    }
    assert_eq!(reduced().dims(), vec![1, 0, 1, 1, 3, 4]);
    assert_eq!(unreduced().dims(), vec![1, 1, 2, 3, 6, 10]);
}

#[test]
fn composites_are_lower_degree_multisets() {
    for b in [reduced(), unreduced()] {
        let c = b.connected_counts();
        for n in 0..=b.max_degree {
            assert_eq!(b.degree(n).composites(), common::multiset_count(&c, n));
            for e in &b.degree(n).elements {
                assert_eq!(e.diagram.degree(), n);
                if e.is_connected() {
                    assert!(e.diagram.is_connected());
                } else {
                    assert_eq!(e.diagram, b.product_of(e.factors()).canonicalize().diagram);
                }
            }
        }
    }
}

#[test]
fn elimination_order_does_not_matter() {
    let mut rng = common::rng(31);
    for i in 0..60 {
        let degree = 2 + i % 4;
        let d = Diagram::random(&mut rng, degree, i % 2 == 0);
        let first = reduce_to_chords_by(&d, &mut |legs: &[usize]| legs[0]);
        let last = reduce_to_chords_by(&d, &mut |legs: &[usize]| legs[legs.len() - 1]);
        let mut diff = first.clone();
        diff.add_sum(&last, &q(-1));
        assert!(DegreeQuotient::get(degree, false).is_zero(&diff), "{d}");
    }
}

#[test]
fn coordinates_reproduce_weights() {
    let b = unreduced();
    let cfg = WeightConfig::default();
    let mut rng = common::rng(32);
    for i in 0..60 {
        let degree = 1 + i % 5;
        let d = Diagram::random(&mut rng, degree, i % 3 == 0);
        let coords = b.coordinates(&d).unwrap();
        let mut total = vassiliev::poly::LaurentPoly::zero('N');
        for (x, e) in coords.values.iter().zip(&b.degree(degree).elements) {
            total = &total + &weight_sun(&e.diagram, &cfg).scale(x);
        }
        assert_eq!(total, weight_sun(&d, &cfg));
    }
}

#[test]
fn valid_sums_respect_component_kinds() {
    let mut rng = common::rng(33);
    let mut checked = 0;
    for i in 0..200 {
        let d = Diagram::random(&mut rng, 2 + i % 3, i % 2 == 0);
        for (leg, _, _) in d.line_vertices() {
            let (t, u) = stu_terms(&d, leg).unwrap();
            for (x, y) in [(&d, &t), (&d, &u), (&t, &u)] {
                let v = is_valid_sum(x, y);
                assert_eq!(v, is_valid_sum(y, x));
                let (rx, ry) = (x.decompose(), y.decompose());
                let product = |r: &vassiliev::diagram::DecompositionReport| r.components.len() > 1 && !r.overlapping;
                if v {
                    checked += 1;
                    assert!(!(rx.components.len() == 1 && product(&ry)));
                    assert!(!(ry.components.len() == 1 && product(&rx)));
                    if product(&rx) && product(&ry) {
                        assert_eq!(rx.components.len(), ry.components.len());
                    }
                }
            }
        }
    }
    assert!(checked > 50);
}

#[test]
fn valid_sums_of_products() {
    let x = Diagram::from_chords(&[(0, 2), (1, 3)]).unwrap();
    let par = Diagram::from_chords(&[(0, 1), (2, 3)]).unwrap();
    let t = Diagram::tripod();
    // the tripod pair times a common factor stays a valid sum
    assert!(is_valid_sum(&t.product(&t), &x.product(&t)));
    assert!(!is_valid_sum(&t.product(&t), &par.product(&t).product(&Diagram::chord())));
    assert!(divides(&t, &x.product(&t)));
    assert!(!divides(&x, &t.product(&t)));
}

fn random_block_change(rng: &mut ChaCha8Rng, b: &CanonicalBasis, degree: usize) -> Matrix {
    let db = b.degree(degree);
    let (dim, c) = (db.dim(), db.connected);
    loop {
        let mut m = Matrix::zeros(dim, dim);
        for r in 0..dim {
            for col in 0..dim {
                if (r < c) == (col < c) {
                    m.data[r][col] = q(rng.gen_range(-3..=3));
                }
            }
        }
        if !m.det().is_zero() {
            return m;
        }
    }
}

#[test]
fn determinant_factorizes_on_block_changes() {
    let mut rng = common::rng(34);
    let b = reduced();
    for i in 0..40 {
        let degree = 2 + i % 4;
        let m = random_block_change(&mut rng, b, degree);
        let r = validate_basis_change(&m, b, degree).unwrap();
        assert!(r.det_factorizes && r.inverse_blocks_ok);
        assert_eq!(r.det, &r.det_connected * &r.det_composite);
    }
    let mut bad = Matrix::identity(4);
    bad.data[0][3] = q(1);
    assert!(matches!(validate_basis_change(&bad, b, 5), Err(BasisChangeError::BlockViolation { .. })));
    assert!(matches!(validate_basis_change(&Matrix::identity(3), b, 5), Err(BasisChangeError::Shape { .. })));
}

#[test]
fn cache_round_trip() {
    let b = reduced();
    let text = b.to_cache_string();
    let back = CanonicalBasis::from_cache_string(&text, "mem").unwrap();
    assert_eq!(back.dims(), b.dims());
    assert_eq!(back.version, b.version);
    for n in 0..=b.max_degree {
        for (x, y) in back.degree(n).elements.iter().zip(&b.degree(n).elements) {
            assert_eq!(x, y);
        }
    }
    let tampered = text.replacen("V1", "V2", 1);
    if tampered != text {
        assert!(CanonicalBasis::from_cache_string(&tampered, "mem").is_err());
    }
    let stale = text.replacen(&b.version, "basis-0-0000000000000000", 1);
    assert!(CanonicalBasis::from_cache_string(&stale, "mem").is_err());
}

#[test]
fn disk_cache_is_transparent() {
    let dir = std::env::temp_dir().join(format!("vassiliev-basis-test-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let (a, hit_a) = CanonicalBasis::load_or_build(&dir, 4, true).unwrap();
    let (b, hit_b) = CanonicalBasis::load_or_build(&dir, 4, true).unwrap();
    assert!(!hit_a && hit_b);
    assert_eq!(a.to_cache_string(), b.to_cache_string());
    let _ = std::fs::remove_dir_all(&dir);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coordinates_are_relabeling_covariant(seed in any::<u64>(), degree in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Diagram::random(&mut rng, degree, true);
        let r = d.random_relabel(&mut rng);
        let b = unreduced();
        prop_assert_eq!(b.coordinates(&d).unwrap(), b.coordinates(&r).unwrap());
        if d.verts() > 0 {
            let neg: Vec<Q> = b.coordinates(&d).unwrap().values.iter().map(|x| -x).collect();
            prop_assert_eq!(b.coordinates(&d.flip_vertex(0)).unwrap().values, neg);
        }
    }
}
