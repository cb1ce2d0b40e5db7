//! Small worked cases for each operation.

use vassiliev::basis::{canonical_basis, ElementRef};
use vassiliev::changes::{divides, is_valid_sum};
use vassiliev::knots::{connected_sum, jones, kauffman_bracket, knot_by_name, PlanarDiagram};
use vassiliev::poly::LaurentPoly;
use vassiliev::rational::q;
use vassiliev::relations::{reduce_to_chords, stu, DegreeQuotient};
use vassiliev::{Diagram, DiagramSum};

#[test]
fn degrees() {
    assert_eq!(Diagram::chord().degree(), 1);
    assert_eq!(Diagram::tripod().degree(), 2);
    assert_eq!(Diagram::empty().degree(), 0);
    assert_eq!(Diagram::tripod().product(&Diagram::chord()).degree(), 3);
}

#[test]
fn isolated_chords() {
    assert!(Diagram::chord().has_isolated_chord());
    assert!(!Diagram::from_chords(&[(0, 2), (1, 3)]).unwrap().has_isolated_chord());
    assert!(!Diagram::tripod().has_isolated_chord());
}

#[test]
fn products() {
    let p = Diagram::chord().product(&Diagram::chord());
    assert_eq!(p.canonicalize().diagram, Diagram::from_chords(&[(0, 1), (2, 3)]).unwrap().canonicalize().diagram);
    let t = Diagram::tripod();
    assert_eq!(t.product(&Diagram::empty()).canonicalize(), t.canonicalize());
}

#[test]
fn tripod_resolves_into_chords() {
    let x = Diagram::from_chords(&[(0, 2), (1, 3)]).unwrap();
    let par = Diagram::from_chords(&[(0, 1), (2, 3)]).unwrap();
    let mut expected = DiagramSum::zero();
    expected.add(&x, &q(1));
    expected.add(&par, &q(-1));
    let got = reduce_to_chords(&Diagram::tripod());
    assert_eq!(got, expected);
    assert_eq!(stu(&Diagram::tripod(), 0).unwrap(), expected);
    assert_eq!(reduce_to_chords(&x), DiagramSum::single(&x));
    assert!(!DegreeQuotient::get(2, true).is_zero(&got));
}

#[test]
fn basis_shapes() {
    let b = canonical_basis(6, true).unwrap();
    assert_eq!((b.degree(2).connected, b.degree(2).composites()), (1, 0));
    assert_eq!((b.degree(4).connected, b.degree(4).composites()), (2, 1));
    assert_eq!((b.degree(6).connected, b.degree(6).composites()), (5, 4));
    let square = &b.degree(4).elements[2];
    assert_eq!(square.factors(), &[ElementRef { degree: 2, index: 0 }; 2]);
    for n in 0..=6 {
        for (i, e) in b.degree(n).elements.iter().enumerate() {
            let c = b.coordinates(&e.diagram).unwrap();
            assert!(c.values.iter().enumerate().all(|(j, x)| *x == q((i == j) as i64)));
        }
    }
    assert!(b.coordinates(&Diagram::chord()).is_err());
    let t = b.coordinates(&Diagram::tripod()).unwrap();
    let x = Diagram::from_chords(&[(0, 2), (1, 3)]).unwrap();
    assert_eq!(b.coordinates(&x).unwrap(), t);
}

#[test]
fn divisibility_and_sums() {
    let b = canonical_basis(4, true).unwrap();
    let r2 = b.degree(2).elements[0].diagram.clone();
    let r3 = b.degree(3).elements[0].diagram.clone();
    assert!(divides(&r2, &r2.product(&r2)));
    assert!(divides(&Diagram::empty(), &r3));
    assert!(!divides(&r3, &r2.product(&r2)));
    assert!(!is_valid_sum(&r2, &r3));
    assert!(!is_valid_sum(&b.degree(4).elements[0].diagram, &r2.product(&r2)));
}

#[test]
fn knots() {
    assert_eq!(kauffman_bracket(&PlanarDiagram::unknot()).unwrap(), LaurentPoly::one('A'));
    assert_eq!(jones(&PlanarDiagram::unknot()).unwrap(), LaurentPoly::one('t'));
    let k = knot_by_name("4_1").unwrap();
    let s = connected_sum(&k.pd, &PlanarDiagram::unknot()).unwrap();
    assert_eq!(jones(&s).unwrap(), k.jones_ref);
}
