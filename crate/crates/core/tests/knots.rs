use std::time::Instant;

use vassiliev::knots::{connected_sum, homfly, homfly_braid, jones, knot_by_name, sun_slice, table, BraidWord, HomflyBudget, KnotError, PlanarDiagram};
use vassiliev::poly::LaurentPoly;
use vassiliev::rational::q;

#[test]
fn slice_two_is_jones_for_every_table_knot() {
    for e in table() {
        let start = Instant::now();
        let h = homfly(&e.pd, HomflyBudget::default()).unwrap();
        let v = sun_slice(&h, 2).unwrap();
        assert_eq!(v, jones(&e.pd).unwrap().power_map(2).with_var('q'), "{}", e.name);
        assert!(start.elapsed().as_secs() < 10, "{} took {:?}", e.name, start.elapsed());
    }
}

#[test]
fn homfly_is_multiplicative_under_connected_sum() {
    let pairs = [("3_1", "3_1"), ("3_1", "4_1"), ("4_1", "5_2"), ("3_1", "3_1*"), ("5_1", "4_1")];
    for (a, b) in pairs {
        let (ka, kb) = (knot_by_name(a).unwrap(), knot_by_name(b).unwrap());
        let sum = connected_sum(&ka.pd, &kb.pd).unwrap();
        let budget = HomflyBudget::default();
        let ha = homfly(&ka.pd, budget).unwrap();
        let hb = homfly(&kb.pd, budget).unwrap();
        assert_eq!(homfly(&sum, budget).unwrap(), &ha * &hb, "{a} # {b}");
        assert_eq!(jones(&sum).unwrap(), &jones(&ka.pd).unwrap() * &jones(&kb.pd).unwrap());
    }
    let u = PlanarDiagram::unknot();
    let k = knot_by_name("5_2").unwrap();
    let s = connected_sum(&k.pd, &u).unwrap();
    assert_eq!(homfly(&s, HomflyBudget::default()).unwrap(), k.homfly_ref);
}

#[test]
fn mirrors_invert_the_variables() {
    for e in table() {
        let m = e.pd.mirror();
        assert_eq!(jones(&m).unwrap(), jones(&e.pd).unwrap().power_map(-1), "{}", e.name);
        let (h, hm) = (homfly(&e.pd, HomflyBudget::default()).unwrap(), homfly(&m, HomflyBudget::default()).unwrap());
        for ((ea, ez), c) in h.terms() {
            assert_eq!(hm.terms().find(|(x, _)| *x == (-ea, ez)).map(|(_, y)| y.clone()), Some(c.clone()));
        }
    }
}

#[test]
fn amphichiral_and_chiral_examples() {
    let f = knot_by_name("4_1").unwrap();
    assert_eq!(jones(&f.pd.mirror()).unwrap(), jones(&f.pd).unwrap());
    let t = knot_by_name("3_1").unwrap();
    assert_ne!(jones(&t.pd.mirror()).unwrap(), jones(&t.pd).unwrap());
    assert_eq!(jones(&PlanarDiagram::unknot()).unwrap(), LaurentPoly::one('t'));
}

#[test]
fn braid_closures_agree() {
    let b = BraidWord::parse("[1,1,1]").unwrap();
    let budget = HomflyBudget::default();
    assert_eq!(homfly_braid(&b, budget).unwrap(), knot_by_name("3_1").unwrap().homfly_ref);
    assert!(BraidWord::new(2, vec![2]).is_err());
    assert!(BraidWord::new(3, vec![0]).is_err());
}

#[test]
fn budget_and_input_errors() {
    let k = knot_by_name("8_19").unwrap();
    let small = HomflyBudget { max_crossings: 5 };
    assert!(matches!(homfly(&k.pd, small), Err(KnotError::BudgetExceeded { crossings: 8, limit: 5 })));
    let big = connected_sum(&k.pd, &knot_by_name("3_1").unwrap().pd).unwrap();
    assert!(matches!(homfly(&big, HomflyBudget::default()), Err(KnotError::BudgetExceeded { .. })));
    assert!(PlanarDiagram::parse("[[1,2,3]]").is_err());
    assert!(PlanarDiagram::parse("[[1,1,2,3]]").is_err());
    assert!(knot_by_name("11a_1").is_err());
    let h = homfly(&knot_by_name("3_1").unwrap().pd, HomflyBudget::default()).unwrap();
    assert!(matches!(sun_slice(&h, 1), Err(KnotError::RankTooSmall(1))));
    assert_eq!(sun_slice(&homfly(&PlanarDiagram::unknot(), HomflyBudget::default()).unwrap(), 3).unwrap(), LaurentPoly::constant('q', q(1)));
}
