//! Diagram arithmetic (valid sums, divisibility) and changes of canonical basis.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::basis::CanonicalBasis;
use crate::diagram::{Diagram, DiagramBuilder};
use crate::linalg::Matrix;
use crate::rational::Q;
use crate::relations::{ihx_terms, stu_terms};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Connected,
    Overlapping,
    Product,
}

fn kind(d: &Diagram) -> Kind {
    let r = d.decompose();
    if r.components.len() <= 1 {
        Kind::Connected
    } else if r.overlapping {
        Kind::Overlapping
    } else {
        Kind::Product
    }
}

/// Merges legs `a` and the next leg into one leg at a new vertex, so that
/// the `T` term of STU at the merged leg gives back `d`.
fn merge_adjacent(d: &Diagram, a: usize) -> Option<(Diagram, usize)> {
    let n = d.legs();
    if n < 2 {
        return None;
    }
    let b = (a + 1) % n;
    if d.partner(d.leg_half(a)) == d.leg_half(b) {
        return None;
    }
    let mut bld = DiagramBuilder::new();
    let mut map = vec![usize::MAX; d.half_edges()];
    let mut merged = usize::MAX;
    let mut merged_pos = 0;
    let mut pos = 0;
    for l in 0..n {
        if l == b {
            continue;
        }
        let h = bld.add_leg();
        if l == a {
            merged = h;
            merged_pos = pos;
        } else {
            map[l] = h;
        }
        pos += 1;
    }
    for v in 0..d.verts() {
        let hs = bld.add_vertex();
        for s in 0..3 {
            map[d.slot_half(v, s)] = hs[s];
        }
    }
    let v = bld.add_vertex();
    for h in 0..d.half_edges() {
        let p = d.partner(h);
        if h < p && h != a && h != b && p != a && p != b {
            bld.join(map[h], map[p]);
        }
    }
    bld.join(merged, v[0]);
    bld.join(v[1], map[d.partner(a)]);
    bld.join(v[2], map[d.partner(b)]);
    Some((bld.build().ok()?, merged_pos))
}

/// Canonical diagrams appearing together with `d` in some STU or IHX relation.
fn relation_partners(d: &Diagram) -> BTreeSet<Diagram> {
    let mut out = BTreeSet::new();
    let mut push = |x: &Diagram| {
        let c = x.canonicalize();
        if c.sign != 0 {
            out.insert(c.diagram);
        }
    };
    for (leg, _, _) in d.line_vertices() {
        if let Ok((t, u)) = stu_terms(d, leg) {
            push(&t);
            push(&u);
        }
    }
    for a in 0..d.legs() {
        if let Some((s, leg)) = merge_adjacent(d, a) {
            push(&s);
            if let Ok((t, u)) = stu_terms(&s, leg) {
                push(&t);
                push(&u);
            }
        }
    }
    for (h, _) in d.internal_edges() {
        if let Ok((hh, x)) = ihx_terms(d, h) {
            push(&hh);
            push(&x);
        }
    }
    out
}

/// Whether `d1 ± d2` is again a single diagram: two different terms of one
/// STU or IHX relation, or products differing in exactly one such factor.
/// A connected diagram never combines with a non-overlapping product.
pub fn is_valid_sum(d1: &Diagram, d2: &Diagram) -> bool {
    if d1.degree() != d2.degree() {
        return false;
    }
    let (c1, c2) = (d1.canonicalize(), d2.canonicalize());
    if c1.sign == 0 || c2.sign == 0 || c1.diagram == c2.diagram {
        return false;
    }
    let (k1, k2) = (kind(d1), kind(d2));
    if (k1 == Kind::Connected && k2 == Kind::Product) || (k1 == Kind::Product && k2 == Kind::Connected) {
        return false;
    }
    if k1 == Kind::Product && k2 == Kind::Product {
        let (mut a, mut b) = (d1.component_multiset(), d2.component_multiset());
        if a.len() != b.len() {
            return false;
        }
        let common: Vec<Diagram> = a.iter().filter(|x| b.contains(x)).cloned().collect();
        for x in &common {
            if let (Some(i), Some(j)) = (a.iter().position(|y| y == x), b.iter().position(|y| y == x)) {
                a.remove(i);
                b.remove(j);
            }
        }
        return a.len() == 1 && b.len() == 1 && is_valid_sum(&a[0], &b[0]);
    }
    relation_partners(&c1.diagram).contains(&c2.diagram)
}

/// Whether the components of `d1` form a sub-multiset of those of `d2`.
pub fn divides(d1: &Diagram, d2: &Diagram) -> bool {
    let mut rest = d2.component_multiset();
    for c in d1.component_multiset() {
        match rest.iter().position(|x| *x == c) {
            Some(i) => {
                rest.remove(i);
            }
            None => return false,
        }
    }
    true
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasisChangeError {
    #[error("matrix is {rows}x{cols}, expected {dim}x{dim}")]
    Shape { rows: usize, cols: usize, dim: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("entry ({row}, {col}) mixes connected and composite elements")]
    BlockViolation { row: usize, col: usize },
}

/// Outcome of validating `r'_j = sum_k N_jk r_k` at one degree.
#[derive(Clone, Debug, Serialize)]
pub struct BasisChangeReport {
    pub degree: usize,
    pub connected: usize,
    #[serde(serialize_with = "crate::rational::serde_q::serialize")]
    pub det: Q,
    #[serde(serialize_with = "crate::rational::serde_q::serialize")]
    pub det_connected: Q,
    #[serde(serialize_with = "crate::rational::serde_q::serialize")]
    pub det_composite: Q,
    pub det_factorizes: bool,
    /// `N^-1`; new coefficients are `alpha' = alpha N^-1` (row vectors).
    #[serde(skip)]
    pub alpha_transform: Matrix,
    pub inverse_blocks_ok: bool,
}

pub fn validate_basis_change(m: &Matrix, basis: &CanonicalBasis, degree: usize) -> Result<BasisChangeReport, BasisChangeError> {
    let db = basis.degree(degree);
    let dim = db.dim();
    let c = db.connected;
    if m.rows != dim || m.cols != dim {
        return Err(BasisChangeError::Shape { rows: m.rows, cols: m.cols, dim });
    }
    let det = m.det();
    if det.is_zero() {
        return Err(BasisChangeError::Singular);
    }
    for row in 0..dim {
        for col in 0..dim {
            if (row < c) != (col < c) && !m.get(row, col).is_zero() {
                return Err(BasisChangeError::BlockViolation { row, col });
            }
        }
    }
    let a = m.block(0, c, 0, c);
    let d = m.block(c, dim, c, dim);
    let (det_a, det_d) = (a.det(), d.det());
    let inv = m.inverse().ok_or(BasisChangeError::Singular)?;
    let a_inv = a.inverse().ok_or(BasisChangeError::Singular)?;
    let d_inv = d.inverse().ok_or(BasisChangeError::Singular)?;
    let inverse_blocks_ok = inv.block(0, c, 0, c) == a_inv
        && inv.block(c, dim, c, dim) == d_inv
        && inv.block(0, c, c, dim).is_zero()
        && inv.block(c, dim, 0, c).is_zero();
    Ok(BasisChangeReport {
        degree,
        connected: c,
        det_factorizes: det == &det_a * &det_d,
        det,
        det_connected: det_a,
        det_composite: det_d,
        alpha_transform: inv,
        inverse_blocks_ok,
    })
}

/// `alpha' = alpha N^-1`.
pub fn transform_alphas(alpha: &[Q], report: &BasisChangeReport) -> Vec<Q> {
    report.alpha_transform.left_mul_vec(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn tripod_pair_and_remarks() {
        let x = Diagram::from_chords(&[(0, 2), (1, 3)]).unwrap();
        let par = Diagram::from_chords(&[(0, 1), (2, 3)]).unwrap();
        assert!(is_valid_sum(&x, &par));
        assert!(is_valid_sum(&par, &x));
        assert!(!is_valid_sum(&Diagram::tripod(), &par));
        assert!(!is_valid_sum(&Diagram::chord(), &x));
        assert!(!is_valid_sum(&x, &x));
    }

    #[test]
    fn divisibility() {
        let c = Diagram::tripod();
        assert!(divides(&c, &c.product(&c)));
        assert!(divides(&Diagram::empty(), &c));
        assert!(!divides(&c.product(&c), &c));
    }

    #[test]
    fn block_checks() {
        let b = CanonicalBasis::build(4, true).unwrap();
        let id = Matrix::identity(3);
        let r = validate_basis_change(&id, &b, 4).unwrap();
        assert!(r.det_factorizes && r.inverse_blocks_ok);
        let swap = Matrix::from_rows(vec![vec![q(0), q(1), q(0)], vec![q(1), q(0), q(0)], vec![q(0), q(0), q(2)]]);
        assert!(validate_basis_change(&swap, &b, 4).is_ok());
        let mut bad = Matrix::identity(3).data;
        bad[2][0] = q(1);
        assert_eq!(
            validate_basis_change(&Matrix::from_rows(bad), &b, 4).unwrap_err(),
            BasisChangeError::BlockViolation { row: 2, col: 0 }
        );
        assert_eq!(validate_basis_change(&Matrix::zeros(3, 3), &b, 4).unwrap_err(), BasisChangeError::Singular);
    }
}
