//! STU and IHX relations, elimination of internal vertices, and quotient spaces
//! of chord diagrams modulo four-term relations.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use thiserror::Error;

use crate::diagram::{Diagram, DiagramBuilder, End};
use crate::linalg::{SparseEchelon, SparseVec};
use crate::rational::q;
use crate::sum::DiagramSum;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("vertex {0} has no edge ending on the Wilson line")]
    NotAdjacentToLine(usize),
    #[error("leg {0} is not attached to an internal vertex")]
    LegNotOnVertex(usize),
    #[error("half-edge {0} does not lie on an edge between two distinct internal vertices")]
    NotInternalEdge(usize),
    #[error("index out of range")]
    OutOfRange,
}

/// Relations at one degree, each summing to zero in the quotient.
#[derive(Clone, Debug)]
pub struct RelationSet {
    pub degree: usize,
    pub relations: Vec<DiagramSum>,
}

fn next_slot(s: usize) -> usize {
    (s + 1) % 3
}

/// Copies every edge of `d` that avoids the half-edges in `skip`.
fn copy_edges(d: &Diagram, map: &[usize], skip: &dyn Fn(usize) -> bool, b: &mut DiagramBuilder) {
    for h in 0..d.half_edges() {
        let p = d.partner(h);
        if h < p && !skip(h) && !skip(p) {
            b.join(map[h], map[p]);
        }
    }
}

/// The two chord-side terms of STU at `leg`: `(T, U)` with `d = T - U`.
/// In `T` the new leg joined to the first slot after the leg (counterclockwise)
/// comes first along the circle.
pub fn stu_terms(d: &Diagram, leg: usize) -> Result<(Diagram, Diagram), RelationError> {
    if leg >= d.legs() {
        return Err(RelationError::OutOfRange);
    }
    let End::Slot { vertex, slot } = d.end(d.partner(leg)) else {
        return Err(RelationError::LegNotOnVertex(leg));
    };
    let s1 = next_slot(slot);
    let s2 = next_slot(s1);
    let ports = [d.slot_half(vertex, s1), d.slot_half(vertex, s2)];
    let build = |first: usize| -> Diagram {
        let mut b = DiagramBuilder::new();
        let mut map = vec![usize::MAX; d.half_edges()];
        let mut new_ports = [0usize; 2];
        for l in 0..d.legs() {
            if l == leg {
                let x = b.add_leg();
                let y = b.add_leg();
                new_ports[first] = x;
                new_ports[1 - first] = y;
            } else {
                map[l] = b.add_leg();
            }
        }
        for v in 0..d.verts() {
            if v != vertex {
                let hs = b.add_vertex();
                for s in 0..3 {
                    map[d.slot_half(v, s)] = hs[s];
                }
            }
        }
        let at_v = |h: usize| h == leg || (h >= d.slot_half(vertex, 0) && h < d.slot_half(vertex, 0) + 3);
        copy_edges(d, &map, &at_v, &mut b);
        for (i, &port) in ports.iter().enumerate() {
            let t = d.partner(port);
            if let Some(j) = ports.iter().position(|&p| p == t) {
                if i < j {
                    b.join(new_ports[i], new_ports[j]);
                }
            } else {
                b.join(new_ports[i], map[t]);
            }
        }
        b.build().expect("STU term is a valid diagram")
    };
    Ok((build(0), build(1)))
}

/// STU expansion at a leg: returns `T - U`, which equals `d` in the quotient.
pub fn stu_at_leg(d: &Diagram, leg: usize) -> Result<DiagramSum, RelationError> {
    let (t, u) = stu_terms(d, leg)?;
    let mut s = DiagramSum::single(&t);
    s.add(&u, &q(-1));
    Ok(s)
}

/// STU expansion at an internal vertex, using the first leg attached to it.
pub fn stu(d: &Diagram, vertex: usize) -> Result<DiagramSum, RelationError> {
    if vertex >= d.verts() {
        return Err(RelationError::OutOfRange);
    }
    let leg = d
        .line_vertices()
        .into_iter()
        .find(|(_, v, _)| *v == vertex)
        .map(|(l, _, _)| l)
        .ok_or(RelationError::NotAdjacentToLine(vertex))?;
    stu_at_leg(d, leg)
}

/// The two rewirings of an internal edge, `(H, X)`, oriented so that
/// `I + H + X = 0` (the Jacobi identity with counterclockwise vertices).
pub fn ihx_terms(d: &Diagram, half: usize) -> Result<(Diagram, Diagram), RelationError> {
    if half >= d.half_edges() {
        return Err(RelationError::OutOfRange);
    }
    let other = d.partner(half);
    let (End::Slot { vertex: u, slot: su }, End::Slot { vertex: w, slot: sw }) = (d.end(half), d.end(other)) else {
        return Err(RelationError::NotInternalEdge(half));
    };
    if u == w {
        return Err(RelationError::NotInternalEdge(half));
    }
    let u1 = next_slot(su);
    let w1 = next_slot(sw);
    // ports A, B at u and C, D at w, in cyclic order after the edge
    let ports = [d.slot_half(u, u1), d.slot_half(u, next_slot(u1)), d.slot_half(w, w1), d.slot_half(w, next_slot(w1))];
    // placement[port] = (new vertex 0 = u / 1 = w, slot)
    let build = |placement: [(usize, usize); 4]| -> Diagram {
        let mut b = DiagramBuilder::new();
        let mut map = vec![usize::MAX; d.half_edges()];
        for l in 0..d.legs() {
            map[l] = b.add_leg();
        }
        let mut nu = [0usize; 3];
        let mut nw = [0usize; 3];
        for v in 0..d.verts() {
            let hs = b.add_vertex();
            if v == u {
                nu = hs;
            } else if v == w {
                nw = hs;
            } else {
                for s in 0..3 {
                    map[d.slot_half(v, s)] = hs[s];
                }
            }
        }
        let touches = |h: usize| {
            let ub = d.slot_half(u, 0);
            let wb = d.slot_half(w, 0);
            (h >= ub && h < ub + 3) || (h >= wb && h < wb + 3)
        };
        copy_edges(d, &map, &touches, &mut b);
        let handle = |(v, s): (usize, usize)| if v == 0 { nu[s] } else { nw[s] };
        b.join(nu[0], nw[0]);
        for (i, &port) in ports.iter().enumerate() {
            let t = d.partner(port);
            if let Some(j) = ports.iter().position(|&p| p == t) {
                if i < j {
                    b.join(handle(placement[i]), handle(placement[j]));
                }
            } else {
                b.join(handle(placement[i]), map[t]);
            }
        }
        b.build().expect("IHX term is a valid diagram")
    };
    // H: u = (e, B, C), w = (e, A, D);  X: u = (e, C, A), w = (e, B, D)
    let h = build([(1, 1), (0, 1), (0, 2), (1, 2)]);
    let x = build([(0, 2), (1, 1), (0, 1), (1, 2)]);
    Ok((h, x))
}

/// IHX at the internal edge through `half`: returns `-H - X`, equal to `d` in the quotient.
pub fn ihx(d: &Diagram, half: usize) -> Result<DiagramSum, RelationError> {
    let (h, x) = ihx_terms(d, half)?;
    let mut s = DiagramSum::zero();
    s.add(&h, &q(-1));
    s.add(&x, &q(-1));
    Ok(s)
}

type ChordCache = RwLock<HashMap<Diagram, Arc<DiagramSum>>>;

fn chord_cache() -> &'static ChordCache {
    static CACHE: OnceLock<ChordCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Eliminates every internal vertex by repeated STU at the first leg attached
/// to a vertex. The result is a sum of chord diagrams.
pub fn reduce_to_chords(d: &Diagram) -> DiagramSum {
    let c = d.canonicalize();
    if c.sign == 0 {
        return DiagramSum::zero();
    }
    let base = reduce_canonical(&c.diagram);
    base.scaled(&q(c.sign as i64))
}

fn reduce_canonical(d: &Diagram) -> Arc<DiagramSum> {
    if let Some(hit) = chord_cache().read().unwrap().get(d) {
        return hit.clone();
    }
    let out = if d.is_chord_diagram() {
        DiagramSum::single(d)
    } else {
        let (leg, _, _) = d.line_vertices()[0];
        let (t, u) = stu_terms(d, leg).expect("leg is attached to a vertex");
        let mut s = reduce_to_chords(&t);
        s.add_sum(&reduce_to_chords(&u), &q(-1));
        s
    };
    let out = Arc::new(out);
    chord_cache().write().unwrap().insert(d.clone(), out.clone());
    out
}

/// Uncached elimination where `pick` chooses which vertex-attached leg to expand.
pub fn reduce_to_chords_by(d: &Diagram, pick: &mut dyn FnMut(&[usize]) -> usize) -> DiagramSum {
    if d.is_chord_diagram() {
        return DiagramSum::single(d);
    }
    let legs: Vec<usize> = d.line_vertices().into_iter().map(|(l, _, _)| l).collect();
    let leg = legs[pick(&legs) % legs.len()];
    let (t, u) = stu_terms(d, leg).expect("leg is attached to a vertex");
    let mut s = reduce_to_chords_by(&t, pick);
    s.add_sum(&reduce_to_chords_by(&u, pick), &q(-1));
    s
}

/// All perfect matchings of `0..2n`.
pub fn perfect_matchings(points: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = free.remove(0);
        for i in 0..free.len() {
            let b = free.remove(i);
            cur.push((a, b));
            rec(free, cur, out);
            cur.pop();
            free.insert(i, b);
        }
        free.insert(0, a);
    }
    let mut out = Vec::new();
    if points % 2 == 0 {
        rec(&mut (0..points).collect(), &mut Vec::new(), &mut out);
    }
    out
}

/// Canonical chord diagrams of the given degree, sorted.
pub fn chord_diagrams(degree: usize) -> Vec<Diagram> {
    let set: BTreeSet<Diagram> = perfect_matchings(2 * degree)
        .iter()
        .map(|m| Diagram::from_chords(m).expect("matching").canonicalize().diagram)
        .collect();
    set.into_iter().collect()
}

/// Canonical diagrams with one internal vertex joined to three legs and
/// `degree - 2` chords.
pub fn one_vertex_diagrams(degree: usize) -> Vec<Diagram> {
    if degree < 2 {
        return Vec::new();
    }
    let n = 2 * degree - 1;
    let mut set = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let rest: Vec<usize> = (0..n).filter(|x| ![i, j, k].contains(x)).collect();
                for m in perfect_matchings(rest.len()) {
                    let mut partner = vec![0; n + 3];
                    for (s, &l) in [i, j, k].iter().enumerate() {
                        partner[l] = n + s;
                        partner[n + s] = l;
                    }
                    for (a, b) in m {
                        partner[rest[a]] = rest[b];
                        partner[rest[b]] = rest[a];
                    }
                    let c = Diagram::new(n, 1, partner).expect("valid").canonicalize();
                    if c.sign != 0 {
                        set.insert(c.diagram);
                    }
                }
            }
        }
    }
    set.into_iter().collect()
}

/// Four-term relations at a degree as differences of STU expansions of
/// one-vertex diagrams at different legs; with `reduced`, also every chord
/// diagram with an isolated chord.
pub fn relation_set(degree: usize, reduced: bool) -> RelationSet {
    let mut relations = Vec::new();
    for d in one_vertex_diagrams(degree) {
        let exps: Vec<DiagramSum> = d.line_vertices().iter().map(|(l, _, _)| stu_at_leg(&d, *l).expect("attached")).collect();
        for w in exps.windows(2) {
            let mut r = w[0].clone();
            r.add_sum(&w[1], &q(-1));
            if !r.is_zero() {
                relations.push(r);
            }
        }
    }
    if reduced {
        for c in chord_diagrams(degree) {
            if c.has_isolated_chord() {
                relations.push(DiagramSum::single(&c));
            }
        }
    }
    RelationSet { degree, relations }
}

/// Chord diagrams of one degree modulo the relation span.
#[derive(Debug)]
pub struct DegreeQuotient {
    pub degree: usize,
    pub reduced: bool,
    chords: Vec<Diagram>,
    index: HashMap<Diagram, usize>,
    echelon: SparseEchelon,
    relation_count: usize,
}

impl DegreeQuotient {
    pub fn build(degree: usize, reduced: bool) -> DegreeQuotient {
        let chords = chord_diagrams(degree);
        let index: HashMap<Diagram, usize> = chords.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        let rels = relation_set(degree, reduced);
        let mut echelon = SparseEchelon::new();
        let mut qd = DegreeQuotient { degree, reduced, chords, index, echelon: SparseEchelon::new(), relation_count: rels.relations.len() };
        for r in &rels.relations {
            echelon.insert(qd.to_vec(r));
        }
        qd.echelon = echelon;
        qd
    }

    /// Shared, lazily built quotient.
    pub fn get(degree: usize, reduced: bool) -> Arc<DegreeQuotient> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<DegreeQuotient>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(h) = cache.lock().unwrap().get(&(degree, reduced)) {
            return h.clone();
        }
        let built = Arc::new(DegreeQuotient::build(degree, reduced));
        cache.lock().unwrap().entry((degree, reduced)).or_insert(built).clone()
    }

    pub fn chords(&self) -> &[Diagram] {
        &self.chords
    }

    pub fn relation_count(&self) -> usize {
        self.relation_count
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn dim(&self) -> usize {
        self.chords.len() - self.echelon.rank()
    }

    /// Chord-diagram indices not eliminated by the relations.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.chords.len()).filter(|c| !self.echelon.is_pivot(*c)).collect()
    }

    fn to_vec(&self, s: &DiagramSum) -> SparseVec {
        s.terms()
            .map(|(d, c)| {
                let i = *self.index.get(d).expect("term is a canonical chord diagram of this degree");
                (i, c.clone())
            })
            .collect()
    }

    /// Reduced form in the free columns; two diagrams are equal in the quotient
    /// iff their normal forms agree.
    pub fn normal_form_sum(&self, s: &DiagramSum) -> SparseVec {
        let mut chords = DiagramSum::zero();
        for (d, c) in s.terms() {
            chords.add_sum(&reduce_to_chords(d), c);
        }
        self.echelon.reduce(self.to_vec(&chords))
    }

    pub fn normal_form(&self, d: &Diagram) -> SparseVec {
        assert_eq!(d.degree(), self.degree);
        self.normal_form_sum(&DiagramSum::single(d))
    }

    pub fn is_zero(&self, s: &DiagramSum) -> bool {
        self.normal_form_sum(s).is_empty()
    }
}

/// Dimension of the space of degree-`degree` diagrams modulo STU/IHX/AS,
/// additionally modulo isolated chords when `reduced`.
pub fn dimension(degree: usize, reduced: bool) -> usize {
    DegreeQuotient::get(degree, reduced).dim()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_chords() -> Diagram {
        Diagram::from_chords(&[(0, 2), (1, 3)]).unwrap().canonicalize().diagram
    }

    fn nested() -> Diagram {
        Diagram::from_chords(&[(0, 1), (2, 3)]).unwrap().canonicalize().diagram
    }

    #[test]
    fn tripod_stu() {
        let s = stu(&Diagram::tripod(), 0).unwrap();
        assert_eq!(s.len(), 2);
        let cx = s.coeff(&x_chords());
        let cn = s.coeff(&nested());
        assert_eq!(cx, -cn);
        assert!(cx == q(1) || cx == q(-1));
        assert_eq!(reduce_to_chords(&Diagram::tripod()), s);
    }

    #[test]
    fn stu_shapes() {
        let d: Diagram = "L=4 T=2 : 1-V1.1 2-V1.2 V1.3-V2.1 3-V2.2 4-V2.3".parse().unwrap();
        let (t, u) = stu_terms(&d, 0).unwrap();
        assert_eq!((t.degree(), t.verts()), (3, 1));
        assert_eq!((u.degree(), u.verts()), (3, 1));
        assert_eq!(stu(&d, 5), Err(RelationError::OutOfRange));
        assert!(stu_terms(&Diagram::chord(), 0).is_err());
    }

    #[test]
    fn chord_counts() {
        let counts: Vec<usize> = (0..=5).map(|n| chord_diagrams(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 18, 105]);
    }

    #[test]
    fn small_dimensions() {
        let red: Vec<usize> = (0..=4).map(|n| dimension(n, true)).collect();
        assert_eq!(red, vec![1, 0, 1, 1, 3]);
        let unred: Vec<usize> = (0..=4).map(|n| dimension(n, false)).collect();
        assert_eq!(unred, vec![1, 1, 2, 3, 6]);
    }

    #[test]
    fn ihx_vanishes_in_quotient() {
        let d: Diagram = "L=4 T=2 : 1-V1.1 2-V1.2 V1.3-V2.1 3-V2.2 4-V2.3".parse().unwrap();
        let e = d.internal_edges()[0].0;
        let mut rel = DiagramSum::single(&d);
        let (h, x) = ihx_terms(&d, e).unwrap();
        rel.add(&h, &q(1));
        rel.add(&x, &q(1));
        let qd = DegreeQuotient::get(3, false);
        assert!(qd.is_zero(&rel));
        assert!(ihx(&d, 0).is_err());
    }
}
