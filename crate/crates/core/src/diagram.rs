//! Trivalent diagrams attached to an oriented Wilson circle.
//!
//! A diagram is stored as a fixed-point-free involution on half-edges. Legs
//! (univalent endpoints on the circle) come first, numbered in the order they
//! are met along the circle; then each internal vertex contributes three
//! half-edges listed in counterclockwise cyclic order. Reversing the cyclic
//! order at one vertex negates the diagram.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("half-edge table has length {got}, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("half-edge {0} is not paired consistently")]
    NotInvolution(usize),
    #[error("half-edge {0} is paired with itself")]
    SelfPaired(usize),
    #[error("a dashed component does not reach the Wilson line")]
    Vacuum,
    #[error("cannot parse diagram: {0}")]
    Parse(String),
}

/// A diagram on the Wilson circle. Equality is literal (labelled) equality;
/// use [`Diagram::canonicalize`] to compare up to isomorphism.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Diagram {
    legs: usize,
    verts: usize,
    partner: Vec<usize>,
}

/// A canonical diagram with the sign relating it to the input.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SignedDiagram {
    pub diagram: Diagram,
    /// `+1`, `-1`, or `0` when antisymmetry forces the diagram to vanish.
    pub sign: i8,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Component {
    /// Leg positions (0-based, circle order) owned by this component.
    pub legs: Vec<usize>,
    #[serde(serialize_with = "ser_display")]
    pub diagram: Diagram,
}

fn ser_display<S: serde::Serializer, T: fmt::Display>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct DecompositionReport {
    pub components: Vec<Component>,
    pub overlapping: bool,
}

impl Ord for Diagram {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.degree(), self.verts, &self.partner).cmp(&(other.degree(), other.verts, &other.partner))
    }
}

impl PartialOrd for Diagram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Endpoint of a half-edge as seen from outside.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum End {
    Leg(usize),
    Slot { vertex: usize, slot: usize },
}

impl Diagram {
    pub fn new(legs: usize, verts: usize, partner: Vec<usize>) -> Result<Self, DiagramError> {
        let expected = legs + 3 * verts;
        if partner.len() != expected {
            return Err(DiagramError::Length { got: partner.len(), expected });
        }
        for (h, &p) in partner.iter().enumerate() {
            if p == h {
                return Err(DiagramError::SelfPaired(h));
            }
            if p >= expected || partner[p] != h {
                return Err(DiagramError::NotInvolution(h));
            }
        }
        let d = Diagram { legs, verts, partner };
        if d.has_vacuum_component() {
            return Err(DiagramError::Vacuum);
        }
        Ok(d)
    }

    pub fn empty() -> Self {
        Diagram { legs: 0, verts: 0, partner: Vec::new() }
    }

    /// The single chord (degree 1).
    pub fn chord() -> Self {
        Diagram { legs: 2, verts: 0, partner: vec![1, 0] }
    }

    /// Three legs joined at one internal vertex; cyclic order follows the circle.
    pub fn tripod() -> Self {
        Diagram { legs: 3, verts: 1, partner: vec![3, 4, 5, 0, 1, 2] }
    }

    /// Chord diagram from a list of leg pairs on `2 * pairs.len()` points.
    pub fn from_chords(pairs: &[(usize, usize)]) -> Result<Self, DiagramError> {
        let l = 2 * pairs.len();
        let mut partner = vec![usize::MAX; l];
        for &(a, b) in pairs {
            if a >= l || b >= l || partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(DiagramError::Parse(format!("bad chord ({a},{b})")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        Diagram::new(l, 0, partner)
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn verts(&self) -> usize {
        self.verts
    }

    pub fn half_edges(&self) -> usize {
        self.partner.len()
    }

    pub fn degree(&self) -> usize {
        (self.legs + self.verts) / 2
    }

    pub fn partner(&self, h: usize) -> usize {
        self.partner[h]
    }

    pub fn leg_half(&self, leg: usize) -> usize {
        leg
    }

    pub fn slot_half(&self, vertex: usize, slot: usize) -> usize {
        self.legs + 3 * vertex + slot
    }

    pub fn end(&self, h: usize) -> End {
        if h < self.legs {
            End::Leg(h)
        } else {
            let k = h - self.legs;
            End::Slot { vertex: k / 3, slot: k % 3 }
        }
    }

    pub fn is_chord_diagram(&self) -> bool {
        self.verts == 0
    }

    /// Legs whose dashed edge ends at an internal vertex, with that vertex and slot.
    pub fn line_vertices(&self) -> Vec<(usize, usize, usize)> {
        (0..self.legs)
            .filter_map(|l| match self.end(self.partner[l]) {
                End::Slot { vertex, slot } => Some((l, vertex, slot)),
                End::Leg(_) => None,
            })
            .collect()
    }

    /// Edges joining two internal vertices, as `(half, partner_half)` with `half < partner_half`.
    pub fn internal_edges(&self) -> Vec<(usize, usize)> {
        (self.legs..self.half_edges())
            .filter(|&h| {
                let p = self.partner[h];
                p >= self.legs && h < p
            })
            .map(|h| (h, self.partner[h]))
            .collect()
    }

    /// Leg pairs joined directly by a chord.
    pub fn chords(&self) -> Vec<(usize, usize)> {
        (0..self.legs).filter(|&l| self.partner[l] < self.legs && l < self.partner[l]).map(|l| (l, self.partner[l])).collect()
    }

    pub fn has_isolated_chord(&self) -> bool {
        let l = self.legs;
        self.chords().into_iter().any(|(a, b)| b == (a + 1) % l || a == (b + 1) % l)
    }

    fn component_labels(&self) -> Vec<usize> {
        let n = self.half_edges();
        let mut uf = UnionFind::new(n);
        for h in 0..n {
            uf.union(h, self.partner[h]);
        }
        for v in 0..self.verts {
            let b = self.slot_half(v, 0);
            uf.union(b, b + 1);
            uf.union(b, b + 2);
        }
        (0..n).map(|h| uf.find(h)).collect()
    }

    fn has_vacuum_component(&self) -> bool {
        let labels = self.component_labels();
        let mut touched = vec![false; self.half_edges()];
        for l in 0..self.legs {
            touched[labels[l]] = true;
        }
        (self.legs..self.half_edges()).any(|h| !touched[labels[h]])
    }

    /// Connected components of the dashed graph, in order of their first leg.
    pub fn decompose(&self) -> DecompositionReport {
        let labels = self.component_labels();
        let mut order: Vec<usize> = Vec::new();
        let mut leg_sets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for l in 0..self.legs {
            let c = labels[l];
            if !leg_sets.contains_key(&c) {
                order.push(c);
            }
            leg_sets.entry(c).or_default().push(l);
        }
        let components: Vec<Component> = order
            .iter()
            .map(|c| {
                let legs = leg_sets[c].clone();
                let diagram = self.subdiagram(&labels, *c, &legs);
                Component { legs, diagram }
            })
            .collect();
        let cyclic: Vec<usize> = (0..self.legs).map(|l| order.iter().position(|c| *c == labels[l]).unwrap()).collect();
        let mut overlapping = false;
        'outer: for a in 0..components.len() {
            for b in a + 1..components.len() {
                let seq: Vec<usize> = cyclic.iter().copied().filter(|x| *x == a || *x == b).collect();
                let changes = (0..seq.len()).filter(|&i| seq[i] != seq[(i + 1) % seq.len()]).count();
                if changes > 2 {
                    overlapping = true;
                    break 'outer;
                }
            }
        }
        DecompositionReport { components, overlapping }
    }

    fn subdiagram(&self, labels: &[usize], comp: usize, legs: &[usize]) -> Diagram {
        let mut b = DiagramBuilder::new();
        let mut map = vec![usize::MAX; self.half_edges()];
        for &l in legs {
            map[l] = b.add_leg();
        }
        for v in 0..self.verts {
            let h0 = self.slot_half(v, 0);
            if labels[h0] == comp {
                let hs = b.add_vertex();
                for s in 0..3 {
                    map[h0 + s] = hs[s];
                }
            }
        }
        for h in 0..self.half_edges() {
            let p = self.partner[h];
            if labels[h] == comp && h < p {
                b.join(map[h], map[p]);
            }
        }
        b.build().expect("component of a valid diagram is valid")
    }

    pub fn is_connected(&self) -> bool {
        self.decompose().components.len() <= 1
    }

    /// Component diagrams, canonicalized.
    pub fn component_multiset(&self) -> Vec<Diagram> {
        let mut v: Vec<Diagram> = self.decompose().components.into_iter().map(|c| c.diagram.canonicalize().diagram).collect();
        v.sort();
        v
    }

    /// Juxtaposition: every leg of `other` follows every leg of `self`.
    pub fn product(&self, other: &Diagram) -> Diagram {
        let (l1, l2) = (self.legs, other.legs);
        let (v1, v2) = (self.verts, other.verts);
        let map1 = |h: usize| if h < l1 { h } else { l1 + l2 + (h - l1) };
        let map2 = |h: usize| if h < l2 { l1 + h } else { l1 + l2 + 3 * v1 + (h - l2) };
        let n = l1 + l2 + 3 * (v1 + v2);
        let mut partner = vec![0; n];
        for h in 0..self.half_edges() {
            partner[map1(h)] = map1(self.partner[h]);
        }
        for h in 0..other.half_edges() {
            partner[map2(h)] = map2(other.partner[h]);
        }
        Diagram { legs: l1 + l2, verts: v1 + v2, partner }
    }

    /// Reverses the cyclic order at `vertex`.
    pub fn flip_vertex(&self, vertex: usize) -> Diagram {
        let a = self.slot_half(vertex, 1);
        let b = self.slot_half(vertex, 2);
        let swap = |h: usize| if h == a { b } else if h == b { a } else { h };
        let partner = (0..self.half_edges()).map(|h| swap(self.partner[swap(h)])).collect();
        Diagram { legs: self.legs, verts: self.verts, partner }
    }

    /// Relabels by rotating legs, permuting vertices and rotating each vertex's
    /// slots; the result is isomorphic with identical orientations.
    pub fn relabel(&self, rotation: usize, vertex_perm: &[usize], slot_shift: &[usize]) -> Diagram {
        let l = self.legs;
        let map = |h: usize| -> usize {
            if h < l {
                (h + l - rotation % l.max(1)) % l.max(1)
            } else {
                let k = h - l;
                let (v, s) = (k / 3, k % 3);
                l + 3 * vertex_perm[v] + (s + slot_shift[v]) % 3
            }
        };
        let mut partner = vec![0; self.half_edges()];
        for h in 0..self.half_edges() {
            partner[map(h)] = map(self.partner[h]);
        }
        Diagram { legs: l, verts: self.verts, partner }
    }

    /// Half-edge relabeling for one circle rotation and one choice of vertex orientations.
    fn traversal_code(&self, rotation: usize, flips: u64, newh: &mut [usize], order: &mut Vec<(usize, usize)>) -> Vec<usize> {
        let l = self.legs;
        newh.iter_mut().for_each(|x| *x = usize::MAX);
        order.clear();
        let next = |v: usize, s: usize| if flips >> v & 1 == 1 { (s + 2) % 3 } else { (s + 1) % 3 };
        let discover = |h: usize, newh: &mut [usize], order: &mut Vec<(usize, usize)>| {
            if h < l {
                return;
            }
            let k = h - l;
            let (v, s) = (k / 3, k % 3);
            if newh[l + 3 * v] != usize::MAX || newh[l + 3 * v + 1] != usize::MAX || newh[l + 3 * v + 2] != usize::MAX {
                return;
            }
            let id = order.len();
            order.push((v, s));
            let s1 = next(v, s);
            let s2 = next(v, s1);
            newh[l + 3 * v + s] = l + 3 * id;
            newh[l + 3 * v + s1] = l + 3 * id + 1;
            newh[l + 3 * v + s2] = l + 3 * id + 2;
        };
        for i in 0..l {
            let old = (rotation + i) % l;
            newh[old] = i;
        }
        for i in 0..l {
            let old = (rotation + i) % l;
            discover(self.partner[old], newh, order);
        }
        let mut k = 0;
        while k < order.len() {
            let (v, s) = order[k];
            let s1 = next(v, s);
            let s2 = next(v, s1);
            for s in [s1, s2] {
                discover(self.partner[l + 3 * v + s], newh, order);
            }
            k += 1;
        }
        let mut code = vec![0; self.half_edges()];
        for h in 0..self.half_edges() {
            code[newh[h]] = newh[self.partner[h]];
        }
        code
    }

    /// Canonical representative modulo circle rotation, vertex relabeling and
    /// orientation reversal, with the sign picked up by the reversals.
    pub fn canonicalize(&self) -> SignedDiagram {
        if self.legs == 0 {
            return SignedDiagram { diagram: self.clone(), sign: 1 };
        }
        assert!(self.verts < 63, "diagram too large to canonicalize");
        let mut newh = vec![usize::MAX; self.half_edges()];
        let mut order = Vec::with_capacity(self.verts);
        let mut best: Option<Vec<usize>> = None;
        let mut parities = [false; 2];
        for rot in 0..self.legs {
            for flips in 0..(1u64 << self.verts) {
                let code = self.traversal_code(rot, flips, &mut newh, &mut order);
                let parity = (flips.count_ones() % 2) as usize;
                match best.as_ref().map(|b| code.cmp(b)) {
                    None | Some(Ordering::Less) => {
                        best = Some(code);
                        parities = [false; 2];
                        parities[parity] = true;
                    }
                    Some(Ordering::Equal) => parities[parity] = true,
                    Some(Ordering::Greater) => {}
                }
            }
        }
        let sign = match parities {
            [true, true] => 0,
            [true, false] => 1,
            _ => -1,
        };
        SignedDiagram { diagram: Diagram { legs: self.legs, verts: self.verts, partner: best.unwrap() }, sign }
    }

    /// Random diagram of the given degree, every component touching the circle.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, degree: usize, connected: bool) -> Diagram {
        assert!(degree >= 1);
        loop {
            let max_t = 2 * degree - 2;
            let t = rng.gen_range(0..=max_t);
            let l = 2 * degree - t;
            if connected && degree > 1 && t == 0 {
                continue;
            }
            let mut hs: Vec<usize> = (0..l + 3 * t).collect();
            hs.shuffle(rng);
            let mut partner = vec![0; hs.len()];
            for pair in hs.chunks(2) {
                partner[pair[0]] = pair[1];
                partner[pair[1]] = pair[0];
            }
            if let Ok(d) = Diagram::new(l, t, partner) {
                if !connected || d.is_connected() {
                    return d;
                }
            }
        }
    }

    /// Random isomorphic relabeling (same orientations).
    pub fn random_relabel<R: Rng + ?Sized>(&self, rng: &mut R) -> Diagram {
        let rot = if self.legs == 0 { 0 } else { rng.gen_range(0..self.legs) };
        let mut perm: Vec<usize> = (0..self.verts).collect();
        perm.shuffle(rng);
        let shifts: Vec<usize> = (0..self.verts).map(|_| rng.gen_range(0..3)).collect();
        self.relabel(rot, &perm, &shifts)
    }
}

/// Builds diagrams from abstract half-edge handles. Legs appear on the circle
/// in the order they are added.
#[derive(Default)]
pub struct DiagramBuilder {
    next: usize,
    legs: Vec<usize>,
    verts: Vec<[usize; 3]>,
    pairs: Vec<(usize, usize)>,
}

impl DiagramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_leg(&mut self) -> usize {
        let h = self.next;
        self.next += 1;
        self.legs.push(h);
        h
    }

    /// Adds a vertex; the returned handles are in counterclockwise order.
    pub fn add_vertex(&mut self) -> [usize; 3] {
        let hs = [self.next, self.next + 1, self.next + 2];
        self.next += 3;
        self.verts.push(hs);
        hs
    }

    pub fn join(&mut self, a: usize, b: usize) {
        self.pairs.push((a, b));
    }

    pub fn build(self) -> Result<Diagram, DiagramError> {
        let mut index = vec![usize::MAX; self.next];
        for (i, &h) in self.legs.iter().enumerate() {
            index[h] = i;
        }
        let l = self.legs.len();
        for (v, hs) in self.verts.iter().enumerate() {
            for s in 0..3 {
                index[hs[s]] = l + 3 * v + s;
            }
        }
        let mut partner = vec![usize::MAX; self.next];
        for (a, b) in self.pairs {
            let (ia, ib) = (index[a], index[b]);
            if partner[ia] != usize::MAX || partner[ib] != usize::MAX {
                return Err(DiagramError::NotInvolution(ia));
            }
            partner[ia] = ib;
            partner[ib] = ia;
        }
        if let Some(h) = partner.iter().position(|p| *p == usize::MAX) {
            return Err(DiagramError::NotInvolution(h));
        }
        Diagram::new(l, self.verts.len(), partner)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let n = self.parent[y];
            self.parent[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Text form: `L=<legs> T=<vertices> : e1 e2 ...` where each edge joins two
/// endpoints. Legs are `1..L` in circle order, vertex slots are `Vk.s` with
/// `s = 1, 2, 3` counterclockwise.
impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={} T={} :", self.legs, self.verts)?;
        let name = |h: usize| match self.end(h) {
            End::Leg(l) => format!("{}", l + 1),
            End::Slot { vertex, slot } => format!("V{}.{}", vertex + 1, slot + 1),
        };
        for h in 0..self.half_edges() {
            let p = self.partner[h];
            if h < p {
                write!(f, " {}-{}", name(h), name(p))?;
            }
        }
        Ok(())
    }
}

impl FromStr for Diagram {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: &str| DiagramError::Parse(format!("{m} in `{}`", s.trim()));
        let (head, body) = s.split_once(':').ok_or_else(|| err("missing ':'"))?;
        let mut legs = None;
        let mut verts = None;
        for tok in head.split_whitespace() {
            if let Some(x) = tok.strip_prefix("L=") {
                legs = Some(x.parse::<usize>().map_err(|_| err("bad leg count"))?);
            } else if let Some(x) = tok.strip_prefix("T=") {
                verts = Some(x.parse::<usize>().map_err(|_| err("bad vertex count"))?);
            } else {
                return Err(err("unexpected header token"));
            }
        }
        let (l, t) = (legs.ok_or_else(|| err("missing L="))?, verts.ok_or_else(|| err("missing T="))?);
        let endpoint = |tok: &str| -> Result<usize, DiagramError> {
            if let Some(rest) = tok.strip_prefix('V') {
                let (v, s) = rest.split_once('.').ok_or_else(|| err("bad vertex slot"))?;
                let v: usize = v.parse().map_err(|_| err("bad vertex index"))?;
                let s: usize = s.parse().map_err(|_| err("bad slot index"))?;
                if v == 0 || v > t || s == 0 || s > 3 {
                    return Err(err("vertex slot out of range"));
                }
                Ok(l + 3 * (v - 1) + (s - 1))
            } else {
                let k: usize = tok.parse().map_err(|_| err("bad leg index"))?;
                if k == 0 || k > l {
                    return Err(err("leg out of range"));
                }
                Ok(k - 1)
            }
        };
        let mut partner = vec![usize::MAX; l + 3 * t];
        for e in body.split_whitespace() {
            let (a, b) = e.split_once('-').ok_or_else(|| err("bad edge"))?;
            let (a, b) = (endpoint(a)?, endpoint(b)?);
            if partner[a] != usize::MAX || partner[b] != usize::MAX || a == b {
                return Err(err("endpoint used twice"));
            }
            partner[a] = b;
            partner[b] = a;
        }
        if partner.iter().any(|p| *p == usize::MAX) {
            return Err(err("unpaired endpoint"));
        }
        Diagram::new(l, t, partner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn x_chords() -> Diagram {
        Diagram::from_chords(&[(0, 2), (1, 3)]).unwrap()
    }

    fn nested_chords() -> Diagram {
        Diagram::from_chords(&[(0, 1), (2, 3)]).unwrap()
    }

    #[test]
    fn degrees() {
        assert_eq!(Diagram::chord().degree(), 1);
        assert_eq!(Diagram::tripod().degree(), 2);
        assert_eq!(Diagram::empty().degree(), 0);
        assert_eq!(Diagram::tripod().product(&Diagram::chord()).degree(), 3);
    }

    #[test]
    fn validation() {
        assert!(matches!(Diagram::new(2, 0, vec![1]), Err(DiagramError::Length { .. })));
        assert!(matches!(Diagram::new(2, 0, vec![0, 1]), Err(DiagramError::SelfPaired(0))));
        // a chord plus a vacuum theta graph
        let vac = Diagram::new(2, 2, vec![1, 0, 5, 6, 7, 2, 3, 4]);
        assert_eq!(vac, Err(DiagramError::Vacuum));
    }

    #[test]
    fn canonical_orientation_sign() {
        let t = Diagram::tripod();
        let c = t.canonicalize();
        assert_eq!(c.sign, 1);
        let flipped = t.flip_vertex(0).canonicalize();
        assert_eq!(flipped.diagram, c.diagram);
        assert_eq!(flipped.sign, -1);
    }

    #[test]
    fn tadpole_vanishes() {
        // leg 1 -> V1.1, tadpole V1.2-V1.3, plus a chord 2-3
        let d: Diagram = "L=3 T=1 : 1-V1.1 V1.2-V1.3 2-3".parse().unwrap();
        assert_eq!(d.canonicalize().sign, 0);
    }

    #[test]
    fn relabel_invariance() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for deg in 1..=5 {
            for _ in 0..20 {
                let d = Diagram::random(&mut rng, deg, false);
                let c = d.canonicalize();
                let r = d.random_relabel(&mut rng).canonicalize();
                assert_eq!(c.diagram, r.diagram);
                assert_eq!(c.sign, r.sign);
                let again = c.diagram.canonicalize();
                assert_eq!(again.diagram, c.diagram);
                if c.sign != 0 {
                    assert_eq!(again.sign, 1);
                }
            }
        }
    }

    #[test]
    fn decomposition_and_overlap() {
        let x = x_chords().decompose();
        assert_eq!(x.components.len(), 2);
        assert!(x.overlapping);
        let n = nested_chords().decompose();
        assert_eq!(n.components.len(), 2);
        assert!(!n.overlapping);
        let t = Diagram::tripod().decompose();
        assert_eq!(t.components.len(), 1);
        assert!(!t.overlapping);
        // connected two-loop: legs on a bubble plus a rung
        let d: Diagram = "L=2 T=2 : 1-V1.1 2-V2.1 V1.2-V2.3 V1.3-V2.2".parse().unwrap();
        let r = d.decompose();
        assert_eq!(r.components.len(), 1);
        assert!(!r.overlapping);
    }

    #[test]
    fn products() {
        let cc = Diagram::chord().product(&Diagram::chord());
        assert_eq!(cc.canonicalize().diagram, nested_chords().canonicalize().diagram);
        let t = Diagram::tripod();
        assert_eq!(t.product(&Diagram::empty()), t);
        assert_eq!(Diagram::empty().product(&t), t);
        let p = t.product(&t);
        assert!(!p.decompose().overlapping);
        assert_eq!(p.component_multiset(), vec![t.canonicalize().diagram; 2]);
    }

    #[test]
    fn isolated_chords() {
        assert!(Diagram::chord().has_isolated_chord());
        assert!(!x_chords().has_isolated_chord());
        assert!(nested_chords().has_isolated_chord());
        assert!(!Diagram::tripod().has_isolated_chord());
    }

    #[test]
    fn text_roundtrip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..30 {
            let d = Diagram::random(&mut rng, 4, false);
            let s = d.to_string();
            assert_eq!(s.parse::<Diagram>().unwrap(), d);
        }
        assert_eq!("L=0 T=0 :".parse::<Diagram>().unwrap(), Diagram::empty());
        assert!("L=2 T=0 : 1-3".parse::<Diagram>().is_err());
    }
}
