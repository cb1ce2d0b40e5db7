//! Canonical bases: connected representatives followed by products of
//! lower-degree connected elements, with coordinates and a plain-text cache.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_traits::Zero;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagram::{Diagram, DiagramBuilder};
use crate::linalg::{Matrix, SparseEchelon, SparseVec};
use crate::rational::Q;
use crate::relations::DegreeQuotient;
use crate::sum::DiagramSum;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("degree {degree}: composite {factors} is linearly dependent on earlier elements")]
    DependentComposite { degree: usize, factors: String },
    #[error("degree {degree}: found only {found} of {needed} connected elements")]
    MissingConnected { degree: usize, found: usize, needed: usize },
    #[error("diagram of degree {degree} exceeds basis degree {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("diagram has an isolated chord but the basis is reduced")]
    IsolatedChord,
    #[error("cache {path}: {reason}")]
    Cache { path: String, reason: String },
}

/// Position of an element inside a [`CanonicalBasis`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct ElementRef {
    pub degree: usize,
    pub index: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ElementKind {
    Connected,
    /// Non-decreasing list of connected factors.
    Composite(Vec<ElementRef>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BasisElement {
    pub diagram: Diagram,
    pub kind: ElementKind,
}

impl BasisElement {
    pub fn is_connected(&self) -> bool {
        self.kind == ElementKind::Connected
    }

    pub fn factors(&self) -> &[ElementRef] {
        match &self.kind {
            ElementKind::Connected => &[],
            ElementKind::Composite(f) => f,
        }
    }
}

/// Basis elements of one degree: connected first, then composites.
#[derive(Clone, Debug)]
pub struct DegreeBasis {
    pub degree: usize,
    pub elements: Vec<BasisElement>,
    pub connected: usize,
    free: Vec<usize>,
    forms: Matrix,
    inverse: Matrix,
}

impl DegreeBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn composites(&self) -> usize {
        self.elements.len() - self.connected
    }

    /// Row `j` is the normal form of element `j` in the quotient's free columns.
    pub fn forms(&self) -> &Matrix {
        &self.forms
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalBasis {
    pub reduced: bool,
    pub max_degree: usize,
    pub version: String,
    pub degrees: Vec<DegreeBasis>,
}

/// Coordinates of a diagram in a degree basis.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Coordinates {
    pub degree: usize,
    #[serde(serialize_with = "crate::rational::serde_q::vec")]
    pub values: Vec<Q>,
}

/// Shorthand for [`CanonicalBasis::build`].
pub fn canonical_basis(max_degree: usize, reduced: bool) -> Result<CanonicalBasis, BasisError> {
    CanonicalBasis::build(max_degree, reduced)
}

/// Fingerprint of the code that determines basis selection.
pub fn code_version() -> String {
    let mut h = Sha256::new();
    for src in [include_str!("diagram.rs"), include_str!("relations.rs"), include_str!("basis.rs")] {
        h.update(src.as_bytes());
    }
    format!("basis-1-{}", &hex::encode(h.finalize())[..16])
}

fn dense(free: &[usize], v: &SparseVec) -> Vec<Q> {
    free.iter().map(|c| v.get(c).cloned().unwrap_or_else(Q::zero)).collect()
}

/// Multisets (non-decreasing lists) of connected elements of total degree `target`.
fn multisets(connected: &[ElementRef], target: usize) -> Vec<Vec<ElementRef>> {
    fn rec(c: &[ElementRef], start: usize, left: usize, cur: &mut Vec<ElementRef>, out: &mut Vec<Vec<ElementRef>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..c.len() {
            if c[i].degree <= left {
                cur.push(c[i]);
                rec(c, i, left - c[i].degree, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(connected, 0, target, &mut Vec::new(), &mut out);
    out
}

/// Connected trees of degree `n` (one more leg than internal vertices plus one),
/// canonical, including ones that vanish by antisymmetry.
pub fn tree_diagrams(n: usize) -> Vec<Diagram> {
    let mut level: BTreeSet<Diagram> = BTreeSet::new();
    if n == 0 {
        return Vec::new();
    }
    level.insert(Diagram::chord());
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for d in &level {
            for (h, p) in all_edges(d) {
                for gap in 0..=d.legs() {
                    next.insert(subdivide_with_leg(d, h, p, gap).canonicalize().diagram);
                }
            }
        }
        level = next;
    }
    level.into_iter().collect()
}

/// Connected diagrams of degree `n` with one more internal loop than the
/// inputs, obtained by joining two edges of every degree `n - 1` input.
pub fn add_loop(inputs: &[Diagram]) -> Vec<Diagram> {
    let mut out = BTreeSet::new();
    for d in inputs {
        let edges = all_edges(d);
        for (i, e1) in edges.iter().enumerate() {
            for e2 in &edges[i..] {
                for flip in [false, true] {
                    out.insert(join_edges(d, *e1, *e2, flip).canonicalize().diagram);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Connected diagrams of degree `n` with the given number of loops in the
/// dashed graph.
pub fn connected_with_loops(n: usize, loops: usize) -> Vec<Diagram> {
    if loops >= n {
        return Vec::new();
    }
    let mut pool = tree_diagrams(n - loops);
    for _ in 0..loops {
        pool = add_loop(&pool);
    }
    pool
}

fn all_edges(d: &Diagram) -> Vec<(usize, usize)> {
    (0..d.half_edges()).filter(|&h| h < d.partner(h)).map(|h| (h, d.partner(h))).collect()
}

fn rebuild_except(d: &Diagram, b: &mut DiagramBuilder, leg_at_gap: Option<usize>) -> (Vec<usize>, Option<usize>) {
    let mut map = vec![usize::MAX; d.half_edges()];
    let mut new_leg = None;
    for l in 0..=d.legs() {
        if Some(l) == leg_at_gap {
            new_leg = Some(b.add_leg());
        }
        if l < d.legs() {
            map[l] = b.add_leg();
        }
    }
    for v in 0..d.verts() {
        let hs = b.add_vertex();
        for s in 0..3 {
            map[d.slot_half(v, s)] = hs[s];
        }
    }
    (map, new_leg)
}

fn subdivide_with_leg(d: &Diagram, h: usize, p: usize, gap: usize) -> Diagram {
    let mut b = DiagramBuilder::new();
    let (map, leg) = rebuild_except(d, &mut b, Some(gap));
    let v = b.add_vertex();
    for (x, y) in all_edges(d) {
        if (x, y) != (h, p) {
            b.join(map[x], map[y]);
        }
    }
    b.join(map[h], v[0]);
    b.join(map[p], v[1]);
    b.join(leg.unwrap(), v[2]);
    b.build().expect("subdivision is valid")
}

fn join_edges(d: &Diagram, e1: (usize, usize), e2: (usize, usize), flip: bool) -> Diagram {
    let mut b = DiagramBuilder::new();
    let (map, _) = rebuild_except(d, &mut b, None);
    let v1 = b.add_vertex();
    let v2 = b.add_vertex();
    for (x, y) in all_edges(d) {
        if (x, y) != e1 && (x, y) != e2 {
            b.join(map[x], map[y]);
        }
    }
    b.join(v1[2], v2[if flip { 1 } else { 2 }]);
    let v2_free = if flip { [0, 2] } else { [0, 1] };
    if e1 == e2 {
        // both new vertices on one edge, joined twice
        b.join(map[e1.0], v1[0]);
        b.join(v1[1], v2[v2_free[0]]);
        b.join(v2[v2_free[1]], map[e1.1]);
    } else {
        b.join(map[e1.0], v1[0]);
        b.join(v1[1], map[e1.1]);
        b.join(map[e2.0], v2[v2_free[0]]);
        b.join(v2[v2_free[1]], map[e2.1]);
    }
    b.build().expect("edge join is valid")
}

fn factor_label(f: &[ElementRef]) -> String {
    f.iter().map(|r| format!("{}:{}", r.degree, r.index + 1)).collect::<Vec<_>>().join(",")
}

impl CanonicalBasis {
    /// Builds the basis through `max_degree`. With `reduced = false` the
    /// single chord is the degree-one connected element (framing-extended basis).
    pub fn build(max_degree: usize, reduced: bool) -> Result<CanonicalBasis, BasisError> {
        let mut basis = CanonicalBasis { reduced, max_degree, version: code_version(), degrees: Vec::new() };
        for n in 0..=max_degree {
            let db = basis.build_degree(n, None)?;
            basis.degrees.push(db);
        }
        Ok(basis)
    }

    fn connected_refs(&self, below: usize) -> Vec<ElementRef> {
        self.degrees
            .iter()
            .take(below)
            .flat_map(|db| (0..db.connected).map(move |index| ElementRef { degree: db.degree, index }))
            .collect()
    }

    pub fn element(&self, r: ElementRef) -> &BasisElement {
        &self.degrees[r.degree].elements[r.index]
    }

    pub fn degree(&self, n: usize) -> &DegreeBasis {
        &self.degrees[n]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.dim()).collect()
    }

    pub fn connected_counts(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.connected).collect()
    }

    pub fn product_of(&self, factors: &[ElementRef]) -> Diagram {
        factors.iter().fold(Diagram::empty(), |acc, r| acc.product(&self.element(*r).diagram))
    }

    /// Selects (or, with `given`, re-validates) the elements of degree `n`.
    fn build_degree(&self, n: usize, given: Option<Vec<Diagram>>) -> Result<DegreeBasis, BasisError> {
        let quotient = DegreeQuotient::get(n, self.reduced);
        let dim = quotient.dim();
        let free = quotient.free_columns();
        let mut echelon = SparseEchelon::new();
        let mut composites = Vec::new();
        for f in multisets(&self.connected_refs(n), n) {
            let diagram = self.product_of(&f);
            let nf = quotient.normal_form(&diagram);
            if !echelon.insert(nf) {
                return Err(BasisError::DependentComposite { degree: n, factors: factor_label(&f) });
            }
            composites.push(BasisElement { diagram, kind: ElementKind::Composite(f) });
        }
        let needed = dim.saturating_sub(composites.len());
        let mut connected = Vec::new();
        match given {
            Some(list) => {
                for d in list {
                    if !d.is_connected() || d.degree() != n || !echelon.insert(quotient.normal_form(&d)) {
                        return Err(BasisError::MissingConnected { degree: n, found: connected.len(), needed });
                    }
                    connected.push(BasisElement { diagram: d, kind: ElementKind::Connected });
                }
            }
            None => {
                let mut loops = 0;
                while connected.len() < needed && loops < n {
                    for d in connected_with_loops(n, loops) {
                        if connected.len() == needed {
                            break;
                        }
                        let c = d.canonicalize();
                        if c.sign == 0 || (self.reduced && c.diagram.has_isolated_chord()) {
                            continue;
                        }
                        if echelon.insert(quotient.normal_form(&c.diagram)) {
                            connected.push(BasisElement { diagram: c.diagram, kind: ElementKind::Connected });
                        }
                    }
                    loops += 1;
                }
            }
        }
        if connected.len() != needed || echelon.rank() != dim {
            return Err(BasisError::MissingConnected { degree: n, found: connected.len(), needed });
        }
        let connected_count = connected.len();
        let mut elements = connected;
        elements.extend(composites);
        let forms = Matrix::from_rows(elements.iter().map(|e| dense(&free, &quotient.normal_form(&e.diagram))).collect());
        let forms = if dim == 0 { Matrix::zeros(0, 0) } else { forms };
        let inverse = forms.inverse().expect("basis elements are independent");
        Ok(DegreeBasis { degree: n, elements, connected: connected_count, free, forms, inverse })
    }

    /// Coordinates of `d` in the basis of its degree. The result is checked:
    /// `d` minus the combination lies in the relation span.
    pub fn coordinates(&self, d: &Diagram) -> Result<Coordinates, BasisError> {
        self.coordinates_of_sum(d.degree(), &DiagramSum::single(d), self.reduced && d.has_isolated_chord())
    }

    pub fn coordinates_of_sum(&self, degree: usize, s: &DiagramSum, isolated: bool) -> Result<Coordinates, BasisError> {
        if degree > self.max_degree {
            return Err(BasisError::DegreeTooHigh { degree, max: self.max_degree });
        }
        if isolated {
            return Err(BasisError::IsolatedChord);
        }
        let db = &self.degrees[degree];
        let quotient = DegreeQuotient::get(degree, self.reduced);
        let v = dense(&db.free, &quotient.normal_form_sum(s));
        let values = if db.dim() == 0 { Vec::new() } else { db.inverse.left_mul_vec(&v) };
        if db.dim() > 0 {
            assert_eq!(db.forms.left_mul_vec(&values), v, "coordinate residual outside the relation span");
        }
        Ok(Coordinates { degree, values })
    }

    /// Plain-text serialization with a trailing content hash.
    pub fn to_cache_string(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# canonical basis cache; one record per degree").unwrap();
        writeln!(s, "version {}", self.version).unwrap();
        writeln!(s, "reduced {}", self.reduced).unwrap();
        writeln!(s, "max_degree {}", self.max_degree).unwrap();
        for db in &self.degrees {
            writeln!(s, "degree {} d {} dhat {}", db.degree, db.dim(), db.connected).unwrap();
            for (i, e) in db.elements.iter().enumerate() {
                match &e.kind {
                    ElementKind::Connected => writeln!(s, "element {} connected {}", i + 1, e.diagram).unwrap(),
                    ElementKind::Composite(f) => {
                        let label = if f.is_empty() { "-".to_string() } else { factor_label(f) };
                        writeln!(s, "element {} composite {} {}", i + 1, label, e.diagram).unwrap()
                    }
                }
            }
        }
        let hash = hex::encode(Sha256::digest(s.as_bytes()));
        writeln!(s, "hash {hash}").unwrap();
        s
    }

    /// Parses and re-validates a cache. Any mismatch (hash, version, counts,
    /// element independence) is an error.
    pub fn from_cache_string(text: &str, path: &str) -> Result<CanonicalBasis, BasisError> {
        let bad = |reason: String| BasisError::Cache { path: path.to_string(), reason };
        let body_end = text.rfind("hash ").ok_or_else(|| bad("missing hash line".into()))?;
        let (body, tail) = text.split_at(body_end);
        let stored = tail.trim().strip_prefix("hash ").unwrap_or("").trim();
        if hex::encode(Sha256::digest(body.as_bytes())) != stored {
            return Err(bad("content hash mismatch".into()));
        }
        let mut lines = body.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let mut field = |key: &str| -> Result<String, BasisError> {
            let l = lines.next().ok_or_else(|| bad(format!("missing {key}")))?;
            l.strip_prefix(key).map(|x| x.trim().to_string()).ok_or_else(|| bad(format!("expected {key}")))
        };
        let version = field("version ")?;
        if version != code_version() {
            return Err(bad(format!("stale cache: version {version}, expected {}", code_version())));
        }
        let reduced = field("reduced ")?.parse::<bool>().map_err(|e| bad(e.to_string()))?;
        let max_degree = field("max_degree ")?.parse::<usize>().map_err(|e| bad(e.to_string()))?;
        let rest: Vec<&str> = lines.collect();
        let mut basis = CanonicalBasis { reduced, max_degree, version, degrees: Vec::new() };
        let mut i = 0;
        for n in 0..=max_degree {
            let head = rest.get(i).ok_or_else(|| bad(format!("missing degree {n}")))?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 6 || parts[0] != "degree" || parts[1] != n.to_string() || parts[2] != "d" || parts[4] != "dhat" {
                return Err(bad(format!("malformed degree header `{head}`")));
            }
            let dim: usize = parts[3].parse().map_err(|_| bad("bad d".into()))?;
            let dhat: usize = parts[5].parse().map_err(|_| bad("bad dhat".into()))?;
            i += 1;
            let mut connected = Vec::new();
            let mut composite_diagrams = Vec::new();
            for k in 0..dim {
                let line = rest.get(i).ok_or_else(|| bad("missing element".into()))?;
                i += 1;
                let mut it = line.splitn(4, ' ');
                let (tag, idx, kind, tail) = (it.next(), it.next(), it.next(), it.next().unwrap_or(""));
                if tag != Some("element") || idx != Some(&(k + 1).to_string()) {
                    return Err(bad(format!("malformed element line `{line}`")));
                }
                match kind {
                    Some("connected") => connected.push(tail.parse::<Diagram>().map_err(|e| bad(e.to_string()))?),
                    Some("composite") => {
                        let (_, d) = tail.split_once(' ').ok_or_else(|| bad("malformed composite".into()))?;
                        composite_diagrams.push(d.parse::<Diagram>().map_err(|e| bad(e.to_string()))?);
                    }
                    _ => return Err(bad(format!("malformed element line `{line}`"))),
                }
            }
            let db = basis.build_degree(n, Some(connected)).map_err(|e| bad(e.to_string()))?;
            let rebuilt: Vec<&Diagram> = db.elements[db.connected..].iter().map(|e| &e.diagram).collect();
            if db.dim() != dim || db.connected != dhat || rebuilt != composite_diagrams.iter().collect::<Vec<_>>() {
                return Err(bad(format!("degree {n} records disagree with the relations")));
            }
            basis.degrees.push(db);
        }
        Ok(basis)
    }

    /// Loads the cached basis from `dir` if present and valid, otherwise builds
    /// it and writes the cache. A present but invalid cache is an error.
    pub fn load_or_build(dir: &Path, max_degree: usize, reduced: bool) -> Result<(CanonicalBasis, bool), BasisError> {
        let name = format!("basis-{}-d{}.txt", if reduced { "reduced" } else { "unreduced" }, max_degree);
        let path = dir.join(name);
        let shown = path.display().to_string();
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| BasisError::Cache { path: shown.clone(), reason: e.to_string() })?;
            return Ok((CanonicalBasis::from_cache_string(&text, &shown)?, true));
        }
        let basis = CanonicalBasis::build(max_degree, reduced)?;
        fs::create_dir_all(dir).map_err(|e| BasisError::Cache { path: shown.clone(), reason: e.to_string() })?;
        fs::write(&path, basis.to_cache_string()).map_err(|e| BasisError::Cache { path: shown, reason: e.to_string() })?;
        Ok((basis, false))
    }
}
