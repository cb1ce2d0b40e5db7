//! HOMFLY polynomial by skein recursion toward descending diagrams.
//!
//! Diagrams are handled as signed oriented Gauss data: each crossing knows the
//! arcs entering and leaving along its under- and over-strand. Crossing
//! switches keep the traversal, so the set of crossings to switch is fixed by
//! one walk; smoothings get a fresh walk.

use std::collections::{BTreeMap, HashMap};
use std::sync::{OnceLock, RwLock};

use crate::poly::{LaurentPoly, LaurentPoly2};
use crate::rational::q;

use super::{BraidWord, KnotError, PlanarDiagram};

/// Hard crossing limit for HOMFLY.
pub const MAX_CROSSINGS: usize = 10;

#[derive(Clone, Copy, Debug)]
pub struct HomflyBudget {
    pub max_crossings: usize,
}

impl Default for HomflyBudget {
    fn default() -> Self {
        HomflyBudget { max_crossings: MAX_CROSSINGS }
    }
}

const VARS: (char, char) = ('a', 'z');

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Xing {
    in_under: usize,
    out_under: usize,
    in_over: usize,
    out_over: usize,
    positive: bool,
}

impl Xing {
    fn switched(self) -> Xing {
        Xing { in_under: self.in_over, out_under: self.out_over, in_over: self.in_under, out_over: self.out_under, positive: !self.positive }
    }
}

fn mono(ea: i64, ez: i64, c: i64) -> LaurentPoly2 {
    LaurentPoly2::monomial(VARS, (ea, ez), q(c))
}

/// `(a - a^-1) / z`, the value of a split unknot.
fn delta() -> LaurentPoly2 {
    &mono(1, -1, 1) - &mono(-1, -1, 1)
}

fn delta_pow(n: usize) -> LaurentPoly2 {
    delta().pow(n as u32)
}

struct Dsu(HashMap<usize, usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let p = *self.0.get(&x).unwrap_or(&x);
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0.insert(x, r);
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0.insert(a, b);
        }
    }
}

/// Removes crossing `i`, identifying arcs as given. Returns the remaining
/// crossings and the number of closed loops left without crossings.
fn remove(xs: &[Xing], i: usize, joins: &[(usize, usize)]) -> (Vec<Xing>, usize) {
    let x = xs[i];
    let mut d = Dsu(HashMap::new());
    for &(a, b) in joins {
        d.union(a, b);
    }
    let rest: Vec<Xing> = xs
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, y)| Xing {
            in_under: d.find(y.in_under),
            out_under: d.find(y.out_under),
            in_over: d.find(y.in_over),
            out_over: d.find(y.out_over),
            positive: y.positive,
        })
        .collect();
    let mut classes: Vec<usize> = [x.in_under, x.out_under, x.in_over, x.out_over].iter().map(|l| d.find(*l)).collect();
    classes.sort();
    classes.dedup();
    let used = |l: usize| rest.iter().any(|y| [y.in_under, y.out_under, y.in_over, y.out_over].contains(&l));
    let free = classes.into_iter().filter(|l| !used(*l)).count();
    (rest, free)
}

fn smooth(xs: &[Xing], i: usize) -> (Vec<Xing>, usize) {
    let x = xs[i];
    remove(xs, i, &[(x.in_under, x.out_over), (x.in_over, x.out_under)])
}

/// Strips Reidemeister I kinks; returns the count of loops freed.
fn strip_kinks(mut xs: Vec<Xing>) -> (Vec<Xing>, usize) {
    let mut free = 0;
    while let Some(i) = xs.iter().position(|x| x.out_under == x.in_over || x.out_over == x.in_under) {
        let x = xs[i];
        let (rest, f) = remove(&xs, i, &[(x.in_under, x.out_under), (x.out_under, x.in_over), (x.in_over, x.out_over)]);
        xs = rest;
        free += f;
    }
    (xs, free)
}

/// Groups crossings linked by arcs.
fn split(xs: Vec<Xing>) -> Vec<Vec<Xing>> {
    let mut d = Dsu(HashMap::new());
    let key = |i: usize| usize::MAX - i;
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (i, x) in xs.iter().enumerate() {
        for l in [x.in_under, x.out_under, x.in_over, x.out_over] {
            if let Some(&j) = owner.get(&l) {
                d.union(key(i), key(j));
            } else {
                owner.insert(l, i);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Xing>> = BTreeMap::new();
    for (i, x) in xs.into_iter().enumerate() {
        let r = d.find(key(i));
        groups.entry(r).or_default().push(x);
    }
    groups.into_values().collect()
}

/// Walk data: for each arc, the crossing it enters and whether as over-strand.
fn entry_map(xs: &[Xing]) -> HashMap<usize, (usize, bool)> {
    let mut m = HashMap::new();
    for (i, x) in xs.iter().enumerate() {
        m.insert(x.in_under, (i, false));
        m.insert(x.in_over, (i, true));
    }
    m
}

/// Passages `(crossing, over)` component by component, starting each
/// component at its smallest unvisited arc.
fn walk(xs: &[Xing]) -> (Vec<(usize, bool)>, usize) {
    let entry = entry_map(xs);
    let mut arcs: Vec<usize> = entry.keys().copied().collect();
    arcs.sort();
    let mut seen = std::collections::HashSet::new();
    let mut passages = Vec::new();
    let mut components = 0;
    for start in arcs {
        if seen.contains(&start) {
            continue;
        }
        components += 1;
        let mut a = start;
        while seen.insert(a) {
            let (i, over) = entry[&a];
            passages.push((i, over));
            a = if over { xs[i].out_over } else { xs[i].out_under };
        }
    }
    (passages, components)
}

/// Canonical code of a connected diagram: minimum over starting arcs of the
/// signed Gauss sequence, later components entered at the first crossing
/// with an unvisited strand.
fn canonical_code(xs: &[Xing]) -> Vec<i64> {
    let entry = entry_map(xs);
    let mut best: Option<Vec<i64>> = None;
    for &start in entry.keys() {
        let mut ids: HashMap<usize, i64> = HashMap::new();
        let mut order: Vec<usize> = Vec::new();
        let mut visited_strand: HashMap<(usize, bool), bool> = HashMap::new();
        let mut code = Vec::with_capacity(3 * xs.len());
        let mut next_start = Some(start);
        while let Some(s) = next_start {
            code.push(-1);
            let mut a = s;
            loop {
                let (i, over) = entry[&a];
                if visited_strand.insert((i, over), true).is_some() {
                    break;
                }
                let id = *ids.entry(i).or_insert_with(|| {
                    order.push(i);
                    order.len() as i64 - 1
                });
                code.push(id * 4 + 2 * over as i64 + xs[i].positive as i64);
                a = if over { xs[i].out_over } else { xs[i].out_under };
            }
            next_start = order.iter().find_map(|&i| {
                if !visited_strand.contains_key(&(i, false)) {
                    Some(xs[i].in_under)
                } else if !visited_strand.contains_key(&(i, true)) {
                    Some(xs[i].in_over)
                } else {
                    None
                }
            });
        }
        if best.as_ref().map_or(true, |b| code < *b) {
            best = Some(code);
        }
    }
    best.unwrap_or_default()
}

fn memo() -> &'static RwLock<HashMap<Vec<i64>, LaurentPoly2>> {
    static M: OnceLock<RwLock<HashMap<Vec<i64>, LaurentPoly2>>> = OnceLock::new();
    M.get_or_init(|| RwLock::new(HashMap::new()))
}

/// HOMFLY of a disjoint union of `free` crossingless loops and the diagram `xs`.
fn eval(xs: Vec<Xing>, free: usize) -> LaurentPoly2 {
    let (xs, kinks) = strip_kinks(xs);
    let parts = if xs.is_empty() { Vec::new() } else { split(xs) };
    let pieces = parts.len() + free + kinks;
    let mut out = delta_pow(pieces - 1);
    for p in parts {
        out = &out * &eval_connected(p);
    }
    out
}

fn eval_connected(xs: Vec<Xing>) -> LaurentPoly2 {
    let key = canonical_code(&xs);
    if let Some(v) = memo().read().unwrap().get(&key) {
        return v.clone();
    }
    let (passages, components) = walk(&xs);
    let mut first_seen = vec![false; xs.len()];
    let mut bad = Vec::new();
    for (i, over) in passages {
        if !first_seen[i] {
            first_seen[i] = true;
            if !over {
                bad.push(i);
            }
        }
    }
    let mut cur = xs.clone();
    let mut acc = LaurentPoly2::zero(VARS);
    let mut factor = LaurentPoly2::one(VARS);
    for i in bad {
        let (rest, free) = smooth(&cur, i);
        let smoothed = eval(rest, free);
        // a P+ - a^-1 P- = z P0
        let (c_smooth, c_switch) = if cur[i].positive { (mono(-1, 1, 1), mono(-2, 0, 1)) } else { (mono(1, 1, -1), mono(2, 0, 1)) };
        acc = &acc + &(&(&factor * &c_smooth) * &smoothed);
        factor = &factor * &c_switch;
        cur[i] = cur[i].switched();
    }
    acc = &acc + &(&factor * &delta_pow(components - 1));
    memo().write().unwrap().insert(key, acc.clone());
    acc
}

fn from_pd(pd: &PlanarDiagram) -> Vec<Xing> {
    (0..pd.crossing_count())
        .map(|i| {
            let (in_under, out_under, in_over, out_over) = pd.strands(i);
            Xing { in_under, out_under, in_over, out_over, positive: pd.sign(i) > 0 }
        })
        .collect()
}

/// HOMFLY polynomial in `(a, z)`, normalized to 1 on the unknot.
pub fn homfly(pd: &PlanarDiagram, budget: HomflyBudget) -> Result<LaurentPoly2, KnotError> {
    if pd.crossing_count() > budget.max_crossings {
        return Err(KnotError::BudgetExceeded { crossings: pd.crossing_count(), limit: budget.max_crossings });
    }
    if pd.crossing_count() == 0 {
        return Ok(LaurentPoly2::one(VARS));
    }
    Ok(eval(from_pd(pd), 0))
}

pub fn homfly_braid(b: &BraidWord, budget: HomflyBudget) -> Result<LaurentPoly2, KnotError> {
    homfly(&b.to_pd()?, budget)
}

/// su(N) fundamental slice: `a = q^N`, `z = q - q^-1`.
pub fn sun_slice(h: &LaurentPoly2, n: i64) -> Result<LaurentPoly, KnotError> {
    if n < 2 {
        return Err(KnotError::RankTooSmall(n));
    }
    let a = LaurentPoly::monomial('q', n, q(1));
    let z = LaurentPoly::from_terms('q', [(1, q(1)), (-1, q(-1))]);
    Ok(h.substitute(&a, &z).expect("HOMFLY of a knot is polynomial in z"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trefoil_and_unknot() {
        let tre = PlanarDiagram::parse("[[1,5,2,4],[3,1,4,6],[5,3,6,2]]").unwrap();
        let h = homfly(&tre, HomflyBudget::default()).unwrap();
        let expected = &(&mono(-2, 0, 2) + &mono(-2, 2, 1)) - &mono(-4, 0, 1);
        assert_eq!(h, expected);
        assert_eq!(homfly(&PlanarDiagram::unknot(), HomflyBudget::default()).unwrap(), LaurentPoly2::one(VARS));
        let tight = HomflyBudget { max_crossings: 2 };
        assert!(matches!(homfly(&tre, tight), Err(KnotError::BudgetExceeded { .. })));
    }

    #[test]
    fn two_component_unlink_diagram() {
        // two loops crossing twice with both crossings the same strand over: split unlink
        let xs = vec![
            Xing { in_under: 1, out_under: 2, in_over: 3, out_over: 4, positive: true },
            Xing { in_under: 2, out_under: 1, in_over: 4, out_over: 3, positive: false },
        ];
        assert_eq!(eval(xs, 0), delta());
    }
}
