//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vassiliev::diagram::End;
use vassiliev::poly::LaurentPoly;
use vassiliev::rational::{frac, q};
use vassiliev::{Diagram, Q};

/// Seed from `VASSILIEV_SEED`, or the given default.
pub fn seed(default: u64) -> u64 {
    std::env::var("VASSILIEV_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(default)
}

pub fn rng(default: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed(default))
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// su(N) fundamental weight by direct index contraction, with
/// `tr(T^a T^b) = delta/2`, no relations used. Every half-edge carries a
/// generator with row index `2h` and column index `2h + 1`; the circle is
/// the trace of the leg generators in circle order, an internal vertex is
/// `2 tr(T^x [T^y, T^z])` over its slots in cyclic order, and an edge is the
/// completeness relation `(d d - d d / N) / 2`. Edges at internal vertices
/// skip the `1/N` term, which meets a commutator trace and vanishes.
pub fn tensor_weight(d: &Diagram) -> LaurentPoly {
    let h = d.half_edges();
    let l = d.legs();
    let t = d.verts();
    let edges: Vec<(usize, usize)> = (0..h).filter(|&x| x < d.partner(x)).map(|x| (x, d.partner(x))).collect();
    let chord_edges: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].1 < l).collect();
    let r = |x: usize| 2 * x;
    let c = |x: usize| 2 * x + 1;
    let mut out = BTreeMap::<i64, Q>::new();
    for vmask in 0u32..(1 << t) {
        for emask in 0u32..(1 << chord_edges.len()) {
            let mut dsu = Dsu((0..2 * h).collect());
            for k in 0..l {
                dsu.union(c(k), r((k + 1) % l));
            }
            for v in 0..t {
                let s = [d.slot_half(v, 0), d.slot_half(v, 1), d.slot_half(v, 2)];
                let order = if vmask >> v & 1 == 0 { [s[0], s[1], s[2]] } else { [s[0], s[2], s[1]] };
                for i in 0..3 {
                    dsu.union(c(order[i]), r(order[(i + 1) % 3]));
                }
            }
            let mut traces = 0;
            for (i, &(a, b)) in edges.iter().enumerate() {
                let trace = chord_edges.iter().position(|&j| j == i).is_some_and(|p| emask >> p & 1 == 1);
                if trace {
                    traces += 1;
                    dsu.union(r(a), c(a));
                    dsu.union(r(b), c(b));
                } else {
                    dsu.union(r(a), c(b));
                    dsu.union(c(a), r(b));
                }
            }
            let loops = (0..2 * h).filter(|&x| dsu.find(x) == x).count() as i64;
            let flips = vmask.count_ones() + traces;
            let sign = if flips % 2 == 0 { q(1) } else { q(-1) };
            // c^E (1/c)^T N^(loops - traces - 1)
            *out.entry(loops - traces as i64 - 1).or_insert_with(Q::zero) += sign;
        }
    }
    let scale = vassiliev::rational::pow_i(&frac(1, 2), edges.len() as i64 - t as i64);
    LaurentPoly::from_terms('N', out.into_iter().map(|(e, x)| (e, x * &scale)))
}

/// Number of chord diagrams of a degree up to rotation, by Burnside over
/// rotations of the `2n` points.
pub fn chord_diagram_count(n: usize) -> usize {
    if n == 0 {
        return 1;
    }
    let m = 2 * n;
    let mut fixed_total = 0usize;
    for k in 0..m {
        // perfect matchings fixed by rotation by k, by brute force
        fixed_total += matchings(m).iter().filter(|mt| {
            mt.iter().all(|&(a, b)| {
                let (x, y) = ((a + k) % m, (b + k) % m);
                mt.contains(&(x.min(y), x.max(y)))
            })
        }).count();
    }
    fixed_total / m
}

fn matchings(m: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(rest: &[usize], cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 1..rest.len() {
            cur.push((rest[0], rest[i]));
            let next: Vec<usize> = rest.iter().enumerate().filter(|(j, _)| *j != 0 && *j != i).map(|(_, x)| *x).collect();
            go(&next, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(&(0..m).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    out
}

/// Multisets of connected elements of total degree `n`, from the product
/// `prod_i (1 - x^i)^(-c_i)` over degrees below `n`.
pub fn multiset_count(connected: &[usize], n: usize) -> usize {
    let mut poly = vec![0usize; n + 1];
    poly[0] = 1;
    for (i, &ci) in connected.iter().enumerate().take(n).skip(1) {
        for _ in 0..ci {
            for k in i..=n {
                poly[k] += poly[k - i];
            }
        }
    }
    poly[n]
}

/// `log(1 + u)` by the alternating series, composed with plain truncated
/// polynomial products.
pub fn log_by_composition(s: &[Q]) -> Vec<Q> {
    let k = s.len() - 1;
    assert!(s[0] == q(1));
    let mut u = s.to_vec();
    u[0] = Q::zero();
    let mut out = vec![Q::zero(); k + 1];
    let mut power = u.clone();
    for m in 1..=k {
        let coef = if m % 2 == 1 { frac(1, m as i64) } else { frac(-1, m as i64) };
        for i in 0..=k {
            out[i] += &coef * &power[i];
        }
        let mut next = vec![Q::zero(); k + 1];
        for i in 0..=k {
            for j in 0..=k - i {
                next[i + j] += &power[i] * &u[j];
            }
        }
        power = next;
    }
    out
}

/// Taylor coefficients of `sum_m c_m e^(m x)` computed term by term.
pub fn exp_sum(terms: &[(i64, i64)], k: usize) -> Vec<Q> {
    (0..=k)
        .map(|j| {
            let fact: Q = (1..=j as i64).fold(q(1), |a, b| a * q(b));
            terms.iter().map(|&(m, c)| q(c) * vassiliev::rational::pow_i(&q(m), j as i64) / &fact).fold(Q::zero(), |a, b| a + b)
        })
        .collect()
}

pub fn leg_count_on_vertices(d: &Diagram) -> usize {
    (0..d.legs()).filter(|&l| matches!(d.end(d.partner(l)), End::Slot { .. })).count()
}

/// `d` with an isolated chord inserted before leg `pos`.
pub fn insert_isolated_chord(d: &Diagram, pos: usize) -> Diagram {
    let mut b = vassiliev::DiagramBuilder::new();
    let mut map = vec![usize::MAX; d.half_edges()];
    let mut extra = None;
    for l in 0..=d.legs() {
        if l == pos {
            extra = Some((b.add_leg(), b.add_leg()));
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
    for h in 0..d.half_edges() {
        if h < d.partner(h) {
            b.join(map[h], map[d.partner(h)]);
        }
    }
    let (x, y) = extra.expect("position within 0..=legs");
    b.join(x, y);
    b.build().expect("valid diagram")
}

/// Chord diagram as a partner list on `2n` cyclically ordered points, reduced
/// to its lexicographically least rotation.
pub fn min_rotation(p: &[usize]) -> Vec<usize> {
    let m = p.len();
    (0..m.max(1))
        .map(|k| {
            let mut r = vec![0; m];
            for i in 0..m {
                r[(i + k) % m] = (p[i] + k) % m;
            }
            r
        })
        .min()
        .unwrap_or_default()
}

/// All chord diagrams of degree `n` up to rotation, from the matchings.
pub fn chord_classes(n: usize) -> Vec<Vec<usize>> {
    let mut set = std::collections::BTreeSet::new();
    for mt in matchings(2 * n) {
        let mut p = vec![0; 2 * n];
        for (a, b) in mt {
            p[a] = b;
            p[b] = a;
        }
        set.insert(min_rotation(&p));
    }
    set.into_iter().collect()
}

/// Chord diagram from a cyclic sequence of chord labels.
fn from_word(word: &[usize]) -> Vec<usize> {
    let mut p = vec![0; word.len()];
    for i in 0..word.len() {
        for j in 0..word.len() {
            if i != j && word[i] == word[j] {
                p[i] = j;
            }
        }
    }
    min_rotation(&p)
}

/// Exact rank of a set of sparse rows by rational elimination.
pub fn rank(rows: Vec<BTreeMap<usize, Q>>) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Q>> = BTreeMap::new();
    for mut r in rows {
        loop {
            r.retain(|_, v| !v.is_zero());
            let Some((&lead, lv)) = r.iter().next() else { break };
            let Some(p) = pivots.get(&lead) else {
                let inv = q(1) / lv;
                for v in r.values_mut() {
                    *v *= &inv;
                }
                pivots.insert(lead, r);
                break;
            };
            let f = lv.clone();
            for (k, v) in p {
                *r.entry(*k).or_insert_with(Q::zero) -= &f * v;
            }
        }
    }
    pivots.len()
}

/// Dimension of chord diagrams of degree `n` modulo the four-term relation
/// (and one-term when `reduced`), with 4T written directly: remove one end
/// `y` of a chord and reinsert it right before and right after each end of
/// another chord, with signs `+ - + -`.
pub fn chord_dimension(n: usize, reduced: bool) -> usize {
    let classes = chord_classes(n);
    let index: BTreeMap<Vec<usize>, usize> = classes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let m = 2 * n;
    let mut rows = Vec::new();
    for p in &classes {
        let mut label = vec![usize::MAX; m];
        let mut next = 0;
        for i in 0..m {
            if label[i] == usize::MAX {
                label[i] = next;
                label[p[i]] = next;
                next += 1;
            }
        }
        if reduced && (0..m).any(|i| p[i] == (i + 1) % m) {
            rows.push(BTreeMap::from([(index[p], q(1))]));
        }
        for y in 0..m {
            let rest: Vec<usize> = (0..m).filter(|&i| i != y).map(|i| label[i]).collect();
            for x in 0..next {
                if x == label[y] {
                    continue;
                }
                let mut row = BTreeMap::<usize, Q>::new();
                let ends: Vec<usize> = (0..rest.len()).filter(|&i| rest[i] == x).collect();
                for &e in &ends {
                    for (offset, sign) in [(0usize, 1i64), (1, -1)] {
                        let mut w = rest.clone();
                        w.insert(e + offset, label[y]);
                        *row.entry(index[&from_word(&w)]).or_insert_with(Q::zero) += q(sign);
                    }
                }
                rows.push(row);
            }
        }
    }
    classes.len() - rank(rows)
}

/// `prod_k alpha_k^p_k / p_k!` over the factor multiset, in formal symbols.
pub fn multinomial_oracle(factors: &[vassiliev::basis::ElementRef]) -> vassiliev::poly::MPoly {
    use vassiliev::factorization::FormalAlpha;
    use vassiliev::poly::MPoly;
    let mut out = MPoly::one();
    let mut i = 0;
    while i < factors.len() {
        let j = (i..factors.len()).find(|&j| factors[j] != factors[i]).unwrap_or(factors.len());
        let p = (j - i) as i64;
        let fact: Q = (1..=p).fold(q(1), |a, b| a * q(b));
        out = (&out * &MPoly::var(FormalAlpha(factors[i]).symbol()).pow(p as u32)).scale(&(q(1) / fact));
        i = j;
    }
    out
}

/// Log coefficients of a Laurent polynomial in `t` at `t = e^x`, from the
/// term-by-term exponential sum and the alternating log series.
pub fn log_coeffs(p: &LaurentPoly, k: usize) -> Vec<Q> {
    let mut s = vec![Q::zero(); k + 1];
    for (e, c) in p.terms() {
        let fact = |j: usize| (1..=j as i64).fold(q(1), |a, b| a * q(b));
        for (j, slot) in s.iter_mut().enumerate() {
            *slot += c * vassiliev::rational::pow_i(&q(e), j as i64) / fact(j);
        }
    }
    log_by_composition(&s)
}
