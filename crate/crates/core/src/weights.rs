//! su(N) weight system in the fundamental representation, as Laurent
//! polynomials in `N`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{OnceLock, RwLock};

use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::diagram::Diagram;
use crate::poly::{LaurentPoly, MPoly};
use crate::rational::{fmt_q, frac, q, Q};
use crate::relations::reduce_to_chords;
use crate::series::BivariateSeries;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("rank N = {0} is below 2")]
    RankTooSmall(i64),
    #[error("diagram has overlapping components")]
    Overlapping,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    /// Traceless generators: `T^a_ij T^a_kl = c (d_il d_kj - d_ij d_kl / N)`.
    Sun,
    /// `T^a_ij T^a_kl = c d_il d_kj`.
    Gln,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct WeightConfig {
    /// `c` in `tr(T^a T^b) = c delta^{ab}`.
    #[serde(serialize_with = "crate::rational::serde_q::serialize")]
    pub trace_normalization: Q,
    pub algebra: Algebra,
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig { trace_normalization: frac(1, 2), algebra: Algebra::Sun }
    }
}

impl WeightConfig {
    pub fn describe(&self) -> String {
        let alg = match self.algebra {
            Algebra::Sun => "su(N)",
            Algebra::Gln => "gl(N)",
        };
        format!("{alg} fundamental, tr(T^a T^b) = {} delta", fmt_q(&self.trace_normalization))
    }
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
        if a != b {
            self.0[a] = b;
        }
    }
}

/// Number of index loops after resolving each chord by its swap term (bit set
/// in `mask`) or trace term. Segment `p` runs from position `p` to `p + 1`.
fn index_loops(n: usize, chords: &[(usize, usize)], mask: u32) -> usize {
    let mut d = Dsu((0..n).collect());
    let before = |p: usize| (p + n - 1) % n;
    for (i, &(a, b)) in chords.iter().enumerate() {
        if mask >> i & 1 == 1 {
            d.union(before(a), b);
            d.union(before(b), a);
        } else {
            d.union(before(a), a);
            d.union(before(b), b);
        }
    }
    (0..n).filter(|&x| d.find(x) == x).count()
}

/// Weight of a chord diagram, normalized by the trace of the identity.
fn chord_weight_uncached(d: &Diagram, cfg: &WeightConfig) -> LaurentPoly {
    let chords = d.chords();
    let k = chords.len();
    let n = d.legs();
    if k == 0 {
        return LaurentPoly::one('N');
    }
    let mut out = LaurentPoly::zero('N');
    for mask in 0..(1u32 << k) {
        let swaps = mask.count_ones() as i64;
        let traces = k as i64 - swaps;
        if cfg.algebra == Algebra::Gln && traces > 0 {
            continue;
        }
        let loops = index_loops(n, &chords, mask) as i64;
        let sign = if traces % 2 == 0 { Q::one() } else { -Q::one() };
        // c^k (-1/N)^traces N^loops / N
        out.add_term(loops - traces - 1, sign);
    }
    out.scale(&crate::rational::pow_i(&cfg.trace_normalization, k as i64))
}

type WeightCache = RwLock<HashMap<(Diagram, WeightConfig), LaurentPoly>>;

fn chord_weight(d: &Diagram, cfg: &WeightConfig) -> LaurentPoly {
    static CACHE: OnceLock<WeightCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = (d.clone(), cfg.clone());
    if let Some(w) = cache.read().unwrap().get(&key) {
        return w.clone();
    }
    let w = chord_weight_uncached(d, cfg);
    cache.write().unwrap().insert(key, w.clone());
    w
}

/// Weight of a chord diagram computed directly, without relations or caches.
pub fn chord_diagram_weight(d: &Diagram, cfg: &WeightConfig) -> LaurentPoly {
    assert!(d.is_chord_diagram(), "direct evaluation needs a chord diagram");
    chord_weight_uncached(d, cfg)
}

/// Weight of an arbitrary diagram: eliminate internal vertices by STU, then
/// contract every chord.
pub fn weight_sun(d: &Diagram, cfg: &WeightConfig) -> LaurentPoly {
    let mut out = LaurentPoly::zero('N');
    for (c, x) in reduce_to_chords(d).terms() {
        out = &out + &chord_weight(c, cfg).scale(x);
    }
    out
}

pub fn weight_sun_at(d: &Diagram, n: i64, cfg: &WeightConfig) -> Result<Q, WeightError> {
    if n < 2 {
        return Err(WeightError::RankTooSmall(n));
    }
    Ok(weight_sun(d, cfg).eval(&q(n)))
}

pub fn check_multiplicativity(d1: &Diagram, d2: &Diagram, cfg: &WeightConfig) -> bool {
    weight_sun(&d1.product(d2), cfg) == &weight_sun(d1, cfg) * &weight_sun(d2, cfg)
}

/// Formal weights of connected diagrams for two groups `G` and `G'`.
/// Symbol `2k` is `r_k(G)` and `2k + 1` is `r_k(G')` for the `k`-th
/// registered canonical connected diagram.
#[derive(Clone, Debug, Default)]
pub struct FormalGroups {
    table: BTreeMap<Diagram, usize>,
    order: Vec<Diagram>,
}

impl FormalGroups {
    pub fn new() -> Self {
        Self::default()
    }

    /// Symbols `(r(G), r(G'))` of a canonical connected diagram.
    pub fn symbols(&mut self, d: &Diagram) -> (usize, usize) {
        let k = match self.table.get(d) {
            Some(k) => *k,
            None => {
                let k = self.order.len();
                self.table.insert(d.clone(), k);
                self.order.push(d.clone());
                k
            }
        };
        (2 * k, 2 * k + 1)
    }

    pub fn diagram_of(&self, symbol: usize) -> Option<&Diagram> {
        self.order.get(symbol / 2)
    }
}

/// Weight for the product group `G x G'`: one factor
/// `r_p(G) x^{deg p} + r_p(G') x'^{deg p}` per connected component.
pub fn weight_product_group(d: &Diagram, groups: &mut FormalGroups, order: usize) -> Result<BivariateSeries<MPoly>, WeightError> {
    let report = d.decompose();
    if report.overlapping {
        return Err(WeightError::Overlapping);
    }
    let mut out = BivariateSeries::one(order);
    for comp in report.components {
        let c = comp.diagram.canonicalize();
        if c.sign == 0 {
            return Ok(BivariateSeries::zero(order));
        }
        let (g, h) = groups.symbols(&c.diagram);
        let deg = c.diagram.degree();
        let s = q(c.sign as i64);
        let mut factor = BivariateSeries::monomial(order, (deg, 0), MPoly::var(g).scale(&s));
        factor.add_term((0, deg), MPoly::var(h).scale(&s));
        out = out.mul(&factor);
    }
    Ok(out)
}

/// Renders a weight as a sum of `q N^k` terms.
pub fn render_weight(w: &LaurentPoly) -> String {
    if w.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (e, c)) in w.terms().collect::<Vec<_>>().into_iter().rev().enumerate() {
        let mag = fmt_q(&crate::rational::abs_q(c));
        let neg = c.is_negative();
        out += match (i, neg) {
            (0, true) => "-",
            (0, false) => "",
            (_, true) => " - ",
            (_, false) => " + ",
        };
        out += &match e {
            0 => mag,
            1 => format!("{mag} N"),
            _ => format!("{mag} N^{e}"),
        };
    }
    out
}
