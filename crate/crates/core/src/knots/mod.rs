//! Knot input (planar diagram codes and braid words), the Jones polynomial by
//! the Kauffman bracket, HOMFLY by skein recursion, and su(N) slices.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * A crossing `X[a,b,c,d]` lists its arcs counterclockwise starting from the
//!   incoming under-strand `a`; the under-strand leaves along `c`. It is
//!   positive when the over-strand leaves along `b`.
//! * HOMFLY: `a P(+) - a^-1 P(-) = z P(0)`, `P(unknot) = 1`.
//! * Jones: `t V(+) - t^-1 V(-) = (t^1/2 - t^-1/2) V(0)`. With this choice the
//!   su(2) slice `a = q^2, z = q - q^-1` equals the Jones polynomial at `t = q^2`.
//! * The table's `3_1` (KnotInfo PD code) has three positive crossings, and its
//!   Jones polynomial is `-t^-4 + t^-3 + t^-1`.

mod bracket;
mod homfly;
mod table;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use bracket::{jones, kauffman_bracket};
pub use homfly::{homfly, homfly_braid, sun_slice, HomflyBudget, MAX_CROSSINGS};
pub use table::{knot_by_name, table, KnotEntry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KnotError {
    #[error("malformed PD code: {0}")]
    MalformedPd(String),
    #[error("malformed braid word: {0}")]
    MalformedBraid(String),
    #[error("expected a knot, found {0} components")]
    NotAKnot(usize),
    #[error("unknown knot `{0}`")]
    UnknownKnot(String),
    #[error("{crossings} crossings exceed the HOMFLY budget of {limit}")]
    BudgetExceeded { crossings: usize, limit: usize },
    #[error("su(N) slice needs N >= 2, got {0}")]
    RankTooSmall(i64),
}

/// Oriented planar diagram. Arc labels are arbitrary positive integers, each
/// appearing exactly twice.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PlanarDiagram {
    crossings: Vec<[usize; 4]>,
    /// `true` when the over-strand leaves along slot 1 (`b`).
    over_out_b: Vec<bool>,
}

impl PlanarDiagram {
    pub fn unknot() -> Self {
        PlanarDiagram { crossings: Vec::new(), over_out_b: Vec::new() }
    }

    /// Validates labels, infers the orientation of every over-strand and
    /// checks that the result is consistent.
    pub fn new(crossings: Vec<[usize; 4]>) -> Result<Self, KnotError> {
        let mut occ: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for (i, x) in crossings.iter().enumerate() {
            for (s, &l) in x.iter().enumerate() {
                occ.entry(l).or_default().push((i, s));
            }
        }
        if let Some((l, o)) = occ.iter().find(|(_, o)| o.len() != 2) {
            return Err(KnotError::MalformedPd(format!("arc {l} appears {} times", o.len())));
        }
        // dir[i][s]: Some(true) = arc enters crossing i at slot s
        let n = crossings.len();
        let mut dir = vec![[None::<bool>; 4]; n];
        for d in dir.iter_mut() {
            d[0] = Some(true);
            d[2] = Some(false);
        }
        let other = |i: usize, s: usize| -> (usize, usize) {
            let o = &occ[&crossings[i][s]];
            if o[0] == (i, s) {
                o[1]
            } else {
                o[0]
            }
        };
        loop {
            let mut changed = true;
            while changed {
                changed = false;
                for i in 0..n {
                    for s in 0..4 {
                        if let Some(v) = dir[i][s] {
                            let (j, t) = other(i, s);
                            match dir[j][t] {
                                None => {
                                    dir[j][t] = Some(!v);
                                    changed = true;
                                }
                                Some(w) if w == v => {
                                    return Err(KnotError::MalformedPd(format!("arc {} has inconsistent orientation", crossings[i][s])));
                                }
                                _ => {}
                            }
                            // over slots are opposite each other
                            if s % 2 == 1 && dir[i][4 - s].is_none() {
                                dir[i][4 - s] = Some(!v);
                                changed = true;
                            }
                        }
                    }
                }
            }
            match (0..n).find(|&i| dir[i][1].is_none()) {
                Some(i) => dir[i][1] = Some(false),
                None => break,
            }
        }
        for (i, d) in dir.iter().enumerate() {
            if d[1] == d[3] {
                return Err(KnotError::MalformedPd(format!("crossing {} has an inconsistent over-strand", i + 1)));
            }
        }
        let over_out_b = dir.iter().map(|d| d[1] == Some(false)).collect();
        Ok(PlanarDiagram { crossings, over_out_b })
    }

    /// Accepts `[[a,b,c,d],...]`, `X[a,b,c,d] ...`, `PD[X[...],...]` and similar:
    /// the integers are read in order and grouped by four.
    pub fn parse(s: &str) -> Result<Self, KnotError> {
        let nums: Vec<usize> = s
            .split(|c: char| !c.is_ascii_digit())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|e| KnotError::MalformedPd(e.to_string())))
            .collect::<Result<_, _>>()?;
        if nums.len() % 4 != 0 {
            return Err(KnotError::MalformedPd(format!("{} labels is not a multiple of four", nums.len())));
        }
        if s.contains('-') {
            return Err(KnotError::MalformedPd("negative arc label".into()));
        }
        PlanarDiagram::new(nums.chunks(4).map(|c| [c[0], c[1], c[2], c[3]]).collect())
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn crossings(&self) -> &[[usize; 4]] {
        &self.crossings
    }

    pub fn sign(&self, i: usize) -> i32 {
        if self.over_out_b[i] {
            1
        } else {
            -1
        }
    }

    pub fn writhe(&self) -> i64 {
        (0..self.crossings.len()).map(|i| self.sign(i) as i64).sum()
    }

    /// `(in_under, out_under, in_over, out_over)` labels of crossing `i`.
    pub fn strands(&self, i: usize) -> (usize, usize, usize, usize) {
        let x = self.crossings[i];
        if self.over_out_b[i] {
            (x[0], x[2], x[3], x[1])
        } else {
            (x[0], x[2], x[1], x[3])
        }
    }

    /// Crossing and slot where arc `label` enters.
    fn entering(&self, label: usize) -> (usize, usize) {
        for i in 0..self.crossings.len() {
            let (iu, _, io, _) = self.strands(i);
            if iu == label {
                return (i, 0);
            }
            if io == label {
                return (i, if self.over_out_b[i] { 3 } else { 1 });
            }
        }
        unreachable!("every arc enters some crossing")
    }

    /// Successor map along the orientation: arc label -> next arc label.
    fn successor(&self) -> HashMap<usize, usize> {
        let mut next = HashMap::new();
        for i in 0..self.crossings.len() {
            let (iu, ou, io, oo) = self.strands(i);
            next.insert(iu, ou);
            next.insert(io, oo);
        }
        next
    }

    pub fn component_count(&self) -> usize {
        if self.crossings.is_empty() {
            return 1;
        }
        let next = self.successor();
        let mut seen = std::collections::HashSet::new();
        let mut count = 0;
        let mut labels: Vec<usize> = next.keys().copied().collect();
        labels.sort();
        for l in labels {
            if seen.insert(l) {
                count += 1;
                let mut x = next[&l];
                while seen.insert(x) {
                    x = next[&x];
                }
            }
        }
        count
    }

    pub fn require_knot(&self) -> Result<(), KnotError> {
        match self.component_count() {
            1 => Ok(()),
            c => Err(KnotError::NotAKnot(c)),
        }
    }

    /// Switches every crossing.
    pub fn mirror(&self) -> PlanarDiagram {
        let crossings = self
            .crossings
            .iter()
            .zip(&self.over_out_b)
            .map(|(x, &pos)| if pos { [x[3], x[0], x[1], x[2]] } else { [x[1], x[2], x[3], x[0]] })
            .collect();
        PlanarDiagram::new(crossings).expect("mirror of a valid diagram")
    }

    /// Relabels a knot's arcs `1..2n` along the orientation, starting from the
    /// smallest label.
    pub fn normalized(&self) -> PlanarDiagram {
        if self.crossings.is_empty() {
            return self.clone();
        }
        let next = self.successor();
        let mut map = HashMap::new();
        let start = *next.keys().min().unwrap();
        let mut x = start;
        let mut k = 1;
        loop {
            map.insert(x, k);
            k += 1;
            x = next[&x];
            if x == start || map.contains_key(&x) {
                break;
            }
        }
        let mut k2 = k;
        let mut rest: Vec<usize> = next.keys().filter(|l| !map.contains_key(l)).copied().collect();
        rest.sort();
        for l in rest {
            map.insert(l, k2);
            k2 += 1;
        }
        let crossings = self.crossings.iter().map(|c| c.map(|l| map[&l])).collect();
        PlanarDiagram { crossings, over_out_b: self.over_out_b.clone() }
    }
}

impl fmt::Display for PlanarDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.crossings.iter().map(|x| format!("X[{},{},{},{}]", x[0], x[1], x[2], x[3])).collect();
        write!(f, "PD[{}]", parts.join(","))
    }
}

/// Connected sum by splicing the first arc of `a` with the first arc of `b`.
pub fn connected_sum(a: &PlanarDiagram, b: &PlanarDiagram) -> Result<PlanarDiagram, KnotError> {
    a.require_knot()?;
    b.require_knot()?;
    if a.crossings.is_empty() {
        return Ok(b.normalized());
    }
    if b.crossings.is_empty() {
        return Ok(a.normalized());
    }
    let offset = a.crossings.iter().flatten().max().copied().unwrap_or(0);
    let bs = PlanarDiagram { crossings: b.crossings.iter().map(|c| c.map(|l| l + offset)).collect(), over_out_b: b.over_out_b.clone() };
    let x = *a.crossings.iter().flatten().min().unwrap();
    let y = *bs.crossings.iter().flatten().min().unwrap();
    let (ia, sa) = a.entering(x);
    let (ib, sb) = bs.entering(y);
    let mut ax = a.crossings.clone();
    let mut bx = bs.crossings;
    ax[ia][sa] = y;
    bx[ib][sb] = x;
    ax.extend(bx);
    Ok(PlanarDiagram::new(ax)?.normalized())
}

/// Braid word on `strands` strands; generator `k` is `sigma_k`, `-k` its inverse.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BraidWord {
    pub strands: usize,
    pub word: Vec<i64>,
}

impl BraidWord {
    pub fn new(strands: usize, word: Vec<i64>) -> Result<Self, KnotError> {
        for &g in &word {
            if g == 0 || g.unsigned_abs() as usize >= strands {
                return Err(KnotError::MalformedBraid(format!("generator {g} on {strands} strands")));
            }
        }
        Ok(BraidWord { strands, word })
    }

    /// Parses `[1,-2,1]` or `1 -2 1`; the strand count is one more than the
    /// largest generator index.
    pub fn parse(s: &str) -> Result<Self, KnotError> {
        let word: Vec<i64> = s
            .split(|c: char| !(c.is_ascii_digit() || c == '-'))
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().map_err(|e| KnotError::MalformedBraid(e.to_string())))
            .collect::<Result<_, _>>()?;
        let strands = word.iter().map(|g| g.unsigned_abs() as usize).max().unwrap_or(0) + 1;
        BraidWord::new(strands, word)
    }

    /// PD code of the braid closure.
    pub fn to_pd(&self) -> Result<PlanarDiagram, KnotError> {
        if self.word.is_empty() {
            return if self.strands <= 1 { Ok(PlanarDiagram::unknot()) } else { Err(KnotError::NotAKnot(self.strands)) };
        }
        let mut current: Vec<usize> = (1..=self.strands).collect();
        let mut next_label = self.strands + 1;
        let mut crossings = Vec::new();
        for &g in &self.word {
            let i = g.unsigned_abs() as usize - 1;
            let (in_i, in_j) = (current[i], current[i + 1]);
            let (out_i, out_j) = (next_label, next_label + 1);
            next_label += 2;
            if g > 0 {
                crossings.push([in_j, out_j, out_i, in_i]);
            } else {
                crossings.push([in_i, in_j, out_j, out_i]);
            }
            current[i] = out_i;
            current[i + 1] = out_j;
        }
        let close: HashMap<usize, usize> = current.iter().enumerate().map(|(k, &l)| (l, k + 1)).collect();
        for (k, &l) in current.iter().enumerate() {
            if l == k + 1 {
                return Err(KnotError::MalformedBraid(format!("strand {} has no crossing", k + 1)));
            }
        }
        let crossings: Vec<[usize; 4]> = crossings.into_iter().map(|c| c.map(|l| *close.get(&l).unwrap_or(&l))).collect();
        let pd = PlanarDiagram::new(crossings)?;
        pd.require_knot()?;
        Ok(pd.normalized())
    }
}
