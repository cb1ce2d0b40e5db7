//! Kauffman bracket state sum and the Jones polynomial.

use crate::poly::LaurentPoly;
use crate::rational::q;

use super::{KnotError, PlanarDiagram};

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

/// `<D>` in the variable `A`, with `<O> = 1`. The A-smoothing of `X[a,b,c,d]`
/// joins `a` with `b` and `c` with `d`.
pub fn kauffman_bracket(pd: &PlanarDiagram) -> Result<LaurentPoly, KnotError> {
    pd.require_knot()?;
    let xs = pd.crossings();
    let n = xs.len();
    if n == 0 {
        return Ok(LaurentPoly::one('A'));
    }
    if n > 24 {
        return Err(KnotError::BudgetExceeded { crossings: n, limit: 24 });
    }
    let mut labels: Vec<usize> = xs.iter().flatten().copied().collect();
    labels.sort();
    labels.dedup();
    let idx = |l: usize| labels.binary_search(&l).unwrap();
    let delta = LaurentPoly::from_terms('A', [(2, q(-1)), (-2, q(-1))]);
    // counts[b][loops] for b = number of B-smoothings
    let mut counts = vec![vec![0i64; n + 2]; n + 1];
    for state in 0u32..(1 << n) {
        let mut d = Dsu((0..labels.len()).collect());
        for (i, x) in xs.iter().enumerate() {
            let [a, b, c, e] = x.map(idx);
            if state >> i & 1 == 0 {
                d.union(a, b);
                d.union(c, e);
            } else {
                d.union(a, e);
                d.union(b, c);
            }
        }
        let loops = (0..labels.len()).filter(|&x| d.find(x) == x).count();
        counts[state.count_ones() as usize][loops] += 1;
    }
    let mut out = LaurentPoly::zero('A');
    for (b, row) in counts.iter().enumerate() {
        for (loops, &c) in row.iter().enumerate() {
            if c != 0 {
                let term = LaurentPoly::monomial('A', n as i64 - 2 * b as i64, q(c));
                out = &out + &(&term * &delta.pow(loops as u32 - 1));
            }
        }
    }
    Ok(out)
}

/// Jones polynomial `(-A^3)^(-w) <D>` at `A = t^(1/4)`.
pub fn jones(pd: &PlanarDiagram) -> Result<LaurentPoly, KnotError> {
    let br = kauffman_bracket(pd)?;
    let w = pd.writhe();
    let sign = if w % 2 == 0 { q(1) } else { q(-1) };
    let f = br.shift(-3 * w).scale(&sign);
    Ok(f.exponent_div(4).expect("bracket exponents are congruent mod 4 after writhe correction").with_var('t'))
}
