//! Formal rational combinations of canonical diagrams.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::diagram::Diagram;
use crate::rational::{fmt_q, q, Q};

/// Linear combination of canonical diagrams of a single degree.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiagramSum {
    terms: BTreeMap<Diagram, Q>,
}

impl DiagramSum {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The canonical image of `d` (possibly zero by antisymmetry).
    pub fn single(d: &Diagram) -> Self {
        let mut s = Self::zero();
        s.add(d, &q(1));
        s
    }

    /// Adds `coeff * d`, canonicalizing `d` first.
    pub fn add(&mut self, d: &Diagram, coeff: &Q) {
        let c = d.canonicalize();
        if c.sign == 0 || coeff.is_zero() {
            return;
        }
        let x = if c.sign > 0 { coeff.clone() } else { -coeff.clone() };
        self.add_canonical(c.diagram, x);
    }

    /// Adds a term whose key is already canonical.
    pub fn add_canonical(&mut self, d: Diagram, coeff: Q) {
        if let Some(deg) = self.degree() {
            assert_eq!(deg, d.degree(), "mixed degrees in a diagram sum");
        }
        let e = self.terms.entry(d).or_insert_with(Q::zero);
        *e += coeff;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_sum(&mut self, other: &DiagramSum, scale: &Q) {
        for (d, c) in &other.terms {
            self.add_canonical(d.clone(), c * scale);
        }
    }

    pub fn scaled(&self, s: &Q) -> DiagramSum {
        let mut out = DiagramSum::zero();
        out.add_sum(self, s);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Diagram, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, d: &Diagram) -> Q {
        self.terms.get(d).cloned().unwrap_or_else(Q::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next().map(|d| d.degree())
    }
}

impl fmt::Display for DiagramSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}) [{}]", fmt_q(c), d)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_and_sign() {
        let t = Diagram::tripod();
        let mut s = DiagramSum::single(&t);
        s.add(&t.flip_vertex(0), &q(1));
        assert!(s.is_zero());
        let mut s = DiagramSum::single(&t);
        s.add(&t.flip_vertex(0), &q(-1));
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(&t.canonicalize().diagram), q(2));
    }
}
