//! Laurent polynomials in one and two variables, and multivariate
//! polynomials over formal symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::rational::{fmt_q, pow_i, Q};

/// Laurent polynomial in a single named variable with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LaurentPoly {
    var: char,
    terms: BTreeMap<i64, Q>,
}

impl LaurentPoly {
    pub fn zero(var: char) -> Self {
        LaurentPoly { var, terms: BTreeMap::new() }
    }

    pub fn one(var: char) -> Self {
        Self::monomial(var, 0, Q::one())
    }

    pub fn constant(var: char, c: Q) -> Self {
        Self::monomial(var, 0, c)
    }

    pub fn monomial(var: char, exp: i64, c: Q) -> Self {
        let mut p = Self::zero(var);
        p.add_term(exp, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Q)>>(var: char, it: I) -> Self {
        let mut p = Self::zero(var);
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn var(&self) -> char {
        self.var
    }

    pub fn with_var(mut self, var: char) -> Self {
        self.var = var;
        self
    }

    pub fn add_term(&mut self, exp: i64, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exp).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: i64) -> Q {
        self.terms.get(&exp).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::from_terms(self.var, self.terms.iter().map(|(e, x)| (*e, x * c)))
    }

    pub fn shift(&self, by: i64) -> Self {
        Self::from_terms(self.var, self.terms.iter().map(|(e, x)| (e + by, x.clone())))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.var);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `var -> var^k`.
    pub fn power_map(&self, k: i64) -> Self {
        Self::from_terms(self.var, self.terms.iter().map(|(e, x)| (e * k, x.clone())))
    }

    /// Divides every exponent by `k`; `None` unless all exponents are multiples of `k`.
    pub fn exponent_div(&self, k: i64) -> Option<Self> {
        if self.terms.keys().any(|e| e % k != 0) {
            return None;
        }
        Some(Self::from_terms(self.var, self.terms.iter().map(|(e, x)| (e / k, x.clone()))))
    }

    pub fn eval(&self, at: &Q) -> Q {
        self.terms.iter().map(|(e, c)| c * pow_i(at, *e)).fold(Q::zero(), |a, b| a + b)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            write_term(f, c, &monomial_str(&[(self.var.to_string(), *e)]), first)?;
            first = false;
        }
        Ok(())
    }
}

fn monomial_str(vars: &[(String, i64)]) -> String {
    let mut parts = Vec::new();
    for (v, e) in vars {
        match *e {
            0 => {}
            1 => parts.push(v.clone()),
            e if e < 0 => parts.push(format!("{}^({})", v, e)),
            e => parts.push(format!("{}^{}", v, e)),
        }
    }
    parts.join("*")
}

fn write_term(f: &mut fmt::Formatter<'_>, c: &Q, mono: &str, first: bool) -> fmt::Result {
    let neg = c < &Q::zero();
    let abs = if neg { -c.clone() } else { c.clone() };
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    if mono.is_empty() {
        write!(f, "{}", fmt_q(&abs))
    } else if abs.is_one() {
        write!(f, "{}", mono)
    } else {
        write!(f, "{}*{}", fmt_q(&abs), mono)
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.var);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-Q::one())
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

/// Laurent polynomial in two named variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LaurentPoly2 {
    vars: (char, char),
    terms: BTreeMap<(i64, i64), Q>,
}

impl LaurentPoly2 {
    pub fn zero(vars: (char, char)) -> Self {
        LaurentPoly2 { vars, terms: BTreeMap::new() }
    }

    pub fn one(vars: (char, char)) -> Self {
        Self::monomial(vars, (0, 0), Q::one())
    }

    pub fn monomial(vars: (char, char), exp: (i64, i64), c: Q) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(exp, c);
        p
    }

    pub fn vars(&self) -> (char, char) {
        self.vars
    }

    pub fn add_term(&mut self, exp: (i64, i64), c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exp).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &Q)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, x) in &self.terms {
            out.add_term(*e, x * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.vars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `first -> var^ja`, `second -> poly` into a one-variable
    /// Laurent polynomial ring; the second variable's image must be invertible
    /// whenever negative powers occur (returns `None` otherwise).
    pub fn substitute(&self, first: &LaurentPoly, second: &LaurentPoly) -> Option<LaurentPoly> {
        let var = first.var();
        let mut out = LaurentPoly::zero(var);
        for ((ea, ez), c) in &self.terms {
            let fa = laurent_pow(first, *ea)?;
            let fz = laurent_pow(second, *ez)?;
            out = &out + &(&fa * &fz).scale(c);
        }
        Some(out)
    }
}

/// Integer power of a Laurent polynomial; negative powers only for monomials.
fn laurent_pow(p: &LaurentPoly, e: i64) -> Option<LaurentPoly> {
    if e >= 0 {
        return Some(p.pow(e as u32));
    }
    let mut it = p.terms();
    let (exp, c) = it.next()?;
    if it.next().is_some() {
        return None;
    }
    Some(LaurentPoly::monomial(p.var(), exp * e, pow_i(c, e)))
}

impl fmt::Display for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((ea, ez), c) in &self.terms {
            let m = monomial_str(&[(self.vars.0.to_string(), *ea), (self.vars.1.to_string(), *ez)]);
            write_term(f, c, &m, first)?;
            first = false;
        }
        Ok(())
    }
}

impl<'a> Add<&'a LaurentPoly2> for &'a LaurentPoly2 {
    type Output = LaurentPoly2;
    fn add(self, rhs: &LaurentPoly2) -> LaurentPoly2 {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly2> for &'a LaurentPoly2 {
    type Output = LaurentPoly2;
    fn sub(self, rhs: &LaurentPoly2) -> LaurentPoly2 {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly2> for &'a LaurentPoly2 {
    type Output = LaurentPoly2;
    fn mul(self, rhs: &LaurentPoly2) -> LaurentPoly2 {
        let mut out = LaurentPoly2::zero(self.vars);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

/// Exponent vector of a multivariate monomial: sorted `(variable, power)` pairs.
pub type Monomial = Vec<(usize, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Polynomial over formal symbols (indexed by `usize`) with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Q>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = MPoly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn var(v: usize) -> Self {
        let mut p = MPoly::zero();
        p.add_term(vec![(v, 1)], Q::one());
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = MPoly::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = MPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Variables occurring with nonzero power.
    pub fn variables(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| *v)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Replaces every occurrence of the variables in `subst` by the given polynomials.
    pub fn substitute(&self, subst: &BTreeMap<usize, MPoly>) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let mut term = MPoly::constant(c.clone());
            let mut rest = Vec::new();
            for &(v, e) in m {
                match subst.get(&v) {
                    Some(p) => term = &term * &p.pow(e),
                    None => rest.push((v, e)),
                }
            }
            let mut r = MPoly::zero();
            r.add_term(rest, Q::one());
            out = &out + &(&term * &r);
        }
        out
    }

    /// Evaluates with every variable assigned a rational value (missing ones are errors).
    pub fn eval(&self, values: &BTreeMap<usize, Q>) -> Option<Q> {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m {
                t *= pow_i(values.get(v)?, *e as i64);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Total degree of the monomial in the given subset of variables, for every term.
    pub fn degree_in(&self, vars: &[usize]) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| m.iter().filter(|(v, _)| vars.contains(v)).map(|(_, e)| *e).sum())
            .max()
    }

    pub fn render(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        struct W<'a>(&'a MPoly, &'a dyn Fn(usize) -> String);
        impl fmt::Display for W<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let mut first = true;
                for (m, c) in &self.0.terms {
                    let vars: Vec<(String, i64)> = m.iter().map(|(v, e)| ((self.1)(*v), *e as i64)).collect();
                    write_term(f, c, &monomial_str(&vars), first)?;
                    first = false;
                }
                Ok(())
            }
        }
        W(self, names).to_string()
    }
}

impl<'a> Add<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(mono_mul(m1, m2), c1 * c2);
            }
        }
        out
    }
}
