//! Truncated power series in one or two grading variables, with exact
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::{LaurentPoly, MPoly};
use crate::rational::{factorial, fmt_q, q, Q};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("exponential needs a vanishing constant term")]
    NonZeroConstant,
    #[error("logarithm needs constant term 1")]
    NonUnitConstant,
}

/// Coefficient ring for series.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Q) -> Self;
}

impl Coeff for Q {
    fn zero() -> Self {
        <Q as Zero>::zero()
    }
    fn one() -> Self {
        <Q as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Q) -> Self {
        self * c
    }
}

impl Coeff for MPoly {
    fn zero() -> Self {
        MPoly::zero()
    }
    fn one() -> Self {
        MPoly::one()
    }
    fn is_zero(&self) -> bool {
        MPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Q) -> Self {
        MPoly::scale(self, c)
    }
}

/// `c_0 + c_1 x + ... + c_K x^K + O(x^{K+1})`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Series<C: Coeff> {
    order: usize,
    coeffs: Vec<C>,
}

pub type RationalSeries = Series<Q>;

impl<C: Coeff> Series<C> {
    pub fn new(order: usize, mut coeffs: Vec<C>) -> Self {
        coeffs.resize(order + 1, C::zero());
        Series { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(order, Vec::new())
    }

    pub fn one(order: usize) -> Self {
        Self::new(order, vec![C::one()])
    }

    /// `c x^k`.
    pub fn monomial(order: usize, k: usize, c: C) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(order.min(self.order), self.coeffs[..=order.min(self.order)].to_vec())
    }

    pub fn add(&self, o: &Self) -> Self {
        let k = self.order.min(o.order);
        Self::new(k, (0..=k).map(|i| self.coeffs[i].add(&o.coeffs[i])).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let k = self.order.min(o.order);
        Self::new(k, (0..=k).map(|i| self.coeffs[i].sub(&o.coeffs[i])).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let k = self.order.min(o.order);
        let mut out = vec![C::zero(); k + 1];
        for i in 0..=k {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=k - i {
                if !o.coeffs[j].is_zero() {
                    out[i + j] = out[i + j].add(&self.coeffs[i].mul(&o.coeffs[j]));
                }
            }
        }
        Self::new(k, out)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.order, self.coeffs.iter().map(|x| x.scale(c)).collect())
    }

    /// `x -> -x`.
    pub fn negate_variable(&self) -> Self {
        Self::new(self.order, self.coeffs.iter().enumerate().map(|(i, x)| if i % 2 == 1 { x.scale(&q(-1)) } else { x.clone() }).collect())
    }

    /// Exponential via `n g_n = sum_k k f_k g_{n-k}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonZeroConstant);
        }
        let mut g = vec![C::one()];
        for n in 1..=self.order {
            let mut acc = C::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc = acc.add(&self.coeffs[k].mul(&g[n - k]).scale(&q(k as i64)));
                }
            }
            g.push(acc.scale(&Q::new(1.into(), (n as i64).into())));
        }
        Ok(Self::new(self.order, g))
    }

    /// Logarithm via `n l_n = n s_n - sum_{k<n} k l_k s_{n-k}`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0] != C::one() {
            return Err(SeriesError::NonUnitConstant);
        }
        let mut l = vec![C::zero()];
        for n in 1..=self.order {
            let mut acc = self.coeffs[n].scale(&q(n as i64));
            for k in 1..n {
                if !l[k].is_zero() {
                    acc = acc.sub(&l[k].mul(&self.coeffs[n - k]).scale(&q(k as i64)));
                }
            }
            l.push(acc.scale(&Q::new(1.into(), (n as i64).into())));
        }
        Ok(Self::new(self.order, l))
    }
}

pub fn exp_series(s: &RationalSeries) -> Result<RationalSeries, SeriesError> {
    s.exp()
}

pub fn log_series(s: &RationalSeries) -> Result<RationalSeries, SeriesError> {
    s.log()
}

/// Replaces `t` by `e^x` in a Laurent polynomial.
pub fn substitute_exponential(p: &LaurentPoly, order: usize) -> RationalSeries {
    let mut coeffs = vec![<Q as Zero>::zero(); order + 1];
    for (m, c) in p.terms() {
        let mut pow = <Q as One>::one();
        for (j, slot) in coeffs.iter_mut().enumerate() {
            *slot += c * &pow / factorial(j as u64);
            pow *= q(m);
        }
    }
    RationalSeries::new(order, coeffs)
}

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(fmt_q).collect();
        write!(f, "[{}] + O(x^{})", parts.join(", "), self.order + 1)
    }
}

/// Series in `x, x'` truncated at total degree `K`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BivariateSeries<C: Coeff> {
    order: usize,
    coeffs: BTreeMap<(usize, usize), C>,
}

impl<C: Coeff> BivariateSeries<C> {
    pub fn zero(order: usize) -> Self {
        BivariateSeries { order, coeffs: BTreeMap::new() }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(order, (0, 0), C::one())
    }

    pub fn monomial(order: usize, exp: (usize, usize), c: C) -> Self {
        let mut s = Self::zero(order);
        s.add_term(exp, c);
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn add_term(&mut self, exp: (usize, usize), c: C) {
        if exp.0 + exp.1 > self.order || c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(exp).or_insert_with(C::zero);
        *e = e.add(&c);
        if e.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: (usize, usize)) -> C {
        self.coeffs.get(&exp).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &C)> {
        self.coeffs.iter()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.order.min(o.order));
        for (e, c) in self.coeffs.iter().chain(o.coeffs.iter()) {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&q(-1)))
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = Self::zero(self.order);
        for (e, c) in &self.coeffs {
            out.add_term(*e, c.scale(s));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.order.min(o.order));
        for (a, x) in &self.coeffs {
            for (b, y) in &o.coeffs {
                out.add_term((a.0 + b.0, a.1 + b.1), x.mul(y));
            }
        }
        out
    }

    /// Homogeneous part of total degree `n`.
    fn homogeneous(&self, n: usize) -> Self {
        let mut out = Self::zero(self.order);
        for (e, c) in &self.coeffs {
            if e.0 + e.1 == n {
                out.add_term(*e, c.clone());
            }
        }
        out
    }

    /// Exponential, graded by total degree.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeff((0, 0)).is_zero() {
            return Err(SeriesError::NonZeroConstant);
        }
        let f: Vec<Self> = (0..=self.order).map(|n| self.homogeneous(n)).collect();
        let mut g = vec![Self::one(self.order)];
        for n in 1..=self.order {
            let mut acc = Self::zero(self.order);
            for k in 1..=n {
                acc = acc.add(&f[k].mul(&g[n - k]).scale(&q(k as i64)));
            }
            g.push(acc.scale(&Q::new(1.into(), (n as i64).into())));
        }
        Ok(g.iter().fold(Self::zero(self.order), |a, b| a.add(b)))
    }
}
