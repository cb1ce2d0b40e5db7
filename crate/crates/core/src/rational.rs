//! Exact rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number used everywhere in the crate.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// `base^exp` for a possibly negative exponent. Panics on `0^negative`.
pub fn pow_i(base: &Q, exp: i64) -> Q {
    let mut acc = Q::one();
    let b = if exp < 0 { base.recip() } else { base.clone() };
    for _ in 0..exp.unsigned_abs() {
        acc *= &b;
    }
    acc
}

pub fn factorial(n: u64) -> Q {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Q::from_integer(acc)
}

/// Renders `p/q`, or `p` when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `-p`, or `p/q`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

pub mod serde_q {
    //! Serializes rationals as exact strings.
    use super::{fmt_q, Q};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn vec<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(fmt_q))
    }

    pub fn opt_vec<S: Serializer>(xs: &Option<Vec<Q>>, s: S) -> Result<S::Ok, S::Error> {
        match xs {
            Some(v) => s.collect_seq(v.iter().map(fmt_q)),
            None => s.serialize_none(),
        }
    }

    pub fn mat<S: Serializer>(xs: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|r| r.iter().map(fmt_q).collect::<Vec<_>>()))
    }
}
