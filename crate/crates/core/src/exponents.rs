//! Exact exponent arithmetic.
//!
//! Every exponent is stored through its reciprocal, a rational in `[0, 1]`,
//! so `p = ∞` is the exact value `0` and the relations between `p`, `p'`,
//! `s` and `r` are evaluated without floating point:
//!
//! ```text
//!   1/s = 1 + |1/2 - 1/p|        1/r = 1/s - 1 = |1/p - 1/2|
//! ```
//!
//! Exponents print and parse as `"7/3"`, `"2"` or `"inf"` (case-insensitive).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

type Q = Ratio<i64>;

/// Largest numerator or denominator accepted by the parser.
pub const MAX_COMPONENT: i64 = 1_000_000;

fn half() -> Q {
    Q::new(1, 2)
}

/// A Lebesgue exponent `p ∈ [1, ∞]`, held as its reciprocal.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    recip: Q,
}

impl Exponent {
    pub const INFINITY: Exponent = Exponent {
        recip: Q::new_raw(0, 1),
    };
    pub const ONE: Exponent = Exponent {
        recip: Q::new_raw(1, 1),
    };
    pub const TWO: Exponent = Exponent {
        recip: Q::new_raw(1, 2),
    };

    /// Builds `p` from its reciprocal, which must lie in `[0, 1]`.
    pub fn from_reciprocal(recip: Q) -> Result<Self> {
        if recip.is_negative() || recip > Q::one() {
            return Err(Error::InvalidExponent(format!("reciprocal {recip}")));
        }
        Ok(Exponent { recip })
    }

    /// Builds a finite exponent `p = value ≥ 1`.
    pub fn finite(value: Q) -> Result<Self> {
        if value < Q::one() {
            return Err(Error::InvalidExponent(value.to_string()));
        }
        Ok(Exponent {
            recip: value.recip(),
        })
    }

    pub fn integer(value: i64) -> Result<Self> {
        Self::finite(Q::from_integer(value))
    }

    pub fn reciprocal(&self) -> Q {
        self.recip
    }

    pub fn is_infinite(&self) -> bool {
        self.recip.is_zero()
    }

    /// The finite value of `p`, or `None` for `∞`.
    pub fn value(&self) -> Option<Q> {
        (!self.is_infinite()).then(|| self.recip.recip())
    }

    pub fn to_f64(&self) -> f64 {
        match self.value() {
            Some(v) => v.to_f64().unwrap_or(f64::INFINITY),
            None => f64::INFINITY,
        }
    }

    /// The conjugate exponent `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(&self) -> Exponent {
        Exponent {
            recip: Q::one() - self.recip,
        }
    }

    /// `max(p, p')`, which is always `≥ 2`.
    pub fn reduce_to_p_ge_2(&self) -> Exponent {
        if self.recip > half() {
            self.conjugate()
        } else {
            *self
        }
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        other.recip.cmp(&self.recip)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exponent({self})")
    }
}

fn parse_rational(text: &str) -> Result<Q> {
    let bad = || Error::InvalidExponent(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 || num.abs() > MAX_COMPONENT || den.abs() > MAX_COMPONENT {
        return Err(bad());
    }
    Ok(Q::new(num, den))
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        if matches!(
            text.to_ascii_lowercase().as_str(),
            "inf" | "infinity" | "∞"
        ) {
            return Ok(Exponent::INFINITY);
        }
        Exponent::finite(parse_rational(text)?)
            .map_err(|_| Error::InvalidExponent(text.to_string()))
    }
}

/// The order `s ∈ (0, 1]` of a nuclear representation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderExponent {
    value: Q,
}

impl OrderExponent {
    pub const ONE: OrderExponent = OrderExponent {
        value: Q::new_raw(1, 1),
    };

    pub fn new(value: Q) -> Result<Self> {
        if !value.is_positive() || value > Q::one() {
            return Err(Error::InvalidExponent(format!("order {value}")));
        }
        Ok(OrderExponent { value })
    }

    pub fn value(&self) -> Q {
        self.value
    }

    pub fn reciprocal(&self) -> Q {
        self.value.recip()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().expect("order exponent is a small rational")
    }
}

impl fmt::Display for OrderExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for OrderExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrderExponent({self})")
    }
}

impl FromStr for OrderExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OrderExponent::new(parse_rational(s.trim())?)
    }
}

/// `s` with `1/s = 1 + |1/2 - 1/p|`.
pub fn s_from_p(p: Exponent) -> OrderExponent {
    let inv_s = Q::one() + (half() - p.reciprocal()).abs();
    OrderExponent {
        value: inv_s.recip(),
    }
}

/// `r` with `1/r = 1/s - 1`; `s = 1` gives `r = ∞`.
pub fn r_from_s(s: OrderExponent) -> Exponent {
    Exponent {
        recip: s.reciprocal() - Q::one(),
    }
}

pub fn conjugate(p: Exponent) -> Exponent {
    p.conjugate()
}

pub fn reduce_to_p_ge_2(p: Exponent) -> Exponent {
    p.reduce_to_p_ge_2()
}

/// True iff the reciprocals of `exps` sum to exactly one.
pub fn check_holder_chain(exps: &[Exponent]) -> bool {
    let sum = exps.iter().fold(BigRational::zero(), |acc, e| {
        let r = e.reciprocal();
        acc + BigRational::new((*r.numer()).into(), (*r.denom()).into())
    });
    sum.is_one()
}

/// The exponent triple `(p, s, r)` tied together by
/// `1/s = 1 + |1/2 - 1/p|` and `1/r = 1/s - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParameterTriple {
    pub p: Exponent,
    pub s: OrderExponent,
    pub r: Exponent,
}

impl ParameterTriple {
    /// The triple for `p` as given, without duality reduction.
    pub fn for_p(p: Exponent) -> Self {
        let s = s_from_p(p);
        ParameterTriple { p, s, r: r_from_s(s) }
    }

    /// `(1 - s)·r = s` for finite `r`, and `s = 1` iff `r = ∞`.
    pub fn budget_identity_holds(&self) -> bool {
        match self.r.value() {
            Some(r) => (Q::one() - self.s.value()) * r == self.s.value(),
            None => self.s.value().is_one(),
        }
    }
}

/// Reduces `p` to `max(p, p')` and returns its exact triple.
pub fn exponent_budget(p: Exponent) -> ParameterTriple {
    ParameterTriple::for_p(p.reduce_to_p_ge_2())
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl Serialize for OrderExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct ExponentVisitor<T>(std::marker::PhantomData<T>);

impl<T: FromStr<Err = Error>> Visitor<'_> for ExponentVisitor<T> {
    type Value = T;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an exponent such as \"7/3\", \"2\", \"inf\", or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<T, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<T, E> {
        self.visit_str(&v.to_string())
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<T, E> {
        self.visit_str(&v.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(ExponentVisitor(std::marker::PhantomData))
    }
}

impl<'de> Deserialize<'de> for OrderExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(ExponentVisitor(std::marker::PhantomData))
    }
}
