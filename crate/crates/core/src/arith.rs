//! Exact rationals and affine functions of the radius parameter `r`.
//!
//! Every radius-dependent length in the certifier is of the form `a·r + b`.
//! Because such a function is monotone, its sign over an interval is decided
//! by its values (or limits) at the two endpoints, which is what
//! [`AffR::cmp_on`] does.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    /// Panics when `den == 0`; use [`Rat::try_new`] for untrusted input.
    pub fn new(num: i64, den: i64) -> Rat {
        Rat::try_new(num, den).expect("zero denominator")
    }

    pub fn try_new(num: i64, den: i64) -> Result<Rat> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(BigRational::new(num.into(), den.into())))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Rat> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(BigRational::new(num, den)))
    }

    pub fn int(n: i64) -> Rat {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn checked_div(&self, other: &Rat) -> Result<Rat> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(&self.0 / &other.0))
    }

    pub fn recip(&self) -> Result<Rat> {
        Rat::one().checked_div(self)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn midpoint(&self, other: &Rat) -> Rat {
        (self + other) * Rat::new(1, 2)
    }

    /// Approximate decimal rendering for human-facing columns only.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        format!("{:.*}", digits, self.to_f64())
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Rat {
        Rat(BigRational::from_integer(n))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_bigint(s: &str, whole: &str) -> Result<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a rational: {whole:?}")));
    }
    s.parse::<BigInt>().map_err(|_| Error::Parse(format!("not a rational: {whole:?}")))
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `p`, `p/q`, with an optional leading `-`, `+` or U+2212.
    fn from_str(s: &str) -> Result<Rat> {
        let t = s.trim();
        let (neg, body) = if let Some(rest) = t.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = t.strip_prefix('\u{2212}') {
            (true, rest)
        } else if let Some(rest) = t.strip_prefix('+') {
            (false, rest)
        } else {
            (false, t)
        };
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (parse_bigint(n.trim(), s)?, parse_bigint(d.trim(), s)?),
            None => (parse_bigint(body, s)?, BigInt::one()),
        };
        let num = if neg { -num } else { num };
        Rat::from_bigints(num, den)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Rat, D::Error> {
        struct RatVisitor;
        impl serde::de::Visitor<'_> for RatVisitor {
            type Value = Rat;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Rat, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Rat, E> {
                Ok(Rat::int(v))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Rat, E> {
                Ok(Rat::from(BigInt::from(v)))
            }
        }
        deserializer.deserialize_any(RatVisitor)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0 $op rhs.0)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0 $op &rhs.0)
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(&self.0 $op rhs.0)
            }
        }
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(&self.0 $op &rhs.0)
            }
        }
    };
}

rat_binop!(Add, add, +);
rat_binop!(Sub, sub, -);
rat_binop!(Mul, mul, *);

// Panics on a zero divisor, like integer division; `checked_div` is the
// fallible form.
impl Div<&Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        &self / &rhs
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// `a·r + b`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffR {
    pub a: Rat,
    pub b: Rat,
}

impl AffR {
    pub fn new(a: Rat, b: Rat) -> AffR {
        AffR { a, b }
    }

    pub fn constant(b: Rat) -> AffR {
        AffR { a: Rat::zero(), b }
    }

    /// The identity `r`.
    pub fn r() -> AffR {
        AffR { a: Rat::one(), b: Rat::zero() }
    }

    pub fn zero() -> AffR {
        AffR::constant(Rat::zero())
    }

    /// Shorthand for `(a_num/a_den)·r + (b_num/b_den)` used by the fixed
    /// region formulas.
    pub fn q(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> AffR {
        AffR::new(Rat::new(a_num, a_den), Rat::new(b_num, b_den))
    }

    pub fn is_constant(&self) -> bool {
        self.a.is_zero()
    }

    pub fn eval(&self, r: &Rat) -> Rat {
        &self.a * r + &self.b
    }

    pub fn scale(&self, k: &Rat) -> AffR {
        AffR { a: &self.a * k, b: &self.b * k }
    }

    /// Zero of the function, if it is not constant.
    pub fn root(&self) -> Option<Rat> {
        if self.a.is_zero() {
            None
        } else {
            Some(&(-&self.b) / &self.a)
        }
    }

    /// Exact comparison of `self` against `other` for every `r` in `iv`.
    pub fn cmp_on(&self, other: &AffR, iv: &RInterval) -> Verdict {
        let d = self - other;
        if d.strictly_negative_on(iv) {
            Verdict::AlwaysLess
        } else if d.nonpositive_on(iv) {
            Verdict::AlwaysLeq
        } else if (-&d).strictly_negative_on(iv) {
            Verdict::AlwaysGreater
        } else if (-&d).nonpositive_on(iv) {
            Verdict::AlwaysGeq
        } else {
            Verdict::Mixed
        }
    }

    /// `|self|` resolved over `iv`. Fails with the sign-change root when the
    /// function takes both signs inside the interval.
    pub fn abs_on(&self, iv: &RInterval) -> Result<AffR> {
        if (-self).nonpositive_on(iv) {
            Ok(self.clone())
        } else if self.nonpositive_on(iv) {
            Ok(-self)
        } else {
            // a nonconstant function with both signs has a root inside
            let root = self.root().expect("constant function cannot change sign");
            Err(Error::MixedSign { root })
        }
    }

    // sup over the interval is the larger endpoint value; it is attained
    // at closed endpoints and only approached at open ones
    fn nonpositive_on(&self, iv: &RInterval) -> bool {
        !self.eval(&iv.lo).is_positive() && !self.eval(&iv.hi).is_positive()
    }

    fn strictly_negative_on(&self, iv: &RInterval) -> bool {
        if self.a.is_zero() {
            return self.b.is_negative();
        }
        let ok = |v: Rat, open: bool| v.is_negative() || (open && v.is_zero());
        ok(self.eval(&iv.lo), iv.lo_open) && ok(self.eval(&iv.hi), iv.hi_open)
    }
}

impl From<Rat> for AffR {
    fn from(b: Rat) -> AffR {
        AffR::constant(b)
    }
}

impl fmt::Display for AffR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn coef(a: &Rat) -> String {
            let m = a.abs();
            if m == Rat::one() {
                "r".to_string()
            } else if m.denom() == &BigInt::one() {
                format!("{m}r")
            } else {
                format!("({m})r")
            }
        }
        if self.a.is_zero() {
            return write!(f, "{}", self.b);
        }
        let rterm = coef(&self.a);
        if self.b.is_zero() {
            let sign = if self.a.is_negative() { "-" } else { "" };
            return write!(f, "{sign}{rterm}");
        }
        if self.a.is_negative() && self.b.is_positive() {
            write!(f, "{}-{}", self.b, rterm)
        } else {
            let sign = if self.a.is_negative() { "-" } else { "" };
            let op = if self.b.is_negative() { "-" } else { "+" };
            write!(f, "{sign}{rterm}{op}{}", self.b.abs())
        }
    }
}

impl fmt::Debug for AffR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffR({self})")
    }
}

impl Add<&AffR> for &AffR {
    type Output = AffR;
    fn add(self, rhs: &AffR) -> AffR {
        AffR { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl Add<AffR> for AffR {
    type Output = AffR;
    fn add(self, rhs: AffR) -> AffR {
        &self + &rhs
    }
}

impl Sub<&AffR> for &AffR {
    type Output = AffR;
    fn sub(self, rhs: &AffR) -> AffR {
        AffR { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl Sub<AffR> for AffR {
    type Output = AffR;
    fn sub(self, rhs: AffR) -> AffR {
        &self - &rhs
    }
}

impl Neg for &AffR {
    type Output = AffR;
    fn neg(self) -> AffR {
        AffR { a: -&self.a, b: -&self.b }
    }
}

impl Neg for AffR {
    type Output = AffR;
    fn neg(self) -> AffR {
        -&self
    }
}

impl Sum for AffR {
    fn sum<I: Iterator<Item = AffR>>(iter: I) -> AffR {
        iter.fold(AffR::zero(), |acc, x| acc + x)
    }
}

/// Outcome of comparing two affine functions over a whole interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AlwaysLess,
    AlwaysLeq,
    AlwaysGreater,
    AlwaysGeq,
    Mixed,
}

/// Interval of radii with independently open or closed endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RInterval {
    lo: Rat,
    hi: Rat,
    lo_open: bool,
    hi_open: bool,
}

impl RInterval {
    pub fn new(lo: Rat, hi: Rat, lo_open: bool, hi_open: bool) -> Result<RInterval> {
        match lo.cmp(&hi) {
            Ordering::Less => {}
            Ordering::Equal if !lo_open && !hi_open => {}
            _ => {
                return Err(Error::InvalidInterval(format!(
                    "{}{lo},{hi}{} is empty",
                    if lo_open { '(' } else { '[' },
                    if hi_open { ')' } else { ']' }
                )))
            }
        }
        Ok(RInterval { lo, hi, lo_open, hi_open })
    }

    /// `(lo, hi]`, the shape of every interval in the case analysis.
    pub fn open_closed(lo: Rat, hi: Rat) -> Result<RInterval> {
        RInterval::new(lo, hi, true, false)
    }

    pub fn point(r: Rat) -> RInterval {
        RInterval { lo: r.clone(), hi: r, lo_open: false, hi_open: false }
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    pub fn contains(&self, r: &Rat) -> bool {
        let above = if self.lo_open { r > &self.lo } else { r >= &self.lo };
        let below = if self.hi_open { r < &self.hi } else { r <= &self.hi };
        above && below
    }

    /// True when every member of `self` is a member of `other`.
    pub fn is_subset_of(&self, other: &RInterval) -> bool {
        let lo_ok = match self.lo.cmp(&other.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_open || !other.lo_open,
            Ordering::Less => false,
        };
        let hi_ok = match self.hi.cmp(&other.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_open || !other.hi_open,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    pub fn midpoint(&self) -> Rat {
        self.lo.midpoint(&self.hi)
    }

    /// Endpoints and midpoint, deduplicated. Open endpoints are included:
    /// the objects sampled there depend continuously on `r`.
    pub fn sample_radii(&self) -> Vec<Rat> {
        let mut out = vec![self.lo.clone(), self.midpoint(), self.hi.clone()];
        out.dedup();
        out
    }

    /// Parses the grammar `(lo,hi]`, `[lo,hi]`, `(lo,hi)`, `[lo,hi)` and
    /// rejects `hi <= lo`.
    pub fn parse(s: &str) -> Result<RInterval> {
        let (lo, hi, lo_open, hi_open) = split_interval(s)?;
        if hi <= lo {
            return Err(Error::InvalidInterval(format!("{s:?}: upper end must exceed lower end")));
        }
        RInterval::new(lo, hi, lo_open, hi_open)
    }
}

fn split_interval(s: &str) -> Result<(Rat, Rat, bool, bool)> {
    let t = s.trim();
    let bad = || Error::InvalidInterval(format!("{s:?}: expected (lo,hi], [lo,hi], (lo,hi) or [lo,hi)"));
    let mut chars = t.chars();
    let first = chars.next().ok_or_else(bad)?;
    let last = chars.next_back().ok_or_else(bad)?;
    let lo_open = match first {
        '(' => true,
        '[' => false,
        _ => return Err(bad()),
    };
    let hi_open = match last {
        ')' => true,
        ']' => false,
        _ => return Err(bad()),
    };
    let inner = chars.as_str();
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    if b.contains(',') {
        return Err(bad());
    }
    Ok((a.parse()?, b.parse()?, lo_open, hi_open))
}

impl FromStr for RInterval {
    type Err = Error;
    fn from_str(s: &str) -> Result<RInterval> {
        RInterval::parse(s)
    }
}

impl fmt::Display for RInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

impl fmt::Debug for RInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for RInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RInterval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<RInterval, D::Error> {
        let s = String::deserialize(deserializer)?;
        // certificates may carry degenerate [a,a] intervals
        let (lo, hi, lo_open, hi_open) = split_interval(&s).map_err(serde::de::Error::custom)?;
        RInterval::new(lo, hi, lo_open, hi_open).map_err(serde::de::Error::custom)
    }
}
