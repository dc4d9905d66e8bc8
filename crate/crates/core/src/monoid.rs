//! Effective monoids with most general equalizers (mge monoids).
//!
//! Four concrete instances are supported and may be nested through
//! [`MonoidDescriptor::Product`]:
//!
//! - the free monoid over a finite output alphabet (concatenation),
//! - non-negative rationals under addition,
//! - the additive group of integers,
//! - Cartesian products of the above.
//!
//! Every instance is *effective*: the operation, equality, the mge function
//! [`MgeMonoid::eta`] and inverses are computable. The n-ary accumulation
//! functions [`MgeMonoid::mu_n`] and [`MgeMonoid::gamma_n`] and right division
//! [`MgeMonoid::solve_right`] are written once against the [`MgeMonoid`]
//! contract and work for any instance.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("monoid kind mismatch: expected {expected}, found {found}")]
    DescriptorMismatch { expected: String, found: String },
    #[error("tuple is not equalizable")]
    NotEqualizable,
    #[error("accumulation needs at least one element")]
    EmptyTuple,
    #[error("invalid monoid literal `{literal}`: {reason}")]
    Literal { literal: String, reason: String },
}

/// The output alphabet of a free monoid. Symbols are single printable
/// characters; words store their indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutputAlphabet {
    symbols: Vec<char>,
}

impl OutputAlphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self, MonoidError> {
        let mut out: Vec<char> = Vec::new();
        for c in symbols {
            if !is_output_symbol(c) {
                return Err(MonoidError::Literal {
                    literal: c.to_string(),
                    reason: "not allowed as an output symbol".into(),
                });
            }
            if !out.contains(&c) {
                out.push(c);
            }
        }
        if out.is_empty() {
            return Err(MonoidError::Literal {
                literal: String::new(),
                reason: "free monoid needs a non-empty alphabet".into(),
            });
        }
        Ok(OutputAlphabet { symbols: out })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, index: u32) -> Option<char> {
        self.symbols.get(index as usize).copied()
    }

    pub fn index_of(&self, c: char) -> Option<u32> {
        self.symbols.iter().position(|&s| s == c).map(|i| i as u32)
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }
}

fn is_output_symbol(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '"' | '(' | ')' | ',' | '\\')
}

/// Describes which mge monoid a value lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MonoidDescriptor {
    Free(OutputAlphabet),
    NonNegRational,
    IntegerGroup,
    Product(Box<MonoidDescriptor>, Box<MonoidDescriptor>),
}

/// An element of one of the supported monoids.
///
/// Rationals are kept in lowest terms by `BigRational`; free words hold
/// interned symbol indices into the descriptor's [`OutputAlphabet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonoidValue {
    Word(Vec<u32>),
    Rational(BigRational),
    Integer(BigInt),
    Pair(Box<MonoidValue>, Box<MonoidValue>),
}

impl MonoidValue {
    pub fn word(symbols: impl Into<Vec<u32>>) -> Self {
        MonoidValue::Word(symbols.into())
    }

    pub fn empty_word() -> Self {
        MonoidValue::Word(Vec::new())
    }

    pub fn rational(numer: i64, denom: i64) -> Self {
        MonoidValue::Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn integer(value: i64) -> Self {
        MonoidValue::Integer(value.into())
    }

    pub fn pair(first: MonoidValue, second: MonoidValue) -> Self {
        MonoidValue::Pair(Box::new(first), Box::new(second))
    }

    fn kind_name(&self) -> String {
        match self {
            MonoidValue::Word(_) => "free".into(),
            MonoidValue::Rational(_) => "nnrat".into(),
            MonoidValue::Integer(_) => "intgrp".into(),
            MonoidValue::Pair(a, b) => format!("product({},{})", a.kind_name(), b.kind_name()),
        }
    }

    /// The unit of the monoid this value belongs to.
    pub fn unit_like(&self) -> MonoidValue {
        match self {
            MonoidValue::Word(_) => MonoidValue::Word(Vec::new()),
            MonoidValue::Rational(_) => MonoidValue::Rational(BigRational::zero()),
            MonoidValue::Integer(_) => MonoidValue::Integer(BigInt::zero()),
            MonoidValue::Pair(a, b) => MonoidValue::pair(a.unit_like(), b.unit_like()),
        }
    }

    pub fn is_unit(&self) -> bool {
        match self {
            MonoidValue::Word(w) => w.is_empty(),
            MonoidValue::Rational(r) => r.is_zero(),
            MonoidValue::Integer(i) => i.is_zero(),
            MonoidValue::Pair(a, b) => a.is_unit() && b.is_unit(),
        }
    }

    fn mismatch(&self, other: &MonoidValue) -> MonoidError {
        MonoidError::DescriptorMismatch {
            expected: self.kind_name(),
            found: other.kind_name(),
        }
    }

    fn op(&self, other: &MonoidValue) -> Result<MonoidValue, MonoidError> {
        Ok(match (self, other) {
            (MonoidValue::Word(a), MonoidValue::Word(b)) => {
                let mut w = Vec::with_capacity(a.len() + b.len());
                w.extend_from_slice(a);
                w.extend_from_slice(b);
                MonoidValue::Word(w)
            }
            (MonoidValue::Rational(a), MonoidValue::Rational(b)) => MonoidValue::Rational(a + b),
            (MonoidValue::Integer(a), MonoidValue::Integer(b)) => MonoidValue::Integer(a + b),
            (MonoidValue::Pair(a1, a2), MonoidValue::Pair(b1, b2)) => {
                MonoidValue::pair(a1.op(b1)?, a2.op(b2)?)
            }
            _ => return Err(self.mismatch(other)),
        })
    }

    fn eta(&self, other: &MonoidValue) -> Result<Option<(MonoidValue, MonoidValue)>, MonoidError> {
        if self == other {
            return Ok(Some((self.unit_like(), self.unit_like())));
        }
        Ok(match (self, other) {
            (MonoidValue::Word(u), MonoidValue::Word(v)) => {
                if let Some(rest) = v.strip_prefix(u.as_slice()) {
                    Some((MonoidValue::Word(rest.to_vec()), MonoidValue::Word(Vec::new())))
                } else if let Some(rest) = u.strip_prefix(v.as_slice()) {
                    Some((MonoidValue::Word(Vec::new()), MonoidValue::Word(rest.to_vec())))
                } else {
                    None
                }
            }
            (MonoidValue::Rational(m), MonoidValue::Rational(n)) => {
                let max = if m > n { m } else { n };
                Some((
                    MonoidValue::Rational(max - m),
                    MonoidValue::Rational(max - n),
                ))
            }
            // (e, h^-1 g): g + 0 = h + (g - h)
            (MonoidValue::Integer(g), MonoidValue::Integer(h)) => Some((
                MonoidValue::Integer(BigInt::zero()),
                MonoidValue::Integer(g - h),
            )),
            (MonoidValue::Pair(m1, n1), MonoidValue::Pair(m2, n2)) => {
                match (m1.eta(m2)?, n1.eta(n2)?) {
                    (Some((x1, x2)), Some((y1, y2))) => {
                        Some((MonoidValue::pair(x1, y1), MonoidValue::pair(x2, y2)))
                    }
                    _ => None,
                }
            }
            _ => return Err(self.mismatch(other)),
        })
    }

    fn inverse(&self) -> Option<MonoidValue> {
        match self {
            MonoidValue::Word(w) => w.is_empty().then(|| self.clone()),
            MonoidValue::Rational(r) => r.is_zero().then(|| self.clone()),
            MonoidValue::Integer(i) => Some(MonoidValue::Integer(-i)),
            MonoidValue::Pair(a, b) => Some(MonoidValue::pair(a.inverse()?, b.inverse()?)),
        }
    }
}

/// The contract of an effective mge monoid.
///
/// Implementors provide the operation, the unit, a computable mge function
/// and inverses. Equality is `Eq` on the element type. Right division and
/// the n-ary equalizer accumulation are derived from these.
pub trait MgeMonoid {
    type Elem: Clone + Eq + fmt::Debug;

    fn unit(&self) -> Self::Elem;

    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, MonoidError>;

    /// A most general equalizer of `(m1, m2)`, or `None` when the pair is not
    /// equalizable. `eta(m, m)` is always `(e, e)`.
    fn eta(
        &self,
        m1: &Self::Elem,
        m2: &Self::Elem,
    ) -> Result<Option<(Self::Elem, Self::Elem)>, MonoidError>;

    fn inverse(&self, m: &Self::Elem) -> Result<Option<Self::Elem>, MonoidError>;

    fn is_unit(&self, m: &Self::Elem) -> bool {
        *m == self.unit()
    }

    /// The unique `c` with `m ∘ c = n`, if it exists.
    fn solve_right(
        &self,
        m: &Self::Elem,
        n: &Self::Elem,
    ) -> Result<Option<Self::Elem>, MonoidError> {
        let Some((x1, x2)) = self.eta(m, n)? else {
            return Ok(None);
        };
        match self.inverse(&x2)? {
            Some(inv) => self.op(&x1, &inv).map(Some),
            None => Ok(None),
        }
    }

    /// Whether `xs` equalizes `ms`, i.e. all `ms[i] ∘ xs[i]` coincide.
    fn is_equalizer(&self, ms: &[Self::Elem], xs: &[Self::Elem]) -> Result<bool, MonoidError> {
        if ms.len() != xs.len() {
            return Ok(false);
        }
        let mut first: Option<Self::Elem> = None;
        for (m, x) in ms.iter().zip(xs) {
            let v = self.op(m, x)?;
            match &first {
                None => first = Some(v),
                Some(f) if *f != v => return Ok(false),
                Some(_) => {}
            }
        }
        Ok(true)
    }

    /// Whether `ys = (xs[0] ∘ c, …, xs[n-1] ∘ c)` for some common `c`.
    fn is_instance(&self, ys: &[Self::Elem], xs: &[Self::Elem]) -> Result<bool, MonoidError> {
        if ys.len() != xs.len() {
            return Ok(false);
        }
        let Some((x0, y0)) = xs.first().zip(ys.first()) else {
            return Ok(true);
        };
        let Some(c) = self.solve_right(x0, y0)? else {
            return Ok(false);
        };
        for (x, y) in xs.iter().zip(ys) {
            if self.op(x, &c)? != *y {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Most general equalizer of a whole tuple, built from pairwise mges:
    /// `mu(m) = e`, `mu(m1, m2) = eta(m1, m2)` and each further element is
    /// joined by equalizing the last accumulated component against the
    /// pairwise mge of the last two elements.
    fn mu_n(&self, ms: &[Self::Elem]) -> Result<Option<Vec<Self::Elem>>, MonoidError> {
        match ms.len() {
            0 => Err(MonoidError::EmptyTuple),
            1 => Ok(Some(vec![self.unit()])),
            n => {
                let Some(mut acc) = self.mu_n(&ms[..n - 1])? else {
                    return Ok(None);
                };
                let Some((y_prev, y_last)) = self.eta(&ms[n - 2], &ms[n - 1])? else {
                    return Ok(None);
                };
                let Some((zx, zy)) = self.eta(&acc[n - 2], &y_prev)? else {
                    return Ok(None);
                };
                for x in acc.iter_mut() {
                    *x = self.op(x, &zx)?;
                }
                acc.push(self.op(&y_last, &zy)?);
                Ok(Some(acc))
            }
        }
    }

    /// Equalizer accumulation over a chain of pairwise mges
    /// `eta(m1, m2), …, eta(m_{k-1}, m_k)`; returns `k` components.
    ///
    /// Fails with [`MonoidError::NotEqualizable`] if an intermediate pair has
    /// no mge (the chain did not come from an equalizable tuple).
    fn gamma_n(
        &self,
        pairs: &[(Self::Elem, Self::Elem)],
    ) -> Result<Vec<Self::Elem>, MonoidError> {
        let Some(((first, second), rest)) = pairs.split_first() else {
            return Ok(vec![self.unit()]);
        };
        let mut acc = vec![first.clone(), second.clone()];
        for (x1, x2) in rest {
            let last = acc.last().expect("accumulator is never empty");
            let (e1, e2) = self.eta(last, x1)?.ok_or(MonoidError::NotEqualizable)?;
            for y in acc.iter_mut() {
                *y = self.op(y, &e1)?;
            }
            acc.push(self.op(x2, &e2)?);
        }
        Ok(acc)
    }
}

impl MonoidDescriptor {
    pub fn free(symbols: &str) -> Result<Self, MonoidError> {
        Ok(MonoidDescriptor::Free(OutputAlphabet::new(symbols.chars())?))
    }

    pub fn product(first: MonoidDescriptor, second: MonoidDescriptor) -> Self {
        MonoidDescriptor::Product(Box::new(first), Box::new(second))
    }

    /// Whether `value` is a well-formed element of this monoid: matching
    /// kinds, in-alphabet symbols, non-negative rationals.
    pub fn contains(&self, value: &MonoidValue) -> bool {
        match (self, value) {
            (MonoidDescriptor::Free(alpha), MonoidValue::Word(w)) => {
                w.iter().all(|&s| (s as usize) < alpha.len())
            }
            (MonoidDescriptor::NonNegRational, MonoidValue::Rational(r)) => !r.is_negative(),
            (MonoidDescriptor::IntegerGroup, MonoidValue::Integer(_)) => true,
            (MonoidDescriptor::Product(d1, d2), MonoidValue::Pair(a, b)) => {
                d1.contains(a) && d2.contains(b)
            }
            _ => false,
        }
    }

    fn check(&self, value: &MonoidValue) -> Result<(), MonoidError> {
        if self.same_kind(value) {
            Ok(())
        } else {
            Err(MonoidError::DescriptorMismatch {
                expected: self.to_string(),
                found: value.kind_name(),
            })
        }
    }

    fn same_kind(&self, value: &MonoidValue) -> bool {
        match (self, value) {
            (MonoidDescriptor::Free(_), MonoidValue::Word(_))
            | (MonoidDescriptor::NonNegRational, MonoidValue::Rational(_))
            | (MonoidDescriptor::IntegerGroup, MonoidValue::Integer(_)) => true,
            (MonoidDescriptor::Product(d1, d2), MonoidValue::Pair(a, b)) => {
                d1.same_kind(a) && d2.same_kind(b)
            }
            _ => false,
        }
    }

    /// Parses a descriptor literal: `free:<alphabet>`, `nnrat`, `intgrp` or
    /// `product(<d1>,<d2>)`.
    pub fn parse(literal: &str) -> Result<Self, MonoidError> {
        let mut cursor = Cursor::new(literal);
        let d = cursor.descriptor()?;
        cursor.finish()?;
        Ok(d)
    }

    /// Parses a value literal of this monoid.
    pub fn parse_value(&self, literal: &str) -> Result<MonoidValue, MonoidError> {
        let mut cursor = Cursor::new(literal);
        let v = cursor.value(self)?;
        cursor.finish()?;
        Ok(v)
    }

    /// Renders a value in the literal syntax accepted by [`Self::parse_value`].
    pub fn display<'a>(&'a self, value: &'a MonoidValue) -> DisplayValue<'a> {
        DisplayValue {
            descriptor: self,
            value,
        }
    }

    /// Parses a plain string of output symbols into a word.
    pub fn word_from_str(&self, s: &str) -> Result<MonoidValue, MonoidError> {
        match self {
            MonoidDescriptor::Free(alpha) => s
                .chars()
                .map(|c| {
                    alpha.index_of(c).ok_or_else(|| MonoidError::Literal {
                        literal: s.to_string(),
                        reason: format!("symbol `{c}` is not in the output alphabet"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(MonoidValue::Word),
            other => Err(MonoidError::DescriptorMismatch {
                expected: other.to_string(),
                found: "free".into(),
            }),
        }
    }
}

impl MgeMonoid for MonoidDescriptor {
    type Elem = MonoidValue;

    fn unit(&self) -> MonoidValue {
        match self {
            MonoidDescriptor::Free(_) => MonoidValue::Word(Vec::new()),
            MonoidDescriptor::NonNegRational => MonoidValue::Rational(BigRational::zero()),
            MonoidDescriptor::IntegerGroup => MonoidValue::Integer(BigInt::zero()),
            MonoidDescriptor::Product(a, b) => MonoidValue::pair(a.unit(), b.unit()),
        }
    }

    fn op(&self, a: &MonoidValue, b: &MonoidValue) -> Result<MonoidValue, MonoidError> {
        self.check(a)?;
        self.check(b)?;
        a.op(b)
    }

    fn eta(
        &self,
        m1: &MonoidValue,
        m2: &MonoidValue,
    ) -> Result<Option<(MonoidValue, MonoidValue)>, MonoidError> {
        self.check(m1)?;
        self.check(m2)?;
        m1.eta(m2)
    }

    fn inverse(&self, m: &MonoidValue) -> Result<Option<MonoidValue>, MonoidError> {
        self.check(m)?;
        Ok(m.inverse())
    }

    fn is_unit(&self, m: &MonoidValue) -> bool {
        self.same_kind(m) && m.is_unit()
    }
}

impl fmt::Display for MonoidDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonoidDescriptor::Free(alpha) => {
                write!(f, "free:")?;
                alpha.symbols.iter().try_for_each(|c| write!(f, "{c}"))
            }
            MonoidDescriptor::NonNegRational => write!(f, "nnrat"),
            MonoidDescriptor::IntegerGroup => write!(f, "intgrp"),
            MonoidDescriptor::Product(a, b) => write!(f, "product({a},{b})"),
        }
    }
}

pub struct DisplayValue<'a> {
    descriptor: &'a MonoidDescriptor,
    value: &'a MonoidValue,
}

impl fmt::Display for DisplayValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.descriptor, self.value) {
            (MonoidDescriptor::Free(alpha), MonoidValue::Word(w)) => {
                write!(f, "\"")?;
                for &s in w {
                    match alpha.symbol(s) {
                        Some(c) => write!(f, "{c}")?,
                        None => write!(f, "?")?,
                    }
                }
                write!(f, "\"")
            }
            (MonoidDescriptor::Product(d1, d2), MonoidValue::Pair(a, b)) => {
                write!(f, "({},{})", d1.display(a), d2.display(b))
            }
            (_, v) => write!(f, "{}", RawValue(v)),
        }
    }
}

struct RawValue<'a>(&'a MonoidValue);

impl fmt::Display for RawValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            MonoidValue::Word(w) => write!(f, "{w:?}"),
            MonoidValue::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            MonoidValue::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            MonoidValue::Integer(i) => write!(f, "{i}"),
            MonoidValue::Pair(a, b) => write!(f, "({},{})", RawValue(a), RawValue(b)),
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn err(&self, reason: impl Into<String>) -> MonoidError {
        MonoidError::Literal {
            literal: self.src.to_string(),
            reason: reason.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn expect(&mut self, want: char) -> Result<(), MonoidError> {
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => Err(self.err(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.err(format!("expected `{want}`, found end of input"))),
        }
    }

    fn eat(&mut self, keyword: &str) -> bool {
        if self.rest().starts_with(keyword) {
            self.pos += keyword.len();
            true
        } else {
            false
        }
    }

    fn finish(&self) -> Result<(), MonoidError> {
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.err(format!("trailing input `{}`", self.rest())))
        }
    }

    fn descriptor(&mut self) -> Result<MonoidDescriptor, MonoidError> {
        if self.eat("free:") {
            let start = self.pos;
            while let Some(c) = self.peek() {
                if !is_output_symbol(c) {
                    break;
                }
                self.bump();
            }
            let symbols = &self.src[start..self.pos];
            OutputAlphabet::new(symbols.chars())
                .map(MonoidDescriptor::Free)
                .map_err(|_| self.err("free monoid needs a non-empty alphabet"))
        } else if self.eat("nnrat") {
            Ok(MonoidDescriptor::NonNegRational)
        } else if self.eat("intgrp") {
            Ok(MonoidDescriptor::IntegerGroup)
        } else if self.eat("product(") {
            let a = self.descriptor()?;
            self.expect(',')?;
            let b = self.descriptor()?;
            self.expect(')')?;
            Ok(MonoidDescriptor::product(a, b))
        } else {
            Err(self.err("unknown monoid descriptor"))
        }
    }

    fn digits(&mut self) -> Result<BigInt, MonoidError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let s = &self.src[start..self.pos];
        if s.is_empty() {
            return Err(self.err("expected digits"));
        }
        s.parse().map_err(|_| self.err("bad number"))
    }

    fn value(&mut self, d: &MonoidDescriptor) -> Result<MonoidValue, MonoidError> {
        match d {
            MonoidDescriptor::Free(alpha) => {
                self.expect('"')?;
                let mut w = Vec::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some(c) => w.push(
                            alpha
                                .index_of(c)
                                .ok_or_else(|| self.err(format!("symbol `{c}` not in alphabet")))?,
                        ),
                        None => return Err(self.err("unterminated word")),
                    }
                }
                Ok(MonoidValue::Word(w))
            }
            MonoidDescriptor::NonNegRational => {
                if self.peek() == Some('-') {
                    return Err(self.err("rational weights must be non-negative"));
                }
                let p = self.digits()?;
                let q = if self.peek() == Some('/') {
                    self.bump();
                    self.digits()?
                } else {
                    BigInt::from(1)
                };
                if q.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                Ok(MonoidValue::Rational(BigRational::new(p, q)))
            }
            MonoidDescriptor::IntegerGroup => {
                let neg = match self.peek() {
                    Some('-') => {
                        self.bump();
                        true
                    }
                    Some('+') => {
                        self.bump();
                        false
                    }
                    _ => false,
                };
                let v = self.digits()?;
                Ok(MonoidValue::Integer(if neg { -v } else { v }))
            }
            MonoidDescriptor::Product(d1, d2) => {
                self.expect('(')?;
                let a = self.value(d1)?;
                self.expect(',')?;
                let b = self.value(d2)?;
                self.expect(')')?;
                Ok(MonoidValue::pair(a, b))
            }
        }
    }
}
