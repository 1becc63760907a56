//! Countable ordinals below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `w^e1*c1 + ... + w^ek*ck` with strictly
//! decreasing exponents (themselves ordinals) and positive coefficients.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseError;

/// Cantor-normal-form ordinal. The empty term list is zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Ordinal {
    terms: Vec<(Ordinal, u64)>,
}

/// Outcome of [`Ordinal::classify`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OrdinalKind {
    Zero,
    Successor(Ordinal),
    Limit,
}

/// Cantor pairing `(i+j)(i+j+1)/2 + j`.
pub fn pair(i: u64, j: u64) -> u64 {
    let s = i + j;
    s * (s + 1) / 2 + j
}

/// Inverse of [`pair`].
pub fn unpair(n: u64) -> (u64, u64) {
    // Largest s with s(s+1)/2 <= n.
    let mut s = (((8.0 * n as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while s * (s + 1) / 2 > n {
        s -= 1;
    }
    while (s + 1) * (s + 2) / 2 <= n {
        s += 1;
    }
    let j = n - s * (s + 1) / 2;
    (s - j, j)
}

/// Surjection `N -> N` with every fiber infinite: the first projection of [`unpair`].
pub fn infinite_fiber_map(n: u64) -> u64 {
    unpair(n).0
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![(Self::zero(), n)] }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::nat(1))
    }

    /// `w^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Self::monomial(e, 1)
    }

    /// `w^e * c`; zero when `c == 0`.
    pub fn monomial(e: Ordinal, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![(e, c)] }
        }
    }

    /// Builds from terms, checking the normal-form invariants.
    pub fn from_terms(terms: Vec<(Ordinal, u64)>) -> Result<Self, String> {
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err("exponents must strictly decrease".into());
            }
        }
        if terms.iter().any(|t| t.1 == 0) {
            return Err("coefficients must be positive".into());
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[(Ordinal, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(n)` when the ordinal is finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.classify(), OrdinalKind::Limit)
    }

    pub fn classify(&self) -> OrdinalKind {
        match self.terms.last() {
            None => OrdinalKind::Zero,
            Some((e, c)) if e.is_zero() => {
                let mut t = self.terms.clone();
                if *c == 1 {
                    t.pop();
                } else {
                    t.last_mut().unwrap().1 = c - 1;
                }
                OrdinalKind::Successor(Ordinal { terms: t })
            }
            Some(_) => OrdinalKind::Limit,
        }
    }

    pub fn succ(&self) -> Self {
        self.add(&Self::nat(1))
    }

    /// Ordinal sum `self + other`.
    pub fn add(&self, other: &Ordinal) -> Self {
        let Some((lead, _)) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(Ordinal, u64)> =
            self.terms.iter().filter(|(e, _)| e >= lead).cloned().collect();
        let mut rest = other.terms.iter();
        if let Some(last) = terms.last_mut() {
            if &last.0 == lead {
                last.1 += other.terms[0].1;
                rest.next();
            }
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    /// Splits a nonzero ordinal as `gamma + w^e`, returning `(gamma, e)`.
    fn split_last(&self) -> Option<(Ordinal, Ordinal)> {
        let (e, c) = self.terms.last()?.clone();
        let mut t = self.terms.clone();
        if c == 1 {
            t.pop();
        } else {
            t.last_mut().unwrap().1 = c - 1;
        }
        Some((Ordinal { terms: t }, e))
    }

    /// Deterministic bijection from `N` onto the ordinals below a limit `self`.
    pub fn enumerate_below(&self, n: u64) -> Result<Ordinal, String> {
        if !self.is_limit() {
            return Err(format!("{self} is not a limit ordinal"));
        }
        Ok(enum_limit(self, n))
    }
}

fn enum_limit(alpha: &Ordinal, n: u64) -> Ordinal {
    let (gamma, e) = alpha.split_last().expect("limit is nonzero");
    if gamma.is_zero() {
        enum_power(&e, n)
    } else if n.is_multiple_of(2) {
        enum_limit(&gamma, n / 2)
    } else {
        gamma.add(&enum_power(&e, (n - 1) / 2))
    }
}

/// Bijection from `N` onto `[0, w^e)` for `e >= 1`.
fn enum_power(e: &Ordinal, n: u64) -> Ordinal {
    match e.classify() {
        OrdinalKind::Zero => Ordinal::zero(),
        OrdinalKind::Successor(p) if p.is_zero() => Ordinal::nat(n),
        OrdinalKind::Successor(p) => {
            let (k, j) = unpair(n);
            Ordinal::monomial(p.clone(), k).add(&enum_power(&p, j))
        }
        OrdinalKind::Limit => {
            if n == 0 {
                return Ordinal::zero();
            }
            let (i, rest) = unpair(n - 1);
            let ep = enum_limit(e, i);
            if ep.is_zero() {
                Ordinal::nat(rest + 1)
            } else {
                let (c, j) = unpair(rest);
                Ordinal::monomial(ep.clone(), c + 1).add(&enum_power(&ep, j))
            }
        }
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            match a.0.cmp(&b.0).then(a.1.cmp(&b.1)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order on ordinals.
pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            write!(f, "w")?;
            if *e != Ordinal::nat(1) {
                if e.as_nat().is_some() || *e == Ordinal::omega() {
                    write!(f, "^{e}")?;
                } else {
                    write!(f, "^({e})")?;
                }
            }
            if *c > 1 {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Ordinal {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut p = OrdParser { s: s.as_bytes(), pos: 0, depth: 0 };
        let o = p.sum()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(o)
    }
}

struct OrdParser<'a> {
    s: &'a [u8],
    pos: usize,
    depth: usize,
}

impl OrdParser<'_> {
    fn err(&self, m: &str) -> ParseError {
        ParseError { pos: self.pos, message: m.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a natural number"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseError { pos: start, message: "number too large".into() })
    }

    fn sum(&mut self) -> Result<Ordinal, ParseError> {
        self.depth += 1;
        if self.depth > 64 {
            return Err(self.err("nesting too deep"));
        }
        let start = self.pos;
        let mut terms = vec![self.term()?];
        while self.peek() == Some(b'+') {
            self.pos += 1;
            terms.push(self.term()?);
        }
        self.depth -= 1;
        let terms: Vec<_> = terms.into_iter().filter(|t| t.1 > 0).collect();
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(ParseError {
                    pos: start,
                    message: "not in Cantor normal form (exponents must strictly decrease)".into(),
                });
            }
        }
        Ok(Ordinal { terms })
    }

    fn term(&mut self) -> Result<(Ordinal, u64), ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok((Ordinal::zero(), self.nat()?)),
            Some(b'w') => {
                self.pos += 1;
                let e = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.exponent()?
                } else {
                    Ordinal::nat(1)
                };
                let c = if self.peek() == Some(b'*') {
                    self.pos += 1;
                    let c = self.nat()?;
                    if c == 0 {
                        return Err(self.err("coefficient must be positive"));
                    }
                    c
                } else {
                    1
                };
                Ok((e, c))
            }
            Some(b'e') | Some(b'E') => Err(self.err("unsupported notation: epsilon numbers are out of range")),
            _ => Err(self.err("expected a natural number or 'w'")),
        }
    }

    fn exponent(&mut self) -> Result<Ordinal, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            _ => Ok(Ordinal::nat(self.nat()?)),
        }
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["0", "7", "w", "w*3+2", "w^2*3+w+4", "w^w", "w^(w+1)*2+w^w+5", "w^(w*2)"] {
            assert_eq!(o(s).to_string(), s);
        }
    }

    #[test]
    fn rejects_non_normal_form() {
        assert!("w+w^2".parse::<Ordinal>().is_err());
        assert!("1+w".parse::<Ordinal>().is_err());
        assert!("e0".parse::<Ordinal>().is_err());
        assert!("w*0".parse::<Ordinal>().is_err());
    }

    #[test]
    fn addition_absorbs() {
        assert_eq!(Ordinal::nat(1).add(&Ordinal::omega()), Ordinal::omega());
        assert_eq!(o("w+3").add(&o("w*2")), o("w*3"));
        assert_eq!(o("w^2+w").add(&o("5")), o("w^2+w+5"));
    }

    #[test]
    fn pairing_inverts() {
        for n in 0..5000 {
            let (i, j) = unpair(n);
            assert_eq!(pair(i, j), n);
        }
    }

    #[test]
    fn enumerate_limit_examples() {
        assert_eq!(o("w^2").enumerate_below(1).unwrap(), o("w"));
        assert_eq!(o("w^2").enumerate_below(3).unwrap(), o("w*2"));
        assert!(o("w+1").enumerate_below(0).is_err());
    }
}
