//! Syntax of polynomials, pp-formulas and module sentences, with a printer that
//! the parser inverts.
//!
//! Variables are lowercase identifiers; `X`, `E`, `A` and `Inv` are reserved.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::PolyQ;
use crate::error::ParseError;
use crate::rational::Q;

/// `Σ p_i·v_i`; order and repetitions are kept as written.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinTerm {
    pub summands: Vec<(PolyQ, String)>,
}

impl LinTerm {
    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.summands.iter().map(|(_, v)| v)
    }
}

/// `E y1 .. yk . t1 = s1 & … & tn = sn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPFormula {
    pub bound: Vec<String>,
    pub equations: Vec<(LinTerm, LinTerm)>,
}

impl PPFormula {
    /// Variables occurring in the equations that are not bound, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        self.equations
            .iter()
            .flat_map(|(l, r)| l.vars().chain(r.vars()))
            .filter(|v| !self.bound.contains(v))
            .cloned()
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Eq,
    Gt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Eq(LinTerm, LinTerm),
    Inv(Box<PPFormula>, Box<PPFormula>, Cmp, u64),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    /// Free variables, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Formula::Eq(l, r) => l.vars().chain(r.vars()).cloned().collect(),
            Formula::Inv(..) => BTreeSet::new(),
            Formula::Not(a) => a.free_vars(),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                let mut s = a.free_vars();
                s.remove(v);
                s
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    X,
    Var(String),
    E,
    A,
    Inv,
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            out.push((st, Tok::Num(s[st..i].parse().unwrap())));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            let w = &s[st..i];
            let t = match w {
                "X" => Tok::X,
                "E" => Tok::E,
                "A" => Tok::A,
                "Inv" => Tok::Inv,
                _ if w.starts_with(|c: char| c.is_ascii_lowercase()) => Tok::Var(w.to_string()),
                _ => return Err(ParseError { pos: st, message: format!("unknown identifier `{w}`") }),
            };
            out.push((st, t));
        } else if "+-*^/()=.,~&|>".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError { pos: i, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct P {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

type R<T> = Result<T, ParseError>;

impl P {
    fn new(s: &str) -> R<Self> {
        Ok(P { toks: lex(s)?, i: 0, end: s.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, m: impl Into<String>) -> R<T> {
        Err(ParseError { pos: self.pos(), message: m.into() })
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> R<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn done(&self) -> R<()> {
        if self.i == self.toks.len() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn nat(&mut self) -> R<u64> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let v = u64::try_from(n.clone()).or_else(|_| self.err("number too large"))?;
                self.i += 1;
                Ok(v)
            }
            _ => self.err("expected a natural number"),
        }
    }

    fn var(&mut self) -> R<String> {
        match self.peek() {
            Some(Tok::Var(v)) => {
                let v = v.clone();
                self.i += 1;
                Ok(v)
            }
            _ => self.err("expected a variable"),
        }
    }

    // poly := sum of products of powers of atoms (rat | X | (poly)), unary minus allowed.
    fn poly(&mut self) -> R<PolyQ> {
        let mut acc = self.poly_prod()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.poly_prod()?;
            } else if self.eat('-') {
                acc = &acc - &self.poly_prod()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn poly_prod(&mut self) -> R<PolyQ> {
        if self.eat('-') {
            return Ok(-self.poly_prod()?);
        }
        let mut acc = self.poly_pow()?;
        while self.is_sym('*') && self.next_is_poly_atom(1) {
            self.i += 1;
            acc = &acc * &self.poly_pow()?;
        }
        Ok(acc)
    }

    fn next_is_poly_atom(&self, off: usize) -> bool {
        matches!(self.toks.get(self.i + off).map(|t| &t.1), Some(Tok::Num(_) | Tok::X | Tok::Sym('(')))
    }

    fn poly_pow(&mut self) -> R<PolyQ> {
        let base = self.poly_atom()?;
        if self.eat('^') {
            let e = self.nat()?;
            if e > 4096 {
                return self.err("exponent too large");
            }
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn poly_atom(&mut self) -> R<PolyQ> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                let mut v = Q::from_integer(n);
                if self.is_sym('/') {
                    self.i += 1;
                    match self.peek().cloned() {
                        Some(Tok::Num(d)) if !d.is_zero() => {
                            self.i += 1;
                            v /= Q::from_integer(d);
                        }
                        _ => return self.err("expected a positive denominator"),
                    }
                }
                Ok(PolyQ::constant(v))
            }
            Some(Tok::X) => {
                self.i += 1;
                Ok(PolyQ::x())
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let p = self.poly()?;
                self.expect(')')?;
                Ok(p)
            }
            _ => self.err("expected a polynomial"),
        }
    }

    // term := summand (("+"|"-") summand)* ; summand := [poly "*"] var | var | "0"-valued poly
    fn term(&mut self) -> R<LinTerm> {
        let mut out = LinTerm::default();
        let mut neg = false;
        loop {
            self.summand(neg, &mut out)?;
            if self.eat('+') {
                neg = false;
            } else if self.eat('-') {
                neg = true;
            } else {
                return Ok(out);
            }
        }
    }

    fn summand(&mut self, neg: bool, out: &mut LinTerm) -> R<()> {
        let st = self.pos();
        let mut neg = neg;
        while self.eat('-') {
            neg = !neg;
        }
        let coeff = if let Some(Tok::Var(_)) = self.peek() {
            PolyQ::one()
        } else {
            let mut c = self.poly_pow()?;
            while self.is_sym('*') && self.next_is_poly_atom(1) {
                self.i += 1;
                c = &c * &self.poly_pow()?;
            }
            if !self.eat('*') {
                if c.is_zero() {
                    return Ok(());
                }
                return Err(ParseError { pos: st, message: "nonzero constant in a homogeneous term".into() });
            }
            c
        };
        let v = self.var()?;
        out.summands.push((if neg { -coeff } else { coeff }, v));
        Ok(())
    }

    fn equation(&mut self) -> R<(LinTerm, LinTerm)> {
        let l = self.term()?;
        self.expect('=')?;
        let r = self.term()?;
        Ok((l, r))
    }

    fn pp(&mut self) -> R<PPFormula> {
        let mut bound = Vec::new();
        if self.peek() == Some(&Tok::E) {
            self.i += 1;
            bound.push(self.var()?);
            while let Some(Tok::Var(_)) = self.peek() {
                bound.push(self.var()?);
            }
            self.expect('.')?;
        }
        let mut equations = vec![self.equation()?];
        while self.eat('&') {
            equations.push(self.equation()?);
        }
        Ok(PPFormula { bound, equations })
    }

    fn form(&mut self) -> R<Formula> {
        let mut acc = self.conj()?;
        while self.eat('|') {
            acc = Formula::Or(Box::new(acc), Box::new(self.conj()?));
        }
        Ok(acc)
    }

    fn conj(&mut self) -> R<Formula> {
        let mut acc = self.unary()?;
        while self.eat('&') {
            acc = Formula::And(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> R<Formula> {
        match self.peek() {
            Some(Tok::Sym('~')) => {
                self.i += 1;
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Some(Tok::A) | Some(Tok::E) => {
                let forall = self.peek() == Some(&Tok::A);
                self.i += 1;
                let mut vars = vec![self.var()?];
                while let Some(Tok::Var(_)) = self.peek() {
                    vars.push(self.var()?);
                }
                self.expect('.')?;
                let mut body = self.form()?;
                for v in vars.into_iter().rev() {
                    body = if forall { Formula::Forall(v, Box::new(body)) } else { Formula::Exists(v, Box::new(body)) };
                }
                Ok(body)
            }
            Some(Tok::Inv) => {
                self.i += 1;
                self.expect('(')?;
                let g = self.pp()?;
                self.expect(',')?;
                let h = self.pp()?;
                self.expect(')')?;
                let cmp = if self.eat('=') {
                    Cmp::Eq
                } else if self.eat('>') {
                    Cmp::Gt
                } else {
                    return self.err("expected `=` or `>` after Inv(..)");
                };
                let k = self.nat()?;
                Ok(Formula::Inv(Box::new(g), Box::new(h), cmp, k))
            }
            Some(Tok::Sym('(')) => {
                let save = self.i;
                if let Ok((l, r)) = self.equation() {
                    return Ok(Formula::Eq(l, r));
                }
                self.i = save + 1;
                let f = self.form()?;
                self.expect(')')?;
                Ok(f)
            }
            _ => {
                let (l, r) = self.equation()?;
                Ok(Formula::Eq(l, r))
            }
        }
    }
}

pub fn parse_poly(s: &str) -> Result<PolyQ, ParseError> {
    let mut p = P::new(s)?;
    let r = p.poly()?;
    p.done()?;
    Ok(r)
}

pub fn parse_pp(s: &str) -> Result<PPFormula, ParseError> {
    let mut p = P::new(s)?;
    let r = p.pp()?;
    p.done()?;
    Ok(r)
}

pub fn parse_formula(s: &str) -> Result<Formula, ParseError> {
    let mut p = P::new(s)?;
    let r = p.form()?;
    p.done()?;
    Ok(r)
}

/// Any of the three syntactic categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parsed {
    Poly(PolyQ),
    PP(PPFormula),
    Sentence(Formula),
}

/// Tries polynomial, then pp-formula with exactly one free variable, then sentence.
pub fn parse(s: &str) -> Result<Parsed, ParseError> {
    if let Ok(p) = parse_poly(s) {
        return Ok(Parsed::Poly(p));
    }
    if let Ok(pp) = parse_pp(s) {
        if !pp.bound.is_empty() || pp.free_vars().len() == 1 {
            return Ok(Parsed::PP(pp));
        }
    }
    let f = parse_formula(s)?;
    if !f.is_sentence() {
        return Err(ParseError { pos: 0, message: format!("free variables {:?} in sentence", f.free_vars()) });
    }
    Ok(Parsed::Sentence(f))
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

fn simple_monomial(p: &PolyQ) -> bool {
    let nz = p.coeffs().iter().filter(|c| !c.is_zero()).count();
    nz == 1 && p.leading().is_some_and(|c| c > &Q::zero())
}

impl fmt::Display for LinTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, v)) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if p.is_one() {
                write!(f, "{v}")?;
            } else if simple_monomial(p) || p.is_zero() {
                write!(f, "{p}*{v}")?;
            } else {
                write!(f, "({p})*{v}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for PPFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.bound.is_empty() {
            write!(f, "E {} . ", self.bound.join(" "))?;
        }
        for (i, (l, r)) in self.equations.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{l} = {r}")?;
        }
        Ok(())
    }
}

impl Formula {
    // Context levels: 0 tail position, 1 left of `|`, 2 left of `&` or right of `|`, 3 operand of `&`/`~`.
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let paren = match self {
            Formula::Or(..) => prec >= 2,
            Formula::And(..) => prec >= 3,
            Formula::Forall(..) | Formula::Exists(..) => prec >= 1,
            _ => false,
        };
        if paren {
            write!(f, "(")?;
        }
        match self {
            Formula::Eq(l, r) => write!(f, "{l} = {r}")?,
            Formula::Inv(g, h, c, k) => {
                write!(f, "Inv({g}, {h}) {} {k}", if *c == Cmp::Eq { "=" } else { ">" })?
            }
            Formula::Not(a) => {
                write!(f, "~")?;
                a.fmt_prec(f, 3)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 3)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 2)?;
            }
            Formula::Forall(v, a) => {
                write!(f, "A {v} . ")?;
                a.fmt_prec(f, 0)?;
            }
            Formula::Exists(v, a) => {
                write!(f, "E {v} . ")?;
                a.fmt_prec(f, 0)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        assert_eq!(parse_poly("X^2 + 1").unwrap(), PolyQ::from_ints(&[1, 0, 1]));
        let pp = parse_pp("E y . x + X*y = 0").unwrap();
        assert_eq!(pp.bound, vec!["y".to_string()]);
        assert_eq!(pp.free_vars().into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);
        assert!(matches!(parse("A x . E y . x = X*y").unwrap(), Parsed::Sentence(_)));
        let e = parse_formula("A x . x = = y").unwrap_err();
        assert_eq!(e.pos, 10);
    }

    #[test]
    fn printer_inverts_parser() {
        for s in [
            "A x . E y . x = X*y",
            "Inv(x = x, E y . x = X^2*y) > 5",
            "~(x = 0) & (X^2 + 1)*x = 3*y | E z . z = 0",
            "(E z . z = 0) & x = 0",
            "(X + 1)*x + -1*y = 0",
        ] {
            let f = parse_formula(s).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{s} -> {f}");
        }
    }
}
