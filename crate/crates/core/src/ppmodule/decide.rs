//! Quantifier elimination for sentences over the Q[X]-modules of continuous,
//! Lebesgue and Denjoy integrable functions (X = indefinite integration).
//!
//! Facts used about every such module `M`: `X` is injective, a polynomial with
//! nonzero constant term acts as an automorphism commuting with `X`, and each
//! quotient `X^k M / X^{k+1} M` is infinite. Literals are divisibility
//! conditions `t ∈ X^e M` (or `t = 0`) on linear forms `t`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::classify::{invariant_index, subgroup_of_pp, IndexValue};
use super::parser::{parse_formula, Cmp, Formula, LinTerm};
use super::poly::PolyQ;
use crate::error::DecideError;

/// Which function module the sentence is read in. All three share one theory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ModuleKind {
    C,
    L1,
    #[default]
    Den,
}

impl FromStr for ModuleKind {
    type Err = DecideError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "C" => Ok(ModuleKind::C),
            "L1" => Ok(ModuleKind::L1),
            "Den" => Ok(ModuleKind::Den),
            _ => Err(DecideError::Malformed(format!("unknown module `{s}` (expected C, L1 or Den)"))),
        }
    }
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModuleKind::C => "C",
            ModuleKind::L1 => "L1",
            ModuleKind::Den => "Den",
        };
        write!(f, "{s}")
    }
}

/// Default cap on the number of disjuncts in any intermediate normal form.
pub const DEFAULT_BUDGET: usize = 4096;

type Form = BTreeMap<String, PolyQ>;

/// `form ∈ X^e M`, or `form = 0` when `e` is `None`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Atom {
    form: Form,
    e: Option<usize>,
}

#[derive(Clone, Debug)]
enum Qf {
    True,
    False,
    Lit(bool, Atom),
    And(Vec<Qf>),
    Or(Vec<Qf>),
}

fn lin_to_form(l: &LinTerm, sign: bool, acc: &mut Form) {
    for (p, v) in &l.summands {
        let e = acc.entry(v.clone()).or_default();
        *e = if sign { &*e + p } else { &*e - p };
    }
}

fn scale_form(f: &Form, c: &PolyQ) -> Form {
    f.iter().map(|(k, p)| (k.clone(), p * c)).collect()
}

fn sub_form(a: &Form, b: &Form) -> Form {
    let mut out = a.clone();
    for (k, p) in b {
        let e = out.entry(k.clone()).or_default();
        *e = &*e - p;
    }
    out
}

/// Normalises an atom; `Err(truth)` when it is constant.
fn normalize(mut a: Atom) -> Result<Atom, bool> {
    if let Some(e) = a.e {
        if e == 0 {
            return Err(true);
        }
        for p in a.form.values_mut() {
            *p = p.mod_x_pow(e);
        }
    }
    a.form.retain(|_, p| !p.is_zero());
    if a.form.is_empty() {
        Err(true)
    } else {
        Ok(a)
    }
}

fn lit(pos: bool, a: Atom) -> Qf {
    match normalize(a) {
        Ok(a) => Qf::Lit(pos, a),
        Err(t) => {
            if t == pos {
                Qf::True
            } else {
                Qf::False
            }
        }
    }
}

fn negate(q: Qf) -> Qf {
    match q {
        Qf::True => Qf::False,
        Qf::False => Qf::True,
        Qf::Lit(p, a) => Qf::Lit(!p, a),
        Qf::And(v) => Qf::Or(v.into_iter().map(negate).collect()),
        Qf::Or(v) => Qf::And(v.into_iter().map(negate).collect()),
    }
}

type Conj = Vec<(bool, Atom)>;

fn dnf(q: &Qf, budget: usize) -> Result<Vec<Conj>, DecideError> {
    let over = |n: usize| {
        if n > budget {
            Err(DecideError::BudgetExceeded(format!("normal form exceeds {budget} disjuncts")))
        } else {
            Ok(())
        }
    };
    match q {
        Qf::True => Ok(vec![vec![]]),
        Qf::False => Ok(vec![]),
        Qf::Lit(p, a) => Ok(vec![vec![(*p, a.clone())]]),
        Qf::Or(v) => {
            let mut out = Vec::new();
            for x in v {
                out.extend(dnf(x, budget)?);
                over(out.len())?;
            }
            Ok(out)
        }
        Qf::And(v) => {
            let mut acc: Vec<Conj> = vec![vec![]];
            for x in v {
                let d = dnf(x, budget)?;
                over(acc.len().saturating_mul(d.len()))?;
                let mut next = Vec::with_capacity(acc.len() * d.len());
                for a in &acc {
                    for b in &d {
                        let mut c = a.clone();
                        c.extend(b.iter().cloned());
                        c.sort();
                        c.dedup();
                        if !contradictory(&c) {
                            next.push(c);
                        }
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
    }
}

fn contradictory(c: &Conj) -> bool {
    c.windows(2).any(|w| w[0].1 == w[1].1 && w[0].0 != w[1].0)
}

/// Coefficient of `y` and the remaining form.
fn split(f: &Form, y: &str) -> (PolyQ, Form) {
    let mut rest = f.clone();
    let a = rest.remove(y).unwrap_or_default();
    (a, rest)
}

/// `∃y` of a conjunction of literals.
fn eliminate_conj(y: &str, c: &Conj) -> Qf {
    let mut out: Vec<Qf> = Vec::new();
    let mut with_y: Vec<(bool, PolyQ, Form, Option<usize>)> = Vec::new();
    for (pos, a) in c {
        let (coef, rest) = split(&a.form, y);
        if coef.is_zero() {
            out.push(Qf::Lit(*pos, a.clone()));
        } else {
            with_y.push((*pos, coef, rest, a.e));
        }
    }
    // A positive equation determines y: substitute it everywhere else.
    let pivot = with_y
        .iter()
        .enumerate()
        .filter(|(_, w)| w.0 && w.3.is_none())
        .min_by_key(|(_, w)| w.1.x_valuation().unwrap())
        .map(|(i, _)| i);
    if let Some(pi) = pivot {
        let (_, a, t, _) = with_y[pi].clone();
        let v = a.x_valuation().unwrap();
        out.push(lit(true, Atom { form: t.clone(), e: Some(v) }));
        for (i, (pos, b, s, e)) in with_y.iter().enumerate() {
            if i == pi {
                continue;
            }
            let form = sub_form(&scale_form(s, &a), &scale_form(&t, b));
            out.push(lit(*pos, Atom { form, e: e.map(|e| e + v) }));
        }
        return Qf::And(out);
    }
    // Only divisibility literals remain (negated equations are absorbed: a coset of
    // X^E M is never covered by finitely many cosets of a subgroup of infinite index).
    struct Norm {
        pos: bool,
        v: usize,
        t: Form,
        e: usize,
    }
    let mut norms = Vec::new();
    for (pos, a, t, e) in &with_y {
        let Some(e) = *e else { continue };
        let (v, u) = a.strip_x_power().expect("nonzero");
        let w = u.inverse_mod_x_pow(e).expect("unit");
        let t = scale_form(t, &w);
        norms.push(Norm { pos: *pos, v, t, e });
    }
    let vmax = norms.iter().map(|n| n.v).max().unwrap_or(0);
    for n in norms.iter_mut() {
        let s = vmax - n.v;
        n.t = scale_form(&n.t, &PolyQ::x_pow(s));
        n.e += s;
        n.v = vmax;
    }
    let Some(i0) = norms
        .iter()
        .enumerate()
        .filter(|(_, n)| n.pos)
        .max_by(|a, b| a.1.e.cmp(&b.1.e).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
    else {
        return Qf::And(out);
    };
    let big_e = norms[i0].e;
    let t0 = norms[i0].t.clone();
    out.push(lit(true, Atom { form: t0.clone(), e: Some(vmax) }));
    for (i, n) in norms.iter().enumerate() {
        if i == i0 {
            continue;
        }
        if n.pos || n.e <= big_e {
            out.push(lit(n.pos, Atom { form: sub_form(&n.t, &t0), e: Some(n.e) }));
        }
    }
    Qf::And(out)
}

fn exists(y: &str, body: Qf, budget: usize) -> Result<Qf, DecideError> {
    let d = dnf(&body, budget)?;
    Ok(Qf::Or(d.iter().map(|c| eliminate_conj(y, c)).collect()))
}

fn eliminate(f: &Formula, budget: usize) -> Result<Qf, DecideError> {
    Ok(match f {
        Formula::Eq(l, r) => {
            let mut form = Form::new();
            lin_to_form(l, true, &mut form);
            lin_to_form(r, false, &mut form);
            lit(true, Atom { form, e: None })
        }
        Formula::Inv(g, h, cmp, k) => {
            let idx = invariant_index(subgroup_of_pp(g)?, subgroup_of_pp(h)?);
            let truth = match (cmp, idx) {
                (Cmp::Eq, IndexValue::One) => *k == 1,
                (Cmp::Eq, IndexValue::Infinite) => false,
                (Cmp::Gt, IndexValue::One) => *k == 0,
                (Cmp::Gt, IndexValue::Infinite) => true,
            };
            if truth {
                Qf::True
            } else {
                Qf::False
            }
        }
        Formula::Not(a) => negate(eliminate(a, budget)?),
        Formula::And(a, b) => Qf::And(vec![eliminate(a, budget)?, eliminate(b, budget)?]),
        Formula::Or(a, b) => Qf::Or(vec![eliminate(a, budget)?, eliminate(b, budget)?]),
        Formula::Exists(y, a) => exists(y, eliminate(a, budget)?, budget)?,
        Formula::Forall(y, a) => negate(exists(y, negate(eliminate(a, budget)?), budget)?),
    })
}

fn evaluate_ground(q: &Qf) -> Result<bool, DecideError> {
    match q {
        Qf::True => Ok(true),
        Qf::False => Ok(false),
        Qf::Lit(..) => Err(DecideError::Malformed("free variable left after elimination".into())),
        Qf::And(v) => v.iter().try_fold(true, |acc, x| Ok(acc & evaluate_ground(x)?)),
        Qf::Or(v) => v.iter().try_fold(false, |acc, x| Ok(acc | evaluate_ground(x)?)),
    }
}

/// Truth value of a sentence. The module parameter does not influence the result.
pub fn decide_in(s: &Formula, _module: ModuleKind, budget: usize) -> Result<bool, DecideError> {
    let free = s.free_vars();
    if !free.is_empty() {
        return Err(DecideError::Malformed(format!("free variables {free:?} in sentence")));
    }
    evaluate_ground(&eliminate(s, budget)?)
}

pub fn decide(s: &Formula) -> Result<bool, DecideError> {
    decide_in(s, ModuleKind::Den, DEFAULT_BUDGET)
}

/// Parses and decides.
pub fn decide_str(text: &str, module: ModuleKind, budget: usize) -> Result<bool, DecideError> {
    decide_in(&parse_formula(text)?, module, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> bool {
        decide_str(s, ModuleKind::Den, DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn basic_sentences() {
        assert!(!d("A x . E y . x = X*y"));
        assert!(d("A x . X*x = X*x"));
        assert!(d("A x . x + 0 = x"));
        assert!(d("Inv(x = x, E y . x = X^2*y) > 5"));
        assert!(d("A x . E y . x = (X + 1)*y"));
        assert!(d("A x . ~(X*x = 0) | x = 0"));
        assert!(!d("E x . ~(x = 0) & X*x = 0"));
    }
}
