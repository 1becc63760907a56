//! Classification of one-variable pp-definable subgroups and index invariants.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::parser::{LinTerm, PPFormula};
use super::poly::PolyQ;
use crate::error::DecideError;

/// Pp-definable subgroup of one variable, up to the chain `0 ⊂ … ⊂ X²M ⊂ XM ⊂ M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubgroupClass {
    Zero,
    /// `X^ℓ M`, `ℓ >= 1`.
    XPower(u32),
    Full,
}

impl SubgroupClass {
    /// Position in the chain; smaller is a smaller subgroup.
    fn rank(self) -> (u8, i64) {
        match self {
            SubgroupClass::Zero => (0, 0),
            SubgroupClass::XPower(l) => (1, -(l as i64)),
            SubgroupClass::Full => (2, 0),
        }
    }

    /// Intersection of subgroups.
    pub fn meet(self, other: SubgroupClass) -> SubgroupClass {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for SubgroupClass {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Inclusion order on the chain.
impl Ord for SubgroupClass {
    fn cmp(&self, o: &Self) -> Ordering {
        self.rank().cmp(&o.rank())
    }
}

impl fmt::Display for SubgroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupClass::Zero => write!(f, "0"),
            SubgroupClass::XPower(1) => write!(f, "X*M"),
            SubgroupClass::XPower(l) => write!(f, "X^{l}*M"),
            SubgroupClass::Full => write!(f, "M"),
        }
    }
}

/// `{x : p·x ∈ q·M}`.
pub fn classify_basic(p: &PolyQ, q: &PolyQ) -> SubgroupClass {
    if p.is_zero() {
        return SubgroupClass::Full;
    }
    if q.is_zero() {
        return classify_kernel(p);
    }
    let k = p.x_valuation().unwrap().min(q.x_valuation().unwrap());
    let l = q.x_valuation().unwrap() - k;
    if l == 0 {
        SubgroupClass::Full
    } else {
        SubgroupClass::XPower(l as u32)
    }
}

/// `{x : p·x = 0}`.
pub fn classify_kernel(p: &PolyQ) -> SubgroupClass {
    if p.is_zero() {
        SubgroupClass::Full
    } else {
        SubgroupClass::Zero
    }
}

/// Basic conjunct of a reduced pp-formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasicForm {
    /// `p·x = 0`.
    Kernel(PolyQ),
    /// `∃y p·x + q·y = 0`.
    InverseImage(PolyQ, PolyQ),
}

impl BasicForm {
    pub fn class(&self) -> SubgroupClass {
        match self {
            BasicForm::Kernel(p) => classify_kernel(p),
            BasicForm::InverseImage(p, q) => classify_basic(p, q),
        }
    }
}

fn coeff_of(t: &LinTerm, v: &str) -> PolyQ {
    t.summands.iter().filter(|(_, n)| n == v).fold(PolyQ::zero(), |acc, (p, _)| &acc + p)
}

/// The single free variable of a pp-formula.
pub fn free_var(pp: &PPFormula) -> Result<String, DecideError> {
    let free = pp.free_vars();
    match free.len() {
        1 => Ok(free.into_iter().next().unwrap()),
        n => Err(DecideError::Malformed(format!("pp-formula must have exactly one free variable, found {n}"))),
    }
}

/// Rewrites a one-variable pp-formula as a conjunction of basic forms by
/// diagonalising the bound-variable block over Q[X].
pub fn reduce_pp(pp: &PPFormula) -> Result<Vec<BasicForm>, DecideError> {
    let x = free_var(pp)?;
    let ys: Vec<String> = pp.bound.clone();
    // Row layout: [x | y_1 .. y_k].
    let mut rows: Vec<Vec<PolyQ>> = pp
        .equations
        .iter()
        .map(|(l, r)| {
            let mut row = vec![&coeff_of(l, &x) - &coeff_of(r, &x)];
            for y in &ys {
                row.push(&coeff_of(l, y) - &coeff_of(r, y));
            }
            row
        })
        .collect();
    let k = ys.len();
    let mut t = 0;
    while t < k && t < rows.len() {
        // Pivot: nonzero entry of least degree in the unreduced block.
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in rows.iter().enumerate().skip(t) {
            for (j, e) in row.iter().enumerate().take(k + 1).skip(t + 1) {
                if let Some(d) = e.degree() {
                    if best.is_none_or(|(_, _, bd)| d < bd) {
                        best = Some((i, j, d));
                    }
                }
            }
        }
        let Some((bi, bj, _)) = best else { break };
        rows.swap(t, bi);
        for row in rows.iter_mut() {
            row.swap(t + 1, bj);
        }
        let piv = rows[t][t + 1].clone();
        let mut clean = true;
        let pivot_row = rows[t].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == t || row[t + 1].is_zero() {
                continue;
            }
            let (qq, r) = row[t + 1].div_rem(&piv);
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = &*x - &(&qq * p);
            }
            if !r.is_zero() {
                clean = false;
            }
        }
        for j in (t + 2)..=k {
            if rows[t][j].is_zero() {
                continue;
            }
            let (qq, r) = rows[t][j].div_rem(&piv);
            for row in rows.iter_mut() {
                let s = &qq * &row[t + 1];
                row[j] = &row[j] - &s;
            }
            if !r.is_zero() {
                clean = false;
            }
        }
        if clean {
            t += 1;
        }
    }
    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let p = row[0].clone();
        let d = if i < t { row[i + 1].clone() } else { PolyQ::zero() };
        if d.is_zero() {
            if !p.is_zero() {
                out.push(BasicForm::Kernel(p));
            }
        } else if !p.is_zero() {
            out.push(BasicForm::InverseImage(p, d));
        }
    }
    Ok(out)
}

/// Meet of the classes of the basic conjuncts.
pub fn subgroup_of_basic(forms: &[BasicForm]) -> SubgroupClass {
    forms.iter().fold(SubgroupClass::Full, |acc, f| acc.meet(f.class()))
}

/// Class of the subgroup defined by a one-variable pp-formula.
pub fn subgroup_of_pp(pp: &PPFormula) -> Result<SubgroupClass, DecideError> {
    Ok(subgroup_of_basic(&reduce_pp(pp)?))
}

/// Index `[G : G ∩ H]`, which is always 1 or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexValue {
    One,
    Infinite,
}

/// `[G : G ∩ H]`, using that each `[X^k M : X^{k+1} M]` is infinite.
pub fn invariant_index(g: SubgroupClass, h: SubgroupClass) -> IndexValue {
    if g == SubgroupClass::Zero || g.meet(h) == g {
        IndexValue::One
    } else {
        IndexValue::Infinite
    }
}
