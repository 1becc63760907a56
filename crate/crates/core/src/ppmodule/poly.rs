//! Dense univariate polynomials over Q in the indeterminate X.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::DecideError;
use crate::rational::{fmt_q, qi, Q};

/// Polynomial with coefficients stored lowest degree first; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PolyQ {
    coeffs: Vec<Q>,
}

impl PolyQ {
    pub fn zero() -> Self {
        PolyQ { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(qi(1))
    }

    /// The indeterminate X.
    pub fn x() -> Self {
        Self::monomial(qi(1), 1)
    }

    pub fn constant(c: Q) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c·X^k`.
    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Self::from_coeffs(v)
    }

    /// `X^k`.
    pub fn x_pow(k: usize) -> Self {
        Self::monomial(qi(1), k)
    }

    pub fn from_coeffs(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::from_coeffs(cs.iter().map(|&c| qi(c)).collect())
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Nonzero constants, which act invertibly.
    pub fn is_unit_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Q> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplies by `X^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Q::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        PolyQ { coeffs: v }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &PolyQ) -> (PolyQ, PolyQ) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut qv = vec![Q::zero(); r.len() - dd];
        for i in (0..qv.len()).rev() {
            let c = &r[i + dd] / &lead;
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dj;
                }
            }
            qv[i] = c;
        }
        r.truncate(dd);
        (Self::from_coeffs(qv), Self::from_coeffs(r))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &PolyQ, b: &PolyQ) -> PolyQ {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(l) => a.scale(&(Q::one() / l)),
            None => a,
        }
    }

    /// Largest `k` with `X^k | p`; `None` for the zero polynomial.
    pub fn x_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Writes `p = X^k·p0` with `X ∤ p0`.
    pub fn strip_x_power(&self) -> Result<(usize, PolyQ), DecideError> {
        let k = self
            .x_valuation()
            .ok_or_else(|| DecideError::Malformed("strip_x_power of the zero polynomial".into()))?;
        Ok((k, PolyQ { coeffs: self.coeffs[k..].to_vec() }))
    }

    /// Remainder modulo `X^e`.
    pub fn mod_x_pow(&self, e: usize) -> PolyQ {
        Self::from_coeffs(self.coeffs.iter().take(e).cloned().collect())
    }

    /// Inverse modulo `X^e` of a polynomial with nonzero constant term.
    pub fn inverse_mod_x_pow(&self, e: usize) -> Option<PolyQ> {
        let c0 = self.coeffs.first().filter(|c| !c.is_zero())?.clone();
        let inv0 = Q::one() / &c0;
        let mut out: Vec<Q> = Vec::with_capacity(e);
        for k in 0..e {
            if k == 0 {
                out.push(inv0.clone());
                continue;
            }
            let mut s = Q::zero();
            for j in 1..=k {
                s += self.coeff(j) * &out[k - j];
            }
            out.push(-s * &inv0);
        }
        Some(Self::from_coeffs(out))
    }
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, o: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyQ::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, o: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyQ::from_coeffs((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, o: &PolyQ) -> PolyQ {
        if self.is_zero() || o.is_zero() {
            return PolyQ::zero();
        }
        let mut v = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        PolyQ::from_coeffs(v)
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Add for PolyQ {
    type Output = PolyQ;
    fn add(self, o: PolyQ) -> PolyQ {
        &self + &o
    }
}

impl Sub for PolyQ {
    type Output = PolyQ;
    fn sub(self, o: PolyQ) -> PolyQ {
        &self - &o
    }
}

impl Mul for PolyQ {
    type Output = PolyQ;
    fn mul(self, o: PolyQ) -> PolyQ {
        &self * &o
    }
}

impl Neg for PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        -&self
    }
}

/// Highest degree first, e.g. `X^2 - 3/2*X + 1`.
impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let xs = match k {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{k}"),
            };
            match (a.is_one(), k) {
                (true, 0) => write!(f, "1")?,
                (true, _) => write!(f, "{xs}")?,
                (false, 0) => write!(f, "{}", fmt_q(&a))?,
                (false, _) => write!(f, "{}*{xs}", fmt_q(&a))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn arithmetic_and_division() {
        let a = PolyQ::from_ints(&[2, 3, 1]); // X^2 + 3X + 2
        let b = PolyQ::from_ints(&[1, 1]);
        let (qq, r) = a.div_rem(&b);
        assert_eq!(qq, PolyQ::from_ints(&[2, 1]));
        assert!(r.is_zero());
        assert_eq!(PolyQ::gcd(&a, &PolyQ::from_ints(&[4, 2])), PolyQ::from_ints(&[2, 1]));
        assert_eq!(PolyQ::gcd(&a, &PolyQ::from_ints(&[3, 1])), PolyQ::one());
        assert_eq!(a.to_string(), "X^2 + 3*X + 2");
        assert_eq!(PolyQ::from_coeffs(vec![q(-1, 2), qi(0), qi(-1)]).to_string(), "-X^2 - 1/2");
    }

    #[test]
    fn inverse_mod() {
        let u = PolyQ::from_ints(&[1, 1]);
        let w = u.inverse_mod_x_pow(5).unwrap();
        assert_eq!((&u * &w).mod_x_pow(5), PolyQ::one());
        assert!(PolyQ::x().inverse_mod_x_pow(3).is_none());
    }
}
