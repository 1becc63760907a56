//! Certified rational enclosures and rigorous bounds for pi and trigonometric values.

use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{fmt_q, inv_pow2, qi, round_down, round_up, serde_q, Q};

/// Working precision (bits) of the transcendental bounds.
pub const TRIG_BITS: u64 = 96;

/// Why an enclosure is valid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Justification {
    /// The value is the single rational `lo = hi`.
    Exact,
    /// A closed-form transcendental value bracketed to `bits` of precision.
    Closed { bits: u32 },
    /// Truncated at `depth`; the unresolved remainder is bounded by `bound`.
    TailBound {
        depth: u32,
        #[serde(with = "serde_q")]
        bound: Q,
    },
}

impl Justification {
    fn combine(&self, other: &Justification) -> Justification {
        use Justification::*;
        match (self, other) {
            (Exact, j) | (j, Exact) => j.clone(),
            (TailBound { depth: d1, bound: b1 }, TailBound { depth: d2, bound: b2 }) => {
                TailBound { depth: (*d1).min(*d2), bound: b1 + b2 }
            }
            (t @ TailBound { .. }, Closed { .. }) | (Closed { .. }, t @ TailBound { .. }) => t.clone(),
            (Closed { bits: a }, Closed { bits: b }) => Closed { bits: (*a).min(*b) },
        }
    }
}

/// Exact rational interval `[lo, hi]` certified to contain a real value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    #[serde(with = "serde_q")]
    pub lo: Q,
    #[serde(with = "serde_q")]
    pub hi: Q,
    pub justification: Justification,
}

impl Enclosure {
    pub fn exact(v: Q) -> Self {
        Enclosure { lo: v.clone(), hi: v, justification: Justification::Exact }
    }

    pub fn zero() -> Self {
        Self::exact(Q::zero())
    }

    pub fn closed(lo: Q, hi: Q, bits: u32) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi, justification: Justification::Closed { bits } }
    }

    /// `[-bound, bound]` with a tail justification.
    pub fn tail(depth: u32, bound: Q) -> Self {
        Enclosure { lo: -bound.clone(), hi: bound.clone(), justification: Justification::TailBound { depth, bound } }
    }

    /// `[lo, hi]` with a tail justification carrying `bound`.
    pub fn tail_range(lo: Q, hi: Q, depth: u32, bound: Q) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi, justification: Justification::TailBound { depth, bound } }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.justification, Justification::Exact)
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_enclosure(&self, o: &Enclosure) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn meets(&self, o: &Enclosure) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Multiplication by an exact rational.
    pub fn scale(&self, c: &Q) -> Enclosure {
        let (a, b) = (&self.lo * c, &self.hi * c);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let justification = match &self.justification {
            Justification::TailBound { depth, bound } => {
                Justification::TailBound { depth: *depth, bound: bound * c.abs() }
            }
            j => j.clone(),
        };
        let mut e = Enclosure { lo, hi, justification };
        e.normalize();
        e
    }

    /// Intersection with `[lo, hi]`, keeping the justification.
    pub fn clamp(&self, lo: &Q, hi: &Q) -> Enclosure {
        let nlo = if &self.lo < lo { lo.clone() } else { self.lo.clone() };
        let nhi = if &self.hi > hi { hi.clone() } else { self.hi.clone() };
        let mut e = if nlo <= nhi {
            Enclosure { lo: nlo, hi: nhi, justification: self.justification.clone() }
        } else {
            self.clone()
        };
        e.normalize();
        e
    }

    /// Interval product.
    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        let mut e = Enclosure { lo, hi, justification: self.justification.combine(&o.justification) };
        e.normalize();
        e
    }

    /// Upper bound on `|value|`.
    pub fn abs_upper(&self) -> Q {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b { a } else { b }
    }

    /// Collapses a zero-width closed/tail enclosure to `Exact`.
    fn normalize(&mut self) {
        if self.lo == self.hi && matches!(self.justification, Justification::Closed { .. }) {
            self.justification = Justification::Exact;
        }
    }

    pub fn describe(&self) -> String {
        if self.is_exact() {
            fmt_q(&self.lo)
        } else {
            format!("[{}, {}]", fmt_q(&self.lo), fmt_q(&self.hi))
        }
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, o: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, justification: self.justification.combine(&o.justification) }
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, o: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo, justification: self.justification.combine(&o.justification) }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure { lo: -self.hi.clone(), hi: -self.lo.clone(), justification: self.justification.clone() }
    }
}

impl std::iter::Sum for Enclosure {
    fn sum<I: Iterator<Item = Enclosure>>(iter: I) -> Enclosure {
        iter.fold(Enclosure::zero(), |acc, e| &acc + &e)
    }
}

// ---------------------------------------------------------------------------
// Transcendental bounds
// ---------------------------------------------------------------------------

/// Brackets an alternating series whose terms decrease in magnitude from index `from`.
fn alternating_bracket(first: Q, mut next_term: impl FnMut(usize, &Q) -> Q, eps: &Q) -> (Q, Q) {
    let mut sum = first.clone();
    let mut term = first;
    let mut prev;
    let mut i = 0usize;
    loop {
        let t = next_term(i, &term);
        let new_sum = &sum + &t;
        prev = std::mem::replace(&mut sum, new_sum);
        let small = t.abs() < *eps;
        term = t;
        i += 1;
        if small && i >= 2 {
            break;
        }
    }
    if prev <= sum { (prev, sum) } else { (sum, prev) }
}

/// Bounds for `arctan(1/k)`, `k >= 2`.
fn arctan_inv(k: i64, eps: &Q) -> (Q, Q) {
    let x = Q::new(1.into(), k.into());
    let x2 = &x * &x;
    // term_i = (-1)^i x^(2i+1)/(2i+1); track the power separately.
    let mut pow = x.clone();
    alternating_bracket(
        x.clone(),
        |i, _| {
            pow = -(&pow * &x2);
            &pow / qi(2 * i as i64 + 3)
        },
        eps,
    )
}

/// Rigorous rational bounds `(lo, hi)` on pi.
pub fn pi_bounds() -> &'static (Q, Q) {
    static PI: OnceLock<(Q, Q)> = OnceLock::new();
    PI.get_or_init(|| {
        let eps = inv_pow2(TRIG_BITS + 16);
        let (a_lo, a_hi) = arctan_inv(5, &eps);
        let (b_lo, b_hi) = arctan_inv(239, &eps);
        let lo = qi(16) * a_lo - qi(4) * b_hi;
        let hi = qi(16) * a_hi - qi(4) * b_lo;
        (round_down(&lo, TRIG_BITS), round_up(&hi, TRIG_BITS))
    })
}

/// Enclosure of `c * pi` for a rational `c`.
pub fn pi_times(c: &Q) -> Enclosure {
    if c.is_zero() {
        return Enclosure::zero();
    }
    let (lo, hi) = pi_bounds();
    let (a, b) = (lo * c, hi * c);
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    Enclosure::closed(a, b, TRIG_BITS as u32)
}

/// Fixed-point scale (bits) used inside the Taylor evaluations.
const FIX: u64 = 128;

/// Bounds, scaled by `2^FIX`, on `cos(phi)` (or `sin(phi)`) for `phi = p / 2^FIX`, `0 <= phi <= 1`.
fn taylor_fixed(p: &BigInt, sine: bool) -> (BigInt, BigInt) {
    let one = BigInt::one() << FIX as usize;
    let p2 = p * p;
    let (mut tlo, mut thi) = if sine { (p.clone(), p.clone()) } else { (one.clone(), one) };
    let (mut lo, mut hi) = (tlo.clone(), thi.clone());
    let (mut plo, mut phi);
    let stop = BigInt::one() << (FIX - TRIG_BITS - 8) as usize;
    let mut i: u64 = 0;
    loop {
        let d = if sine { (2 * i + 2) * (2 * i + 3) } else { (2 * i + 1) * (2 * i + 2) };
        let d = BigInt::from(d) << (2 * FIX) as usize;
        tlo = (&tlo * &p2).div_floor(&d);
        thi = (&thi * &p2).div_ceil(&d);
        plo = lo.clone();
        phi = hi.clone();
        if i.is_multiple_of(2) {
            lo -= &thi;
            hi -= &tlo;
        } else {
            lo += &tlo;
            hi += &thi;
        }
        i += 1;
        if thi < stop && i >= 2 {
            break;
        }
    }
    (plo.min(lo), phi.max(hi))
}

/// Outward fixed-point bracket of `2 * pi * s`.
fn angle_fixed(s: &Q) -> (BigInt, BigInt) {
    let (pl, ph) = pi_bounds();
    let scale = Q::from_integer(BigInt::one() << FIX as usize);
    let a = qi(2) * pl * s * &scale;
    let b = qi(2) * ph * s * &scale;
    (a.floor().to_integer(), b.ceil().to_integer())
}

fn unfix(x: BigInt) -> Q {
    Q::new(x, BigInt::one() << FIX as usize)
}

/// Exact value of `cos(2 pi s)` when it is rational.
fn cos_2pi_exact(s: &Q) -> Option<Q> {
    let four = s * qi(4);
    if four.is_integer() {
        let k: num_bigint::BigInt = four.to_integer() % 4;
        let k: i64 = k.try_into().unwrap();
        return Some(qi([1, 0, -1, 0][k.rem_euclid(4) as usize]));
    }
    let six = s * qi(6);
    if six.is_integer() {
        let k: num_bigint::BigInt = six.to_integer() % 6;
        let k: i64 = k.try_into().unwrap();
        return Some(match k.rem_euclid(6) {
            1 | 5 => Q::new(1.into(), 2.into()),
            2 | 4 => Q::new((-1).into(), 2.into()),
            _ => unreachable!("covered by quarter turns"),
        });
    }
    None
}

/// Enclosure of `cos(2 pi t)`.
pub fn cos_2pi(t: &Q) -> Enclosure {
    let s = t - Q::from_integer(t.floor().to_integer());
    if let Some(v) = cos_2pi_exact(&s) {
        return Enclosure::exact(v);
    }
    let half = Q::new(1.into(), 2.into());
    let quarter = Q::new(1.into(), 4.into());
    let eighth = Q::new(1.into(), 8.into());
    let mut s = if s > half { Q::one() - s } else { s };
    let mut sign = Q::one();
    if s > quarter {
        s = &half - &s;
        sign = -sign;
    }
    let (lo, hi) = if s <= eighth {
        let (alo, ahi) = angle_fixed(&s);
        (unfix(taylor_fixed(&ahi, false).0), unfix(taylor_fixed(&alo, false).1))
    } else {
        let (alo, ahi) = angle_fixed(&(&quarter - &s));
        (unfix(taylor_fixed(&alo, true).0), unfix(taylor_fixed(&ahi, true).1))
    };
    let (lo, hi) = (round_down(&lo, TRIG_BITS), round_up(&hi, TRIG_BITS));
    let (lo, hi) = if sign.is_positive() { (lo, hi) } else { (-hi, -lo) };
    Enclosure::closed(lo, hi, TRIG_BITS as u32 - 4).clamp(&qi(-1), &qi(1))
}

/// Enclosure of `sin(2 pi t)`.
pub fn sin_2pi(t: &Q) -> Enclosure {
    cos_2pi(&(Q::new(1.into(), 4.into()) - t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, to_f64};

    #[test]
    fn pi_is_bracketed_tightly() {
        let (lo, hi) = pi_bounds();
        assert!(lo < hi);
        assert!(hi - lo < inv_pow2(90));
        assert!((to_f64(lo) - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn trig_matches_float_and_exact_cases() {
        assert_eq!(cos_2pi(&q(1, 2)), Enclosure::exact(qi(-1)));
        assert_eq!(sin_2pi(&q(1, 4)), Enclosure::exact(qi(1)));
        assert_eq!(sin_2pi(&q(1, 12)), Enclosure::exact(q(1, 2)));
        assert_eq!(cos_2pi(&q(7, 6)), Enclosure::exact(q(1, 2)));
        assert_eq!(cos_2pi(&q(2, 3)), Enclosure::exact(q(-1, 2)));
        for k in 1..200 {
            let t = q(k, 197);
            let e = cos_2pi(&t);
            let f = (2.0 * std::f64::consts::PI * to_f64(&t)).cos();
            assert!(to_f64(&e.lo) - 1e-12 <= f && f <= to_f64(&e.hi) + 1e-12, "k={k}");
            assert!(e.width() < inv_pow2(80));
            let e = sin_2pi(&t);
            let f = (2.0 * std::f64::consts::PI * to_f64(&t)).sin();
            assert!(to_f64(&e.lo) - 1e-12 <= f && f <= to_f64(&e.hi) + 1e-12, "k={k}");
        }
    }
}
