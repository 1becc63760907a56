//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number used throughout the crate.
pub type Q = BigRational;

/// `n/d` as an exact rational.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `2^k` as a big integer.
pub fn pow2_int(k: u64) -> BigInt {
    BigInt::one() << (k as usize)
}

/// `2^{-k}`.
pub fn inv_pow2(k: u64) -> Q {
    Q::new(BigInt::one(), pow2_int(k))
}

/// `3^k` as a big integer.
pub fn pow3_int(k: u64) -> BigInt {
    num_traits::pow(BigInt::from(3), k as usize)
}

/// `3^{-k}`.
pub fn inv_pow3(k: u64) -> Q {
    Q::new(BigInt::one(), pow3_int(k))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

/// Canonical `p/q` (or `p` for integers) rendering.
pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

/// Largest dyadic `k/2^bits` not above `x`.
pub fn round_down(x: &Q, bits: u64) -> Q {
    let scale = pow2_int(bits);
    let num = x.numer() * &scale;
    Q::new(num.div_floor(x.denom()), scale)
}

/// Smallest dyadic `k/2^bits` not below `x`.
pub fn round_up(x: &Q, bits: u64) -> Q {
    let scale = pow2_int(bits);
    let num = x.numer() * &scale;
    Q::new(num.div_ceil(x.denom()), scale)
}

/// Approximate `f64` value for display only.
pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // Ratios of huge integers: shift both down first.
        let nb = x.numer().bits() as i64;
        let db = x.denom().bits() as i64;
        let shift = (nb.max(db) - 1000).max(0) as usize;
        let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (x.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// `|x|`.
pub fn qabs(x: &Q) -> Q {
    x.abs()
}

/// Minimum of two rationals.
pub fn qmin(a: &Q, b: &Q) -> Q {
    if a <= b { a.clone() } else { b.clone() }
}

/// Maximum of two rationals.
pub fn qmax(a: &Q, b: &Q) -> Q {
    if a >= b { a.clone() } else { b.clone() }
}

/// Serde adapter storing a rational as a `"p/q"` string.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

/// Serde adapter for vectors of rationals.
pub mod serde_qvec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(fmt_q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_q(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/6"), Some(q(1, 2)));
        assert_eq!(parse_q("-4"), Some(qi(-4)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(fmt_q(&q(2, 4)), "1/2");
        assert_eq!(fmt_q(&qi(7)), "7");
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let x = q(1, 3);
        assert!(round_down(&x, 10) <= x && x <= round_up(&x, 10));
        assert_eq!(round_down(&q(1, 4), 10), q(1, 4));
    }
}
