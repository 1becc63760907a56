//! Closed subsets of a rational interval described by their complementary gaps.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::DenjoyError;
use crate::rational::{fmt_q, pow2_int, pow3_int, qi, serde_q, Q};

/// Closed rational interval `[lo, hi]`; also used for open gaps `(lo, hi)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct IntervalQ {
    #[serde(with = "serde_q")]
    pub lo: Q,
    #[serde(with = "serde_q")]
    pub hi: Q,
}

impl IntervalQ {
    pub fn new(lo: Q, hi: Q) -> Result<Self, DenjoyError> {
        if lo > hi {
            return Err(DenjoyError::InvalidArgument(format!(
                "interval endpoints out of order: [{}, {}]",
                fmt_q(&lo),
                fmt_q(&hi)
            )));
        }
        Ok(IntervalQ { lo, hi })
    }

    /// Unchecked constructor for internal use where `lo <= hi` is known.
    pub(crate) fn mk(lo: Q, hi: Q) -> Self {
        debug_assert!(lo <= hi);
        IntervalQ { lo, hi }
    }

    pub fn unit() -> Self {
        IntervalQ::mk(qi(0), qi(1))
    }

    /// Lebesgue measure `hi - lo`.
    pub fn len(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> Q {
        (&self.lo + &self.hi) / qi(2)
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_open(&self, x: &Q) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn contains_interval(&self, j: &IntervalQ) -> bool {
        self.lo <= j.lo && j.hi <= self.hi
    }

    /// True when the open interiors intersect.
    pub fn interiors_meet(&self, j: &IntervalQ) -> bool {
        self.lo < j.hi && j.lo < self.hi
    }

    /// Closed intersection, if nonempty.
    pub fn intersect(&self, j: &IntervalQ) -> Option<IntervalQ> {
        let lo = if self.lo >= j.lo { &self.lo } else { &j.lo };
        let hi = if self.hi <= j.hi { &self.hi } else { &j.hi };
        (lo <= hi).then(|| IntervalQ::mk(lo.clone(), hi.clone()))
    }

    /// The point `lo + t * len`.
    pub fn at(&self, t: &Q) -> Q {
        &self.lo + t * self.len()
    }

    /// Affine coordinate of `x`, `(x - lo) / len`.
    pub fn coord(&self, x: &Q) -> Q {
        (x - &self.lo) / self.len()
    }

    /// Maps a sub-interval of `[0,1]` into this interval.
    pub fn sub(&self, t0: &Q, t1: &Q) -> IntervalQ {
        IntervalQ::mk(self.at(t0), self.at(t1))
    }
}

impl fmt::Display for IntervalQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_q(&self.lo), fmt_q(&self.hi))
    }
}

// ---------------------------------------------------------------------------
// Middle-thirds Cantor geometry
// ---------------------------------------------------------------------------

/// Level-order index of the gap at `(level, k)`: `2^(level-1) + k`.
pub fn gap_index(level: u32, k: u64) -> u64 {
    (1u64 << (level - 1)) + k
}

/// Inverse of [`gap_index`].
pub fn gap_level_pos(n: u64) -> (u32, u64) {
    assert!(n >= 1, "gap indices start at 1");
    let level = 64 - n.leading_zeros();
    (level, n - (1u64 << (level - 1)))
}

/// Numerator `sum bit_i * 2 * 3^(d-i)` for the level-`d` address `k`.
fn address_numer(k: u64, d: u32) -> BigInt {
    let mut n = BigInt::zero();
    for i in 1..=d {
        let bit = (k >> (d - i)) & 1;
        n *= 3;
        if bit == 1 {
            n += 2;
        }
    }
    n
}

/// Open gap `(level, k)` of the middle-thirds set on `host`.
pub fn cantor_gap(host: &IntervalQ, level: u32, k: u64) -> IntervalQ {
    let n = address_numer(k, level - 1) * 3;
    let den = pow3_int(level as u64);
    let t0 = Q::new(&n + 1, den.clone());
    let t1 = Q::new(n + 2, den);
    host.sub(&t0, &t1)
}

/// Open gap with level-order index `n`.
pub fn cantor_gap_n(host: &IntervalQ, n: u64) -> IntervalQ {
    let (l, k) = gap_level_pos(n);
    cantor_gap(host, l, k)
}

/// Closed level-`d` construction interval with address `k`.
pub fn cantor_piece(host: &IntervalQ, d: u32, k: u64) -> IntervalQ {
    let n = address_numer(k, d);
    let den = pow3_int(d as u64);
    host.sub(&Q::new(n.clone(), den.clone()), &Q::new(n + 1, den))
}

/// Position of a point relative to the middle-thirds set on a host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CantorLocation {
    /// Strictly inside gap `(level, k)` with `level <= max_level`.
    Gap { level: u32, k: u64 },
    /// Strictly inside a gap deeper than `max_level`.
    Deep { level: u32 },
    /// In the Cantor set (eventually periodic ternary expansion avoiding 1s).
    InSet,
    /// Ternary scan did not settle within the hard cap.
    Undetermined,
}

/// Hard cap on ternary digits scanned when deciding membership.
pub const TERNARY_SCAN_CAP: u32 = 4096;

/// Locates `x` (inside `host`) relative to the middle-thirds set.
pub fn cantor_locate(host: &IntervalQ, x: &Q, max_level: u32) -> CantorLocation {
    let third = Q::new(BigInt::one(), BigInt::from(3));
    let two_thirds = Q::new(BigInt::from(2), BigInt::from(3));
    let mut t = host.coord(x);
    let mut seen: HashSet<Q> = HashSet::new();
    let mut k: u64 = 0;
    for level in 1..=TERNARY_SCAN_CAP {
        if t > third && t < two_thirds {
            return if level <= max_level {
                CantorLocation::Gap { level, k }
            } else {
                CantorLocation::Deep { level }
            };
        }
        if !seen.insert(t.clone()) {
            return CantorLocation::InSet;
        }
        let bit = if t <= third { 0 } else { 1 };
        t = &t * qi(3) - qi(2 * bit as i64);
        if level < 63 {
            k = (k << 1) | bit;
        }
    }
    CantorLocation::Undetermined
}

/// Least level-order gap (at levels `<= max_level`) whose interior meets the interior of `j`.
pub fn cantor_first_gap_meeting(host: &IntervalQ, j: &IntervalQ, max_level: u32) -> Option<(u32, u64)> {
    if j.is_degenerate() || !host.interiors_meet(j) {
        return None;
    }
    let mut frontier: Vec<(IntervalQ, u64)> = vec![(host.clone(), 0)];
    for level in 1..=max_level {
        for (piece, k) in &frontier {
            let l3 = piece.len() / qi(3);
            let gap = IntervalQ::mk(&piece.lo + &l3, &piece.hi - &l3);
            if gap.interiors_meet(j) {
                return Some((level, *k));
            }
        }
        let mut next = Vec::new();
        for (piece, k) in frontier {
            let l3 = piece.len() / qi(3);
            let left = IntervalQ::mk(piece.lo.clone(), &piece.lo + &l3);
            let right = IntervalQ::mk(&piece.hi - &l3, piece.hi.clone());
            if left.interiors_meet(j) {
                next.push((left, k << 1));
            }
            if right.interiors_meet(j) {
                next.push((right, (k << 1) | 1));
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    None
}

/// Gap `(level, k)` with `level <= max_level` whose closure contains `j`, if any.
pub fn cantor_gap_containing(host: &IntervalQ, j: &IntervalQ, max_level: u32) -> Option<(u32, u64)> {
    match cantor_locate(host, &j.midpoint(), max_level) {
        CantorLocation::Gap { level, k } => {
            let g = cantor_gap(host, level, k);
            g.contains_interval(j).then_some((level, k))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Skeleton sets
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Full,
    Finite(Vec<Q>),
    Cantor,
    Explicit(Vec<IntervalQ>),
    Clip(Box<SkeletonSet>),
}

/// Closed subset of `host` presented through its complementary open gaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonSet {
    host: IntervalQ,
    kind: Kind,
    empty: bool,
}

impl SkeletonSet {
    /// The whole host interval.
    pub fn interval(host: IntervalQ) -> Self {
        SkeletonSet { host, kind: Kind::Full, empty: false }
    }

    /// Middle-thirds Cantor set on `host`.
    pub fn cantor(host: IntervalQ) -> Self {
        SkeletonSet { host, kind: Kind::Cantor, empty: false }
    }

    /// A finite set of points of `host`. Gaps are open subintervals of the open
    /// host, so the host endpoints always belong to the skeleton.
    pub fn finite(host: IntervalQ, mut points: Vec<Q>) -> Result<Self, DenjoyError> {
        if let Some(p) = points.iter().find(|p| !host.contains(p)) {
            return Err(DenjoyError::OutsideHost(fmt_q(p), host.to_string()));
        }
        points.sort();
        points.dedup();
        let empty = points.is_empty();
        Ok(SkeletonSet { host, kind: Kind::Finite(points), empty })
    }

    /// A finite union of closed intervals (points allowed as degenerate intervals).
    pub fn from_components(host: IntervalQ, mut comps: Vec<IntervalQ>) -> Result<Self, DenjoyError> {
        if let Some(c) = comps.iter().find(|c| !host.contains_interval(c)) {
            return Err(DenjoyError::OutsideHost(c.to_string(), host.to_string()));
        }
        comps.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
        let mut merged: Vec<IntervalQ> = Vec::new();
        for c in comps {
            match merged.last_mut() {
                Some(m) if c.lo <= m.hi => {
                    if c.hi > m.hi {
                        m.hi = c.hi;
                    }
                }
                _ => merged.push(c),
            }
        }
        let empty = merged.is_empty();
        Ok(SkeletonSet { host, kind: Kind::Explicit(merged), empty })
    }

    pub fn host(&self) -> &IntervalQ {
        &self.host
    }

    /// Set when the set is known to be empty or to have empty interior.
    pub fn is_flagged_empty(&self) -> bool {
        self.empty
    }

    /// Depth from which the gap list is complete, if any.
    pub fn exhaustive_at(&self) -> Option<u32> {
        match &self.kind {
            Kind::Full | Kind::Finite(_) | Kind::Explicit(_) => Some(0),
            Kind::Cantor => None,
            Kind::Clip(base) => base.exhaustive_at(),
        }
    }

    /// Gaps in generation order; the list at depth `d` is a prefix of the list at `d + 1`.
    pub fn gap_sequence(&self, depth: u32) -> Vec<IntervalQ> {
        match &self.kind {
            Kind::Full => Vec::new(),
            Kind::Finite(pts) => flank_gaps(&self.host, pts.iter().map(|p| IntervalQ::mk(p.clone(), p.clone()))),
            Kind::Explicit(cs) => flank_gaps(&self.host, cs.iter().cloned()),
            Kind::Cantor => {
                let mut out = Vec::new();
                for level in 1..=depth {
                    for k in 0..(1u64 << (level - 1)) {
                        out.push(cantor_gap(&self.host, level, k));
                    }
                }
                out
            }
            Kind::Clip(base) => {
                if self.empty {
                    return if self.host.is_degenerate() { Vec::new() } else { vec![self.host.clone()] };
                }
                base.gap_sequence(depth)
                    .into_iter()
                    .filter_map(|g| {
                        let c = g.intersect(&self.host)?;
                        (!c.is_degenerate()).then_some(c)
                    })
                    .collect()
            }
        }
    }

    /// Depth-`d` gaps, disjoint and sorted by left endpoint.
    pub fn gaps(&self, depth: u32) -> Vec<IntervalQ> {
        let mut g = self.gap_sequence(depth);
        g.sort_by(|a, b| a.lo.cmp(&b.lo));
        g
    }

    /// Closed components of `host` minus the depth-`d` gaps.
    pub fn components(&self, depth: u32) -> Vec<IntervalQ> {
        if self.empty && !matches!(self.kind, Kind::Finite(_)) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut cur = self.host.lo.clone();
        for g in self.gaps(depth) {
            if g.lo >= cur {
                out.push(IntervalQ::mk(cur.clone(), g.lo.clone()));
            }
            cur = g.hi.clone();
        }
        if cur <= self.host.hi {
            out.push(IntervalQ::mk(cur, self.host.hi.clone()));
        }
        out
    }

    /// Closure-preserving intersection with `j`; the result has host `j`.
    pub fn intersect_interval(&self, j: &IntervalQ, depth: u32) -> Result<SkeletonSet, DenjoyError> {
        if !self.host.contains_interval(j) {
            return Err(DenjoyError::OutsideHost(j.to_string(), self.host.to_string()));
        }
        if j == &self.host {
            return Ok(self.clone());
        }
        let inside_gap = self.gaps(depth).iter().any(|g| g.lo <= j.lo && j.hi <= g.hi && g.interiors_meet(j));
        let empty = self.empty || inside_gap;
        Ok(SkeletonSet { host: j.clone(), kind: Kind::Clip(Box::new(self.clone())), empty })
    }

    /// `(lower, upper)` bounds on the Lebesgue measure.
    pub fn measure_bounds(&self, depth: u32) -> (Q, Q) {
        let gap_sum: Q = self.gaps(depth).iter().map(|g| g.len()).sum();
        let upper = self.host.len() - gap_sum;
        match self.exhaustive_at() {
            Some(e) if e <= depth => (upper.clone(), upper),
            _ => (Q::zero(), upper),
        }
    }

    /// Serializes the depth-`d` view as `{"host":[a,b],"depth":d,"gaps":[[c,d],...]}`.
    pub fn to_json(&self, depth: u32) -> serde_json::Value {
        let gaps: Vec<serde_json::Value> = self
            .gaps(depth)
            .iter()
            .map(|g| serde_json::json!([fmt_q(&g.lo), fmt_q(&g.hi)]))
            .collect();
        serde_json::json!({
            "host": [fmt_q(&self.host.lo), fmt_q(&self.host.hi)],
            "depth": depth,
            "gaps": gaps,
        })
    }
}

/// Open gaps between sorted closed pieces, including the two flanks.
fn flank_gaps(host: &IntervalQ, pieces: impl Iterator<Item = IntervalQ>) -> Vec<IntervalQ> {
    let mut out = Vec::new();
    let mut cur: Option<Q> = None;
    let mut any = false;
    for p in pieces {
        any = true;
        let start = cur.clone().unwrap_or_else(|| host.lo.clone());
        if p.lo > start {
            out.push(IntervalQ::mk(start, p.lo.clone()));
        }
        cur = Some(p.hi.clone());
    }
    if !any {
        if !host.is_degenerate() {
            out.push(host.clone());
        }
        return out;
    }
    let end = cur.unwrap();
    if end < host.hi {
        out.push(IntervalQ::mk(end, host.hi.clone()));
    }
    out
}

// ---------------------------------------------------------------------------
// Pre-partitions
// ---------------------------------------------------------------------------

/// Finite nonempty family of closed intervals, sorted by left endpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrePartition {
    pub intervals: Vec<IntervalQ>,
}

impl PrePartition {
    pub fn new(mut intervals: Vec<IntervalQ>) -> Result<Self, DenjoyError> {
        if intervals.is_empty() {
            return Err(DenjoyError::InvalidArgument("empty pre-partition".into()));
        }
        intervals.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
        Ok(PrePartition { intervals })
    }

    /// Total length.
    pub fn mu(&self) -> Q {
        self.intervals.iter().map(|j| j.len()).sum()
    }
}

/// Checks non-overlap (shared endpoints allowed), containment in `host`, and endpoints in `k_points`.
pub fn validate_prepartition(p: &PrePartition, k_points: &[Q], host: &IntervalQ) -> bool {
    let mut iv = p.intervals.clone();
    iv.sort_by(|a, b| a.lo.cmp(&b.lo));
    let in_k = |x: &Q| k_points.binary_search(x).is_ok();
    iv.iter().all(|j| host.contains_interval(j) && in_k(&j.lo) && in_k(&j.hi))
        && iv.windows(2).all(|w| w[0].hi <= w[1].lo)
}

/// Number of level-`d` construction pieces, `2^d`.
pub fn pieces_at(d: u32) -> BigInt {
    pow2_int(d as u64)
}
