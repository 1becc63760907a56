//! Lazily expanded functions of prescribed rank with exact oscillation profiles.
//!
//! A [`ConstructedFunction`] is a tree. Base nodes carry a scaled full sine
//! period. Successor nodes place children on a double middle-thirds grid:
//! the outer Cantor set `C` on the node interval has gaps `G_n` (level
//! order, `n >= 1`); the closure of each `G_n` carries its own Cantor set whose
//! gaps `G_{n,m}` host the children. Limit nodes place children on dyadic
//! blocks accumulating at both endpoints.
//!
//! Every node satisfies `f = 0` at its endpoints and `F(b) = 0`, where
//! `F(x) = ∫_a^x f`. The antiderivative is nonnegative and its oscillation
//! over the node interval equals the node's target `r`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::closedset::{
    cantor_first_gap_meeting, cantor_gap, cantor_gap_containing, cantor_gap_n, cantor_locate, gap_index,
    gap_level_pos, CantorLocation, IntervalQ,
};
use crate::enclosure::{cos_2pi, pi_times, sin_2pi, Enclosure};
use crate::error::DenjoyError;
use crate::ordinal::{infinite_fiber_map, Ordinal, OrdinalKind};
use crate::rational::{inv_pow2, pow2_int, q, qi, serde_q, Q};

/// Depth beyond which tail bounds stop tightening (keeps `2^(-2^d)` representable).
pub const TAIL_DEPTH_CAP: u32 = 16;

/// Shape of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Base,
    Successor,
    Limit,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Base => "base",
            NodeKind::Successor => "successor",
            NodeKind::Limit => "limit",
        }
    }
}

/// Address of a child below its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChildKey {
    /// Successor child on inner gap `m` of outer gap `n`.
    Grid { n: u64, m: u64 },
    /// Limit child on `[u_{n+1}, u_n]`.
    Left(u64),
    /// Limit child on `[v_n, v_{n+1}]`.
    Right(u64),
}

/// Exact weight data of a node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightProfile {
    /// Oscillation of the antiderivative over the node interval.
    #[serde(with = "serde_q")]
    pub osc: Q,
    /// Lower bound on the L1 norm over the node interval.
    #[serde(with = "serde_q")]
    pub l1_lower: Q,
    /// Upper bound on the L1 norm; `None` when the child sums diverge.
    #[serde(with = "opt_q")]
    pub l1_upper: Option<Q>,
}

mod opt_q {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_str("inf"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(None);
        }
        crate::rational::parse_q(&s).map(Some).ok_or_else(|| serde::de::Error::custom("bad rational"))
    }
}

/// Serializable recipe `{"rank": "...", "interval": ["a","b"], "r": "..."}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDescriptor {
    pub rank: Ordinal,
    #[serde(with = "crate::rational::serde_qvec")]
    pub interval: Vec<Q>,
    #[serde(with = "serde_q")]
    pub r: Q,
}

impl FunctionDescriptor {
    pub fn build(&self) -> Result<ConstructedFunction, DenjoyError> {
        if self.interval.len() != 2 {
            return Err(DenjoyError::InvalidArgument("interval needs exactly two endpoints".into()));
        }
        let host = IntervalQ::new(self.interval[0].clone(), self.interval[1].clone())?;
        build_rank(&self.rank, &host, &self.r)
    }
}

struct Node {
    kind: NodeKind,
    interval: IntervalQ,
    rank: Ordinal,
    r: Q,
    profile: WeightProfile,
    children: Mutex<HashMap<ChildKey, ConstructedFunction>>,
}

/// Handle to a lazily expanded node; cheap to clone and safe to share.
#[derive(Clone)]
pub struct ConstructedFunction(Arc<Node>);

impl fmt::Debug for ConstructedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(rank {}, {}, r = {})", self.kind().name(), self.rank(), self.interval(), self.r())
    }
}

/// Builds the rank-`alpha` function on `host` with antiderivative oscillation `r`.
pub fn build_rank(alpha: &Ordinal, host: &IntervalQ, r: &Q) -> Result<ConstructedFunction, DenjoyError> {
    if r <= &Q::zero() {
        return Err(DenjoyError::InvalidArgument("r must be positive".into()));
    }
    if host.is_degenerate() {
        return Err(DenjoyError::InvalidArgument("host interval is degenerate".into()));
    }
    Ok(ConstructedFunction::node(alpha.clone(), host.clone(), r.clone()))
}

/// Unscaled schedule weight of grid child `(n, m)`: `2^-n` for `m < 2^n`,
/// then `2^-n * 2^-(m - 2^n + 1)`.
pub fn schedule_weight(n: u64, m: u64) -> Q {
    assert!(n >= 1 && m >= 1, "schedule indices start at 1");
    if n >= 63 || m < (1u64 << n) {
        inv_pow2(n)
    } else {
        inv_pow2(n + (m - (1u64 << n) + 1))
    }
}

/// Exact `sum_{m=1}^{M} schedule_weight(n, m)`.
pub fn schedule_partial_sum(n: u64, big_m: u64) -> Q {
    assert!(n >= 1, "gap indices start at 1");
    if n >= 63 || big_m < (1u64 << n) {
        return qi(big_m as i64) * inv_pow2(n);
    }
    let p = 1u64 << n;
    let head = Q::new(BigInt::from(p - 1), pow2_int(n));
    head + inv_pow2(n) * (Q::one() - inv_pow2(big_m - p + 1))
}

/// `sum_{m >= M} schedule_weight(n, m)` for `M >= 1`.
pub fn schedule_tail(n: u64, big_m: u64) -> Q {
    Q::one() - schedule_partial_sum(n, big_m - 1)
}

/// `floor(log2(1/s))` for `0 < s <= 1`, and whether `s` is an exact power of two.
fn dyadic_block(s: &Q) -> (u64, bool) {
    let num = s.denom().clone();
    let den = s.numer().clone();
    let mut n = (num.bits() as i64 - den.bits() as i64).max(0) as u64;
    while (&den << n as usize) > num {
        n -= 1;
    }
    while (&den << (n + 1) as usize) <= num {
        n += 1;
    }
    (n, (&den << n as usize) == num)
}

fn cap(d: u32) -> u32 {
    d.min(TAIL_DEPTH_CAP)
}

impl ConstructedFunction {
    fn node(rank: Ordinal, interval: IntervalQ, r: Q) -> Self {
        let kind = match rank.classify() {
            OrdinalKind::Zero => NodeKind::Base,
            OrdinalKind::Successor(_) => NodeKind::Successor,
            OrdinalKind::Limit => NodeKind::Limit,
        };
        let l1_upper = (kind == NodeKind::Base).then(|| qi(2) * &r);
        let profile = WeightProfile { osc: r.clone(), l1_lower: qi(2) * &r, l1_upper };
        ConstructedFunction(Arc::new(Node {
            kind,
            interval,
            rank,
            r,
            profile,
            children: Mutex::new(HashMap::new()),
        }))
    }

    pub fn kind(&self) -> NodeKind {
        self.0.kind
    }

    pub fn interval(&self) -> &IntervalQ {
        &self.0.interval
    }

    pub fn rank(&self) -> &Ordinal {
        &self.0.rank
    }

    /// Target oscillation of the antiderivative.
    pub fn r(&self) -> &Q {
        &self.0.r
    }

    pub fn profile(&self) -> &WeightProfile {
        &self.0.profile
    }

    pub fn descriptor(&self) -> FunctionDescriptor {
        FunctionDescriptor {
            rank: self.rank().clone(),
            interval: vec![self.interval().lo.clone(), self.interval().hi.clone()],
            r: self.r().clone(),
        }
    }

    /// Base amplitude `A = r pi / (b - a)`.
    pub fn amplitude(&self) -> Enclosure {
        pi_times(&(self.r() / self.interval().len()))
    }

    /// Midpoint `w` of a limit node.
    pub fn mid(&self) -> Q {
        self.interval().midpoint()
    }

    // ---- geometry --------------------------------------------------------

    /// Open outer gap `G_n` of a successor node.
    pub fn outer_gap(&self, n: u64) -> IntervalQ {
        cantor_gap_n(self.interval(), n)
    }

    /// Interval of grid child `(n, m)`.
    pub fn grid_interval(&self, n: u64, m: u64) -> IntervalQ {
        cantor_gap_n(&self.outer_gap(n), m)
    }

    /// `u_n = a + (w - a) 2^-n`.
    pub fn u(&self, n: u64) -> Q {
        let a = &self.interval().lo;
        a + (self.mid() - a) * inv_pow2(n)
    }

    /// `v_n = b - (b - w) 2^-n`.
    pub fn v(&self, n: u64) -> Q {
        let b = &self.interval().hi;
        b - (b - self.mid()) * inv_pow2(n)
    }

    pub fn child_interval(&self, key: ChildKey) -> IntervalQ {
        match key {
            ChildKey::Grid { n, m } => self.grid_interval(n, m),
            ChildKey::Left(n) => IntervalQ::mk(self.u(n + 1), self.u(n)),
            ChildKey::Right(n) => IntervalQ::mk(self.v(n), self.v(n + 1)),
        }
    }

    /// Oscillation assigned to a child.
    pub fn child_osc(&self, key: ChildKey) -> Q {
        match key {
            ChildKey::Grid { n, m } => qi(2) * self.r() * schedule_weight(n, m),
            ChildKey::Left(n) | ChildKey::Right(n) => self.r() / qi(n as i64 + 1),
        }
    }

    /// Oscillation of `F` over the closed outer gap `G_n`: `2 r 2^-n`.
    pub fn gap_osc(&self, n: u64) -> Q {
        qi(2) * self.r() * inv_pow2(n)
    }

    /// Rank label of a child.
    pub fn child_rank(&self, key: ChildKey) -> Ordinal {
        match (self.rank().classify(), key) {
            (OrdinalKind::Successor(p), ChildKey::Grid { .. }) => p,
            (OrdinalKind::Limit, ChildKey::Left(n) | ChildKey::Right(n)) => self
                .rank()
                .enumerate_below(infinite_fiber_map(n))
                .expect("limit rank"),
            _ => panic!("child key {key:?} does not match a {} node", self.kind().name()),
        }
    }

    /// Memoized child node.
    pub fn child(&self, key: ChildKey) -> ConstructedFunction {
        if let Some(c) = self.0.children.lock().unwrap().get(&key) {
            return c.clone();
        }
        let c = ConstructedFunction::node(self.child_rank(key), self.child_interval(key), self.child_osc(key));
        self.0.children.lock().unwrap().entry(key).or_insert(c).clone()
    }

    /// A point where `F` attains `r`.
    pub fn peak_point(&self) -> Q {
        match self.kind() {
            NodeKind::Base => self.interval().midpoint(),
            NodeKind::Successor => self.child(ChildKey::Grid { n: 1, m: 1 }).peak_point(),
            NodeKind::Limit => self.child(ChildKey::Left(0)).peak_point(),
        }
    }

    /// Max oscillation of unresolved outer gaps (index `>= 2^d`).
    pub fn outer_tail_osc(&self, d: u32) -> Q {
        self.gap_osc(1u64 << cap(d))
    }

    /// `sum_{n >= 2^d} ω(F, G_n)`.
    pub fn outer_tail_sum(&self, d: u32) -> Q {
        qi(2) * self.gap_osc(1u64 << cap(d))
    }

    /// Max oscillation of unresolved inner children of gap `n` (index `>= 2^d`).
    pub fn inner_tail_osc(&self, n: u64, d: u32) -> Q {
        self.child_osc(ChildKey::Grid { n, m: 1u64 << d.min(62) })
    }

    /// `sum_{m >= 2^d} ω(F_{nm})`.
    pub fn inner_tail_sum(&self, n: u64, d: u32) -> Q {
        qi(2) * self.r() * schedule_tail(n, 1u64 << d.min(62))
    }

    /// Limit block containing `x` in `(a, w)` or `(w, b)`: `(key, on_boundary)`.
    /// `on_boundary` means `x` is the block's outer endpoint `u_n` / `v_n`.
    pub fn limit_block(&self, x: &Q) -> Option<(ChildKey, bool)> {
        let w = self.mid();
        let iv = self.interval();
        if x <= &iv.lo || x >= &iv.hi || x == &w {
            return None;
        }
        if x < &w {
            let (n, exact) = dyadic_block(&((x - &iv.lo) / (&w - &iv.lo)));
            Some((ChildKey::Left(n), exact))
        } else {
            let (n, exact) = dyadic_block(&((&iv.hi - x) / (&iv.hi - &w)));
            Some((ChildKey::Right(n), exact))
        }
    }

    // ---- evaluation ------------------------------------------------------

    /// Enclosure of `f(x)`; `None` when `x` lies in a part unresolved at `depth`
    /// (f is unbounded near the residual set, so no finite tail bound exists).
    pub fn eval_f(&self, x: &Q, depth: u32) -> Option<Enclosure> {
        let iv = self.interval();
        assert!(iv.contains(x), "point outside the node interval");
        if x == &iv.lo || x == &iv.hi {
            return Some(Enclosure::zero());
        }
        match self.kind() {
            NodeKind::Base => {
                let s = sin_2pi(&iv.coord(x));
                if s.is_exact() && s.lo.is_zero() {
                    return Some(Enclosure::zero());
                }
                Some(self.amplitude().mul(&s))
            }
            NodeKind::Successor => match self.locate_grid(x, depth) {
                GridLoc::Zero => Some(Enclosure::zero()),
                GridLoc::Child(key) => self.child(key).eval_f(x, depth.saturating_sub(1)),
                _ => None,
            },
            NodeKind::Limit => match self.limit_block(x) {
                None => Some(Enclosure::zero()),
                Some((_, true)) => Some(Enclosure::zero()),
                Some((key, false)) => {
                    let n = match key {
                        ChildKey::Left(n) | ChildKey::Right(n) => n,
                        _ => unreachable!(),
                    };
                    if n < limit_resolved(depth) {
                        self.child(key).eval_f(x, depth.saturating_sub(1))
                    } else {
                        None
                    }
                }
            },
        }
    }

    /// Enclosure of `F(x) = ∫_a^x f`.
    pub fn eval_big_f(&self, x: &Q, depth: u32) -> Enclosure {
        let iv = self.interval();
        assert!(iv.contains(x), "point outside the node interval");
        if x == &iv.lo || x == &iv.hi {
            return Enclosure::zero();
        }
        let r = self.r();
        let e = match self.kind() {
            NodeKind::Base => {
                let c = cos_2pi(&iv.coord(x));
                (&Enclosure::exact(Q::one()) - &c).scale(&(r / qi(2)))
            }
            NodeKind::Successor => match self.locate_grid(x, depth) {
                GridLoc::Zero => Enclosure::zero(),
                GridLoc::Child(key) => self.child(key).eval_big_f(x, depth.saturating_sub(1)),
                GridLoc::DeepOuter(level) => {
                    let b = self.gap_osc(1u64 << (level - 1).min(depth).min(TAIL_DEPTH_CAP));
                    Enclosure::tail_range(Q::zero(), b.clone(), depth, b)
                }
                GridLoc::DeepInner(n, level) => {
                    let b = self.child_osc(ChildKey::Grid { n, m: 1u64 << (level - 1).min(62) });
                    Enclosure::tail_range(Q::zero(), b.clone(), depth, b)
                }
                GridLoc::Unknown => Enclosure::tail_range(Q::zero(), r.clone(), depth, r.clone()),
            },
            NodeKind::Limit => match self.limit_block(x) {
                None | Some((_, true)) => Enclosure::zero(),
                Some((key, false)) => {
                    let n = match key {
                        ChildKey::Left(n) | ChildKey::Right(n) => n,
                        _ => unreachable!(),
                    };
                    if n < limit_resolved(depth) {
                        self.child(key).eval_big_f(x, depth.saturating_sub(1))
                    } else {
                        let b = self.child_osc(key);
                        Enclosure::tail_range(Q::zero(), b.clone(), depth, b)
                    }
                }
            },
        };
        e.clamp(&Q::zero(), r)
    }

    fn locate_grid(&self, x: &Q, depth: u32) -> GridLoc {
        match cantor_locate(self.interval(), x, depth) {
            CantorLocation::InSet => GridLoc::Zero,
            CantorLocation::Deep { level } => GridLoc::DeepOuter(level),
            CantorLocation::Undetermined => GridLoc::Unknown,
            CantorLocation::Gap { level, k } => {
                let n = gap_index(level, k);
                let g = self.outer_gap(n);
                match cantor_locate(&g, x, depth) {
                    CantorLocation::InSet => GridLoc::Zero,
                    CantorLocation::Deep { level } => GridLoc::DeepInner(n, level),
                    CantorLocation::Undetermined => GridLoc::Unknown,
                    CantorLocation::Gap { level, k } => GridLoc::Child(ChildKey::Grid { n, m: gap_index(level, k) }),
                }
            }
        }
    }

    // ---- oscillation -----------------------------------------------------

    /// Upper bound on `ω(F, J)` and a candidate point near the maximum.
    pub(crate) fn osc_search(&self, j: &IntervalQ, depth: u32) -> (Q, Option<Q>) {
        if j.is_degenerate() {
            return (Q::zero(), None);
        }
        let iv = self.interval();
        let r = self.r();
        match self.kind() {
            NodeKind::Base => {
                if j == iv {
                    return (r.clone(), Some(iv.midpoint()));
                }
                let (tp, tq) = (iv.coord(&j.lo), iv.coord(&j.hi));
                let half = q(1, 2);
                let fp = self.eval_big_f(&j.lo, depth);
                let fq = self.eval_big_f(&j.hi, depth);
                let contains_peak = tp <= half && half <= tq;
                let sup = if contains_peak { r.clone() } else { fp.hi.clone().max(fq.hi.clone()) };
                let inf = if j.lo == iv.lo || j.hi == iv.hi { Q::zero() } else { fp.lo.clone().min(fq.lo.clone()) };
                let up = (sup - inf).min(r.clone()).max(Q::zero());
                (up, contains_peak.then(|| iv.midpoint()))
            }
            NodeKind::Successor => {
                if let Some((level, k)) = cantor_gap_containing(iv, j, depth) {
                    return self.gap_osc_search(gap_index(level, k), j, depth);
                }
                match cantor_first_gap_meeting(iv, j, depth) {
                    Some((level, k)) => {
                        let n = gap_index(level, k);
                        let peak = self.child(ChildKey::Grid { n, m: 1 }).peak_point();
                        (self.gap_osc(n), j.contains(&peak).then_some(peak))
                    }
                    None => (self.outer_tail_osc(depth), None),
                }
            }
            NodeKind::Limit => {
                let w = self.mid();
                let mut best: Option<ChildKey> = None;
                if j.lo < w {
                    let y = j.hi.clone().min(w.clone());
                    let key = if y == w { ChildKey::Left(0) } else { self.limit_block(&y).unwrap().0 };
                    best = Some(key);
                }
                if j.hi > w {
                    let y = j.lo.clone().max(w.clone());
                    let key = if y == w { ChildKey::Right(0) } else { self.limit_block(&y).unwrap().0 };
                    let better = match (best, key) {
                        (Some(ChildKey::Left(a)), ChildKey::Right(b)) => b < a,
                        _ => true,
                    };
                    if better {
                        best = Some(key);
                    }
                }
                let key = best.expect("nondegenerate J meets a block");
                let ci = self.child_interval(key);
                let idx = match key {
                    ChildKey::Left(n) | ChildKey::Right(n) => n,
                    _ => unreachable!(),
                };
                if ci.contains_interval(j) && idx < limit_resolved(depth) {
                    return self.child(key).osc_search(j, depth.saturating_sub(1));
                }
                let peak = if idx < limit_resolved(depth) { Some(self.child(key).peak_point()) } else { None };
                (self.child_osc(key), peak.filter(|p| j.contains(p)))
            }
        }
    }

    fn gap_osc_search(&self, n: u64, j: &IntervalQ, depth: u32) -> (Q, Option<Q>) {
        let g = self.outer_gap(n);
        if let Some((level, k)) = cantor_gap_containing(&g, j, depth) {
            let key = ChildKey::Grid { n, m: gap_index(level, k) };
            return self.child(key).osc_search(j, depth.saturating_sub(1));
        }
        match cantor_first_gap_meeting(&g, j, depth) {
            Some((level, k)) => {
                let key = ChildKey::Grid { n, m: gap_index(level, k) };
                let peak = self.child(key).peak_point();
                (self.child_osc(key), j.contains(&peak).then_some(peak))
            }
            None => (self.inner_tail_osc(n, depth), None),
        }
    }

    /// Enclosure of `ω(F, J)`.
    pub fn oscillation(&self, j: &IntervalQ, depth: u32) -> Result<Enclosure, DenjoyError> {
        if !self.interval().contains_interval(j) {
            return Err(DenjoyError::OutsideHost(j.to_string(), self.interval().to_string()));
        }
        if j.is_degenerate() {
            return Ok(Enclosure::zero());
        }
        let (upper, peak) = self.osc_search(j, depth);
        let mut pts = vec![j.lo.clone(), j.hi.clone(), j.midpoint()];
        pts.extend(peak);
        let vals: Vec<Enclosure> = pts.iter().map(|p| self.eval_big_f(p, depth)).collect();
        let max_lo = vals.iter().map(|e| e.lo.clone()).max().unwrap();
        let min_hi = vals.iter().map(|e| e.hi.clone()).min().unwrap();
        let lower = (max_lo - min_hi).max(Q::zero()).min(upper.clone());
        Ok(if lower == upper {
            Enclosure::exact(upper)
        } else {
            let gap = &upper - &lower;
            Enclosure::tail_range(lower, upper, depth, gap)
        })
    }

    /// Visits resolved Base pieces containing `x` (for spot checks).
    pub fn base_piece_at(&self, x: &Q, depth: u32) -> Option<ConstructedFunction> {
        match self.kind() {
            NodeKind::Base => Some(self.clone()),
            NodeKind::Successor => match self.locate_grid(x, depth) {
                GridLoc::Child(key) => self.child(key).base_piece_at(x, depth.saturating_sub(1)),
                _ => None,
            },
            NodeKind::Limit => match self.limit_block(x) {
                Some((key @ (ChildKey::Left(n) | ChildKey::Right(n)), false)) if n < limit_resolved(depth) => {
                    self.child(key).base_piece_at(x, depth.saturating_sub(1))
                }
                _ => None,
            },
        }
    }
}

/// Limit blocks with index below `2^depth` count as resolved.
pub fn limit_resolved(depth: u32) -> u64 {
    1u64 << depth.min(62)
}

enum GridLoc {
    Zero,
    Child(ChildKey),
    DeepOuter(u32),
    DeepInner(u64, u32),
    Unknown,
}

/// Level-order index of the first gap at a level: `2^(level-1)`.
pub fn first_index_at_level(level: u32) -> u64 {
    gap_index(level, 0)
}

/// Open gap `(level, k)` of `host`, re-exported for callers that work with grid geometry.
pub fn gap_at(host: &IntervalQ, level: u32, k: u64) -> IntervalQ {
    cantor_gap(host, level, k)
}

/// Level of a level-order gap index.
pub fn level_of(n: u64) -> u32 {
    gap_level_pos(n).0
}
