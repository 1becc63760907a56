//! Derivative operators on constructed functions: local L1 certificates, the
//! finite-sample AC* falsifier, one derivation step and rank certificates.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::closedset::{
    cantor_first_gap_meeting, cantor_gap_containing, gap_index, IntervalQ, PrePartition, SkeletonSet,
};
use crate::denfun::{limit_resolved, ChildKey, ConstructedFunction, FunctionDescriptor, NodeKind};
use crate::error::DenjoyError;
use crate::ordinal::{infinite_fiber_map, Ordinal, OrdinalKind};
use crate::rational::{inv_pow3, qi, serde_q, serde_qvec, Q};

// ---------------------------------------------------------------------------
// Local L1 certificates
// ---------------------------------------------------------------------------

/// Cantor levels searched when locating the gap that contains an interval.
const GAP_SEARCH_LEVELS: u32 = 40;

/// Outcome of [`local_l1_certificate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum L1Certificate {
    /// `∫_J |f| <= bound`.
    BoundedBy(#[serde(with = "serde_q")] Q),
    /// Infinitely many units with positive L1 mass lie in `J`; the resolved ones already sum past `lower`.
    DivergesAbove(#[serde(with = "serde_q")] Q),
}

impl L1Certificate {
    pub fn is_bounded(&self) -> bool {
        matches!(self, L1Certificate::BoundedBy(_))
    }
}

/// Certifies whether `f` is integrable in absolute value over `J`.
pub fn local_l1_certificate(fun: &ConstructedFunction, j: &IntervalQ, depth: u32) -> Result<L1Certificate, DenjoyError> {
    if !fun.interval().contains_interval(j) {
        return Err(DenjoyError::OutsideHost(j.to_string(), fun.interval().to_string()));
    }
    Ok(l1(fun, j, depth))
}

fn add_cert(a: L1Certificate, b: L1Certificate) -> L1Certificate {
    use L1Certificate::*;
    match (a, b) {
        (BoundedBy(x), BoundedBy(y)) => BoundedBy(x + y),
        (BoundedBy(x), DivergesAbove(y)) | (DivergesAbove(y), BoundedBy(x)) => DivergesAbove(x + y),
        (DivergesAbove(x), DivergesAbove(y)) => DivergesAbove(x + y),
    }
}

/// Lower bound on the L1 mass of a whole unit, resolved to `d`.
fn unit_l1_lower(node: &ConstructedFunction) -> Q {
    node.profile().l1_lower.clone()
}

fn l1(node: &ConstructedFunction, j: &IntervalQ, d: u32) -> L1Certificate {
    use L1Certificate::*;
    if j.is_degenerate() {
        return BoundedBy(Q::zero());
    }
    let iv = node.interval();
    let r = node.r();
    match node.kind() {
        NodeKind::Base => {
            if j == iv {
                BoundedBy(qi(2) * r)
            } else {
                let lip = &node.amplitude().hi * j.len();
                BoundedBy(lip.min(qi(2) * r))
            }
        }
        NodeKind::Successor => {
            if let Some((level, k)) = cantor_gap_containing(iv, j, GAP_SEARCH_LEVELS) {
                return gap_l1(node, gap_index(level, k), j, d);
            }
            // J meets the outer Cantor set in its interior: infinitely many whole gaps lie inside J.
            let mut lower = Q::zero();
            for n in 1..limit_resolved(d.min(12)) {
                let g = node.outer_gap(n);
                if j.contains_interval(&g) {
                    lower += gap_l1_lower(node, n, d);
                }
            }
            DivergesAbove(lower)
        }
        NodeKind::Limit => {
            let w = node.mid();
            let keys = limit_keys_meeting(node, j);
            let reaches_end = j.lo == iv.lo || j.hi == iv.hi;
            if reaches_end {
                let mut lower = Q::zero();
                for key in keys.iter().take(limit_resolved(d.min(12)) as usize) {
                    if j.contains_interval(&node.child_interval(*key)) {
                        lower += unit_l1_lower(&node.child(*key));
                    }
                }
                return DivergesAbove(lower);
            }
            let _ = w;
            let mut acc = BoundedBy(Q::zero());
            for key in keys {
                let ci = node.child_interval(key);
                let part = ci.intersect(j).expect("key meets J");
                acc = add_cert(acc, l1(&node.child(key), &part, d.saturating_sub(1)));
            }
            acc
        }
    }
}

/// Limit children whose interiors meet `J` (finitely many unless `J` reaches an endpoint).
fn limit_keys_meeting(node: &ConstructedFunction, j: &IntervalQ) -> Vec<ChildKey> {
    let iv = node.interval();
    let w = node.mid();
    let mut out = Vec::new();
    let block = |x: &Q| -> u64 {
        match node.limit_block(x) {
            Some((ChildKey::Left(n) | ChildKey::Right(n), _)) => n,
            _ => 0,
        }
    };
    if j.lo < w {
        let hi = j.hi.clone().min(w.clone());
        let n_hi = if hi == w { 0 } else { block(&hi) };
        let n_lo = if j.lo == iv.lo { n_hi + 64 } else { block(&j.lo) };
        for n in n_hi..=n_lo {
            let ci = node.child_interval(ChildKey::Left(n));
            if ci.interiors_meet(j) {
                out.push(ChildKey::Left(n));
            }
        }
    }
    if j.hi > w {
        let lo = j.lo.clone().max(w.clone());
        let n_lo = if lo == w { 0 } else { block(&lo) };
        let n_hi = if j.hi == iv.hi { n_lo + 64 } else { block(&j.hi) };
        for n in n_lo..=n_hi {
            let ci = node.child_interval(ChildKey::Right(n));
            if ci.interiors_meet(j) {
                out.push(ChildKey::Right(n));
            }
        }
    }
    out.sort_by_key(|k| match k {
        ChildKey::Left(n) | ChildKey::Right(n) => *n,
        _ => 0,
    });
    out
}

/// Σ over resolved children of gap `n` of their L1 lower bounds.
fn gap_l1_lower(node: &ConstructedFunction, n: u64, d: u32) -> Q {
    let mut s = Q::zero();
    for m in 1..limit_resolved(d.min(10)) {
        s += qi(2) * node.child_osc(ChildKey::Grid { n, m });
    }
    s
}

fn gap_l1(node: &ConstructedFunction, n: u64, j: &IntervalQ, d: u32) -> L1Certificate {
    use L1Certificate::*;
    let g = node.outer_gap(n);
    if let Some((level, k)) = cantor_gap_containing(&g, j, GAP_SEARCH_LEVELS) {
        let key = ChildKey::Grid { n, m: gap_index(level, k) };
        let c = node.child(key);
        let part = c.interval().intersect(j).expect("contained");
        return l1(&c, &part, d.saturating_sub(1));
    }
    if cantor_first_gap_meeting(&g, j, 60).is_none() {
        return BoundedBy(Q::zero());
    }
    let rank_one = node.rank() == &Ordinal::nat(1);
    if rank_one {
        // Children are sine pieces with L1 mass 2 * osc; the schedule sums to 1.
        BoundedBy(qi(4) * node.r())
    } else {
        let mut lower = Q::zero();
        for m in 1..limit_resolved(d.min(10)) {
            let ci = node.grid_interval(n, m);
            if j.contains_interval(&ci) {
                lower += qi(2) * node.child_osc(ChildKey::Grid { n, m });
            }
        }
        DivergesAbove(lower)
    }
}

// ---------------------------------------------------------------------------
// AC* falsifier
// ---------------------------------------------------------------------------

/// Pre-partition showing that small total length does not force small total oscillation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ACStarWitness {
    pub prepartition: PrePartition,
    #[serde(with = "serde_q")]
    pub mu_sum: Q,
    #[serde(with = "serde_q")]
    pub osc_sum_lower: Q,
}

/// Searches adjacent `K`-point intervals for a pre-partition with `Σμ < delta` and
/// certified `Σω >= epsilon`. `None` is inconclusive.
pub fn acstar_falsifier(
    fun: &ConstructedFunction,
    k_points: &[Q],
    epsilon: &Q,
    delta: &Q,
    depth: u32,
) -> Option<ACStarWitness> {
    let mut pts: Vec<Q> = k_points.iter().filter(|p| fun.interval().contains(p)).cloned().collect();
    pts.sort();
    pts.dedup();
    let mut cands: Vec<(Q, IntervalQ, Q)> = Vec::new();
    for w in pts.windows(2) {
        let j = IntervalQ::mk(w[0].clone(), w[1].clone());
        let mu = j.len();
        if &mu >= delta {
            continue;
        }
        let osc = fun.oscillation(&j, depth).ok()?.lo;
        if osc.is_positive() {
            cands.push((&osc / &mu, j, osc));
        }
    }
    cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.lo.cmp(&b.1.lo)));
    let mut chosen = Vec::new();
    let mut mu_sum = Q::zero();
    let mut osc_sum = Q::zero();
    for (_, j, osc) in cands {
        if &osc_sum >= epsilon {
            break;
        }
        let mu = j.len();
        if &(&mu_sum + &mu) >= delta {
            continue;
        }
        mu_sum += mu;
        osc_sum += osc;
        chosen.push(j);
    }
    if &osc_sum >= epsilon && !chosen.is_empty() {
        Some(ACStarWitness { prepartition: PrePartition::new(chosen).ok()?, mu_sum, osc_sum_lower: osc_sum })
    } else {
        None
    }
}

/// Endpoints of the grid children of gap `n` at inner level `lambda`.
pub fn grid_probe_points(fun: &ConstructedFunction, n: u64, lambda: u32) -> Vec<Q> {
    let mut pts = Vec::new();
    for m in (1u64 << (lambda - 1))..(1u64 << lambda) {
        let ci = fun.grid_interval(n, m);
        pts.push(ci.lo);
        pts.push(ci.hi);
    }
    pts.sort();
    pts
}

/// Scans gaps `n = 1..=max_gap` of a successor node, probing the full-oscillation
/// layer of each, and returns the first witness found.
pub fn acstar_search(
    fun: &ConstructedFunction,
    epsilon: &Q,
    delta: &Q,
    depth: u32,
    max_gap: u64,
) -> Option<(u64, ACStarWitness)> {
    if fun.kind() != NodeKind::Successor {
        return None;
    }
    for n in 1..=max_gap {
        let lambda = (n as u32).min(12);
        let pts = grid_probe_points(fun, n, lambda);
        if let Some(w) = acstar_falsifier(fun, &pts, epsilon, delta, depth) {
            return Some((n, w));
        }
    }
    None
}

/// Probe points near `x` inside `window`: grid layers of the successor gaps lying in `window`.
fn probe_near(fun: &ConstructedFunction, window: &IntervalQ, depth: u32, budget: usize) -> Vec<Q> {
    let mut pts = Vec::new();
    match fun.kind() {
        NodeKind::Successor => {
            for n in 1..limit_resolved(depth.min(12)) {
                let g = fun.outer_gap(n);
                if !window.contains_interval(&g) {
                    continue;
                }
                let lambda = (n as u32).min(depth.max(1)).min(11);
                if (1usize << lambda) * 3 + pts.len() > budget {
                    break;
                }
                pts.extend(grid_probe_points(fun, n, lambda));
            }
        }
        NodeKind::Limit => {
            for key in limit_keys_meeting(fun, window).into_iter().take(budget / 3) {
                let ci = fun.child_interval(key);
                if window.contains_interval(&ci) {
                    pts.push(ci.lo.clone());
                    pts.push(fun.child(key).peak_point());
                    pts.push(ci.hi.clone());
                }
            }
        }
        NodeKind::Base => {}
    }
    pts.sort();
    pts.dedup();
    pts
}

// ---------------------------------------------------------------------------
// One derivation step
// ---------------------------------------------------------------------------

/// Why a point was kept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MemberEvidence {
    /// `f` is not integrable near the point.
    L1Divergence {
        #[serde(with = "serde_q")]
        radius: Q,
        #[serde(with = "serde_q")]
        lower: Q,
    },
    /// `F` fails AC* near the point.
    ACStar {
        #[serde(with = "serde_q")]
        radius: Q,
        witness: ACStarWitness,
    },
}

/// A certified member of a derived set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedPoint {
    #[serde(with = "serde_q")]
    pub point: Q,
    pub evidence: MemberEvidence,
}

/// Over-approximation of the derived set together with certified members.
#[derive(Clone, Debug)]
pub struct DerivedSet {
    pub skeleton: SkeletonSet,
    /// Intervals on which both integrability and AC* are certified.
    pub removed: Vec<IntervalQ>,
    /// Points certified through L1 divergence.
    pub members_f: Vec<AnnotatedPoint>,
    /// Points certified through AC* failure.
    pub members_big_f: Vec<AnnotatedPoint>,
}

impl DerivedSet {
    /// Certified members of the combined operator: the union of both lists.
    pub fn members(&self) -> BTreeSet<Q> {
        self.members_f.iter().chain(self.members_big_f.iter()).map(|a| a.point.clone()).collect()
    }
}

/// Maximal closed intervals on which `f` is certified integrable and `F` is AC*.
pub fn certified_intervals(fun: &ConstructedFunction, depth: u32) -> Vec<IntervalQ> {
    let mut out = Vec::new();
    collect_certified(fun, depth, &mut out);
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    let mut merged: Vec<IntervalQ> = Vec::new();
    for c in out {
        match merged.last_mut() {
            Some(m) if c.lo <= m.hi => {
                if c.hi > m.hi {
                    m.hi = c.hi;
                }
            }
            _ => merged.push(c),
        }
    }
    merged
}

fn collect_certified(node: &ConstructedFunction, d: u32, out: &mut Vec<IntervalQ>) {
    match node.kind() {
        NodeKind::Base => out.push(node.interval().clone()),
        NodeKind::Successor => {
            let rank_one = node.rank() == &Ordinal::nat(1);
            for n in 1..limit_resolved(d.min(12)) {
                if rank_one {
                    let g = node.outer_gap(n);
                    out.push(g);
                } else {
                    for m in 1..limit_resolved(d.min(8)) {
                        collect_certified(&node.child(ChildKey::Grid { n, m }), d.saturating_sub(1), out);
                    }
                }
            }
        }
        NodeKind::Limit => {
            for n in 0..limit_resolved(d.min(12)) {
                for key in [ChildKey::Left(n), ChildKey::Right(n)] {
                    collect_certified(&node.child(key), d.saturating_sub(1), out);
                }
            }
        }
    }
}

/// Closed pieces of `comp` left after deleting certified interiors. A leftover
/// point is dropped when a certified interval contains it, since its whole
/// neighbourhood in `comp` is then certified.
fn subtract(comp: &IntervalQ, cert: &[IntervalQ]) -> Vec<IntervalQ> {
    let mut out = Vec::new();
    let mut cur = comp.lo.clone();
    for c in cert {
        if c.hi <= cur || c.lo >= comp.hi {
            continue;
        }
        if c.lo >= cur {
            out.push(IntervalQ::mk(cur.clone(), c.lo.clone()));
        }
        cur = c.hi.clone();
    }
    if cur <= comp.hi {
        out.push(IntervalQ::mk(cur, comp.hi.clone()));
    }
    out.retain(|p| !p.is_degenerate() || !cert.iter().any(|c| c.contains(&p.lo)));
    out
}

/// One application of the combined derivative operator to `S`.
pub fn derivative_step(fun: &ConstructedFunction, s: &SkeletonSet, depth: u32) -> Result<DerivedSet, DenjoyError> {
    if !fun.interval().contains_interval(s.host()) {
        return Err(DenjoyError::OutsideHost(s.host().to_string(), fun.interval().to_string()));
    }
    let cert = certified_intervals(fun, depth);
    let mut remaining = Vec::new();
    for comp in s.components(depth) {
        remaining.extend(subtract(&comp, &cert));
    }
    let exact = matches!(s.exhaustive_at(), Some(e) if e <= depth);
    let mut members_f = Vec::new();
    let mut members_big_f = Vec::new();
    if exact {
        let comps = s.components(depth);
        let mut seen = HashSet::new();
        let mut candidates: Vec<Q> = Vec::new();
        for p in &remaining {
            for x in [&p.lo, &p.hi] {
                if seen.insert(x.clone()) {
                    candidates.push(x.clone());
                }
            }
        }
        candidates.truncate(32);
        let l = fun.interval().len();
        for x in candidates {
            // Radii shrink geometrically; keep the neighbourhood inside one component of S.
            for k in 1..=3u64 {
                let rho = &l * inv_pow3(k);
                let j = IntervalQ::mk(
                    (&x - &rho).max(fun.interval().lo.clone()),
                    (&x + &rho).min(fun.interval().hi.clone()),
                );
                if !comps.iter().any(|c| c.contains_interval(&j)) {
                    continue;
                }
                if let L1Certificate::DivergesAbove(lower) = l1(fun, &j, depth) {
                    if members_f.iter().all(|a: &AnnotatedPoint| a.point != x) {
                        members_f.push(AnnotatedPoint {
                            point: x.clone(),
                            evidence: MemberEvidence::L1Divergence { radius: rho.clone(), lower },
                        });
                    }
                }
                let pts = probe_near(fun, &j, depth.max(5), 1600);
                let eps = fun.r() / qi(2);
                if let Some(w) = acstar_falsifier(fun, &pts, &eps, &j.len(), depth.max(5)) {
                    members_big_f.push(AnnotatedPoint {
                        point: x.clone(),
                        evidence: MemberEvidence::ACStar { radius: rho.clone(), witness: w },
                    });
                    break;
                }
            }
        }
    }
    let skeleton = SkeletonSet::from_components(s.host().clone(), remaining)?;
    Ok(DerivedSet { skeleton, removed: cert, members_f, members_big_f })
}

// ---------------------------------------------------------------------------
// Rank certificates
// ---------------------------------------------------------------------------

/// Points certified at one derivation level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelMembers {
    pub level: Ordinal,
    #[serde(with = "serde_qvec")]
    pub points: Vec<Q>,
    /// How membership was lifted to this level.
    pub reason: String,
}

/// Falsification attempt on the level-`den_layer` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotCheck {
    #[serde(with = "serde_q")]
    pub epsilon: Q,
    #[serde(with = "serde_q")]
    pub delta: Q,
    pub probe_points: usize,
    pub witness_found: bool,
}

/// Rank certificate of a constructed function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub fun: FunctionDescriptor,
    pub certified_members: Vec<LevelMembers>,
    pub vanish_level: Ordinal,
    pub den_layer: Ordinal,
    pub witnesses: Vec<AnnotatedPoint>,
    pub spot_check: SpotCheck,
}

impl RankCertificate {
    /// `(lower, upper)` with `lower < |F| <= |f,F| = upper`.
    pub fn sandwich(&self) -> (Ordinal, Ordinal) {
        (self.den_layer.clone(), self.vanish_level.clone())
    }

    /// Levels at which both host endpoints are certified.
    pub fn endpoint_levels(&self) -> Vec<Ordinal> {
        let a = &self.fun.interval[0];
        let b = &self.fun.interval[1];
        self.certified_members
            .iter()
            .filter(|l| l.points.contains(a) && l.points.contains(b))
            .map(|l| l.level.clone())
            .collect()
    }
}

/// Per-rank memo: ranks whose endpoint certificates have been established.
struct Certifier {
    probe: u64,
    done: HashSet<Ordinal>,
}

impl Certifier {
    /// Establishes `a, b ∈ D^α` for every node of rank `α` (the construction is
    /// affine-invariant, so one representative per rank suffices).
    fn certify(&mut self, alpha: &Ordinal) -> Result<(), DenjoyError> {
        if self.done.contains(alpha) {
            return Ok(());
        }
        match alpha.classify() {
            OrdinalKind::Zero => {}
            OrdinalKind::Successor(beta) => {
                if self.probe < 4 {
                    return Err(DenjoyError::ProbeTooSmall(format!(
                        "rank {alpha}: need max_probe >= 4 to see three terms of the leftmost-gap subsequence"
                    )));
                }
                self.certify(&beta)?;
            }
            OrdinalKind::Limit => {
                let fibers = self.probed_fibers();
                if fibers.is_empty() {
                    return Err(DenjoyError::ProbeTooSmall(format!(
                        "rank {alpha}: need max_probe >= 6 so some fiber of the enumeration has three indices"
                    )));
                }
                for n in 0..self.probe {
                    let child_rank = alpha.enumerate_below(infinite_fiber_map(n)).expect("limit");
                    self.certify(&child_rank)?;
                }
            }
        }
        self.done.insert(alpha.clone());
        Ok(())
    }

    /// Fibers `k` with at least three indices below the probe bound, with those indices.
    fn probed_fibers(&self) -> BTreeMap<u64, Vec<u64>> {
        let mut m: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for n in 0..self.probe {
            m.entry(infinite_fiber_map(n)).or_default().push(n);
        }
        m.retain(|_, v| v.len() >= 3);
        m
    }
}

/// Certifies rank data by structural recursion over the construction.
pub fn rank_certify(fun: &ConstructedFunction, max_probe: u64) -> Result<RankCertificate, DenjoyError> {
    let alpha = fun.rank().clone();
    let mut cz = Certifier { probe: max_probe, done: HashSet::new() };
    cz.certify(&alpha)?;
    let iv = fun.interval().clone();
    let (a, b) = (iv.lo.clone(), iv.hi.clone());
    let mut levels: Vec<LevelMembers> = Vec::new();
    let mut witnesses = Vec::new();
    match alpha.classify() {
        OrdinalKind::Zero => levels.push(LevelMembers {
            level: Ordinal::zero(),
            points: vec![a.clone(), b.clone()],
            reason: "initial set".into(),
        }),
        OrdinalKind::Successor(beta) => {
            let p = max_probe;
            let mut child_pts = Vec::new();
            let mut gap_pts = Vec::new();
            for n in 1..=p {
                for m in 1..=p {
                    let ci = fun.grid_interval(n, m);
                    child_pts.push(ci.lo);
                    child_pts.push(ci.hi);
                }
                let g = fun.outer_gap(n);
                gap_pts.push(g.lo);
                gap_pts.push(g.hi);
            }
            child_pts.sort();
            levels.push(LevelMembers {
                level: beta.clone(),
                points: child_pts,
                reason: "endpoints of grid children of rank beta".into(),
            });
            let mut lifted = gap_pts.clone();
            lifted.sort();
            levels.push(LevelMembers {
                level: beta.clone(),
                points: lifted,
                reason: "limits of leftmost/rightmost child endpoints at successive inner levels".into(),
            });
            let mut top = gap_pts;
            top.push(a.clone());
            top.push(b.clone());
            top.sort();
            levels.push(LevelMembers {
                level: alpha.clone(),
                points: top,
                reason: "outer Cantor points: every neighbourhood holds a whole gap grid with oscillation sum r/2 and arbitrarily small length".into(),
            });
            if beta.is_zero() {
                let eps = fun.r() / qi(2);
                let delta = iv.len() * inv_pow3(2);
                if let Some((_, w)) = acstar_search(fun, &eps, &delta, 8, 8) {
                    witnesses.push(AnnotatedPoint {
                        point: a.clone(),
                        evidence: MemberEvidence::ACStar { radius: delta.clone(), witness: w },
                    });
                }
            }
        }
        OrdinalKind::Limit => {
            for (k, ns) in cz.probed_fibers() {
                let lvl = alpha.enumerate_below(k).expect("limit");
                let mut pts: Vec<Q> = ns.iter().flat_map(|&n| [fun.u(n), fun.v(n)]).collect();
                pts.push(a.clone());
                pts.push(b.clone());
                pts.sort();
                levels.push(LevelMembers {
                    level: lvl,
                    points: pts,
                    reason: format!("endpoints u_n, v_n of children with h(n) = {k} accumulate at a, b"),
                });
            }
            levels.push(LevelMembers {
                level: alpha.clone(),
                points: vec![a.clone(), b.clone()],
                reason: "intersection over all lower levels (every fiber of h is infinite)".into(),
            });
        }
    }
    levels.sort_by(|x, y| x.level.cmp(&y.level));
    // Spot check: level-alpha points bracket no interval with large oscillation and small length.
    let top: Vec<Q> = levels.last().map(|l| l.points.clone()).unwrap_or_default();
    let eps = fun.r() / qi(2);
    let delta = iv.len() * inv_pow3(3);
    let found = acstar_falsifier(fun, &top, &eps, &delta, 6).is_some();
    let spot_check = SpotCheck { epsilon: eps, delta, probe_points: top.len(), witness_found: found };
    Ok(RankCertificate {
        fun: fun.descriptor(),
        certified_members: levels,
        vanish_level: alpha.succ(),
        den_layer: alpha,
        witnesses,
        spot_check,
    })
}
