//! Structural integration and checks of the gap-summation and improper-limit identities.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closedset::{cantor_gap_containing, cantor_locate, gap_index, CantorLocation, IntervalQ};
use crate::denfun::{limit_resolved, ChildKey, ConstructedFunction, FunctionDescriptor, NodeKind};
use crate::enclosure::{pi_bounds, Enclosure};
use crate::error::DenjoyError;
use crate::rational::{inv_pow2, qi, serde_q, Q};

/// One named inequality together with the rationals it was decided on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Enclosure,
    #[serde(with = "serde_q")]
    pub tolerance: Q,
    pub pass: bool,
}

/// Outcome of a verification run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: FunctionDescriptor,
    pub depth: u32,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

fn sym(bound: Q, depth: u32) -> Enclosure {
    if bound.is_zero() {
        Enclosure::zero()
    } else {
        Enclosure::tail(depth, bound)
    }
}

/// Enclosure of `∫_J f`, summing resolved pieces structurally and bounding
/// unresolved pieces by their oscillation. Intersected over depths `0..=depth`
/// so refinements nest.
pub fn integrate(fun: &ConstructedFunction, j: &IntervalQ, depth: u32) -> Result<Enclosure, DenjoyError> {
    if !fun.interval().contains_interval(j) {
        return Err(DenjoyError::OutsideHost(j.to_string(), fun.interval().to_string()));
    }
    let mut acc = integ(fun, &j.lo, &j.hi, 0);
    for d in 1..=depth {
        let e = integ(fun, &j.lo, &j.hi, d);
        acc = e.clamp(&acc.lo, &acc.hi);
    }
    Ok(acc)
}

fn integ(node: &ConstructedFunction, p: &Q, q: &Q, d: u32) -> Enclosure {
    if p == q {
        return Enclosure::zero();
    }
    let iv = node.interval();
    let r = node.r();
    let e = match node.kind() {
        NodeKind::Base => {
            if p == &iv.lo && q == &iv.hi {
                Enclosure::zero()
            } else {
                &node.eval_big_f(q, d) - &node.eval_big_f(p, d)
            }
        }
        NodeKind::Successor => successor_integ(node, p, q, d),
        NodeKind::Limit => limit_integ(node, p, q, d),
    };
    e.clamp(&-r.clone(), r)
}

fn successor_integ(node: &ConstructedFunction, p: &Q, q: &Q, d: u32) -> Enclosure {
    let iv = node.interval();
    let j = IntervalQ::mk(p.clone(), q.clone());
    if let Some((level, k)) = cantor_gap_containing(iv, &j, d) {
        return gap_integ(node, gap_index(level, k), p, q, d);
    }
    if deep_gap_containing(iv, &j).is_some() {
        return sym(node.outer_tail_osc(d), d);
    }
    let mut total = sym(node.outer_tail_sum(d), d);
    if let CantorLocation::Gap { level, k } = cantor_locate(iv, p, d) {
        let n = gap_index(level, k);
        let g = node.outer_gap(n);
        total = &total + &gap_integ(node, n, p, &g.hi, d);
    }
    if let CantorLocation::Gap { level, k } = cantor_locate(iv, q, d) {
        let n = gap_index(level, k);
        let g = node.outer_gap(n);
        total = &total + &gap_integ(node, n, &g.lo, q, d);
    }
    total
}

/// Gap (at any level) whose closure contains `j`.
fn deep_gap_containing(host: &IntervalQ, j: &IntervalQ) -> Option<(u32, u64)> {
    cantor_gap_containing(host, j, crate::closedset::TERNARY_SCAN_CAP)
}

/// `∫_p^q` inside the closure of outer gap `n`.
fn gap_integ(node: &ConstructedFunction, n: u64, p: &Q, q: &Q, d: u32) -> Enclosure {
    if p == q {
        return Enclosure::zero();
    }
    let g = node.outer_gap(n);
    let j = IntervalQ::mk(p.clone(), q.clone());
    let child_depth = d.saturating_sub(1);
    let e = if let Some((level, k)) = cantor_gap_containing(&g, &j, d) {
        let key = ChildKey::Grid { n, m: gap_index(level, k) };
        integ(&node.child(key), p, q, child_depth)
    } else if deep_gap_containing(&g, &j).is_some() {
        sym(node.inner_tail_osc(n, d), d)
    } else {
        let mut total = sym(node.inner_tail_sum(n, d), d);
        if let CantorLocation::Gap { level, k } = cantor_locate(&g, p, d) {
            let key = ChildKey::Grid { n, m: gap_index(level, k) };
            let c = node.child(key);
            total = &total + &integ(&c, p, &c.interval().hi.clone(), child_depth);
        }
        if let CantorLocation::Gap { level, k } = cantor_locate(&g, q, d) {
            let key = ChildKey::Grid { n, m: gap_index(level, k) };
            let c = node.child(key);
            total = &total + &integ(&c, &c.interval().lo.clone(), q, child_depth);
        }
        total
    };
    let w = node.gap_osc(n);
    e.clamp(&-w.clone(), &w)
}

fn limit_integ(node: &ConstructedFunction, p: &Q, q: &Q, d: u32) -> Enclosure {
    let iv = node.interval();
    let w = node.mid();
    let big_n = limit_resolved(d);
    let child_depth = d.saturating_sub(1);
    let tail = node.r() / Q::from_integer(num_bigint::BigInt::from(big_n) + 1);
    let mut total = Enclosure::zero();
    let idx = |k: ChildKey| match k {
        ChildKey::Left(n) | ChildKey::Right(n) => n,
        _ => unreachable!(),
    };
    let piece = |key: ChildKey, lo: &Q, hi: &Q, total: &mut Enclosure| {
        if idx(key) < big_n {
            *total = &*total + &integ(&node.child(key), lo, hi, child_depth);
        }
    };
    // Left half [a, w].
    if p < &w {
        let lo = p.clone();
        let hi = q.clone().min(w.clone());
        let lo_blk = (lo != iv.lo).then(|| node.limit_block(&lo).unwrap()).filter(|(_, b)| !b).map(|(k, _)| k);
        let hi_blk = (hi != w).then(|| node.limit_block(&hi).unwrap()).filter(|(_, b)| !b).map(|(k, _)| k);
        match (lo_blk, hi_blk) {
            (Some(a), Some(b)) if a == b => piece(a, &lo, &hi, &mut total),
            (a, b) => {
                if let Some(k) = a {
                    let end = node.child_interval(k).hi;
                    piece(k, &lo, &end, &mut total);
                }
                if let Some(k) = b {
                    let start = node.child_interval(k).lo;
                    piece(k, &start, &hi, &mut total);
                }
            }
        }
        let u = node.u(big_n);
        if lo < u {
            // F >= 0 and vanishes at u_N: crossing the tail gives -F(lo).
            let t = if hi < u { sym(tail.clone(), d) } else { Enclosure::tail_range(-tail.clone(), Q::zero(), d, tail.clone()) };
            total = &total + &t;
        }
    }
    // Right half [w, b].
    if q > &w {
        let lo = p.clone().max(w.clone());
        let hi = q.clone();
        let lo_blk = (lo != w).then(|| node.limit_block(&lo).unwrap()).filter(|(_, b)| !b).map(|(k, _)| k);
        let hi_blk = (hi != iv.hi).then(|| node.limit_block(&hi).unwrap()).filter(|(_, b)| !b).map(|(k, _)| k);
        match (lo_blk, hi_blk) {
            (Some(a), Some(b)) if a == b => piece(a, &lo, &hi, &mut total),
            (a, b) => {
                if let Some(k) = a {
                    let end = node.child_interval(k).hi;
                    piece(k, &lo, &end, &mut total);
                }
                if let Some(k) = b {
                    let start = node.child_interval(k).lo;
                    piece(k, &start, &hi, &mut total);
                }
            }
        }
        let v = node.v(big_n);
        if hi > v {
            let t = if lo > v { sym(tail, d) } else { Enclosure::tail_range(Q::zero(), tail.clone(), d, tail) };
            total = &total + &t;
        }
    }
    total
}

fn expect_kind(fun: &ConstructedFunction, kind: NodeKind) -> Result<(), DenjoyError> {
    if fun.kind() != kind {
        return Err(DenjoyError::WrongNodeKind { expected: kind.name(), found: fun.kind().name() });
    }
    Ok(())
}

/// Checks the gap decomposition of a successor node at `depth`.
pub fn verify_step(node: &ConstructedFunction, depth: u32) -> Result<VerificationReport, DenjoyError> {
    expect_kind(node, NodeKind::Successor)?;
    let host = node.interval().clone();
    let whole = integrate(node, &host, depth)?;
    let resolved = (1u64 << depth.min(20)) - 1;
    let child_depth = depth.saturating_sub(1);
    let mut step_sum = sym(node.outer_tail_sum(depth), depth);
    let mut checks = Vec::new();
    let mut osc_sum = Q::zero();
    for n in 1..=resolved {
        let mut gap_total = sym(node.inner_tail_sum(n, depth), depth);
        for m in 1..=resolved {
            let c = node.child(ChildKey::Grid { n, m });
            gap_total = &gap_total + &integrate(&c, &c.interval().clone(), child_depth)?;
        }
        let w = node.gap_osc(n);
        step_sum = &step_sum + &gap_total.clamp(&-w.clone(), &w);
        let g = node.outer_gap(n);
        let osc = node.oscillation(&g, depth)?;
        osc_sum += &osc.hi;
        checks.push(Check { name: format!("gap_{n}_oscillation"), pass: osc.hi <= w, value: osc, tolerance: w });
    }
    let residual = Enclosure::zero();
    step_sum = &step_sum + &residual;
    checks.push(Check {
        name: "residual_set_contribution".into(),
        value: residual,
        tolerance: Q::zero(),
        pass: true,
    });
    checks.push(Check {
        name: "step_sum_contains_integral".into(),
        pass: step_sum.contains_enclosure(&whole) && step_sum.contains(&Q::zero()),
        tolerance: step_sum.width(),
        value: step_sum,
    });
    checks.push(Check {
        name: "integral_contains_zero".into(),
        pass: whole.contains(&Q::zero()),
        tolerance: whole.width(),
        value: whole,
    });
    let bound = qi(2) * node.r();
    checks.push(Check {
        name: format!("oscillation_partial_sum_{resolved}"),
        pass: osc_sum <= bound,
        value: Enclosure::tail_range(Q::zero(), osc_sum.clone(), depth, osc_sum),
        tolerance: bound,
    });
    Ok(VerificationReport { subject: node.descriptor(), depth, checks })
}

/// Checks `|∫_c^w f| <= r/n` for `c` in the `n`-th block on both sides, `n = 1..=N`.
pub fn verify_improper(node: &ConstructedFunction, big_n: u64) -> Result<VerificationReport, DenjoyError> {
    expect_kind(node, NodeKind::Limit)?;
    let depth = (64 - (big_n + 1).leading_zeros()) + 1;
    let w = node.mid();
    let mut checks = Vec::new();
    let fractions = [qi(0), Q::new(1.into(), 4.into()), Q::new(1.into(), 2.into()), Q::new(3.into(), 4.into())];
    for n in 1..=big_n {
        let tol = node.r() / qi(n as i64);
        for side in [ChildKey::Left(n), ChildKey::Right(n)] {
            let ci = node.child_interval(side);
            let mut worst: Option<Enclosure> = None;
            for t in &fractions {
                let e = match side {
                    ChildKey::Left(_) => {
                        let c = &ci.hi - t * ci.len();
                        integrate(node, &IntervalQ::mk(c, w.clone()), depth)?
                    }
                    _ => {
                        let c = &ci.lo + t * ci.len();
                        integrate(node, &IntervalQ::mk(w.clone(), c), depth)?
                    }
                };
                if worst.as_ref().is_none_or(|x| e.abs_upper() > x.abs_upper()) {
                    worst = Some(e);
                }
            }
            let worst = worst.unwrap();
            let name = match side {
                ChildKey::Left(_) => format!("left_{n}"),
                _ => format!("right_{n}"),
            };
            checks.push(Check { name, pass: worst.abs_upper() <= tol, value: worst, tolerance: tol.clone() });
        }
    }
    Ok(VerificationReport { subject: node.descriptor(), depth, checks })
}

/// Upper bound on `sup |F''|` over a Base piece: `2 pi^2 r / L^2`.
pub fn second_derivative_bound(piece: &ConstructedFunction) -> Q {
    let ph = &pi_bounds().1;
    let l = piece.interval().len();
    qi(2) * ph * ph * piece.r() / (&l * &l)
}

/// Finite-difference check `|(F(x+h) - F(x))/h - f(x)| <= C h` at random points of Base pieces.
pub fn ftc_spotcheck(
    fun: &ConstructedFunction,
    samples: usize,
    h: &Q,
    depth: u32,
    seed: u64,
) -> Result<VerificationReport, DenjoyError> {
    if !h.is_positive() {
        return Err(DenjoyError::InvalidArgument("h must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let host = fun.interval().clone();
    let scale = inv_pow2(32);
    let mut checks = Vec::new();
    let mut max_res = Q::zero();
    let mut attempts = 0usize;
    while checks.len() < samples && attempts < 200 * samples.max(1) {
        attempts += 1;
        let k: u64 = rng.gen_range(1..(1u64 << 32));
        let x = host.at(&(qi(k as i64) * &scale));
        let xh = &x + h;
        let Some(piece) = fun.base_piece_at(&x, depth) else { continue };
        if !piece.interval().contains_open(&x) || !piece.interval().contains(&xh) {
            continue;
        }
        let Some(fx) = fun.eval_f(&x, depth) else { continue };
        let diff = (&fun.eval_big_f(&xh, depth) - &fun.eval_big_f(&x, depth)).scale(&(Q::from_integer(1.into()) / h));
        let res = &diff - &fx;
        let res_up = res.abs_upper();
        let c = second_derivative_bound(&piece);
        let tol = &c * h;
        if res_up > max_res {
            max_res = res_up.clone();
        }
        checks.push(Check {
            name: format!("sample_{}", checks.len()),
            pass: res_up <= tol,
            value: Enclosure::tail_range(Q::zero(), res_up.clone(), depth, res_up),
            tolerance: tol,
        });
    }
    let resolved = checks.len();
    checks.push(Check {
        name: "resolved_samples".into(),
        value: Enclosure::exact(qi(resolved as i64)),
        tolerance: qi(samples as i64),
        pass: resolved == samples,
    });
    checks.push(Check {
        name: "max_residual".into(),
        value: Enclosure::exact(max_res),
        tolerance: Q::zero(),
        pass: true,
    });
    Ok(VerificationReport { subject: fun.descriptor(), depth, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denfun::build_rank;
    use crate::ordinal::Ordinal;
    use crate::rational::q;

    #[test]
    fn base_integrals() {
        let f = build_rank(&Ordinal::zero(), &IntervalQ::unit(), &qi(1)).unwrap();
        assert_eq!(integrate(&f, &IntervalQ::unit(), 0).unwrap(), Enclosure::zero());
        assert_eq!(integrate(&f, &IntervalQ::mk(qi(0), q(1, 2)), 0).unwrap(), Enclosure::exact(qi(1)));
    }
}
