use denjoy_core::closedset::{validate_prepartition, IntervalQ, PrePartition, SkeletonSet};
use denjoy_core::rational::{q, qi, Q};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn iv(a: Q, b: Q) -> IntervalQ {
    IntervalQ::new(a, b).unwrap()
}

/// Middle-thirds gaps up to `depth`, by direct recursion on pieces.
fn oracle_cantor_gaps(lo: Q, hi: Q, depth: u32) -> Vec<(Q, Q)> {
    let mut pieces = vec![(lo, hi)];
    let mut gaps = Vec::new();
    for _ in 0..depth {
        let mut next = Vec::new();
        for (a, b) in pieces {
            let t = (&b - &a) / qi(3);
            let l = &a + &t;
            let r = &b - &t;
            gaps.push((l.clone(), r.clone()));
            next.push((a, l));
            next.push((r, b));
        }
        pieces = next;
    }
    gaps.sort();
    gaps
}

fn sets() -> Vec<SkeletonSet> {
    vec![
        SkeletonSet::interval(IntervalQ::unit()),
        SkeletonSet::cantor(IntervalQ::unit()),
        SkeletonSet::cantor(iv(q(-1, 2), qi(3))),
        SkeletonSet::finite(IntervalQ::unit(), vec![q(1, 5), q(1, 2), q(3, 4)]).unwrap(),
        SkeletonSet::from_components(IntervalQ::unit(), vec![iv(q(1, 9), q(2, 9)), iv(q(1, 2), q(1, 2))]).unwrap(),
        SkeletonSet::cantor(IntervalQ::unit()).intersect_interval(&iv(q(1, 10), q(7, 10)), 5).unwrap(),
    ]
}

#[test]
fn gap_examples() {
    let c = SkeletonSet::cantor(IntervalQ::unit());
    assert_eq!(c.gaps(1), vec![iv(q(1, 3), q(2, 3))]);
    assert_eq!(c.gaps(2), vec![iv(q(1, 9), q(2, 9)), iv(q(1, 3), q(2, 3)), iv(q(7, 9), q(8, 9))]);
    let f = SkeletonSet::finite(IntervalQ::unit(), vec![qi(0), qi(1)]).unwrap();
    for d in 0..4 {
        assert_eq!(f.gaps(d), vec![IntervalQ::unit()]);
    }
}

#[test]
fn cantor_gaps_match_oracle() {
    for (lo, hi) in [(qi(0), qi(1)), (q(-2, 7), q(5, 3))] {
        let s = SkeletonSet::cantor(iv(lo.clone(), hi.clone()));
        for d in 0..=7 {
            let got: Vec<(Q, Q)> = s.gaps(d).into_iter().map(|g| (g.lo, g.hi)).collect();
            assert_eq!(got, oracle_cantor_gaps(lo.clone(), hi.clone(), d));
        }
    }
}

#[test]
fn intersection_examples() {
    let c = SkeletonSet::cantor(IntervalQ::unit());
    let left = c.intersect_interval(&iv(qi(0), q(1, 3)), 2).unwrap();
    assert_eq!(left.gaps(2), vec![iv(q(1, 9), q(2, 9))]);
    let same = c.intersect_interval(&IntervalQ::unit(), 3).unwrap();
    for d in 0..6 {
        assert_eq!(same.gaps(d), c.gaps(d));
    }
    let inside = c.intersect_interval(&iv(q(2, 5), q(3, 5)), 1).unwrap();
    assert!(inside.is_flagged_empty());
    assert!(c.intersect_interval(&iv(qi(0), qi(2)), 1).is_err());
}

#[test]
fn measure_examples() {
    let c = SkeletonSet::cantor(IntervalQ::unit());
    assert_eq!(c.measure_bounds(1).1, q(2, 3));
    for d in 0..10u32 {
        let want = Q::new(2.into(), 3.into()).pow(d as i32);
        let (lo, up) = c.measure_bounds(d);
        assert_eq!(up, want);
        assert_eq!(lo, Q::zero());
    }
    assert_eq!(SkeletonSet::interval(IntervalQ::unit()).measure_bounds(0), (Q::one(), Q::one()));
}

#[test]
fn prepartition_examples() {
    let k = vec![qi(0), q(1, 3), qi(1)];
    let p = PrePartition::new(vec![iv(qi(0), q(1, 3)), iv(q(1, 3), qi(1))]).unwrap();
    assert!(validate_prepartition(&p, &k, &IntervalQ::unit()));
    let k2 = vec![qi(0), q(1, 3), q(1, 2), qi(1)];
    let p = PrePartition::new(vec![iv(qi(0), q(1, 2)), iv(q(1, 3), qi(1))]).unwrap();
    assert!(!validate_prepartition(&p, &k2, &IntervalQ::unit()));
    let p = PrePartition::new(vec![iv(qi(0), q(1, 4))]).unwrap();
    assert!(!validate_prepartition(&p, &k, &IntervalQ::unit()));
}

#[test]
fn gap_lists_are_prefixes_disjoint_and_shrink_measure() {
    for s in sets() {
        let mut prev_up: Option<Q> = None;
        for d in 0..=12u32 {
            let a = s.gap_sequence(d);
            let b = s.gap_sequence(d + 1);
            assert_eq!(&b[..a.len()], &a[..], "prefix at depth {d}");
            let g = s.gaps(d);
            for w in g.windows(2) {
                assert!(w[0].hi <= w[1].lo, "overlap {} {}", w[0], w[1]);
            }
            for x in &g {
                assert!(s.host().contains_interval(x));
                assert!(!x.is_degenerate());
            }
            let up = s.measure_bounds(d).1;
            if let Some(p) = &prev_up {
                assert!(&up <= p);
            }
            prev_up = Some(up);
        }
    }
}

#[test]
fn exhaustive_sets_equal_host_minus_gaps() {
    let s = SkeletonSet::finite(IntervalQ::unit(), vec![q(1, 5), q(3, 4)]).unwrap();
    assert_eq!(s.exhaustive_at(), Some(0));
    let comps = s.components(0);
    let pts: Vec<Q> = comps.iter().map(|c| c.lo.clone()).collect();
    assert_eq!(pts, vec![qi(0), q(1, 5), q(3, 4), qi(1)]);
    assert!(comps.iter().all(|c| c.is_degenerate()));
}

proptest! {
    #[test]
    fn intersection_gaps_are_clipped_or_flanks(a in 0i64..60, w in 1i64..60, d in 0u32..6) {
        let lo = q(a, 60);
        let hi = q((a + w).min(60), 60);
        prop_assume!(lo < hi);
        let c = SkeletonSet::cantor(IntervalQ::unit());
        let j = iv(lo, hi);
        let s = c.intersect_interval(&j, d).unwrap();
        let base = c.gaps(d);
        for g in s.gaps(d) {
            prop_assert!(j.contains_interval(&g));
            let clipped = base.iter().any(|b| b.intersect(&j).as_ref() == Some(&g));
            let flank = s.is_flagged_empty() && g == j;
            prop_assert!(clipped || flank, "gap {} unexplained", g);
        }
    }

    #[test]
    fn json_lists_sorted_gaps(d in 0u32..6) {
        let c = SkeletonSet::cantor(IntervalQ::unit());
        let v = c.to_json(d);
        prop_assert_eq!(v["gaps"].as_array().unwrap().len(), (1usize << d) - 1);
        prop_assert_eq!(v["depth"].as_u64().unwrap(), d as u64);
    }
}
