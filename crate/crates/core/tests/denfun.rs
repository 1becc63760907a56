use denjoy_core::closedset::IntervalQ;
use denjoy_core::denfun::{build_rank, schedule_partial_sum, schedule_tail, schedule_weight, ChildKey, NodeKind};
use denjoy_core::ordinal::{infinite_fiber_map, Ordinal};
use denjoy_core::rational::{inv_pow2, q, qi, to_f64, Q};
use denjoy_core::{ConstructedFunction, FunctionDescriptor};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn iv(a: Q, b: Q) -> IntervalQ {
    IntervalQ::new(a, b).unwrap()
}

fn built_ins() -> Vec<ConstructedFunction> {
    let mut out = Vec::new();
    for rank in ["0", "1", "2", "w", "w+1", "w*2"] {
        for (host, r) in [(IntervalQ::unit(), qi(1)), (iv(q(-1, 2), qi(3)), q(3, 7))] {
            out.push(build_rank(&o(rank), &host, &r).unwrap());
        }
    }
    out
}

/// Reference schedule from its defining cases.
fn oracle_weight(n: u64, m: u64) -> Q {
    if m < (1 << n) {
        inv_pow2(n)
    } else {
        inv_pow2(n) * inv_pow2(m - (1 << n) + 1)
    }
}

#[test]
fn base_examples() {
    let f = build_rank(&Ordinal::zero(), &IntervalQ::unit(), &qi(1)).unwrap();
    assert_eq!(f.kind(), NodeKind::Base);
    let a = f.amplitude();
    assert!(to_f64(&a.lo) <= std::f64::consts::PI && std::f64::consts::PI <= to_f64(&a.hi));
    let v = f.eval_f(&q(1, 4), 0).unwrap();
    assert!(v.lo <= a.hi && v.hi >= a.lo && v.width() < q(1, 1_000_000_000));
    assert_eq!(f.eval_big_f(&q(1, 2), 0), denjoy_core::Enclosure::exact(qi(1)));
}

#[test]
fn base_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (lo, hi, r) in [(qi(0), qi(1), qi(1)), (q(-1, 3), q(5, 2), q(3, 2)), (qi(2), qi(9), q(1, 7))] {
        let f = build_rank(&Ordinal::zero(), &iv(lo.clone(), hi.clone()), &r).unwrap();
        let (a, l, rf) = (to_f64(&lo), to_f64(&(&hi - &lo)), to_f64(&r));
        let amp = rf * std::f64::consts::PI / l;
        for _ in 0..200 {
            let t = q(rng.gen_range(0..=10_000), 10_000);
            let x = &lo + &t * (&hi - &lo);
            let xf = to_f64(&x);
            let th = 2.0 * std::f64::consts::PI * (xf - a) / l;
            let fv = f.eval_f(&x, 0).unwrap();
            let fo = amp * th.sin();
            assert!(to_f64(&fv.lo) - 1e-9 <= fo && fo <= to_f64(&fv.hi) + 1e-9, "f({x})");
            let big = f.eval_big_f(&x, 0);
            let big_o = rf / 2.0 * (1.0 - th.cos());
            assert!(to_f64(&big.lo) - 1e-9 <= big_o && big_o <= to_f64(&big.hi) + 1e-9, "F({x})");
        }
    }
}

#[test]
fn successor_children_follow_schedule() {
    let f = build_rank(&Ordinal::nat(1), &IntervalQ::unit(), &qi(1)).unwrap();
    for n in 1..=5u64 {
        for m in 1..=40u64 {
            let key = ChildKey::Grid { n, m };
            assert_eq!(schedule_weight(n, m), oracle_weight(n, m));
            assert_eq!(f.child_osc(key), qi(2) * oracle_weight(n, m));
            let c = f.child(key);
            assert_eq!(c.rank(), &Ordinal::zero());
            assert_eq!(c.r(), &f.child_osc(key));
            assert_eq!(c.interval(), &f.grid_interval(n, m));
            assert!(f.outer_gap(n).contains_interval(c.interval()));
        }
    }
}

#[test]
fn limit_children_follow_enumeration() {
    for rank in ["w", "w*2", "w^2"] {
        let a = o(rank);
        let f = build_rank(&a, &IntervalQ::unit(), &qi(1)).unwrap();
        let w = f.mid();
        assert_eq!(f.u(0), w);
        assert_eq!(f.v(0), w);
        for n in 0..12u64 {
            assert_eq!(f.u(n), &w * inv_pow2(n));
            assert_eq!(f.child_interval(ChildKey::Left(n)), iv(f.u(n + 1), f.u(n)));
            assert_eq!(f.child_interval(ChildKey::Right(n)), iv(f.v(n), f.v(n + 1)));
            let want = a.enumerate_below(infinite_fiber_map(n)).unwrap();
            assert_eq!(f.child_rank(ChildKey::Left(n)), want);
            assert_eq!(f.child_osc(ChildKey::Left(n)), q(1, n as i64 + 1));
            if n >= 1 {
                assert!(f.child_osc(ChildKey::Right(n)) <= q(1, n as i64));
            }
        }
    }
}

#[test]
fn endpoints_vanish_and_integrals_close() {
    for f in built_ins() {
        let mut nodes = vec![f.clone()];
        match f.kind() {
            NodeKind::Successor => {
                nodes.push(f.child(ChildKey::Grid { n: 2, m: 3 }));
                nodes.push(f.child(ChildKey::Grid { n: 1, m: 1 }));
            }
            NodeKind::Limit => {
                nodes.push(f.child(ChildKey::Left(3)));
                nodes.push(f.child(ChildKey::Right(5)));
            }
            NodeKind::Base => {}
        }
        for node in nodes {
            let iv = node.interval().clone();
            for x in [&iv.lo, &iv.hi] {
                let fx = node.eval_f(x, 0).expect("endpoint resolves");
                assert!(fx.is_exact() && fx.lo.is_zero(), "{} f({x}) = {}", node.rank(), fx.describe());
                let big = node.eval_big_f(x, 0);
                assert!(big.is_exact() && big.lo.is_zero(), "{} F({x}) = {}", node.rank(), big.describe());
            }
        }
    }
}

#[test]
fn rank_one_vanishes_on_cantor_points() {
    let f = build_rank(&Ordinal::nat(1), &IntervalQ::unit(), &qi(1)).unwrap();
    for x in [q(1, 4), q(3, 4), q(1, 3), q(2, 9), q(1, 10)] {
        for d in [0, 3, 8] {
            let v = f.eval_f(&x, d).unwrap();
            assert!(v.is_exact() && v.lo.is_zero(), "f({x}) at depth {d}");
        }
    }
}

#[test]
fn unresolved_cantor_points_get_tail_bounds() {
    let f = build_rank(&Ordinal::nat(1), &IntervalQ::unit(), &qi(1)).unwrap();
    // A point inside gap 8 (level 4): resolved only once depth reaches 4.
    let g = f.outer_gap(8);
    let x = g.midpoint();
    let coarse = f.eval_big_f(&x, 2);
    assert!(!coarse.is_exact());
    assert!(coarse.hi <= qi(2) * inv_pow2(4));
    let fine = f.eval_big_f(&x, 6);
    assert!(coarse.contains_enclosure(&fine));
}

#[test]
fn enclosures_nest_with_depth() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for f in built_ins() {
        let host = f.interval().clone();
        for _ in 0..100 {
            let t = q(rng.gen_range(0..=1 << 20), 1 << 20);
            let x = host.at(&t);
            let d = rng.gen_range(0..4u32);
            let coarse = f.eval_big_f(&x, d);
            let fine = f.eval_big_f(&x, d + 2);
            assert!(coarse.contains_enclosure(&fine), "{} at {x}: {} vs {}", f.rank(), coarse.describe(), fine.describe());
            if let (Some(a), Some(b)) = (f.eval_f(&x, d), f.eval_f(&x, d + 2)) {
                assert!(a.contains_enclosure(&b));
            }
        }
    }
}

#[test]
fn limit_tail_bound() {
    let f = build_rank(&Ordinal::omega(), &IntervalQ::unit(), &qi(1)).unwrap();
    for n in 1..=8u64 {
        let lo = f.u(n + 1);
        let hi = f.u(n);
        for k in 0..=8 {
            let x = &lo + (&hi - &lo) * q(k, 8);
            let big = f.eval_big_f(&x, 6);
            assert!(big.abs_upper() <= q(1, n as i64), "n={n} x={x}");
        }
    }
}

#[test]
fn schedule_sums() {
    assert_eq!(schedule_partial_sum(3, 7), q(7, 8));
    for t in 1..=10u64 {
        let m = 8 + t - 1;
        let brute: Q = (1..=m).map(|k| oracle_weight(3, k)).sum();
        assert_eq!(schedule_partial_sum(3, m), brute);
        assert_eq!(brute, Q::one() - inv_pow2(3 + t));
    }
    assert_eq!(schedule_partial_sum(3, 60) + schedule_tail(3, 61), Q::one());
    assert!(Q::one() - schedule_partial_sum(3, 60) < inv_pow2(50));
}

#[test]
fn gap_oscillation_bounds() {
    let f = build_rank(&Ordinal::nat(1), &IntervalQ::unit(), &qi(1)).unwrap();
    for n in 1..=8u64 {
        let o = f.oscillation(&f.outer_gap(n), 5).unwrap();
        assert!(o.hi <= qi(2) * inv_pow2(n));
        assert!(o.lo <= o.hi);
    }
    let g = f.outer_gap(1);
    let p = g.lo.clone() + q(1, 1000);
    let deg = f.oscillation(&iv(p.clone(), p), 3).unwrap();
    assert!(deg.is_exact() && deg.lo.is_zero());
    assert_eq!(f.oscillation(&IntervalQ::unit(), 4).unwrap().lo, qi(1));
}

#[test]
fn build_rejects_bad_input() {
    assert!(build_rank(&Ordinal::nat(1), &IntervalQ::unit(), &qi(0)).is_err());
    assert!(build_rank(&Ordinal::nat(1), &iv(qi(1), qi(1)), &qi(1)).is_err());
    assert!("e0".parse::<Ordinal>().is_err());
}

#[test]
fn descriptor_round_trip() {
    for f in built_ins() {
        let d = f.descriptor();
        let js = serde_json::to_string(&d).unwrap();
        let back: FunctionDescriptor = serde_json::from_str(&js).unwrap();
        assert_eq!(back, d);
        let g = back.build().unwrap();
        assert_eq!(g.eval_big_f(&f.interval().midpoint(), 3), f.eval_big_f(&f.interval().midpoint(), 3));
    }
}
