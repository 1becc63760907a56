//! Acceptance criteria 1-10. Each prints one PASS/FAIL line with its runtime and limit.

use std::time::{Duration, Instant};

use denjoy_core::closedset::IntervalQ;
use denjoy_core::denfun::{build_rank, schedule_partial_sum, ChildKey};
use denjoy_core::derivative::{acstar_search, rank_certify};
use denjoy_core::ordinal::Ordinal;
use denjoy_core::ppmodule::{classify_basic, classify_kernel, decide_str, parse_poly, ModuleKind, SubgroupClass, DEFAULT_BUDGET};
use denjoy_core::quadcheck::{ftc_spotcheck, integrate, verify_improper};
use denjoy_core::rational::{inv_pow2, inv_pow3, q, qi, Q};
use num_traits::{One, Zero};

type Outcome = Result<String, String>;

fn run(id: u32, name: &str, limit_s: u64, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = f();
    let el = t.elapsed();
    let in_time = el <= Duration::from_secs(limit_s);
    let ok = out.is_ok() && in_time;
    let detail = match &out {
        Ok(s) => s.clone(),
        Err(s) => s.clone(),
    };
    println!(
        "{} criterion {id} [{name}] {:.3}s / {limit_s}s{} :: {detail}",
        if ok { "PASS" } else { "FAIL" },
        el.as_secs_f64(),
        if in_time { "" } else { " (time limit exceeded)" }
    );
    ok
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn unit() -> IntervalQ {
    IntervalQ::unit()
}

fn c1() -> Outcome {
    let mut count = 0;
    for n in 1..=6u64 {
        for t in 0..=12u64 {
            let m = (1u64 << n) + t - 1;
            let got = schedule_partial_sum(n, m);
            let want = Q::one() - inv_pow2(n + t);
            ensure(got == want, format!("n={n} t={t}: {got} != {want}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} identities exact"))
}

fn c2() -> Outcome {
    for r in [qi(1), q(3, 2), q(1, 7)] {
        let f = build_rank(&Ordinal::zero(), &unit(), &r).map_err(|e| e.to_string())?;
        let o = f.oscillation(&unit(), 0).map_err(|e| e.to_string())?;
        ensure(o.contains(&r), format!("r={r}: {} misses r", o.describe()))?;
        ensure(o.lo == r && o.hi == r, format!("r={r}: {} is not exactly r", o.describe()))?;
    }
    Ok("oscillation = r exactly for r in {1, 3/2, 1/7}".into())
}

fn c3() -> Outcome {
    let f = build_rank(&Ordinal::nat(1), &unit(), &qi(1)).map_err(|e| e.to_string())?;
    let mut partial = Q::zero();
    for n in 1..=8u64 {
        let o = f.oscillation(&f.outer_gap(n), 6).map_err(|e| e.to_string())?;
        let bound = qi(2) * inv_pow2(n);
        ensure(o.hi <= bound, format!("gap {n}: upper {} > {bound}", o.hi))?;
        partial += o.hi;
        ensure(partial <= qi(2), format!("partial sum {partial} > 2 at n={n}"))?;
    }
    Ok(format!("gap bounds hold for n<=8; partial sum {partial} <= 2"))
}

fn c4() -> Outcome {
    let mut lines = Vec::new();
    for text in ["1", "2", "w", "w+1"] {
        let a: Ordinal = text.parse().map_err(|e: denjoy_core::ParseError| e.to_string())?;
        let f = build_rank(&a, &unit(), &qi(1)).map_err(|e| e.to_string())?;
        let e3 = integrate(&f, &unit(), 3).map_err(|e| e.to_string())?;
        let e4 = integrate(&f, &unit(), 4).map_err(|e| e.to_string())?;
        let e5 = integrate(&f, &unit(), 5).map_err(|e| e.to_string())?;
        ensure(e4.contains(&Q::zero()), format!("rank {a}: depth-4 enclosure misses 0"))?;
        ensure(e4.width() <= q(1, 4), format!("rank {a}: depth-4 width {} > 1/4", e4.width()))?;
        ensure(
            e3.width() > e4.width() && e4.width() > e5.width(),
            format!("rank {a}: widths {} {} {} not strictly decreasing", e3.width(), e4.width(), e5.width()),
        )?;
        lines.push(format!("{a}: w4={}", e4.width()));
    }
    Ok(lines.join(", "))
}

fn c5() -> Outcome {
    let mut lines = Vec::new();
    for text in ["0", "1", "2", "w", "w+1"] {
        let a: Ordinal = text.parse().map_err(|e: denjoy_core::ParseError| e.to_string())?;
        let f = build_rank(&a, &unit(), &qi(1)).map_err(|e| e.to_string())?;
        let cert = rank_certify(&f, 16).map_err(|e| e.to_string())?;
        ensure(cert.vanish_level == a.succ(), format!("rank {a}: vanish level {}", cert.vanish_level))?;
        ensure(cert.den_layer == a, format!("rank {a}: den layer {}", cert.den_layer))?;
        ensure(cert.endpoint_levels().contains(&a), format!("rank {a}: endpoints not certified at level {a}"))?;
        ensure(!cert.spot_check.witness_found, format!("rank {a}: falsifier fired at the vanish level"))?;
        lines.push(format!("{a}->{}", cert.vanish_level));
    }
    Ok(lines.join(", "))
}

fn c6() -> Outcome {
    let f = build_rank(&Ordinal::nat(1), &unit(), &qi(1)).map_err(|e| e.to_string())?;
    let eps = q(1, 2);
    let mut lines = Vec::new();
    for k in 1..=6u64 {
        let delta = inv_pow3(k);
        let (n, w) = acstar_search(&f, &eps, &delta, 8, 12).ok_or(format!("no witness for delta=3^-{k}"))?;
        ensure(w.mu_sum < delta, format!("k={k}: mu_sum {} >= delta", w.mu_sum))?;
        ensure(w.osc_sum_lower >= eps, format!("k={k}: osc sum {} < 1/2", w.osc_sum_lower))?;
        ensure(w.prepartition.mu() == w.mu_sum, format!("k={k}: mu_sum disagrees with pre-partition"))?;
        lines.push(format!("3^-{k}: gap {n}, {} intervals", w.prepartition.intervals.len()));
    }
    Ok(lines.join("; "))
}

fn c7() -> Outcome {
    let f = build_rank(&Ordinal::omega(), &unit(), &qi(1)).map_err(|e| e.to_string())?;
    let rep = verify_improper(&f, 8).map_err(|e| e.to_string())?;
    ensure(rep.checks.len() == 16, format!("{} checks instead of 16", rep.checks.len()))?;
    for c in &rep.checks {
        ensure(c.pass, format!("{} failed: {} vs {}", c.name, c.value.describe(), c.tolerance))?;
    }
    Ok("16 bounds |∫ f| <= 1/n hold".into())
}

fn c8() -> Outcome {
    let f = build_rank(&Ordinal::nat(1), &unit(), &qi(1)).map_err(|e| e.to_string())?;
    let rep = ftc_spotcheck(&f, 100, &inv_pow2(10), 5, 7).map_err(|e| e.to_string())?;
    let samples: Vec<_> = rep.checks.iter().filter(|c| c.name.starts_with("sample_")).collect();
    ensure(samples.len() == 100, format!("only {} resolved samples", samples.len()))?;
    for c in &rep.checks {
        ensure(c.pass, format!("{} failed: {} vs {}", c.name, c.value.describe(), c.tolerance))?;
    }
    Ok("100 residuals within C*h".into())
}

fn c9() -> Outcome {
    let corpus: [(&str, bool); 12] = [
        ("A x . E y . x = X*y", false),
        ("Inv(x = x, E y . x = X*y) > 1", true),
        ("Inv(x = x, E y . x = X*y) > 10", true),
        ("Inv(x = x, E y . x = X^2*y) > 1", true),
        ("Inv(x = x, E y . x = X^2*y) > 10", true),
        ("Inv(x = x, E y . x = X^3*y) > 1", true),
        ("Inv(x = x, E y . x = X^3*y) > 10", true),
        ("Inv(E y . x = X^2*y, x = x) = 1", true),
        ("Inv(E y . x = X^3*y, E y . x = X^2*y) = 1", true),
        ("Inv(E y . x = X*y, E y . x = X^2*y) = 1", false),
        ("A x . E y . A z . ~(x + y = X*z)", true),
        ("E x . A y . E z . x = X*y + X^2*z", false),
    ];
    for (s, want) in corpus {
        for m in [ModuleKind::C, ModuleKind::L1, ModuleKind::Den] {
            let got = decide_str(s, m, DEFAULT_BUDGET).map_err(|e| format!("{s}: {e}"))?;
            ensure(got == want, format!("{s} in {m}: got {got}, expected {want}"))?;
        }
    }
    Ok("12 sentences x 3 modules".into())
}

fn c10() -> Outcome {
    use SubgroupClass::*;
    let p = |s: &str| parse_poly(s).unwrap();
    let basic = [
        ("1", "X", XPower(1)),
        ("X^2 + 1", "1", Full),
        ("X", "X^3", XPower(2)),
        ("0", "X", Full),
        ("X", "0", Zero),
        ("0", "0", Full),
        ("X^2", "X^2", Full),
        ("X + 1", "X^4 + X^3", XPower(3)),
        ("X^2", "X^5 + X^2", Full),
    ];
    for (a, b, want) in basic {
        let got = classify_basic(&p(a), &p(b));
        ensure(got == want, format!("classify_basic({a}, {b}) = {got:?}, expected {want:?}"))?;
    }
    let kernels = [("X^5", Zero), ("0", Full), ("X^2 + 3*X + 2", Zero)];
    for (a, want) in kernels {
        let got = classify_kernel(&p(a));
        ensure(got == want, format!("classify_kernel({a}) = {got:?}, expected {want:?}"))?;
    }
    Ok(format!("{} basic pairs and {} kernels", basic.len(), kernels.len()))
}

#[test]
fn acceptance() {
    let _ = ChildKey::Left(0);
    let results = [
        run(1, "schedule identity", 1, c1),
        run(2, "base oscillation", 1, c2),
        run(3, "successor oscillation bound", 5, c3),
        run(4, "zero-integral enclosures", 30, c4),
        run(5, "rank certificates", 60, c5),
        run(6, "AC* falsifier", 30, c6),
        run(7, "improper bounds", 10, c7),
        run(8, "FTC spot check", 10, c8),
        run(9, "decision corpus", 5, c9),
        run(10, "classifier table", 1, c10),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
