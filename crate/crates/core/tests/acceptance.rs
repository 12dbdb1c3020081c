//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use padic_frobenius::analysis::{
    betti_comparison, growth_rate_fit, newton_report, valuation_profile, NewtonReport,
};
use padic_frobenius::connections::{
    builtin, builtin_names, dwork, frobenius_residual, gauge_floor_violations, gauge_residual,
    solve_frobenius, solve_frobenius_basis, solve_gamma_frobenius, solve_gamma_frobenius_auto,
    solve_gauge, GammaFrobenius,
};
use padic_frobenius::gamma_class::{
    cubic_surface, gamma_class, hirzebruch_f1, projective_space, twistor_big_block, two_quadrics,
};
use padic_frobenius::padic::{Coefficient, ExtRational, PrimeContext, Valuation};
use padic_frobenius::ring::{factorial, rat, ratio};
use padic_frobenius::satake::{grassmannian_ring, satake_cross_check};
use padic_frobenius::special::{gamma_derivative_partial_sum, gamma_derivatives, log_gamma_coefficients};
use padic_frobenius::RationalMatrix;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = Result<(), String>;

fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p).expect("odd prime")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Coefficients of `exp(q)·exp(q^p/p)` by a Cauchy product of the two exponentials.
fn dwork_oracle(p: u64, n: usize) -> Vec<BigRational> {
    let e1: Vec<BigRational> = (0..=n).map(|k| BigRational::new(1.into(), factorial(k as u64))).collect();
    let mut e2 = vec![BigRational::zero(); n + 1];
    let mut l = 0usize;
    while l * p as usize <= n {
        let pl = BigRational::from_integer(num_bigint::BigInt::from(p).pow(l as u32));
        e2[l * p as usize] = BigRational::new(1.into(), factorial(l as u64)) / pl;
        l += 1;
    }
    convolve(&e1, &e2)
}

fn convolve(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|m| (0..=m).filter(|&i| !a[i].is_zero() && !b[m - i].is_zero()).map(|i| &a[i] * &b[m - i]).sum())
        .collect()
}

fn reciprocal(a: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len()];
    out[0] = BigRational::one() / &a[0];
    for m in 1..a.len() {
        let s: BigRational = (1..=m).map(|i| &a[i] * &out[m - i]).sum();
        out[m] = -s / &a[0];
    }
    out
}

fn criterion_1() -> Outcome {
    let order = 200;
    for p in [3u64, 5, 7] {
        let d = dwork_oracle(p, order);
        for c in [1i64, 2, -1] {
            let expected = match c {
                1 => d.clone(),
                2 => convolve(&d, &d),
                _ => reciprocal(&d),
            };
            let sol = solve_frobenius(&dwork(rat(c)), p as u32, &RationalMatrix::eye(1), order)
                .map_err(|e| e.to_string())?;
            for (m, want) in expected.iter().enumerate() {
                ensure(sol.coeff(m).get(0, 0) == want, || format!("p={p} c={c}: coefficient {m} differs"))?;
            }
        }
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let order = 60;
    for name in builtin_names() {
        let conn = builtin(&name).map_err(|e| e.to_string())?;
        let gauge = solve_gauge(&conn, order);
        ensure(gauge_residual(&conn, &gauge).coeffs().iter().all(|m| m.is_exact_zero()), || {
            format!("{name}: gauge residual")
        })?;
        for p in [3u64, 5] {
            let c = ctx(p);
            for b in solve_frobenius_basis(&conn, &c, order).map_err(|e| e.to_string())? {
                let res = frobenius_residual(&conn, p as u32, &b.solution);
                ensure(res.order() == order && res.coeffs().iter().all(|m| m.is_exact_zero()), || {
                    format!("{name} p={p}: Frobenius residual for term {}", b.poly)
                })?;
            }
        }
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let g = 10;
    for p in [3u64, 5, 7] {
        let c = ctx(p);
        let d = gamma_derivatives(&c, 6, g);
        let diff = d.derivative(2).sub(&d.derivative(1).mul(d.derivative(1)));
        ensure(diff.is_consistent_with_zero_at(g), || format!("p={p}: Γ''(0) − Γ'(0)² = {diff}"))?;
        let l = log_gamma_coefficients(&c, 6, g).map_err(|e| e.to_string())?;
        for m in [2, 4, 6] {
            ensure(l.get(m).is_consistent_with_zero_at(g), || format!("p={p}: l_{m} = {}", l.get(m)))?;
        }
        let mut rings = vec![
            projective_space(3),
            projective_space(5),
            cubic_surface(),
            hirzebruch_f1(),
            two_quadrics(),
            twistor_big_block(),
        ];
        rings.push(grassmannian_ring(2, 4).map_err(|e| e.to_string())?);
        for (ring, chern) in &rings {
            let derivs = gamma_derivatives(&c, ring.dim_c() as usize + 1, 2 * g);
            let a = gamma_class(ring, chern, &derivs, g).map_err(|e| e.to_string())?;
            let b = gamma_class(ring, &chern.dual(), &derivs, g).map_err(|e| e.to_string())?;
            let prod = ring.multiply(&a, &b);
            for (i, x) in prod.iter().enumerate() {
                let target = if i == ring.unit_index() { rat(1) } else { rat(0) };
                let r = x.sub(&c.exact(target));
                ensure(r.is_consistent_with_zero(), || format!("p={p}, ring of rank {}: coordinate {i} = {r}", ring.rank()))?;
                ensure(r.err_val() >= &ExtRational::int(1), || format!("p={p}: error bound too weak ({})", r.err_val()))?;
            }
        }
    }
    Ok(())
}

/// Gamma-class Frobenius solution whose profile and Newton data are fully certified.
fn certified(name: &str, p: u64, order: usize, start: i64) -> Result<(GammaFrobenius, NewtonReport), String> {
    let conn = builtin(name).map_err(|e| e.to_string())?;
    let c = ctx(p);
    let sol = solve_gamma_frobenius_auto(&conn, &c, order, start, 640, |s| {
        valuation_profile(&s.solution, p as u32).is_fully_certified()
            && newton_report(&c, &s.solution, order).map(|r| r.polygon.is_some()).unwrap_or(false)
    })
    .map_err(|e| e.to_string())?;
    let report = newton_report(&c, &sol.solution, order).map_err(|e| e.to_string())?;
    Ok((sol, report))
}

fn newton_cases() -> Vec<(String, Vec<(i64, BigRational)>)> {
    let v = |pts: &[(i64, BigRational)]| pts.to_vec();
    let mut cases = vec![
        ("cp2".to_string(), v(&[(0, rat(-3)), (1, rat(-3)), (2, rat(-2)), (3, rat(0))])),
        ("cubic-surface".to_string(), v(&[(0, rat(-3)), (1, rat(-3)), (2, rat(-2)), (3, rat(0))])),
        ("f1".to_string(), v(&[(0, rat(-4)), (1, rat(-4)), (3, rat(-2)), (4, rat(0))])),
        (
            "two-quadrics".to_string(),
            v(&[(0, rat(-6)), (1, rat(-6)), (2, rat(-5)), (3, rat(-3)), (4, rat(0))]),
        ),
    ];
    for d in [0i64, 2, 4] {
        cases.push((
            format!("twistor-simple({d})"),
            vec![
                (0, rat(-6 - 2 * d)),
                (1, rat(-6) - ratio(3 * d, 2)),
                (2, rat(-5 - d)),
                (3, rat(-3) - ratio(d, 2)),
                (4, rat(0)),
            ],
        ));
    }
    cases
}

fn criterion_4() -> Outcome {
    for (name, vertices) in newton_cases() {
        for p in [3u64, 5] {
            let (_, report) = certified(&name, p, 60, 20)?;
            let poly = report.polygon.as_ref().expect("certified polygon");
            ensure(report.tentative, || format!("{name} p={p}: not flagged tentative"))?;
            ensure(poly.vertices == vertices, || format!("{name} p={p}: got {poly}"))?;
        }
    }
    Ok(())
}

fn growth_cases() -> Vec<(&'static str, BigRational, BigRational)> {
    vec![
        ("cp2", ratio(16, 100), ratio(9, 100)),
        ("cubic-surface", ratio(16, 100), ratio(9, 100)),
        ("f1", ratio(28, 100), ratio(9, 100)),
        ("two-quadrics", ratio(28, 100), ratio(9, 100)),
        ("twistor-simple(0)", ratio(28, 100), ratio(9, 100)),
    ]
}

fn criterion_5() -> Outcome {
    let tol = ratio(3, 100);
    for (name, s3, s5) in growth_cases() {
        for (p, target) in [(3u64, s3), (5, s5)] {
            let (sol, _) = certified(name, p, 60, 20)?;
            let prof = valuation_profile(&sol.solution, p as u32);
            let sigma = growth_rate_fit(&prof, 20, 60).map_err(|e| e.to_string())?;
            ensure((&sigma - &target).abs() <= tol, || {
                format!("{name} p={p}: σ = {:.4}, expected {target}", ratio_f64(&sigma))
            })?;
        }
    }
    Ok(())
}

fn ratio_f64(x: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

fn criterion_6() -> Outcome {
    let c3 = ctx(3);
    for (k, n) in [(2usize, 4usize), (2, 5)] {
        let cmp = satake_cross_check(k, n, &c3, 10, 20).map_err(|e| e.to_string())?;
        ensure(cmp.agrees(), || format!("Gr({k},{n}): first mismatch at {:?}", cmp.first_mismatch))?;
    }
    let (_, report) = certified("grassmannian(2,4)", 7, 60, 20)?;
    let poly = report.polygon.as_ref().expect("certified polygon");
    let slopes = poly.slope_list();
    let expected: Vec<BigRational> = [0, 1, 2, 2, 3, 4].iter().map(|&s| rat(s)).collect();
    ensure(report.tentative, || "Gr(2,4) p=7: not flagged tentative".to_string())?;
    ensure(slopes == expected, || format!("Gr(2,4) p=7: {poly}"))?;
    let conn = builtin("grassmannian(2,4)").map_err(|e| e.to_string())?;
    ensure(betti_comparison(poly, conn.betti()).passes(), || "Gr(2,4): Betti comparison".to_string())
}

fn same_certified(a: &[Valuation], b: &[Valuation]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| match x.certified() {
        Some(v) => y.certified() != Some(v),
        None => false,
    })
}

fn criterion_7() -> Outcome {
    let mut runs: Vec<(String, u64)> = newton_cases().into_iter().flat_map(|(n, _)| [(n.clone(), 3), (n, 5)]).collect();
    runs.push(("grassmannian(2,4)".to_string(), 7));
    for (name, p) in runs {
        let (sol, report) = certified(&name, p, 60, 20)?;
        let conn = builtin(&name).map_err(|e| e.to_string())?;
        let c = ctx(p);
        let doubled = solve_gamma_frobenius(&conn, &c, 60, 2 * sol.precision).map_err(|e| e.to_string())?;
        let pa: Vec<Valuation> = valuation_profile(&sol.solution, p as u32).entries.into_iter().map(|e| e.1).collect();
        let pb: Vec<Valuation> = valuation_profile(&doubled.solution, p as u32).entries.into_iter().map(|e| e.1).collect();
        if let Some(m) = same_certified(&pa, &pb) {
            return Err(format!("{name} p={p}: profile at m={m} changed ({} vs {})", pa[m], pb[m]));
        }
        let rb = newton_report(&c, &doubled.solution, 60).map_err(|e| e.to_string())?;
        let na: Vec<Valuation> = report.values.iter().map(|v| v.value.clone()).collect();
        let nb: Vec<Valuation> = rb.values.iter().map(|v| v.value.clone()).collect();
        if let Some(k) = same_certified(&na, &nb) {
            return Err(format!("{name} p={p}: char poly coefficient {k} changed"));
        }
    }
    let g = 10;
    for p in [3u64, 5, 7] {
        let c = ctx(p);
        let d = gamma_derivatives(&c, 6, g);
        for k in 1..=6 {
            let m = d.truncation(k);
            let a = gamma_derivative_partial_sum(&c, k, m);
            let b = gamma_derivative_partial_sum(&c, k, m + 10);
            ensure(c.val(&(a - b)) >= ExtRational::int(g), || format!("p={p} k={k}: tail below precision"))?;
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    for name in builtin_names() {
        let conn = builtin(&name).map_err(|e| e.to_string())?;
        let gauge = solve_gauge(&conn, 60);
        for p in [3u64, 5, 7] {
            let bad = gauge_floor_violations(&ctx(p), &conn, &gauge);
            ensure(bad.is_empty(), || format!("{name} p={p}: floor fails at m = {bad:?}"))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("rank-one Dwork identity through order 200", criterion_1),
        ("Frobenius and gauge residuals vanish through order 60", criterion_2),
        ("Gamma identities within certified error", criterion_3),
        ("Newton polygon vertices of the examples", criterion_4),
        ("growth rates within 0.03", criterion_5),
        ("Grassmannian exterior power vs direct solve; Gr(2,4) slopes at p=7", criterion_6),
        ("precision soundness", criterion_7),
        ("gauge valuation floor on built-ins (overconvergence not certified)", criterion_8),
    ];
    let mut failed = 0;
    for (i, (label, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string());
            Err(msg)
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {} {label} ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {label} ({secs:.1}s): {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
