use num_traits::ToPrimitive;
use padic_frobenius::analysis::{
    betti_comparison, growth_rate_fit, newton_polygon, val_at_pi_theta, valuation_profile,
};
use padic_frobenius::connections::{
    builtin, parse_connection, serialize_connection, solve_gamma_frobenius,
};
use padic_frobenius::ring::{rat, ratio};
use padic_frobenius::series::Series;
use padic_frobenius::special::dwork_coefficients;
use padic_frobenius::{ExtRational, GammaPolynomial, PrimeContext, Ring, Valuation};

#[test]
fn cp1_constant_term_decomposition() {
    let conn = builtin("cp1").unwrap();
    let polys: Vec<&GammaPolynomial> = conn.decomposition().unwrap().terms().iter().map(|(p, _)| p).collect();
    assert_eq!(polys.len(), 2);
    assert!(polys.contains(&&GammaPolynomial::constant(rat(1))));
    assert!(polys.contains(&&GammaPolynomial::symbol(1).scaled(&rat(2))));
}

#[test]
fn cp1_certified_valuations_are_stable_and_below_the_bound() {
    let ctx = PrimeContext::new(3).unwrap();
    let conn = builtin("cp1").unwrap();
    let a = solve_gamma_frobenius(&conn, &ctx, 40, 20).unwrap();
    let b = solve_gamma_frobenius(&conn, &ctx, 40, 40).unwrap();
    let pa = valuation_profile(&a.solution, 3);
    let pb = valuation_profile(&b.solution, 3);
    let bound = ExtRational::int(a.precision).add(&a.exact_floor(&ctx));
    let mut certified = 0;
    for ((m, va), (_, vb)) in pa.entries.iter().zip(&pb.entries) {
        if let Valuation::Certified(v) = va {
            certified += 1;
            assert_eq!(vb, va, "m = {m}");
            assert!(v < &bound || v.is_infinite(), "m = {m}");
        }
    }
    assert!(certified > 30);
    // growth stays visibly below the line m/(p−1)
    for (m, v) in pa.certified() {
        if let (true, Some(x)) = (m >= 20, v.finite()) {
            assert!((-x).to_f64().unwrap() < m as f64 / 2.0, "m = {m}");
        }
    }
    let sigma = growth_rate_fit(&pa, 10, 40).unwrap().to_f64().unwrap();
    assert!(sigma < 0.4, "{sigma}");
}

#[test]
fn growth_rates_of_cp2_and_f1() {
    for (name, p, target) in [("cp2", 5u64, 0.09), ("f1", 3, 0.28)] {
        let ctx = PrimeContext::new(p).unwrap();
        let sol = solve_gamma_frobenius(&builtin(name).unwrap(), &ctx, 60, 40).unwrap();
        let prof = valuation_profile(&sol.solution, p as u32);
        let sigma = growth_rate_fit(&prof, 20, 60).unwrap().to_f64().unwrap();
        assert!((sigma - target).abs() <= 0.03, "{name} p = {p}: {sigma}");
    }
}

#[test]
fn dwork_series_at_pi_theta() {
    let ctx = PrimeContext::new(5).unwrap();
    let d = dwork_coefficients(&ctx, 60);
    let g = Series::new(d.as_slice()[..=60].to_vec());
    let v = val_at_pi_theta(&ctx, &g);
    assert_eq!(v.value, Valuation::Certified(ExtRational::int(0)));
    assert!(v.tentative);
    let q = Series::new(vec![rat(0), rat(1), rat(0), rat(0)]);
    assert_eq!(val_at_pi_theta(&ctx, &q).value, Valuation::Certified(ratio(1, 4).into()));
}

#[test]
fn f1_slopes_match_betti_numbers() {
    let pts: Vec<(i64, ExtRational)> = [(0, -4), (1, -4), (2, -3), (3, -2), (4, 0)]
        .iter()
        .map(|&(x, y)| (x, ExtRational::int(y)))
        .collect();
    let poly = newton_polygon(&pts).unwrap();
    assert_eq!(poly.slope_list(), vec![rat(0), rat(1), rat(1), rat(2)]);
    assert!(betti_comparison(&poly, builtin("f1").unwrap().betti()).passes());
    assert!(!betti_comparison(&poly, builtin("cp2").unwrap().betti()).passes());
}

#[test]
fn files_round_trip_for_generated_grassmannians() {
    let conn = builtin("grassmannian(2,5)").unwrap();
    let text = serialize_connection(&conn);
    assert_eq!(parse_connection(&text).unwrap(), conn);
}
