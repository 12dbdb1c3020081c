use crate::output::{self, file_stem};
use crate::RunArgs;
use padic_frobenius::analysis::{
    betti_comparison, growth_rate_fit, newton_report, valuation_profile, NewtonReport, ValuationProfile,
};
use padic_frobenius::connections::{
    builtin, builtin_catalog, parse_connection, serialize_connection, solve_gamma_frobenius,
    solve_gamma_frobenius_auto, Connection, GammaFrobenius,
};
use padic_frobenius::ring::format_rational;
use padic_frobenius::satake::satake_cross_check;
use padic_frobenius::special::gamma_derivatives;
use padic_frobenius::{Error, PrimeContext};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

const AUTO_START: i64 = 10;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Precision(String),
    Comparison(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Precision(_) => 3,
            CliError::Comparison(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Comparison(m) | CliError::Other(m) => f.write_str(m),
            CliError::Precision(m) => write!(f, "{m} (raise --precision or --precision-cap)"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Precision(_) => CliError::Precision(e.to_string()),
            Error::NotInvertible(_) => CliError::Other(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// A built-in name, or a file when one exists at that path.
pub fn load_connection(selector: &str) -> CliResult<Connection> {
    let path = Path::new(selector);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        return parse_connection(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())));
    }
    Ok(builtin(selector)?)
}

fn contexts(primes: &[u64]) -> CliResult<Vec<PrimeContext>> {
    if primes.is_empty() {
        return Err(CliError::Validation("no prime given".to_string()));
    }
    primes.iter().map(|&p| PrimeContext::new(p).map_err(CliError::from)).collect()
}

fn check_run(run: &RunArgs) -> CliResult {
    if run.order == 0 {
        return Err(CliError::Validation("--order must be at least 1".to_string()));
    }
    if matches!(run.precision, Some(g) if g < 1) || run.precision_cap < 1 {
        return Err(CliError::Validation("precision must be at least 1".to_string()));
    }
    Ok(())
}

fn solve(
    conn: &Connection,
    ctx: &PrimeContext,
    order: usize,
    precision: Option<i64>,
    cap: i64,
    accept: impl Fn(&GammaFrobenius) -> bool,
) -> CliResult<GammaFrobenius> {
    Ok(match precision {
        Some(g) => solve_gamma_frobenius(conn, ctx, order, g)?,
        None => solve_gamma_frobenius_auto(conn, ctx, order, AUTO_START, cap, accept)?,
    })
}

pub fn gamma(prime: u64, k_max: usize, precision: i64) -> CliResult {
    let ctx = PrimeContext::new(prime)?;
    if precision < 1 {
        return Err(CliError::Validation("precision must be at least 1".to_string()));
    }
    let d = gamma_derivatives(&ctx, k_max, precision);
    println!("# p = {prime}, G = {precision}");
    println!("k\tM\tvalue\terr_val");
    for k in 0..=k_max {
        let x = d.derivative(k);
        println!("{k}\t{}\t{}\t{}", d.truncation(k), format_rational(x.approx()), x.err_val());
    }
    Ok(())
}

struct ProfileRun {
    p: u64,
    precision: i64,
    profile: ValuationProfile,
}

pub fn profile(run: &RunArgs, window: Option<(usize, usize)>) -> CliResult {
    check_run(run)?;
    let conn = load_connection(&run.connection)?;
    let ctxs = contexts(&run.prime)?;
    let (lo, hi) = window.unwrap_or((if run.order > 20 { 20 } else { 0 }, run.order));
    if lo >= hi || hi > run.order {
        return Err(CliError::Validation(format!("window [{lo}, {hi}] does not fit order {}", run.order)));
    }
    let runs: Vec<CliResult<ProfileRun>> = ctxs
        .par_iter()
        .map(|ctx| {
            let p = ctx.p();
            let sol = solve(&conn, ctx, run.order, run.precision, run.precision_cap, |s| {
                valuation_profile(&s.solution, p).is_fully_certified()
            })?;
            let profile = valuation_profile(&sol.solution, p);
            Ok(ProfileRun { p: p as u64, precision: sol.precision, profile })
        })
        .collect();
    let runs: Vec<ProfileRun> = runs.into_iter().collect::<CliResult<_>>()?;

    let out = run.out.clone().unwrap_or_else(|| ".".into());
    std::fs::create_dir_all(&out)?;
    let stem = file_stem(conn.name());
    let mut summary = String::new();
    writeln!(summary, "connection {}", conn.name()).unwrap();
    writeln!(summary, "order {}", run.order).unwrap();
    writeln!(summary, "window {lo} {hi}").unwrap();
    let mut indeterminate = Vec::new();
    for r in &runs {
        let csv_path = out.join(format!("{stem}_p{}.csv", r.p));
        output::write_profile(&csv_path, &r.profile)?;
        output::write_reference(&out.join(format!("{stem}_p{}_reference.csv", r.p)), r.p, run.order)?;
        match growth_rate_fit(&r.profile, lo, hi) {
            Ok(sigma) => writeln!(
                summary,
                "p {} precision {} sigma {:.6}",
                r.p,
                r.precision,
                num_traits::ToPrimitive::to_f64(&sigma).unwrap_or(f64::NAN)
            )
            .unwrap(),
            Err(e) => writeln!(summary, "p {} precision {} sigma unavailable: {e}", r.p, r.precision).unwrap(),
        }
        if let Some(m) = r.profile.first_indeterminate() {
            indeterminate.push(format!("p = {}: first indeterminate coefficient q^{m}", r.p));
        }
        println!("wrote {}", csv_path.display());
    }
    let summary_path = out.join(format!("{stem}_summary.txt"));
    std::fs::write(&summary_path, &summary)?;
    print!("{summary}");
    if !indeterminate.is_empty() {
        return Err(CliError::Precision(indeterminate.join("; ")));
    }
    Ok(())
}

fn format_report(conn: &Connection, p: u64, precision: i64, report: &NewtonReport, theta: bool) -> String {
    let mut s = String::new();
    writeln!(s, "{} p = {p} precision {precision}", conn.name()).unwrap();
    if theta {
        writeln!(s, "k\tval\tcertified\ttentative\torder").unwrap();
        for (k, v) in report.values.iter().enumerate() {
            writeln!(
                s,
                "{k}\t{}\t{}\t{}\t{}",
                v.value.lower_bound(),
                v.value.is_certified(),
                v.tentative,
                v.order
            )
            .unwrap();
        }
    }
    match &report.polygon {
        Some(poly) => {
            let vs: Vec<String> = poly.vertices.iter().map(|(x, y)| format!("({x},{})", format_rational(y))).collect();
            writeln!(s, "vertices {}", vs.join(",")).unwrap();
            let sl: Vec<String> = poly.slopes.iter().map(|(sl, m)| format!("{}x{m}", format_rational(sl))).collect();
            writeln!(s, "slopes {}", sl.join(" ")).unwrap();
            let cmp = betti_comparison(poly, conn.betti());
            if cmp.passes() {
                writeln!(s, "betti agrees").unwrap();
            } else {
                let ms: Vec<String> = cmp
                    .mismatches
                    .iter()
                    .map(|(sl, o, e)| format!("slope {} observed {o} expected {e}", format_rational(sl)))
                    .collect();
                writeln!(s, "betti differs: {}", ms.join("; ")).unwrap();
            }
        }
        None => writeln!(s, "polygon unavailable: coefficient {} not certified", report.first_indeterminate().unwrap_or(0)).unwrap(),
    }
    writeln!(s, "tentative {}", report.tentative).unwrap();
    s
}

fn certified_newton(
    conn: &Connection,
    ctx: &PrimeContext,
    order: usize,
    precision: Option<i64>,
    cap: i64,
) -> CliResult<(GammaFrobenius, NewtonReport)> {
    let sol = solve(conn, ctx, order, precision, cap, |s| {
        newton_report(ctx, &s.solution, order).map(|r| r.polygon.is_some()).unwrap_or(false)
    })?;
    let report = newton_report(ctx, &sol.solution, order)?;
    Ok((sol, report))
}

pub fn newton(run: &RunArgs, theta: bool) -> CliResult {
    check_run(run)?;
    let conn = load_connection(&run.connection)?;
    let ctxs = contexts(&run.prime)?;
    let results: Vec<CliResult<(u64, i64, NewtonReport)>> = ctxs
        .par_iter()
        .map(|ctx| {
            let (sol, report) = certified_newton(&conn, ctx, run.order, run.precision, run.precision_cap)?;
            Ok((ctx.p() as u64, sol.precision, report))
        })
        .collect();
    let stem = file_stem(conn.name());
    let mut failed = None;
    for r in results {
        let (p, precision, report) = r?;
        let text = format_report(&conn, p, precision, &report, theta);
        print!("{text}");
        if let Some(out) = &run.out {
            std::fs::create_dir_all(out)?;
            std::fs::write(out.join(format!("{stem}_p{p}_newton.txt")), &text)?;
        }
        if report.polygon.is_none() && failed.is_none() {
            failed = Some(format!("p = {p}: Newton polygon not certified"));
        }
    }
    match failed {
        Some(m) => Err(CliError::Precision(m)),
        None => Ok(()),
    }
}

pub fn satake(
    k: usize,
    n: usize,
    prime: u64,
    order: usize,
    compare_order: usize,
    precision: Option<i64>,
    cap: i64,
) -> CliResult {
    let ctx = PrimeContext::new(prime)?;
    let cmp = satake_cross_check(k, n, &ctx, precision.unwrap_or(AUTO_START), compare_order)?;
    match cmp.first_mismatch {
        None => println!("Gr({k},{n}) p = {prime}: direct solve equals exterior power through order {compare_order}"),
        Some((m, i, j)) => {
            return Err(CliError::Comparison(format!(
                "Gr({k},{n}) p = {prime}: direct and exterior solutions differ at q^{m}, entry ({i},{j})"
            )))
        }
    }
    let conn = builtin(&format!("grassmannian({k},{n})"))?;
    let (sol, report) = certified_newton(&conn, &ctx, order, precision, cap)?;
    print!("{}", format_report(&conn, prime, sol.precision, &report, false));
    if (prime as usize) < n + 2 {
        println!("note: the slope prediction is only claimed for p >= {}", n + 2);
    }
    Ok(())
}

pub fn list() -> CliResult {
    for info in builtin_catalog() {
        println!("{:<20} {}", info.pattern, info.description);
    }
    Ok(())
}

pub fn validate(path: &Path) -> CliResult {
    let text = std::fs::read_to_string(path)?;
    let conn = parse_connection(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    println!(
        "OK {}: rank {}, degree {}, dim_c {}, gamma decomposition {}",
        conn.name(),
        conn.rank(),
        conn.degree(),
        conn.dim_c(),
        if conn.decomposition().is_some() { "present" } else { "absent" }
    );
    Ok(())
}

pub fn export(selector: &str, out: Option<&Path>) -> CliResult {
    let conn = load_connection(selector)?;
    let text = serialize_connection(&conn);
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
