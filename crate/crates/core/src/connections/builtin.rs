//! Registry of example connections. Matrices printed in `∂_q` form are stored
//! after multiplication by `q`, so `B_k q^k` becomes `Ā_{k+1}`.

use super::{Connection, ConnectionDecomposition};
use crate::error::{Error, Result};
use crate::gamma_class::{
    cubic_surface, hirzebruch_f1, point_ring, projective_space, twistor_big_block,
    twistor_simple_block, two_quadrics,
};
use crate::matrix::RationalMatrix;
use crate::poly::GammaPolynomial;
use crate::ring::{parse_rational, rat};
use num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuiltinInfo {
    pub pattern: &'static str,
    pub description: &'static str,
}

pub fn builtin_catalog() -> Vec<BuiltinInfo> {
    vec![
        BuiltinInfo { pattern: "cp1", description: "projective line" },
        BuiltinInfo { pattern: "cp2", description: "projective plane" },
        BuiltinInfo { pattern: "cp(N)", description: "projective space of complex dimension N-1 (rank N), N >= 2" },
        BuiltinInfo { pattern: "cubic-surface", description: "cubic surface, span of {1, c1, [point]}" },
        BuiltinInfo { pattern: "f1", description: "Hirzebruch surface F1" },
        BuiltinInfo { pattern: "two-quadrics", description: "intersection of two quadrics in CP^5" },
        BuiltinInfo { pattern: "twistor-simple(d)", description: "rank 4 twistor block over a class of degree d in {0, 2, 4}" },
        BuiltinInfo { pattern: "twistor-big", description: "rank 8 twistor block containing the unit" },
        BuiltinInfo { pattern: "grassmannian(k,N)", description: "Grassmannian of k-planes in C^N, 1 <= k <= N-1" },
        BuiltinInfo { pattern: "dwork(c)", description: "rank 1 connection q d/dq - c q" },
    ]
}

/// Concrete instances covering every family, used for listings and sweeps.
pub fn builtin_names() -> Vec<String> {
    [
        "cp1",
        "cp2",
        "cp(4)",
        "cubic-surface",
        "f1",
        "two-quadrics",
        "twistor-simple(0)",
        "twistor-simple(2)",
        "twistor-simple(4)",
        "twistor-big",
        "grassmannian(2,4)",
        "dwork(1)",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Builds `Ā_0, Ā_1, …` from `∂_q`-form entries `(row, col, coefficient, power)`, `power ≥ −1`.
fn from_ddq(rank: usize, entries: &[(usize, usize, i64, i32)]) -> Vec<RationalMatrix> {
    let top = entries.iter().map(|e| (e.3 + 1) as usize).max().unwrap_or(0);
    let mut out = vec![RationalMatrix::zero(rank, rank); top + 1];
    for &(i, j, c, k) in entries {
        out[(k + 1) as usize].set(i, j, rat(c));
    }
    out
}

fn even_degrees(n: usize) -> Vec<u32> {
    (0..n as u32).map(|i| 2 * i).collect()
}

fn betti_of(degrees: &[u32]) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = Vec::new();
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    for d in sorted {
        match out.last_mut() {
            Some((deg, count)) if *deg == d => *count += 1,
            _ => out.push((d, 1)),
        }
    }
    out
}

/// `ℂP^{N−1}`: `Ā(q) = N·(subdiagonal ones + q^N in the top-right corner)`, from `x^{*N} = q^N`.
pub fn projective(n: usize) -> Result<Connection> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("cp({n}) needs N >= 2")));
    }
    let nn = rat(n as i64);
    let mut coeffs = vec![RationalMatrix::zero(n, n); n + 1];
    for i in 0..n - 1 {
        coeffs[0].set(i + 1, i, nn.clone());
    }
    coeffs[n].set(0, n - 1, nn);
    let (ring, chern) = projective_space(n);
    let degrees = even_degrees(n);
    Connection::new(
        format!("cp({n})"),
        coeffs,
        degrees.clone(),
        (n - 1) as u32,
        betti_of(&degrees),
        Some(ConnectionDecomposition::from_chern(&ring, &chern)),
    )
}

pub fn cubic() -> Connection {
    let coeffs = from_ddq(
        3,
        &[(0, 1, 108, 1), (0, 2, 252, 2), (1, 0, 1, -1), (1, 1, 9, 0), (1, 2, 36, 1), (2, 1, 3, -1)],
    );
    let (ring, chern) = cubic_surface();
    let degrees = even_degrees(3);
    Connection::new(
        "cubic-surface",
        coeffs,
        degrees.clone(),
        2,
        betti_of(&degrees),
        Some(ConnectionDecomposition::from_chern(&ring, &chern)),
    )
    .expect("valid cubic surface connection")
}

pub fn f1() -> Connection {
    let coeffs = from_ddq(
        4,
        &[
            (0, 1, 2, 1),
            (0, 3, 3, 2),
            (1, 0, 2, -1),
            (1, 1, -1, 0),
            (1, 2, 1, 0),
            (2, 0, 3, -1),
            (2, 3, 2, 1),
            (3, 1, 1, -1),
            (3, 2, 2, -1),
        ],
    );
    let (ring, chern) = hirzebruch_f1();
    let degrees = vec![0, 2, 2, 4];
    Connection::new(
        "f1",
        coeffs,
        degrees.clone(),
        2,
        betti_of(&degrees),
        Some(ConnectionDecomposition::from_chern(&ring, &chern)),
    )
    .expect("valid F1 connection")
}

pub fn quadrics() -> Connection {
    let coeffs = from_ddq(
        4,
        &[
            (0, 1, 8, 1),
            (0, 3, 8, 3),
            (1, 0, 2, -1),
            (1, 2, 4, 1),
            (2, 1, 8, -1),
            (2, 3, 8, 1),
            (3, 2, 2, -1),
        ],
    );
    let (ring, chern) = two_quadrics();
    let degrees = even_degrees(4);
    Connection::new(
        "two-quadrics",
        coeffs,
        degrees.clone(),
        3,
        betti_of(&degrees),
        Some(ConnectionDecomposition::from_chern(&ring, &chern)),
    )
    .expect("valid two-quadrics connection")
}

const TWISTOR_BLOCK: [(usize, usize, i64, i32); 5] =
    [(0, 1, 4, 1), (1, 0, 1, -1), (2, 1, 1, -1), (2, 3, 4, 1), (3, 2, 1, -1)];

/// The block over a class of degree `d`; the matrix does not depend on `d`, the
/// degrees (and hence the constant term) do.
pub fn twistor_simple(d: u32) -> Result<Connection> {
    if ![0, 2, 4].contains(&d) {
        return Err(Error::InvalidArgument(format!(
            "twistor-simple degree must be 0, 2 or 4, got {d}"
        )));
    }
    let (ring, chern) = twistor_simple_block();
    let degrees: Vec<u32> = (0..4).map(|i| d + 2 * i).collect();
    Connection::new(
        format!("twistor-simple({d})"),
        from_ddq(4, &TWISTOR_BLOCK),
        degrees.clone(),
        6,
        betti_of(&degrees),
        Some(ConnectionDecomposition::from_chern(&ring, &chern)),
    )
}

pub fn twistor_big() -> Connection {
    let mut entries: Vec<(usize, usize, i64, i32)> = TWISTOR_BLOCK.to_vec();
    entries.extend(TWISTOR_BLOCK.iter().map(|&(i, j, c, k)| (i + 4, j + 4, c, k)));
    entries.push((5, 3, 8, -1));
    let (ring, chern) = twistor_big_block();
    let degrees = ring.degrees().to_vec();
    Connection::new(
        "twistor-big",
        from_ddq(8, &entries),
        degrees.clone(),
        6,
        betti_of(&degrees),
        Some(ConnectionDecomposition::from_chern(&ring, &chern)),
    )
    .expect("valid twistor connection")
}

/// `q∂_q − c q`, whose Frobenius structure with constant term 1 is `D(q)^c`.
pub fn dwork(c: BigRational) -> Connection {
    let ring = point_ring();
    let one = ring.cup_matrix(&ring.unit_element(&rat(0)));
    let label = crate::ring::format_rational(&c);
    Connection::new(
        format!("dwork({label})"),
        vec![RationalMatrix::zero(1, 1), RationalMatrix::from_rows(vec![vec![-c]])],
        vec![0],
        0,
        vec![(0, 1)],
        Some(ConnectionDecomposition::new(vec![(GammaPolynomial::constant(rat(1)), one)])),
    )
    .expect("valid rank one connection")
}

fn parse_args(name: &str, args: &str) -> Result<Vec<String>> {
    let inner = args
        .strip_suffix(')')
        .ok_or_else(|| Error::UnknownConnection(name.to_string()))?;
    Ok(inner.split(',').map(|s| s.trim().to_string()).collect())
}

fn parse_usize(name: &str, s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::UnknownConnection(name.to_string()))
}

/// Looks up a connection by name, e.g. `cp1`, `cp(4)`, `twistor-simple(2)`, `grassmannian(2,5)`.
pub fn builtin(name: &str) -> Result<Connection> {
    let key: String = name.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let (head, args) = match key.find('(') {
        Some(i) => (&key[..i], Some(parse_args(name, &key[i + 1..])?)),
        None => (key.as_str(), None),
    };
    let unknown = || Error::UnknownConnection(name.to_string());
    match (head, args.as_deref()) {
        ("cp", Some([n])) => projective(parse_usize(name, n)?),
        ("cubic-surface", None) | ("cubic", None) => Ok(cubic()),
        ("f1", None) => Ok(f1()),
        ("two-quadrics", None) | ("quadrics", None) => Ok(quadrics()),
        ("twistor-simple", None) => twistor_simple(0),
        ("twistor-simple", Some([d])) => twistor_simple(parse_usize(name, d)? as u32),
        ("twistor-big", None) => Ok(twistor_big()),
        ("grassmannian", Some([k, n])) | ("gr", Some([k, n])) => {
            crate::satake::grassmannian_connection(parse_usize(name, k)?, parse_usize(name, n)?)
        }
        ("dwork", Some([c])) => Ok(dwork(parse_rational(c).ok_or_else(unknown)?)),
        (h, None) if h.starts_with("cp") => {
            let dim = parse_usize(name, &h[2..])?;
            projective(dim + 1).map(|c| c.with_name(h.to_string()))
        }
        _ => Err(unknown()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma_class::constant_term_endomorphism;
    use crate::padic::PrimeContext;
    use crate::ring::ratio;
    use crate::special::gamma_derivatives;

    #[test]
    fn cp1_matches_the_standard_basis_example() {
        let c = builtin("cp1").unwrap();
        assert_eq!(c.coeffs().len(), 3);
        assert_eq!(c.coeff(0), RationalMatrix::from_ints(&[&[0, 0], &[2, 0]]));
        assert!(c.coeff(1).is_exact_zero());
        assert_eq!(c.coeff(2), RationalMatrix::from_ints(&[&[0, 2], &[0, 0]]));
        assert_eq!(builtin("cp(2)").unwrap().coeffs(), c.coeffs());
    }

    #[test]
    fn cp3_from_the_quantum_relation() {
        let c = builtin("cp(3)").unwrap();
        assert_eq!(c.coeff(0), RationalMatrix::from_ints(&[&[0, 0, 0], &[3, 0, 0], &[0, 3, 0]]));
        assert_eq!(c.coeff(3), RationalMatrix::from_ints(&[&[0, 0, 3], &[0, 0, 0], &[0, 0, 0]]));
        assert_eq!(builtin("cp2").unwrap().coeffs(), c.coeffs());
        // x·x^{N−1} = q^N: the quantum product is x^{*N} = q^N·1
        let x = c.coeff(0).scale(&ratio(1, 3)).add(&c.coeff(3).scale(&ratio(1, 3)));
        assert_eq!(x.pow(3), RationalMatrix::eye(3));
    }

    #[test]
    fn f1_and_cubic_use_q_times_the_printed_matrix() {
        let f = builtin("f1").unwrap();
        assert_eq!(f.coeff(0), RationalMatrix::from_ints(&[&[0, 0, 0, 0], &[2, 0, 0, 0], &[3, 0, 0, 0], &[0, 1, 2, 0]]));
        assert_eq!(f.coeff(1), RationalMatrix::from_ints(&[&[0, 0, 0, 0], &[0, -1, 1, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]));
        assert_eq!(f.coeff(2), RationalMatrix::from_ints(&[&[0, 2, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 2], &[0, 0, 0, 0]]));
        assert_eq!(f.coeff(3), RationalMatrix::from_ints(&[&[0, 0, 0, 3], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]));
        let c = builtin("cubic-surface").unwrap();
        assert_eq!(c.coeff(1), RationalMatrix::from_ints(&[&[0, 0, 0], &[0, 9, 0], &[0, 0, 0]]));
        assert_eq!(c.coeff(3), RationalMatrix::from_ints(&[&[0, 0, 252], &[0, 0, 0], &[0, 0, 0]]));
    }

    #[test]
    fn every_builtin_is_graded_and_intertwines_its_constant_term() {
        for name in builtin_names() {
            let conn = builtin(&name).unwrap();
            assert!(conn.respects_grading(), "{name}");
            for p in [3u64, 5] {
                let ctx = PrimeContext::new(p).unwrap();
                let a0 = conn.coeff(0);
                let pr = rat(p as i64);
                for (_, cup) in conn.decomposition().unwrap().terms() {
                    let phi0 = conn.constant_term_from_cup(&ctx, cup);
                    assert_eq!(a0.mul(&phi0), phi0.mul(&a0).scale(&pr), "{name} p={p}");
                }
            }
        }
    }

    #[test]
    fn constant_term_from_the_ring_matches_the_connection() {
        // the pole term is c_1 ⌣ ·, so the ring and the connection agree on Φ̄_0
        let ctx = PrimeContext::new(5).unwrap();
        let derivs = gamma_derivatives(&ctx, 3, 10);
        let proto = ctx.exact(rat(0));
        for (conn, (ring, chern)) in [
            (builtin("cubic-surface").unwrap(), cubic_surface()),
            (builtin("f1").unwrap(), hirzebruch_f1()),
            (builtin("two-quadrics").unwrap(), two_quadrics()),
        ] {
            let c1 = chern.component(1).unwrap();
            assert_eq!(ring.cup_matrix(c1), conn.coeff(0));
            let b = crate::gamma_class::gamma_monomial_decomposition(&ring, &chern)
                .reconstruct(&proto, |k| derivs.derivative(k as usize).clone());
            let direct = constant_term_endomorphism(&ctx, &ring, &b).unwrap();
            let gammas: Vec<_> = conn
                .decomposition()
                .unwrap()
                .terms()
                .iter()
                .map(|(g, _)| g.evaluate(&proto, |k| derivs.derivative(k as usize).clone()))
                .collect();
            let n = conn.rank();
            let mut combined = crate::matrix::Matrix::zeros(&proto, n, n);
            for ((_, cup), g) in conn.decomposition().unwrap().terms().iter().zip(&gammas) {
                let phi = conn.constant_term_from_cup(&ctx, cup).map(|x| ctx.exact(x.clone()));
                combined = combined.add(&phi.scale_by(g));
            }
            for (x, y) in direct.entries().iter().zip(combined.entries()) {
                assert!(x.sub(y).is_consistent_with_zero_at(8));
            }
        }
    }

    #[test]
    fn twistor_big_pole_is_c1_on_its_ring() {
        let (ring, chern) = twistor_big_block();
        let c1 = chern.component(1).unwrap();
        assert_eq!(ring.cup_matrix(c1), builtin("twistor-big").unwrap().coeff(0));
        let (ring, chern) = twistor_simple_block();
        assert_eq!(ring.cup_matrix(chern.component(1).unwrap()), builtin("twistor-simple(2)").unwrap().coeff(0));
    }

    #[test]
    fn unknown_names_are_rejected() {
        for bad in ["cp(1)", "nope", "twistor-simple(3)", "grassmannian(0,4)", "dwork(x)"] {
            assert!(builtin(bad).is_err(), "{bad}");
        }
    }
}
