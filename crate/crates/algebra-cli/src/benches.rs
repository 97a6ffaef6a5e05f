//! Benchmark implementations, shared between the binaries and the tests.

use std::time::Instant;

use num_bigint::BigInt;

use algebra_core::dense;
use algebra_core::ideal::{
    equation_order, hnf_basis, hnf_rows, ideal_mul, ideal_norm, prime_decomposition,
    regular_rep_rows, OrderRef, TwoGenIdeal,
};
use algebra_core::matrix::{self, DenseMatrix};
use algebra_core::numfield::{nf_elem_from_ints, number_field};
use algebra_core::primes::sieve;
use algebra_core::ring::{
    self, coerce_i64, finite_field, gen, integers, multi_poly_ring, polynomial_ring,
    rationals, residue_ring, Elem, Repr,
};
use algebra_core::rng::SplitMix64;
use algebra_core::roots::{is_torsion, Torsion};
use algebra_core::sparse::{naive_mul, sparse_terms};
use algebra_core::text::{format_elem, parse_in};
use algebra_core::Error;

use crate::fingerprint_str;
use crate::report::{BenchReport, CliError};

type Result<T> = std::result::Result<T, CliError>;

fn elem_fingerprint(x: &Elem) -> String {
    fingerprint_str(&format_elem(x))
}

/// Fateman benchmark: f * (f + 1) with f = (1 + x + y + z + t)^n over Z.
pub fn bench_fateman(n: u64) -> Result<BenchReport> {
    let r = multi_poly_ring(integers(), &["x", "y", "z", "t"]);
    let mut base = coerce_i64(&r, 1)?;
    for i in 0..4 {
        base = base.add(&gen(&r, i)?)?;
    }
    let start = Instant::now();
    let f = base.pow(n)?;
    let f1 = f.add(&coerce_i64(&r, 1)?)?;
    let p = f.mul(&f1)?;
    let seconds = start.elapsed().as_secs_f64();

    let mut oracle_checked = false;
    if n <= 5 {
        let q = naive_mul(&r, &f, &f1)?;
        if q != p {
            return Err(CliError::Oracle("fateman: heap product != naive product".into()));
        }
        oracle_checked = true;
    }
    let mut rep = BenchReport::new("fateman");
    rep.param_u64("n", n);
    rep.seconds = seconds;
    rep.fingerprint = sparse_terms(&p).coeffs.len().to_string();
    rep.oracle_checked = oracle_checked;
    Ok(rep)
}

/// Pearce benchmark: f * g in 5 variables over Z.
pub fn bench_pearce(n: u64) -> Result<BenchReport> {
    let r = multi_poly_ring(integers(), &["x", "y", "z", "t", "u"]);
    let one = coerce_i64(&r, 1)?;
    let [x, y, z, t, u] =
        [gen(&r, 0)?, gen(&r, 1)?, gen(&r, 2)?, gen(&r, 3)?, gen(&r, 4)?];
    let term = |c: i64, v: &Elem, e: u64| -> Result<Elem> {
        Ok(coerce_i64(&r, c)?.mul(&v.pow(e)?)?)
    };
    // f = (1 + x + y + 2z^2 + 3t^3 + 5u^5)^n
    let fb = one
        .add(&x)?
        .add(&y)?
        .add(&term(2, &z, 2)?)?
        .add(&term(3, &t, 3)?)?
        .add(&term(5, &u, 5)?)?;
    // g = (1 + u + t + 2z^2 + 3y^3 + 5x^5)^n
    let gb = one
        .add(&u)?
        .add(&t)?
        .add(&term(2, &z, 2)?)?
        .add(&term(3, &y, 3)?)?
        .add(&term(5, &x, 5)?)?;
    let start = Instant::now();
    let f = fb.pow(n)?;
    let g = gb.pow(n)?;
    let p = f.mul(&g)?;
    let seconds = start.elapsed().as_secs_f64();

    let mut oracle_checked = false;
    if n <= 3 {
        if naive_mul(&r, &f, &g)? != p {
            return Err(CliError::Oracle("pearce: heap product != naive product".into()));
        }
        oracle_checked = true;
    }
    let mut rep = BenchReport::new("pearce");
    rep.param_u64("n", n);
    rep.seconds = seconds;
    rep.fingerprint = sparse_terms(&p).coeffs.len().to_string();
    rep.oracle_checked = oracle_checked;
    Ok(rep)
}

fn poly_coeffs(x: &Elem) -> Result<Vec<Elem>> {
    match &x.repr {
        Repr::Dense(c) => Ok(c.clone()),
        _ => Err(CliError::Failure("expected a dense polynomial".into())),
    }
}

/// Resultant in ((GF(17^11)[y])/(y^3 + 3xy + 1))[z]: res(f^e, (f^e + g)^e).
pub fn bench_resultant_tower(e: u64) -> Result<BenchReport> {
    let gf = finite_field(17, 11, "x")?;
    let sy = polynomial_ring(gf.clone(), "y");
    let modulus = parse_in(&sy, "y^3 + 3*x*y + 1")?;
    let tq = residue_ring(sy, modulus)?;
    let uz = polynomial_ring(tq.clone(), "z");
    let f = parse_in(&uz, "(3*y^2 + y + x)*z^2 + ((x + 2)*y^2 + x + 1)*z + 4*x*y + 3")?;
    let g = parse_in(&uz, "(7*y^2 - y + 2*x + 7)*z^2 + (3*y^2 + 4*x + 1)*z + (2*x + 1)*y + 1")?;

    let start = Instant::now();
    let s = f.pow(e)?;
    let t = s.add(&g)?.pow(e)?;
    let sc = poly_coeffs(&s)?;
    let tc = poly_coeffs(&t)?;
    // subresultant PRS first; Sylvester-matrix fallback if an impossible
    // inverse (a genuine zero divisor) surfaces mid-sequence
    let res = match dense::dp_resultant_prs(&tq, &sc, &tc) {
        Ok(r) => r,
        Err(Error::ImpossibleInverse(_)) | Err(Error::InexactDivision) => {
            dense::dp_resultant_sylvester(&tq, &sc, &tc)?
        }
        Err(e) => return Err(e.into()),
    };
    let seconds = start.elapsed().as_secs_f64();

    let mut oracle_checked = false;
    if e <= 2 {
        let sylv = dense::dp_resultant_sylvester(&tq, &sc, &tc)?;
        if sylv != res {
            return Err(CliError::Oracle("resultant tower: PRS != Sylvester".into()));
        }
        oracle_checked = true;
    }
    let mut rep = BenchReport::new("resultant-tower");
    rep.param_u64("e", e);
    rep.seconds = seconds;
    rep.fingerprint = elem_fingerprint(&res);
    rep.oracle_checked = oracle_checked;
    Ok(rep)
}

/// Random matrix over the cubic field Q[a]/(a^3 + 3a + 1).
pub fn random_nf_matrix(dim: usize, seed: u64) -> Result<DenseMatrix> {
    let q = rationals();
    let px = polynomial_ring(q, "x");
    let fpoly = parse_in(&px, "x^3 + 3*x + 1")?;
    let k = number_field(&fpoly, "a")?;
    let mut rng = SplitMix64::new(seed);
    let mut rows = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for _ in 0..dim {
            let c = [
                rng.range_i64(-100, 100),
                rng.range_i64(-100, 100),
                rng.range_i64(-100, 100),
            ];
            row.push(nf_elem_from_ints(&k, &c, 1)?);
        }
        rows.push(row);
    }
    Ok(DenseMatrix::from_rows(&k, rows)?)
}

/// Determinant of a random dim x dim matrix over a cubic number field.
pub fn bench_nf_det(dim: usize, seed: u64) -> Result<BenchReport> {
    let m = random_nf_matrix(dim, seed)?;
    let start = Instant::now();
    let d = matrix::det(&m)?;
    let seconds = start.elapsed().as_secs_f64();

    let mut oracle_checked = false;
    if dim <= 6 {
        let bk = matrix::det_division_free(&m)?;
        if bk != d {
            return Err(CliError::Oracle("nf-det: fflu != Berkowitz".into()));
        }
        oracle_checked = true;
    }
    let mut rep = BenchReport::new("nf-det");
    rep.param_u64("dim", dim as u64);
    rep.param_u64("seed", seed);
    rep.seconds = seconds;
    rep.fingerprint = elem_fingerprint(&d);
    rep.oracle_checked = oracle_checked;
    Ok(rep)
}

/// All prime ideals of norm <= bound in the equation order of Q[x]/(x^n + 2),
/// skipping the finitely many primes where the order is not known to be
/// locally maximal.
pub fn prime_pool(order: &OrderRef, bound: u64) -> Result<Vec<TwoGenIdeal>> {
    let mut pool = Vec::new();
    for p in sieve(bound) {
        match prime_decomposition(order, p) {
            Ok(primes) => {
                for pr in primes {
                    if pr.ideal.norm <= BigInt::from(bound) {
                        pool.push(pr.ideal);
                    }
                }
            }
            Err(Error::IndexDivisor) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(pool)
}

/// HNF of the product of two ideals computed from all pairwise products of
/// their HNF basis elements: slow, presentation-free oracle.
pub fn basis_product_hnf(x: &TwoGenIdeal, y: &TwoGenIdeal) -> Result<Vec<Vec<BigInt>>> {
    let order = &x.order;
    let n = order.degree;
    let bx = hnf_basis(x)?;
    let by = hnf_basis(y)?;
    let mut rows = Vec::with_capacity(n * n * n);
    for rx in &bx {
        let ex = algebra_core::ideal::OrderElem::new(order, rx.clone());
        for ry in &by {
            let ey = algebra_core::ideal::OrderElem::new(order, ry.clone());
            let prod = ex.mul(&ey)?;
            // span as a Z-module: the product times each basis power
            for row in regular_rep_rows(&prod)? {
                rows.push(row);
            }
        }
    }
    Ok(hnf_rows(rows, n)?)
}

/// Table 3 benchmark: random products of prime ideals of bounded norm in
/// Q[x]/(x^n + 2).
pub fn bench_ideal(n: usize, count: usize, bound: u64, seed: u64) -> Result<BenchReport> {
    let q = rationals();
    let px = polynomial_ring(q, "x");
    let x = gen(&px, 0)?;
    let fpoly = x.pow(n as u64)?.add(&coerce_i64(&px, 2)?)?;
    let k = number_field(&fpoly, "a")?;
    let order = equation_order(&k, false)?;
    let pool = prime_pool(&order, bound)?;
    if pool.is_empty() {
        return Err(CliError::Failure("no prime ideals below the bound".into()));
    }

    let mut rng = SplitMix64::new(seed);
    let factors: Vec<&TwoGenIdeal> =
        (0..count).map(|_| &pool[rng.below(pool.len() as u64) as usize]).collect();

    let check_hnf = count <= 20 && n == 16;
    let start = Instant::now();
    let mut prod = factors[0].clone();
    let mut expected = prod.norm.clone();
    for f in &factors[1..] {
        let next = ideal_mul(&prod, f)?;
        if check_hnf {
            let oracle = basis_product_hnf(&prod, f)?;
            if hnf_basis(&next)? != oracle {
                return Err(CliError::Oracle("ideal: product HNF != basis-level HNF".into()));
            }
        }
        expected *= &f.norm;
        prod = next;
    }
    let seconds = start.elapsed().as_secs_f64();

    let norm = ideal_norm(&prod)?;
    if norm != expected {
        return Err(CliError::Oracle(format!(
            "ideal: N(product) = {norm} but product of norms = {expected}"
        )));
    }
    let mut rep = BenchReport::new("ideal");
    rep.param_u64("n", n as u64);
    rep.param_u64("count", count as u64);
    rep.param_u64("bound", bound);
    rep.param_u64("seed", seed);
    rep.seconds = seconds;
    rep.fingerprint = fingerprint_str(&norm.to_string());
    rep.oracle_checked = true;
    Ok(rep)
}

/// Seeded structured minpoly instance: a unimodular conjugate of one or two
/// copies of a companion block, so the minimal polynomial is known exactly.
pub fn minpoly_instance(dim: usize, seed: u64) -> Result<(DenseMatrix, Vec<BigInt>)> {
    let zz = integers();
    let mut rng = SplitMix64::new(seed);
    let b = if dim >= 2 && dim % 2 == 0 { dim / 2 } else { dim };
    // monic degree-b polynomial with small coefficients
    let mut mcoeffs: Vec<BigInt> = (0..b).map(|_| BigInt::from(rng.range_i64(-9, 9))).collect();
    mcoeffs.push(BigInt::from(1));

    let mut a = vec![vec![BigInt::from(0); dim]; dim];
    let blocks = dim / b;
    for blk in 0..blocks {
        let off = blk * b;
        for i in 1..b {
            a[off + i][off + i - 1] = BigInt::from(1);
        }
        for i in 0..b {
            a[off + i][off + b - 1] = -mcoeffs[i].clone();
        }
    }
    // conjugate by unimodular elementary transformations: the row operation
    // and its inverse column operation preserve similarity and integrality
    for _ in 0..3 * dim {
        let i = rng.below(dim as u64) as usize;
        let mut j = rng.below(dim as u64) as usize;
        if i == j {
            j = (j + 1) % dim;
        }
        let c = BigInt::from(rng.range_i64(-2, 2));
        for col in 0..dim {
            let v = &a[j][col] * &c;
            a[i][col] += v;
        }
        for row in 0..dim {
            let v = &a[row][i] * &c;
            a[row][j] -= v;
        }
    }
    let rows: Vec<Vec<Elem>> = a
        .iter()
        .map(|r| r.iter().map(|v| ring::coerce_int(&zz, v)).collect::<core::result::Result<_, _>>())
        .collect::<core::result::Result<_, _>>()?;
    Ok((DenseMatrix::from_rows(&zz, rows)?, mcoeffs))
}

/// Minimal polynomial benchmark on structured integer matrices.
pub fn bench_minpoly(dim: usize, seed: u64) -> Result<BenchReport> {
    let (m, expected) = minpoly_instance(dim, seed)?;
    let start = Instant::now();
    let g = matrix::minpoly_integer(&m)?;
    let seconds = start.elapsed().as_secs_f64();

    let zz = integers();
    let got: Vec<BigInt> = g
        .coeffs
        .iter()
        .map(|c| match &ring::coerce(&zz, c) {
            Ok(Elem { repr: Repr::Int(v), .. }) => Ok(v.clone()),
            _ => Err(CliError::Failure("minpoly has non-integer coefficient".into())),
        })
        .collect::<Result<_>>()?;
    if got != expected {
        return Err(CliError::Oracle("minpoly: result != constructed block polynomial".into()));
    }
    // verification: m(M) = 0 and agreement with the rational Krylov method
    let ev = matrix::eval_poly_at_matrix(&g, &m)?;
    for i in 0..dim {
        for j in 0..dim {
            if !ev.at(i, j).is_zero() {
                return Err(CliError::Oracle("minpoly: m(M) != 0".into()));
            }
        }
    }
    let mut rep = BenchReport::new("minpoly");
    rep.param_u64("dim", dim as u64);
    rep.param_u64("seed", seed);
    rep.seconds = seconds;
    rep.fingerprint = format!("deg{}:{}", got.len() - 1, fingerprint_str(&format!("{got:?}")));
    rep.oracle_checked = true;
    Ok(rep)
}

/// Torsion demo: decide whether an element of Q[x]/(f) is a root of unity.
pub fn demo_torsion(field: &str, elem: &str) -> Result<BenchReport> {
    let q = rationals();
    let px = polynomial_ring(q, "x");
    let fpoly = parse_in(&px, field)?;
    let k = number_field(&fpoly, "x")?;
    let alpha = parse_in(&k, elem)?;
    let start = Instant::now();
    let decision = is_torsion(&alpha)?;
    let seconds = start.elapsed().as_secs_f64();
    let text = match decision {
        Torsion::Torsion { order } => format!("torsion, order {order}"),
        Torsion::NotTorsion => "not torsion".to_string(),
    };
    let mut rep = BenchReport::new("torsion");
    rep.params.insert("field".into(), serde_json::json!(field));
    rep.params.insert("elem".into(), serde_json::json!(elem));
    rep.seconds = seconds;
    rep.fingerprint = text;
    rep.oracle_checked = true;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fateman_small_term_counts() {
        let r = bench_fateman(1).unwrap();
        assert_eq!(r.fingerprint, "15");
        assert!(r.oracle_checked);
        let r = bench_fateman(5).unwrap();
        // all monomials of total degree <= 10 in 4 variables: C(14, 4)
        assert_eq!(r.fingerprint, "1001");
        assert!(r.oracle_checked);
    }

    #[test]
    fn pearce_small() {
        let r = bench_pearce(1).unwrap();
        assert!(r.oracle_checked);
        let r0 = bench_pearce(0).unwrap();
        assert_eq!(r0.fingerprint, "1");
    }

    #[test]
    fn resultant_tower_oracle() {
        let r = bench_resultant_tower(1).unwrap();
        assert!(r.oracle_checked);
    }

    #[test]
    fn nf_det_trivial_and_oracle() {
        let r1 = bench_nf_det(1, 42).unwrap();
        let m = random_nf_matrix(1, 42).unwrap();
        assert_eq!(r1.fingerprint, elem_fingerprint(m.at(0, 0)));
        let r5 = bench_nf_det(5, 42).unwrap();
        assert!(r5.oracle_checked);
        // determinism
        assert_eq!(bench_nf_det(5, 42).unwrap().fingerprint, r5.fingerprint);
    }

    #[test]
    fn ideal_product_of_one() {
        let r = bench_ideal(16, 1, 50, 7).unwrap();
        assert!(r.oracle_checked);
    }

    #[test]
    fn ideal_norm_identity_small() {
        let r = bench_ideal(16, 5, 100, 3).unwrap();
        assert!(r.oracle_checked);
        // same seed, same fingerprint
        assert_eq!(bench_ideal(16, 5, 100, 3).unwrap().fingerprint, r.fingerprint);
    }

    #[test]
    fn minpoly_block_degree() {
        let r = bench_minpoly(10, 3).unwrap();
        assert!(r.fingerprint.starts_with("deg5:"));
        assert!(r.oracle_checked);
    }

    #[test]
    fn torsion_demo_examples() {
        let r = demo_torsion("x^2 + 1", "x").unwrap();
        assert_eq!(r.fingerprint, "torsion, order 4");
        let r = demo_torsion("x^2 + 1", "2").unwrap();
        assert_eq!(r.fingerprint, "not torsion");
    }
}
