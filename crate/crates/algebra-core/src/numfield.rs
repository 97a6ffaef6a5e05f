//! Number fields Q[x]/(f) with precomputed reduction and trace tables.
//!
//! Elements are dense rational coefficient vectors of length below the
//! degree. A table of the reduced powers x^d .. x^(2d-2) turns the
//! post-multiplication reduction into d-1 scalar multiply-adds per row, and
//! the Newton sums of f give traces as a single dot product.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::dense;
use crate::error::{Error, Result};
use crate::ring::{
    coerce, polynomial_ring, rationals, zero, Elem, Repr, Ring, RingHandle, RingKind,
};

#[derive(Debug)]
pub struct NfData {
    pub var: String,
    /// Monic defining polynomial over Q, dense, length `degree + 1`.
    pub f: Vec<Elem>,
    pub degree: usize,
    /// Row i holds the coefficients of x^(degree + i) reduced mod f,
    /// for i = 0 .. degree - 2. Each row has length `degree`.
    pub power_table: Vec<Vec<Elem>>,
    /// Newton sums p_i = Tr(x^i) for i = 0 .. degree - 1.
    pub newton_sums: Vec<Elem>,
}

impl PartialEq for NfData {
    fn eq(&self, other: &Self) -> bool {
        self.var == other.var && self.f == other.f
    }
}

/// Build Q[x]/(f). The defining polynomial may live over Z[x] or Q[x] and is
/// normalized to be monic; it must be nonconstant. Irreducibility is the
/// caller's responsibility (a reducible f surfaces later as
/// `ImpossibleInverse`).
pub fn number_field(f: &Elem, var: &str) -> Result<Ring> {
    let q = rationals();
    let coeffs = match &f.repr {
        Repr::Dense(c) => c,
        _ => return Err(Error::InvalidParameter("defining polynomial must be univariate".into())),
    };
    if coeffs.len() < 2 {
        return Err(Error::InvalidParameter("defining polynomial must be nonconstant".into()));
    }
    let mut fq: Vec<Elem> = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        fq.push(coerce(&q, c)?);
    }
    let lc = fq.last().unwrap().clone();
    if !lc.is_one() {
        let inv = lc.try_inverse()?;
        for c in fq.iter_mut() {
            *c = c.mul(&inv)?;
        }
    }
    let degree = fq.len() - 1;
    let power_table = build_power_table(&q, &fq, degree)?;
    let newton_sums = build_newton_sums(&q, &fq, degree)?;
    Ok(Ring::new(RingHandle {
        kind: RingKind::NumberField(NfData {
            var: var.to_string(),
            f: fq,
            degree,
            power_table,
            newton_sums,
        }),
    }))
}

fn build_power_table(q: &Ring, f: &[Elem], d: usize) -> Result<Vec<Vec<Elem>>> {
    if d < 2 {
        return Ok(Vec::new());
    }
    let mut rows: Vec<Vec<Elem>> = Vec::with_capacity(d - 1);
    // x^d = -(f_0 + f_1 x + ... + f_{d-1} x^{d-1})
    let first: Vec<Elem> = f[..d].iter().map(|c| c.neg()).collect();
    rows.push(first);
    for _ in 1..d - 1 {
        let prev = rows.last().unwrap();
        // multiply by x, then fold the overflowing x^d term through row 0
        let top = prev[d - 1].clone();
        let mut next: Vec<Elem> = Vec::with_capacity(d);
        next.push(zero(q));
        for c in &prev[..d - 1] {
            next.push(c.clone());
        }
        for (i, r) in rows[0].iter().enumerate() {
            next[i] = next[i].add(&top.mul(r)?)?;
        }
        rows.push(next);
    }
    Ok(rows)
}

fn build_newton_sums(q: &Ring, f: &[Elem], d: usize) -> Result<Vec<Elem>> {
    let mut p: Vec<Elem> = Vec::with_capacity(d);
    p.push(crate::ring::coerce_i64(q, d as i64)?);
    for k in 1..d {
        // p_k = -k*f_{d-k} - sum_{i=1}^{k-1} f_{d-i} p_{k-i}
        let mut acc = f[d - k].mul(&crate::ring::coerce_i64(q, k as i64)?)?.neg();
        for i in 1..k {
            acc = acc.sub(&f[d - i].mul(&p[k - i])?)?;
        }
        p.push(acc);
    }
    Ok(p)
}

/// Reduced product of two element coefficient vectors.
pub fn nf_mul_coeffs(nf: &NfData, a: &[Elem], b: &[Elem]) -> Result<Vec<Elem>> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let q = rationals();
    let prod = dense::dp_mul(&q, a, b)?;
    nf_reduce(nf, prod)
}

/// Unreduced product: plain polynomial multiplication over Q. Callers may
/// accumulate several of these before a single `nf_reduce`.
pub fn nf_mul_unreduced(a: &[Elem], b: &[Elem]) -> Result<Vec<Elem>> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    dense::dp_mul(&rationals(), a, b)
}

/// Reduce a coefficient vector of any length modulo f.
pub fn nf_reduce(nf: &NfData, mut coeffs: Vec<Elem>) -> Result<Vec<Elem>> {
    let d = nf.degree;
    while coeffs.last().map_or(false, Elem::is_zero) {
        coeffs.pop();
    }
    if coeffs.len() <= d {
        return Ok(coeffs);
    }
    if coeffs.len() - 1 <= 2 * d - 2 {
        let mut out: Vec<Elem> = coeffs[..d].to_vec();
        for j in d..coeffs.len() {
            let c = &coeffs[j];
            if c.is_zero() {
                continue;
            }
            for (i, r) in nf.power_table[j - d].iter().enumerate() {
                if !r.is_zero() {
                    out[i] = out[i].add(&c.mul(r)?)?;
                }
            }
        }
        while out.last().map_or(false, Elem::is_zero) {
            out.pop();
        }
        return Ok(out);
    }
    dense::dp_rem_monic(&rationals(), &coeffs, &nf.f)
}

/// Inverse via the extended Euclidean algorithm against f.
pub fn nf_inverse_coeffs(nf: &NfData, a: &[Elem]) -> Result<Vec<Elem>> {
    let q = rationals();
    if a.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let (g, s, _t) = dense::dp_xgcd(&q, a, &nf.f)?;
    if g.len() == 1 {
        let ginv = g[0].try_inverse()?;
        let inv = dense::dp_mul_scalar(&q, &s, &ginv)?;
        return nf_reduce(nf, inv);
    }
    // f was reducible: surface the nontrivial factor as the witness
    let pring = polynomial_ring(q, &nf.var);
    Err(Error::ImpossibleInverse(Box::new(Elem { ring: pring, repr: Repr::Dense(g) })))
}

/// Trace as the dot product with the Newton sums of f.
pub fn nf_trace(x: &Elem) -> Result<Elem> {
    let nf = nf_data(&x.ring)?;
    let q = rationals();
    let coeffs = nf_coeffs(x);
    let mut acc = zero(&q);
    for (c, p) in coeffs.iter().zip(nf.newton_sums.iter()) {
        acc = acc.add(&c.mul(p)?)?;
    }
    Ok(acc)
}

/// Norm as res(f, a); f is monic so no leading-coefficient correction is
/// needed.
pub fn nf_norm(x: &Elem) -> Result<Elem> {
    let nf = nf_data(&x.ring)?;
    let q = rationals();
    let coeffs = nf_coeffs(x);
    if coeffs.is_empty() {
        return Ok(zero(&q));
    }
    dense::dp_resultant(&q, &nf.f, coeffs)
}

/// The element 1/den * (c_0 + c_1 x + ...) from integer data.
pub fn nf_elem_from_ints(field: &Ring, num: &[i64], den: i64) -> Result<Elem> {
    let q = rationals();
    let d = crate::ring::coerce_i64(&q, den)?;
    let dinv = d.try_inverse()?;
    let mut coeffs = Vec::with_capacity(num.len());
    for &n in num {
        coeffs.push(crate::ring::coerce_i64(&q, n)?.mul(&dinv)?);
    }
    while coeffs.last().map_or(false, Elem::is_zero) {
        coeffs.pop();
    }
    let nf = nf_data(field)?;
    let coeffs = nf_reduce(nf, coeffs)?;
    Ok(Elem { ring: field.clone(), repr: Repr::Dense(coeffs) })
}

pub fn nf_data(ring: &Ring) -> Result<&NfData> {
    match &ring.kind {
        RingKind::NumberField(nf) => Ok(nf),
        _ => Err(Error::InvalidParameter("not a number field".into())),
    }
}

pub fn nf_coeffs(x: &Elem) -> &[Elem] {
    match &x.repr {
        Repr::Dense(c) => c,
        _ => panic!("number field elements are dense"),
    }
}

/// Build an element directly from rational coefficients (reduced mod f).
pub fn nf_elem_from_coeffs(field: &Ring, coeffs: Vec<Elem>) -> Result<Elem> {
    let nf = nf_data(field)?;
    let coeffs = nf_reduce(nf, coeffs)?;
    Ok(Elem { ring: field.clone(), repr: Repr::Dense(coeffs) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{coerce_i64, gen, polynomial_ring, rationals};
    use crate::rng::SplitMix64;
    use alloc::vec::Vec;

    fn defpoly(coeffs: &[i64]) -> Elem {
        // dense polynomial over Q from small integer coefficients
        let qx = polynomial_ring(rationals(), "x");
        let q = rationals();
        let v: Vec<Elem> = coeffs.iter().map(|&c| coerce_i64(&q, c).unwrap()).collect();
        crate::dense::DensePoly::from_coeffs(&qx, v).to_elem()
    }

    fn cubic_field() -> Ring {
        // Q[x]/(x^3 + 3x + 1)
        number_field(&defpoly(&[1, 3, 0, 1]), "x").unwrap()
    }

    #[test]
    fn power_basis_arithmetic() {
        let k = cubic_field();
        let x = gen(&k, 0).unwrap();
        // x^3 = -3x - 1
        let x3 = x.pow(3).unwrap();
        let expect = nf_elem_from_ints(&k, &[-1, -3, 0], 1).unwrap();
        assert_eq!(x3, expect);
        // high powers reduce through the precomputed table: x^4 = -3x^2 - x
        let x4 = x.pow(4).unwrap();
        assert_eq!(x4, nf_elem_from_ints(&k, &[0, -1, -3], 1).unwrap());
    }

    #[test]
    fn inverse_of_generator() {
        let k = cubic_field();
        let x = gen(&k, 0).unwrap();
        // x*(-x^2 - 3) = -x^3 - 3x = 1
        let inv = x.try_inverse().unwrap();
        assert_eq!(inv, nf_elem_from_ints(&k, &[-3, 0, -1], 1).unwrap());
        assert!(x.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn random_inverses_multiply_to_one() {
        let k = cubic_field();
        let mut rng = SplitMix64::new(31);
        for _ in 0..20 {
            let a = nf_elem_from_ints(
                &k,
                &[rng.range_i64(-9, 9), rng.range_i64(-9, 9), rng.range_i64(-9, 9)],
                1 + rng.below(4) as i64,
            )
            .unwrap();
            if a.is_zero() {
                continue;
            }
            assert!(a.mul(&a.try_inverse().unwrap()).unwrap().is_one());
        }
    }

    #[test]
    fn reducible_modulus_surfaces_as_impossible_inverse() {
        // x^2 - 1 is not irreducible; inverting x - 1 must fail with a witness
        let k = number_field(&defpoly(&[-1, 0, 1]), "x").unwrap();
        let x = gen(&k, 0).unwrap();
        let a = x.sub(&coerce_i64(&k, 1).unwrap()).unwrap();
        match a.try_inverse() {
            Err(crate::error::Error::ImpossibleInverse(_)) => {}
            other => panic!("expected ImpossibleInverse, got {other:?}"),
        }
    }

    #[test]
    fn trace_and_norm_known_values() {
        let k = cubic_field();
        let x = gen(&k, 0).unwrap();
        let q = rationals();
        // for f = x^3 + 3x + 1: Tr(1) = 3, Tr(x) = 0, Tr(x^2) = -6,
        // N(x) = (-1)^3 * f(0)/1 = -1
        assert_eq!(nf_trace(&coerce_i64(&k, 1).unwrap()).unwrap(), coerce_i64(&q, 3).unwrap());
        assert_eq!(nf_trace(&x).unwrap(), coerce_i64(&q, 0).unwrap());
        assert_eq!(nf_trace(&x.pow(2).unwrap()).unwrap(), coerce_i64(&q, -6).unwrap());
        assert_eq!(nf_norm(&x).unwrap(), coerce_i64(&q, -1).unwrap());
    }

    #[test]
    fn norm_is_multiplicative_trace_is_additive() {
        let k = cubic_field();
        let mut rng = SplitMix64::new(32);
        for _ in 0..15 {
            let a = nf_elem_from_ints(
                &k,
                &[rng.range_i64(-5, 5), rng.range_i64(-5, 5), rng.range_i64(-5, 5)],
                1,
            )
            .unwrap();
            let b = nf_elem_from_ints(
                &k,
                &[rng.range_i64(-5, 5), rng.range_i64(-5, 5), rng.range_i64(-5, 5)],
                1,
            )
            .unwrap();
            let ab = a.mul(&b).unwrap();
            assert_eq!(
                nf_norm(&ab).unwrap(),
                nf_norm(&a).unwrap().mul(&nf_norm(&b).unwrap()).unwrap()
            );
            let sum = a.add(&b).unwrap();
            assert_eq!(
                nf_trace(&sum).unwrap(),
                nf_trace(&a).unwrap().add(&nf_trace(&b).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn non_monic_defining_polynomial_is_normalized() {
        // 2x^2 + 2 defines the same field as x^2 + 1
        let k1 = number_field(&defpoly(&[2, 0, 2]), "i").unwrap();
        let k2 = number_field(&defpoly(&[1, 0, 1]), "i").unwrap();
        assert!(crate::ring::rings_equal(&k1, &k2));
        let i = gen(&k1, 0).unwrap();
        assert_eq!(i.pow(2).unwrap(), coerce_i64(&k1, -1).unwrap());
    }

    #[test]
    fn newton_sums_match_trace_of_powers() {
        let k = cubic_field();
        let nf = nf_data(&k).unwrap();
        let x = gen(&k, 0).unwrap();
        for j in 0..nf.newton_sums.len().min(5) {
            let tr = nf_trace(&x.pow(j as u64).unwrap()).unwrap();
            assert_eq!(tr, nf.newton_sums[j], "p_{j} mismatch");
        }
    }
}
