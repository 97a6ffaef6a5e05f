//! Two-generator ideal arithmetic in orders of number fields.
//!
//! Integral ideals are stored as S-normal presentations `<a, alpha>` where
//! `a` is a positive integer in the ideal, `alpha` an order element and S the
//! set of primes dividing `a`. Products, powers and inverses then work on the
//! two generators alone; a row HNF of the full Z-basis is kept around as the
//! independent oracle and for normalization.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dense::{dp_resultant, trim};
use crate::error::{Error, Result};
use crate::numfield::{nf_coeffs, nf_data, nf_elem_from_coeffs, nf_norm};
use crate::primes::DescendingPrimes;
use crate::ring::{self, integer_residue, integers, rationals, Elem, Repr, Ring};
use crate::rng::SplitMix64;

// ---------------------------------------------------------------------------
// Orders and their elements
// ---------------------------------------------------------------------------

/// An order in a number field, presented by a Q-basis in the power basis.
/// `basis = None` means the equation order Z[theta] itself.
#[derive(Debug)]
pub struct Order {
    pub field: Ring,
    pub degree: usize,
    basis: Option<Vec<Vec<BigRational>>>,
    basis_inv: Option<Vec<Vec<BigRational>>>,
    pub is_maximal: bool,
}

pub type OrderRef = Arc<Order>;

fn rat_of(e: &Elem) -> BigRational {
    match &e.repr {
        Repr::Rat(r) => r.clone(),
        Repr::Int(v) => BigRational::from(v.clone()),
        _ => panic!("expected a rational scalar"),
    }
}

fn elem_of_rat(r: BigRational) -> Elem {
    Elem { ring: rationals(), repr: Repr::Rat(r) }
}

/// The equation order Z[theta] of a field with integral defining polynomial.
pub fn equation_order(field: &Ring, is_maximal: bool) -> Result<OrderRef> {
    let nf = nf_data(field)?;
    for c in &nf.f {
        if !rat_of(c).is_integer() {
            return Err(Error::InvalidParameter(
                "equation order requires an integral defining polynomial".into(),
            ));
        }
    }
    Ok(Arc::new(Order {
        field: field.clone(),
        degree: nf.degree,
        basis: None,
        basis_inv: None,
        is_maximal,
    }))
}

/// An order with an explicit basis matrix (rows give omega_i in the power
/// basis). Checks omega_1 = 1 and multiplicative closure of the Z-span.
pub fn order_with_basis(
    field: &Ring,
    rows: Vec<Vec<BigRational>>,
    is_maximal: bool,
) -> Result<OrderRef> {
    let nf = nf_data(field)?;
    let n = nf.degree;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("basis matrix must be n x n".into()));
    }
    let one_row: Vec<BigRational> = (0..n)
        .map(|j| if j == 0 { BigRational::one() } else { BigRational::zero() })
        .collect();
    if rows[0] != one_row {
        return Err(Error::InvalidParameter("first basis element must be 1".into()));
    }
    let inv = invert_rational_matrix(&rows)
        .ok_or_else(|| Error::InvalidParameter("basis matrix is singular".into()))?;
    let order = Arc::new(Order {
        field: field.clone(),
        degree: n,
        basis: Some(rows),
        basis_inv: Some(inv),
        is_maximal,
    });
    // closure: products of basis elements must have integral coordinates
    for i in 0..n {
        for j in i..n {
            let p = basis_elem(&order, i)?.mul(&basis_elem(&order, j)?)?;
            if field_to_integral_coords(&order, &p)?.is_none() {
                return Err(Error::InvalidParameter(
                    "basis does not span a ring: product leaves the Z-span".into(),
                ));
            }
        }
    }
    Ok(order)
}

fn basis_elem(order: &OrderRef, i: usize) -> Result<Elem> {
    let mut coords = vec![BigInt::zero(); order.degree];
    coords[i] = BigInt::one();
    coords_to_field(order, &coords)
}

fn invert_rational_matrix(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= p.clone();
            inv[col][j] /= p.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
                let t = &f * &inv[col][j];
                inv[r][j] -= t;
            }
        }
    }
    Some(inv)
}

/// An element of an order, as integer coordinates in the order basis.
#[derive(Clone, Debug)]
pub struct OrderElem {
    pub order: OrderRef,
    pub coords: Vec<BigInt>,
}

impl PartialEq for OrderElem {
    fn eq(&self, other: &Self) -> bool {
        ring::rings_equal(&self.order.field, &other.order.field) && self.coords == other.coords
    }
}

impl OrderElem {
    pub fn new(order: &OrderRef, coords: Vec<BigInt>) -> Self {
        assert_eq!(coords.len(), order.degree);
        OrderElem { order: order.clone(), coords }
    }

    pub fn from_i64(order: &OrderRef, coords: &[i64]) -> Self {
        let mut v: Vec<BigInt> = coords.iter().map(|&c| BigInt::from(c)).collect();
        v.resize(order.degree, BigInt::zero());
        OrderElem { order: order.clone(), coords: v }
    }

    pub fn zero(order: &OrderRef) -> Self {
        OrderElem { order: order.clone(), coords: vec![BigInt::zero(); order.degree] }
    }

    pub fn one(order: &OrderRef) -> Self {
        Self::from_int(order, BigInt::one())
    }

    /// The integer m as an order element (omega_1 = 1 by invariant).
    pub fn from_int(order: &OrderRef, m: BigInt) -> Self {
        let mut coords = vec![BigInt::zero(); order.degree];
        coords[0] = m;
        OrderElem { order: order.clone(), coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn to_field(&self) -> Result<Elem> {
        coords_to_field(&self.order, &self.coords)
    }

    pub fn add(&self, other: &Self) -> Self {
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        OrderElem { order: self.order.clone(), coords }
    }

    pub fn neg(&self) -> Self {
        OrderElem {
            order: self.order.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, m: &BigInt) -> Self {
        OrderElem {
            order: self.order.clone(),
            coords: self.coords.iter().map(|c| c * m).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let p = self.to_field()?.mul(&other.to_field()?)?;
        let coords = field_to_integral_coords(&self.order, &p)?
            .expect("order is multiplicatively closed");
        Ok(OrderElem { order: self.order.clone(), coords })
    }
}

pub fn coords_to_field(order: &OrderRef, coords: &[BigInt]) -> Result<Elem> {
    let n = order.degree;
    let mut power: Vec<BigRational> = vec![BigRational::zero(); n];
    match &order.basis {
        None => {
            for (i, c) in coords.iter().enumerate() {
                power[i] = BigRational::from(c.clone());
            }
        }
        Some(rows) => {
            for (i, c) in coords.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let cr = BigRational::from(c.clone());
                for j in 0..n {
                    let t = &cr * &rows[i][j];
                    power[j] += t;
                }
            }
        }
    }
    let coeffs: Vec<Elem> = power.into_iter().map(elem_of_rat).collect();
    nf_elem_from_coeffs(&order.field, coeffs)
}

/// Rational coordinates of a field element w.r.t. the order basis.
pub fn field_to_rat_coords(order: &OrderRef, x: &Elem) -> Result<Vec<BigRational>> {
    let n = order.degree;
    let raw = nf_coeffs(x);
    let mut power: Vec<BigRational> = vec![BigRational::zero(); n];
    for (i, c) in raw.iter().enumerate() {
        power[i] = rat_of(c);
    }
    match &order.basis_inv {
        None => Ok(power),
        Some(inv) => {
            let mut out = vec![BigRational::zero(); n];
            for (i, c) in power.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = c * &inv[i][j];
                    out[j] += t;
                }
            }
            Ok(out)
        }
    }
}

/// Integer coordinates if the element lies in the order, `None` otherwise.
pub fn field_to_integral_coords(order: &OrderRef, x: &Elem) -> Result<Option<Vec<BigInt>>> {
    let rat = field_to_rat_coords(order, x)?;
    let mut out = Vec::with_capacity(rat.len());
    for r in rat {
        if !r.is_integer() {
            return Ok(None);
        }
        out.push(r.to_integer());
    }
    Ok(Some(out))
}

/// Minimal d > 0 with d * alpha^{-1} in the order; generates alpha*O cap Z.
pub fn order_denominator(order: &OrderRef, alpha: &Elem) -> Result<BigInt> {
    if alpha.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let inv = alpha.try_inverse()?;
    let coords = field_to_rat_coords(order, &inv)?;
    let mut d = BigInt::one();
    for c in &coords {
        d = d.lcm(c.denom());
    }
    Ok(d.abs())
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

fn integral_f(order: &OrderRef) -> Result<Vec<BigInt>> {
    let nf = nf_data(&order.field)?;
    Ok(nf.f.iter().map(|c| rat_of(c).to_integer()).collect())
}

/// res(f, g) for monic integral f by CRT on word-size primes, with the
/// Hadamard-style bound |res| <= ||f||_2^(deg g) * ||g||_2^(deg f).
fn resultant_modular(f: &[BigInt], g: &[BigInt]) -> Result<BigInt> {
    let g: Vec<BigInt> = {
        let mut v = g.to_vec();
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        v
    };
    if g.is_empty() {
        return Ok(BigInt::zero());
    }
    if g.len() == 1 {
        return Ok(g[0].pow((f.len() - 1) as u32));
    }
    let norm_sq = |v: &[BigInt]| -> BigInt { v.iter().map(|c| c * c).sum() };
    let bound_sq: BigInt =
        norm_sq(f).pow((g.len() - 1) as u32) * norm_sq(&g).pow((f.len() - 1) as u32);
    let bound = bound_sq.sqrt() + 1;
    let target: BigInt = bound * 2 + 1;

    let mut modulus = BigInt::one();
    let mut residue = BigInt::zero();
    for p in DescendingPrimes::new() {
        let zp = integer_residue(BigInt::from(p))?;
        let fp: Vec<Elem> = f.iter().map(|c| ring::coerce_int(&zp, c)).collect::<Result<_>>()?;
        let gp: Vec<Elem> = g.iter().map(|c| ring::coerce_int(&zp, c)).collect::<Result<_>>()?;
        let rp = dp_resultant(&zp, &trim(fp), &trim(gp))?;
        let rv = match &rp.repr {
            Repr::Int(v) => v.clone(),
            _ => unreachable!(),
        };
        // incremental CRT with symmetric lift
        if modulus.is_one() {
            residue = rv;
            modulus = BigInt::from(p);
        } else {
            let pb = BigInt::from(p);
            let minv = mod_inverse(&modulus, &pb).expect("distinct primes are coprime");
            let delta = ((&rv - &residue) * minv).mod_floor(&pb);
            residue += &modulus * delta;
            modulus *= pb;
        }
        if modulus > target {
            break;
        }
    }
    let half = &modulus / 2;
    if residue > half {
        residue -= &modulus;
    }
    Ok(residue)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// N(alpha) as an exact integer. Power-basis orders go through the modular
/// resultant; general bases fall back to the rational norm.
pub fn element_norm(x: &OrderElem) -> Result<BigInt> {
    if x.order.basis.is_none() {
        let f = integral_f(&x.order)?;
        return resultant_modular(&f, &x.coords);
    }
    let n = nf_norm(&x.to_field()?)?;
    let r = rat_of(&n);
    debug_assert!(r.is_integer(), "norm of an order element is a rational integer");
    Ok(r.to_integer())
}

// ---------------------------------------------------------------------------
// Integer HNF (lower triangular, pivots on the diagonal)
// ---------------------------------------------------------------------------

/// Row HNF of a spanning set, in lower-triangular orientation: row i has its
/// pivot at column i, positive, with 0 <= h[k][i] < h[i][i] for k > i. With
/// omega_1 = 1 this makes h[0][0] the minimal positive integer of the module.
pub fn hnf_rows(rows: Vec<Vec<BigInt>>, n: usize) -> Result<Vec<Vec<BigInt>>> {
    let mut active: Vec<Vec<BigInt>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|c| !c.is_zero()))
        .collect();
    let mut pivots: Vec<Option<Vec<BigInt>>> = vec![None; n];
    for col in (0..n).rev() {
        loop {
            let nz: Vec<usize> = (0..active.len())
                .filter(|&i| !active[i][col].is_zero())
                .collect();
            if nz.is_empty() {
                break;
            }
            if nz.len() == 1 {
                let mut row = active.swap_remove(nz[0]);
                if row[col].is_negative() {
                    for c in row.iter_mut() {
                        *c = -&*c;
                    }
                }
                pivots[col] = Some(row);
                break;
            }
            // reduce all rows by the one with smallest |entry| in this column
            let best = *nz
                .iter()
                .min_by_key(|&&i| active[i][col].magnitude().clone())
                .unwrap();
            for &i in &nz {
                if i == best {
                    continue;
                }
                let q = div_round(&active[i][col], &active[best][col]);
                if q.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = &q * &active[best][j];
                    active[i][j] -= t;
                }
            }
            active.retain(|r| r.iter().any(|c| !c.is_zero()));
        }
    }
    let mut out: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (col, p) in pivots.into_iter().enumerate() {
        match p {
            Some(r) => out.push(r),
            None => {
                return Err(Error::InvalidParameter(format!(
                    "module is not full rank (no pivot in column {col})"
                )))
            }
        }
    }
    // reduce sub-pivot entries into [0, pivot)
    for k in 1..n {
        for j in (0..k).rev() {
            let q = out[k][j].div_floor(&out[j][j]);
            if q.is_zero() {
                continue;
            }
            for c in 0..n {
                let t = &q * &out[j][c];
                out[k][c] -= t;
            }
        }
    }
    Ok(out)
}

/// Quotient rounded to nearest, so remainders stay small during elimination.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let r2: BigInt = &r * 2;
    if r2.magnitude() > b.magnitude() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Rows of the regular representation of x: coordinates of x * omega_j.
pub fn regular_rep_rows(x: &OrderElem) -> Result<Vec<Vec<BigInt>>> {
    let n = x.order.degree;
    let xf = x.to_field()?;
    let mut rows = Vec::with_capacity(n);
    for j in 0..n {
        let w = basis_elem(&x.order, j)?;
        let p = xf.mul(&w)?;
        let coords = field_to_integral_coords(&x.order, &p)?
            .expect("order is multiplicatively closed");
        rows.push(coords);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Two-generator ideals
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct TwoGenIdeal {
    pub order: OrderRef,
    /// Positive integer generator; its prime divisors are exactly `s`.
    pub a: BigInt,
    pub alpha: OrderElem,
    /// Sorted primes dividing `a`.
    pub s: Vec<u64>,
    /// N(A), cached at construction.
    pub norm: BigInt,
}

#[derive(Clone, Debug)]
pub struct FracIdeal {
    pub num: TwoGenIdeal,
    /// Positive denominator, minimal after canonicalization.
    pub den: BigInt,
}

#[derive(Clone, Debug)]
pub struct PrimeIdeal {
    pub ideal: TwoGenIdeal,
    pub p: u64,
    pub residue_degree: usize,
    pub ramification: usize,
    /// Valuation element gamma: v_P(beta) = max { k : gamma^k beta integral }.
    pub val_elem: Elem,
}

/// Primes dividing a, by trial division plus a single large prime cofactor.
fn factor_generator(a: &BigInt) -> Result<Vec<u64>> {
    let mut n = a.abs();
    let mut out: Vec<u64> = Vec::new();
    let push = |p: u64, out: &mut Vec<u64>| {
        if out.last() != Some(&p) {
            out.push(p);
        }
    };
    let mut d = 2u64;
    while d <= 65536 {
        let db = BigInt::from(d);
        if (&n % &db).is_zero() {
            push(d, &mut out);
            while (&n % &db).is_zero() {
                n /= &db;
            }
        }
        d = if d == 2 { 3 } else { d + 2 };
        if n.is_one() {
            break;
        }
    }
    if !n.is_one() {
        match n.to_u64() {
            Some(v) if crate::primes::is_prime_u64(v) => push(v, &mut out),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "ideal generator has an unfactorable cofactor {n}"
                )))
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn unit_ideal(order: &OrderRef) -> TwoGenIdeal {
    TwoGenIdeal {
        order: order.clone(),
        a: BigInt::one(),
        alpha: OrderElem::one(order),
        s: Vec::new(),
        norm: BigInt::one(),
    }
}

/// gcd(a, d / gcd(a, d)) = 1 with d = min(alpha*O cap N): Pohst's criterion
/// for an S-normal presentation.
pub fn is_normal(order: &OrderRef, a: &BigInt, alpha: &OrderElem) -> Result<bool> {
    if alpha.is_zero() {
        return Ok(false);
    }
    let d = order_denominator(order, &alpha.to_field()?)?;
    let g = a.gcd(&d);
    Ok(a.gcd(&(&d / &g)).is_one())
}

/// HNF basis of the ideal: row HNF of a*I stacked over the regular
/// representation of alpha.
pub fn hnf_basis(ideal: &TwoGenIdeal) -> Result<Vec<Vec<BigInt>>> {
    let n = ideal.order.degree;
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut r = vec![BigInt::zero(); n];
            r[j] = ideal.a.clone();
            r
        })
        .collect();
    if !ideal.alpha.is_zero() {
        rows.extend(regular_rep_rows(&ideal.alpha)?);
    }
    hnf_rows(rows, n)
}

fn hnf_det(h: &[Vec<BigInt>]) -> BigInt {
    h.iter().enumerate().map(|(i, r)| r[i].clone()).product()
}

pub fn ideals_equal(x: &TwoGenIdeal, y: &TwoGenIdeal) -> Result<bool> {
    Ok(hnf_basis(x)? == hnf_basis(y)?)
}

/// Normalize a Z-basis (any spanning rows) into an S-normal two-generator
/// presentation: a = min(A cap N) from the HNF, alpha drawn as random small
/// combinations of the HNF rows until Pohst's criterion and the norm formula
/// N(A) = gcd(a^n, N(alpha)) both hold.
pub fn make_normal(order: &OrderRef, rows: Vec<Vec<BigInt>>) -> Result<TwoGenIdeal> {
    let n = order.degree;
    let h = hnf_rows(rows, n)?;
    let a = h[0][0].clone();
    let norm = hnf_det(&h);
    let s = factor_generator(&a)?;
    let a_pow_n = a.pow(n as u32);

    let accept = |alpha: &OrderElem| -> Result<bool> {
        if alpha.is_zero() {
            return Ok(false);
        }
        if !is_normal(order, &a, alpha)? {
            return Ok(false);
        }
        Ok(a_pow_n.gcd(&element_norm(alpha)?.abs()) == norm)
    };

    // deterministic candidates first: single rows, then the row sum
    for row in &h {
        let cand = OrderElem::new(order, row.clone());
        if accept(&cand)? {
            return Ok(TwoGenIdeal { order: order.clone(), a, alpha: cand, s, norm });
        }
    }
    let sum = h.iter().fold(OrderElem::zero(order), |acc, r| {
        acc.add(&OrderElem::new(order, r.clone()))
    });
    if accept(&sum)? {
        return Ok(TwoGenIdeal { order: order.clone(), a, alpha: sum, s, norm });
    }

    // randomized search, deterministic seed, doubling coefficient bound
    let seed = a.to_u64().unwrap_or(0x5bd1e995) ^ 0x9e37_79b9_7f4a_7c15;
    let mut rng = SplitMix64::new(seed);
    let mut bound: i64 = 2;
    for attempt in 0..(1u32 << 16) {
        if attempt > 0 && attempt % 10 == 0 && bound < (1 << 20) {
            bound *= 2;
        }
        let mut cand = OrderElem::zero(order);
        for row in &h {
            let c = rng.range_i64(-bound, bound);
            if c != 0 {
                cand = cand.add(&OrderElem::new(order, row.clone()).scale(&BigInt::from(c)));
            }
        }
        if accept(&cand)? {
            return Ok(TwoGenIdeal { order: order.clone(), a, alpha: cand, s, norm });
        }
    }
    Err(Error::RandomSearchExhausted)
}

/// Ideal generated by a list of order elements.
pub fn ideal_from_generators(order: &OrderRef, gens: &[OrderElem]) -> Result<TwoGenIdeal> {
    let mut rows = Vec::new();
    for g in gens {
        if !g.is_zero() {
            rows.extend(regular_rep_rows(g)?);
        }
    }
    make_normal(order, rows)
}

/// Ideal from an arbitrary (not necessarily normal) pair of generators.
pub fn ideal_from_two(order: &OrderRef, a: BigInt, alpha: OrderElem) -> Result<TwoGenIdeal> {
    let n = order.degree;
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut r = vec![BigInt::zero(); n];
            r[j] = a.clone();
            r
        })
        .collect();
    if !alpha.is_zero() {
        rows.extend(regular_rep_rows(&alpha)?);
    }
    make_normal(order, rows)
}

/// Principal ideal of an order element.
pub fn principal_ideal(order: &OrderRef, x: &OrderElem) -> Result<TwoGenIdeal> {
    if x.is_zero() {
        return Err(Error::DivisionByZero);
    }
    // integer generator: (m, m) is trivially normal
    if x.coords[1..].iter().all(Zero::is_zero) {
        let m = x.coords[0].abs();
        let s = factor_generator(&m)?;
        let norm = m.pow(order.degree as u32);
        return Ok(TwoGenIdeal {
            order: order.clone(),
            a: m.clone(),
            alpha: OrderElem::from_int(order, m),
            s,
            norm,
        });
    }
    ideal_from_generators(order, core::slice::from_ref(x))
}

fn prod_of(primes: &[u64]) -> BigInt {
    primes.iter().fold(BigInt::one(), |acc, &p| acc * BigInt::from(p))
}

fn merge_primes(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Extend the S of a normal presentation to S union T without changing the
/// ideal: with 1 = u*(a*s) + v*t the pair (a, v*t*alpha + u*a*s) is
/// (S union T)-normal, s = prod(S), t = prod(T minus S).
pub fn extend_s(ideal: &TwoGenIdeal, t_primes: &[u64]) -> Result<TwoGenIdeal> {
    let extra: Vec<u64> =
        t_primes.iter().copied().filter(|p| !ideal.s.contains(p)).collect();
    if extra.is_empty() {
        return Ok(ideal.clone());
    }
    let s_new = merge_primes(&ideal.s, &extra);
    let s = prod_of(&ideal.s);
    let t = prod_of(&extra);
    let a_s = &ideal.a * &s;
    let e = a_s.extended_gcd(&t);
    debug_assert!(e.gcd.is_one(), "a*s and t are coprime by construction");
    let (u, v) = (e.x, e.y);
    // beta = v*t*alpha + u*a*s
    let beta = ideal
        .alpha
        .scale(&(&v * &t))
        .add(&OrderElem::from_int(&ideal.order, &u * &a_s));
    Ok(TwoGenIdeal {
        order: ideal.order.clone(),
        a: ideal.a.clone(),
        alpha: beta,
        s: s_new,
        norm: ideal.norm.clone(),
    })
}

/// Reduce alpha's coordinates symmetrically mod a^2; preserves both the
/// ideal (a^2 in aO) and S-normality of the presentation.
fn reduce_alpha(a: &BigInt, alpha: OrderElem) -> OrderElem {
    let m: BigInt = a * a;
    if m.is_one() {
        return alpha;
    }
    let half = &m / 2;
    let coords = alpha
        .coords
        .iter()
        .map(|c| {
            let mut r = c.mod_floor(&m);
            if r > half {
                r -= &m;
            }
            r
        })
        .collect();
    OrderElem { order: alpha.order, coords }
}

fn mul_same_s(x: &TwoGenIdeal, y: &TwoGenIdeal, s: Vec<u64>) -> Result<TwoGenIdeal> {
    let a = &x.a * &y.a;
    let alpha = reduce_alpha(&a, x.alpha.mul(&y.alpha)?);
    Ok(TwoGenIdeal {
        order: x.order.clone(),
        a,
        alpha,
        s,
        norm: &x.norm * &y.norm,
    })
}

/// Product of two integral ideals: both presentations are first extended to
/// the union of their prime sets, then generators multiply componentwise.
pub fn ideal_mul(x: &TwoGenIdeal, y: &TwoGenIdeal) -> Result<TwoGenIdeal> {
    if !ring::rings_equal(&x.order.field, &y.order.field) {
        return Err(Error::MixedParents);
    }
    let s = merge_primes(&x.s, &y.s);
    let xe = extend_s(x, &y.s)?;
    let ye = extend_s(y, &x.s)?;
    mul_same_s(&xe, &ye, s)
}

/// A^k by repeated squaring on the generator pair (same S throughout).
pub fn ideal_pow(x: &TwoGenIdeal, k: u64) -> Result<TwoGenIdeal> {
    if k == 0 {
        return Ok(unit_ideal(&x.order));
    }
    let mut acc: Option<TwoGenIdeal> = None;
    let mut sq = x.clone();
    let mut k = k;
    loop {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => sq.clone(),
                Some(v) => mul_same_s(&v, &sq, x.s.clone())?,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        sq = mul_same_s(&sq, &sq, x.s.clone())?;
    }
    Ok(acc.unwrap())
}

/// N(A) = gcd(a^n, |N(alpha)|), recomputed from the presentation (the
/// cached value is filled at construction; this is the oracle form).
pub fn ideal_norm(ideal: &TwoGenIdeal) -> Result<BigInt> {
    if ideal.alpha.is_zero() {
        return Ok(ideal.a.pow(ideal.order.degree as u32));
    }
    let an = ideal.a.pow(ideal.order.degree as u32);
    Ok(an.gcd(&element_norm(&ideal.alpha)?.abs()))
}

/// A^{-1} = <1, g2/alpha> where <g> = alpha*O cap Z and g2 is the part of g
/// prime to S, returned with minimal positive denominator.
pub fn ideal_inverse(ideal: &TwoGenIdeal) -> Result<FracIdeal> {
    if ideal.alpha.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let order = &ideal.order;
    let alpha_f = ideal.alpha.to_field()?;
    let gamma = alpha_f.try_inverse()?;
    let g = order_denominator(order, &alpha_f)?;
    // split g = g1 * g2, g1 supported on S
    let mut g2 = g.clone();
    for &p in &ideal.s {
        let pb = BigInt::from(p);
        while (&g2 % &pb).is_zero() {
            g2 /= &pb;
        }
    }
    let h = gamma.mul(&ring::coerce_int(&order.field, &g2)?)?;
    // clear denominators: d minimal with d*h integral
    let rat = field_to_rat_coords(order, &h)?;
    let mut d = BigInt::one();
    for c in &rat {
        d = d.lcm(c.denom());
    }
    let dh_coords: Vec<BigInt> =
        rat.iter().map(|c| (c * BigRational::from(d.clone())).to_integer()).collect();
    let dh = OrderElem::new(order, dh_coords);
    let n = order.degree;
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut r = vec![BigInt::zero(); n];
            r[j] = d.clone();
            r
        })
        .collect();
    rows.extend(regular_rep_rows(&dh)?);
    let mut h_rows = hnf_rows(rows, n)?;
    // canonical minimal denominator: strip the common integer factor
    let mut content = BigInt::zero();
    for r in &h_rows {
        for c in r {
            content = content.gcd(c);
        }
    }
    let common = content.gcd(&d);
    let mut den = d;
    if common > BigInt::one() {
        for r in h_rows.iter_mut() {
            for c in r.iter_mut() {
                *c /= &common;
            }
        }
        den /= &common;
    }
    Ok(FracIdeal { num: make_normal(order, h_rows)?, den })
}

// ---------------------------------------------------------------------------
// Prime decomposition and valuations
// ---------------------------------------------------------------------------

/// disc(f) = (-1)^(d(d-1)/2) res(f, f') for monic integral f.
pub fn defining_discriminant(order: &OrderRef) -> Result<BigInt> {
    let f = integral_f(order)?;
    let z = integers();
    let fe: Vec<Elem> = f.iter().map(|c| ring::coerce_int(&z, c)).collect::<Result<_>>()?;
    let df = crate::dense::dp_derivative(&z, &fe)?;
    let r = dp_resultant(&z, &fe, &df)?;
    let v = match &r.repr {
        Repr::Int(x) => x.clone(),
        _ => unreachable!(),
    };
    let d = f.len() - 1;
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -v } else { v })
}

/// Factor p*O into primes <p, g_i(theta)> from the factorization of f mod p.
/// Requires p not to divide the index; guarded by p^2 not dividing disc(f)
/// unless the order is asserted maximal.
pub fn prime_decomposition(order: &OrderRef, p: u64) -> Result<Vec<PrimeIdeal>> {
    if order.basis.is_some() {
        return Err(Error::InvalidParameter(
            "prime decomposition is implemented for equation orders".into(),
        ));
    }
    if !crate::primes::is_prime_u64(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    if !order.is_maximal {
        let disc = defining_discriminant(order)?;
        let p2 = BigInt::from(p) * BigInt::from(p);
        if (disc % p2).is_zero() {
            return Err(Error::IndexDivisor);
        }
    }
    let n = order.degree;
    let f = integral_f(order)?;
    let zp = integer_residue(BigInt::from(p))?;
    let fp: Vec<Elem> = f.iter().map(|c| ring::coerce_int(&zp, c)).collect::<Result<_>>()?;
    let factors = crate::dense::factor_mod_p(&zp, &trim(fp), p)?;
    let half = BigInt::from(p) / 2;
    let mut out = Vec::with_capacity(factors.len());
    for (g, e) in factors {
        let deg = g.len() - 1;
        let alpha = if deg == n {
            // inert prime: g = f, g(theta) = 0; use p itself
            OrderElem::from_int(order, BigInt::from(p))
        } else {
            // symmetric lift of the factor's coefficients as coordinates
            let mut coords = vec![BigInt::zero(); n];
            for (i, c) in g.iter().enumerate() {
                let mut v = match &c.repr {
                    Repr::Int(x) => x.clone(),
                    _ => unreachable!(),
                };
                if v > half {
                    v -= BigInt::from(p);
                }
                coords[i] = v;
            }
            OrderElem::new(order, coords)
        };
        let norm = BigInt::from(p).pow(deg as u32);
        // the naive pair (p, g(theta)) is usually {p}-normal with the right
        // norm, but g(theta) can land in P^2 or in another prime above p;
        // verify and renormalize through the HNF machinery if it does
        let presentation_ok = !alpha.is_zero()
            && is_normal(order, &BigInt::from(p), &alpha)?
            && BigInt::from(p).pow(n as u32).gcd(&element_norm(&alpha)?.abs()) == norm;
        let ideal = if presentation_ok {
            TwoGenIdeal {
                order: order.clone(),
                a: BigInt::from(p),
                alpha,
                s: vec![p],
                norm,
            }
        } else {
            ideal_from_two(order, BigInt::from(p), alpha)?
        };
        // valuation element g2 / alpha from the inverse construction
        let alpha_f = ideal.alpha.to_field()?;
        let d = order_denominator(order, &alpha_f)?;
        let mut g2 = d.clone();
        let pb = BigInt::from(p);
        while (&g2 % &pb).is_zero() {
            g2 /= &pb;
        }
        let val_elem =
            alpha_f.try_inverse()?.mul(&ring::coerce_int(&order.field, &g2)?)?;
        out.push(PrimeIdeal { ideal, p, residue_degree: deg, ramification: e, val_elem });
    }
    Ok(out)
}

/// v_P(beta) = max { k : gamma^k * beta integral } for beta in the order.
pub fn valuation(beta: &OrderElem, prime: &PrimeIdeal) -> Result<u64> {
    if beta.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let order = &beta.order;
    let mut x = beta.to_field()?;
    let mut k = 0u64;
    loop {
        let y = x.mul(&prime.val_elem)?;
        if field_to_integral_coords(order, &y)?.is_none() {
            return Ok(k);
        }
        x = y;
        k += 1;
    }
}

/// v_P of an integral ideal: the minimum over the two generators.
pub fn ideal_valuation(ideal: &TwoGenIdeal, prime: &PrimeIdeal) -> Result<u64> {
    let va = valuation(&OrderElem::from_int(&ideal.order, ideal.a.clone()), prime)?;
    if ideal.alpha.is_zero() {
        return Ok(va);
    }
    Ok(va.min(valuation(&ideal.alpha, prime)?))
}

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

pub fn format_ideal(ideal: &TwoGenIdeal) -> Result<String> {
    let alpha = crate::text::format_elem(&ideal.alpha.to_field()?);
    Ok(format!("<{}, {}>", ideal.a, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::number_field;
    use crate::ring::{coerce_i64, polynomial_ring};

    fn field(coeffs: &[i64], var: &str) -> Ring {
        let qx = polynomial_ring(rationals(), var);
        let q = rationals();
        let v: Vec<Elem> = coeffs.iter().map(|&c| coerce_i64(&q, c).unwrap()).collect();
        number_field(&crate::dense::DensePoly::from_coeffs(&qx, v).to_elem(), var).unwrap()
    }

    fn gaussian() -> OrderRef {
        equation_order(&field(&[1, 0, 1], "i"), true).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn order_denominator_examples() {
        let o = gaussian();
        let one = OrderElem::one(&o).to_field().unwrap();
        assert_eq!(order_denominator(&o, &one).unwrap(), big(1));
        // 1 + i: 2/(1+i) = 1 - i integral
        let a = OrderElem::from_i64(&o, &[1, 1]).to_field().unwrap();
        assert_eq!(order_denominator(&o, &a).unwrap(), big(2));
        // integer m: d = m
        let m = OrderElem::from_i64(&o, &[7, 0]).to_field().unwrap();
        assert_eq!(order_denominator(&o, &m).unwrap(), big(7));
    }

    #[test]
    fn normality_criterion() {
        let o = gaussian();
        // <2, 1+i>: d = 2, gcd(2, 2/2) = 1
        let alpha = OrderElem::from_i64(&o, &[1, 1]);
        assert!(is_normal(&o, &big(2), &alpha).unwrap());
        // a = 4, alpha = 2(1+i): d = 4, gcd(4, 4/4) = 1 -> normal
        let alpha2 = OrderElem::from_i64(&o, &[2, 2]);
        assert!(is_normal(&o, &big(4), &alpha2).unwrap());
        // a = 4, alpha = 8: d = 8, gcd(4, 8/4) = 2 -> not normal
        let alpha3 = OrderElem::from_i64(&o, &[8, 0]);
        assert!(!is_normal(&o, &big(4), &alpha3).unwrap());
    }

    #[test]
    fn hnf_of_two_one_plus_i() {
        let o = gaussian();
        let a = ideal_from_two(&o, big(2), OrderElem::from_i64(&o, &[1, 1])).unwrap();
        let h = hnf_basis(&a).unwrap();
        assert_eq!(h, alloc::vec![
            alloc::vec![big(2), big(0)],
            alloc::vec![big(1), big(1)],
        ]);
        assert_eq!(a.norm, big(2));
        assert_eq!(ideal_norm(&a).unwrap(), big(2));
        // idempotence: rebuilding from the HNF gives the same HNF
        let b = make_normal(&o, h.clone()).unwrap();
        assert_eq!(hnf_basis(&b).unwrap(), h);
    }

    #[test]
    fn principal_integer_ideal() {
        let o = gaussian();
        let m = principal_ideal(&o, &OrderElem::from_i64(&o, &[6, 0])).unwrap();
        assert_eq!(m.a, big(6));
        assert_eq!(m.norm, big(36));
        assert_eq!(m.s, alloc::vec![2, 3]);
        let h = hnf_basis(&m).unwrap();
        assert_eq!(hnf_det(&h), big(36));
        // unit ideal
        let u = unit_ideal(&o);
        assert_eq!(hnf_basis(&u).unwrap(), alloc::vec![
            alloc::vec![big(1), big(0)],
            alloc::vec![big(0), big(1)],
        ]);
    }

    #[test]
    fn ideal_square_is_two() {
        let o = gaussian();
        let p = ideal_from_two(&o, big(2), OrderElem::from_i64(&o, &[1, 1])).unwrap();
        let sq = ideal_mul(&p, &p).unwrap();
        let two = principal_ideal(&o, &OrderElem::from_i64(&o, &[2, 0])).unwrap();
        assert!(ideals_equal(&sq, &two).unwrap());
        assert_eq!(sq.norm, big(4));
        assert!(is_normal(&o, &sq.a, &sq.alpha).unwrap());
        // fourth power
        let p4 = ideal_pow(&p, 4).unwrap();
        let four = principal_ideal(&o, &OrderElem::from_i64(&o, &[4, 0])).unwrap();
        assert!(ideals_equal(&p4, &four).unwrap());
        assert_eq!(p4.norm, big(16));
    }

    #[test]
    fn unit_ideal_is_identity() {
        let o = gaussian();
        let p = ideal_from_two(&o, big(2), OrderElem::from_i64(&o, &[1, 1])).unwrap();
        let u = unit_ideal(&o);
        assert!(ideals_equal(&ideal_mul(&p, &u).unwrap(), &p).unwrap());
        assert!(ideals_equal(&ideal_pow(&p, 1).unwrap(), &p).unwrap());
        assert!(ideals_equal(&ideal_pow(&p, 0).unwrap(), &u).unwrap());
    }

    #[test]
    fn extend_s_preserves_ideal() {
        let o = gaussian();
        let p = ideal_from_two(&o, big(2), OrderElem::from_i64(&o, &[1, 1])).unwrap();
        let h0 = hnf_basis(&p).unwrap();
        let q = extend_s(&p, &[5]).unwrap();
        assert_eq!(hnf_basis(&q).unwrap(), h0);
        assert_eq!(q.s, alloc::vec![2, 5]);
        assert!(is_normal(&o, &q.a, &q.alpha).unwrap());
        // T subset of S: unchanged
        let r = extend_s(&p, &[2]).unwrap();
        assert_eq!(hnf_basis(&r).unwrap(), h0);
        assert_eq!(r.s, alloc::vec![2]);
    }

    #[test]
    fn inverse_in_gaussian_integers() {
        let o = gaussian();
        let p = ideal_from_two(&o, big(2), OrderElem::from_i64(&o, &[1, 1])).unwrap();
        let inv = ideal_inverse(&p).unwrap();
        // A * A^{-1} = den * O
        let prod = ideal_mul(&p, &inv.num).unwrap();
        let den_ideal =
            principal_ideal(&o, &OrderElem::from_int(&o, inv.den.clone())).unwrap();
        assert!(ideals_equal(&prod, &den_ideal).unwrap());
        // inverse of <m> is (1/m) * O
        let m = principal_ideal(&o, &OrderElem::from_i64(&o, &[3, 0])).unwrap();
        let minv = ideal_inverse(&m).unwrap();
        assert_eq!(minv.den, big(3));
        assert!(ideals_equal(&minv.num, &unit_ideal(&o)).unwrap());
        // inverse of O is O
        let uinv = ideal_inverse(&unit_ideal(&o)).unwrap();
        assert_eq!(uinv.den, big(1));
        assert!(ideals_equal(&uinv.num, &unit_ideal(&o)).unwrap());
    }

    #[test]
    fn gaussian_prime_decomposition() {
        let o = gaussian();
        // p = 5 splits
        let d5 = prime_decomposition(&o, 5).unwrap();
        assert_eq!(d5.len(), 2);
        for pr in &d5 {
            assert_eq!(pr.residue_degree, 1);
            assert_eq!(pr.ramification, 1);
            assert_eq!(pr.ideal.norm, big(5));
            assert_eq!(hnf_det(&hnf_basis(&pr.ideal).unwrap()), big(5));
        }
        let prod = ideal_mul(&d5[0].ideal, &d5[1].ideal).unwrap();
        let five = principal_ideal(&o, &OrderElem::from_i64(&o, &[5, 0])).unwrap();
        assert!(ideals_equal(&prod, &five).unwrap());
        // p = 3 inert
        let d3 = prime_decomposition(&o, 3).unwrap();
        assert_eq!(d3.len(), 1);
        assert_eq!(d3[0].residue_degree, 2);
        assert_eq!(d3[0].ideal.norm, big(9));
        // p = 2 ramified
        let d2 = prime_decomposition(&o, 2).unwrap();
        assert_eq!(d2.len(), 1);
        assert_eq!(d2[0].ramification, 2);
        assert_eq!(d2[0].ideal.norm, big(2));
    }

    #[test]
    fn gaussian_valuations() {
        let o = gaussian();
        let d2 = prime_decomposition(&o, 2).unwrap();
        let p2 = &d2[0];
        // 2 = -i (1+i)^2: v_P(2) = 2
        assert_eq!(valuation(&OrderElem::from_i64(&o, &[2, 0]), p2).unwrap(), 2);
        assert_eq!(valuation(&OrderElem::one(&o), p2).unwrap(), 0);
        assert_eq!(valuation(&OrderElem::from_i64(&o, &[1, 1]), p2).unwrap(), 1);
        // ideal valuation additivity under multiplication
        let pi = ideal_from_two(&o, big(2), OrderElem::from_i64(&o, &[1, 1])).unwrap();
        assert_eq!(ideal_valuation(&pi, p2).unwrap(), 1);
        let sq = ideal_mul(&pi, &pi).unwrap();
        assert_eq!(ideal_valuation(&sq, p2).unwrap(), 2);
        let d5 = prime_decomposition(&o, 5).unwrap();
        assert_eq!(ideal_valuation(&pi, &d5[0]).unwrap(), 0);
    }

    #[test]
    fn modular_norm_matches_resultant_oracle() {
        let k = field(&[2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1], "x");
        let o = equation_order(&k, true).unwrap();
        let mut rng = SplitMix64::new(61);
        for _ in 0..10 {
            let coords: Vec<i64> = (0..16).map(|_| rng.range_i64(-20, 20)).collect();
            let x = OrderElem::from_i64(&o, &coords);
            if x.is_zero() {
                continue;
            }
            let fast = element_norm(&x).unwrap();
            let slow = rat_of(&nf_norm(&x.to_field().unwrap()).unwrap());
            assert!(slow.is_integer());
            assert_eq!(fast, slow.to_integer());
        }
    }

    #[test]
    fn norm_multiplicativity_in_degree_sixteen() {
        // a slice of the benchmark field Q[x]/(x^16 + 2)
        let k = field(&[2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1], "x");
        let o = equation_order(&k, true).unwrap();
        let mut ideals = Vec::new();
        for p in [3u64, 5, 11, 17, 19] {
            match prime_decomposition(&o, p) {
                Ok(d) => {
                    for pr in d {
                        if pr.ideal.norm <= big(400) {
                            ideals.push(pr.ideal);
                        }
                    }
                }
                Err(Error::IndexDivisor) => continue,
                Err(e) => panic!("unexpected error {e:?}"),
            }
        }
        assert!(ideals.len() >= 4, "need a few split primes to test with");
        let mut rng = SplitMix64::new(62);
        for _ in 0..10 {
            let a = &ideals[rng.below(ideals.len() as u64) as usize];
            let b = &ideals[rng.below(ideals.len() as u64) as usize];
            let ab = ideal_mul(a, b).unwrap();
            assert_eq!(ab.norm, &a.norm * &b.norm);
            assert_eq!(ideal_norm(&ab).unwrap(), ab.norm);
            assert_eq!(hnf_det(&hnf_basis(&ab).unwrap()), ab.norm);
            assert!(is_normal(&o, &ab.a, &ab.alpha).unwrap());
        }
        // commutativity at the HNF level
        let x = ideal_mul(&ideals[0], &ideals[1]).unwrap();
        let y = ideal_mul(&ideals[1], &ideals[0]).unwrap();
        assert!(ideals_equal(&x, &y).unwrap());
    }

    #[test]
    fn index_divisor_guard() {
        // x^2 - 5: disc = 20, p = 2 divides the index of Z[sqrt(5)]
        let k = field(&[-5, 0, 1], "x");
        let o = equation_order(&k, false).unwrap();
        assert!(matches!(prime_decomposition(&o, 2), Err(Error::IndexDivisor)));
        // odd primes not dividing disc are fine
        assert!(prime_decomposition(&o, 3).is_ok());
    }

    #[test]
    fn custom_basis_order() {
        // Z[(1+sqrt(5))/2] inside Q(sqrt(5))
        let k = field(&[-5, 0, 1], "x");
        let half = BigRational::new(BigInt::one(), big(2));
        let rows = alloc::vec![
            alloc::vec![BigRational::one(), BigRational::zero()],
            alloc::vec![half.clone(), half],
        ];
        let o = order_with_basis(&k, rows, true).unwrap();
        let w = OrderElem::from_i64(&o, &[0, 1]); // (1+sqrt5)/2
        // w^2 = w + 1
        let w2 = w.mul(&w).unwrap();
        assert_eq!(w2, OrderElem::from_i64(&o, &[1, 1]));
        assert_eq!(element_norm(&w).unwrap(), big(-1));
    }

    #[test]
    fn text_form() {
        let o = gaussian();
        let p = ideal_from_two(&o, big(2), OrderElem::from_i64(&o, &[1, 1])).unwrap();
        let s = format_ideal(&p).unwrap();
        assert!(s.starts_with("<2, "), "got {s}");
    }
}
