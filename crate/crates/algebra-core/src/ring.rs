//! Parent/element domain model.
//!
//! A [`RingHandle`] is the runtime descriptor of a domain: it carries the
//! modulus of Z/nZ, the variable names of a polynomial ring, the defining
//! polynomial of a number field, and so on. Elements hold a shared reference
//! to exactly one handle, and binary operations reject mixed handles.
//!
//! Handles compare structurally: two handles with identical kind and
//! structurally equal parameters are the same ring, whether or not they are
//! the same allocation.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dense;
use crate::error::{Error, Result};
use crate::numfield::NfData;
use crate::sparse::{self, SparseTerms};

pub type Ring = Arc<RingHandle>;

#[derive(Debug)]
pub struct RingHandle {
    pub kind: RingKind,
}

#[derive(Debug)]
pub enum RingKind {
    Integers,
    Rationals,
    IntegerResidue { modulus: BigInt },
    /// Dense univariate polynomials over `base`.
    PolynomialRing { base: Ring, var: String },
    /// Sparse distributed multivariate polynomials over `base`.
    MultiPolyRing { base: Ring, vars: Vec<String> },
    /// Quotient of a univariate polynomial ring by a monic modulus.
    ResidueRing { base: Ring, modulus: Elem },
    FractionField { base: Ring },
    /// GF(p^k) realized as (Z/pZ)[x]/(g) with g a deterministically chosen
    /// irreducible of degree k.
    FiniteField { p: BigInt, k: usize, var: String, modulus: Elem },
    NumberField(NfData),
    MatrixSpace { base: Ring, rows: usize, cols: usize },
}

impl PartialEq for RingHandle {
    fn eq(&self, other: &Self) -> bool {
        use RingKind::*;
        match (&self.kind, &other.kind) {
            (Integers, Integers) => true,
            (Rationals, Rationals) => true,
            (IntegerResidue { modulus: a }, IntegerResidue { modulus: b }) => a == b,
            (PolynomialRing { base: a, var: va }, PolynomialRing { base: b, var: vb }) => {
                va == vb && a == b
            }
            (MultiPolyRing { base: a, vars: va }, MultiPolyRing { base: b, vars: vb }) => {
                va == vb && a == b
            }
            (ResidueRing { base: a, modulus: ma }, ResidueRing { base: b, modulus: mb }) => {
                a == b && ma.repr == mb.repr
            }
            (FractionField { base: a }, FractionField { base: b }) => a == b,
            (
                FiniteField { p: pa, k: ka, var: va, .. },
                FiniteField { p: pb, k: kb, var: vb, .. },
            ) => pa == pb && ka == kb && va == vb,
            (NumberField(a), NumberField(b)) => a == b,
            (
                MatrixSpace { base: a, rows: ra, cols: ca },
                MatrixSpace { base: b, rows: rb, cols: cb },
            ) => ra == rb && ca == cb && a == b,
            _ => false,
        }
    }
}

impl Eq for RingHandle {}

pub fn rings_equal(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Debug, Clone)]
pub struct Elem {
    pub ring: Ring,
    pub repr: Repr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Repr {
    Int(BigInt),
    Rat(BigRational),
    /// Dense coefficient vector, index = exponent, top coefficient nonzero.
    Dense(Vec<Elem>),
    Sparse(SparseTerms),
    Frac(Box<Elem>, Box<Elem>),
}

impl PartialEq for Elem {
    fn eq(&self, other: &Self) -> bool {
        rings_equal(&self.ring, &other.ring) && self.repr == other.repr
    }
}

impl Eq for Elem {}

impl core::fmt::Display for Elem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&crate::text::format_elem(self))
    }
}

// ---------------------------------------------------------------------------
// Ring constructors
// ---------------------------------------------------------------------------

pub fn integers() -> Ring {
    Arc::new(RingHandle { kind: RingKind::Integers })
}

pub fn rationals() -> Ring {
    Arc::new(RingHandle { kind: RingKind::Rationals })
}

pub fn integer_residue(n: BigInt) -> Result<Ring> {
    if n < BigInt::from(2) {
        return Err(Error::InvalidParameter("residue modulus must be >= 2".into()));
    }
    Ok(Arc::new(RingHandle { kind: RingKind::IntegerResidue { modulus: n } }))
}

pub fn polynomial_ring(base: Ring, var: &str) -> Ring {
    Arc::new(RingHandle { kind: RingKind::PolynomialRing { base, var: var.to_string() } })
}

pub fn multi_poly_ring(base: Ring, vars: &[&str]) -> Ring {
    let vars = vars.iter().map(|v| v.to_string()).collect();
    Arc::new(RingHandle { kind: RingKind::MultiPolyRing { base, vars } })
}

/// Quotient of the univariate polynomial ring `base` by `modulus`. The
/// modulus is made monic, which requires its leading coefficient to be a
/// unit.
pub fn residue_ring(base: Ring, modulus: Elem) -> Result<Ring> {
    let coeffs = match (&base.kind, &modulus.repr) {
        (RingKind::PolynomialRing { .. }, Repr::Dense(c)) => c.clone(),
        _ => {
            return Err(Error::InvalidParameter(
                "residue ring requires a univariate polynomial modulus".into(),
            ))
        }
    };
    if !rings_equal(&modulus.ring, &base) {
        return Err(Error::MixedParents);
    }
    if coeffs.is_empty() {
        return Err(Error::InvalidParameter("zero defining polynomial".into()));
    }
    let cbase = base_ring(&base).unwrap().clone();
    let lc_inv = coeffs.last().unwrap().try_inverse()?;
    let monic = dense::dp_mul_scalar(&cbase, &coeffs, &lc_inv)?;
    let modulus = Elem { ring: base.clone(), repr: Repr::Dense(monic) };
    Ok(Arc::new(RingHandle { kind: RingKind::ResidueRing { base, modulus } }))
}

pub fn fraction_field(base: Ring) -> Ring {
    Arc::new(RingHandle { kind: RingKind::FractionField { base } })
}

/// GF(p^k). The defining irreducible is found by a deterministic seeded
/// search, so two calls with the same (p, k, var) build equal handles.
pub fn finite_field(p: u64, k: usize, var: &str) -> Result<Ring> {
    if !crate::primes::is_prime_u64(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("extension degree must be >= 1".into()));
    }
    let fp = integer_residue(BigInt::from(p))?;
    let polyring = polynomial_ring(fp, var);
    let modulus = dense::find_irreducible(&polyring, p, k)?;
    Ok(Arc::new(RingHandle {
        kind: RingKind::FiniteField { p: BigInt::from(p), k, var: var.to_string(), modulus },
    }))
}

pub fn matrix_space(base: Ring, rows: usize, cols: usize) -> Ring {
    Arc::new(RingHandle { kind: RingKind::MatrixSpace { base, rows, cols } })
}

/// The coefficient/base ring of a structured handle, when one exists.
pub fn base_ring(r: &Ring) -> Option<&Ring> {
    match &r.kind {
        RingKind::PolynomialRing { base, .. }
        | RingKind::MultiPolyRing { base, .. }
        | RingKind::FractionField { base }
        | RingKind::MatrixSpace { base, .. } => Some(base),
        RingKind::ResidueRing { base, .. } => match &base.kind {
            RingKind::PolynomialRing { base: b, .. } => Some(b),
            _ => None,
        },
        RingKind::FiniteField { modulus, .. } => base_ring(&modulus.ring),
        _ => None,
    }
}

/// For quotient-style rings, the polynomial ring the representatives live in.
pub fn rep_poly_ring(r: &Ring) -> Option<&Ring> {
    match &r.kind {
        RingKind::ResidueRing { base, .. } => Some(base),
        RingKind::FiniteField { modulus, .. } => Some(&modulus.ring),
        _ => None,
    }
}

pub fn residue_modulus(r: &Ring) -> Option<&Elem> {
    match &r.kind {
        RingKind::ResidueRing { modulus, .. } | RingKind::FiniteField { modulus, .. } => {
            Some(modulus)
        }
        _ => None,
    }
}

pub fn is_field(r: &Ring) -> bool {
    match &r.kind {
        RingKind::Rationals | RingKind::FiniteField { .. } | RingKind::NumberField(_) => true,
        RingKind::FractionField { .. } => true,
        // Word-size moduli are cheap to test for primality.
        RingKind::IntegerResidue { modulus } => match modulus.to_u64() {
            Some(n) => crate::primes::is_prime_u64(n),
            None => false,
        },
        _ => false,
    }
}

/// Conservative integral-domain test: `false` may mean "unknown", never the
/// other way round. Residue rings by a possibly reducible modulus report
/// `false`.
pub fn is_domain(r: &Ring) -> bool {
    match &r.kind {
        RingKind::Integers => true,
        RingKind::PolynomialRing { base, .. } | RingKind::MultiPolyRing { base, .. } => {
            is_domain(base)
        }
        RingKind::ResidueRing { .. } => false,
        _ => is_field(r),
    }
}

// ---------------------------------------------------------------------------
// Element constructors and coercion
// ---------------------------------------------------------------------------

pub fn zero(r: &Ring) -> Elem {
    let repr = match &r.kind {
        RingKind::Integers | RingKind::IntegerResidue { .. } => Repr::Int(BigInt::zero()),
        RingKind::Rationals => Repr::Rat(BigRational::zero()),
        RingKind::PolynomialRing { .. }
        | RingKind::ResidueRing { .. }
        | RingKind::FiniteField { .. }
        | RingKind::NumberField(_) => Repr::Dense(Vec::new()),
        RingKind::MultiPolyRing { vars, .. } => Repr::Sparse(SparseTerms::zero(vars.len())),
        RingKind::FractionField { base } => {
            Repr::Frac(Box::new(zero(base)), Box::new(one(base)))
        }
        RingKind::MatrixSpace { .. } => panic!("matrix spaces have no scalar elements"),
    };
    Elem { ring: r.clone(), repr }
}

pub fn one(r: &Ring) -> Elem {
    coerce_i64(r, 1).expect("every ring contains 1")
}

pub fn coerce_i64(r: &Ring, v: i64) -> Result<Elem> {
    coerce_int(r, &BigInt::from(v))
}

/// Canonical image of an integer in `r`.
pub fn coerce_int(r: &Ring, v: &BigInt) -> Result<Elem> {
    let repr = match &r.kind {
        RingKind::Integers => Repr::Int(v.clone()),
        RingKind::Rationals => Repr::Rat(BigRational::from(v.clone())),
        RingKind::IntegerResidue { modulus } => Repr::Int(v.mod_floor(modulus)),
        RingKind::PolynomialRing { base, .. } | RingKind::MultiPolyRing { base, .. } => {
            let c = coerce_int(base, v)?;
            return Ok(constant_poly(r, c));
        }
        RingKind::ResidueRing { .. } | RingKind::FiniteField { .. } => {
            let pring = rep_poly_ring(r).unwrap();
            let cring = base_ring_of_poly(pring)?;
            let c = coerce_int(cring, v)?;
            let coeffs = if c.is_zero() { Vec::new() } else { alloc::vec![c] };
            Repr::Dense(coeffs)
        }
        RingKind::NumberField(_) => {
            let q = rationals();
            let c = coerce_int(&q, v)?;
            let coeffs = if c.is_zero() { Vec::new() } else { alloc::vec![c] };
            Repr::Dense(coeffs)
        }
        RingKind::FractionField { base } => {
            Repr::Frac(Box::new(coerce_int(base, v)?), Box::new(one(base)))
        }
        RingKind::MatrixSpace { .. } => return Err(Error::NoCoercion),
    };
    Ok(Elem { ring: r.clone(), repr })
}

fn base_ring_of_poly(r: &Ring) -> Result<&Ring> {
    match &r.kind {
        RingKind::PolynomialRing { base, .. } | RingKind::MultiPolyRing { base, .. } => Ok(base),
        _ => Err(Error::NoCoercion),
    }
}

/// Wrap a base-ring element as a constant of the polynomial ring `r`.
pub fn constant_poly(r: &Ring, c: Elem) -> Elem {
    match &r.kind {
        RingKind::PolynomialRing { .. } => {
            let coeffs = if c.is_zero() { Vec::new() } else { alloc::vec![c] };
            Elem { ring: r.clone(), repr: Repr::Dense(coeffs) }
        }
        RingKind::MultiPolyRing { vars, .. } => {
            let t = SparseTerms::constant(vars.len(), c);
            Elem { ring: r.clone(), repr: Repr::Sparse(t) }
        }
        _ => panic!("constant_poly requires a polynomial ring"),
    }
}

/// The generator x_i of a polynomial ring (i = 0 for univariate).
pub fn gen(r: &Ring, i: usize) -> Result<Elem> {
    match &r.kind {
        RingKind::PolynomialRing { base, .. } => {
            if i != 0 {
                return Err(Error::InvalidParameter("univariate ring has one generator".into()));
            }
            Ok(Elem {
                ring: r.clone(),
                repr: Repr::Dense(alloc::vec![zero(base), one(base)]),
            })
        }
        RingKind::MultiPolyRing { base, vars } => {
            if i >= vars.len() {
                return Err(Error::InvalidParameter("generator index out of range".into()));
            }
            Ok(Elem {
                ring: r.clone(),
                repr: Repr::Sparse(SparseTerms::gen(vars.len(), i, one(base))),
            })
        }
        RingKind::ResidueRing { .. } | RingKind::FiniteField { .. } => {
            let pring = rep_poly_ring(r).unwrap().clone();
            let x = gen(&pring, i)?;
            let coeffs = match x.repr {
                Repr::Dense(c) => c,
                _ => unreachable!(),
            };
            // degree >= 2 moduli leave x reduced already; degree-1 moduli need
            // a reduction step.
            reduce_in_quotient(r, coeffs)
        }
        RingKind::NumberField(nf) => {
            if nf.degree == 1 {
                let q = rationals();
                let fr = &nf.f;
                // x = -c0 in a degree-1 field x + c0.
                let c = zero(&q).sub(&fr[0])?;
                let coeffs = if c.is_zero() { Vec::new() } else { alloc::vec![c] };
                return Ok(Elem { ring: r.clone(), repr: Repr::Dense(coeffs) });
            }
            let q = rationals();
            Ok(Elem { ring: r.clone(), repr: Repr::Dense(alloc::vec![zero(&q), one(&q)]) })
        }
        _ => Err(Error::InvalidParameter("ring has no generator".into())),
    }
}

/// Build the canonical element of a quotient ring from representative
/// coefficients, reducing modulo the defining polynomial.
pub fn reduce_in_quotient(r: &Ring, coeffs: Vec<Elem>) -> Result<Elem> {
    let pring = rep_poly_ring(r).ok_or(Error::NoCoercion)?;
    let cbase = base_ring_of_poly(pring)?.clone();
    let modulus = match &residue_modulus(r).unwrap().repr {
        Repr::Dense(m) => m.clone(),
        _ => unreachable!(),
    };
    let red = dense::dp_rem_monic(&cbase, &coeffs, &modulus)?;
    Ok(Elem { ring: r.clone(), repr: Repr::Dense(red) })
}

/// Canonical coercion: from the ring itself, from the integers, from the
/// rationals into Q-algebras, or from the base ring of a structured handle.
pub fn coerce(r: &Ring, x: &Elem) -> Result<Elem> {
    if rings_equal(r, &x.ring) {
        return Ok(x.clone());
    }
    match &x.ring.kind {
        RingKind::Integers => {
            if let Repr::Int(v) = &x.repr {
                return coerce_int(r, v);
            }
            unreachable!()
        }
        RingKind::Rationals => {
            if let Repr::Rat(v) = &x.repr {
                match &r.kind {
                    RingKind::Rationals => return Ok(x.clone()),
                    RingKind::NumberField(_) => {
                        let coeffs =
                            if v.is_zero() { Vec::new() } else { alloc::vec![x.clone()] };
                        return Ok(Elem { ring: r.clone(), repr: Repr::Dense(coeffs) });
                    }
                    _ => {}
                }
            }
        }
        _ => {}
    }
    // Element of the base ring of r?
    match &r.kind {
        RingKind::PolynomialRing { base, .. } | RingKind::MultiPolyRing { base, .. } => {
            let c = coerce(base, x)?;
            return Ok(constant_poly(r, c));
        }
        RingKind::FractionField { base } => {
            let c = coerce(base, x)?;
            return Ok(Elem {
                ring: r.clone(),
                repr: Repr::Frac(Box::new(c), Box::new(one(base))),
            });
        }
        RingKind::ResidueRing { base, .. } => {
            if rings_equal(base, &x.ring) {
                if let Repr::Dense(c) = &x.repr {
                    return reduce_in_quotient(r, c.clone());
                }
            }
            let c = coerce(base_ring(r).ok_or(Error::NoCoercion)?, x)?;
            let coeffs = if c.is_zero() { Vec::new() } else { alloc::vec![c] };
            return Ok(Elem { ring: r.clone(), repr: Repr::Dense(coeffs) });
        }
        RingKind::FiniteField { .. } => {
            let pring = rep_poly_ring(r).unwrap();
            if rings_equal(pring, &x.ring) {
                if let Repr::Dense(c) = &x.repr {
                    return reduce_in_quotient(r, c.clone());
                }
            }
            let c = coerce(base_ring(r).ok_or(Error::NoCoercion)?, x)?;
            let coeffs = if c.is_zero() { Vec::new() } else { alloc::vec![c] };
            return Ok(Elem { ring: r.clone(), repr: Repr::Dense(coeffs) });
        }
        _ => {}
    }
    Err(Error::NoCoercion)
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

fn check_same(a: &Elem, b: &Elem) -> Result<()> {
    if rings_equal(&a.ring, &b.ring) {
        Ok(())
    } else {
        Err(Error::MixedParents)
    }
}

impl Elem {
    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Int(v) => v.is_zero(),
            Repr::Rat(v) => v.is_zero(),
            Repr::Dense(c) => c.is_empty(),
            Repr::Sparse(t) => t.is_zero(),
            Repr::Frac(n, _) => n.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Int(v) => v.is_one(),
            Repr::Rat(v) => v.is_one(),
            Repr::Dense(c) => c.len() == 1 && c[0].is_one(),
            Repr::Sparse(t) => t.is_constant_one(),
            Repr::Frac(n, d) => n.is_one() && d.is_one(),
        }
    }

    pub fn add(&self, other: &Elem) -> Result<Elem> {
        check_same(self, other)?;
        let repr = match (&self.ring.kind, &self.repr, &other.repr) {
            (RingKind::Integers, Repr::Int(a), Repr::Int(b)) => Repr::Int(a + b),
            (RingKind::IntegerResidue { modulus }, Repr::Int(a), Repr::Int(b)) => {
                let mut s = a + b;
                if s >= *modulus {
                    s -= modulus;
                }
                Repr::Int(s)
            }
            (RingKind::Rationals, Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(a + b),
            (RingKind::PolynomialRing { base, .. }, Repr::Dense(a), Repr::Dense(b)) => {
                Repr::Dense(dense::dp_add(base, a, b)?)
            }
            (
                RingKind::ResidueRing { .. } | RingKind::FiniteField { .. },
                Repr::Dense(a),
                Repr::Dense(b),
            ) => {
                let cbase = base_ring(&self.ring).unwrap();
                Repr::Dense(dense::dp_add(cbase, a, b)?)
            }
            (RingKind::NumberField(_), Repr::Dense(a), Repr::Dense(b)) => {
                let q = rationals();
                Repr::Dense(dense::dp_add(&q, a, b)?)
            }
            (RingKind::MultiPolyRing { base, .. }, Repr::Sparse(a), Repr::Sparse(b)) => {
                Repr::Sparse(sparse::add(base, a, b)?)
            }
            (RingKind::FractionField { base }, Repr::Frac(an, ad), Repr::Frac(bn, bd)) => {
                let num = an.mul(bd)?.add(&bn.mul(ad)?)?;
                let den = ad.mul(bd)?;
                return make_fraction(&self.ring, base, num, den);
            }
            _ => return Err(Error::InvalidParameter("unsupported ring for add".into())),
        };
        Ok(Elem { ring: self.ring.clone(), repr })
    }

    pub fn sub(&self, other: &Elem) -> Result<Elem> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Elem {
        let repr = match (&self.ring.kind, &self.repr) {
            (RingKind::Integers, Repr::Int(a)) => Repr::Int(-a),
            (RingKind::IntegerResidue { modulus }, Repr::Int(a)) => {
                if a.is_zero() {
                    Repr::Int(BigInt::zero())
                } else {
                    Repr::Int(modulus - a)
                }
            }
            (_, Repr::Rat(a)) => Repr::Rat(-a),
            (_, Repr::Dense(c)) => Repr::Dense(c.iter().map(|x| x.neg()).collect()),
            (_, Repr::Sparse(t)) => Repr::Sparse(t.map_coeffs(|x| x.neg())),
            (_, Repr::Frac(n, d)) => Repr::Frac(Box::new(n.neg()), d.clone()),
            _ => unreachable!(),
        };
        Elem { ring: self.ring.clone(), repr }
    }

    pub fn mul(&self, other: &Elem) -> Result<Elem> {
        check_same(self, other)?;
        let repr = match (&self.ring.kind, &self.repr, &other.repr) {
            (RingKind::Integers, Repr::Int(a), Repr::Int(b)) => Repr::Int(a * b),
            (RingKind::IntegerResidue { modulus }, Repr::Int(a), Repr::Int(b)) => {
                Repr::Int((a * b).mod_floor(modulus))
            }
            (RingKind::Rationals, Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(a * b),
            (RingKind::PolynomialRing { base, .. }, Repr::Dense(a), Repr::Dense(b)) => {
                Repr::Dense(dense::dp_mul(base, a, b)?)
            }
            (
                RingKind::ResidueRing { .. } | RingKind::FiniteField { .. },
                Repr::Dense(a),
                Repr::Dense(b),
            ) => {
                let cbase = base_ring(&self.ring).unwrap().clone();
                let raw = dense::dp_mul(&cbase, a, b)?;
                let modulus = match &residue_modulus(&self.ring).unwrap().repr {
                    Repr::Dense(m) => m.clone(),
                    _ => unreachable!(),
                };
                Repr::Dense(dense::dp_rem_monic(&cbase, &raw, &modulus)?)
            }
            (RingKind::NumberField(nf), Repr::Dense(a), Repr::Dense(b)) => {
                Repr::Dense(crate::numfield::nf_mul_coeffs(nf, a, b)?)
            }
            (RingKind::MultiPolyRing { base, .. }, Repr::Sparse(a), Repr::Sparse(b)) => {
                Repr::Sparse(sparse::heap_mul(base, a, b)?)
            }
            (RingKind::FractionField { base }, Repr::Frac(an, ad), Repr::Frac(bn, bd)) => {
                let num = an.mul(bn)?;
                let den = ad.mul(bd)?;
                return make_fraction(&self.ring, base, num, den);
            }
            _ => return Err(Error::InvalidParameter("unsupported ring for mul".into())),
        };
        Ok(Elem { ring: self.ring.clone(), repr })
    }

    pub fn pow(&self, k: u64) -> Result<Elem> {
        if k == 0 {
            return Ok(one(&self.ring));
        }
        // Sparse multivariate powering has dedicated kernels.
        if let (RingKind::MultiPolyRing { .. }, Repr::Sparse(_)) = (&self.ring.kind, &self.repr) {
            return sparse::pow_dispatch(self, k);
        }
        let mut acc: Option<Elem> = None;
        let mut sq = self.clone();
        let mut k = k;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq)?,
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            sq = sq.mul(&sq)?;
        }
        Ok(acc.unwrap())
    }

    /// Multiplicative inverse where one exists. For residue rings the error
    /// carries a witness zero divisor (the nontrivial common factor with the
    /// modulus) so callers can fall back to division-free algorithms.
    pub fn try_inverse(&self) -> Result<Elem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match (&self.ring.kind, &self.repr) {
            (RingKind::Integers, Repr::Int(v)) => {
                if v.abs().is_one() {
                    Ok(self.clone())
                } else {
                    Err(Error::ImpossibleInverse(Box::new(self.clone())))
                }
            }
            (RingKind::Rationals, Repr::Rat(v)) => {
                Ok(Elem { ring: self.ring.clone(), repr: Repr::Rat(v.recip()) })
            }
            (RingKind::IntegerResidue { modulus }, Repr::Int(v)) => {
                let ext = v.extended_gcd(modulus);
                if ext.gcd.is_one() {
                    Ok(Elem {
                        ring: self.ring.clone(),
                        repr: Repr::Int(ext.x.mod_floor(modulus)),
                    })
                } else {
                    let z = integers();
                    Err(Error::ImpossibleInverse(Box::new(Elem {
                        ring: z,
                        repr: Repr::Int(ext.gcd),
                    })))
                }
            }
            (RingKind::ResidueRing { .. } | RingKind::FiniteField { .. }, Repr::Dense(c)) => {
                let pring = rep_poly_ring(&self.ring).unwrap().clone();
                let cbase = base_ring(&self.ring).unwrap().clone();
                let modulus = match &residue_modulus(&self.ring).unwrap().repr {
                    Repr::Dense(m) => m.clone(),
                    _ => unreachable!(),
                };
                match dense::dp_xgcd(&cbase, c, &modulus)? {
                    (g, s, _) if g.len() == 1 => {
                        // g is a nonzero constant; scale s by its inverse.
                        let ginv = g[0].try_inverse()?;
                        let inv = dense::dp_mul_scalar(&cbase, &s, &ginv)?;
                        let red = dense::dp_rem_monic(&cbase, &inv, &modulus)?;
                        Ok(Elem { ring: self.ring.clone(), repr: Repr::Dense(red) })
                    }
                    (g, _, _) => Err(Error::ImpossibleInverse(Box::new(Elem {
                        ring: pring,
                        repr: Repr::Dense(g),
                    }))),
                }
            }
            (RingKind::NumberField(nf), Repr::Dense(c)) => {
                let inv = crate::numfield::nf_inverse_coeffs(nf, c)?;
                Ok(Elem { ring: self.ring.clone(), repr: Repr::Dense(inv) })
            }
            (RingKind::FractionField { base }, Repr::Frac(n, d)) => {
                make_fraction(&self.ring, base, (**d).clone(), (**n).clone())
            }
            (RingKind::PolynomialRing { .. }, Repr::Dense(c)) => {
                if c.len() == 1 {
                    let inv = c[0].try_inverse()?;
                    Ok(constant_poly(&self.ring, inv))
                } else {
                    Err(Error::ImpossibleInverse(Box::new(self.clone())))
                }
            }
            (RingKind::MultiPolyRing { .. }, Repr::Sparse(t)) => {
                if t.is_constant() {
                    let inv = t.coeffs[0].try_inverse()?;
                    Ok(constant_poly(&self.ring, inv))
                } else {
                    Err(Error::ImpossibleInverse(Box::new(self.clone())))
                }
            }
            _ => Err(Error::InvalidParameter("unsupported ring for inverse".into())),
        }
    }

    /// Exact division: `self / other` when the quotient exists in the ring.
    pub fn exact_div(&self, other: &Elem) -> Result<Elem> {
        check_same(self, other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(zero(&self.ring));
        }
        match (&self.ring.kind, &self.repr, &other.repr) {
            (RingKind::Integers, Repr::Int(a), Repr::Int(b)) => {
                let (q, r) = a.div_rem(b);
                if r.is_zero() {
                    Ok(Elem { ring: self.ring.clone(), repr: Repr::Int(q) })
                } else {
                    Err(Error::InexactDivision)
                }
            }
            (RingKind::PolynomialRing { base, .. }, Repr::Dense(a), Repr::Dense(b)) => {
                let q = dense::dp_exact_div(base, a, b)?;
                Ok(Elem { ring: self.ring.clone(), repr: Repr::Dense(q) })
            }
            (RingKind::MultiPolyRing { .. }, Repr::Sparse(_), Repr::Sparse(_)) => {
                sparse::heap_exact_div(self, other)
            }
            // Fields: exact division is plain division.
            _ => self.mul(&other.try_inverse()?),
        }
    }

    /// GCD normalized by the ring's canonical unit.
    pub fn gcd(&self, other: &Elem) -> Result<Elem> {
        check_same(self, other)?;
        match &self.ring.kind {
            RingKind::Integers => match (&self.repr, &other.repr) {
                (Repr::Int(a), Repr::Int(b)) => {
                    Ok(Elem { ring: self.ring.clone(), repr: Repr::Int(a.gcd(b)) })
                }
                _ => unreachable!(),
            },
            RingKind::IntegerResidue { modulus } => match (&self.repr, &other.repr) {
                // Generator of the ideal (a, b) in Z/n.
                (Repr::Int(a), Repr::Int(b)) => {
                    let g = a.gcd(b).gcd(modulus);
                    coerce_int(&self.ring, &g)
                }
                _ => unreachable!(),
            },
            RingKind::PolynomialRing { base, .. } => match (&self.repr, &other.repr) {
                (Repr::Dense(a), Repr::Dense(b)) => {
                    let g = dense::dp_gcd(base, a, b)?;
                    Ok(Elem { ring: self.ring.clone(), repr: Repr::Dense(g) })
                }
                _ => unreachable!(),
            },
            RingKind::MultiPolyRing { .. } => crate::sparse_gcd::subresultant_gcd(self, other),
            _ => {
                // Field-like rings: gcd is 0 or 1.
                if self.is_zero() && other.is_zero() {
                    Ok(zero(&self.ring))
                } else {
                    Ok(one(&self.ring))
                }
            }
        }
    }

    /// The canonical unit of an element: dividing by it yields the canonical
    /// associate. Over Z this is the sign; over a field the element itself;
    /// over polynomial rings the canonical unit of the leading coefficient.
    pub fn canonical_unit(&self) -> Result<Elem> {
        if self.is_zero() {
            return Ok(one(&self.ring));
        }
        match (&self.ring.kind, &self.repr) {
            (RingKind::Integers, Repr::Int(v)) => {
                coerce_i64(&self.ring, if v.is_negative() { -1 } else { 1 })
            }
            (RingKind::PolynomialRing { .. }, Repr::Dense(c)) => {
                let u = c.last().unwrap().canonical_unit()?;
                Ok(constant_poly(&self.ring, u))
            }
            (RingKind::MultiPolyRing { .. }, Repr::Sparse(t)) => {
                let u = t.coeffs[0].canonical_unit()?;
                Ok(constant_poly(&self.ring, u))
            }
            (RingKind::IntegerResidue { .. }, _) => {
                // Units act as their own canonical unit; non-units stay put.
                match self.try_inverse() {
                    Ok(_) => Ok(self.clone()),
                    Err(_) => Ok(one(&self.ring)),
                }
            }
            _ => Ok(self.clone()), // fields
        }
    }

    /// Divide out the canonical unit.
    pub fn canonical_associate(&self) -> Result<Elem> {
        let u = self.canonical_unit()?;
        if u.is_one() {
            return Ok(self.clone());
        }
        self.mul(&u.try_inverse()?)
    }

    /// In-place product: `self = a * b`. Semantically identical to `mul`.
    pub fn mul_into(&mut self, a: &Elem, b: &Elem) -> Result<()> {
        check_same(a, b)?;
        if !rings_equal(&self.ring, &a.ring) {
            return Err(Error::MixedParents);
        }
        *self = a.mul(b)?;
        Ok(())
    }

    /// In-place accumulation: `self += t`. Reuses the limb buffer for
    /// big-integer representations.
    pub fn add_assign_elem(&mut self, t: &Elem) -> Result<()> {
        check_same(self, t)?;
        match (&self.ring.kind, &mut self.repr, &t.repr) {
            (RingKind::Integers, Repr::Int(s), Repr::Int(v)) => {
                *s += v;
                Ok(())
            }
            (RingKind::IntegerResidue { modulus }, Repr::Int(s), Repr::Int(v)) => {
                *s += v;
                if &*s >= modulus {
                    *s -= modulus;
                }
                Ok(())
            }
            (RingKind::Rationals, Repr::Rat(s), Repr::Rat(v)) => {
                *s += v;
                Ok(())
            }
            _ => {
                *self = self.add(t)?;
                Ok(())
            }
        }
    }
}

/// Canonical fraction: reduce by the gcd, then normalize the denominator by
/// its canonical unit (positive over Z, monic lc over polynomial rings).
pub fn make_fraction(ring: &Ring, base: &Ring, num: Elem, den: Elem) -> Result<Elem> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if num.is_zero() {
        return Ok(Elem {
            ring: ring.clone(),
            repr: Repr::Frac(Box::new(zero(base)), Box::new(one(base))),
        });
    }
    let g = num.gcd(&den)?;
    let (mut n, mut d) = if g.is_one() {
        (num, den)
    } else {
        (num.exact_div(&g)?, den.exact_div(&g)?)
    };
    let u = d.canonical_unit()?;
    if !u.is_one() {
        let uinv = u.try_inverse()?;
        n = n.mul(&uinv)?;
        d = d.mul(&uinv)?;
    }
    Ok(Elem { ring: ring.clone(), repr: Repr::Frac(Box::new(n), Box::new(d)) })
}

/// Fraction accessors (numerator, denominator).
pub fn frac_parts(x: &Elem) -> Option<(&Elem, &Elem)> {
    match &x.repr {
        Repr::Frac(n, d) => Some((n, d)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn zi(v: i64) -> Elem {
        coerce_i64(&integers(), v).unwrap()
    }

    #[test]
    fn integer_arithmetic_and_gcd() {
        let a = zi(-4);
        let b = zi(6);
        assert_eq!(a.add(&b).unwrap(), zi(2));
        assert_eq!(a.mul(&b).unwrap(), zi(-24));
        assert_eq!(a.gcd(&b).unwrap(), zi(2));
        assert_eq!(zi(-7).canonical_associate().unwrap(), zi(7));
    }

    #[test]
    fn mixed_parents_rejected() {
        let a = zi(1);
        let b = coerce_i64(&rationals(), 1).unwrap();
        assert_eq!(a.add(&b).unwrap_err(), Error::MixedParents);
    }

    #[test]
    fn integer_residue_ring() {
        let z12 = integer_residue(BigInt::from(12)).unwrap();
        assert!(!is_field(&z12));
        let a = coerce_i64(&z12, 7).unwrap();
        let b = coerce_i64(&z12, 8).unwrap();
        assert_eq!(a.add(&b).unwrap(), coerce_i64(&z12, 3).unwrap());
        assert_eq!(a.mul(&b).unwrap(), coerce_i64(&z12, 8).unwrap());
        // 8 has no inverse mod 12
        assert!(matches!(b.try_inverse(), Err(Error::ImpossibleInverse(_))));

        let z7 = integer_residue(BigInt::from(7)).unwrap();
        assert!(is_field(&z7));
        let c = coerce_i64(&z7, 3).unwrap();
        assert!(c.mul(&c.try_inverse().unwrap()).unwrap().is_one());
    }

    #[test]
    fn structural_ring_equality() {
        let r1 = polynomial_ring(integers(), "x");
        let r2 = polynomial_ring(integers(), "x");
        let r3 = polynomial_ring(integers(), "y");
        assert!(rings_equal(&r1, &r2));
        assert!(!rings_equal(&r1, &r3));
        let x1 = gen(&r1, 0).unwrap();
        let x2 = gen(&r2, 0).unwrap();
        // same structure: elements interoperate
        assert!(x1.sub(&x2).unwrap().is_zero());
    }

    #[test]
    fn finite_field_frobenius_fixes_elements() {
        for (p, k) in [(2u64, 4usize), (3, 2), (5, 2), (17, 1)] {
            let f = finite_field(p, k, "x").unwrap();
            assert!(is_field(&f));
            let g = gen(&f, 0).unwrap();
            let q = p.pow(k as u32);
            // Fermat: a^q = a
            assert_eq!(g.pow(q).unwrap(), g);
            let a = g.add(&one(&f)).unwrap();
            assert_eq!(a.pow(q).unwrap(), a);
            if !a.is_zero() {
                assert!(a.mul(&a.try_inverse().unwrap()).unwrap().is_one());
            }
        }
    }

    #[test]
    fn finite_field_handles_are_deterministic() {
        let f1 = finite_field(7, 3, "t").unwrap();
        let f2 = finite_field(7, 3, "t").unwrap();
        assert!(rings_equal(&f1, &f2));
        assert_eq!(residue_modulus(&f1), residue_modulus(&f2));
    }

    #[test]
    fn fraction_field_canonicalization() {
        let zx = polynomial_ring(integers(), "x");
        let qx = fraction_field(zx.clone());
        let x = gen(&zx, 0).unwrap();
        let one_p = one(&zx);
        // (x^2 - 1) / (x + 1) -> (x - 1) / 1
        let num = x.mul(&x).unwrap().sub(&one_p).unwrap();
        let den = x.add(&one_p).unwrap();
        let f = make_fraction(&qx, &zx, num, den).unwrap();
        let (n, d) = frac_parts(&f).unwrap();
        assert_eq!(*n, x.sub(&one_p).unwrap());
        assert!(d.is_one());
        // denominator normalized: -1/-x -> canonical positive lc
        let g = make_fraction(&qx, &zx, one_p.neg(), x.neg()).unwrap();
        let (n, d) = frac_parts(&g).unwrap();
        assert_eq!(*n, one_p);
        assert_eq!(*d, x);
    }

    #[test]
    fn residue_ring_reduction() {
        // Z[x]/(x^2 + 1): x * x = -1
        let zx = polynomial_ring(integers(), "x");
        let x = gen(&zx, 0).unwrap();
        let modulus = x.mul(&x).unwrap().add(&one(&zx)).unwrap();
        let r = residue_ring(zx.clone(), modulus).unwrap();
        let i = gen(&r, 0).unwrap();
        let i2 = i.mul(&i).unwrap();
        assert_eq!(i2, coerce_i64(&r, -1).unwrap());
        assert_eq!(i.pow(4).unwrap(), one(&r));
    }

    #[test]
    fn coercion_into_towers() {
        let zxyz = multi_poly_ring(integers(), &["x", "y", "z"]);
        let c = coerce_i64(&zxyz, 42).unwrap();
        assert!(!c.is_zero());
        let lifted = coerce(&zxyz, &zi(42)).unwrap();
        assert_eq!(c, lifted);
        let q = rationals();
        let half = coerce_i64(&q, 1).unwrap().exact_div(&coerce_i64(&q, 2).unwrap()).unwrap();
        assert_eq!(half.add(&half).unwrap(), one(&q));
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let mut rng = SplitMix64::new(7);
        let zx = polynomial_ring(integers(), "x");
        let x = gen(&zx, 0).unwrap();
        let c = coerce_i64(&zx, rng.range_i64(-5, 5)).unwrap();
        let f = x.add(&c).unwrap();
        let mut acc = one(&zx);
        for k in 0..8u64 {
            assert_eq!(f.pow(k).unwrap(), acc);
            acc = acc.mul(&f).unwrap();
        }
    }

    #[test]
    fn exact_div_detects_inexact() {
        assert_eq!(zi(7).exact_div(&zi(2)).unwrap_err(), Error::InexactDivision);
        assert_eq!(zi(8).exact_div(&zi(2)).unwrap(), zi(4));
    }
}
