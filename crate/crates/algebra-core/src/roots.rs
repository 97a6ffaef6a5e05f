//! Certified complex root isolation and its number-field applications.
//!
//! Roots of a squarefree rational polynomial are approximated by
//! simultaneous Aberth iteration in floating point, then certified a
//! posteriori: around each approximation we place the Newton-test disk of
//! radius n*|f(z)|/|f'(z)| (evaluated with ball arithmetic, so the radius is
//! a rigorous upper bound). If the n disks are pairwise disjoint, each
//! contains exactly one root. On any failure the working precision doubles.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ball::{BallContext, ComplexBox, RealBall};
use crate::dense;
use crate::error::{Error, Result};
use crate::float::{BigFloat, Round};
use crate::numfield::{nf_coeffs, nf_data};
use crate::ring::{self, Elem, Repr};

const PREC_CAP: u32 = 1 << 20;

fn rat_of(x: &Elem) -> Result<BigRational> {
    let q = ring::rationals();
    let c = ring::coerce(&q, x)?;
    match c.repr {
        Repr::Rat(v) => Ok(v),
        _ => Err(Error::InvalidParameter("expected a rational scalar".into())),
    }
}

/// Coefficients of a univariate polynomial over Q (or Z), low degree first.
fn rat_coeffs(f: &Elem) -> Result<Vec<BigRational>> {
    let coeffs = match &f.repr {
        Repr::Dense(c) => c,
        _ => return Err(Error::InvalidParameter("expected a dense polynomial".into())),
    };
    coeffs.iter().map(rat_of).collect()
}

// ---------------------------------------------------------------------------
// approximate complex arithmetic on big-float midpoints

#[derive(Clone, Debug)]
struct Cpx {
    re: BigFloat,
    im: BigFloat,
}

impl Cpx {
    fn zero() -> Self {
        Cpx { re: BigFloat::zero(), im: BigFloat::zero() }
    }

    fn round(&self, wp: u32) -> Self {
        Cpx { re: self.re.round(wp, Round::Nearest).0, im: self.im.round(wp, Round::Nearest).0 }
    }

    fn add(&self, o: &Cpx) -> Self {
        Cpx { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    fn sub(&self, o: &Cpx) -> Self {
        Cpx { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    fn mul(&self, o: &Cpx, wp: u32) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        Cpx { re, im }.round(wp)
    }

    /// Squared modulus, exact.
    fn abs2(&self) -> BigFloat {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    fn div(&self, o: &Cpx, wp: u32) -> Option<Self> {
        let n = o.abs2();
        if n.is_zero() {
            return None;
        }
        let re = self.re.mul(&o.re).add(&self.im.mul(&o.im));
        let im = self.im.mul(&o.re).sub(&self.re.mul(&o.im));
        let re = re.div(&n, wp, Round::Nearest).ok()?;
        let im = im.div(&n, wp, Round::Nearest).ok()?;
        Some(Cpx { re, im })
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

fn horner(cf: &[Cpx], z: &Cpx, wp: u32) -> Cpx {
    let mut acc = Cpx::zero();
    for c in cf.iter().rev() {
        acc = acc.mul(z, wp).add(c).round(wp);
    }
    acc
}

/// Simultaneous Aberth iteration. Returns approximations in no particular
/// order; quality is checked separately by the certification pass.
fn aberth(coeffs: &[BigRational], wp: u32) -> Vec<Cpx> {
    let n = coeffs.len() - 1;
    let cf: Vec<Cpx> = coeffs
        .iter()
        .map(|c| Cpx { re: BigFloat::from_rational(c, wp).0, im: BigFloat::zero() })
        .collect();
    let cfd: Vec<Cpx> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| {
            let d = c * BigRational::from(BigInt::from(i as i64));
            Cpx { re: BigFloat::from_rational(&d, wp).0, im: BigFloat::zero() }
        })
        .collect();

    // Cauchy bound R = 1 + max |a_i / a_n|
    let lead = coeffs.last().unwrap();
    let mut maxq = BigRational::zero();
    for c in &coeffs[..n] {
        let q = (c / lead).abs();
        if q > maxq {
            maxq = q;
        }
    }
    let radius = BigFloat::from_rational(&(maxq + BigRational::one()), wp).0;

    // u = 4/5 + 3/5 i lies exactly on the unit circle and has infinite
    // multiplicative order, so the starting points never collide.
    let five_inv = BigFloat::from_i64(1)
        .div(&BigFloat::from_i64(5), wp, Round::Nearest)
        .expect("five is nonzero");
    let u = Cpx {
        re: BigFloat::from_i64(4).mul(&five_inv).round(wp, Round::Nearest).0,
        im: BigFloat::from_i64(3).mul(&five_inv).round(wp, Round::Nearest).0,
    };
    let mut spin = u.clone();
    let mut zs: Vec<Cpx> = Vec::with_capacity(n);
    for k in 0..n {
        spin = spin.mul(&u, wp);
        // stagger the radii slightly so no symmetry locks the iteration
        let scale_num = BigFloat::from_i64((4 * n + k) as i64);
        let scale = radius
            .mul(&scale_num)
            .div(&BigFloat::from_i64(4 * n as i64), wp, Round::Nearest)
            .expect("nonzero");
        zs.push(Cpx { re: scale.mul(&spin.re), im: scale.mul(&spin.im) }.round(wp));
    }

    let tol = BigFloat::with_exp(BigInt::one(), -2 * (wp as i64 - 8));
    let max_iter = 60 + 6 * n;
    for _ in 0..max_iter {
        let mut moved = false;
        for i in 0..n {
            let z = zs[i].clone();
            let p = horner(&cf, &z, wp);
            if p.is_zero() {
                continue;
            }
            let pd = horner(&cfd, &z, wp);
            let w = match p.div(&pd, wp) {
                Some(w) => w,
                None => {
                    // derivative vanished at the approximation: nudge
                    zs[i] = z.add(&Cpx { re: BigFloat::with_exp(BigInt::one(), -(wp as i64 / 2)), im: BigFloat::zero() });
                    moved = true;
                    continue;
                }
            };
            let mut s = Cpx::zero();
            let one_c = Cpx { re: BigFloat::from_i64(1), im: BigFloat::zero() };
            let mut degenerate = false;
            for (j, zj) in zs.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = z.sub(zj);
                match one_c.div(&d, wp) {
                    Some(inv) => s = s.add(&inv).round(wp),
                    None => {
                        degenerate = true;
                        break;
                    }
                }
            }
            if degenerate {
                zs[i] = z.add(&Cpx { re: BigFloat::zero(), im: BigFloat::with_exp(BigInt::one(), -(wp as i64 / 2)) });
                moved = true;
                continue;
            }
            let denom = one_c.sub(&w.mul(&s, wp));
            let dz = w.div(&denom, wp).unwrap_or(w);
            let scale = BigFloat::from_i64(1).add(&z.abs2());
            if dz.abs2().cmp(&tol.mul(&scale)) == core::cmp::Ordering::Greater {
                moved = true;
            }
            zs[i] = z.sub(&dz).round(wp);
        }
        if !moved {
            break;
        }
    }
    zs
}

// ---------------------------------------------------------------------------
// certification

struct CertifiedRoot {
    z: Cpx,
    rho: BigFloat,
    real: bool,
}

/// Newton-test certification: rho_i is a rigorous upper bound for
/// n*|f(z_i)|/|f'(z_i)|, so the disk D(z_i, rho_i) contains a root; pairwise
/// disjointness then pins exactly one root per disk.
fn certify(coeffs: &[BigRational], zs: &[Cpx], wp: u32, p: u32) -> Option<Vec<CertifiedRoot>> {
    let n = coeffs.len() - 1;
    let ctx = BallContext::new(wp);
    let deriv: Vec<BigRational> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from(BigInt::from(i as i64)))
        .collect();
    let mut roots: Vec<CertifiedRoot> = Vec::with_capacity(n);
    let target = BigFloat::with_exp(BigInt::one(), -(p as i64) - 1);
    for z in zs {
        let boxed = ctx.box_exact(&z.re, &z.im);
        let fv = ctx.eval_box(coeffs, &boxed);
        let fdv = ctx.eval_box(&deriv, &boxed);
        let abs_f_hi = ctx.box_abs(&fv).endpoints().1;
        let abs_fd_lo = ctx.box_abs(&fdv).endpoints().0;
        if !abs_fd_lo.is_negative() == abs_fd_lo.is_zero() {
            return None; // cannot bound f' away from zero
        }
        let rho = abs_f_hi
            .mul(&BigFloat::from_i64(n as i64))
            .div(&abs_fd_lo, wp, Round::Up)
            .ok()?;
        if rho.cmp(&target) == core::cmp::Ordering::Greater {
            return None;
        }
        roots.push(CertifiedRoot { z: z.clone(), rho, real: false });
    }
    // pairwise disjoint: |z_i - z_j| > rho_i + rho_j, checked exactly on
    // squared quantities
    for i in 0..n {
        for j in i + 1..n {
            let dr = roots[i].z.re.sub(&roots[j].z.re);
            let di = roots[i].z.im.sub(&roots[j].z.im);
            let dist2 = dr.mul(&dr).add(&di.mul(&di));
            let rr = roots[i].rho.add(&roots[j].rho);
            if dist2.cmp(&rr.mul(&rr)) != core::cmp::Ordering::Greater {
                return None;
            }
        }
    }
    // real-root detection: if the disk meets the real axis and its mirror
    // image is disjoint from every other disk, the conjugate of the enclosed
    // root has nowhere else to go, so the root equals its conjugate
    for i in 0..n {
        if roots[i].z.im.abs().cmp(&roots[i].rho) == core::cmp::Ordering::Greater {
            continue;
        }
        let mut mirror_clear = true;
        for j in 0..n {
            if j == i {
                continue;
            }
            let dr = roots[i].z.re.sub(&roots[j].z.re);
            let di = roots[i].z.im.neg().sub(&roots[j].z.im);
            let dist2 = dr.mul(&dr).add(&di.mul(&di));
            let rr = roots[i].rho.add(&roots[j].rho);
            if dist2.cmp(&rr.mul(&rr)) != core::cmp::Ordering::Greater {
                mirror_clear = false;
                break;
            }
        }
        roots[i].real = mirror_clear;
    }
    Some(roots)
}

fn root_to_box(r: &CertifiedRoot) -> ComplexBox {
    let rad = r.rho.round(30, Round::Up).0;
    let re = RealBall { mid: r.z.re.clone(), rad: rad.clone() };
    let im = if r.real {
        RealBall { mid: BigFloat::zero(), rad: BigFloat::zero() }
    } else {
        RealBall { mid: r.z.im.clone(), rad }
    };
    ComplexBox { re, im }
}

fn sort_boxes(boxes: &mut [ComplexBox]) {
    boxes.sort_by(|a, b| {
        a.re.mid.cmp(&b.re.mid).then_with(|| a.im.mid.cmp(&b.im.mid))
    });
}

fn ball_roots_rat(coeffs: &[BigRational], p: u32) -> Result<Vec<ComplexBox>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Err(Error::InvalidParameter("polynomial must be nonconstant".into()));
    }
    if n == 1 {
        let root = -(&coeffs[0] / &coeffs[1]);
        let ctx = BallContext::new(p.max(64) + 2);
        let mut b = ctx.box_from_rational(&root);
        b.im = RealBall { mid: BigFloat::zero(), rad: BigFloat::zero() };
        return Ok(alloc::vec![b]);
    }
    let mut wp = p.max(64);
    loop {
        let zs = aberth(coeffs, wp);
        if let Some(cert) = certify(coeffs, &zs, wp, p) {
            let mut boxes: Vec<ComplexBox> = cert.iter().map(root_to_box).collect();
            sort_boxes(&mut boxes);
            return Ok(boxes);
        }
        wp = wp.checked_mul(2).unwrap_or(PREC_CAP + 1);
        if wp > PREC_CAP {
            return Err(Error::PrecisionExhausted);
        }
    }
}

/// Isolate all complex roots of a squarefree polynomial over Q in
/// pairwise-disjoint boxes of diameter at most 2^-p.
pub fn ball_roots(f: &Elem, p: u32) -> Result<Vec<ComplexBox>> {
    let coeffs = rat_coeffs(f)?;
    let q = ring::rationals();
    let fe: Vec<Elem> = coeffs
        .iter()
        .map(|c| Elem { ring: q.clone(), repr: Repr::Rat(c.clone()) })
        .collect();
    let fd = dense::dp_derivative(&q, &fe)?;
    let g = dense::dp_gcd_field(&q, &fe, &fd)?;
    if g.len() > 1 {
        return Err(Error::NotSquarefree);
    }
    ball_roots_rat(&coeffs, p)
}

fn nf_rat_coeffs(alpha: &Elem) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
    let nf = nf_data(&alpha.ring)?;
    let f: Vec<BigRational> = nf.f.iter().map(rat_of).collect::<Result<_>>()?;
    let a: Vec<BigRational> = nf_coeffs(alpha).iter().map(rat_of).collect::<Result<_>>()?;
    Ok((f, a))
}

/// Boxes around the images of alpha under all complex embeddings of its
/// number field, each with diameter at most 2^-p.
pub fn conjugates(alpha: &Elem, p: u32) -> Result<Vec<ComplexBox>> {
    let (f, a) = nf_rat_coeffs(alpha)?;
    let mut wp = p.max(64);
    loop {
        let roots = ball_roots_rat(&f, wp)?;
        let ctx = BallContext::new(wp);
        let images: Vec<ComplexBox> = roots.iter().map(|r| ctx.eval_box(&a, r)).collect();
        if images.iter().all(|b| b.diam_le_pow2(p as i64)) {
            return Ok(images);
        }
        wp = wp.checked_mul(2).unwrap_or(PREC_CAP + 1);
        if wp > PREC_CAP {
            return Err(Error::PrecisionExhausted);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Torsion {
    Torsion { order: u64 },
    NotTorsion,
}

fn euler_phi(mut k: u64) -> u64 {
    let mut phi = 1u64;
    let mut p = 2u64;
    while p * p <= k {
        if k % p == 0 {
            let mut pe = 1;
            k /= p;
            while k % p == 0 {
                pe *= p;
                k /= p;
            }
            phi *= pe * (p - 1);
        }
        p += 1;
    }
    if k > 1 {
        phi *= k - 1;
    }
    phi
}

/// Sound rational lower bound for the Dobrowolski threshold
/// 1 + log(d)/(6 d^2): log(d) is replaced by 1 - 1/d, which never exceeds it.
/// If every conjugate of an algebraic integer stays strictly below this
/// value, the element is a root of unity.
pub fn torsion_threshold(d: u64) -> BigRational {
    let dd = BigInt::from(d);
    BigRational::one()
        + BigRational::new(&dd - BigInt::one(), BigInt::from(6u32) * &dd * &dd * &dd)
}

fn exact_order(alpha: &Elem, d: u64) -> Result<u64> {
    // phi(k) <= d and phi(k) >= sqrt(k/2) give k <= 2d^2; test exactly
    for k in 1..=(2 * d * d + 1) {
        if d % euler_phi(k) != 0 {
            continue;
        }
        if alpha.pow(k)?.is_one() {
            return Ok(k);
        }
    }
    Err(Error::TorsionCertificationFailed)
}

fn is_integral_elem(alpha: &Elem) -> Result<bool> {
    // roots of unity are algebraic integers; a cheap sufficient filter is
    // the minimal polynomial of alpha over Q, obtained from the
    // multiplication-by-alpha matrix on the power basis
    let nf = nf_data(&alpha.ring)?;
    let d = nf.degree;
    let q = ring::rationals();
    let ac = nf_coeffs(alpha);
    let mut rows: Vec<Vec<Elem>> = Vec::with_capacity(d);
    let mut basis_vec: Vec<Elem> = alloc::vec![ring::zero(&q); d];
    for j in 0..d {
        basis_vec[j] = ring::one(&q);
        if j > 0 {
            basis_vec[j - 1] = ring::zero(&q);
        }
        let prod = crate::numfield::nf_mul_coeffs(nf, ac, &basis_vec)?;
        let mut row = alloc::vec![ring::zero(&q); d];
        for (i, c) in prod.iter().enumerate() {
            row[i] = c.clone();
        }
        rows.push(row);
    }
    let m = crate::matrix::DenseMatrix::from_rows(&q, rows)?;
    let g = crate::matrix::minpoly_field(&m)?;
    for c in &g.coeffs {
        let v = rat_of(c)?;
        if !v.denom().is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decide whether alpha is a root of unity, and if so return its exact
/// multiplicative order.
pub fn is_torsion(alpha: &Elem) -> Result<Torsion> {
    if alpha.is_zero() {
        return Err(Error::InvalidParameter("torsion test requires alpha != 0".into()));
    }
    let nf = nf_data(&alpha.ring)?;
    let d = nf.degree as u64;
    let ac = nf_coeffs(alpha);
    if ac.len() <= 1 {
        // rational element: torsion iff +-1
        let v = if ac.is_empty() { BigRational::zero() } else { rat_of(&ac[0])? };
        if v == BigRational::one() {
            return Ok(Torsion::Torsion { order: 1 });
        }
        if v == -BigRational::one() {
            return Ok(Torsion::Torsion { order: 2 });
        }
        return Ok(Torsion::NotTorsion);
    }
    if !is_integral_elem(alpha)? {
        return Ok(Torsion::NotTorsion);
    }
    let threshold = torsion_threshold(d);
    let one = BigRational::one();
    let mut p = 64u32;
    loop {
        let boxes = conjugates(alpha, p)?;
        let ctx = BallContext::new(p.max(64));
        let abs: Vec<RealBall> = boxes.iter().map(|b| ctx.box_abs(b)).collect();
        if abs.iter().any(|b| b.gt_rational(&one)) {
            return Ok(Torsion::NotTorsion);
        }
        if abs.iter().all(|b| b.lt_rational(&threshold)) {
            let order = exact_order(alpha, d)?;
            return Ok(Torsion::Torsion { order });
        }
        p = p.checked_mul(2).unwrap_or(PREC_CAP + 1);
        if p > PREC_CAP {
            return Err(Error::PrecisionExhausted);
        }
    }
}
