//! Midpoint-radius ball arithmetic over the binary floats of [`crate::float`].
//!
//! Every operation obeys the containment contract: the output ball contains
//! the exact mathematical result for all points of the input balls. Midpoints
//! are computed at the context precision, radii at 30 bits and always rounded
//! upward.

use alloc::string::String;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::float::{ulp, BigFloat, Round};

const RAD_BITS: u32 = 30;

#[derive(Clone, Debug)]
pub struct RealBall {
    pub mid: BigFloat,
    /// Nonnegative; the ball is [mid - rad, mid + rad].
    pub rad: BigFloat,
}

#[derive(Clone, Debug)]
pub struct ComplexBox {
    pub re: RealBall,
    pub im: RealBall,
}

#[derive(Clone, Copy, Debug)]
pub struct BallContext {
    pub prec: u32,
}

fn rad_up(x: &BigFloat) -> BigFloat {
    debug_assert!(!x.is_negative());
    let (r, _) = x.round(RAD_BITS, Round::Up);
    r
}

impl BallContext {
    pub fn new(prec: u32) -> Self {
        assert!(prec >= 2);
        BallContext { prec }
    }

    pub fn exact(&self, v: &BigFloat) -> RealBall {
        let (mid, err) = v.round(self.prec, Round::Nearest);
        RealBall { mid, rad: rad_up(&err) }
    }

    pub fn from_i64(&self, v: i64) -> RealBall {
        self.exact(&BigFloat::from_i64(v))
    }

    pub fn from_rational(&self, r: &BigRational) -> RealBall {
        let (mid, err) = BigFloat::from_rational(r, self.prec);
        RealBall { mid, rad: rad_up(&err) }
    }

    pub fn add(&self, a: &RealBall, b: &RealBall) -> RealBall {
        let (mid, err) = a.mid.add(&b.mid).round(self.prec, Round::Nearest);
        let rad = rad_up(&a.rad.add(&b.rad).add(&err));
        RealBall { mid, rad }
    }

    pub fn sub(&self, a: &RealBall, b: &RealBall) -> RealBall {
        self.add(a, &b.neg())
    }

    pub fn mul(&self, a: &RealBall, b: &RealBall) -> RealBall {
        let (mid, err) = a.mid.mul(&b.mid).round(self.prec, Round::Nearest);
        let cross = a
            .mid
            .abs()
            .mul(&b.rad)
            .add(&b.mid.abs().mul(&a.rad))
            .add(&a.rad.mul(&b.rad))
            .add(&err);
        RealBall { mid, rad: rad_up(&cross) }
    }

    /// Interval square: tighter than mul(a, a) and never dips below zero.
    pub fn sqr(&self, a: &RealBall) -> RealBall {
        let m = a.mid.abs();
        let hi = m.add(&a.rad);
        let hi2 = hi.mul(&hi);
        let lo2 = if m.cmp(&a.rad) == core::cmp::Ordering::Less {
            BigFloat::zero()
        } else {
            let lo = m.sub(&a.rad);
            lo.mul(&lo)
        };
        self.from_interval(&lo2, &hi2)
    }

    fn from_interval(&self, lo: &BigFloat, hi: &BigFloat) -> RealBall {
        debug_assert!(lo.cmp(hi) != core::cmp::Ordering::Greater);
        let two = BigFloat::from_i64(2);
        let (mid, err) = lo
            .add(hi)
            .div(&two, self.prec, Round::Nearest)
            .expect("two is nonzero")
            .round(self.prec, Round::Nearest);
        // cover both endpoints from the rounded midpoint
        let up = hi.sub(&mid).abs();
        let down = mid.sub(lo).abs();
        let r = if up.cmp(&down) == core::cmp::Ordering::Greater { up } else { down };
        // the nearest-division above can sit one ulp off either endpoint
        let slop = ulp(&mid, self.prec);
        RealBall { mid, rad: rad_up(&r.add(&err).add(&slop)) }
    }

    pub fn div(&self, a: &RealBall, b: &RealBall) -> Result<RealBall> {
        if b.contains_zero() {
            return Err(Error::ContainsZero);
        }
        let (alo, ahi) = a.endpoints();
        let (blo, bhi) = b.endpoints();
        let mut lo: Option<BigFloat> = None;
        let mut hi: Option<BigFloat> = None;
        for x in [&alo, &ahi] {
            for y in [&blo, &bhi] {
                let d = x.div(y, self.prec + 4, Round::Down)?;
                let u = x.div(y, self.prec + 4, Round::Up)?;
                lo = Some(match lo {
                    None => d.clone(),
                    Some(v) if d.cmp(&v) == core::cmp::Ordering::Less => d.clone(),
                    Some(v) => v,
                });
                hi = Some(match hi {
                    None => u.clone(),
                    Some(v) if u.cmp(&v) == core::cmp::Ordering::Greater => u.clone(),
                    Some(v) => v,
                });
            }
        }
        Ok(self.from_interval(&lo.unwrap(), &hi.unwrap()))
    }

    pub fn sqrt(&self, a: &RealBall) -> Result<RealBall> {
        let (lo, hi) = a.endpoints();
        if lo.is_negative() {
            return Err(Error::ContainsNegative);
        }
        let slo = lo.sqrt(self.prec + 4, Round::Down)?;
        let shi = hi.sqrt(self.prec + 4, Round::Up)?;
        Ok(self.from_interval(&slo, &shi))
    }

    pub fn abs(&self, a: &RealBall) -> RealBall {
        if a.contains_zero() {
            let hi = a.mid.abs().add(&a.rad);
            self.from_interval(&BigFloat::zero(), &hi)
        } else {
            RealBall { mid: a.mid.abs(), rad: a.rad.clone() }
        }
    }

    pub fn pow(&self, a: &RealBall, k: u64) -> RealBall {
        if k == 0 {
            return self.from_i64(1);
        }
        let mut acc: Option<RealBall> = None;
        let mut sq = a.clone();
        let mut k = k;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(v) => self.mul(&v, &sq),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            sq = self.mul(&sq, &sq);
        }
        acc.unwrap()
    }

    // -- complex boxes ----------------------------------------------------

    pub fn box_exact(&self, re: &BigFloat, im: &BigFloat) -> ComplexBox {
        ComplexBox { re: self.exact(re), im: self.exact(im) }
    }

    pub fn box_from_rational(&self, r: &BigRational) -> ComplexBox {
        ComplexBox { re: self.from_rational(r), im: self.from_i64(0) }
    }

    pub fn box_add(&self, a: &ComplexBox, b: &ComplexBox) -> ComplexBox {
        ComplexBox { re: self.add(&a.re, &b.re), im: self.add(&a.im, &b.im) }
    }

    pub fn box_sub(&self, a: &ComplexBox, b: &ComplexBox) -> ComplexBox {
        ComplexBox { re: self.sub(&a.re, &b.re), im: self.sub(&a.im, &b.im) }
    }

    pub fn box_mul(&self, a: &ComplexBox, b: &ComplexBox) -> ComplexBox {
        let re = self.sub(&self.mul(&a.re, &b.re), &self.mul(&a.im, &b.im));
        let im = self.add(&self.mul(&a.re, &b.im), &self.mul(&a.im, &b.re));
        ComplexBox { re, im }
    }

    /// a / b via multiplication by the conjugate over |b|^2.
    pub fn box_div(&self, a: &ComplexBox, b: &ComplexBox) -> Result<ComplexBox> {
        let n = self.add(&self.sqr(&b.re), &self.sqr(&b.im));
        let num = self.box_mul(a, &ComplexBox { re: b.re.clone(), im: b.im.neg() });
        Ok(ComplexBox { re: self.div(&num.re, &n)?, im: self.div(&num.im, &n)? })
    }

    /// |a| as a real ball.
    pub fn box_abs(&self, a: &ComplexBox) -> RealBall {
        let s = self.add(&self.sqr(&a.re), &self.sqr(&a.im));
        // rounding in add can push the lower endpoint a hair below zero;
        // the true value is a sum of squares, so clamping keeps containment
        let (lo, hi) = s.endpoints();
        let lo = if lo.is_negative() { BigFloat::zero() } else { lo };
        let slo = lo.sqrt(self.prec + 4, Round::Down).expect("lo clamped");
        let shi = hi.sqrt(self.prec + 4, Round::Up).expect("hi nonnegative");
        self.from_interval(&slo, &shi)
    }

    pub fn box_pow(&self, a: &ComplexBox, k: u64) -> ComplexBox {
        if k == 0 {
            return self.box_exact(&BigFloat::from_i64(1), &BigFloat::zero());
        }
        let mut acc: Option<ComplexBox> = None;
        let mut sq = a.clone();
        let mut k = k;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(v) => self.box_mul(&v, &sq),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            sq = self.box_mul(&sq, &sq);
        }
        acc.unwrap()
    }

    // -- polynomial evaluation --------------------------------------------

    /// Horner evaluation of a rational-coefficient polynomial at a ball.
    pub fn eval_real(&self, coeffs: &[BigRational], x: &RealBall) -> RealBall {
        let mut acc = self.from_i64(0);
        for c in coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, x), &self.from_rational(c));
        }
        acc
    }

    pub fn eval_box(&self, coeffs: &[BigRational], z: &ComplexBox) -> ComplexBox {
        let mut acc = self.box_exact(&BigFloat::zero(), &BigFloat::zero());
        for c in coeffs.iter().rev() {
            acc = self.box_mul(&acc, z);
            acc.re = self.add(&acc.re, &self.from_rational(c));
        }
        acc
    }
}

impl RealBall {
    pub fn neg(&self) -> RealBall {
        RealBall { mid: self.mid.neg(), rad: self.rad.clone() }
    }

    pub fn endpoints(&self) -> (BigFloat, BigFloat) {
        (self.mid.sub(&self.rad), self.mid.add(&self.rad))
    }

    pub fn contains_zero(&self) -> bool {
        let (lo, hi) = self.endpoints();
        !lo.is_negative() == lo.is_zero() && !hi.is_negative()
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        let diff = self.mid.to_rational() - r;
        diff.abs() <= self.rad.to_rational()
    }

    /// Whole ball strictly below r.
    pub fn lt_rational(&self, r: &BigRational) -> bool {
        self.endpoints().1.cmp_rational(r) == core::cmp::Ordering::Less
    }

    /// Whole ball strictly above r.
    pub fn gt_rational(&self, r: &BigRational) -> bool {
        self.endpoints().0.cmp_rational(r) == core::cmp::Ordering::Greater
    }

    /// Diameter at most 2^-p.
    pub fn diam_le_pow2(&self, p: i64) -> bool {
        let bound = BigFloat::with_exp(BigInt::from(1), -p - 1);
        self.rad.cmp(&bound) != core::cmp::Ordering::Greater
    }
}

impl ComplexBox {
    pub fn contains_rational_point(&self, re: &BigRational, im: &BigRational) -> bool {
        self.re.contains_rational(re) && self.im.contains_rational(im)
    }

    pub fn diam_le_pow2(&self, p: i64) -> bool {
        self.re.diam_le_pow2(p) && self.im.diam_le_pow2(p)
    }
}

pub fn format_ball(b: &RealBall, prec: u32) -> String {
    let digits = (((prec as f64) * core::f64::consts::LOG10_2).ceil() as u32).max(3);
    alloc::format!("[{} +/- {}]", b.mid.to_decimal(digits), b.rad.to_decimal(3))
}

pub fn format_box(b: &ComplexBox, prec: u32) -> String {
    let digits = (((prec as f64) * core::f64::consts::LOG10_2).ceil() as u32).max(3);
    alloc::format!(
        "{} + {}*I",
        b.re.mid.to_decimal(digits),
        b.im.mid.to_decimal(digits)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use num_traits::Zero;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn rand_ball(ctx: &BallContext, rng: &mut SplitMix64) -> (RealBall, BigRational) {
        // a ball plus an exact rational sample point inside it
        let m = rat(rng.range_i64(-500, 500), 1 + rng.below(20) as i64);
        let r = rat(rng.below(20) as i64, 7);
        let b0 = ctx.from_rational(&m);
        let b = RealBall {
            mid: b0.mid,
            rad: rad_up(&b0.rad.add(&BigFloat::from_rational(&r, 30).0.abs())),
        };
        // sample inside [m - r/2, m + r/2] to stay inside after rounding
        let t = rat(rng.range_i64(-3, 3), 7);
        let sample = &m + &r * t / BigRational::from(BigInt::from(2));
        assert!(b.contains_rational(&sample));
        (b, sample)
    }

    #[test]
    fn exact_product_is_tight() {
        let ctx = BallContext::new(53);
        let p = ctx.mul(&ctx.from_i64(2), &ctx.from_i64(3));
        assert!(p.contains_rational(&rat(6, 1)));
        let u = ulp(&p.mid, ctx.prec);
        assert!(p.rad.cmp(&u) != core::cmp::Ordering::Greater, "rad within 1 ulp");
    }

    #[test]
    fn radius_addition() {
        let ctx = BallContext::new(53);
        let half = rat(1, 2);
        let a = RealBall {
            mid: BigFloat::from_i64(1),
            rad: BigFloat::from_rational(&half, 30).0,
        };
        let s = ctx.add(&a, &a);
        // [1 +/- 1/2] + [1 +/- 1/2] covers [1, 3]
        assert!(s.contains_rational(&rat(1, 1)));
        assert!(s.contains_rational(&rat(3, 1)));
        assert!(s.contains_rational(&rat(3, 2)));
        assert!(!s.contains_rational(&rat(7, 2)));
    }

    #[test]
    fn containment_randomized() {
        let ctx = BallContext::new(40);
        let mut rng = SplitMix64::new(81);
        for _ in 0..400 {
            let (a, xa) = rand_ball(&ctx, &mut rng);
            let (b, xb) = rand_ball(&ctx, &mut rng);
            assert!(ctx.add(&a, &b).contains_rational(&(&xa + &xb)));
            assert!(ctx.sub(&a, &b).contains_rational(&(&xa - &xb)));
            assert!(ctx.mul(&a, &b).contains_rational(&(&xa * &xb)));
            assert!(ctx.sqr(&a).contains_rational(&(&xa * &xa)));
            if !b.contains_zero() && !xb.is_zero() {
                assert!(ctx.div(&a, &b).unwrap().contains_rational(&(&xa / &xb)));
            }
            let abs_a = ctx.abs(&a);
            assert!(abs_a.contains_rational(&xa.abs()));
            let p3 = ctx.pow(&a, 3);
            assert!(p3.contains_rational(&(&xa * &xa * &xa)));
        }
    }

    #[test]
    fn division_by_zero_straddling_ball() {
        let ctx = BallContext::new(53);
        let z = RealBall { mid: BigFloat::from_i64(0), rad: BigFloat::from_i64(1) };
        assert!(matches!(ctx.div(&ctx.from_i64(1), &z), Err(Error::ContainsZero)));
        let neg = ctx.from_i64(-4);
        assert!(matches!(ctx.sqrt(&neg), Err(Error::ContainsNegative)));
    }

    #[test]
    fn sqrt_containment() {
        let ctx = BallContext::new(60);
        let two = ctx.from_i64(2);
        let r = ctx.sqrt(&two).unwrap();
        // r^2 contains 2
        assert!(ctx.sqr(&r).contains_rational(&rat(2, 1)));
        assert!(r.diam_le_pow2(50));
    }

    #[test]
    fn box_ops_contain_gaussian_samples() {
        let ctx = BallContext::new(50);
        let mut rng = SplitMix64::new(82);
        for _ in 0..150 {
            let (ar, xa) = rand_ball(&ctx, &mut rng);
            let (ai, ya) = rand_ball(&ctx, &mut rng);
            let (br, xb) = rand_ball(&ctx, &mut rng);
            let (bi, yb) = rand_ball(&ctx, &mut rng);
            let a = ComplexBox { re: ar, im: ai };
            let b = ComplexBox { re: br, im: bi };
            let s = ctx.box_add(&a, &b);
            assert!(s.contains_rational_point(&(&xa + &xb), &(&ya + &yb)));
            let m = ctx.box_mul(&a, &b);
            let mre = &xa * &xb - &ya * &yb;
            let mim = &xa * &yb + &ya * &xb;
            assert!(m.contains_rational_point(&mre, &mim));
            // |a|^2 containment through box_abs
            let n2 = &xa * &xa + &ya * &ya;
            let abs_ball = ctx.box_abs(&a);
            let sq = ctx.sqr(&abs_ball);
            assert!(sq.contains_rational(&n2));
        }
    }

    #[test]
    fn box_division_roundtrip() {
        let ctx = BallContext::new(60);
        // (3 + 4i) / (1 + 2i) = (11 - 2i)/5
        let a = ctx.box_exact(&BigFloat::from_i64(3), &BigFloat::from_i64(4));
        let b = ctx.box_exact(&BigFloat::from_i64(1), &BigFloat::from_i64(2));
        let q = ctx.box_div(&a, &b).unwrap();
        assert!(q.contains_rational_point(&rat(11, 5), &rat(-2, 5)));
    }

    #[test]
    fn poly_eval_sqrt2_root() {
        let ctx = BallContext::new(80);
        // x^2 - 2 at a tight ball around sqrt(2)
        let coeffs = [rat(-2, 1), rat(0, 1), rat(1, 1)];
        let r = ctx.sqrt(&ctx.from_i64(2)).unwrap();
        let v = ctx.eval_real(&coeffs, &r);
        assert!(v.contains_rational(&rat(0, 1)));
        // and at the box sqrt(2) + 0i
        let z = ComplexBox { re: r, im: ctx.from_i64(0) };
        let bv = ctx.eval_box(&coeffs, &z);
        assert!(bv.contains_rational_point(&rat(0, 1), &rat(0, 1)));
    }

    #[test]
    fn formatting() {
        let ctx = BallContext::new(53);
        let b = ctx.from_rational(&rat(1, 2));
        let s = format_ball(&b, ctx.prec);
        assert!(s.starts_with("[5.0"), "got {s}");
        let z = ctx.box_exact(&BigFloat::from_i64(1), &BigFloat::from_i64(-2));
        let s = format_box(&z, ctx.prec);
        assert!(s.contains("*I"), "got {s}");
    }
}
