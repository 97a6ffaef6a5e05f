//! Arbitrary-precision binary floating point: mantissa * 2^exp with explicit
//! directed rounding. Arithmetic is exact by default (BigInt mantissas);
//! rounding to a working precision is a separate, explicit step so ball
//! arithmetic can account for every rounding error.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BigFloat {
    /// Zero, or an odd integer after normalization.
    pub mantissa: BigInt,
    pub exp: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Nearest,
    /// Toward +infinity.
    Up,
    /// Toward -infinity.
    Down,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat { mantissa: BigInt::zero(), exp: 0 }
    }

    pub fn from_bigint(v: BigInt) -> Self {
        BigFloat { mantissa: v, exp: 0 }.normalized()
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_bigint(BigInt::from(v))
    }

    /// m * 2^e.
    pub fn with_exp(m: BigInt, e: i64) -> Self {
        BigFloat { mantissa: m, exp: e }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mantissa.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exp += tz as i64;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn neg(&self) -> Self {
        BigFloat { mantissa: -&self.mantissa, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mantissa: self.mantissa.abs(), exp: self.exp }
    }

    /// Number of significant bits of the mantissa.
    pub fn prec_bits(&self) -> u64 {
        self.mantissa.bits()
    }

    /// Exact sum.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mantissa << (self.exp - e) as u64;
        let b = &other.mantissa << (other.exp - e) as u64;
        BigFloat { mantissa: a + b, exp: e }.normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Exact product.
    pub fn mul(&self, other: &Self) -> Self {
        BigFloat { mantissa: &self.mantissa * &other.mantissa, exp: self.exp + other.exp }
            .normalized()
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        BigFloat { mantissa: self.mantissa.clone(), exp: self.exp + k }
    }

    /// Round to p significant bits. Returns the rounded value and an upper
    /// bound on the absolute rounding error (zero when exact).
    pub fn round(&self, p: u32, mode: Round) -> (Self, Self) {
        let bits = self.mantissa.bits();
        if bits <= p as u64 {
            return (self.clone(), Self::zero());
        }
        let shift = (bits - p as u64) as i64;
        let m = &self.mantissa >> shift as u64;
        // m = floor toward -inf for positive, toward zero shifted for negative:
        // BigInt >> rounds toward negative infinity
        let exact = (&m << shift as u64) == self.mantissa;
        if exact {
            return (
                BigFloat { mantissa: m, exp: self.exp + shift }.normalized(),
                Self::zero(),
            );
        }
        let err_exp = self.exp + shift;
        let adjust: BigInt = match mode {
            Round::Down => BigInt::zero(), // >> already floors
            Round::Up => BigInt::one(),
            Round::Nearest => {
                // look at the bit below the cut
                let below = (&self.mantissa >> (shift - 1) as u64) & BigInt::one();
                below
            }
        };
        let out = BigFloat { mantissa: m + adjust, exp: err_exp }.normalized();
        // error < one ulp for directed modes, <= half ulp for nearest
        let err = match mode {
            Round::Nearest => BigFloat { mantissa: BigInt::one(), exp: err_exp - 1 },
            _ => BigFloat { mantissa: BigInt::one(), exp: err_exp },
        };
        (out, err)
    }

    /// Quotient self / other to p bits with directed rounding.
    pub fn div(&self, other: &Self, p: u32, mode: Round) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        // scale numerator so the raw quotient has at least p+2 bits
        let extra = (p as i64 + 2) - (self.mantissa.bits() as i64 - other.mantissa.bits() as i64);
        let shift = extra.max(0);
        let num = &self.mantissa << shift as u64;
        let (q, r) = num.div_rem(&other.mantissa);
        let exp = self.exp - other.exp - shift;
        if r.is_zero() {
            let (v, _) = BigFloat { mantissa: q, exp }.normalized().round(p, mode);
            return Ok(v);
        }
        // exact value lies strictly between q and q +/- 1 (sign-dependent);
        // nudge q so directed rounding stays correct, then round
        let q = match mode {
            Round::Nearest => q, // p+2 guard bits keep the half-ulp bound
            _ => {
                // div_rem truncates toward zero; fix to the requested direction
                let positive_quotient = self.is_negative() == other.is_negative();
                match (positive_quotient, mode) {
                    (true, Round::Up) | (false, Round::Down) => {
                        if positive_quotient {
                            q + 1
                        } else {
                            q - 1
                        }
                    }
                    _ => q,
                }
            }
        };
        let (v, _) = BigFloat { mantissa: q, exp }.normalized().round(p, mode);
        Ok(v)
    }

    /// Square root to p bits with directed rounding; requires self >= 0.
    pub fn sqrt(&self, p: u32, mode: Round) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::ContainsNegative);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        // shift to an even exponent with at least 2p+4 mantissa bits
        let bits = self.mantissa.bits() as i64;
        let mut shift = (2 * p as i64 + 4 - bits).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let m = &self.mantissa << shift as u64;
        let root = m.sqrt(); // floor
        let exact = &root * &root == m;
        let exp = (self.exp - shift) / 2;
        let q = if exact {
            root
        } else {
            match mode {
                Round::Up => root + 1,
                _ => root, // floor is a lower bound; fine for Down and Nearest guard bits
            }
        };
        let (v, _) = BigFloat { mantissa: q, exp }.normalized().round(p, mode);
        Ok(v)
    }

    pub fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.sub(other).mantissa.sign().cmp(&Sign::NoSign)
    }

    /// Exact comparison with a rational number.
    pub fn cmp_rational(&self, r: &BigRational) -> core::cmp::Ordering {
        // m * 2^e  vs  a/b  <=>  m * 2^e * b  vs  a  (b > 0)
        let b = r.denom();
        let a = r.numer();
        let lhs = &self.mantissa * b;
        let (lhs, rhs) = if self.exp >= 0 {
            (lhs << self.exp as u64, a.clone())
        } else {
            (lhs, a << (-self.exp) as u64)
        };
        lhs.cmp(&rhs)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from(&self.mantissa << self.exp as u64)
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Nearest p-bit float to a rational, with an error bound.
    pub fn from_rational(r: &BigRational, p: u32) -> (Self, Self) {
        let num = Self::from_bigint(r.numer().clone());
        let den = Self::from_bigint(r.denom().clone());
        if den.mantissa.is_one() && den.exp == 0 {
            return num.round(p, Round::Nearest);
        }
        let v = num.div(&den, p, Round::Nearest).expect("denominator nonzero");
        // error bound: one ulp of the result
        let err = if v.is_zero() {
            BigFloat { mantissa: BigInt::one(), exp: -(p as i64) }
        } else {
            ulp(&v, p)
        };
        (v, err)
    }

    /// Decimal rendering with roughly `digits` significant digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let r = self.to_rational();
        let neg = r.is_negative();
        let r = r.abs();
        // scale into [10^digits, 10^(digits+1))
        let ten = BigInt::from(10u32);
        let mut k: i64 = 0;
        let mut scaled = r.clone();
        let one = BigRational::one();
        let tenr = BigRational::from(ten.clone());
        while scaled >= tenr {
            scaled /= tenr.clone();
            k += 1;
        }
        while scaled < one {
            scaled *= tenr.clone();
            k -= 1;
        }
        let mult = ten.pow(digits.saturating_sub(1));
        let m = (r * BigRational::from(mult)
            / pow10(k))
        .round()
        .to_integer();
        let s = m.to_string();
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        // place the decimal point after the first digit, exponent k
        let chars: Vec<char> = s.chars().collect();
        out.push(chars[0]);
        if chars.len() > 1 {
            out.push('.');
            for c in &chars[1..] {
                out.push(*c);
            }
        }
        if k != 0 {
            out.push('e');
            out.push_str(&alloc::format!("{k}"));
        }
        out
    }
}

fn pow10(k: i64) -> BigRational {
    let ten = BigInt::from(10u32);
    if k >= 0 {
        BigRational::from(ten.pow(k as u32))
    } else {
        BigRational::new(BigInt::one(), ten.pow((-k) as u32))
    }
}

/// One unit in the last place of a p-bit value.
pub fn ulp(x: &BigFloat, p: u32) -> BigFloat {
    if x.is_zero() {
        return BigFloat { mantissa: BigInt::one(), exp: -(p as i64) };
    }
    let top = x.exp + x.mantissa.bits() as i64; // 2^(top-1) <= |x| < 2^top
    BigFloat { mantissa: BigInt::one(), exp: top - p as i64 }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.mantissa == other.mantissa && (self.exp == other.exp || self.mantissa.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exact_ops() {
        let a = BigFloat::from_i64(6);
        let b = BigFloat::from_i64(10);
        assert_eq!(a.mul(&b), BigFloat::from_i64(60));
        assert_eq!(a.add(&b), BigFloat::from_i64(16));
        assert_eq!(a.sub(&b), BigFloat::from_i64(-4));
        // normalization strips powers of two
        assert_eq!(BigFloat::from_i64(12).mantissa, BigInt::from(3));
        assert_eq!(BigFloat::from_i64(12).exp, 2);
    }

    #[test]
    fn rounding_modes_bracket() {
        let mut rng = SplitMix64::new(71);
        for _ in 0..200 {
            let v = BigFloat::from_i64(rng.range_i64(-1_000_000, 1_000_000))
                .mul_pow2(rng.range_i64(-8, 8));
            let p = 8 + rng.below(10) as u32;
            let (lo, _) = v.round(p, Round::Down);
            let (hi, _) = v.round(p, Round::Up);
            let (near, err) = v.round(p, Round::Nearest);
            assert!(lo.cmp(&v) != core::cmp::Ordering::Greater);
            assert!(hi.cmp(&v) != core::cmp::Ordering::Less);
            // nearest is within the stated error of the exact value
            let diff = near.sub(&v).abs();
            assert!(diff.cmp(&err) != core::cmp::Ordering::Greater);
        }
    }

    #[test]
    fn division_directed() {
        let one = BigFloat::from_i64(1);
        let three = BigFloat::from_i64(3);
        let lo = one.div(&three, 20, Round::Down).unwrap();
        let hi = one.div(&three, 20, Round::Up).unwrap();
        let third = rat(1, 3);
        assert!(lo.cmp_rational(&third) == core::cmp::Ordering::Less);
        assert!(hi.cmp_rational(&third) == core::cmp::Ordering::Greater);
        // widths differ by about one ulp
        let gap = hi.sub(&lo);
        assert!(gap.cmp(&ulp(&hi, 18)) != core::cmp::Ordering::Greater);
        // negative numerator
        let nlo = one.neg().div(&three, 20, Round::Down).unwrap();
        let nhi = one.neg().div(&three, 20, Round::Up).unwrap();
        let nthird = rat(-1, 3);
        assert!(nlo.cmp_rational(&nthird) != core::cmp::Ordering::Greater);
        assert!(nhi.cmp_rational(&nthird) != core::cmp::Ordering::Less);
    }

    #[test]
    fn sqrt_directed() {
        let two = BigFloat::from_i64(2);
        let lo = two.sqrt(60, Round::Down).unwrap();
        let hi = two.sqrt(60, Round::Up).unwrap();
        // lo^2 <= 2 <= hi^2 exactly
        assert!(lo.mul(&lo).cmp(&two) != core::cmp::Ordering::Greater);
        assert!(hi.mul(&hi).cmp(&two) != core::cmp::Ordering::Less);
        // perfect squares are exact
        let nine = BigFloat::from_i64(9);
        assert_eq!(nine.sqrt(10, Round::Down).unwrap(), BigFloat::from_i64(3));
        assert!(BigFloat::from_i64(-1).sqrt(10, Round::Down).is_err());
    }

    #[test]
    fn rational_conversion_roundtrip() {
        let mut rng = SplitMix64::new(72);
        for _ in 0..100 {
            let r = rat(rng.range_i64(-999, 999), 1 + rng.below(50) as i64);
            let (v, err) = BigFloat::from_rational(&r, 40);
            let diff = v.to_rational() - &r;
            let bound = err.to_rational();
            assert!(diff.abs() <= bound, "conversion error exceeds bound");
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(BigFloat::from_i64(0).to_decimal(5), "0");
        let h = BigFloat::with_exp(BigInt::one(), -1); // 0.5
        let s = h.to_decimal(3);
        assert!(s.starts_with("5.00") && s.ends_with("e-1"), "got {s}");
        let v = BigFloat::from_i64(1536);
        let s = v.to_decimal(4);
        assert!(s.starts_with("1.536"), "got {s}");
    }
}
