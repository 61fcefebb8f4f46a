//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` of two doubles with
//! `|lo| <= ulp(hi) / 2`, giving roughly 106 bits of mantissa. This is enough
//! headroom for the bound constants, which are compared across algebraically
//! equivalent forms at tolerances near 1e-12 and must carry ≥ 80 bits.
//!
//! The error-free transformations are the classical `two_sum` / `two_prod`
//! (the latter via fused multiply-add).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `2^k` applied in at most two exact steps so that `k` near ±1074 does not
/// overflow the intermediate power.
fn scale_pow2(x: f64, k: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let half = k / 2;
    x * 2f64.powi(half) * 2f64.powi(k - half)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: std::f64::consts::PI,
        lo: 1.2246467991473532e-16,
    };
    pub const E: Self = Self {
        hi: std::f64::consts::E,
        lo: 1.4456468917292502e-16,
    };
    pub const LN_2: Self = Self {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };

    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn from_u64(x: u64) -> Self {
        let hi = x as f64;
        // `hi` may have rounded; the remainder fits in an i64 exactly.
        let lo = (x as i128 - hi as i128) as f64;
        Self::from_parts(hi, lo)
    }

    /// Nearest double-double to an arbitrary integer; saturates to ±∞ when
    /// the integer is outside the double range.
    pub fn from_bigint(x: &BigInt) -> Self {
        Self::from_rational(&BigRational::from_integer(x.clone()))
    }

    /// Nearest double-double to an exact rational (about 2^-120 relative).
    pub fn from_rational(q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::ZERO;
        }
        let negative = q.is_negative();
        let num = q.numer().abs();
        let den = q.denom().abs();
        // Choose a shift so the integer quotient carries ~130 significant bits.
        let shift = 130 - (num.bits() as i64 - den.bits() as i64);
        let scaled_num = if shift >= 0 {
            num << (shift as usize)
        } else {
            num >> ((-shift) as usize)
        };
        let quotient = scaled_num.div_floor(&den);
        let mut value = Self::from_big_integer_exactish(&quotient);
        value = value.mul_pow2(-(shift as i32));
        if negative {
            -value
        } else {
            value
        }
    }

    /// Converts an integer of at most a few hundred bits; the two leading
    /// doubles are exact up to the rounding of `lo`.
    fn from_big_integer_exactish(x: &BigInt) -> Self {
        let bits = x.bits();
        if bits > 1000 {
            let drop = bits - 200;
            return Self::from_big_integer_exactish(&(x >> drop)).mul_pow2(drop as i32);
        }
        let hi = x.to_f64().unwrap_or(f64::NAN);
        let hi_int = float_to_bigint(hi);
        let rem = x - hi_int;
        let lo = rem.to_f64().unwrap_or(0.0);
        Self::from_parts(hi, lo)
    }

    /// Exact conversion to a rational. Panics on non-finite values.
    pub fn to_rational(&self) -> BigRational {
        let hi = BigRational::from_float(self.hi).expect("finite double-double");
        let lo = BigRational::from_float(self.lo).expect("finite double-double");
        hi + lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn to_f64(&self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(&self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    pub fn abs(self) -> Self {
        if self.is_sign_negative() {
            -self
        } else {
            self
        }
    }

    pub fn mul_pow2(self, k: i32) -> Self {
        Self {
            hi: scale_pow2(self.hi, k),
            lo: scale_pow2(self.lo, k),
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                Self::from_f64(f64::NAN)
            };
        }
        if !self.hi.is_finite() {
            return self;
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let residual = (self - Self { hi: p, lo: e }).hi;
        let (hi, lo) = quick_two_sum(s, residual / (2.0 * s));
        Self { hi, lo }
    }

    pub fn exp(self) -> Self {
        if self.hi.is_nan() {
            return self;
        }
        if self.hi > 709.782712893384 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 {
            return Self::ONE;
        }
        let k = (self.hi / Self::LN_2.hi).round();
        let r = (self - Self::LN_2.mul_f64(k)).mul_pow2(-10);

        // expm1(r) by Taylor; |r| < 3.4e-4 so 12 terms reach ~1e-45.
        let mut term = r;
        let mut sum = r;
        for i in 2..=12 {
            term = (term * r) / Self::from_f64(i as f64);
            sum = sum + term;
        }
        // expm1(2r) = expm1(r) * (expm1(r) + 2), keeping relative precision.
        for _ in 0..10 {
            sum = sum * (sum + Self::from_f64(2.0));
        }
        (sum + Self::ONE).mul_pow2(k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(if self.hi == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            });
        }
        if !self.hi.is_finite() {
            return self;
        }
        // x = m·2^e with m near 1, so exp(-y) below stays in the normal range.
        let e = self.hi.log2().round() as i32;
        let m = self.mul_pow2(-e);
        let mut y = Self::from_f64(m.hi.ln());
        for _ in 0..2 {
            y = y + m * (-y).exp() - Self::ONE;
        }
        y + Self::LN_2.mul_f64(e as f64)
    }

    /// Natural log of a positive integer of any size.
    pub fn ln_bigint(x: &BigInt) -> Self {
        assert!(x.sign() == Sign::Plus, "ln of non-positive integer");
        let bits = x.bits();
        if bits <= 900 {
            return Self::from_bigint(x).ln();
        }
        let shift = bits - 200;
        Self::from_bigint(&(x >> shift)).ln() + Self::LN_2.mul_f64(shift as f64)
    }

    pub fn powf(self, exponent: Self) -> Self {
        if self.hi == 0.0 {
            return Self::ZERO;
        }
        (exponent * self.ln()).exp()
    }

    pub fn powi(self, n: u32) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// `x^(3/4)` as a product of square roots.
    pub fn pow_three_quarters(self) -> Self {
        let root = self.sqrt();
        root * root.sqrt()
    }

    /// Scientific notation with `digits` significant digits, rounded from the
    /// exact binary value.
    pub fn to_scientific(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if !self.is_finite() {
            return format!("{}", self.to_f64());
        }
        if self.hi == 0.0 {
            return format!("{:.*}e0", digits - 1, 0.0);
        }
        let value = self.to_rational();
        let negative = value.is_negative();
        let value = value.abs();
        let mut exp10 = self.to_f64().abs().log10().floor() as i64;
        let ten = BigInt::from(10u32);
        let scaled = |e: i64| -> BigInt {
            let shift = digits as i64 - 1 - e;
            let factor = BigRational::from_integer(num_traits::pow(ten.clone(), shift.unsigned_abs() as usize));
            let v = if shift >= 0 {
                &value * &factor
            } else {
                &value / &factor
            };
            v.round().to_integer()
        };
        let mut mantissa = scaled(exp10);
        let upper = num_traits::pow(ten.clone(), digits);
        let lower = num_traits::pow(ten.clone(), digits - 1);
        if mantissa >= upper {
            exp10 += 1;
            mantissa = scaled(exp10);
        } else if mantissa < lower {
            exp10 -= 1;
            mantissa = scaled(exp10);
        }
        let text = mantissa.to_string();
        let (lead, rest) = text.split_at(1);
        let sign = if negative { "-" } else { "" };
        if rest.is_empty() {
            format!("{sign}{lead}e{exp10}")
        } else {
            format!("{sign}{lead}.{rest}e{exp10}")
        }
    }
}

fn float_to_bigint(x: f64) -> BigInt {
    BigRational::from_float(x)
        .map(|q| q.to_integer())
        .unwrap_or_else(BigInt::zero)
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Self::from_f64(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::from_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_scientific(f.precision().unwrap_or(32)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: DoubleDouble, exact: &BigRational) -> f64 {
        let diff = (a.to_rational() - exact).abs() / exact.abs();
        diff.to_f64().unwrap()
    }

    fn parse_decimal(s: &str) -> BigRational {
        let (mant, exp) = match s.split_once('e') {
            Some((m, e)) => (m, e.parse::<i32>().unwrap()),
            None => (s, 0),
        };
        let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
        let digits: BigInt = format!("{int_part}{frac_part}").parse().unwrap();
        let scale = exp - frac_part.len() as i32;
        let ten = BigInt::from(10);
        if scale >= 0 {
            BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
        }
    }

    #[test]
    fn sqrt_two_squares_back() {
        let s = DoubleDouble::from_f64(2.0).sqrt();
        let sq = s.to_rational() * s.to_rational();
        let err = ((sq - BigRational::from_integer(2.into())).abs()).to_f64().unwrap();
        assert!(err < 1e-31, "{err}");
    }

    #[test]
    fn reference_values() {
        // 40-digit references computed with an independent multiprecision tool.
        let cases = [
            (DoubleDouble::from_f64(0.5).exp(), "1.648721270700128146848650787814163571654"),
            (DoubleDouble::from_f64(10.0).ln(), "2.302585092994045684017991454684364207601"),
            (DoubleDouble::from_f64(700.0).exp(), "1.014232054735004509455329595231267615205e304"),
            (DoubleDouble::from_f64(-600.0).exp(), "2.650396553004310816338679447269582701529e-261"),
        ];
        for (got, want) in cases {
            let want = parse_decimal(want);
            let err = rel_err(got, &want);
            assert!(err < 5e-30, "{got} vs {want}: {err}");
        }
    }

    #[test]
    fn constants_match_references() {
        let pi = parse_decimal("3.141592653589793238462643383279502884197");
        let e = parse_decimal("2.718281828459045235360287471352662497757");
        let ln2 = parse_decimal("0.6931471805599453094172321214581765680755");
        assert!(rel_err(DoubleDouble::PI, &pi) < 1e-32);
        assert!(rel_err(DoubleDouble::E, &e) < 1e-32);
        assert!(rel_err(DoubleDouble::LN_2, &ln2) < 1e-32);
        assert!(rel_err(DoubleDouble::ONE.exp(), &e) < 1e-30);
    }

    #[test]
    fn exp_ln_round_trip() {
        for &x in &[1e-280, 1e-10, 0.5, 1.0, 7.25, 1234.5, 1e200, 1e300] {
            let v = DoubleDouble::from_f64(x);
            let back = v.ln().exp();
            let exact = BigRational::from_float(x).unwrap();
            assert!(rel_err(back, &exact) < 1e-29, "x = {x}: {}", rel_err(back, &exact));
        }
    }

    #[test]
    fn division_and_rational_conversion() {
        let q = BigRational::new(BigInt::from(355), BigInt::from(113));
        let dd = DoubleDouble::from_rational(&q);
        assert!(rel_err(dd, &q) < 1e-32);
        let div = DoubleDouble::from_f64(355.0) / DoubleDouble::from_f64(113.0);
        assert!(rel_err(div, &q) < 1e-31);
        let huge: BigInt = num_traits::pow(BigInt::from(7), 300);
        let dd = DoubleDouble::from_bigint(&huge);
        assert!(rel_err(dd, &BigRational::from_integer(huge.clone())) < 1e-32);
        let ln = DoubleDouble::ln_bigint(&num_traits::pow(BigInt::from(3), 2000));
        let want = DoubleDouble::from_f64(3.0).ln().mul_f64(2000.0);
        assert!(((ln - want).to_f64() / want.to_f64()).abs() < 1e-30);
    }

    #[test]
    fn three_quarter_power() {
        // 639^(3/4) = 3 * sqrt(3) * 71^(3/4)
        let lhs = DoubleDouble::from_f64(639.0).pow_three_quarters();
        let rhs = DoubleDouble::from_f64(3.0)
            * DoubleDouble::from_f64(3.0).sqrt()
            * DoubleDouble::from_f64(71.0).pow_three_quarters();
        assert!(((lhs - rhs).to_f64() / lhs.to_f64()).abs() < 1e-30);
    }

    #[test]
    fn scientific_formatting() {
        assert_eq!(DoubleDouble::from_f64(1.5).to_scientific(3), "1.50e0");
        assert_eq!(DoubleDouble::from_f64(-0.000126).to_scientific(2), "-1.3e-4");
        assert_eq!(DoubleDouble::from_f64(9.999).to_scientific(2), "1.0e1");
        assert_eq!(DoubleDouble::PI.to_scientific(30), "3.14159265358979323846264338328e0");
    }
}
