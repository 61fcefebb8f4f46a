//! Exact algebra for the probabilists' Hermite polynomials and a stable
//! evaluator for their normalized versions `φ_q = H_q / √(q!)`.
//!
//! The exact side works over arbitrary-precision rationals so that Gaussian
//! expectations of products (orthogonality, fourth moments, variance
//! normalizers) are computed without rounding. The numeric side never forms
//! `H_q(x)` itself; it runs the normalized three-term recurrence, which stays
//! in range long after `H_q(x)` would overflow.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::montecarlo::rng::RandomStream;

/// Dense univariate polynomial with exact rational coefficients.
///
/// `coeffs()[k]` is the coefficient of `x^k`; trailing zeros are trimmed, so
/// the zero polynomial has no coefficients at all.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExactPolynomial {
    coeffs: Vec<BigRational>,
}

impl ExactPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_integers<I, T>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::new(
            coeffs
                .into_iter()
                .map(|c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `c · x^k`.
    pub fn monomial(k: usize, c: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn x() -> Self {
        Self::monomial(1, BigRational::one())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| poly_mul(&acc, self))
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Horner evaluation in double precision.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for ExactPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let show_coeff = !(mag.is_one() && k > 0);
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn add(self, rhs: Self) -> ExactPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ExactPolynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn sub(self, rhs: Self) -> ExactPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn neg(self) -> ExactPolynomial {
        ExactPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn mul(self, rhs: Self) -> ExactPolynomial {
        poly_mul(self, rhs)
    }
}

/// Exact product by schoolbook convolution.
pub fn poly_mul(p: &ExactPolynomial, r: &ExactPolynomial) -> ExactPolynomial {
    if p.is_zero() || r.is_zero() {
        return ExactPolynomial::zero();
    }
    let mut out = vec![BigRational::zero(); p.coeffs.len() + r.coeffs.len() - 1];
    for (i, a) in p.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in r.coeffs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    ExactPolynomial::new(out)
}

/// `q!` as a big integer.
pub fn factorial(q: u64) -> BigInt {
    (1..=q).fold(BigInt::one(), |acc, k| acc * k)
}

/// `q!!`, with `0!! = (-1)!! = 1`.
pub fn double_factorial(q: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = q;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `E[G^order]` for a standard normal `G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaussianMoment {
    pub order: u32,
    #[serde(serialize_with = "serialize_bigint")]
    pub value: BigInt,
}

impl GaussianMoment {
    pub fn new(order: u32) -> Self {
        let value = if order % 2 == 1 {
            BigInt::zero()
        } else {
            double_factorial(order as i64 - 1)
        };
        Self { order, value }
    }
}

pub(crate) fn serialize_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Coefficients of the probabilists' Hermite polynomial `H_q`, from
/// `H_{q+1} = x·H_q − q·H_{q−1}`.
pub fn hermite_coeffs(q: u32) -> ExactPolynomial {
    hermite_family(q).pop().expect("family is non-empty")
}

/// `[H_0, H_1, …, H_q_max]`.
pub fn hermite_family(q_max: u32) -> Vec<ExactPolynomial> {
    let mut prev: Vec<BigInt> = vec![BigInt::one()];
    let mut family = vec![ExactPolynomial::from_integers(prev.clone())];
    if q_max == 0 {
        return family;
    }
    let mut cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    family.push(ExactPolynomial::from_integers(cur.clone()));
    for q in 1..q_max {
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += c;
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= c * q;
        }
        prev = std::mem::replace(&mut cur, next);
        family.push(ExactPolynomial::from_integers(cur.clone()));
    }
    family
}

/// `E[p(G)]` for `G ~ N(0, 1)`, exact.
pub fn gaussian_expectation(p: &ExactPolynomial) -> BigRational {
    p.coeffs()
        .iter()
        .enumerate()
        .step_by(2)
        .fold(BigRational::zero(), |acc, (k, c)| {
            acc + c * BigRational::from_integer(GaussianMoment::new(k as u32).value)
        })
}

/// `E[H_q(G)^4]` by expanding `H_q^4` and integrating monomials.
pub fn hermite_fourth_moment(q: u32) -> BigInt {
    let h = hermite_coeffs(q);
    let h2 = poly_mul(&h, &h);
    let value = gaussian_expectation(&poly_mul(&h2, &h2));
    debug_assert!(value.is_integer());
    value.to_integer()
}

/// `E[H_q(G)^4]` from the linearization identity
/// `Σ_{r=0}^{q} (r!)² C(q,r)⁴ (2q−2r)!`.
pub fn hermite_fourth_moment_linearized(q: u32) -> BigInt {
    let q = q as u64;
    (0..=q)
        .map(|r| {
            let f = factorial(r);
            let c = binomial(q, r);
            &f * &f * c.pow(4) * factorial(2 * q - 2 * r)
        })
        .sum()
}

/// Decomposes `p` in the Hermite basis: returns `a_q` with `p = Σ a_q H_q`,
/// using `a_q = E[p·H_q] / q!`.
pub fn hermite_expansion(p: &ExactPolynomial) -> Vec<BigRational> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    hermite_family(deg as u32)
        .iter()
        .enumerate()
        .map(|(q, h)| {
            gaussian_expectation(&poly_mul(p, h)) / BigRational::from_integer(factorial(q as u64))
        })
        .collect()
}

/// Evaluates `φ_0(x), …, φ_d(x)` with
/// `φ_{q+1} = (x·φ_q − √q·φ_{q−1}) / √(q+1)`.
#[derive(Clone, Debug)]
pub struct NormalizedHermiteEvaluator {
    max_order: usize,
    // inv_sqrt[q] = 1/√(q+1), ratio[q] = √(q/(q+1))
    inv_sqrt: Vec<f64>,
    ratio: Vec<f64>,
    values: Vec<f64>,
}

impl NormalizedHermiteEvaluator {
    pub fn new(max_order: usize) -> Self {
        let inv_sqrt = (0..max_order).map(|q| 1.0 / ((q + 1) as f64).sqrt()).collect();
        let ratio = (0..max_order)
            .map(|q| (q as f64 / (q + 1) as f64).sqrt())
            .collect();
        Self {
            max_order,
            inv_sqrt,
            ratio,
            values: vec![0.0; max_order + 1],
        }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// `[φ_0(x), …, φ_d(x)]`.
    pub fn eval(&mut self, x: f64) -> &[f64] {
        self.values[0] = 1.0;
        if self.max_order >= 1 {
            self.values[1] = x;
        }
        for q in 1..self.max_order {
            self.values[q + 1] =
                x * self.values[q] * self.inv_sqrt[q] - self.ratio[q] * self.values[q - 1];
        }
        &self.values
    }

    /// `φ_d(x)` only, without touching the workspace.
    #[inline]
    pub fn eval_top(&self, x: f64) -> f64 {
        if self.max_order == 0 {
            return 1.0;
        }
        let (mut prev, mut cur) = (1.0, x);
        for q in 1..self.max_order {
            let next = x * cur * self.inv_sqrt[q] - self.ratio[q] * prev;
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// `(φ_1(x), …, φ_d(x))`.
pub fn eval_normalized(x: f64, d: usize) -> Vec<f64> {
    let mut ev = NormalizedHermiteEvaluator::new(d);
    ev.eval(x)[1..].to_vec()
}

/// A Monte-Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Estimates `E[|H_q(G)|³]` from `sample_count` standard normals drawn from
/// `rng`. `q = 0` is answered exactly.
pub fn abs_third_moment_mc(q: u32, sample_count: usize, rng: &mut RandomStream) -> McEstimate {
    if q == 0 {
        return McEstimate {
            mean: 1.0,
            std_error: 0.0,
            samples: sample_count,
        };
    }
    let ev = NormalizedHermiteEvaluator::new(q as usize);
    let scale = factorial(q as u64).to_f64().unwrap_or(f64::INFINITY).sqrt();
    // Welford accumulation.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..sample_count {
        let h = ev.eval_top(rng.next_normal()) * scale;
        let v = h.abs().powi(3);
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = if sample_count > 1 {
        m2 / (sample_count - 1) as f64
    } else {
        0.0
    };
    McEstimate {
        mean,
        std_error: (var / sample_count.max(1) as f64).sqrt(),
        samples: sample_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn low_order_coefficients() {
        assert_eq!(hermite_coeffs(0), ExactPolynomial::from_integers([1]));
        assert_eq!(hermite_coeffs(2), ExactPolynomial::from_integers([-1, 0, 1]));
        assert_eq!(hermite_coeffs(4), ExactPolynomial::from_integers([3, 0, -6, 0, 1]));
        assert_eq!(hermite_coeffs(4).to_string(), "x^4 - 6x^2 + 3");
    }

    #[test]
    fn multiplication_examples() {
        let x = ExactPolynomial::x();
        assert_eq!(poly_mul(&x, &x), ExactPolynomial::monomial(2, int(1)));
        let h2 = hermite_coeffs(2);
        assert_eq!(poly_mul(&h2, &h2), ExactPolynomial::from_integers([1, 0, -2, 0, 1]));
        let h3 = hermite_coeffs(3);
        assert_eq!(
            poly_mul(&h3, &h3),
            ExactPolynomial::from_integers([0, 0, 9, 0, -6, 0, 1])
        );
        assert_eq!(poly_mul(&h3, &ExactPolynomial::zero()), ExactPolynomial::zero());
        assert_eq!(poly_mul(&h3, &h2).degree(), Some(5));
    }

    #[test]
    fn zero_polynomial_is_trimmed() {
        let p = ExactPolynomial::from_integers([0, 0, 0]);
        assert!(p.coeffs().is_empty());
        assert_eq!(p.degree(), None);
        let h = hermite_coeffs(3);
        assert!((&h - &h).is_zero());
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(gaussian_expectation(&ExactPolynomial::monomial(2, int(1))), int(1));
        assert_eq!(gaussian_expectation(&ExactPolynomial::monomial(4, int(1))), int(3));
        let h3 = hermite_coeffs(3);
        assert_eq!(gaussian_expectation(&poly_mul(&h3, &h3)), int(6));
    }

    #[test]
    fn gaussian_moment_table() {
        assert_eq!(GaussianMoment::new(0).value, BigInt::from(1));
        assert_eq!(GaussianMoment::new(5).value, BigInt::from(0));
        assert_eq!(GaussianMoment::new(8).value, BigInt::from(105));
        // (2m)! / (2^m m!) for m = 6
        let m = 6u64;
        let closed = factorial(2 * m) / (BigInt::from(1u64 << m) * factorial(m));
        assert_eq!(GaussianMoment::new(12).value, closed);
    }

    #[test]
    fn fourth_moment_small_orders() {
        assert_eq!(hermite_fourth_moment(0), BigInt::from(1));
        assert_eq!(hermite_fourth_moment(1), BigInt::from(3));
        assert_eq!(hermite_fourth_moment(2), BigInt::from(60));
        assert_eq!(hermite_fourth_moment_linearized(2), BigInt::from(60));
    }

    #[test]
    fn normalized_evaluation_examples() {
        assert_eq!(eval_normalized(2.0, 1), vec![2.0]);
        let v = eval_normalized(0.0, 2);
        assert_eq!(v[0], 0.0);
        assert!((v[1] + 1.0 / 2f64.sqrt()).abs() < 1e-15);
        let v = eval_normalized(2.0, 3);
        assert!((v[1] - 3.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((v[2] - 2.0 / 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn top_order_matches_full_pass() {
        let mut full = NormalizedHermiteEvaluator::new(9);
        let top = NormalizedHermiteEvaluator::new(9);
        for &x in &[-3.5, -0.2, 0.0, 1.7, 6.0] {
            assert_eq!(full.eval(x)[9], top.eval_top(x));
        }
    }

    #[test]
    fn hermite_expansion_recovers_coefficients() {
        // x^3 = H_3 + 3 H_1
        let a = hermite_expansion(&ExactPolynomial::monomial(3, int(1)));
        assert_eq!(a, vec![int(0), int(3), int(0), int(1)]);
    }

    #[test]
    fn third_moment_mc_basics() {
        let mut rng = RandomStream::new(5, 0);
        let est = abs_third_moment_mc(0, 10, &mut rng);
        assert_eq!((est.mean, est.std_error), (1.0, 0.0));
        let est = abs_third_moment_mc(1, 400_000, &mut rng);
        let exact = 2.0 * (2.0 / std::f64::consts::PI).sqrt();
        assert!((est.mean - exact).abs() < 3.0 * est.std_error, "{est:?}");
        let est = abs_third_moment_mc(2, 400_000, &mut rng);
        let ratio = est.mean / 2f64.powf(1.5);
        let band = 3.0 * est.std_error / 2f64.powf(1.5);
        assert!(ratio >= 1.0 - band && ratio <= 8.0 + band, "{ratio}");
    }
}
