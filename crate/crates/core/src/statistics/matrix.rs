//! Transformation matrices between the moment tests and the orthonormal
//! Hermite basis, and the covariances they induce. Entries are signed square
//! roots of exact rationals, so each one carries a closed form next to its
//! numerical value.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermite::{factorial, gaussian_expectation, hermite_expansion, poly_mul, ExactPolynomial, GaussianMoment};
use crate::precision::DoubleDouble as Dd;

/// `±√square` for a non-negative rational `square`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radical {
    negative: bool,
    square: BigRational,
}

impl Radical {
    pub fn zero() -> Self {
        Self { negative: false, square: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self { negative: false, square: BigRational::one() }
    }

    /// `sign(negative)·√square`; panics on a negative `square`.
    pub fn new(negative: bool, square: BigRational) -> Self {
        assert!(!square.is_negative(), "radicand must be non-negative");
        let negative = negative && !square.is_zero();
        Self { negative, square }
    }

    /// The exact rational `q` written as `sign(q)·√(q²)`.
    pub fn from_rational(q: &BigRational) -> Self {
        Self::new(q.is_negative(), q * q)
    }

    /// `num / √den` for a positive `den`.
    pub fn ratio_over_sqrt(num: &BigRational, den: &BigRational) -> Self {
        Self::new(num.is_negative(), num * num / den)
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn square(&self) -> &BigRational {
        &self.square
    }

    pub fn value(&self) -> Dd {
        if self.square.is_zero() {
            return Dd::ZERO;
        }
        let v = Dd::from_rational(&self.square).sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64()
    }

    /// Closed form `±(a/b)·√r` with `r` square-free, e.g. `-3*sqrt(23)/23`.
    pub fn closed_form(&self) -> String {
        if self.square.is_zero() {
            return "0".into();
        }
        // √(p/q) = √(p·q)/q
        let p = self.square.numer();
        let q = self.square.denom();
        let (s, r) = split_square(&(p * q));
        let coeff = BigRational::new(s, q.clone());
        let sign = if self.negative { "-" } else { "" };
        let (a, b) = (coeff.numer(), coeff.denom());
        let mut out = String::from(sign);
        if r.is_one() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&format!("sqrt({r})"));
        } else {
            out.push_str(&format!("{a}*sqrt({r})"));
        }
        if !b.is_one() {
            out.push_str(&format!("/{b}"));
        }
        out
    }
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.closed_form())
    }
}

/// Writes `n = s²·r` with `r` free of square factors below 10⁴ (and not
/// itself a perfect square).
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut s = BigInt::one();
    let mut r = n.abs();
    let mut k = BigInt::from(2u32);
    let limit = BigInt::from(10_000u32);
    while k <= limit && &k * &k <= r {
        let kk = &k * &k;
        while (&r % &kk).is_zero() {
            r /= &kk;
            s *= &k;
        }
        k += 1u32;
    }
    let root = r.sqrt();
    if &root * &root == r {
        s *= root;
        r = BigInt::one();
    }
    (s, r)
}

/// A dense row-major matrix of radicals.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Radical>,
}

impl TransformMatrix {
    pub fn from_rows(rows: Vec<Vec<Radical>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Self { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Radical::one() } else { Radical::zero() }).collect())
            .collect();
        Self::from_rows(rows)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Zero-based access.
    pub fn radical(&self, i: usize, j: usize) -> &Radical {
        &self.entries[i * self.cols + j]
    }

    pub fn entry(&self, i: usize, j: usize) -> Dd {
        self.radical(i, j).value()
    }

    pub fn provenance(&self, i: usize, j: usize) -> String {
        self.radical(i, j).closed_form()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entry(i, j).to_f64()).collect())
            .collect()
    }

    /// `A·Aᵀ`, numerically.
    pub fn gram(&self) -> Vec<Vec<Dd>> {
        let vals: Vec<Dd> = self.entries.iter().map(Radical::value).collect();
        let mut out = vec![vec![Dd::ZERO; self.rows]; self.rows];
        for i in 0..self.rows {
            for j in 0..self.rows {
                let mut acc = Dd::ZERO;
                for k in 0..self.cols {
                    acc = acc + vals[i * self.cols + k] * vals[j * self.cols + k];
                }
                out[i][j] = acc;
            }
        }
        out
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::InvalidArgument(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a: Vec<Vec<Dd>> =
            (0..n).map(|i| (0..n).map(|j| self.entry(i, j)).collect()).collect();
        let mut det = Dd::ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| {
                    a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a[pivot][col].to_f64() == 0.0 {
                return Ok(0.0);
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det = det * a[col][col];
            for row in col + 1..n {
                let factor = a[row][col] / a[col][col];
                for k in col..n {
                    let t = a[col][k];
                    a[row][k] = a[row][k] - factor * t;
                }
            }
        }
        Ok(det.to_f64())
    }
}

impl Serialize for TransformMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let provenance: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.provenance(i, j)).collect())
            .collect();
        let mut st = s.serialize_struct("TransformMatrix", 3)?;
        st.serialize_field("shape", &[self.rows, self.cols])?;
        st.serialize_field("entries", &self.to_f64_rows())?;
        st.serialize_field("provenance", &provenance)?;
        st.end()
    }
}

/// The centred test polynomials `x³`, `x⁴−3`, `x⁵−10x³`, `x⁶−15x⁴+30`.
pub fn moment_test_polynomials() -> [ExactPolynomial; 4] {
    [
        ExactPolynomial::from_integers([0, 0, 0, 1]),
        ExactPolynomial::from_integers([-3, 0, 0, 0, 1]),
        ExactPolynomial::from_integers([0, 0, 0, -10, 0, 1]),
        ExactPolynomial::from_integers([30, 0, 0, 0, -15, 0, 1]),
    ]
}

/// Row `k`: the standardized `k`-th test polynomial in the basis
/// `(φ_1, …, φ_width)`.
fn standardized_rows(width: usize) -> Vec<Vec<Radical>> {
    moment_test_polynomials()
        .iter()
        .map(|p| {
            let variance = gaussian_expectation(&poly_mul(p, p));
            let coeffs = hermite_expansion(p);
            (1..=width)
                .map(|q| {
                    let a = coeffs.get(q).cloned().unwrap_or_else(BigRational::zero);
                    let fq = BigRational::from_integer(factorial(q as u64));
                    // a·H_q/√v = a·√(q!)·φ_q/√v
                    Radical::new(a.is_negative(), &a * &a * fq / &variance)
                })
                .collect()
        })
        .collect()
}

fn unit_row(width: usize, at: usize) -> Vec<Radical> {
    (0..width).map(|j| if j == at { Radical::one() } else { Radical::zero() }).collect()
}

/// `Δ` (4×4): the third- and fourth-moment components in `(φ_1..φ_4)`,
/// padded with `e_3`, `e_4`.
pub fn sb_delta() -> TransformMatrix {
    let mut rows: Vec<Vec<Radical>> = standardized_rows(4).into_iter().take(2).collect();
    rows.push(unit_row(4, 2));
    rows.push(unit_row(4, 3));
    TransformMatrix::from_rows(rows)
}

/// `Δ̃` (6×6): the four HM4 components in `(φ_1..φ_6)`, padded with `e_5`,
/// `e_6`.
pub fn hm4_delta() -> TransformMatrix {
    let mut rows = standardized_rows(6);
    rows.push(unit_row(6, 4));
    rows.push(unit_row(6, 5));
    TransformMatrix::from_rows(rows)
}

/// Exact 4×4 covariance of the HM4 components,
/// `E[p_i p_j]/√(E[p_i²]E[p_j²])`, from Gaussian moments in the monomial
/// basis.
pub fn hm4_sigma_symbolic() -> TransformMatrix {
    let polys = moment_test_polynomials();
    let variances: Vec<BigRational> =
        polys.iter().map(|p| gaussian_expectation(&poly_mul(p, p))).collect();
    let rows = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    let cov = gaussian_expectation(&poly_mul(&polys[i], &polys[j]));
                    Radical::ratio_over_sqrt(&cov, &(&variances[i] * &variances[j]))
                })
                .collect()
        })
        .collect();
    TransformMatrix::from_rows(rows)
}

fn printed_entry(negative: bool, num: i64, den: i64) -> Radical {
    Radical::new(negative, BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// The HM4 covariance as printed: `-3√23/23` at (1,3), `-3√115/46` at
/// (2,3), `45√3657/4876` at (3,4), zero at (2,4).
pub fn hm4_sigma_printed() -> TransformMatrix {
    let a13 = printed_entry(true, 9 * 23, 23 * 23);
    let a23 = printed_entry(true, 9 * 115, 46 * 46);
    let a34 = printed_entry(false, 45 * 45 * 3657, 4876 * 4876);
    let z = Radical::zero;
    let o = Radical::one;
    TransformMatrix::from_rows(vec![
        vec![o(), z(), a13.clone(), z()],
        vec![z(), o(), a23.clone(), z()],
        vec![a13, a23, o(), a34.clone()],
        vec![z(), z(), a34, o()],
    ])
}

/// One off-diagonal comparison between the derived and the printed `Σ̃`.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaDiffEntry {
    /// One-based row.
    pub i: usize,
    /// One-based column.
    pub j: usize,
    pub symbolic: f64,
    pub printed: f64,
    pub difference: f64,
    pub symbolic_form: String,
    pub printed_form: String,
    pub agrees: bool,
}

/// Entrywise comparison of [`hm4_sigma_symbolic`] against
/// [`hm4_sigma_printed`] over the upper triangle.
pub fn sigma_adjudication() -> Vec<SigmaDiffEntry> {
    let sym = hm4_sigma_symbolic();
    let printed = hm4_sigma_printed();
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i..4 {
            let (a, b) = (sym.radical(i, j), printed.radical(i, j));
            let (sv, pv) = (a.to_f64(), b.to_f64());
            out.push(SigmaDiffEntry {
                i: i + 1,
                j: j + 1,
                symbolic: sv,
                printed: pv,
                difference: sv - pv,
                symbolic_form: a.closed_form(),
                printed_form: b.closed_form(),
                agrees: a == b,
            });
        }
    }
    out
}

/// Exact covariance of the raw-moment statistic components
/// `(x^q − m_q)/√((2q−1)!! − m_q²)`, `q = 1..=d`.
pub fn raw_moment_covariance(d: usize) -> Result<TransformMatrix> {
    if d == 0 {
        return Err(Error::OrderTooSmall { min: 1, got: 0 });
    }
    let moment = |k: usize| BigRational::from_integer(GaussianMoment::new(k as u32).value);
    let m: Vec<BigRational> = (0..=d).map(moment).collect();
    let var: Vec<BigRational> = (0..=d).map(|q| moment(2 * q) - &m[q] * &m[q]).collect();
    let rows = (1..=d)
        .map(|i| {
            (1..=d)
                .map(|j| {
                    let cov = moment(i + j) - &m[i] * &m[j];
                    Radical::ratio_over_sqrt(&cov, &(&var[i] * &var[j]))
                })
                .collect()
        })
        .collect();
    Ok(TransformMatrix::from_rows(rows))
}
