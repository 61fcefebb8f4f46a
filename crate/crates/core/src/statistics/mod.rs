//! Moment and Hermite test statistics for Gaussianity with known mean and
//! variance.
//!
//! Sums over the sample are accumulated in fixed chunks of [`CHUNK_SIZE`]
//! points and the chunk partials are combined left to right, so every result
//! is bit-identical whatever the size of the thread pool.

mod distributions;
mod matrix;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermite::{GaussianMoment, NormalizedHermiteEvaluator};
use crate::montecarlo::RandomStream;
use crate::precision::DoubleDouble as Dd;

pub use distributions::{chi2_cdf, chi2_sf, erfc, ln_gamma, normal_cdf, regularized_gamma_q};
pub use matrix::{
    hm4_delta, hm4_sigma_printed, hm4_sigma_symbolic, moment_test_polynomials,
    raw_moment_covariance, sb_delta, sigma_adjudication, Radical, SigmaDiffEntry, TransformMatrix,
};

pub const CHUNK_SIZE: usize = 4096;

/// Exact `E[p²]` of the four test polynomials under the null.
pub const MOMENT_VARIANCES: [u32; 4] = [15, 96, 345, 4770];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Basis {
    RawMoment,
    Hermite,
}

/// A standardized `d`-dimensional statistic `n^{-1/2} Σ_k f(x_k)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatisticVector {
    pub values: Vec<f64>,
    pub n: usize,
    pub d: usize,
    pub basis: Basis,
}

impl StatisticVector {
    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestName {
    HT,
    SB,
    HM4,
    M5,
    M6,
    HM2,
}

impl TestName {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestName::HT => "ht",
            TestName::SB => "sb",
            TestName::HM4 => "hm4",
            TestName::M5 => "m5",
            TestName::M6 => "m6",
            TestName::HM2 => "hm2",
        }
    }
}

/// Limit law of a statistic under the null.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reference {
    ChiSquare { df: u32 },
    /// `‖Z‖²` for `Z ~ N(0, covariance)`.
    GaussianQuadraticForm { covariance: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum PValueMethod {
    LimitLaw,
    MonteCarlo { replicates: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestResult {
    pub name: TestName,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub statistic: f64,
    pub components: Vec<f64>,
    pub reference: Reference,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value_method: Option<PValueMethod>,
}

impl TestResult {
    fn chi_square(name: TestName, n: usize, d: Option<usize>, components: Vec<f64>) -> Result<Self> {
        let statistic: f64 = components.iter().map(|c| c * c).sum();
        let df = components.len() as u32;
        if !statistic.is_finite() {
            return Err(Error::NonFinite(format!("{} statistic", name.as_str())));
        }
        Ok(Self {
            name,
            n,
            d,
            statistic,
            components,
            reference: Reference::ChiSquare { df },
            p_value: Some(chi2_sf(statistic, df)?),
            p_value_method: Some(PValueMethod::LimitLaw),
        })
    }
}

fn validate(data: &[f64]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(index) = data.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput { index });
    }
    Ok(())
}

/// Sums `width` per-point features over `data` in fixed chunks.
fn chunked_sums<F>(data: &[f64], width: usize, chunk_sums: F) -> Vec<f64>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let partials: Vec<Vec<f64>> = data
        .par_chunks(CHUNK_SIZE)
        .map(|chunk| {
            let mut acc = vec![0.0; width];
            chunk_sums(chunk, &mut acc);
            acc
        })
        .collect();
    let mut total = vec![0.0; width];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// `(n^{-1/2} Σ_k φ_q(x_k))_{q=1..d}`.
pub fn hermite_vector(data: &[f64], d: usize) -> Result<StatisticVector> {
    validate(data)?;
    if d == 0 {
        return Err(Error::OrderTooSmall { min: 1, got: 0 });
    }
    let sums = chunked_sums(data, d, |chunk, acc| {
        let mut ev = NormalizedHermiteEvaluator::new(d);
        for &x in chunk {
            for (a, v) in acc.iter_mut().zip(&ev.eval(x)[1..]) {
                *a += v;
            }
        }
    });
    let scale = (data.len() as f64).sqrt();
    Ok(StatisticVector {
        values: sums.into_iter().map(|s| s / scale).collect(),
        n: data.len(),
        d,
        basis: Basis::Hermite,
    })
}

/// `(n^{-1/2} Σ_k (x_k^q − m_q)/√((2q−1)!! − m_q²))_{q=1..d}` with
/// `m_q = E[G^q]`.
pub fn raw_moment_vector(data: &[f64], d: usize) -> Result<StatisticVector> {
    validate(data)?;
    if d == 0 {
        return Err(Error::OrderTooSmall { min: 1, got: 0 });
    }
    let mut means = Vec::with_capacity(d);
    let mut norms = Vec::with_capacity(d);
    for q in 1..=d as u32 {
        let m = GaussianMoment::new(q).value;
        let var = GaussianMoment::new(2 * q).value - &m * &m;
        let norm = Dd::from_bigint(&var).sqrt().to_f64();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "raw-moment normalizer for order {q} is not a positive finite number"
            )));
        }
        means.push(Dd::from_bigint(&m).to_f64());
        norms.push(norm);
    }
    let sums = chunked_sums(data, d, |chunk, acc| {
        for &x in chunk {
            let mut p = 1.0;
            for (a, m) in acc.iter_mut().zip(&means) {
                p *= x;
                *a += p - m;
            }
        }
    });
    let scale = (data.len() as f64).sqrt();
    let values: Vec<f64> = sums.iter().zip(&norms).map(|(s, v)| s / (v * scale)).collect();
    if let Some(q) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("raw-moment component of order {}", q + 1)));
    }
    Ok(StatisticVector { values, n: data.len(), d, basis: Basis::RawMoment })
}

fn moment_scales(n: usize) -> [f64; 4] {
    let root_n = (n as f64).sqrt();
    MOMENT_VARIANCES.map(|v| 1.0 / ((v as f64).sqrt() * root_n))
}

/// The four HM4 components from raw powers:
/// `n^{-1/2}Σ x³/√15`, `n^{-1/2}Σ (x⁴−3)/√96`, `n^{-1/2}Σ (x⁵−10x³)/√345`,
/// `n^{-1/2}Σ (x⁶−15x⁴+30)/√4770`.
pub fn moment_components(data: &[f64]) -> Result<[f64; 4]> {
    validate(data)?;
    let sums = chunked_sums(data, 4, |chunk, acc| {
        for &x in chunk {
            let x2 = x * x;
            let x3 = x2 * x;
            let x4 = x2 * x2;
            acc[0] += x3;
            acc[1] += x4 - 3.0;
            acc[2] += x4 * x - 10.0 * x3;
            acc[3] += x4 * x2 - 15.0 * x4 + 30.0;
        }
    });
    let scales = moment_scales(data.len());
    finite_components([0, 1, 2, 3].map(|k| sums[k] * scales[k]))
}

/// Same as [`moment_components`], through
/// `x³ = H₃+3H₁`, `x⁴−3 = H₄+6H₂`, `x⁵−10x³ = H₅−15H₁`, `x⁶−15x⁴+30 = H₆−45H₂`.
pub fn moment_components_hermite(data: &[f64]) -> Result<[f64; 4]> {
    validate(data)?;
    // H_q = √(q!)·φ_q
    let s2 = 2f64.sqrt();
    let (s6, s24, s120, s720) = (6f64.sqrt(), 24f64.sqrt(), 120f64.sqrt(), 720f64.sqrt());
    let sums = chunked_sums(data, 4, |chunk, acc| {
        let mut ev = NormalizedHermiteEvaluator::new(6);
        for &x in chunk {
            let phi = ev.eval(x);
            let (h1, h2) = (phi[1], s2 * phi[2]);
            acc[0] += s6 * phi[3] + 3.0 * h1;
            acc[1] += s24 * phi[4] + 6.0 * h2;
            acc[2] += s120 * phi[5] - 15.0 * h1;
            acc[3] += s720 * phi[6] - 45.0 * h2;
        }
    });
    let scales = moment_scales(data.len());
    finite_components([0, 1, 2, 3].map(|k| sums[k] * scales[k]))
}

fn finite_components(c: [f64; 4]) -> Result<[f64; 4]> {
    if c.iter().all(|v| v.is_finite()) {
        Ok(c)
    } else {
        Err(Error::NonFinite("moment component overflowed".into()))
    }
}

/// `R^HT = ‖hermite_vector(data, d)‖²`, limit `χ²(d)`.
pub fn ht_statistic(data: &[f64], d: usize) -> Result<TestResult> {
    let v = hermite_vector(data, d)?;
    TestResult::chi_square(TestName::HT, v.n, Some(d), v.values)
}

/// Skewness-kurtosis statistic, limit `χ²(2)`.
pub fn sb_statistic(data: &[f64]) -> Result<TestResult> {
    let c = moment_components(data)?;
    TestResult::chi_square(TestName::SB, data.len(), None, c[..2].to_vec())
}

/// `M5`, limit `χ²(1)`.
pub fn m5_statistic(data: &[f64]) -> Result<TestResult> {
    let c = moment_components(data)?;
    TestResult::chi_square(TestName::M5, data.len(), None, vec![c[2]])
}

/// `M6`, limit `χ²(1)`.
pub fn m6_statistic(data: &[f64]) -> Result<TestResult> {
    let c = moment_components(data)?;
    TestResult::chi_square(TestName::M6, data.len(), None, vec![c[3]])
}

/// `HM2 = M5 + M6`, limit `χ²(2)`.
pub fn hm2_statistic(data: &[f64]) -> Result<TestResult> {
    let c = moment_components(data)?;
    TestResult::chi_square(TestName::HM2, data.len(), None, c[2..].to_vec())
}

/// Sum of the four squared components. The limit is a quadratic form in a
/// correlated Gaussian, not `χ²(4)`, so no p-value is attached.
pub fn hm4_statistic(data: &[f64]) -> Result<TestResult> {
    hm4_from_components(data.len(), moment_components(data)?)
}

fn hm4_from_components(n: usize, c: [f64; 4]) -> Result<TestResult> {
    let statistic: f64 = c.iter().map(|v| v * v).sum();
    if !statistic.is_finite() {
        return Err(Error::NonFinite("hm4 statistic".into()));
    }
    Ok(TestResult {
        name: TestName::HM4,
        n,
        d: None,
        statistic,
        components: c.to_vec(),
        reference: Reference::GaussianQuadraticForm {
            covariance: hm4_sigma_symbolic().to_f64_rows(),
        },
        p_value: None,
        p_value_method: None,
    })
}

/// `P(‖Δ̃g‖² ≥ statistic)` for `g ~ N(0, I₆)`, estimated with `replicates`
/// draws as `(1 + #exceedances)/(1 + replicates)`. Replicate `r` uses stream
/// `(seed, r)`.
pub fn hm4_mc_pvalue(statistic: f64, replicates: u64, seed: u64) -> Result<f64> {
    if replicates == 0 {
        return Err(Error::ZeroSampleSize);
    }
    if !statistic.is_finite() {
        return Err(Error::NonFinite("hm4 statistic".into()));
    }
    let delta = hm4_delta().to_f64_rows();
    let rows: Vec<[f64; 6]> = delta[..4]
        .iter()
        .map(|r| [r[0], r[1], r[2], r[3], r[4], r[5]])
        .collect();
    let exceed: u64 = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = RandomStream::new(seed, r);
            let mut g = [0.0; 6];
            rng.fill_normal(&mut g);
            let q: f64 = rows
                .iter()
                .map(|row| {
                    let z: f64 = row.iter().zip(&g).map(|(a, b)| a * b).sum();
                    z * z
                })
                .sum();
            u64::from(q >= statistic)
        })
        .sum();
    Ok((exceed + 1) as f64 / (replicates + 1) as f64)
}

/// Attaches a Monte-Carlo p-value to an HM4 result.
pub fn with_hm4_mc_pvalue(mut result: TestResult, replicates: u64, seed: u64) -> Result<TestResult> {
    if result.name != TestName::HM4 {
        return Err(Error::InvalidArgument(
            "Monte-Carlo p-values are only offered for hm4".into(),
        ));
    }
    result.p_value = Some(hm4_mc_pvalue(result.statistic, replicates, seed)?);
    result.p_value_method = Some(PValueMethod::MonteCarlo { replicates, seed });
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn hermite_vector_examples() {
        let n = 50;
        let v = hermite_vector(&vec![0.0; n], 2).unwrap();
        assert_eq!(v.values[0], 0.0);
        assert!(close(v.values[1], -(n as f64 / 2.0).sqrt(), 1e-15));

        let v = hermite_vector(&[1.0], 3).unwrap();
        assert!(close(v.values[0], 1.0, 1e-15));
        assert!(v.values[1].abs() < 1e-15);
        assert!(close(v.values[2], -2.0 / 6f64.sqrt(), 1e-15));
        assert_eq!(v.basis, Basis::Hermite);

        assert_eq!(hermite_vector(&[], 2), Err(Error::EmptySample));
        assert_eq!(hermite_vector(&[1.0, f64::NAN], 2), Err(Error::NonFiniteInput { index: 1 }));
        assert!(hermite_vector(&[1.0], 0).is_err());
    }

    #[test]
    fn raw_vector_examples() {
        let x = 1.7;
        let v = raw_moment_vector(&[x], 4).unwrap();
        assert!(close(v.values[0], x, 1e-15));
        assert!(close(v.values[1], (x * x - 1.0) / 2f64.sqrt(), 1e-15));
        assert!(close(v.values[2], x.powi(3) / 15f64.sqrt(), 1e-15));
        assert!(close(v.values[3], (x.powi(4) - 3.0) / 96f64.sqrt(), 1e-15));
    }

    #[test]
    fn statistic_examples() {
        let n = 40;
        let zeros = vec![0.0; n];
        let sb = sb_statistic(&zeros).unwrap();
        assert!(close(sb.statistic, 3.0 * n as f64 / 32.0, 1e-14));
        let sb1 = sb_statistic(&[1.0]).unwrap();
        assert!(close(sb1.statistic, 1.0 / 15.0 + 1.0 / 24.0, 1e-15));
        assert_eq!(m5_statistic(&zeros).unwrap().statistic, 0.0);
        assert!(close(m6_statistic(&zeros).unwrap().statistic, 900.0 * n as f64 / 4770.0, 1e-14));
        let c = moment_components(&[1.0]).unwrap();
        assert!(close(c[2], -9.0 / 345f64.sqrt(), 1e-15));

        let ht = ht_statistic(&zeros, 2).unwrap();
        assert!(close(ht.statistic, n as f64 / 2.0, 1e-14));
        let ht1 = ht_statistic(&vec![0.3; n], 1).unwrap();
        assert!(close(ht1.statistic, n as f64 * 0.09, 1e-14));
        assert_eq!(ht1.reference, Reference::ChiSquare { df: 1 });

        let hm2 = hm2_statistic(&[0.4, -1.2, 2.0]).unwrap();
        let m5 = m5_statistic(&[0.4, -1.2, 2.0]).unwrap();
        let m6 = m6_statistic(&[0.4, -1.2, 2.0]).unwrap();
        assert!(close(hm2.statistic, m5.statistic + m6.statistic, 1e-15));
        assert_eq!(hm2.reference, Reference::ChiSquare { df: 2 });
    }

    #[test]
    fn hm4_has_no_limit_p_value() {
        let r = hm4_statistic(&[0.1, 0.5, -2.0]).unwrap();
        assert!(r.p_value.is_none());
        assert!(matches!(r.reference, Reference::GaussianQuadraticForm { .. }));
        let with = with_hm4_mc_pvalue(r.clone(), 2000, 1).unwrap();
        let p = with.p_value.unwrap();
        assert!(p > 0.0 && p <= 1.0);
        assert_eq!(with_hm4_mc_pvalue(r, 2000, 1).unwrap().p_value, Some(p));
    }

    #[test]
    fn hm4_mc_pvalue_is_calibrated_at_the_mean() {
        // E‖Z‖² = trace Σ = 4; a huge statistic is almost never exceeded.
        assert!(hm4_mc_pvalue(1e6, 1000, 3).unwrap() < 0.002);
        assert_eq!(hm4_mc_pvalue(0.0, 1000, 3).unwrap(), 1.0);
    }

    #[test]
    fn chunking_does_not_depend_on_pool_size() {
        let mut rng = RandomStream::new(5, 0);
        let data: Vec<f64> = (0..3 * CHUNK_SIZE + 17).map(|_| rng.next_normal()).collect();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| hermite_vector(&data, 6).unwrap());
        let b = four.install(|| hermite_vector(&data, 6).unwrap());
        assert_eq!(a, b);
    }
}
