use serde::Serialize;

use crate::error::{Error, Result};

/// One-sample Kolmogorov-Smirnov distance with its DKW 95% band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsEstimate {
    pub distance: f64,
    pub replicates: usize,
    pub dkw_95: f64,
}

/// `√(ln(2/α)/(2M))`: with probability at least `1 − α` the empirical CDF of
/// `M` draws stays within this distance of the true CDF.
pub fn dkw_band(replicates: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * replicates as f64)).sqrt()
}

/// `sup_x |F̂_M(x) − F(x)|` from the order statistics:
/// `max_i max(i/M − F(x_(i)), F(x_(i)) − (i−1)/M)`.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<KsEstimate> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(index) = sample.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput { index });
    }
    let mut sorted = sample.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut distance: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let above = (i + 1) as f64 / m - f;
        let below = f - i as f64 / m;
        distance = distance.max(above).max(below);
    }
    Ok(KsEstimate {
        distance: distance.clamp(0.0, 1.0),
        replicates: sorted.len(),
        dkw_95: dkw_band(sorted.len(), 0.05),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::normal_cdf;

    #[test]
    fn two_point_sample() {
        let ks = ks_distance(&[1.0, -1.0], normal_cdf).unwrap();
        assert!((ks.distance - 0.341_344_746_068_542_9).abs() < 1e-14);
        assert_eq!(ks.replicates, 2);
    }

    #[test]
    fn uniform_quantiles_equioscillate() {
        let m = 1000;
        let sample: Vec<f64> = (1..=m).map(|i| (i as f64 - 0.5) / m as f64).collect();
        let ks = ks_distance(&sample, |x| x).unwrap();
        assert!((ks.distance - 0.5 / m as f64).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_samples() {
        assert_eq!(ks_distance(&[], normal_cdf), Err(Error::EmptySample));
        assert_eq!(
            ks_distance(&[0.0, f64::INFINITY], normal_cdf),
            Err(Error::NonFiniteInput { index: 1 })
        );
    }

    #[test]
    fn dkw_value() {
        assert!((dkw_band(100_000, 0.05) - 0.004_294_694_083_467_375).abs() < 1e-15);
    }
}
