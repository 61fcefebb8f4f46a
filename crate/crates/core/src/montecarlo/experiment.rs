use rayon::prelude::*;
use serde::Serialize;

use super::ks::{ks_distance, KsEstimate};
use super::rng::RandomStream;
use crate::bounds::thm1_upper;
use crate::error::{Error, Result};
use crate::hermite::NormalizedHermiteEvaluator;
use crate::statistics::normal_cdf;

/// One draw of `S_{n,d} = n^{-1/2} Σ_k φ_d(g_k)` from `n` fresh normals.
pub fn simulate_snd(n: usize, d: usize, rng: &mut RandomStream) -> f64 {
    let ev = NormalizedHermiteEvaluator::new(d);
    let mut sum = 0.0;
    for _ in 0..n {
        sum += ev.eval_top(rng.next_normal());
    }
    sum / (n as f64).sqrt()
}

/// `(S_{n,1}, …, S_{n,d_max})` from one set of `n` normals. Entry `d − 1`
/// is bit-identical to [`simulate_snd`] with `d` on the same stream.
pub fn simulate_snd_orders(n: usize, d_max: usize, rng: &mut RandomStream) -> Vec<f64> {
    let mut ev = NormalizedHermiteEvaluator::new(d_max);
    let mut sums = vec![0.0; d_max];
    for _ in 0..n {
        let phi = ev.eval(rng.next_normal());
        for (s, v) in sums.iter_mut().zip(&phi[1..]) {
            *s += v;
        }
    }
    let scale = (n as f64).sqrt();
    sums.iter().map(|s| s / scale).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub d_min: usize,
    pub d_max: usize,
    pub replicates: usize,
    pub seed: u64,
    /// Worker threads; `0` uses every available core.
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 100_000,
            d_min: 2,
            d_max: 8,
            replicates: 100_000,
            seed: 42,
            threads: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::ZeroSampleSize);
        }
        if self.d_min == 0 {
            return Err(Error::OrderTooSmall { min: 1, got: 0 });
        }
        if self.d_max < self.d_min {
            return Err(Error::InvalidArgument(format!(
                "d_max ({}) is below d_min ({})",
                self.d_max, self.d_min
            )));
        }
        if self.replicates < 2 {
            return Err(Error::InvalidArgument(format!(
                "at least 2 replicates are needed, got {}",
                self.replicates
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsExperimentRow {
    pub d: usize,
    pub n: usize,
    pub replicates: usize,
    pub ks: KsEstimate,
    pub upper_bound: f64,
    pub seed: u64,
}

impl KsExperimentRow {
    /// A distance never exceeds 1, so such a bound says nothing.
    pub fn bound_is_vacuous(&self) -> bool {
        self.upper_bound >= 1.0
    }
}

/// Estimates the Kolmogorov distance between `S_{n,d}` and `N(0,1)` for each
/// `d` in `d_min..=d_max`. Replicate `r` reads stream `(seed, r)` and all
/// orders share its normals, so the rows do not depend on `threads`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<KsExperimentRow>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let width = config.d_max - config.d_min + 1;
    let draws: Vec<Vec<f64>> = pool.install(|| {
        (0..config.replicates as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = RandomStream::new(config.seed, r);
                let mut all = simulate_snd_orders(config.n, config.d_max, &mut rng);
                all.drain(..config.d_min - 1);
                all
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(width);
    let mut column = vec![0.0; config.replicates];
    for k in 0..width {
        for (c, draw) in column.iter_mut().zip(&draws) {
            *c = draw[k];
        }
        let d = config.d_min + k;
        rows.push(KsExperimentRow {
            d,
            n: config.n,
            replicates: config.replicates,
            ks: ks_distance(&column, normal_cdf)?,
            upper_bound: thm1_upper(config.n as u64, d as u32)?,
            seed: config.seed,
        });
    }
    Ok(rows)
}
