//! Simulation of the last Hermite coordinate and its Kolmogorov distance to
//! the standard normal.

mod experiment;
mod ks;
pub mod rng;

pub use experiment::{
    run_experiment, simulate_snd, simulate_snd_orders, ExperimentConfig, KsExperimentRow,
};
pub use ks::{dkw_band, ks_distance, KsEstimate};
pub use rng::{RandomStream, SplitMix64};
