use hermite_lab::montecarlo::{ks_distance, simulate_snd, RandomStream};
use hermite_lab::statistics::{hermite_vector, normal_cdf};

/// E[phi_q^4] for q = 1..4.
const PHI_FOURTH: [f64; 4] = [3.0, 15.0, 93.0, 639.0];

/// Variance of a squared standardized sum of `n` copies of phi_q.
fn square_spread(q: usize, n: usize) -> f64 {
    2.0 + (PHI_FOURTH[q - 1] - 3.0) / n as f64
}

#[test]
fn normal_sampler_moments_and_ks() {
    let n = 10_000_000usize;
    let mut draws = vec![0.0; n];
    RandomStream::new(42, 0).fill_normal(&mut draws);
    let mut m = [0.0f64; 4];
    for &x in &draws {
        let x2 = x * x;
        m[0] += x;
        m[1] += x2;
        m[2] += x2 * x;
        m[3] += x2 * x2;
    }
    let nf = n as f64;
    let m = m.map(|v| v / nf);
    // Null variances of the raw moment estimators: E[x^2k] - E[x^k]^2.
    let targets = [0.0, 1.0, 0.0, 3.0];
    let spreads = [1.0, 2.0, 15.0, 96.0];
    for k in 0..4 {
        let se = (spreads[k] / nf).sqrt();
        assert!((m[k] - targets[k]).abs() <= 4.0 * se, "moment {}: {} vs {}", k + 1, m[k], targets[k]);
    }
    let ks = ks_distance(&draws, normal_cdf).unwrap();
    let band99 = ((2.0f64 / 0.01).ln() / (2.0 * nf)).sqrt();
    assert!(ks.distance <= band99, "ks {} > {band99}", ks.distance);
}

#[test]
fn hermite_vector_components_are_standardized() {
    let (n, reps, d) = (200usize, 4_000u64, 4usize);
    let mut sums = vec![0.0; d];
    let mut squares = vec![0.0; d];
    let mut sample = vec![0.0; n];
    for r in 0..reps {
        RandomStream::new(9, r).fill_normal(&mut sample);
        let v = hermite_vector(&sample, d).unwrap();
        for q in 0..d {
            sums[q] += v.values[q];
            squares[q] += v.values[q] * v.values[q];
        }
    }
    let m = reps as f64;
    for q in 0..d {
        let mean = sums[q] / m;
        let var = squares[q] / m - mean * mean;
        assert!(mean.abs() <= 3.0 / m.sqrt(), "component {q}: mean {mean}");
        assert!((var - 1.0).abs() <= 3.0 * (square_spread(q + 1, n) / m).sqrt(), "component {q}: var {var}");
    }
}

#[test]
fn snd_has_zero_mean_and_unit_variance() {
    let (n, reps) = (500usize, 10_000u64);
    for d in [2usize, 3, 4] {
        let xs: Vec<f64> = (0..reps).map(|r| simulate_snd(n, d, &mut RandomStream::new(11, r))).collect();
        let m = reps as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        assert!(mean.abs() <= 3.0 / m.sqrt(), "d = {d}: mean {mean}");
        assert!((var - 1.0).abs() <= 3.0 * (square_spread(d, n) / m).sqrt(), "d = {d}: var {var}");
    }
}
