use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Random stream handed to one simulated path.
pub type PathRng = ChaCha8Rng;

/// Paths per reduction chunk. Fixed so that the summation tree does not
/// depend on how many workers run.
const CHUNK: u64 = 1024;

/// Stream for path `index` under `seed`: the ChaCha key comes from the seed
/// and the stream id is the path index, so paths never share randomness.
pub fn path_stream(seed: u64, index: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub paths: u64,
    pub seed: u64,
    /// Simulation horizon for path-based scenarios.
    pub horizon: f64,
    /// Thread count; never changes results.
    pub workers: usize,
}

impl McConfig {
    pub fn new(paths: u64, seed: u64, horizon: f64) -> Self {
        Self {
            paths,
            seed,
            horizon,
            workers: 1,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::invalid("mc.paths", "must be >= 1"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("mc.workers", "must be >= 1"));
        }
        if self.horizon <= 0.0 || !self.horizon.is_finite() {
            return Err(Error::invalid("mc.horizon", format!("must be finite and > 0, got {}", self.horizon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub paths: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `|mean - target| / std_error`; infinite when a zero-variance sample misses.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.mean - target).abs();
        if diff == 0.0 {
            0.0
        } else if self.std_error > 0.0 {
            diff / self.std_error
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target) <= sigmas
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        let weight = other.count as f64 / total as f64;
        self.mean += delta * weight;
        self.m2 += other.m2 + delta * delta * self.count as f64 * weight;
        self.count = total;
    }

    fn estimate(&self, seed: u64) -> McEstimate {
        let std_error = if self.count > 1 {
            (self.m2 / (self.count - 1) as f64).sqrt() / (self.count as f64).sqrt()
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean,
            std_error,
            paths: self.count,
            seed,
        }
    }
}

fn run_chunks<F>(config: &McConfig, dim: usize, statistic: &F) -> Vec<Vec<Moments>>
where
    F: Fn(&mut PathRng) -> Vec<f64> + Sync,
{
    let chunks = config.paths.div_ceil(CHUNK);
    let chunk = |c: u64| -> Vec<Moments> {
        let mut acc = vec![Moments::default(); dim];
        let end = ((c + 1) * CHUNK).min(config.paths);
        for index in c * CHUNK..end {
            let mut rng = path_stream(config.seed, index);
            let values = statistic(&mut rng);
            debug_assert_eq!(values.len(), dim);
            for (m, v) in acc.iter_mut().zip(values) {
                m.push(v);
            }
        }
        acc
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if config.workers > 1 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build() {
                return pool.install(|| (0..chunks).into_par_iter().map(chunk).collect());
            }
        }
    }
    (0..chunks).map(chunk).collect()
}

/// Mean and standard error of several per-path statistics computed from the
/// same simulated paths. Bit-identical for a given `(seed, paths)`
/// regardless of `workers`.
pub fn estimate_many<F>(config: &McConfig, dim: usize, statistic: F) -> Result<Vec<McEstimate>>
where
    F: Fn(&mut PathRng) -> Vec<f64> + Sync,
{
    config.validate()?;
    let chunks = run_chunks(config, dim, &statistic);
    let mut total = vec![Moments::default(); dim];
    for chunk in &chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            t.merge(c);
        }
    }
    Ok(total.iter().map(|m| m.estimate(config.seed)).collect())
}

/// Single-statistic form of [`estimate_many`].
pub fn estimate<F>(config: &McConfig, statistic: F) -> Result<McEstimate>
where
    F: Fn(&mut PathRng) -> f64 + Sync,
{
    Ok(estimate_many(config, 1, |rng| vec![statistic(rng)])?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn constant_statistic_has_zero_error() {
        let cfg = McConfig::new(5000, 1, 1.0);
        let e = estimate(&cfg, |_| 0.25).unwrap();
        assert_eq!(e.mean, 0.25);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.paths, 5000);
    }

    #[test]
    fn same_seed_same_estimate() {
        let cfg = McConfig::new(3000, 99, 1.0);
        let f = |rng: &mut PathRng| rng.random::<f64>();
        assert_eq!(estimate(&cfg, f).unwrap(), estimate(&cfg, f).unwrap());
        let other = estimate(&McConfig::new(3000, 100, 1.0), f).unwrap();
        assert_ne!(other.mean, estimate(&cfg, f).unwrap().mean);
    }

    #[test]
    fn workers_do_not_change_results() {
        let base = McConfig::new(10_000, 7, 1.0);
        let f = |rng: &mut PathRng| rng.random::<f64>().powi(2);
        let one = estimate(&base, f).unwrap();
        for w in [2, 3, 8] {
            assert_eq!(estimate(&base.with_workers(w), f).unwrap(), one);
        }
    }

    #[test]
    fn error_shrinks_like_root_n() {
        let f = |rng: &mut PathRng| rng.random::<f64>();
        let small = estimate(&McConfig::new(20_000, 3, 1.0), f).unwrap();
        let large = estimate(&McConfig::new(40_000, 3, 1.0), f).unwrap();
        let ratio = large.std_error / small.std_error;
        assert!((ratio / std::f64::consts::FRAC_1_SQRT_2 - 1.0).abs() < 0.2, "{ratio}");
        assert!((small.mean - 0.5).abs() < 3.0 * small.std_error);
    }

    #[test]
    fn streams_are_distinct_per_path() {
        let a: u64 = path_stream(5, 0).random();
        let b: u64 = path_stream(5, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, path_stream(5, 0).random::<u64>());
    }

    #[test]
    fn rejects_empty_config() {
        assert!(estimate(&McConfig::new(0, 1, 1.0), |_| 0.0).is_err());
        assert!(estimate(&McConfig::new(10, 1, 1.0).with_workers(0), |_| 0.0).is_err());
    }
}
