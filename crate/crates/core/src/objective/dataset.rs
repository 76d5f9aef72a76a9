use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One labelled sparse sample. Indices are 0-based and strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// `+1.0` or `-1.0`.
    pub label: f64,
}

impl Sample {
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&j, &a)| a * x[j])
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|a| a * a).sum()
    }

    /// `out += s * a`
    pub fn add_scaled_to(&self, s: f64, out: &mut [f64]) {
        for (&j, &a) in self.indices.iter().zip(&self.values) {
            out[j] += s * a;
        }
    }
}

/// Binary-labelled sparse dataset in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub n: usize,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, n: usize) -> Result<Self> {
        for (i, s) in samples.iter().enumerate() {
            if s.label != 1.0 && s.label != -1.0 {
                return Err(Error::InvalidArgument(format!(
                    "sample {i} has label {}, expected ±1",
                    s.label
                )));
            }
            if s.indices.len() != s.values.len() {
                return Err(Error::InvalidArgument(format!(
                    "sample {i} has mismatched index/value lengths"
                )));
            }
            if s.indices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "sample {i} indices not strictly increasing"
                )));
            }
            if let Some(&last) = s.indices.last() {
                if last >= n {
                    return Err(Error::InvalidArgument(format!(
                        "sample {i} has feature {} beyond dimension {n}",
                        last + 1
                    )));
                }
            }
        }
        Ok(Dataset { samples, n })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sq().sqrt()).sum::<f64>() / self.len() as f64
    }

    pub fn mean_norm_sq(&self) -> f64 {
        self.samples.iter().map(Sample::norm_sq).sum::<f64>() / self.len() as f64
    }

    /// Seeded random subset of `count` samples, in shuffled order.
    pub fn subsample(&self, count: usize, seed: u64) -> Result<Dataset> {
        if count > self.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot subsample {count} of {} samples",
                self.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picked = self
            .samples
            .choose_multiple(&mut rng, count)
            .cloned()
            .collect();
        Ok(Dataset {
            samples: picked,
            n: self.n,
        })
    }
}

/// Splits `dataset` into `m` shards after a seeded shuffle. Shard sizes
/// differ by at most one, the larger shards first. With `m = 1` the
/// dataset is returned unchanged.
pub fn shard(dataset: &Dataset, m: usize, seed: u64) -> Result<Vec<Dataset>> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "agent count must be positive".into(),
        ));
    }
    if dataset.is_empty() {
        return Err(Error::EmptyShard);
    }
    if m > dataset.len() {
        return Err(Error::InvalidArgument(format!(
            "{m} agents but only {} samples",
            dataset.len()
        )));
    }
    if m == 1 {
        return Ok(vec![dataset.clone()]);
    }
    let mut samples = dataset.samples.clone();
    samples.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (samples.len() / m, samples.len() % m);
    let mut out = Vec::with_capacity(m);
    let mut rest = samples.into_iter();
    for i in 0..m {
        let size = base + usize::from(i < extra);
        out.push(Dataset {
            samples: rest.by_ref().take(size).collect(),
            n: dataset.n,
        });
    }
    Ok(out)
}
