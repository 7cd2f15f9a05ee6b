use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Seeded white measurement noise.
pub(crate) struct Noise {
    rng: ChaCha8Rng,
    dist: Option<Normal<f64>>,
}

impl Noise {
    pub(crate) fn new(std: f64, seed: u64) -> Result<Self> {
        let dist = if std > 0.0 {
            Some(Normal::new(0.0, std).map_err(|e| Error::InvalidSpec(e.to_string()))?)
        } else {
            None
        };
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dist,
        })
    }

    pub(crate) fn sample(&mut self) -> f64 {
        match &self.dist {
            Some(d) => d.sample(&mut self.rng),
            None => 0.0,
        }
    }
}
