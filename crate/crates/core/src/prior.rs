//! Uniform latent prior on the Euclidean ball `B_R^{d_z}`.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Sampler for `Unif(B_R^{d_z})`. Owns its random stream.
#[derive(Clone, Debug)]
pub struct BallPrior {
    dim: usize,
    radius: f64,
    rng: Rng,
}

impl BallPrior {
    pub fn new(dim: usize, radius: f64, rng: Rng) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("latent dimension must be >= 1".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self { dim, radius, rng })
    }

    /// The default rule: `d_z = d_a` and `R = sqrt(d_a)`.
    pub fn for_action_dim(action_dim: usize, rng: Rng) -> Result<Self> {
        Self::new(action_dim, (action_dim as f64).sqrt(), rng)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Copy of this prior that draws from an independent stream.
    pub fn with_stream(&self, seed: u64, stream: u64) -> Self {
        Self {
            dim: self.dim,
            radius: self.radius,
            rng: rng::stream(seed, stream),
        }
    }

    /// `E‖z‖² = d_z / (d_z + 2) · R²`.
    pub fn second_moment(&self) -> f64 {
        let d = self.dim as f64;
        d / (d + 2.0) * self.radius * self.radius
    }

    pub fn sample_one(&mut self) -> Vec<f64> {
        sample_ball(self.dim, self.radius, &mut self.rng)
    }

    pub fn sample(&mut self, count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.sample_one()).collect()
    }
}

/// Gaussian direction scaled by `R · U^{1/d}`; the result never has norm
/// above `radius`, even after rounding.
pub fn sample_ball(dim: usize, radius: f64, rng: &mut Rng) -> Vec<f64> {
    let mut z: Vec<f64> = loop {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            let u: f64 = rng.random();
            let r = radius * u.powf(1.0 / dim as f64);
            break g.into_iter().map(|v| v / norm * r).collect();
        }
    };
    loop {
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= radius {
            return z;
        }
        let shrink = (radius / norm).min(1.0 - f64::EPSILON);
        z.iter_mut().for_each(|v| *v *= shrink);
    }
}
