//! Real-valued AWGN channel.
//!
//! One real symbol per channel use. The per-dimension noise variance for an
//! Eb/N0 given in dB and a code rate `r` is `σ² = 1 / (2·r·10^(Eb/N0 / 10))`.

use ndarray::{Array2, Zip};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Noise level of one channel operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma2: f64,
}

impl ChannelSpec {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        Ok(Self {
            ebn0_db,
            rate,
            sigma2: ebn0_to_sigma2(ebn0_db, rate)?,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

pub fn ebn0_to_sigma2(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::config(format!("code rate must be positive, got {rate}")));
    }
    if !ebn0_db.is_finite() {
        return Err(Error::config(format!("Eb/N0 must be finite, got {ebn0_db}")));
    }
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    Ok(1.0 / (2.0 * rate * ebn0))
}

/// Standard normal draws, row-major, `rows × cols`.
pub fn standard_normal<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.sample::<f64, _>(StandardNormal))
}

/// `z + w` with `w ~ N(0, σ²)` i.i.d. per entry.
pub fn awgn_add<R: Rng + ?Sized>(z: &Array2<f64>, sigma2: f64, rng: &mut R) -> Array2<f64> {
    let noise = standard_normal(z.nrows(), z.ncols(), rng);
    add_scaled_noise(z, &noise, sigma2)
}

/// `z + σ·noise` for pre-drawn standard normal noise.
pub fn add_scaled_noise(z: &Array2<f64>, noise: &Array2<f64>, sigma2: f64) -> Array2<f64> {
    let sigma = sigma2.max(0.0).sqrt();
    let mut out = z.clone();
    Zip::from(&mut out)
        .and(noise)
        .for_each(|o, &w| *o += sigma * w);
    out
}

/// Sum of squared entries.
fn total_energy(z: &Array2<f64>) -> f64 {
    z.iter().map(|v| v * v).sum()
}

/// Result of [`normalize_power`], keeping what the backward pass needs.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub output: Array2<f64>,
    pub scale: f64,
    pub energy: f64,
}

/// Scales the batch so its mean squared row norm equals the row width `n`.
pub fn normalize_power(z: &Array2<f64>) -> Result<Normalized> {
    let energy = total_energy(z);
    if !(energy > 0.0) {
        return Err(Error::DegenerateCodebook);
    }
    let target = (z.ncols() * z.nrows()) as f64;
    let scale = (target / energy).sqrt();
    Ok(Normalized {
        output: z * scale,
        scale,
        energy,
    })
}

/// Backpropagates `∂L/∂output` through [`normalize_power`].
///
/// With `s = √(nB/S)` and `S = Σ z²`, `∂L/∂z = s·g − (s/S)·⟨g, z⟩·z`.
pub fn normalize_power_backward(z: &Array2<f64>, norm: &Normalized, grad: &Array2<f64>) -> Array2<f64> {
    let inner: f64 = grad.iter().zip(z.iter()).map(|(g, v)| g * v).sum();
    let coeff = norm.scale * inner / norm.energy;
    let mut out = grad * norm.scale;
    Zip::from(&mut out).and(z).for_each(|o, &v| *o -= coeff * v);
    out
}
