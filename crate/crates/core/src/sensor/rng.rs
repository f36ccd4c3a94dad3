//! Counter-based per-pixel random streams.
//!
//! Every draw is keyed by (seed, pixel index, capture id, noise stage), so
//! the value a pixel receives does not depend on evaluation order or on
//! how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

/// Photodetector and readout identities used as stream keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum CaptureId {
    /// Single-photodetector pixel, or the large photodetector of a split pixel.
    MainPd = 0,
    SmallPd = 1,
    SingleRead = 2,
    Lphg = 3,
    Lplg = 4,
    Splg = 5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum NoiseStage {
    Prnu = 1,
    Shot = 2,
    Dsnu = 3,
    Read = 4,
}

const DOMAIN_TAG: [u8; 8] = *b"hdrsim01";

pub fn pixel_rng(seed: u64, pixel: u64, capture: CaptureId, stage: NoiseStage) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&pixel.to_le_bytes());
    key[16..20].copy_from_slice(&(capture as u32).to_le_bytes());
    key[20..24].copy_from_slice(&(stage as u32).to_le_bytes());
    key[24..32].copy_from_slice(&DOMAIN_TAG);
    ChaCha8Rng::from_seed(key)
}

pub fn normal(seed: u64, pixel: u64, capture: CaptureId, stage: NoiseStage) -> f64 {
    StandardNormal.sample(&mut pixel_rng(seed, pixel, capture, stage))
}

/// Poisson draw with mean `lambda`; zero for nonpositive means.
pub fn poisson(lambda: f64, seed: u64, pixel: u64, capture: CaptureId) -> f64 {
    if !(lambda > 0.0) {
        return 0.0;
    }
    let dist = Poisson::new(lambda).expect("finite positive mean");
    dist.sample(&mut pixel_rng(seed, pixel, capture, NoiseStage::Shot))
}
