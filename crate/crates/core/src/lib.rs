//! Physics-based simulation of HDR image systems.
//!
//! The chain runs from multispectral scene radiance (composed from light
//! groups) through a scattering-flare lens model to sensor irradiance,
//! then through split-pixel or RGBW sensor models, HDR reconstruction,
//! and image-quality metrics.

pub mod error;
pub mod hdr;
pub mod io;
pub mod isp;
pub mod optics;
pub mod pipeline;
pub mod scenes;
pub mod sensor;
pub mod spectral;

pub use error::{Error, Result};
