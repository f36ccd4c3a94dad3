//! Demosaicing baselines, colorimetry and image-quality metrics.

mod color;
mod demosaic;
mod ssim;

pub use color::{
    delta_e, lab_from_xyz, spectral_to_xyz, xyz_to_srgb_display, CameraColor, DeltaE, Rgb8Image,
    SRGB_FROM_XYZ,
};
pub use demosaic::{demosaic_bilinear, demosaic_rgbw, interpolate_channel, LUMA_WEIGHTS, RGBW_SCALE_RANGE};
pub use ssim::{gaussian_taps, ssim, ssim_map, SSIM_K1, SSIM_K2, SSIM_SIGMA, SSIM_WINDOW};

use ndarray::{Array3, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Primaries {
    SensorNative,
    SrgbLinear,
}

/// Linear three-channel image stored as planes (channel, row, col).
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub planes: Array3<f64>,
    pub primaries: Primaries,
}

impl RgbImage {
    pub fn new(planes: Array3<f64>, primaries: Primaries) -> Result<Self> {
        if planes.dim().0 != 3 {
            return Err(Error::Structural(format!("RGB image needs 3 planes, got {}", planes.dim().0)));
        }
        if planes.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("RGB samples must be finite and ≥ 0".into()));
        }
        Ok(RgbImage { planes, primaries })
    }

    pub fn rows(&self) -> usize {
        self.planes.dim().1
    }

    pub fn cols(&self) -> usize {
        self.planes.dim().2
    }

    pub fn plane(&self, k: usize) -> ArrayView2<'_, f64> {
        self.planes.index_axis(Axis(0), k)
    }
}

/// CIE 1931 tristimulus planes (X, Y, Z).
#[derive(Debug, Clone, PartialEq)]
pub struct XyzImage {
    pub planes: Array3<f64>,
}

impl XyzImage {
    pub fn new(planes: Array3<f64>) -> Result<Self> {
        if planes.dim().0 != 3 {
            return Err(Error::Structural(format!("XYZ image needs 3 planes, got {}", planes.dim().0)));
        }
        if planes.index_axis(Axis(0), 1).iter().any(|y| !(*y >= 0.0)) {
            return Err(Error::Domain("Y must be ≥ 0".into()));
        }
        Ok(XyzImage { planes })
    }

    pub fn rows(&self) -> usize {
        self.planes.dim().1
    }

    pub fn cols(&self) -> usize {
        self.planes.dim().2
    }

    pub fn y(&self) -> ArrayView2<'_, f64> {
        self.planes.index_axis(Axis(0), 1)
    }

    pub fn pixel(&self, r: usize, c: usize) -> [f64; 3] {
        [self.planes[[0, r, c]], self.planes[[1, r, c]], self.planes[[2, r, c]]]
    }
}
