//! Scene radiance to sensor irradiance.

use std::f64::consts::PI;

use ndarray::{Array2, Array3, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fft2::convolve_same;
use super::psf::PsfStack;
use crate::error::{Error, Result};
use crate::spectral::{SpectralImage, SpectralKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticsSpec {
    pub f_number: f64,
    /// mm
    pub focal_length: f64,
    #[serde(default = "one")]
    pub transmission: f64,
    /// Radial distortion coefficient on radius normalized to the half-diagonal.
    #[serde(default)]
    pub distortion_k1: f64,
    #[serde(default)]
    pub relative_illumination: bool,
}

fn one() -> f64 {
    1.0
}

impl OpticsSpec {
    pub fn new(f_number: f64, focal_length: f64) -> Self {
        OpticsSpec {
            f_number,
            focal_length,
            transmission: 1.0,
            distortion_k1: 0.0,
            relative_illumination: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_number > 0.0) || !(self.focal_length > 0.0) {
            return Err(Error::Config(format!(
                "f-number and focal length must be positive, got {} and {}",
                self.f_number, self.focal_length
            )));
        }
        if !(self.transmission > 0.0 && self.transmission <= 1.0) {
            return Err(Error::Config(format!(
                "transmission must lie in (0, 1], got {}",
                self.transmission
            )));
        }
        if !self.distortion_k1.is_finite() {
            return Err(Error::Config("distortion coefficient must be finite".into()));
        }
        Ok(())
    }

    /// Radiance → on-axis irradiance factor π·T/(4N²) for distant scenes.
    pub fn radiometric_scale(&self) -> f64 {
        PI * self.transmission / (4.0 * self.f_number * self.f_number)
    }
}

/// cos⁴θ falloff, θ from image height (pixel pitch in µm) over focal length (mm).
pub fn relative_illumination_map(rows: usize, cols: usize, pitch_um: f64, focal_length_mm: f64) -> Array2<f64> {
    let (cy, cx) = ((rows as f64 - 1.0) / 2.0, (cols as f64 - 1.0) / 2.0);
    Array2::from_shape_fn((rows, cols), |(r, c)| {
        let h_mm = ((r as f64 - cy).powi(2) + (c as f64 - cx).powi(2)).sqrt() * pitch_um * 1e-3;
        let t2 = (h_mm / focal_length_mm).powi(2);
        1.0 / ((1.0 + t2) * (1.0 + t2))
    })
}

fn bilinear(plane: ArrayView2<f64>, y: f64, x: f64) -> f64 {
    let (rows, cols) = plane.dim();
    if y < 0.0 || x < 0.0 || y > (rows - 1) as f64 || x > (cols - 1) as f64 {
        return 0.0;
    }
    let (y0, x0) = (y.floor() as usize, x.floor() as usize);
    let (y1, x1) = ((y0 + 1).min(rows - 1), (x0 + 1).min(cols - 1));
    let (ty, tx) = (y - y0 as f64, x - x0 as f64);
    let top = plane[[y0, x0]] * (1.0 - tx) + plane[[y0, x1]] * tx;
    let bottom = plane[[y1, x0]] * (1.0 - tx) + plane[[y1, x1]] * tx;
    top * (1.0 - ty) + bottom * ty
}

/// Radial distortion: each output pixel at normalized radius r reads the
/// undistorted image at r·(1 + k1·r²), bilinearly. Pixels mapped from
/// outside the frame are dark.
pub fn distort(plane: ArrayView2<f64>, k1: f64) -> Array2<f64> {
    let (rows, cols) = plane.dim();
    let (cy, cx) = ((rows as f64 - 1.0) / 2.0, (cols as f64 - 1.0) / 2.0);
    let norm = (cy * cy + cx * cx).sqrt().max(1.0);
    Array2::from_shape_fn((rows, cols), |(r, c)| {
        let (dy, dx) = (r as f64 - cy, c as f64 - cx);
        let rn2 = (dy * dy + dx * dx) / (norm * norm);
        let s = 1.0 + k1 * rn2;
        bilinear(plane, cy + dy * s, cx + dx * s)
    })
}

/// Render radiance through the optics: per-wavelength PSF convolution,
/// radiometric scaling, relative illumination, then distortion.
pub fn apply_optics(radiance: &SpectralImage, psfs: &PsfStack, optics: &OpticsSpec) -> Result<SpectralImage> {
    optics.validate()?;
    psfs.validate()?;
    if radiance.kind() != SpectralKind::Radiance {
        return Err(Error::Structural("optics input must be a radiance image".into()));
    }
    if !radiance.grid().same_as(&psfs.grid) {
        return Err(Error::Structural(format!(
            "radiance grid {:?} differs from PSF grid {:?}",
            radiance.grid(),
            psfs.grid
        )));
    }
    let (rows, cols) = (radiance.rows(), radiance.cols());
    let scale = optics.radiometric_scale();
    let ri = optics
        .relative_illumination
        .then(|| relative_illumination_map(rows, cols, psfs.sample_pitch, optics.focal_length));

    let planes: Vec<Array2<f64>> = (0..radiance.grid().count)
        .into_par_iter()
        .map(|b| {
            let mut e = convolve_same(radiance.band(b), psfs.kernels[b].view());
            e.mapv_inplace(|v| v * scale);
            if let Some(ri) = &ri {
                e *= ri;
            }
            if optics.distortion_k1 != 0.0 {
                e = distort(e.view(), optics.distortion_k1);
            }
            // FFT round-off can leave tiny negatives next to zero signal.
            e.mapv_inplace(|v| v.max(0.0));
            e
        })
        .collect();

    let mut data = Array3::<f64>::zeros((radiance.grid().count, rows, cols));
    for (mut dst, src) in data.axis_iter_mut(Axis(0)).zip(planes) {
        dst.assign(&src);
    }
    SpectralImage::new(*radiance.grid(), SpectralKind::Irradiance, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::WavelengthGrid;

    fn scene(grid: WavelengthGrid) -> SpectralImage {
        let data = Array3::from_shape_fn((grid.count, 16, 20), |(b, r, c)| {
            if (4..12).contains(&r) && (5..15).contains(&c) {
                (1 + b) as f64 * (1.0 + ((r * 7 + c * 3) % 5) as f64)
            } else {
                0.0
            }
        });
        SpectralImage::new(grid, SpectralKind::Radiance, data).unwrap()
    }

    #[test]
    fn delta_psf_is_radiometric_scale_only() {
        let grid = WavelengthGrid::new(500.0, 50.0, 3).unwrap();
        let img = scene(grid);
        let optics = OpticsSpec::new(2.8, 8.0);
        let out = apply_optics(&img, &PsfStack::delta(grid, 3.0), &optics).unwrap();
        let k = PI / (4.0 * 2.8 * 2.8);
        assert_eq!(out.kind(), SpectralKind::Irradiance);
        for (a, b) in out.data().iter().zip(img.data().iter()) {
            assert_eq!(*a, b * k);
        }
    }

    #[test]
    fn flux_conserved_by_convolution() {
        let grid = WavelengthGrid::new(500.0, 50.0, 3).unwrap();
        let img = scene(grid);
        let blur = Array2::from_shape_fn((5, 5), |(r, c)| 1.0 + ((r + 2 * c) % 3) as f64);
        let blur = &blur / blur.sum();
        let psfs = PsfStack {
            grid,
            sample_pitch: 3.0,
            kernels: vec![blur; 3],
        };
        let optics = OpticsSpec {
            transmission: 0.9,
            ..OpticsSpec::new(4.0, 8.0)
        };
        let out = apply_optics(&img, &psfs, &optics).unwrap();
        let expected = img.data().sum() * optics.radiometric_scale();
        assert!((out.data().sum() - expected).abs() <= 1e-6 * expected);
    }

    #[test]
    fn relative_illumination_falls_off() {
        let ri = relative_illumination_map(11, 11, 100.0, 2.0);
        assert_eq!(ri[[5, 5]], 1.0);
        assert!(ri[[0, 0]] < ri[[0, 5]] && ri[[0, 5]] < 1.0);
        // Corner: h = √50·0.1 mm, tanθ = h/2.
        let t2 = (50f64.sqrt() * 0.1 / 2.0).powi(2);
        assert!((ri[[0, 0]] - 1.0 / (1.0 + t2).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn zero_distortion_is_identity() {
        let p = Array2::from_shape_fn((9, 7), |(r, c)| (r * 7 + c) as f64);
        assert_eq!(distort(p.view(), 0.0), p);
        // Barrel/pincushion keep the center fixed.
        let d = distort(p.view(), 0.2);
        assert_eq!(d[[4, 3]], p[[4, 3]]);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let grid = WavelengthGrid::new(500.0, 50.0, 3).unwrap();
        let other = WavelengthGrid::new(500.0, 25.0, 3).unwrap();
        let r = apply_optics(&scene(grid), &PsfStack::delta(other, 3.0), &OpticsSpec::new(4.0, 8.0));
        assert!(matches!(r, Err(Error::Structural(_))));
    }
}
