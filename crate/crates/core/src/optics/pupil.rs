use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::aperture::ApodizationMask;
use super::zernike::zernike;
use crate::error::{Error, Result};
use crate::spectral::{MAX_WAVELENGTH_NM, MIN_WAVELENGTH_NM};

/// Wavefront aberration of the flare-free lens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavefrontSpec {
    /// (Noll index, coefficient in waves at `reference_lambda`).
    #[serde(default)]
    pub zernike_coeffs: Vec<(usize, f64)>,
    /// nm
    pub reference_lambda: f64,
    pub f_number: f64,
    /// mm
    pub focal_length: f64,
}

impl WavefrontSpec {
    pub fn diffraction_limited(f_number: f64, focal_length: f64) -> Self {
        WavefrontSpec {
            zernike_coeffs: Vec::new(),
            reference_lambda: 550.0,
            f_number,
            focal_length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_number > 0.0) || !(self.focal_length > 0.0) {
            return Err(Error::Config(format!(
                "f-number and focal length must be positive, got {} and {}",
                self.f_number, self.focal_length
            )));
        }
        if !(self.reference_lambda > 0.0) {
            return Err(Error::Config("reference wavelength must be positive".into()));
        }
        for (j, c) in &self.zernike_coeffs {
            if *j == 0 {
                return Err(Error::Config("Zernike (Noll) indices start at 1".into()));
            }
            if !c.is_finite() {
                return Err(Error::Config(format!("Zernike coefficient {j} is not finite")));
            }
        }
        Ok(())
    }

    /// Wavefront error in waves at the reference wavelength.
    pub fn waves(&self, rho: f64, theta: f64) -> f64 {
        self.zernike_coeffs
            .iter()
            .map(|(j, c)| c * zernike(*j, rho, theta))
            .sum()
    }
}

/// Complex pupil field at one wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct PupilFunction {
    pub wavelength_nm: f64,
    pub f_number: f64,
    pub pupil_pixel_pitch: f64,
    pub field: Array2<Complex64>,
}

impl PupilFunction {
    pub fn n(&self) -> usize {
        self.field.nrows()
    }

    /// Σ |w|².
    pub fn power(&self) -> f64 {
        self.field.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// w = a·exp(iφ) with φ = 2π·(λ_ref/λ)·Σ c_j Z_j on the unit pupil disk.
pub fn build_pupil(mask: &ApodizationMask, wf: &WavefrontSpec, lambda_nm: f64) -> Result<PupilFunction> {
    wf.validate()?;
    if !(MIN_WAVELENGTH_NM..=MAX_WAVELENGTH_NM).contains(&lambda_nm) {
        return Err(Error::Domain(format!(
            "wavelength {lambda_nm} nm outside [{MIN_WAVELENGTH_NM}, {MAX_WAVELENGTH_NM}]"
        )));
    }
    let n = mask.n;
    if mask.values.dim() != (n, n) {
        return Err(Error::Structural("mask grid is not n×n".into()));
    }
    let scale = 2.0 * PI * wf.reference_lambda / lambda_nm;
    let aberrated = !wf.zernike_coeffs.is_empty();
    let field = Array2::from_shape_fn((n, n), |(r, c)| {
        let a = mask.values[[r, c]];
        if a == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if !aberrated {
            return Complex64::new(a, 0.0);
        }
        let x = ApodizationMask::coord(n, c);
        let y = ApodizationMask::coord(n, r);
        let rho = (x * x + y * y).sqrt();
        if rho > 1.0 {
            return Complex64::new(a, 0.0);
        }
        let phase = scale * wf.waves(rho, y.atan2(x));
        Complex64::from_polar(a, phase)
    });
    Ok(PupilFunction {
        wavelength_nm: lambda_nm,
        f_number: wf.f_number,
        pupil_pixel_pitch: mask.pupil_pixel_pitch,
        field,
    })
}
