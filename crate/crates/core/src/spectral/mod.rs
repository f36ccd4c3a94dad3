//! Spectral images, light groups and photometry.
//!
//! Samples are photon rates: radiance in photons·s⁻¹·sr⁻¹·m⁻²·nm⁻¹ and
//! irradiance in photons·s⁻¹·m⁻²·nm⁻¹. Photometric quantities convert
//! through the photon energy `h·c/λ`.

pub mod cie;
mod groups;
mod photometry;

pub use groups::{
    compose_light_groups, set_weights_for_target, GroupKey, GroupWeights, LightGroup,
    WeightMask, WeightSolution,
};
pub use photometry::{
    dynamic_range, line_profile, luminance_map, mean_luminance, percentile,
    DEFAULT_CLIP_PERCENTILES,
};

use ndarray::{Array2, Array3, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planck constant times the speed of light, J·m.
pub const HC: f64 = 1.98645e-25;

/// Maximum luminous efficacy for photopic vision, lm/W.
pub const LUMINOUS_EFFICACY: f64 = 683.0;

/// Wavelength range accepted anywhere in the crate, nm.
pub const MIN_WAVELENGTH_NM: f64 = 350.0;
pub const MAX_WAVELENGTH_NM: f64 = 780.0;

/// Energy of one photon at `nm`, joules.
pub fn photon_energy(nm: f64) -> f64 {
    HC / (nm * 1e-9)
}

/// Uniform wavelength sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavelengthGrid {
    pub start_nm: f64,
    pub step_nm: f64,
    pub count: usize,
}

impl WavelengthGrid {
    pub fn new(start_nm: f64, step_nm: f64, count: usize) -> Result<Self> {
        let grid = WavelengthGrid {
            start_nm,
            step_nm,
            count,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// A grid holding the single wavelength `nm` with bin width `step_nm`.
    pub fn single(nm: f64, step_nm: f64) -> Result<Self> {
        Self::new(nm, step_nm, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_nm > 0.0) || !self.step_nm.is_finite() {
            return Err(Error::Domain(format!(
                "wavelength step must be positive, got {}",
                self.step_nm
            )));
        }
        if self.count == 0 {
            return Err(Error::Domain("wavelength grid needs at least one sample".into()));
        }
        let (lo, hi) = (self.start_nm, self.end_nm());
        if !lo.is_finite() || lo < MIN_WAVELENGTH_NM - 1e-9 || hi > MAX_WAVELENGTH_NM + 1e-9 {
            return Err(Error::Domain(format!(
                "wavelength grid [{lo}, {hi}] nm leaves [{MIN_WAVELENGTH_NM}, {MAX_WAVELENGTH_NM}]"
            )));
        }
        Ok(())
    }

    pub fn wavelength(&self, i: usize) -> f64 {
        self.start_nm + self.step_nm * i as f64
    }

    pub fn end_nm(&self) -> f64 {
        self.wavelength(self.count - 1)
    }

    pub fn wavelengths(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.wavelength(i))
    }

    /// Grids compare equal when they sample the same wavelengths.
    pub fn same_as(&self, other: &WavelengthGrid) -> bool {
        self.count == other.count
            && (self.start_nm - other.start_nm).abs() < 1e-9
            && (self.step_nm - other.step_nm).abs() < 1e-9
    }
}

impl Default for WavelengthGrid {
    /// 400–700 nm in 10 nm steps.
    fn default() -> Self {
        WavelengthGrid {
            start_nm: 400.0,
            step_nm: 10.0,
            count: 31,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralKind {
    Radiance,
    Irradiance,
}

impl SpectralKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectralKind::Radiance => "radiance",
            SpectralKind::Irradiance => "irradiance",
        }
    }

    pub fn units(&self) -> &'static str {
        match self {
            SpectralKind::Radiance => "photons/s/sr/m^2/nm",
            SpectralKind::Irradiance => "photons/s/m^2/nm",
        }
    }
}

/// A rows×cols image with one plane per wavelength.
///
/// Storage is wavelength-major: `data[[band, row, col]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralImage {
    grid: WavelengthGrid,
    kind: SpectralKind,
    data: Array3<f64>,
}

impl SpectralImage {
    /// Wrap a `(bands, rows, cols)` array, checking the sample invariants.
    pub fn new(grid: WavelengthGrid, kind: SpectralKind, data: Array3<f64>) -> Result<Self> {
        grid.validate()?;
        let (bands, rows, cols) = data.dim();
        if bands != grid.count {
            return Err(Error::Structural(format!(
                "data has {bands} planes but the grid has {} wavelengths",
                grid.count
            )));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::Structural("spectral image has no pixels".into()));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Domain(format!(
                "spectral samples must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(SpectralImage { grid, kind, data })
    }

    pub fn zeros(rows: usize, cols: usize, grid: WavelengthGrid, kind: SpectralKind) -> Self {
        SpectralImage {
            grid,
            kind,
            data: Array3::zeros((grid.count, rows, cols)),
        }
    }

    /// Every pixel carries the spectrum `spd` (one value per grid sample) scaled by `map`.
    pub fn from_map_and_spectrum(
        map: ArrayView2<f64>,
        spd: &[f64],
        grid: WavelengthGrid,
        kind: SpectralKind,
    ) -> Result<Self> {
        if spd.len() != grid.count {
            return Err(Error::Structural(format!(
                "spectrum has {} samples, grid has {}",
                spd.len(),
                grid.count
            )));
        }
        let (rows, cols) = map.dim();
        let mut data = Array3::zeros((grid.count, rows, cols));
        for (b, mut plane) in data.axis_iter_mut(Axis(0)).enumerate() {
            let s = spd[b];
            plane.zip_mut_with(&map, |o, &m| *o = m * s);
        }
        Self::new(grid, kind, data)
    }

    pub fn rows(&self) -> usize {
        self.data.dim().1
    }

    pub fn cols(&self) -> usize {
        self.data.dim().2
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn kind(&self) -> SpectralKind {
        self.kind
    }

    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }

    pub fn into_data(self) -> Array3<f64> {
        self.data
    }

    pub fn band(&self, i: usize) -> ArrayView2<'_, f64> {
        self.data.index_axis(Axis(0), i)
    }

    /// Spectrum of one pixel.
    pub fn spectrum(&self, row: usize, col: usize) -> Vec<f64> {
        (0..self.grid.count).map(|b| self.data[[b, row, col]]).collect()
    }

    pub fn same_geometry(&self, other: &SpectralImage) -> bool {
        self.rows() == other.rows() && self.cols() == other.cols() && self.grid.same_as(&other.grid)
    }

    /// Multiply every sample by a nonnegative factor.
    pub fn scaled(&self, k: f64) -> Result<SpectralImage> {
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::Domain(format!("scale factor must be finite and ≥ 0, got {k}")));
        }
        Ok(SpectralImage {
            grid: self.grid,
            kind: self.kind,
            data: &self.data * k,
        })
    }

    /// Sum over wavelength of `weight(λ)·sample·Δλ` per pixel.
    pub fn weighted_band_sum(&self, weight: impl Fn(f64) -> f64) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows(), self.cols()));
        for (b, plane) in self.data.axis_iter(Axis(0)).enumerate() {
            let w = weight(self.grid.wavelength(b)) * self.grid.step_nm;
            if w != 0.0 {
                out.scaled_add(w, &plane);
            }
        }
        out
    }

    /// Central `rows`×`cols` crop.
    pub fn center_crop(&self, rows: usize, cols: usize) -> Result<SpectralImage> {
        if rows > self.rows() || cols > self.cols() {
            return Err(Error::Structural(format!(
                "cannot crop {}x{} image to {rows}x{cols}",
                self.rows(),
                self.cols()
            )));
        }
        let r0 = (self.rows() - rows) / 2;
        let c0 = (self.cols() - cols) / 2;
        let data = self
            .data
            .slice(ndarray::s![.., r0..r0 + rows, c0..c0 + cols])
            .to_owned();
        Ok(SpectralImage {
            grid: self.grid,
            kind: self.kind,
            data,
        })
    }

    pub(crate) fn from_parts_unchecked(
        grid: WavelengthGrid,
        kind: SpectralKind,
        data: Array3<f64>,
    ) -> Self {
        debug_assert_eq!(data.dim().0, grid.count);
        SpectralImage { grid, kind, data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_400_to_700() {
        let g = WavelengthGrid::default();
        assert_eq!(g.count, 31);
        assert_eq!(g.end_nm(), 700.0);
        g.validate().unwrap();
    }

    #[test]
    fn grid_rejects_out_of_range() {
        assert!(WavelengthGrid::new(340.0, 10.0, 5).is_err());
        assert!(WavelengthGrid::new(700.0, 10.0, 10).is_err());
        assert!(WavelengthGrid::new(400.0, 0.0, 10).is_err());
        assert!(WavelengthGrid::new(400.0, 10.0, 0).is_err());
        assert!(WavelengthGrid::new(350.0, 10.0, 44).is_ok());
    }

    #[test]
    fn image_rejects_negative_and_nan() {
        let g = WavelengthGrid::new(500.0, 10.0, 2).unwrap();
        let mut d = Array3::<f64>::zeros((2, 2, 2));
        d[[1, 0, 1]] = -1.0;
        assert!(SpectralImage::new(g, SpectralKind::Radiance, d.clone()).is_err());
        d[[1, 0, 1]] = f64::NAN;
        assert!(SpectralImage::new(g, SpectralKind::Radiance, d).is_err());
    }

    #[test]
    fn image_rejects_plane_count_mismatch() {
        let g = WavelengthGrid::new(500.0, 10.0, 3).unwrap();
        let d = Array3::<f64>::zeros((2, 2, 2));
        assert!(matches!(
            SpectralImage::new(g, SpectralKind::Radiance, d),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn center_crop_takes_middle() {
        let g = WavelengthGrid::single(550.0, 10.0).unwrap();
        let d = Array3::from_shape_fn((1, 4, 4), |(_, r, c)| (r * 4 + c) as f64);
        let img = SpectralImage::new(g, SpectralKind::Irradiance, d).unwrap();
        let c = img.center_crop(2, 2).unwrap();
        assert_eq!(c.band(0)[[0, 0]], 5.0);
        assert_eq!(c.band(0)[[1, 1]], 10.0);
    }
}
