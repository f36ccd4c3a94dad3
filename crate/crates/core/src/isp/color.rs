use std::collections::BTreeMap;

use ndarray::{Array2, Array3, ArrayView2, Axis};

use super::{RgbImage, XyzImage};
use crate::error::{Error, Result};
use crate::sensor::{Channel, ColorFilterArray};
use crate::spectral::cie::cmf;
use crate::spectral::{photon_energy, SpectralImage, WavelengthGrid, LUMINOUS_EFFICACY};

/// Linear sRGB from XYZ, D65 white.
pub const SRGB_FROM_XYZ: [[f64; 3]; 3] = [
    [3.2404542, -1.5371385, -0.4985314],
    [-0.9692660, 1.8760108, 0.0415560],
    [0.0556434, -0.2040259, 1.0572252],
];

const CMF_MIN_NM: f64 = 360.0;
const CMF_MAX_NM: f64 = 780.0;

fn check_cmf_support(grid: &WavelengthGrid) -> Result<()> {
    if grid.start_nm < CMF_MIN_NM - 1e-9 || grid.end_nm() > CMF_MAX_NM + 1e-9 {
        return Err(Error::Domain(format!(
            "grid [{}, {}] nm leaves the colour-matching table [{CMF_MIN_NM}, {CMF_MAX_NM}]",
            grid.start_nm,
            grid.end_nm()
        )));
    }
    Ok(())
}

/// XYZ weights per photon: 683·cmf(λ)·hc/λ.
fn photon_cmf(nm: f64) -> [f64; 3] {
    let e = LUMINOUS_EFFICACY * photon_energy(nm);
    let c = cmf(nm);
    [c[0] * e, c[1] * e, c[2] * e]
}

/// Tristimulus values of a spectral image. Y is luminance in cd/m² for
/// radiance and illuminance in lux for irradiance.
pub fn spectral_to_xyz(img: &SpectralImage) -> Result<XyzImage> {
    check_cmf_support(img.grid())?;
    let mut planes = Array3::zeros((3, img.rows(), img.cols()));
    for k in 0..3 {
        let p = img.weighted_band_sum(|nm| photon_cmf(nm)[k]);
        planes.index_axis_mut(Axis(0), k).assign(&p);
    }
    XyzImage::new(planes)
}

/// 8-bit interleaved RGB, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rgb8Image {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

impl Rgb8Image {
    pub fn pixel(&self, r: usize, c: usize) -> [u8; 3] {
        let i = 3 * (r * self.cols + c);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

fn srgb_encode(v: f64) -> f64 {
    if v <= 0.0031308 {
        12.92 * v
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

/// Linear sRGB of `xyz·exposure_scale`, unclipped.
pub fn xyz_to_linear_srgb(xyz: [f64; 3], exposure_scale: f64) -> [f64; 3] {
    let m = &SRGB_FROM_XYZ;
    let s = [xyz[0] * exposure_scale, xyz[1] * exposure_scale, xyz[2] * exposure_scale];
    [0, 1, 2].map(|i| m[i][0] * s[0] + m[i][1] * s[1] + m[i][2] * s[2])
}

/// Display rendering: linear sRGB, clip to [0, 1], sRGB transfer curve,
/// 8-bit quantization.
pub fn xyz_to_srgb_display(img: &XyzImage, exposure_scale: f64) -> Result<Rgb8Image> {
    if !(exposure_scale > 0.0) || !exposure_scale.is_finite() {
        return Err(Error::Domain(format!("exposure scale must be positive, got {exposure_scale}")));
    }
    let (rows, cols) = (img.rows(), img.cols());
    let mut data = Vec::with_capacity(rows * cols * 3);
    for r in 0..rows {
        for c in 0..cols {
            for v in xyz_to_linear_srgb(img.pixel(r, c), exposure_scale) {
                // Round-off can leave a white at 1 − 1e-7; the tolerance keeps it at 255.
                let v = if (v - 1.0).abs() < 1e-6 { 1.0 } else { v.clamp(0.0, 1.0) };
                data.push((srgb_encode(v) * 255.0).round() as u8);
            }
        }
    }
    Ok(Rgb8Image { rows, cols, data })
}

fn lab_f(t: f64) -> f64 {
    const D: f64 = 6.0 / 29.0;
    if t > D * D * D {
        t.cbrt()
    } else {
        t / (3.0 * D * D) + 4.0 / 29.0
    }
}

/// CIELAB of one XYZ triple relative to `white`.
pub fn lab_from_xyz(xyz: [f64; 3], white: [f64; 3]) -> [f64; 3] {
    let fx = lab_f(xyz[0] / white[0]);
    let fy = lab_f(xyz[1] / white[1]);
    let fz = lab_f(xyz[2] / white[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaE {
    pub map: Array2<f64>,
    pub mean: f64,
}

/// CIE 1976 ΔE*ab per pixel between two XYZ images under `white`.
pub fn delta_e(a: &XyzImage, b: &XyzImage, white: [f64; 3]) -> Result<DeltaE> {
    if white.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::Config(format!("white point must be positive, got {white:?}")));
    }
    if a.planes.dim() != b.planes.dim() {
        return Err(Error::Structural(format!(
            "XYZ images differ in size: {:?} vs {:?}",
            a.planes.dim(),
            b.planes.dim()
        )));
    }
    let (rows, cols) = (a.rows(), a.cols());
    let map = Array2::from_shape_fn((rows, cols), |(r, c)| {
        let la = lab_from_xyz(a.pixel(r, c), white);
        let lb = lab_from_xyz(b.pixel(r, c), white);
        ((la[0] - lb[0]).powi(2) + (la[1] - lb[1]).powi(2) + (la[2] - lb[2]).powi(2)).sqrt()
    });
    let mean = if map.is_empty() { 0.0 } else { map.iter().sum::<f64>() / map.len() as f64 };
    Ok(DeltaE { map, mean })
}

fn invert3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            *v = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    Some(inv)
}

/// Sensor color model: per-channel flat-spectrum responses used for white
/// balance, and a white-preserving least-squares 3×3 matrix from balanced
/// camera RGB to XYZ.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraColor {
    pub grid: WavelengthGrid,
    /// Σ QE·Δλ per channel.
    pub channel_response: BTreeMap<Channel, f64>,
    pub matrix: [[f64; 3]; 3],
}

impl CameraColor {
    /// Fit over monochromatic stimuli on `grid`.
    pub fn fit(cfa: &ColorFilterArray, grid: &WavelengthGrid) -> Result<Self> {
        cfa.validate()?;
        check_cmf_support(grid)?;
        let mut channel_response = BTreeMap::new();
        for ch in cfa.channels() {
            let s: f64 = grid.wavelengths().map(|nm| cfa.qe(ch, nm) * grid.step_nm).sum();
            if !(s > 0.0) {
                return Err(Error::Config(format!("channel {ch} has no response on the grid")));
            }
            channel_response.insert(ch, s);
        }
        let rgb = [Channel::R, Channel::G, Channel::B];
        for ch in rgb {
            if !channel_response.contains_key(&ch) {
                return Err(Error::Config(format!("CFA has no {ch} channel")));
            }
        }
        // Rows of M minimize Σ_λ (m·n(λ) − t(λ))² subject to m·(1,1,1) = w,
        // so a flat photon spectrum, which balances to (1,1,1), maps to its
        // exact tristimulus values.
        let mut nnt = [[0.0; 3]; 3];
        let mut tnt = [[0.0; 3]; 3];
        let mut white = [0.0; 3];
        for nm in grid.wavelengths() {
            let n = rgb.map(|ch| cfa.qe(ch, nm) / channel_response[&ch]);
            let t = photon_cmf(nm);
            for i in 0..3 {
                white[i] += t[i] * grid.step_nm;
                for j in 0..3 {
                    nnt[i][j] += n[i] * n[j];
                    tnt[i][j] += t[i] * n[j];
                }
            }
        }
        let inv = invert3(nnt)
            .ok_or_else(|| Error::Config("color channels are linearly dependent on this grid".into()))?;
        let inv_ones: [f64; 3] = [0, 1, 2].map(|j| (0..3).map(|k| inv[k][j]).sum());
        let denom: f64 = inv_ones.iter().sum();
        let mut matrix = [[0.0; 3]; 3];
        for i in 0..3 {
            let ls: [f64; 3] = [0, 1, 2].map(|j| (0..3).map(|k| tnt[i][k] * inv[k][j]).sum());
            let mu = (ls.iter().sum::<f64>() - white[i]) / denom;
            for j in 0..3 {
                matrix[i][j] = ls[j] - mu * inv_ones[j];
            }
        }
        Ok(CameraColor { grid: *grid, channel_response, matrix })
    }

    /// Divide each mosaic sample (electrons) by `area_time` (m²·s) and its
    /// channel's flat-spectrum response, giving a common irradiance scale.
    pub fn balance_mosaic(&self, electrons: ArrayView2<f64>, cfa: &ColorFilterArray, area_time: f64) -> Result<Array2<f64>> {
        if !(area_time > 0.0) {
            return Err(Error::Config(format!("area·time must be positive, got {area_time}")));
        }
        let (tr, tc) = cfa.tile();
        let mut k = vec![vec![0.0; tc]; tr];
        for (r, row) in k.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                let ch = cfa.channel_at(r, c);
                let s = self
                    .channel_response
                    .get(&ch)
                    .ok_or_else(|| Error::Config(format!("no calibration for channel {ch}")))?;
                *v = 1.0 / (s * area_time);
            }
        }
        Ok(Array2::from_shape_fn(electrons.dim(), |(r, c)| electrons[[r, c]] * k[r % tr][c % tc]))
    }

    /// XYZ of balanced camera RGB; negative results clip to zero.
    pub fn to_xyz(&self, rgb: &RgbImage) -> Result<XyzImage> {
        let (rows, cols) = (rgb.rows(), rgb.cols());
        let mut planes = Array3::zeros((3, rows, cols));
        for r in 0..rows {
            for c in 0..cols {
                let v = [rgb.planes[[0, r, c]], rgb.planes[[1, r, c]], rgb.planes[[2, r, c]]];
                for i in 0..3 {
                    let x: f64 = (0..3).map(|j| self.matrix[i][j] * v[j]).sum();
                    planes[[i, r, c]] = x.max(0.0);
                }
            }
        }
        XyzImage::new(planes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor::default_rgb_qe;
    use crate::spectral::{luminance_map, SpectralKind};
    use crate::spectral::cie::D65_WHITE;

    #[test]
    fn zero_in_zero_out() {
        let grid = WavelengthGrid::default();
        let img = SpectralImage::zeros(3, 4, grid, SpectralKind::Radiance);
        let xyz = spectral_to_xyz(&img).unwrap();
        assert!(xyz.planes.iter().all(|&v| v == 0.0));
        let d = xyz_to_srgb_display(&xyz, 1.0).unwrap();
        assert!(d.data.iter().all(|&v| v == 0));
    }

    #[test]
    fn equal_energy_chromaticity() {
        let grid = WavelengthGrid::default();
        // Equal energy: photons ∝ λ.
        let data = Array3::from_shape_fn((grid.count, 1, 1), |(b, _, _)| grid.wavelength(b));
        let img = SpectralImage::new(grid, SpectralKind::Radiance, data).unwrap();
        let p = spectral_to_xyz(&img).unwrap().pixel(0, 0);
        let s = p[0] + p[1] + p[2];
        assert!((p[0] / s - 1.0 / 3.0).abs() < 0.01);
        assert!((p[1] / s - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn y_equals_luminance() {
        let grid = WavelengthGrid::default();
        let data = Array3::from_shape_fn((grid.count, 2, 3), |(b, r, c)| 1e16 * (1.0 + b as f64 * 0.1 + r as f64 + c as f64));
        let img = SpectralImage::new(grid, SpectralKind::Radiance, data).unwrap();
        let y = spectral_to_xyz(&img).unwrap();
        let l = luminance_map(&img).unwrap();
        for (a, b) in y.y().iter().zip(l.iter()) {
            assert!((a - b).abs() <= 0.005 * b);
        }
    }

    #[test]
    fn grid_outside_cmf_rejected() {
        let grid = WavelengthGrid::new(350.0, 10.0, 5).unwrap();
        let img = SpectralImage::zeros(1, 1, grid, SpectralKind::Radiance);
        assert!(matches!(spectral_to_xyz(&img), Err(Error::Domain(_))));
    }

    fn one_pixel(xyz: [f64; 3]) -> XyzImage {
        XyzImage::new(Array3::from_shape_fn((3, 1, 1), |(k, _, _)| xyz[k])).unwrap()
    }

    #[test]
    fn d65_renders_white() {
        let d = xyz_to_srgb_display(&one_pixel(D65_WHITE), 1.0).unwrap();
        assert_eq!(d.pixel(0, 0), [255, 255, 255]);
        let lin = xyz_to_linear_srgb(D65_WHITE, 1.0);
        for v in lin {
            assert!((v - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn exposure_scale_is_linear() {
        let xyz = [0.2, 0.25, 0.1];
        let a = xyz_to_linear_srgb(xyz, 0.5);
        let b = xyz_to_linear_srgb(xyz, 1.0);
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((2.0 * x - y).abs() < 1e-15);
        }
        assert!(xyz_to_srgb_display(&one_pixel(xyz), 0.0).is_err());
    }

    #[test]
    fn lab_hand_values() {
        // Y/Yn = 0.18 → f = 0.564642, L* = 49.4967.
        let white = [0.95047, 1.0, 1.08883];
        let lab = lab_from_xyz([0.95047 * 0.18, 0.18, 1.08883 * 0.18], white);
        assert!((lab[0] - (116.0 * 0.18f64.cbrt() - 16.0)).abs() < 1e-12);
        assert!(lab[1].abs() < 1e-12 && lab[2].abs() < 1e-12);
        // Below the cube-root knee the linear segment applies.
        let t = 0.001;
        let lab = lab_from_xyz([t * 0.95047, t, t * 1.08883], white);
        assert!((lab[0] - (116.0 * (t * 841.0 / 108.0 + 4.0 / 29.0) - 16.0)).abs() < 1e-12);
    }

    #[test]
    fn delta_e_identity_and_errors() {
        let a = one_pixel([0.3, 0.4, 0.2]);
        let d = delta_e(&a, &a, D65_WHITE).unwrap();
        assert_eq!(d.mean, 0.0);
        assert!(matches!(delta_e(&a, &a, [0.0, 1.0, 1.0]), Err(Error::Config(_))));
        let b = XyzImage::new(Array3::zeros((3, 2, 1))).unwrap();
        assert!(matches!(delta_e(&a, &b, D65_WHITE), Err(Error::Structural(_))));
    }

    #[test]
    fn camera_fit_preserves_flat_white() {
        let cfa = ColorFilterArray::bayer_rggb(default_rgb_qe());
        let grid = WavelengthGrid::default();
        let cam = CameraColor::fit(&cfa, &grid).unwrap();
        // A flat photon spectrum of level E balances to RGB = (E, E, E).
        let e = 1e16;
        let data = Array3::from_elem((grid.count, 1, 1), e);
        let truth = spectral_to_xyz(&SpectralImage::new(grid, SpectralKind::Irradiance, data).unwrap()).unwrap();
        let rgb = RgbImage::new(Array3::from_elem((3, 1, 1), e), super::super::Primaries::SensorNative).unwrap();
        let est = cam.to_xyz(&rgb).unwrap();
        let white = truth.pixel(0, 0);
        let de = delta_e(&est, &truth, white).unwrap();
        assert!(de.mean < 1e-9, "ΔE {}", de.mean);
        for (a, b) in est.planes.iter().zip(truth.planes.iter()) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn invert_identity() {
        let m = [[2.0, 0.0, 0.0], [0.0, 4.0, 0.0], [1.0, 0.0, 1.0]];
        let inv = invert3(m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        assert!(invert3([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]]).is_none());
    }
}
