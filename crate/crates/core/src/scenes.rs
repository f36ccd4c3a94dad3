//! Synthetic HDR scene generators. Levels are luminances in cd/m²;
//! spectra are flat in photon units unless stated otherwise.

use ndarray::{Array2, Array3, Axis};

use crate::error::{Error, Result};
use crate::spectral::cie::{checker_reflectance, d65, v_lambda};
use crate::spectral::{
    photon_energy, LightGroup, SpectralImage, SpectralKind, WavelengthGrid, LUMINOUS_EFFICACY,
};

/// Luminance of a flat photon spectrum of unit level on `grid`.
pub fn flat_spectrum_luminance(grid: &WavelengthGrid) -> f64 {
    grid.wavelengths()
        .map(|nm| LUMINOUS_EFFICACY * v_lambda(nm) * photon_energy(nm) * grid.step_nm)
        .sum()
}

fn flat_radiance(map: &Array2<f64>, grid: &WavelengthGrid) -> Result<SpectralImage> {
    let unit = flat_spectrum_luminance(grid);
    if !(unit > 0.0) {
        return Err(Error::Domain("grid has no photopic response".into()));
    }
    let spd = vec![1.0 / unit; grid.count];
    SpectralImage::from_map_and_spectrum(map.view(), &spd, *grid, SpectralKind::Radiance)
}

fn check_levels(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::Config(format!("{name} must be finite and ≥ 0, got {v}")));
    }
    Ok(())
}

/// A row of square emitters on a dark background, each `decade_step`
/// times dimmer than its left neighbor.
pub fn gen_point_grid_scene(
    rows: usize,
    cols: usize,
    grid: &WavelengthGrid,
    n_sources: usize,
    top_level: f64,
    decade_step: f64,
    background_level: f64,
) -> Result<SpectralImage> {
    grid.validate()?;
    if n_sources == 0 {
        return Err(Error::Config("need at least one source".into()));
    }
    if !(background_level > 0.0 && top_level > background_level) || !top_level.is_finite() {
        return Err(Error::Config(format!(
            "need top_level > background_level > 0, got {top_level} and {background_level}"
        )));
    }
    if !(decade_step >= 1.0) || !decade_step.is_finite() {
        return Err(Error::Config(format!("decade step must be ≥ 1, got {decade_step}")));
    }
    let cell = cols / n_sources;
    let side = (cell / 2).min(rows / 2).min(8);
    if side == 0 {
        return Err(Error::Config(format!(
            "{n_sources} sources do not fit a {rows}x{cols} image"
        )));
    }
    let mut map = Array2::from_elem((rows, cols), background_level);
    let r0 = (rows - side) / 2;
    for i in 0..n_sources {
        let level = top_level / decade_step.powi(i as i32);
        if level < background_level {
            return Err(Error::Config(format!(
                "source {i} at {level} cd/m² falls below the background"
            )));
        }
        let c0 = i * cell + (cell - side) / 2;
        map.slice_mut(ndarray::s![r0..r0 + side, c0..c0 + side]).fill(level);
    }
    flat_radiance(&map, grid)
}

/// Horizontal log-linear luminance ramp and its analytic column levels.
#[derive(Debug, Clone)]
pub struct RampScene {
    pub image: SpectralImage,
    /// Ground-truth luminance of each column, cd/m².
    pub column_luminance: Vec<f64>,
}

/// L(c) = min_level·10^(decades·c/(cols−1)).
pub fn gen_ramp_scene(
    rows: usize,
    cols: usize,
    grid: &WavelengthGrid,
    decades: f64,
    min_level: f64,
) -> Result<RampScene> {
    grid.validate()?;
    if !(decades > 0.0) || !decades.is_finite() {
        return Err(Error::Config(format!("decades must be positive, got {decades}")));
    }
    if !(min_level > 0.0) || !min_level.is_finite() {
        return Err(Error::Config(format!("minimum level must be positive, got {min_level}")));
    }
    if rows == 0 || cols < 2 {
        return Err(Error::Config("ramp needs at least one row and two columns".into()));
    }
    let column_luminance: Vec<f64> = (0..cols)
        .map(|c| min_level * 10f64.powf(decades * c as f64 / (cols - 1) as f64))
        .collect();
    let map = Array2::from_shape_fn((rows, cols), |(_, c)| column_luminance[c]);
    Ok(RampScene {
        image: flat_radiance(&map, grid)?,
        column_luminance,
    })
}

/// Wall texture shared by the interior and the exit: vertical bars
/// alternating between 1 and 1/2 with an 8-pixel period.
pub fn tunnel_texture(rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |(_, c)| if (c / 4) % 2 == 0 { 1.0 } else { 0.5 })
}

/// Radius of the tunnel exit disk in pixels.
pub fn tunnel_exit_radius(rows: usize, cols: usize) -> f64 {
    rows.min(cols) as f64 / 6.0
}

/// True inside the tunnel exit disk.
pub fn tunnel_exit_mask(rows: usize, cols: usize) -> Array2<bool> {
    let (cy, cx) = ((rows as f64 - 1.0) / 2.0, (cols as f64 - 1.0) / 2.0);
    let rad = tunnel_exit_radius(rows, cols);
    Array2::from_shape_fn((rows, cols), |(r, c)| {
        (r as f64 - cy).powi(2) + (c as f64 - cx).powi(2) <= rad * rad
    })
}

/// Tunnel seen from inside: the `otherlights` member is the dim interior
/// ambient covering the frame, the `sky` member is the bright exit disk.
/// Both carry the same bar texture. The headlight and streetlight members
/// are dark, ready for user weights on externally rendered sources.
pub fn gen_tunnel_scene(
    rows: usize,
    cols: usize,
    grid: &WavelengthGrid,
    interior_level: f64,
    exit_level: f64,
) -> Result<LightGroup> {
    grid.validate()?;
    check_levels("interior level", interior_level)?;
    check_levels("exit level", exit_level)?;
    if !(interior_level > 0.0) {
        return Err(Error::Config("interior level must be positive".into()));
    }
    if exit_level != 0.0 && exit_level < interior_level {
        return Err(Error::Config(format!(
            "exit level {exit_level} must exceed the interior level {interior_level}"
        )));
    }
    if rows < 6 || cols < 6 {
        return Err(Error::Config("tunnel needs at least 6x6 pixels".into()));
    }
    let tex = tunnel_texture(rows, cols);
    let mask = tunnel_exit_mask(rows, cols);
    let interior = tex.mapv(|t| t * interior_level);
    let exit = Array2::from_shape_fn((rows, cols), |i| if mask[i] { tex[i] * exit_level } else { 0.0 });
    let dark = SpectralImage::zeros(rows, cols, *grid, SpectralKind::Radiance);
    LightGroup::new([
        flat_radiance(&exit, grid)?,
        dark.clone(),
        dark,
        flat_radiance(&interior, grid)?,
    ])
}

/// 4×6 reflectance chart under D65, scaled so a perfect white diffuser
/// would have luminance `white_luminance`.
pub fn gen_macbeth_scene(
    rows: usize,
    cols: usize,
    grid: &WavelengthGrid,
    white_luminance: f64,
) -> Result<SpectralImage> {
    grid.validate()?;
    if !(white_luminance > 0.0) || !white_luminance.is_finite() {
        return Err(Error::Config(format!("white luminance must be positive, got {white_luminance}")));
    }
    if rows < 4 || cols < 6 {
        return Err(Error::Config("chart needs at least 4x6 pixels".into()));
    }
    // Photon spectrum of D65: energy SPD divided by photon energy.
    let illum: Vec<f64> = grid.wavelengths().map(|nm| d65(nm) / photon_energy(nm)).collect();
    let white: f64 = grid
        .wavelengths()
        .zip(illum.iter())
        .map(|(nm, p)| LUMINOUS_EFFICACY * v_lambda(nm) * photon_energy(nm) * p * grid.step_nm)
        .sum();
    let k = white_luminance / white;
    let mut data = Array3::zeros((grid.count, rows, cols));
    for (b, mut plane) in data.axis_iter_mut(Axis(0)).enumerate() {
        let nm = grid.wavelength(b);
        for r in 0..rows {
            for c in 0..cols {
                plane[[r, c]] = k * illum[b] * checker_reflectance(macbeth_patch(rows, cols, r, c), nm);
            }
        }
    }
    SpectralImage::new(*grid, SpectralKind::Radiance, data)
}

/// Patch index of pixel (r, c) in a `rows`×`cols` chart.
pub fn macbeth_patch(rows: usize, cols: usize, r: usize, c: usize) -> usize {
    (r * 4 / rows) * 6 + c * 6 / cols
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{compose_light_groups, dynamic_range, luminance_map, GroupKey, GroupWeights};

    fn grid() -> WavelengthGrid {
        WavelengthGrid::default()
    }

    #[test]
    fn flat_level_gives_requested_luminance() {
        let ramp = gen_ramp_scene(2, 5, &grid(), 2.0, 3.0).unwrap();
        let lum = luminance_map(&ramp.image).unwrap();
        for (c, want) in ramp.column_luminance.iter().enumerate() {
            assert!((lum[[1, c]] - want).abs() < 1e-12 * want);
        }
        assert!((ramp.column_luminance[4] - 300.0).abs() < 1e-9);
    }

    #[test]
    fn single_source() {
        let img = gen_point_grid_scene(16, 16, &grid(), 1, 1000.0, 10.0, 0.1).unwrap();
        let lum = luminance_map(&img).unwrap();
        let max = lum.iter().cloned().fold(0.0, f64::max);
        assert!((max - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn sources_step_by_decades() {
        let img = gen_point_grid_scene(32, 64, &grid(), 4, 1e4, 10.0, 0.5).unwrap();
        let lum = luminance_map(&img).unwrap();
        let row = 16;
        for i in 0..4 {
            let c = i * 16 + 8;
            let want = 1e4 / 10f64.powi(i as i32);
            assert!((lum[[row, c]] - want).abs() < 1e-9 * want, "source {i}");
        }
        let dr = dynamic_range(lum.view(), (0.0, 100.0)).unwrap();
        assert!((dr - (1e4f64 / 0.5).log10()).abs() < 0.01);
    }

    #[test]
    fn point_grid_rejects_bad_geometry() {
        assert!(gen_point_grid_scene(4, 4, &grid(), 8, 10.0, 10.0, 1.0).is_err());
        assert!(gen_point_grid_scene(16, 16, &grid(), 1, 1.0, 10.0, 2.0).is_err());
        assert!(gen_point_grid_scene(16, 16, &grid(), 0, 10.0, 10.0, 1.0).is_err());
    }

    #[test]
    fn ramp_ratio_and_range() {
        let ramp = gen_ramp_scene(4, 100, &grid(), 5.0, 0.01).unwrap();
        let r = ramp.column_luminance[99] / ramp.column_luminance[0];
        assert!((r / 1e5 - 1.0).abs() < 1e-3);
        let lum = luminance_map(&ramp.image).unwrap();
        let dr = dynamic_range(lum.view(), (0.0, 100.0)).unwrap();
        assert!((dr - 5.0).abs() < 0.01);
        let flat = gen_ramp_scene(4, 10, &grid(), 1e-4, 1.0).unwrap();
        assert!(flat.column_luminance[9] / flat.column_luminance[0] < 1.001);
        assert!(gen_ramp_scene(4, 10, &grid(), 0.0, 1.0).is_err());
    }

    #[test]
    fn tunnel_range_and_separability() {
        let g = gen_tunnel_scene(48, 64, &grid(), 0.1, 1e4).unwrap();
        let all = compose_light_groups(&g, &GroupWeights::uniform(1.0).unwrap()).unwrap();
        let lum = luminance_map(&all).unwrap();
        assert!(dynamic_range(lum.view(), (0.0, 100.0)).unwrap() >= 5.0);

        let mut w = GroupWeights::uniform(1.0).unwrap();
        w.sky = 0.0;
        let no_sky = luminance_map(&compose_light_groups(&g, &w).unwrap()).unwrap();
        let max = no_sky.iter().cloned().fold(0.0, f64::max);
        assert!(max <= 0.1 + 1e-12);
        let interior = luminance_map(g.member(GroupKey::Otherlights)).unwrap();
        assert_eq!(no_sky, interior);
    }

    #[test]
    fn tunnel_without_exit_is_uniformly_dark() {
        let g = gen_tunnel_scene(24, 24, &grid(), 0.2, 0.0).unwrap();
        let lum = luminance_map(&compose_light_groups(&g, &GroupWeights::uniform(1.0).unwrap()).unwrap()).unwrap();
        let tex = tunnel_texture(24, 24);
        for (i, &v) in lum.indexed_iter() {
            assert!((v - 0.2 * tex[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn macbeth_white_patch_level() {
        let img = gen_macbeth_scene(40, 60, &grid(), 100.0).unwrap();
        let lum = luminance_map(&img).unwrap();
        // Patch 18 is the white patch, reflectance close to 0.9.
        let v = lum[[35, 5]];
        assert_eq!(macbeth_patch(40, 60, 35, 5), 18);
        assert!(v > 80.0 && v < 95.0, "{v}");
        let black = lum[[35, 55]];
        assert!(black < 5.0);
    }
}
