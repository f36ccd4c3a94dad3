use ndarray::{Array2, Array3, ArrayView2};

use super::{Primaries, RgbImage};
use crate::error::{Error, Result};
use crate::sensor::{Channel, ColorFilterArray};

/// Luma weights used to guide RGBW reconstruction.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Bounds on the per-pixel W/luma gain.
pub const RGBW_SCALE_RANGE: (f64, f64) = (0.25, 4.0);

const KERNEL: [[f64; 3]; 3] = [[0.25, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 0.25]];

fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let j = if i < 0 {
        -i
    } else if i >= n {
        2 * (n - 1) - i
    } else {
        i
    };
    j.clamp(0, n - 1) as usize
}

fn check(mosaic: ArrayView2<f64>, cfa: &ColorFilterArray) -> Result<()> {
    cfa.validate()?;
    let (tr, tc) = cfa.tile();
    let (rows, cols) = mosaic.dim();
    if rows == 0 || cols == 0 || rows % tr != 0 || cols % tc != 0 {
        return Err(Error::Structural(format!(
            "mosaic {rows}x{cols} is not a multiple of the {tr}x{tc} CFA tile"
        )));
    }
    if rows < 2 || cols < 2 {
        return Err(Error::Structural("mosaic must be at least 2x2".into()));
    }
    Ok(())
}

/// One channel interpolated from its own sample lattice: samples are kept,
/// other pixels get the normalized 3×3 bilinear average of neighboring
/// samples, with the border mirrored.
pub fn interpolate_channel(mosaic: ArrayView2<f64>, cfa: &ColorFilterArray, ch: Channel) -> Array2<f64> {
    let (rows, cols) = mosaic.dim();
    let (tr, tc) = cfa.tile();
    let tile: Vec<Vec<bool>> = (0..tr)
        .map(|r| (0..tc).map(|c| cfa.channel_at(r, c) == ch).collect())
        .collect();
    let is_ch = |r: usize, c: usize| tile[r % tr][c % tc];
    Array2::from_shape_fn((rows, cols), |(r, c)| {
        if is_ch(r, c) {
            return mosaic[[r, c]];
        }
        let (mut acc, mut wsum) = (0.0, 0.0);
        for (dr, krow) in KERNEL.iter().enumerate() {
            for (dc, &w) in krow.iter().enumerate() {
                let rr = mirror(r as isize + dr as isize - 1, rows);
                let cc = mirror(c as isize + dc as isize - 1, cols);
                if is_ch(rr, cc) {
                    acc += w * mosaic[[rr, cc]];
                    wsum += w;
                }
            }
        }
        if wsum > 0.0 {
            acc / wsum
        } else {
            0.0
        }
    })
}

fn rgb_planes(mosaic: ArrayView2<f64>, cfa: &ColorFilterArray) -> Result<Array3<f64>> {
    let present = cfa.channels();
    for ch in [Channel::R, Channel::G, Channel::B] {
        if !present.contains(&ch) {
            return Err(Error::Config(format!("CFA has no {ch} samples")));
        }
    }
    let (rows, cols) = mosaic.dim();
    let mut out = Array3::zeros((3, rows, cols));
    for (i, ch) in [Channel::R, Channel::G, Channel::B].into_iter().enumerate() {
        out.index_axis_mut(ndarray::Axis(0), i)
            .assign(&interpolate_channel(mosaic, cfa, ch));
    }
    Ok(out)
}

/// Per-channel bilinear demosaic.
pub fn demosaic_bilinear(mosaic: ArrayView2<f64>, cfa: &ColorFilterArray) -> Result<RgbImage> {
    check(mosaic, cfa)?;
    RgbImage::new(rgb_planes(mosaic, cfa)?, Primaries::SensorNative)
}

/// Bilinear R, G, B and W, then each pixel's RGB scaled by W/luma(RGB),
/// clamped to [`RGBW_SCALE_RANGE`]. Channels are expected on a common
/// scale, i.e. after white balance.
pub fn demosaic_rgbw(mosaic: ArrayView2<f64>, cfa: &ColorFilterArray) -> Result<RgbImage> {
    check(mosaic, cfa)?;
    if !cfa.channels().contains(&Channel::W) {
        return Err(Error::Config("RGBW demosaic needs a CFA with W samples".into()));
    }
    let mut rgb = rgb_planes(mosaic, cfa)?;
    let w = interpolate_channel(mosaic, cfa, Channel::W);
    let (rows, cols) = mosaic.dim();
    let (lo, hi) = RGBW_SCALE_RANGE;
    for r in 0..rows {
        for c in 0..cols {
            let luma: f64 = (0..3).map(|k| LUMA_WEIGHTS[k] * rgb[[k, r, c]]).sum();
            let s = if luma > 0.0 { (w[[r, c]] / luma).clamp(lo, hi) } else { 1.0 };
            for k in 0..3 {
                rgb[[k, r, c]] *= s;
            }
        }
    }
    // Noisy inputs may carry small negatives; the guide gain keeps signs.
    RgbImage::new(rgb.mapv(|v| v.max(0.0)), Primaries::SensorNative)
}
