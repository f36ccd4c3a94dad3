use ndarray::{Array2, ArrayView2};

use super::{cie, photon_energy, SpectralImage, SpectralKind, LUMINOUS_EFFICACY};
use crate::error::{Error, Result};

/// Low/high percentiles used when measuring scene dynamic range.
pub const DEFAULT_CLIP_PERCENTILES: (f64, f64) = (0.1, 99.9);

/// Photopic luminance of a radiance image, cd/m².
pub fn luminance_map(img: &SpectralImage) -> Result<Array2<f64>> {
    if img.kind() != SpectralKind::Radiance {
        return Err(Error::Domain(
            "luminance is defined for radiance images; this one holds irradiance".into(),
        ));
    }
    Ok(img.weighted_band_sum(|nm| LUMINOUS_EFFICACY * cie::v_lambda(nm) * photon_energy(nm)))
}

pub fn mean_luminance(lum: ArrayView2<f64>) -> f64 {
    // Sequential sum keeps the result independent of thread count.
    lum.iter().sum::<f64>() / lum.len() as f64
}

/// Percentile of already sorted samples with linear interpolation between ranks.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let p = p.clamp(0.0, 100.0);
    let pos = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let t = pos - lo as f64;
        sorted[lo] * (1.0 - t) + sorted[hi] * t
    }
}

/// log₁₀ ratio between the high and low percentiles of the strictly positive samples.
pub fn dynamic_range(lum: ArrayView2<f64>, clip_percentiles: (f64, f64)) -> Result<f64> {
    let (lo, hi) = clip_percentiles;
    if !(0.0..=100.0).contains(&lo) || !(0.0..=100.0).contains(&hi) || lo > hi {
        return Err(Error::Domain(format!(
            "percentiles must satisfy 0 ≤ low ≤ high ≤ 100, got ({lo}, {hi})"
        )));
    }
    let mut positive: Vec<f64> = lum.iter().copied().filter(|v| *v > 0.0).collect();
    if positive.is_empty() {
        return Err(Error::Domain("dynamic range of an all-zero map is undefined".into()));
    }
    positive.sort_by(f64::total_cmp);
    let p_lo = percentile(&positive, lo);
    let p_hi = percentile(&positive, hi);
    Ok((p_hi / p_lo).log10())
}

/// Copy of one image row, left to right.
pub fn line_profile(map: ArrayView2<f64>, row: usize) -> Result<Vec<f64>> {
    let rows = map.nrows();
    if row >= rows {
        return Err(Error::Bounds { index: row, len: rows });
    }
    Ok(map.row(row).to_vec())
}
