use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
pub fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut g = [0.0; SSIM_WINDOW];
    for (i, v) in g.iter_mut().enumerate() {
        let d = i as f64 - half;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = g.iter().sum();
    g.map(|v| v / s)
}

/// Valid-region separable filtering.
fn filter(img: &Array2<f64>, g: &[f64; SSIM_WINDOW]) -> Array2<f64> {
    let (rows, cols) = img.dim();
    let (or, oc) = (rows + 1 - SSIM_WINDOW, cols + 1 - SSIM_WINDOW);
    let horiz = Array2::from_shape_fn((rows, oc), |(r, c)| {
        g.iter().enumerate().map(|(k, w)| w * img[[r, c + k]]).sum::<f64>()
    });
    Array2::from_shape_fn((or, oc), |(r, c)| {
        g.iter().enumerate().map(|(k, w)| w * horiz[[r + k, c]]).sum::<f64>()
    })
}

/// Local SSIM for every fully contained 11×11 window.
pub fn ssim_map(a: ArrayView2<f64>, b: ArrayView2<f64>, data_range: f64) -> Result<Array2<f64>> {
    if a.dim() != b.dim() {
        return Err(Error::Structural(format!(
            "SSIM inputs differ in size: {:?} vs {:?}",
            a.dim(),
            b.dim()
        )));
    }
    let (rows, cols) = a.dim();
    if rows < SSIM_WINDOW || cols < SSIM_WINDOW {
        return Err(Error::Structural(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {rows}x{cols}"
        )));
    }
    if !(data_range > 0.0) || !data_range.is_finite() {
        return Err(Error::Domain(format!("SSIM data range must be positive, got {data_range}")));
    }
    let g = gaussian_taps();
    let (a, b) = (a.to_owned(), b.to_owned());
    let mu_a = filter(&a, &g);
    let mu_b = filter(&b, &g);
    let aa = filter(&(&a * &a), &g);
    let bb = filter(&(&b * &b), &g);
    let ab = filter(&(&a * &b), &g);
    let c1 = (SSIM_K1 * data_range).powi(2);
    let c2 = (SSIM_K2 * data_range).powi(2);
    Ok(Array2::from_shape_fn(mu_a.dim(), |i| {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = aa[i] - ma * ma;
        let vb = bb[i] - mb * mb;
        let cov = ab[i] - ma * mb;
        ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2))
    }))
}

/// Mean local SSIM of two greyscale images.
pub fn ssim(a: ArrayView2<f64>, b: ArrayView2<f64>, data_range: f64) -> Result<f64> {
    let m = ssim_map(a, b, data_range)?;
    Ok(m.iter().sum::<f64>() / m.len() as f64)
}
