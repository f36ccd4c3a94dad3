use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{HC, LUMINOUS_EFFICACY};

const REFERENCE_NM: f64 = 555.0;

/// Expected photons per pixel for a scene of luminance `luminance` (cd/m²),
/// treating the light as monochromatic at 555 nm:
/// N = (L/683)·(λ/hc)·(π/(4N²))·pitch²·t·fill.
pub fn photon_count_estimate(
    luminance: f64,
    f_number: f64,
    pitch_um: f64,
    exposure: f64,
    fill_factor: f64,
) -> Result<f64> {
    let args = [
        ("luminance", luminance),
        ("f_number", f_number),
        ("pitch", pitch_um),
        ("exposure", exposure),
        ("fill_factor", fill_factor),
    ];
    for (name, v) in args {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let radiance_w = luminance / LUMINOUS_EFFICACY;
    let photons_per_joule = REFERENCE_NM * 1e-9 / HC;
    let irradiance = radiance_w * photons_per_joule * PI / (4.0 * f_number * f_number);
    let area = (pitch_um * 1e-6).powi(2);
    Ok(irradiance * area * exposure * fill_factor)
}
