//! Aperture shape and scattering occluders (dust, scratches).
//!
//! The mask is an amplitude transmission over an n×n pupil grid whose
//! inscribed disk is the full lens pupil. Occluders are neutral: the same
//! mask applies at every wavelength.

use std::f64::consts::PI;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DUST_STREAM: u64 = 1;
const SCRATCH_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApertureSpec {
    /// Number of diaphragm blades; 0 means a circular aperture.
    pub n_blades: u32,
    /// Rotation of the blade polygon, radians.
    pub blade_rotation: f64,
    /// Entrance pupil diameter, mm.
    pub pupil_diameter: f64,
    pub dust_count: usize,
    /// Dust disk radius range as fractions of the pupil radius.
    pub dust_radius_range: (f64, f64),
    pub scratch_count: usize,
    pub scratch_width_range: (f64, f64),
    pub scratch_length_range: (f64, f64),
    /// Attenuation applied inside each occluder: 1 is fully opaque.
    pub occlusion_opacity: f64,
    pub seed: u64,
}

impl Default for ApertureSpec {
    fn default() -> Self {
        ApertureSpec {
            n_blades: 0,
            blade_rotation: 0.0,
            pupil_diameter: 1.0,
            dust_count: 0,
            dust_radius_range: (0.01, 0.03),
            scratch_count: 0,
            scratch_width_range: (0.002, 0.006),
            scratch_length_range: (0.2, 0.6),
            occlusion_opacity: 1.0,
            seed: 0,
        }
    }
}

fn check_range(name: &str, r: (f64, f64)) -> Result<()> {
    let (lo, hi) = r;
    if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
        return Err(Error::Config(format!(
            "{name} must satisfy 0 < min ≤ max ≤ 1, got ({lo}, {hi})"
        )));
    }
    Ok(())
}

impl ApertureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_blades != 0 && self.n_blades < 3 {
            return Err(Error::Config(format!(
                "aperture needs 0 (circular) or at least 3 blades, got {}",
                self.n_blades
            )));
        }
        if !(self.pupil_diameter > 0.0) || !self.pupil_diameter.is_finite() {
            return Err(Error::Config(format!(
                "pupil diameter must be positive, got {}",
                self.pupil_diameter
            )));
        }
        if !self.blade_rotation.is_finite() {
            return Err(Error::Config("blade rotation must be finite".into()));
        }
        check_range("dust_radius_range", self.dust_radius_range)?;
        check_range("scratch_width_range", self.scratch_width_range)?;
        check_range("scratch_length_range", self.scratch_length_range)?;
        if !(0.0..=1.0).contains(&self.occlusion_opacity) {
            return Err(Error::Config(format!(
                "occlusion opacity must lie in [0, 1], got {}",
                self.occlusion_opacity
            )));
        }
        Ok(())
    }
}

/// Amplitude transmission over the pupil grid, values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ApodizationMask {
    pub n: usize,
    pub values: Array2<f64>,
    /// Physical size of one pupil sample, mm.
    pub pupil_pixel_pitch: f64,
}

impl ApodizationMask {
    /// Normalized pupil coordinate of pixel index `i` (center of the pixel).
    pub fn coord(n: usize, i: usize) -> f64 {
        let half = n as f64 / 2.0;
        (i as f64 + 0.5 - half) / half
    }

    /// Fraction of the circumscribed disk that transmits (sum of values / disk area).
    pub fn open_fraction(&self) -> f64 {
        let half = self.n as f64 / 2.0;
        self.values.sum() / (PI * half * half)
    }
}

fn inside_polygon(x: f64, y: f64, blades: u32, rotation: f64) -> bool {
    let nb = blades as f64;
    let apothem = (PI / nb).cos();
    (0..blades).all(|k| {
        let phi = rotation + PI / nb + 2.0 * PI * k as f64 / nb;
        x * phi.cos() + y * phi.sin() <= apothem
    })
}

/// Pixel index span covering normalized coordinates `[lo, hi]`.
fn index_span(n: usize, lo: f64, hi: f64) -> std::ops::Range<usize> {
    let half = n as f64 / 2.0;
    let a = ((lo * half + half - 0.5).floor().max(0.0)) as usize;
    let b = ((hi * half + half - 0.5).ceil() + 1.0).clamp(0.0, n as f64) as usize;
    a.min(n)..b
}

fn random_in_disk(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let r = rng.random::<f64>().sqrt();
    let t = 2.0 * PI * rng.random::<f64>();
    (r * t.cos(), r * t.sin())
}

fn uniform(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    range.0 + (range.1 - range.0) * rng.random::<f64>()
}

/// Build the aperture mask: blade polygon (or disk) with dust disks and
/// scratch segments multiplied in at the occlusion attenuation.
///
/// Dust and scratches come from separate seeded streams, so raising
/// `dust_count` keeps the earlier dust particles in place.
pub fn synthesize_apodization(spec: &ApertureSpec, n: usize) -> Result<ApodizationMask> {
    spec.validate()?;
    if n < 64 || n % 2 != 0 {
        return Err(Error::Config(format!(
            "pupil grid must be even and at least 64, got {n}"
        )));
    }
    let coords: Vec<f64> = (0..n).map(|i| ApodizationMask::coord(n, i)).collect();
    let mut values = Array2::from_shape_fn((n, n), |(r, c)| {
        let (x, y) = (coords[c], coords[r]);
        let inside = if spec.n_blades == 0 {
            x * x + y * y <= 1.0
        } else {
            inside_polygon(x, y, spec.n_blades, spec.blade_rotation)
        };
        if inside {
            1.0
        } else {
            0.0
        }
    });

    let keep = 1.0 - spec.occlusion_opacity;

    let mut dust_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    dust_rng.set_stream(DUST_STREAM);
    for _ in 0..spec.dust_count {
        let (cx, cy) = random_in_disk(&mut dust_rng);
        let rad = uniform(&mut dust_rng, spec.dust_radius_range);
        for r in index_span(n, cy - rad, cy + rad) {
            for c in index_span(n, cx - rad, cx + rad) {
                let (dx, dy) = (coords[c] - cx, coords[r] - cy);
                if dx * dx + dy * dy <= rad * rad {
                    values[[r, c]] *= keep;
                }
            }
        }
    }

    let mut scratch_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    scratch_rng.set_stream(SCRATCH_STREAM);
    for _ in 0..spec.scratch_count {
        let (cx, cy) = random_in_disk(&mut scratch_rng);
        let angle = PI * scratch_rng.random::<f64>();
        let len = uniform(&mut scratch_rng, spec.scratch_length_range);
        let half_w = 0.5 * uniform(&mut scratch_rng, spec.scratch_width_range);
        let (ux, uy) = (angle.cos(), angle.sin());
        let (ax, ay) = (cx - 0.5 * len * ux, cy - 0.5 * len * uy);
        let (bx, by) = (cx + 0.5 * len * ux, cy + 0.5 * len * uy);
        let rows = index_span(n, ay.min(by) - half_w, ay.max(by) + half_w);
        let cols = index_span(n, ax.min(bx) - half_w, ax.max(bx) + half_w);
        for r in rows {
            for c in cols.clone() {
                let (px, py) = (coords[c] - ax, coords[r] - ay);
                let t = (px * ux + py * uy).clamp(0.0, len);
                let (dx, dy) = (px - t * ux, py - t * uy);
                if dx * dx + dy * dy <= half_w * half_w {
                    values[[r, c]] *= keep;
                }
            }
        }
    }

    Ok(ApodizationMask {
        n,
        values,
        pupil_pixel_pitch: spec.pupil_diameter / n as f64,
    })
}
