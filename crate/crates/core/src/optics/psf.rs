//! Point-spread functions from pupil fields.
//!
//! A pupil of n samples across its full diameter, zero-padded to an
//! `n_fft`-point transform, gives PSF samples spaced `λ·N·n/n_fft` apart
//! on the sensor plane. Kernels are odd-sized with the zero frequency at
//! the center; the unpaired Nyquist row and column of the even transform
//! are dropped so kernels are exactly point-symmetric for real pupils.

use ndarray::{s, Array2, ArrayView2};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::aperture::ApodizationMask;
use super::fft2::fft2_padded;
use super::pupil::{build_pupil, PupilFunction, WavefrontSpec};
use crate::error::{Error, Result};
use crate::spectral::WavelengthGrid;

/// Largest transform the direct DFT accepts.
pub const DIRECT_DFT_MAX: usize = 128;

/// Energy retained when cropping kernels to their support.
pub const PSF_ENERGY_KEEP: f64 = 1.0 - 1e-4;

/// One normalized PSF sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PsfKernel {
    pub wavelength_nm: f64,
    /// Sensor-plane spacing of the samples, µm.
    pub sample_pitch: f64,
    pub values: Array2<f64>,
}

impl PsfKernel {
    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn center(&self) -> usize {
        self.values.nrows() / 2
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Energy outside a disk of `radius_um` around the kernel center.
    pub fn energy_outside(&self, radius_um: f64) -> f64 {
        let c = self.center() as f64;
        let r2 = (radius_um / self.sample_pitch).powi(2);
        let mut inside = 0.0;
        for ((i, j), v) in self.values.indexed_iter() {
            let (dy, dx) = (i as f64 - c, j as f64 - c);
            if dx * dx + dy * dy <= r2 {
                inside += v;
            }
        }
        self.values.sum() - inside
    }
}

fn check_fft_size(n: usize, n_fft: usize) -> Result<()> {
    if n_fft < n || n_fft % 2 != 0 {
        return Err(Error::Config(format!(
            "transform size must be even and ≥ pupil size {n}, got {n_fft}"
        )));
    }
    Ok(())
}

fn normalized(mut values: Array2<f64>) -> Result<Array2<f64>> {
    let total: f64 = values.sum();
    if !(total > 0.0) {
        return Err(Error::DegeneratePupil("PSF carries no energy".into()));
    }
    values.mapv_inplace(|v| v / total);
    Ok(values)
}

fn pitch_um(pupil: &PupilFunction, n_fft: usize) -> f64 {
    pupil.wavelength_nm * 1e-3 * pupil.f_number * pupil.n() as f64 / n_fft as f64
}

/// P = |FFT2(w)|², centered and normalized to unit sum.
pub fn psf_from_pupil(pupil: &PupilFunction, n_fft: usize) -> Result<PsfKernel> {
    let n = pupil.n();
    check_fft_size(n, n_fft)?;
    if pupil.power() == 0.0 {
        return Err(Error::DegeneratePupil("pupil is dark everywhere".into()));
    }
    let mut planner = FftPlanner::<f64>::new();
    let spectrum = fft2_padded(pupil.field.view(), n_fft, n_fft, &mut planner);
    let half = n_fft / 2;
    let k = n_fft - 1;
    // Output index i holds frequency i − (half − 1), i.e. −(half−1)..=(half−1).
    let values = Array2::from_shape_fn((k, k), |(i, j)| {
        let fu = (i + n_fft + 1 - half) % n_fft;
        let fv = (j + n_fft + 1 - half) % n_fft;
        spectrum[[fu, fv]].norm_sqr()
    });
    Ok(PsfKernel {
        wavelength_nm: pupil.wavelength_nm,
        sample_pitch: pitch_um(pupil, n_fft),
        values: normalized(values)?,
    })
}

/// Same contract as [`psf_from_pupil`], evaluated as an explicit nested-sum DFT.
///
/// Cost is O(n²·n_fft²); refused above [`DIRECT_DFT_MAX`].
pub fn psf_direct_dft(pupil: &PupilFunction, n_fft: usize) -> Result<PsfKernel> {
    let n = pupil.n();
    check_fft_size(n, n_fft)?;
    if n_fft > DIRECT_DFT_MAX {
        return Err(Error::Config(format!(
            "direct DFT of a {n_fft}-point transform costs ~{:.1e} complex operations; limit is {DIRECT_DFT_MAX}",
            (n * n * n_fft * n_fft) as f64
        )));
    }
    if pupil.power() == 0.0 {
        return Err(Error::DegeneratePupil("pupil is dark everywhere".into()));
    }
    let twiddle: Vec<Complex64> = (0..n_fft)
        .map(|k| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 / n_fft as f64))
        .collect();
    let half = n_fft as i64 / 2;
    let k = n_fft - 1;
    let freq = |i: usize| -> usize { (i as i64 - (half - 1)).rem_euclid(n_fft as i64) as usize };
    let mut values = Array2::<f64>::zeros((k, k));
    for i in 0..k {
        let u = freq(i);
        for j in 0..k {
            let v = freq(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for (y, row) in pupil.field.outer_iter().enumerate() {
                for (x, w) in row.iter().enumerate() {
                    if w.re != 0.0 || w.im != 0.0 {
                        acc += w * twiddle[(u * y + v * x) % n_fft];
                    }
                }
            }
            values[[i, j]] = acc.norm_sqr();
        }
    }
    Ok(PsfKernel {
        wavelength_nm: pupil.wavelength_nm,
        sample_pitch: pitch_um(pupil, n_fft),
        values: normalized(values)?,
    })
}

/// Bessel function of the first kind, order one.
///
/// Rational approximations after Hart / Numerical Recipes; absolute error
/// below 1e-8.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 8.0 {
        let y = x * x;
        let num = x
            * (72362614232.0
                + y * (-7895059235.0
                    + y * (242396853.1
                        + y * (-2972611.439 + y * (15704.48260 + y * (-30.16036606))))));
        let den = 144725228442.0
            + y * (2300535178.0 + y * (18583304.74 + y * (99447.43394 + y * (376.9991397 + y))));
        num / den
    } else {
        let z = 8.0 / ax;
        let y = z * z;
        let xx = ax - 2.356194491;
        let p = 1.0
            + y * (0.183105e-2 + y * (-0.3516396496e-4 + y * (0.2457520174e-5 + y * (-0.240337019e-6))));
        let q = 0.04687499995
            + y * (-0.2002690873e-3 + y * (0.8449199096e-5 + y * (-0.88228987e-6 + y * 0.105787412e-6)));
        let ans = (0.636619772 / ax).sqrt() * (xx.cos() * p - z * xx.sin() * q);
        if x < 0.0 {
            -ans
        } else {
            ans
        }
    }
}

/// Airy intensity [2J₁(v)/v]², v = π·r/(λ·N), with r and λ in µm.
pub fn airy_intensity(r_um: f64, lambda_nm: f64, f_number: f64) -> f64 {
    let v = std::f64::consts::PI * r_um / (lambda_nm * 1e-3 * f_number);
    if v.abs() < 1e-12 {
        1.0
    } else {
        (2.0 * bessel_j1(v) / v).powi(2)
    }
}

/// Sampled, unit-sum Airy pattern on a k×k grid (k odd) with spacing `pitch_um`.
pub fn airy_reference(f_number: f64, lambda_nm: f64, pitch_um: f64, k: usize) -> Result<Array2<f64>> {
    if k % 2 == 0 {
        return Err(Error::Config(format!("Airy kernel size must be odd, got {k}")));
    }
    let c = (k / 2) as f64;
    let values = Array2::from_shape_fn((k, k), |(i, j)| {
        let r = ((i as f64 - c).powi(2) + (j as f64 - c).powi(2)).sqrt() * pitch_um;
        airy_intensity(r, lambda_nm, f_number)
    });
    normalized(values)
}

/// Overlap weights mapping input cells (pitch `from`) onto output cells (pitch `to`),
/// both centered on index `half`.
fn overlap_matrix(in_half: usize, from: f64, to: f64) -> (usize, Array2<f64>) {
    let in_len = 2 * in_half + 1;
    let extent = (in_half as f64 + 0.5) * from;
    let out_half = ((extent / to) - 0.5).ceil().max(0.0) as usize;
    let out_len = 2 * out_half + 1;
    let mut w = Array2::<f64>::zeros((out_len, in_len));
    for o in 0..out_len {
        let oc = o as f64 - out_half as f64;
        let (olo, ohi) = ((oc - 0.5) * to, (oc + 0.5) * to);
        for i in 0..in_len {
            let ic = i as f64 - in_half as f64;
            let (ilo, ihi) = ((ic - 0.5) * from, (ic + 0.5) * from);
            let overlap = ohi.min(ihi) - olo.max(ilo);
            if overlap > 0.0 {
                w[[o, i]] = overlap / from;
            }
        }
    }
    (out_half, w)
}

/// Flux-preserving resampling of a centered kernel to a new pitch.
///
/// Each input sample is treated as a uniform cell; its flux is split
/// between output cells in proportion to the overlap area.
pub fn resample_kernel(kernel: ArrayView2<f64>, from_pitch: f64, to_pitch: f64) -> Array2<f64> {
    let half = kernel.nrows() / 2;
    if (from_pitch - to_pitch).abs() <= 1e-12 * to_pitch {
        return kernel.to_owned();
    }
    let (_, w) = overlap_matrix(half, from_pitch, to_pitch);
    w.dot(&kernel).dot(&w.t())
}

/// Smallest centered square holding `keep` of the energy, at most `max_size` wide, renormalized.
pub fn crop_to_energy(kernel: ArrayView2<f64>, keep: f64, max_size: usize) -> Array2<f64> {
    let n = kernel.nrows();
    let c = n / 2;
    let total: f64 = kernel.sum();
    let max_half = (max_size.max(1) - 1) / 2;
    // Energy within ring-by-ring growing squares.
    let mut acc = kernel[[c, c]];
    let mut h = 0;
    while h < c.min(max_half) && acc < keep * total {
        h += 1;
        let ring: f64 = kernel.slice(s![c - h..=c + h, c - h..=c + h]).sum()
            - kernel.slice(s![c - h + 1..c + h, c - h + 1..c + h]).sum();
        acc += ring;
    }
    let cropped = kernel.slice(s![c - h..=c + h, c - h..=c + h]).to_owned();
    let sum = cropped.sum();
    cropped.mapv(|v| v / sum)
}

/// Per-wavelength PSF kernels at a common sensor-plane pitch.
#[derive(Debug, Clone, PartialEq)]
pub struct PsfStack {
    pub grid: WavelengthGrid,
    /// µm
    pub sample_pitch: f64,
    pub kernels: Vec<Array2<f64>>,
}

impl PsfStack {
    /// Ideal optics: a unit impulse at every wavelength.
    pub fn delta(grid: WavelengthGrid, sample_pitch: f64) -> Self {
        PsfStack {
            grid,
            sample_pitch,
            kernels: vec![Array2::from_elem((1, 1), 1.0); grid.count],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kernels.len() != self.grid.count {
            return Err(Error::Structural(format!(
                "{} kernels for {} wavelengths",
                self.kernels.len(),
                self.grid.count
            )));
        }
        for (b, k) in self.kernels.iter().enumerate() {
            let (r, c) = k.dim();
            if r != c || r % 2 == 0 {
                return Err(Error::Structural(format!("kernel {b} is {r}x{c}, expected odd square")));
            }
            if k.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                return Err(Error::Domain(format!("kernel {b} has negative or non-finite entries")));
            }
            let s = k.sum();
            if (s - 1.0).abs() > 1e-6 {
                return Err(Error::Domain(format!("kernel {b} sums to {s}, not 1")));
            }
        }
        Ok(())
    }
}

/// Parameters for turning pupils into a [`PsfStack`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsfSampling {
    /// Transform size; `n_fft / n` is the zero-padding factor.
    pub n_fft: usize,
    /// Target sensor-plane pitch, µm.
    pub target_pitch: f64,
    /// Largest kernel width after cropping.
    pub max_kernel: usize,
}

/// Pupil → PSF → resample → crop for every wavelength of `grid`.
///
/// Wavelengths are processed in parallel; each result depends only on
/// its own inputs, so the stack does not depend on the thread count.
pub fn build_psf_stack(
    mask: &ApodizationMask,
    wf: &WavefrontSpec,
    grid: &WavelengthGrid,
    sampling: PsfSampling,
) -> Result<PsfStack> {
    grid.validate()?;
    if !(sampling.target_pitch > 0.0) {
        return Err(Error::Config("target pitch must be positive".into()));
    }
    let kernels: Vec<Array2<f64>> = (0..grid.count)
        .into_par_iter()
        .map(|b| -> Result<Array2<f64>> {
            let pupil = build_pupil(mask, wf, grid.wavelength(b))?;
            let psf = psf_from_pupil(&pupil, sampling.n_fft)?;
            let resampled = resample_kernel(psf.values.view(), psf.sample_pitch, sampling.target_pitch);
            Ok(crop_to_energy(resampled.view(), PSF_ENERGY_KEEP, sampling.max_kernel))
        })
        .collect::<Result<_>>()?;
    let stack = PsfStack {
        grid: *grid,
        sample_pitch: sampling.target_pitch,
        kernels,
    };
    stack.validate()?;
    Ok(stack)
}

/// Largest odd kernel width that fits inside a `rows`×`cols` scene.
pub fn kernel_cap(rows: usize, cols: usize) -> usize {
    let m = rows.min(cols).max(1);
    if m % 2 == 0 {
        m - 1
    } else {
        m
    }
}

/// FFT size used by callers that only specify a padding factor.
pub fn padded_size(n: usize, padding: usize) -> usize {
    n * padding.max(1)
}
