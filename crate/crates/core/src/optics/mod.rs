//! Scattering-flare optics: aperture masks with dust and scratches,
//! aberrated pupils, PSFs, and radiance-to-irradiance rendering.

mod aperture;
pub mod fft2;
mod psf;
mod pupil;
mod render;
pub mod zernike;

pub use aperture::{synthesize_apodization, ApertureSpec, ApodizationMask};
pub use psf::{
    airy_intensity, airy_reference, bessel_j1, build_psf_stack, crop_to_energy, kernel_cap, padded_size,
    psf_direct_dft, psf_from_pupil, resample_kernel, PsfKernel, PsfSampling, PsfStack,
    DIRECT_DFT_MAX, PSF_ENERGY_KEEP,
};
pub use pupil::{build_pupil, PupilFunction, WavefrontSpec};
pub use render::{apply_optics, distort, relative_illumination_map, OpticsSpec};
