//! Photon-to-digital sensor simulation: Bayer RGB, RGBW and split-pixel
//! three-capture sensors.
//!
//! Noise order per pixel: PRNU gain, Poisson shot noise on signal plus
//! dark current, DSNU offset, well clip, read noise, conversion and analog
//! gain with clipping to the voltage swing, then ADC quantization.

mod budget;
pub mod cfa;
mod presets;
pub mod rng;

pub use budget::photon_count_estimate;
pub use cfa::{default_rgb_qe, Channel, ColorFilterArray, QeCurve};
pub use presets::{preset, SensorPreset, PRESET_NAMES};

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{SpectralImage, SpectralKind};
use rng::{CaptureId, NoiseStage};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PixelSpec {
    /// µm
    pub pitch: f64,
    pub fill_factor: f64,
    /// electrons
    pub well_capacity: f64,
    /// electrons RMS
    pub read_noise: f64,
    /// electrons/s
    pub dark_current: f64,
    /// volts/electron
    pub conversion_gain: f64,
    /// fractional σ of the per-pixel gain
    pub prnu: f64,
    /// electrons σ of the per-pixel offset
    pub dsnu: f64,
    /// volts
    pub voltage_swing: f64,
    pub adc_bits: u32,
}

impl PixelSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pitch", self.pitch),
            ("well_capacity", self.well_capacity),
            ("conversion_gain", self.conversion_gain),
            ("voltage_swing", self.voltage_swing),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("pixel {name} must be positive, got {v}")));
            }
        }
        let nonneg = [
            ("read_noise", self.read_noise),
            ("dark_current", self.dark_current),
            ("prnu", self.prnu),
            ("dsnu", self.dsnu),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("pixel {name} must be ≥ 0, got {v}")));
            }
        }
        if !(self.fill_factor > 0.0 && self.fill_factor <= 1.0) {
            return Err(Error::Config(format!(
                "fill factor must lie in (0, 1], got {}",
                self.fill_factor
            )));
        }
        if !(8..=16).contains(&self.adc_bits) {
            return Err(Error::Config(format!(
                "ADC bits must lie in [8, 16], got {}",
                self.adc_bits
            )));
        }
        Ok(())
    }

    /// Volts per digital number.
    pub fn lsb(&self) -> f64 {
        self.voltage_swing / f64::from(1u32 << self.adc_bits)
    }

    pub fn max_dn(&self) -> u16 {
        ((1u32 << self.adc_bits) - 1) as u16
    }

    /// Photosensitive area in m².
    pub fn area_m2(&self) -> f64 {
        let p = self.pitch * 1e-6;
        self.fill_factor * p * p
    }
}

fn default_saturation_fraction() -> f64 {
    0.95
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    pub rows: usize,
    pub cols: usize,
    pub pixel: PixelSpec,
    pub cfa: ColorFilterArray,
    /// seconds
    pub exposure: f64,
    pub analog_gain: f64,
    #[serde(default)]
    pub seed: u64,
    /// Fraction of the voltage swing at or above which a pixel is flagged saturated.
    #[serde(default = "default_saturation_fraction")]
    pub saturation_fraction: f64,
}

impl SensorSpec {
    pub fn validate(&self) -> Result<()> {
        self.pixel.validate()?;
        self.cfa.validate()?;
        let (tr, tc) = self.cfa.tile();
        if self.rows == 0 || self.cols == 0 || self.rows % tr != 0 || self.cols % tc != 0 {
            return Err(Error::Config(format!(
                "sensor {}x{} is not a positive multiple of the {tr}x{tc} CFA tile",
                self.rows, self.cols
            )));
        }
        if !(self.exposure > 0.0) || !self.exposure.is_finite() {
            return Err(Error::Config(format!("exposure must be positive, got {}", self.exposure)));
        }
        if !(self.analog_gain > 0.0) || !self.analog_gain.is_finite() {
            return Err(Error::Config(format!(
                "analog gain must be positive, got {}",
                self.analog_gain
            )));
        }
        if !(self.saturation_fraction > 0.0 && self.saturation_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "saturation fraction must lie in (0, 1], got {}",
                self.saturation_fraction
            )));
        }
        Ok(())
    }

    pub fn with_size(mut self, rows: usize, cols: usize) -> Self {
        self.rows = rows;
        self.cols = cols;
        self
    }

    pub fn saturation_voltage(&self) -> f64 {
        self.saturation_fraction * self.pixel.voltage_swing
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitPixelSpec {
    /// Small/large photodetector responsivity ratio.
    #[serde(default = "default_ratio")]
    pub sensitivity_ratio: f64,
    pub gain_high: f64,
    pub gain_low: f64,
    /// Fraction of the photosensitive area given to the large photodetector.
    pub area_split: f64,
}

fn default_ratio() -> f64 {
    0.01
}

impl SplitPixelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sensitivity_ratio > 0.0 && self.sensitivity_ratio < 1.0) {
            return Err(Error::Config(format!(
                "sensitivity ratio must lie in (0, 1), got {}",
                self.sensitivity_ratio
            )));
        }
        if !(self.gain_low > 0.0 && self.gain_high > self.gain_low) || !self.gain_high.is_finite() {
            return Err(Error::Config(format!(
                "need gain_high > gain_low > 0, got {} and {}",
                self.gain_high, self.gain_low
            )));
        }
        if !(self.area_split > 0.0 && self.area_split <= 1.0) {
            return Err(Error::Config(format!(
                "area split must lie in (0, 1], got {}",
                self.area_split
            )));
        }
        Ok(())
    }
}

/// One readout of a sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Capture {
    /// Quantized output voltage, DN·LSB.
    pub volts: Array2<f64>,
    pub dn: Array2<u16>,
    /// Voltage before the ADC.
    pub analog: Array2<f64>,
    /// Collected electrons after the well clip, before read noise.
    pub electrons: Array2<f64>,
    pub saturated: Array2<bool>,
    /// Conversion gain times analog gain times any readout gain, V/e.
    pub volts_per_electron: f64,
}

impl Capture {
    pub fn dim(&self) -> (usize, usize) {
        self.volts.dim()
    }

    /// Rebuild a capture from stored digital numbers. Saturation is judged
    /// from the voltage alone and electrons are the input-referred estimate.
    pub fn from_dn(dn: Array2<u16>, volts_per_electron: f64, sensor: &SensorSpec) -> Result<Capture> {
        if !(volts_per_electron > 0.0) || !volts_per_electron.is_finite() {
            return Err(Error::Config(format!("volts per electron must be positive, got {volts_per_electron}")));
        }
        let max = sensor.pixel.max_dn();
        if let Some(bad) = dn.iter().find(|&&d| d > max) {
            return Err(Error::Domain(format!("DN {bad} exceeds the {}-bit ADC range", sensor.pixel.adc_bits)));
        }
        let lsb = sensor.pixel.lsb();
        let sat_v = sensor.saturation_voltage();
        let volts = dn.mapv(|d| f64::from(d) * lsb);
        Ok(Capture {
            electrons: volts.mapv(|v| v / volts_per_electron),
            saturated: volts.mapv(|v| v >= sat_v),
            analog: volts.clone(),
            volts,
            dn,
            volts_per_electron,
        })
    }
}

/// The three readouts of a split pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptureSet {
    pub lphg: Capture,
    pub lplg: Capture,
    pub splg: Capture,
    pub sensor: SensorSpec,
    pub split: SplitPixelSpec,
}

impl CaptureSet {
    pub fn dim(&self) -> (usize, usize) {
        self.lplg.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.lplg.dim();
        if self.lphg.dim() != d || self.splg.dim() != d {
            return Err(Error::Structural("captures differ in size".into()));
        }
        for c in [&self.lphg, &self.lplg, &self.splg] {
            if c.saturated.dim() != d || c.volts.dim() != d {
                return Err(Error::Structural("saturation mask size differs from its capture".into()));
            }
        }
        // Both dual-gain reads see one electron image; the high-gain read
        // reaches the swing first.
        let inconsistent = self
            .lplg
            .saturated
            .iter()
            .zip(self.lphg.saturated.iter())
            .any(|(&lg, &hg)| lg && !hg);
        if inconsistent {
            return Err(Error::Structural(
                "LPLG flagged saturated where LPHG is not".into(),
            ));
        }
        Ok(())
    }
}

/// Central crop of `irr` matching the sensor, after checking kind and size.
fn sensor_view(irr: &SpectralImage, sensor: &SensorSpec) -> Result<SpectralImage> {
    sensor.validate()?;
    if irr.kind() != SpectralKind::Irradiance {
        return Err(Error::Structural("sensor input must be an irradiance image".into()));
    }
    if irr.rows() < sensor.rows || irr.cols() < sensor.cols {
        return Err(Error::Structural(format!(
            "irradiance {}x{} is smaller than the {}x{} sensor",
            irr.rows(),
            irr.cols(),
            sensor.rows,
            sensor.cols
        )));
    }
    if irr.rows() == sensor.rows && irr.cols() == sensor.cols {
        Ok(irr.clone())
    } else {
        irr.center_crop(sensor.rows, sensor.cols)
    }
}

/// Mean photo-electrons per pixel (dark current excluded) for the full
/// photosensitive area, each pixel weighted by its own channel's QE.
pub fn mean_signal_electrons(irr: &SpectralImage, sensor: &SensorSpec) -> Result<Array2<f64>> {
    let view = sensor_view(irr, sensor)?;
    let grid = *view.grid();
    let channels = sensor.cfa.channels();
    let per_channel: Vec<(Channel, Array2<f64>)> = channels
        .iter()
        .map(|&ch| {
            let qe = sensor.cfa.qe_on_grid(ch, &grid);
            let mut acc = Array2::<f64>::zeros((sensor.rows, sensor.cols));
            for (b, &q) in qe.iter().enumerate() {
                if q != 0.0 {
                    acc.scaled_add(q * grid.step_nm, &view.band(b));
                }
            }
            (ch, acc)
        })
        .collect();
    let k = sensor.pixel.area_m2() * sensor.exposure;
    Ok(Array2::from_shape_fn((sensor.rows, sensor.cols), |(r, c)| {
        let ch = sensor.cfa.channel_at(r, c);
        let plane = &per_channel.iter().find(|(x, _)| *x == ch).expect("channel in tile").1;
        k * plane[[r, c]]
    }))
}

/// Electrons collected by one photodetector, clipped to the well.
fn collect(signal: f64, px: &PixelSpec, sensor: &SensorSpec, noise: bool, pixel: u64, pd: CaptureId) -> f64 {
    let dark = px.dark_current * sensor.exposure;
    if !noise {
        return (signal + dark).clamp(0.0, px.well_capacity);
    }
    let seed = sensor.seed;
    let gain = if px.prnu > 0.0 {
        1.0 + px.prnu * rng::normal(seed, pixel, pd, NoiseStage::Prnu)
    } else {
        1.0
    };
    let lambda = (signal * gain).max(0.0) + dark;
    let mut e = rng::poisson(lambda, seed, pixel, pd);
    if px.dsnu > 0.0 {
        e += px.dsnu * rng::normal(seed, pixel, pd, NoiseStage::Dsnu);
    }
    e.clamp(0.0, px.well_capacity)
}

/// Read noise, gain, swing clip and ADC for one electron value.
fn read(e: f64, vpe: f64, sensor: &SensorSpec, noise: bool, pixel: u64, id: CaptureId) -> (f64, u16, f64, bool) {
    let px = &sensor.pixel;
    let e_read = if noise && px.read_noise > 0.0 {
        e + px.read_noise * rng::normal(sensor.seed, pixel, id, NoiseStage::Read)
    } else {
        e
    };
    let analog = (e_read * vpe).clamp(0.0, px.voltage_swing);
    let lsb = px.lsb();
    let dn = (analog / lsb).round().min(f64::from(px.max_dn())) as u16;
    let v = f64::from(dn) * lsb;
    let sat = v >= sensor.saturation_voltage() || e >= px.well_capacity;
    (v, dn, analog, sat)
}

fn readout(electrons: &Array2<f64>, vpe: f64, sensor: &SensorSpec, noise: bool, id: CaptureId) -> Capture {
    let (rows, cols) = electrons.dim();
    let flat: Vec<(f64, u16, f64, bool)> = (0..rows * cols)
        .into_par_iter()
        .map(|i| read(electrons[[i / cols, i % cols]], vpe, sensor, noise, i as u64, id))
        .collect();
    let volts = Array2::from_shape_fn((rows, cols), |(r, c)| flat[r * cols + c].0);
    let dn = Array2::from_shape_fn((rows, cols), |(r, c)| flat[r * cols + c].1);
    let analog = Array2::from_shape_fn((rows, cols), |(r, c)| flat[r * cols + c].2);
    let saturated = Array2::from_shape_fn((rows, cols), |(r, c)| flat[r * cols + c].3);
    Capture {
        volts,
        dn,
        analog,
        electrons: electrons.clone(),
        saturated,
        volts_per_electron: vpe,
    }
}

fn collect_image(signal: &Array2<f64>, sensor: &SensorSpec, noise: bool, pd: CaptureId) -> Array2<f64> {
    let (rows, cols) = signal.dim();
    let flat: Vec<f64> = (0..rows * cols)
        .into_par_iter()
        .map(|i| collect(signal[[i / cols, i % cols]], &sensor.pixel, sensor, noise, i as u64, pd))
        .collect();
    Array2::from_shape_vec((rows, cols), flat).expect("shape matches")
}

/// Single-photodetector exposure.
pub fn expose(irr: &SpectralImage, sensor: &SensorSpec, noise: bool) -> Result<Capture> {
    let signal = mean_signal_electrons(irr, sensor)?;
    let electrons = collect_image(&signal, sensor, noise, CaptureId::MainPd);
    let vpe = sensor.pixel.conversion_gain * sensor.analog_gain;
    Ok(readout(&electrons, vpe, sensor, noise, CaptureId::SingleRead))
}

/// Split-pixel exposure: the large photodetector is read at high and low
/// gain from one electron image; the small photodetector is an independent
/// collector read at low gain.
pub fn expose_split(irr: &SpectralImage, sensor: &SensorSpec, split: &SplitPixelSpec, noise: bool) -> Result<CaptureSet> {
    split.validate()?;
    let full = mean_signal_electrons(irr, sensor)?;
    let large_signal = full.mapv(|s| s * split.area_split);
    let small_signal = large_signal.mapv(|s| s * split.sensitivity_ratio);
    let large = collect_image(&large_signal, sensor, noise, CaptureId::MainPd);
    let small = collect_image(&small_signal, sensor, noise, CaptureId::SmallPd);
    let base = sensor.pixel.conversion_gain * sensor.analog_gain;
    Ok(CaptureSet {
        lphg: readout(&large, base * split.gain_high, sensor, noise, CaptureId::Lphg),
        lplg: readout(&large, base * split.gain_low, sensor, noise, CaptureId::Lplg),
        splg: readout(&small, base * split.gain_low, sensor, noise, CaptureId::Splg),
        sensor: sensor.clone(),
        split: *split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::WavelengthGrid;

    pub(crate) fn test_sensor(rows: usize, cols: usize) -> SensorSpec {
        SensorSpec {
            rows,
            cols,
            pixel: PixelSpec {
                pitch: 3.0,
                fill_factor: 0.9,
                well_capacity: 20000.0,
                read_noise: 2.0,
                dark_current: 0.0,
                conversion_gain: 50e-6,
                prnu: 0.0,
                dsnu: 0.0,
                voltage_swing: 1.0,
                adc_bits: 14,
            },
            cfa: ColorFilterArray::bayer_rggb(default_rgb_qe()),
            exposure: 0.01,
            analog_gain: 1.0,
            seed: 5,
            saturation_fraction: 0.95,
        }
    }

    fn flat(rows: usize, cols: usize, level: f64) -> SpectralImage {
        let grid = WavelengthGrid::default();
        SpectralImage::new(
            grid,
            SpectralKind::Irradiance,
            ndarray::Array3::from_elem((grid.count, rows, cols), level),
        )
        .unwrap()
    }

    /// Irradiance level giving roughly `e` mean electrons on R pixels.
    fn level_for(sensor: &SensorSpec, e: f64) -> f64 {
        let unit = mean_signal_electrons(&flat(sensor.rows, sensor.cols, 1.0), sensor).unwrap();
        e / unit[[0, 0]]
    }

    #[test]
    fn from_dn_reproduces_volts_and_flags() {
        let s = test_sensor(4, 4);
        let lvl = level_for(&s, 5000.0);
        let irr = flat(4, 4, lvl);
        let cap = expose(&irr, &s, true).unwrap();
        let back = Capture::from_dn(cap.dn.clone(), cap.volts_per_electron, &s).unwrap();
        assert_eq!(back.volts, cap.volts);
        assert_eq!(back.saturated, cap.saturated);
        let hot = expose(&flat(4, 4, 10.0 * lvl), &s, false).unwrap();
        let back = Capture::from_dn(hot.dn.clone(), hot.volts_per_electron, &s).unwrap();
        assert!(back.saturated.iter().all(|&b| b));
        let too_big = ndarray::Array2::from_elem((1, 1), u16::MAX);
        assert!(Capture::from_dn(too_big, 1e-5, &s).is_err());
    }

    #[test]
    fn zero_light_zero_volts() {
        let s = test_sensor(4, 4);
        let cap = expose(&flat(4, 4, 0.0), &s, false).unwrap();
        assert!(cap.volts.iter().all(|&v| v == 0.0));
        assert!(cap.saturated.iter().all(|&b| !b));
    }

    #[test]
    fn mean_electrons_match_formula() {
        let s = test_sensor(2, 2);
        let grid = WavelengthGrid::default();
        let e = mean_signal_electrons(&flat(2, 2, 1e12), &s).unwrap();
        let qe_sum: f64 = grid.wavelengths().map(|nm| s.cfa.qe(Channel::G, nm) * grid.step_nm).sum();
        let expected = 0.9 * 9e-12 * 0.01 * qe_sum * 1e12;
        assert!((e[[0, 1]] - expected).abs() < 1e-9 * expected);
        assert_eq!(e[[0, 1]], e[[1, 0]]);
    }

    #[test]
    fn doubling_exposure_doubles_voltage() {
        let s = test_sensor(4, 4);
        let irr = flat(4, 4, level_for(&s, 1000.0));
        let a = expose(&irr, &s, false).unwrap();
        let b = expose(&irr, &SensorSpec { exposure: 0.02, ..s.clone() }, false).unwrap();
        for (x, y) in a.analog.iter().zip(b.analog.iter()) {
            assert_eq!(2.0 * x, *y);
        }
        let lsb = s.pixel.lsb();
        for (x, y) in a.volts.iter().zip(b.volts.iter()) {
            assert!((2.0 * x - y).abs() <= lsb);
        }
    }

    #[test]
    fn saturation_is_flat() {
        let s = test_sensor(2, 2);
        let lvl = level_for(&s, 30000.0);
        let a = expose(&flat(2, 2, lvl), &s, false).unwrap();
        let b = expose(&flat(2, 2, 2.0 * lvl), &s, false).unwrap();
        assert_eq!(a.volts[[0, 0]], b.volts[[0, 0]]);
        assert!(a.saturated[[0, 0]]);
        assert_eq!(a.electrons[[0, 0]], 20000.0);
    }

    #[test]
    fn noisy_output_is_deterministic() {
        let s = SensorSpec {
            pixel: PixelSpec { prnu: 0.01, dsnu: 1.0, dark_current: 50.0, ..test_sensor(1, 1).pixel },
            ..test_sensor(16, 16)
        };
        let irr = flat(16, 16, level_for(&s, 300.0));
        let a = expose(&irr, &s, true).unwrap();
        let b = expose(&irr, &s, true).unwrap();
        assert_eq!(a, b);
        let c = expose(&irr, &SensorSpec { seed: 6, ..s.clone() }, true).unwrap();
        assert_ne!(a.volts, c.volts);
    }

    #[test]
    fn central_crop_is_used() {
        let s = test_sensor(2, 2);
        let grid = WavelengthGrid::default();
        let data = ndarray::Array3::from_shape_fn((grid.count, 4, 4), |(_, r, c)| {
            if (1..3).contains(&r) && (1..3).contains(&c) { 1e12 } else { 0.0 }
        });
        let irr = SpectralImage::new(grid, SpectralKind::Irradiance, data).unwrap();
        let e = mean_signal_electrons(&irr, &s).unwrap();
        assert!(e.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn structural_errors() {
        let s = test_sensor(4, 4);
        assert!(matches!(expose(&flat(2, 4, 1.0), &s, false), Err(Error::Structural(_))));
        let grid = WavelengthGrid::default();
        let rad = SpectralImage::zeros(4, 4, grid, SpectralKind::Radiance);
        assert!(matches!(expose(&rad, &s, false), Err(Error::Structural(_))));
        assert!(matches!(expose(&flat(6, 6, 1.0), &test_sensor(3, 4), false), Err(Error::Config(_))));
    }

    #[test]
    fn bad_pixel_specs_rejected() {
        let mut s = test_sensor(2, 2);
        s.pixel.adc_bits = 20;
        assert!(s.validate().is_err());
        let mut s = test_sensor(2, 2);
        s.pixel.fill_factor = 0.0;
        assert!(s.validate().is_err());
        let mut s = test_sensor(2, 2);
        s.exposure = 0.0;
        assert!(s.validate().is_err());
        let split = SplitPixelSpec { sensitivity_ratio: 0.01, gain_high: 1.0, gain_low: 4.0, area_split: 0.8 };
        assert!(split.validate().is_err());
    }

    fn split() -> SplitPixelSpec {
        SplitPixelSpec { sensitivity_ratio: 0.01, gain_high: 4.0, gain_low: 1.0, area_split: 0.8 }
    }

    #[test]
    fn dual_reads_share_electrons() {
        let s = test_sensor(4, 4);
        let irr = flat(4, 4, level_for(&s, 1000.0));
        let set = expose_split(&irr, &s, &split(), true).unwrap();
        assert_eq!(set.lphg.electrons, set.lplg.electrons);
        assert_ne!(set.lphg.electrons, set.splg.electrons);
        set.validate().unwrap();
    }

    #[test]
    fn small_pd_tracks_ratio_noise_off() {
        let s = test_sensor(4, 4);
        let irr = flat(4, 4, level_for(&s, 8000.0));
        let set = expose_split(&irr, &s, &split(), false).unwrap();
        let (gl, gs) = (set.lplg.volts_per_electron, set.splg.volts_per_electron);
        for (v_l, v_s) in set.lplg.volts.iter().zip(set.splg.volts.iter()) {
            let (el, es) = (v_l / gl, v_s / gs);
            assert!((es - el * 0.01).abs() <= 1.0, "{es} vs {el}");
        }
    }

    #[test]
    fn large_saturates_before_small() {
        let s = test_sensor(2, 2);
        let irr = flat(2, 2, level_for(&s, 1e5));
        let set = expose_split(&irr, &s, &split(), false).unwrap();
        assert!(set.lplg.saturated[[0, 0]]);
        assert!(set.lphg.saturated[[0, 0]]);
        assert!(!set.splg.saturated[[0, 0]]);
    }

    #[test]
    fn inconsistent_masks_rejected() {
        let s = test_sensor(2, 2);
        let mut set = expose_split(&flat(2, 2, 0.0), &s, &split(), false).unwrap();
        set.lplg.saturated[[0, 0]] = true;
        assert!(matches!(set.validate(), Err(Error::Structural(_))));
    }

    #[test]
    fn rgbw_white_collects_most() {
        let mut qe = default_rgb_qe();
        qe.insert(Channel::W, QeCurve::Envelope { scale: 1.0 });
        let s = SensorSpec {
            cfa: ColorFilterArray { pattern: vec!["RG".into(), "WB".into()], qe },
            ..test_sensor(2, 2)
        };
        let grid = WavelengthGrid::default();
        let data = ndarray::Array3::from_shape_fn((grid.count, 2, 2), |(b, _, _)| 1e12 * (1.0 + b as f64));
        let irr = SpectralImage::new(grid, SpectralKind::Irradiance, data).unwrap();
        let e = mean_signal_electrons(&irr, &s).unwrap();
        let w = e[[1, 0]];
        assert!(w >= e[[0, 0]] && w >= e[[0, 1]] && w >= e[[1, 1]]);
    }
}
