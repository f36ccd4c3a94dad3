//! Input-referring and three-capture HDR combination.
//!
//! All estimates are expressed in electrons of the large photodetector.

use ndarray::{Array2, ArrayView2, Zip};

use crate::error::{Error, Result};
use crate::sensor::{Capture, CaptureSet};

/// Linear per-pixel estimates with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct InputReferredImage {
    pub values: Array2<f64>,
    pub valid: Array2<bool>,
    /// Input-referred size of one ADC step, when known.
    pub quantization_step: Option<f64>,
}

impl InputReferredImage {
    pub fn dim(&self) -> (usize, usize) {
        self.values.dim()
    }

    /// Valid values in row-major order.
    pub fn valid_values(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(self.valid.iter())
            .filter(|(_, &ok)| ok)
            .map(|(&v, _)| v)
            .collect()
    }
}

fn check_gain(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Config(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// x = V / (conversion_gain · analog_gain · sensitivity_scale); every pixel valid.
pub fn input_refer(
    volts: ArrayView2<f64>,
    conversion_gain: f64,
    analog_gain: f64,
    sensitivity_scale: f64,
) -> Result<InputReferredImage> {
    check_gain("conversion gain", conversion_gain)?;
    check_gain("analog gain", analog_gain)?;
    check_gain("sensitivity scale", sensitivity_scale)?;
    let k = conversion_gain * analog_gain * sensitivity_scale;
    Ok(InputReferredImage {
        values: volts.mapv(|v| v / k),
        valid: Array2::from_elem(volts.dim(), true),
        quantization_step: None,
    })
}

/// Input-refer one capture; saturated pixels are invalid and the ADC step
/// is carried along.
pub fn input_refer_capture(cap: &Capture, lsb: f64, sensitivity_scale: f64) -> Result<InputReferredImage> {
    check_gain("volts per electron", cap.volts_per_electron)?;
    let mut x = input_refer(cap.volts.view(), cap.volts_per_electron, 1.0, sensitivity_scale)?;
    x.valid = cap.saturated.mapv(|s| !s);
    x.quantization_step = Some(lsb / (cap.volts_per_electron * sensitivity_scale));
    Ok(x)
}

/// Average of the two reads where the high-gain read is unsaturated,
/// otherwise the low-gain read alone.
pub fn combine_dual_gain(
    x_hg: &InputReferredImage,
    x_lg: &InputReferredImage,
    sat_hg: ArrayView2<bool>,
) -> Result<InputReferredImage> {
    let d = x_lg.dim();
    if x_hg.dim() != d || sat_hg.dim() != d || x_lg.valid.dim() != d {
        return Err(Error::Structural(format!(
            "dual-gain inputs differ in size: {:?}, {:?}, mask {:?}",
            x_hg.dim(),
            d,
            sat_hg.dim()
        )));
    }
    let mut values = Array2::zeros(d);
    Zip::from(&mut values)
        .and(&x_hg.values)
        .and(&x_lg.values)
        .and(&sat_hg)
        .for_each(|out, &hg, &lg, &sat| *out = if sat { lg } else { 0.5 * (hg + lg) });
    Ok(InputReferredImage {
        values,
        valid: x_lg.valid.clone(),
        quantization_step: x_lg.quantization_step,
    })
}

/// Large-photodetector estimate from the dual-gain pair, replaced by the
/// input-referred small photodetector where the large one saturates.
/// Pixels saturated in every capture are clamped to the small
/// photodetector's ceiling and flagged invalid.
pub fn combine3(captures: &CaptureSet) -> Result<InputReferredImage> {
    captures.validate()?;
    let split = &captures.split;
    split.validate()?;
    let lsb = captures.sensor.pixel.lsb();
    let x_hg = input_refer_capture(&captures.lphg, lsb, 1.0)?;
    let x_lg = input_refer_capture(&captures.lplg, lsb, 1.0)?;
    let x_sp = input_refer_capture(&captures.splg, lsb, split.sensitivity_ratio)?;
    let dual = combine_dual_gain(&x_hg, &x_lg, captures.lphg.saturated.view())?;

    let ceiling = captures.sensor.saturation_voltage()
        / (captures.splg.volts_per_electron * split.sensitivity_ratio);
    let d = dual.dim();
    let mut values = Array2::zeros(d);
    let mut valid = Array2::from_elem(d, true);
    Zip::from(&mut values)
        .and(&mut valid)
        .and(&dual.values)
        .and(&x_sp.values)
        .and(&captures.lplg.saturated)
        .and(&captures.splg.saturated)
        .for_each(|out, ok, &large, &small, &sat_l, &sat_s| {
            if !sat_l {
                *out = large;
            } else if !sat_s {
                *out = small;
            } else {
                *out = ceiling;
                *ok = false;
            }
        });
    Ok(InputReferredImage {
        values,
        valid,
        quantization_step: x_lg.quantization_step,
    })
}
