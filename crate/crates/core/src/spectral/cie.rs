//! Embedded CIE tables with linear interpolation.
//!
//! The photopic luminous efficiency V(λ) is the ȳ colour-matching
//! function of the 1931 observer, so photometry and colorimetry share one
//! table. Outside the tabulated range the functions are zero.

#[path = "tables.rs"]
mod tables;

use tables::{
    CHECKER_REFLECTANCE, CHECKER_START_NM, CHECKER_STEP_NM, CMF_1931, CMF_START_NM, CMF_STEP_NM,
    D65_SPD,
};

/// ColorChecker patch names, row-major from the top-left patch.
pub use tables::CHECKER_NAMES;

fn lerp_table(start: f64, step: f64, len: usize, nm: f64, get: impl Fn(usize) -> f64) -> f64 {
    let pos = (nm - start) / step;
    if pos < 0.0 || pos > (len - 1) as f64 {
        return 0.0;
    }
    let i = pos.floor() as usize;
    if i + 1 >= len {
        return get(len - 1);
    }
    let t = pos - i as f64;
    get(i) * (1.0 - t) + get(i + 1) * t
}

/// x̄, ȳ, z̄ at `nm`.
pub fn cmf(nm: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = lerp_table(CMF_START_NM, CMF_STEP_NM, CMF_1931.len(), nm, |i| CMF_1931[i][k]);
    }
    out
}

/// CIE 1924 photopic luminous efficiency.
pub fn v_lambda(nm: f64) -> f64 {
    lerp_table(CMF_START_NM, CMF_STEP_NM, CMF_1931.len(), nm, |i| CMF_1931[i][1])
}

/// Relative spectral power of illuminant D65 (100 at 560 nm).
pub fn d65(nm: f64) -> f64 {
    lerp_table(CMF_START_NM, CMF_STEP_NM, D65_SPD.len(), nm, |i| D65_SPD[i])
}

/// Reflectance of ColorChecker patch `patch` (0..24); held constant beyond the table ends.
pub fn checker_reflectance(patch: usize, nm: f64) -> f64 {
    let row = &CHECKER_REFLECTANCE[patch];
    let last = CHECKER_START_NM + CHECKER_STEP_NM * (row.len() - 1) as f64;
    let nm = nm.clamp(CHECKER_START_NM, last);
    lerp_table(CHECKER_START_NM, CHECKER_STEP_NM, row.len(), nm, |i| row[i])
}

/// D65 white point, Y = 1.
pub const D65_WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_peaks_at_555() {
        assert_eq!(v_lambda(555.0), 1.0);
        assert!(v_lambda(550.0) < 1.0 && v_lambda(560.0) < 1.0);
        assert_eq!(v_lambda(300.0), 0.0);
        assert_eq!(v_lambda(800.0), 0.0);
    }

    #[test]
    fn interpolation_between_nodes() {
        let mid = v_lambda(552.5);
        assert!((mid - 0.5 * (v_lambda(550.0) + v_lambda(555.0))).abs() < 1e-15);
    }

    #[test]
    fn d65_chromaticity_from_table() {
        let mut xyz = [0.0; 3];
        let mut nm = 360.0;
        while nm <= 780.0 {
            let c = cmf(nm);
            for k in 0..3 {
                xyz[k] += c[k] * d65(nm);
            }
            nm += 5.0;
        }
        let s: f64 = xyz.iter().sum();
        assert!((xyz[0] / s - 0.3127).abs() < 1e-3);
        assert!((xyz[1] / s - 0.3290).abs() < 1e-3);
    }

    #[test]
    fn checker_white_and_black() {
        let white = checker_reflectance(18, 550.0);
        let black = checker_reflectance(23, 550.0);
        assert!(white > 0.8 && black < 0.05);
        assert_eq!(checker_reflectance(0, 780.0), checker_reflectance(0, 730.0));
        assert_eq!(CHECKER_NAMES[18], "white 9.5 (.05 D)");
    }
}
