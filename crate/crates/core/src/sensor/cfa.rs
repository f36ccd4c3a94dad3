use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::WavelengthGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Channel {
    R,
    G,
    B,
    W,
}

impl Channel {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'R' => Ok(Channel::R),
            'G' => Ok(Channel::G),
            'B' => Ok(Channel::B),
            'W' => Ok(Channel::W),
            other => Err(Error::Config(format!("unknown CFA channel id `{other}`"))),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Channel::R => "R",
            Channel::G => "G",
            Channel::B => "B",
            Channel::W => "W",
        };
        f.write_str(c)
    }
}

/// Quantum efficiency curve of one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum QeCurve {
    /// peak·exp(−(λ−center)²/(2σ²)).
    Gaussian { peak_nm: f64, sigma_nm: f64, peak: f64 },
    /// Pointwise maximum of the other channels' curves, times `scale`.
    Envelope {
        #[serde(default = "unit")]
        scale: f64,
    },
    /// Tabulated values on a uniform grid; zero outside.
    Table { start_nm: f64, step_nm: f64, values: Vec<f64> },
}

fn unit() -> f64 {
    1.0
}

impl QeCurve {
    fn eval_direct(&self, nm: f64) -> Option<f64> {
        match self {
            QeCurve::Gaussian { peak_nm, sigma_nm, peak } => {
                Some(peak * (-(nm - peak_nm).powi(2) / (2.0 * sigma_nm * sigma_nm)).exp())
            }
            QeCurve::Envelope { .. } => None,
            QeCurve::Table { start_nm, step_nm, values } => {
                let pos = (nm - start_nm) / step_nm;
                if pos < 0.0 || pos > (values.len() - 1) as f64 {
                    return Some(0.0);
                }
                let i = pos.floor() as usize;
                if i + 1 >= values.len() {
                    return Some(values[values.len() - 1]);
                }
                let t = pos - i as f64;
                Some(values[i] * (1.0 - t) + values[i + 1] * t)
            }
        }
    }
}

/// Repeating tile of channel ids plus per-channel QE curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorFilterArray {
    /// Tile rows, one character per channel, e.g. `["RG", "GB"]`.
    pub pattern: Vec<String>,
    pub qe: BTreeMap<Channel, QeCurve>,
}

impl ColorFilterArray {
    pub fn bayer_rggb(qe: BTreeMap<Channel, QeCurve>) -> Self {
        ColorFilterArray {
            pattern: vec!["RG".into(), "GB".into()],
            qe,
        }
    }

    /// Tile dimensions (rows, cols).
    pub fn tile(&self) -> (usize, usize) {
        (
            self.pattern.len(),
            self.pattern.first().map_or(0, |r| r.chars().count()),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let (tr, tc) = self.tile();
        if tr == 0 || tc == 0 {
            return Err(Error::Config("CFA pattern is empty".into()));
        }
        for row in &self.pattern {
            if row.chars().count() != tc {
                return Err(Error::Config("CFA pattern rows differ in length".into()));
            }
            for c in row.chars() {
                let ch = Channel::from_char(c)?;
                if !self.qe.contains_key(&ch) {
                    return Err(Error::Config(format!("no QE curve for channel {ch}")));
                }
            }
        }
        if let Some(QeCurve::Envelope { .. }) = self.qe.get(&Channel::R).or(self.qe.get(&Channel::G)).or(self.qe.get(&Channel::B)) {
            return Err(Error::Config("only the W channel may use an envelope QE".into()));
        }
        for (ch, curve) in &self.qe {
            match curve {
                QeCurve::Gaussian { sigma_nm, peak, .. } => {
                    if !(*sigma_nm > 0.0) || !(0.0..=1.0).contains(peak) {
                        return Err(Error::Config(format!("bad Gaussian QE for {ch}")));
                    }
                }
                QeCurve::Table { step_nm, values, .. } => {
                    if !(*step_nm > 0.0) || values.is_empty() || values.iter().any(|v| !(0.0..=1.0).contains(v)) {
                        return Err(Error::Config(format!("QE table for {ch} must hold values in [0, 1]")));
                    }
                }
                QeCurve::Envelope { scale } => {
                    if !(*scale > 0.0) {
                        return Err(Error::Config(format!("envelope scale for {ch} must be positive")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn channel_at(&self, row: usize, col: usize) -> Channel {
        let (tr, tc) = self.tile();
        let c = self.pattern[row % tr].chars().nth(col % tc).expect("validated tile");
        Channel::from_char(c).expect("validated tile")
    }

    /// Channels that occur in the tile, sorted.
    pub fn channels(&self) -> Vec<Channel> {
        let mut v: Vec<Channel> = self
            .pattern
            .iter()
            .flat_map(|r| r.chars())
            .filter_map(|c| Channel::from_char(c).ok())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// QE of `ch` at `nm`, clamped to [0, 1].
    pub fn qe(&self, ch: Channel, nm: f64) -> f64 {
        let v = match self.qe.get(&ch) {
            None => 0.0,
            Some(QeCurve::Envelope { scale }) => {
                let mut m: f64 = 0.0;
                for (other, curve) in &self.qe {
                    if *other != ch {
                        if let Some(v) = curve.eval_direct(nm) {
                            m = m.max(v);
                        }
                    }
                }
                m * scale
            }
            Some(curve) => curve.eval_direct(nm).unwrap_or(0.0),
        };
        v.clamp(0.0, 1.0)
    }

    /// QE sampled on `grid`.
    pub fn qe_on_grid(&self, ch: Channel, grid: &WavelengthGrid) -> Vec<f64> {
        grid.wavelengths().map(|nm| self.qe(ch, nm)).collect()
    }
}

/// Illustrative smooth RGB curves peaking at 610/540/460 nm.
pub fn default_rgb_qe() -> BTreeMap<Channel, QeCurve> {
    let mut m = BTreeMap::new();
    m.insert(Channel::R, QeCurve::Gaussian { peak_nm: 610.0, sigma_nm: 40.0, peak: 0.8 });
    m.insert(Channel::G, QeCurve::Gaussian { peak_nm: 540.0, sigma_nm: 40.0, peak: 0.8 });
    m.insert(Channel::B, QeCurve::Gaussian { peak_nm: 460.0, sigma_nm: 35.0, peak: 0.8 });
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rgbw() -> ColorFilterArray {
        let mut qe = default_rgb_qe();
        qe.insert(Channel::W, QeCurve::Envelope { scale: 1.0 });
        ColorFilterArray {
            pattern: vec!["RG".into(), "WB".into()],
            qe,
        }
    }

    #[test]
    fn bayer_layout() {
        let cfa = ColorFilterArray::bayer_rggb(default_rgb_qe());
        cfa.validate().unwrap();
        assert_eq!(cfa.channel_at(0, 0), Channel::R);
        assert_eq!(cfa.channel_at(0, 1), Channel::G);
        assert_eq!(cfa.channel_at(1, 0), Channel::G);
        assert_eq!(cfa.channel_at(3, 3), Channel::B);
        assert_eq!(cfa.channels(), vec![Channel::R, Channel::G, Channel::B]);
    }

    #[test]
    fn white_dominates_everywhere() {
        let cfa = rgbw();
        cfa.validate().unwrap();
        let mut nm = 350.0;
        while nm <= 780.0 {
            let w = cfa.qe(Channel::W, nm);
            for ch in [Channel::R, Channel::G, Channel::B] {
                assert!(w >= cfa.qe(ch, nm));
            }
            nm += 1.0;
        }
        assert_eq!(cfa.channel_at(1, 0), Channel::W);
    }

    #[test]
    fn unknown_channel_rejected() {
        let cfa = ColorFilterArray {
            pattern: vec!["RX".into(), "GB".into()],
            qe: default_rgb_qe(),
        };
        assert!(matches!(cfa.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn missing_qe_rejected() {
        let cfa = ColorFilterArray {
            pattern: vec!["RG".into(), "WB".into()],
            qe: default_rgb_qe(),
        };
        assert!(cfa.validate().is_err());
    }

    #[test]
    fn table_interpolates() {
        let t = QeCurve::Table { start_nm: 400.0, step_nm: 100.0, values: vec![0.0, 0.5, 1.0] };
        assert_eq!(t.eval_direct(450.0), Some(0.25));
        assert_eq!(t.eval_direct(399.0), Some(0.0));
        assert_eq!(t.eval_direct(600.0), Some(1.0));
    }

    #[test]
    fn qe_toml_shape() {
        let cfa: ColorFilterArray = toml::from_str(
            r#"
            pattern = ["RG", "WB"]
            [qe.R]
            model = "gaussian"
            peak_nm = 610.0
            sigma_nm = 40.0
            peak = 0.8
            [qe.G]
            model = "gaussian"
            peak_nm = 540.0
            sigma_nm = 40.0
            peak = 0.8
            [qe.B]
            model = "gaussian"
            peak_nm = 460.0
            sigma_nm = 35.0
            peak = 0.8
            [qe.W]
            model = "envelope"
            "#,
        )
        .unwrap();
        assert_eq!(cfa, rgbw());
    }
}
