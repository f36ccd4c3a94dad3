//! Named sensor configurations shipped as TOML.

use serde::{Deserialize, Serialize};

use super::{SensorSpec, SplitPixelSpec};
use crate::error::{Error, Result};

/// A sensor definition with an optional split-pixel section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorPreset {
    pub sensor: SensorSpec,
    #[serde(default)]
    pub split: Option<SplitPixelSpec>,
}

impl SensorPreset {
    pub fn from_toml(text: &str) -> Result<Self> {
        let p: SensorPreset = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        p.sensor.validate()?;
        if let Some(s) = &p.split {
            s.validate()?;
        }
        Ok(p)
    }
}

pub const PRESET_NAMES: [&str; 3] = ["splitpixel-3capture", "rgbw-onsemi-like", "rgb-bayer-like"];

fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "splitpixel-3capture" => Some(include_str!("../../presets/splitpixel-3capture.toml")),
        "rgbw-onsemi-like" => Some(include_str!("../../presets/rgbw-onsemi-like.toml")),
        "rgb-bayer-like" => Some(include_str!("../../presets/rgb-bayer-like.toml")),
        _ => None,
    }
}

/// Load a built-in preset by name.
pub fn preset(name: &str) -> Result<SensorPreset> {
    let text = preset_text(name).ok_or_else(|| {
        Error::Config(format!("unknown sensor preset `{name}`; known: {}", PRESET_NAMES.join(", ")))
    })?;
    SensorPreset::from_toml(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor::Channel;

    #[test]
    fn all_presets_load() {
        for name in PRESET_NAMES {
            preset(name).unwrap();
        }
        assert!(preset("splitpixel-3capture").unwrap().split.is_some());
        assert!(preset("rgb-bayer-like").unwrap().split.is_none());
        assert!(preset("nope").is_err());
    }

    #[test]
    fn rgbw_matches_bayer_color_filters() {
        let w = preset("rgbw-onsemi-like").unwrap().sensor;
        let b = preset("rgb-bayer-like").unwrap().sensor;
        assert_eq!(w.pixel, b.pixel);
        for ch in [Channel::R, Channel::G, Channel::B] {
            assert_eq!(w.cfa.qe.get(&ch), b.cfa.qe.get(&ch));
        }
        assert_eq!(w.cfa.channel_at(1, 0), Channel::W);
        let mut nm = 350.0;
        while nm <= 780.0 {
            for ch in [Channel::R, Channel::G, Channel::B] {
                assert!(w.cfa.qe(Channel::W, nm) >= w.cfa.qe(ch, nm));
            }
            nm += 0.5;
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = include_str!("../../presets/rgb-bayer-like.toml").replace("seed = 0", "seed = 0\nbogus = 1");
        assert!(matches!(SensorPreset::from_toml(&text), Err(Error::Config(_))));
    }
}
