//! Declarative run description, read from TOML.
//!
//! ```toml
//! seed = 7                      # master seed
//!
//! [grid]                        # optional, default 400–700 nm in 10 nm steps
//! start_nm = 400
//! step_nm = 10
//! count = 31
//!
//! [scene]
//! generator = "tunnel"          # point-grid | ramp | tunnel | macbeth | files
//! rows = 128
//! cols = 128
//! interior_level = 1.0
//! exit_level = 1e5
//!
//! [compose]                     # light-group scenes only
//! weights = { sky = 1, headlights = 1, streetlights = 1, otherlights = 1 }
//!
//! [optics]
//! f_number = 4
//! focal_length = 4.4
//!
//! [psf]
//! mode = "diffraction"          # delta | diffraction
//!
//! [sensor]
//! preset = "splitpixel-3capture"
//! noise = true
//!
//! [reconstruct]
//! hdr = "combine3"              # none | combine3
//! demosaic = "bilinear"         # none | bilinear | rgbw
//!
//! [metrics]
//! list = ["profile", "saturation"]
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Every table rejects unknown keys. Relative paths resolve against the
//! directory of the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::optics::{ApertureSpec, OpticsSpec};
use crate::spectral::{GroupWeights, WavelengthGrid, WeightMask};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    /// Master seed; stage seeds derive from it unless set in `[seeds]`.
    pub seed: u64,
    #[serde(default)]
    pub seeds: SeedOverrides,
    #[serde(default)]
    pub grid: WavelengthGrid,
    pub scene: SceneSource,
    #[serde(default)]
    pub compose: Option<ComposeConfig>,
    pub optics: OpticsSpec,
    #[serde(default)]
    pub aperture: ApertureConfig,
    #[serde(default)]
    pub wavefront: WavefrontConfig,
    #[serde(default)]
    pub psf: PsfConfig,
    pub sensor: SensorConfig,
    #[serde(default)]
    pub reconstruct: ReconstructConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Explicit per-stage seeds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedOverrides {
    pub aperture: Option<u64>,
    pub sensor: Option<u64>,
}

/// Stages that draw random numbers.
pub const SEEDED_STAGES: [&str; 2] = ["aperture", "sensor"];

/// First eight bytes (little-endian) of SHA-256(master seed LE ‖ stage name).
pub fn derive_seed(master: u64, stage: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(stage.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SceneSource {
    PointGrid {
        rows: usize,
        cols: usize,
        n_sources: usize,
        top_level: f64,
        #[serde(default = "ten")]
        decade_step: f64,
        background_level: f64,
    },
    Ramp {
        rows: usize,
        cols: usize,
        decades: f64,
        min_level: f64,
    },
    Tunnel {
        rows: usize,
        cols: usize,
        interior_level: f64,
        exit_level: f64,
    },
    Macbeth {
        rows: usize,
        cols: usize,
        white_luminance: f64,
    },
    /// SRI radiance files, one per light group; missing members are dark.
    Files {
        sky: Option<PathBuf>,
        headlights: Option<PathBuf>,
        streetlights: Option<PathBuf>,
        otherlights: Option<PathBuf>,
    },
}

fn ten() -> f64 {
    10.0
}

impl SceneSource {
    pub fn is_light_group(&self) -> bool {
        matches!(self, SceneSource::Tunnel { .. } | SceneSource::Files { .. })
    }
}

/// Fixed weights, or a dynamic-range / mean-luminance target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeConfig {
    /// Weights to use, or the starting point of the target search.
    pub weights: Option<GroupWeights>,
    pub target: Option<ComposeTarget>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeTarget {
    pub dynamic_range: f64,
    pub mean_luminance: f64,
    #[serde(default)]
    pub fixed: WeightMask,
}

/// Aperture geometry and occluders; the dust/scratch seed comes from the
/// seed derivation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApertureConfig {
    pub n_blades: u32,
    pub blade_rotation: f64,
    pub dust_count: usize,
    pub dust_radius_range: (f64, f64),
    pub scratch_count: usize,
    pub scratch_width_range: (f64, f64),
    pub scratch_length_range: (f64, f64),
    pub occlusion_opacity: f64,
}

impl Default for ApertureConfig {
    fn default() -> Self {
        let d = ApertureSpec::default();
        ApertureConfig {
            n_blades: d.n_blades,
            blade_rotation: d.blade_rotation,
            dust_count: d.dust_count,
            dust_radius_range: d.dust_radius_range,
            scratch_count: d.scratch_count,
            scratch_width_range: d.scratch_width_range,
            scratch_length_range: d.scratch_length_range,
            occlusion_opacity: d.occlusion_opacity,
        }
    }
}

impl ApertureConfig {
    /// Pupil diameter follows from focal length over f-number.
    pub fn to_spec(&self, optics: &OpticsSpec, seed: u64) -> ApertureSpec {
        ApertureSpec {
            n_blades: self.n_blades,
            blade_rotation: self.blade_rotation,
            pupil_diameter: optics.focal_length / optics.f_number,
            dust_count: self.dust_count,
            dust_radius_range: self.dust_radius_range,
            scratch_count: self.scratch_count,
            scratch_width_range: self.scratch_width_range,
            scratch_length_range: self.scratch_length_range,
            occlusion_opacity: self.occlusion_opacity,
            seed,
        }
    }
}

/// Aberrations; f-number and focal length come from `[optics]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WavefrontConfig {
    /// (Noll index, waves at `reference_lambda`).
    pub zernike_coeffs: Vec<(usize, f64)>,
    pub reference_lambda: f64,
}

impl Default for WavefrontConfig {
    fn default() -> Self {
        WavefrontConfig { zernike_coeffs: Vec::new(), reference_lambda: 550.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsfMode {
    Delta,
    Diffraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsfConfig {
    pub mode: PsfMode,
    /// Pupil grid size.
    pub pupil_samples: usize,
    /// Zero-padding factor of the FFT.
    pub padding: usize,
    pub max_kernel: usize,
}

impl Default for PsfConfig {
    fn default() -> Self {
        PsfConfig { mode: PsfMode::Delta, pupil_samples: 128, padding: 4, max_kernel: 63 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorConfig {
    /// Built-in preset name, or a path to a preset TOML file.
    pub preset: String,
    #[serde(default = "yes")]
    pub noise: bool,
    pub exposure: Option<f64>,
    pub analog_gain: Option<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HdrMethod {
    None,
    Combine3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DemosaicMethod {
    None,
    Bilinear,
    Rgbw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructConfig {
    pub hdr: HdrMethod,
    pub demosaic: DemosaicMethod,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        ReconstructConfig { hdr: HdrMethod::None, demosaic: DemosaicMethod::None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Luminance profile along one row: scene, combined and LPLG-only.
    Profile,
    /// Saturated fraction per capture.
    Saturation,
    /// SSIM of rendered vs reference luminance.
    Ssim,
    /// Mean CIE76 ΔE of rendered vs reference color.
    DeltaE,
    /// Dynamic range of the sensor irradiance.
    IrradianceDr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    pub list: Vec<Metric>,
    /// Profile row; defaults to the middle row.
    pub profile_row: Option<usize>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig { list: Vec::new(), profile_row: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Artifact directory; nothing is written when unset.
    pub dir: Option<PathBuf>,
    pub report: String,
    pub radiance_sri: bool,
    pub irradiance_sri: bool,
    /// 16-bit DN PNG per capture.
    pub raw_png: bool,
    pub saturation_png: bool,
    /// Display-referred sRGB PNG of the demosaiced image.
    pub srgb_png: bool,
    pub profile_csv: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: None,
            report: "report.json".into(),
            radiance_sri: false,
            irradiance_sri: false,
            raw_png: false,
            saturation_png: false,
            srgb_png: false,
            profile_csv: false,
        }
    }
}

impl SceneConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SceneConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse a file and resolve its relative paths against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let SceneSource::Files { sky, headlights, streetlights, otherlights } = &mut self.scene {
            for p in [sky, headlights, streetlights, otherlights].into_iter().flatten() {
                fix(p);
            }
        }
        if let Some(d) = &mut self.output.dir {
            fix(d);
        }
        if self.sensor.preset.ends_with(".toml") {
            let mut p = PathBuf::from(&self.sensor.preset);
            fix(&mut p);
            self.sensor.preset = p.to_string_lossy().into_owned();
        }
    }

    /// Checks that need more than one section.
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.optics.validate()?;
        match (&self.compose, self.scene.is_light_group()) {
            (Some(_), false) => {
                return Err(Error::Config("[compose] applies only to light-group scenes (tunnel, files)".into()))
            }
            (Some(c), true) => {
                if let Some(w) = &c.weights {
                    w.validate()?;
                }
                if c.weights.is_none() && c.target.is_none() {
                    return Err(Error::Config("[compose] needs weights or a target".into()));
                }
            }
            _ => {}
        }
        if let SceneSource::Files { sky, headlights, streetlights, otherlights } = &self.scene {
            if [sky, headlights, streetlights, otherlights].iter().all(|p| p.is_none()) {
                return Err(Error::Config("scene files: give at least one light-group member".into()));
            }
        }
        if self.psf.padding == 0 || self.psf.max_kernel == 0 {
            return Err(Error::Config("psf needs padding ≥ 1 and max_kernel ≥ 1".into()));
        }
        if self.output.report.is_empty() {
            return Err(Error::Config("output.report must name a file".into()));
        }
        let needs_render = self.metrics.list.iter().any(|m| matches!(m, Metric::Ssim | Metric::DeltaE));
        if (needs_render || self.output.srgb_png) && self.reconstruct.demosaic == DemosaicMethod::None {
            return Err(Error::Config("ssim, delta-e and srgb_png need reconstruct.demosaic".into()));
        }
        Ok(())
    }

    /// Seed used by `stage`.
    pub fn stage_seed(&self, stage: &str) -> u64 {
        let explicit = match stage {
            "aperture" => self.seeds.aperture,
            "sensor" => self.seeds.sensor,
            _ => None,
        };
        explicit.unwrap_or_else(|| derive_seed(self.seed, stage))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 1
[scene]
generator = "ramp"
rows = 16
cols = 16
decades = 2
min_level = 1
[optics]
f_number = 4
focal_length = 4
[sensor]
preset = "rgb-bayer-like"
"#;

    #[test]
    fn minimal_parses_with_defaults() {
        let c = SceneConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.grid, WavelengthGrid::default());
        assert_eq!(c.psf.mode, PsfMode::Delta);
        assert!(c.sensor.noise);
        assert!(c.output.dir.is_none());
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = MINIMAL.replace("decades = 2", "decades = 2\nbogus = 1");
        assert!(matches!(SceneConfig::from_toml(&bad), Err(Error::Config(_))));
        let bad = format!("{MINIMAL}\n[psf]\nmode = \"delta\"\nn = 3\n");
        assert!(SceneConfig::from_toml(&bad).is_err());
        let bad = MINIMAL.replace("seed = 1", "seed = 1\nextra = true");
        assert!(SceneConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn compose_only_for_groups() {
        let bad = format!("{MINIMAL}\n[compose]\nweights = {{ sky = 1, headlights = 1, streetlights = 1, otherlights = 1 }}\n");
        assert!(SceneConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn seeds_derive_and_override() {
        let c = SceneConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.stage_seed("sensor"), derive_seed(1, "sensor"));
        assert_ne!(derive_seed(1, "sensor"), derive_seed(1, "aperture"));
        assert_ne!(derive_seed(1, "sensor"), derive_seed(2, "sensor"));
        let o = SceneConfig::from_toml(&MINIMAL.replace("seed = 1", "seed = 1\n[seeds]\nsensor = 5")).unwrap();
        assert_eq!(o.stage_seed("sensor"), 5);
        assert_eq!(o.stage_seed("aperture"), derive_seed(1, "aperture"));
    }

    #[test]
    fn derive_seed_oracle() {
        // SHA-256 of 0u64 LE bytes followed by "sensor", first 8 bytes LE.
        let mut h = Sha256::new();
        h.update([0u8; 8]);
        h.update(b"sensor");
        let d = h.finalize();
        let mut b = [0u8; 8];
        b.copy_from_slice(&d[..8]);
        assert_eq!(derive_seed(0, "sensor"), u64::from_le_bytes(b));
    }

    #[test]
    fn relative_paths_resolve() {
        let mut c = SceneConfig::from_toml(&MINIMAL.replace("rgb-bayer-like", "my.toml")).unwrap();
        c.output.dir = Some("out".into());
        c.resolve_paths(Path::new("/cfg"));
        assert_eq!(c.output.dir.as_deref(), Some(Path::new("/cfg/out")));
        assert_eq!(c.sensor.preset, "/cfg/my.toml");
    }
}
