//! Config-driven runs: scene → compose → optics → sensor → reconstruct →
//! metrics, with a JSON report whose bytes depend only on the config.

mod config;

pub use config::{
    derive_seed, ApertureConfig, ComposeConfig, ComposeTarget, DemosaicMethod, HdrMethod, Metric,
    MetricsConfig, OutputConfig, PsfConfig, PsfMode, ReconstructConfig, SceneConfig, SceneSource,
    SeedOverrides, SensorConfig, WavefrontConfig, SEEDED_STAGES,
};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hdr::{combine3, input_refer_capture, InputReferredImage};
use crate::io::{export_csv, export_gray16_png, export_mask_png, export_png, read_sri, write_sri, Table};
use crate::isp::{
    delta_e, demosaic_bilinear, demosaic_rgbw, spectral_to_xyz, ssim, xyz_to_srgb_display, CameraColor, XyzImage,
};
use crate::optics::{
    apply_optics, build_psf_stack, kernel_cap, padded_size, synthesize_apodization, PsfSampling, PsfStack, WavefrontSpec,
};
use crate::scenes;
use crate::sensor::{expose, expose_split, preset, Capture, CaptureSet, SensorPreset, SensorSpec};
use crate::spectral::{
    compose_light_groups, dynamic_range, line_profile, luminance_map, mean_luminance, set_weights_for_target,
    GroupWeights, LightGroup, SpectralImage, SpectralKind, DEFAULT_CLIP_PERCENTILES,
};

/// Luminance statistics of an image.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelStats {
    pub rows: usize,
    pub cols: usize,
    pub mean: f64,
    pub max: f64,
    /// log₁₀ range between the default clip percentiles.
    pub dynamic_range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComposeReport {
    pub weights: GroupWeights,
    pub achieved_dynamic_range: Option<f64>,
    pub achieved_mean_luminance: Option<f64>,
    pub reachable: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpticsReport {
    pub mode: PsfMode,
    /// Kernel widths per wavelength.
    pub kernel_sizes: Vec<usize>,
    pub aperture_open_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaptureReport {
    pub mean_dn: f64,
    pub max_dn: u16,
    pub saturated_fraction: f64,
    pub volts_per_electron: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorReport {
    pub spec: SensorSpec,
    pub split: Option<crate::sensor::SplitPixelSpec>,
    pub captures: BTreeMap<String, CaptureReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionReport {
    pub hdr: HdrMethod,
    pub demosaic: DemosaicMethod,
    pub valid_fraction: f64,
    /// Electrons of the (large) photodetector.
    pub min_valid: Option<f64>,
    pub max_valid: Option<f64>,
}

/// Everything a run produced, in a stable serialization order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub config: SceneConfig,
    pub seeds: BTreeMap<String, u64>,
    pub scene: LevelStats,
    pub compose: Option<ComposeReport>,
    pub optics: OpticsReport,
    /// Sensor-plane illuminance, lux.
    pub irradiance: LevelStats,
    pub sensor: SensorReport,
    pub reconstruction: ReconstructionReport,
    pub metrics: BTreeMap<String, f64>,
    pub profiles: BTreeMap<String, Vec<f64>>,
    /// File name → SHA-256 of its bytes.
    pub artifacts: BTreeMap<String, String>,
}

/// Report, its serialized bytes and their SHA-256.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub json: String,
    pub hash: String,
    pub report_path: Option<PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn level_stats(map: &Array2<f64>) -> Result<LevelStats> {
    let (rows, cols) = map.dim();
    Ok(LevelStats {
        rows,
        cols,
        mean: mean_luminance(map.view()),
        max: map.iter().copied().fold(0.0, f64::max),
        dynamic_range: dynamic_range(map.view(), DEFAULT_CLIP_PERCENTILES)?,
    })
}

enum Scene {
    Image(SpectralImage),
    Group(LightGroup),
}

fn load_scene(cfg: &SceneConfig) -> Result<Scene> {
    let g = &cfg.grid;
    Ok(match &cfg.scene {
        SceneSource::PointGrid { rows, cols, n_sources, top_level, decade_step, background_level } => Scene::Image(
            scenes::gen_point_grid_scene(*rows, *cols, g, *n_sources, *top_level, *decade_step, *background_level)?,
        ),
        SceneSource::Ramp { rows, cols, decades, min_level } => {
            Scene::Image(scenes::gen_ramp_scene(*rows, *cols, g, *decades, *min_level)?.image)
        }
        SceneSource::Tunnel { rows, cols, interior_level, exit_level } => {
            Scene::Group(scenes::gen_tunnel_scene(*rows, *cols, g, *interior_level, *exit_level)?)
        }
        SceneSource::Macbeth { rows, cols, white_luminance } => {
            Scene::Image(scenes::gen_macbeth_scene(*rows, *cols, g, *white_luminance)?)
        }
        SceneSource::Files { sky, headlights, streetlights, otherlights } => {
            let paths = [sky, headlights, streetlights, otherlights];
            let loaded: Vec<Option<SpectralImage>> = paths
                .iter()
                .map(|p| p.as_ref().map(read_sri).transpose())
                .collect::<Result<_>>()?;
            let first = loaded.iter().flatten().next().expect("validated: one member present");
            let dark = SpectralImage::zeros(first.rows(), first.cols(), *first.grid(), SpectralKind::Radiance);
            let members: Vec<SpectralImage> = loaded.into_iter().map(|m| m.unwrap_or_else(|| dark.clone())).collect();
            let members: [SpectralImage; 4] = members.try_into().expect("four members");
            if !members[0].grid().same_as(g) {
                return Err(Error::Config(format!(
                    "scene files use grid {:?} but the config grid is {:?}",
                    members[0].grid(),
                    g
                )));
            }
            Scene::Group(LightGroup::new(members)?)
        }
    })
}

fn compose(cfg: &SceneConfig, scene: Scene) -> Result<(SpectralImage, Option<ComposeReport>)> {
    let group = match scene {
        Scene::Image(img) => return Ok((img, None)),
        Scene::Group(g) => g,
    };
    let Some(c) = cfg.compose else {
        let w = GroupWeights::uniform(1.0)?;
        let img = compose_light_groups(&group, &w)?;
        return Ok((
            img,
            Some(ComposeReport { weights: w, achieved_dynamic_range: None, achieved_mean_luminance: None, reachable: None }),
        ));
    };
    let start = match c.weights {
        Some(w) => w,
        None => GroupWeights::uniform(1.0)?,
    };
    match c.target {
        None => Ok((
            compose_light_groups(&group, &start)?,
            Some(ComposeReport { weights: start, achieved_dynamic_range: None, achieved_mean_luminance: None, reachable: None }),
        )),
        Some(t) => {
            let sol = set_weights_for_target(&group, &start, &t.fixed, t.dynamic_range, t.mean_luminance)?;
            Ok((
                compose_light_groups(&group, &sol.weights)?,
                Some(ComposeReport {
                    weights: sol.weights,
                    achieved_dynamic_range: Some(sol.achieved_dr),
                    achieved_mean_luminance: Some(sol.achieved_mean_luminance),
                    reachable: Some(sol.reachable),
                }),
            ))
        }
    }
}

/// Built-in preset name, or a path to a preset TOML file.
pub fn load_preset(name: &str) -> Result<SensorPreset> {
    if name.ends_with(".toml") {
        let text = std::fs::read_to_string(name).map_err(|e| Error::io(name, e))?;
        SensorPreset::from_toml(&text)
    } else {
        preset(name)
    }
}

fn build_psfs(cfg: &SceneConfig, pitch: f64, rows: usize, cols: usize) -> Result<(PsfStack, Option<f64>)> {
    match cfg.psf.mode {
        PsfMode::Delta => Ok((PsfStack::delta(cfg.grid, pitch), None)),
        PsfMode::Diffraction => {
            let spec = cfg.aperture.to_spec(&cfg.optics, cfg.stage_seed("aperture"));
            let mask = synthesize_apodization(&spec, cfg.psf.pupil_samples)?;
            let wf = WavefrontSpec {
                zernike_coeffs: cfg.wavefront.zernike_coeffs.clone(),
                reference_lambda: cfg.wavefront.reference_lambda,
                f_number: cfg.optics.f_number,
                focal_length: cfg.optics.focal_length,
            };
            let sampling = PsfSampling {
                n_fft: padded_size(cfg.psf.pupil_samples, cfg.psf.padding),
                target_pitch: pitch,
                max_kernel: cfg.psf.max_kernel.min(kernel_cap(rows, cols)),
            };
            Ok((build_psf_stack(&mask, &wf, &cfg.grid, sampling)?, Some(mask.open_fraction())))
        }
    }
}

enum Captures {
    Single(Capture),
    Split(CaptureSet),
}

impl Captures {
    fn named(&self) -> Vec<(&'static str, &Capture)> {
        match self {
            Captures::Single(c) => vec![("single", c)],
            Captures::Split(s) => vec![("lphg", &s.lphg), ("lplg", &s.lplg), ("splg", &s.splg)],
        }
    }

    /// The capture read at low gain from the main photodetector.
    fn main(&self) -> &Capture {
        match self {
            Captures::Single(c) => c,
            Captures::Split(s) => &s.lplg,
        }
    }
}

fn capture_report(c: &Capture) -> CaptureReport {
    let n = c.dn.len() as f64;
    CaptureReport {
        mean_dn: c.dn.iter().map(|&d| f64::from(d)).sum::<f64>() / n,
        max_dn: c.dn.iter().copied().max().unwrap_or(0),
        saturated_fraction: c.saturated.iter().filter(|&&s| s).count() as f64 / n,
        volts_per_electron: c.volts_per_electron,
    }
}

fn reconstruct_hdr(cfg: &SceneConfig, captures: &Captures, lsb: f64) -> Result<InputReferredImage> {
    match (cfg.reconstruct.hdr, captures) {
        (HdrMethod::Combine3, Captures::Split(s)) => combine3(s),
        (HdrMethod::Combine3, Captures::Single(_)) => {
            Err(Error::Config("combine3 needs a split-pixel sensor preset".into()))
        }
        (HdrMethod::None, c) => input_refer_capture(c.main(), lsb, 1.0),
    }
}

struct Rendered {
    xyz: XyzImage,
    reference: XyzImage,
    white: [f64; 3],
}

fn render(
    cfg: &SceneConfig,
    irr: &SpectralImage,
    sensor: &SensorSpec,
    large_area: f64,
    electrons: &InputReferredImage,
) -> Result<Option<Rendered>> {
    let method = cfg.reconstruct.demosaic;
    if method == DemosaicMethod::None {
        return Ok(None);
    }
    let cam = CameraColor::fit(&sensor.cfa, &cfg.grid)?;
    let area_time = sensor.pixel.area_m2() * sensor.exposure * large_area;
    let bal = cam.balance_mosaic(electrons.values.view(), &sensor.cfa, area_time)?;
    let rgb = match method {
        DemosaicMethod::Bilinear => demosaic_bilinear(bal.view(), &sensor.cfa)?,
        DemosaicMethod::Rgbw => demosaic_rgbw(bal.view(), &sensor.cfa)?,
        DemosaicMethod::None => unreachable!(),
    };
    let xyz = cam.to_xyz(&rgb)?;
    let view = if irr.rows() == sensor.rows && irr.cols() == sensor.cols {
        irr.clone()
    } else {
        irr.center_crop(sensor.rows, sensor.cols)?
    };
    let reference = spectral_to_xyz(&view)?;
    // White: the reference pixel with the largest Y.
    let (mut best, mut white) = (f64::NEG_INFINITY, [0.0; 3]);
    for r in 0..reference.rows() {
        for c in 0..reference.cols() {
            let p = reference.pixel(r, c);
            if p[1] > best {
                best = p[1];
                white = p;
            }
        }
    }
    if !(white[1] > 0.0) {
        return Err(Error::Domain("reference image is black; no white point".into()));
    }
    Ok(Some(Rendered { xyz, reference, white }))
}

struct Writer {
    dir: Option<PathBuf>,
    hashes: BTreeMap<String, String>,
}

impl Writer {
    fn emit(&mut self, name: &str, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let path = dir.join(name);
        write(&path)?;
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        self.hashes.insert(name.to_string(), sha256_hex(&bytes));
        Ok(())
    }
}

/// Execute a run. Errors carry the name of the stage that failed.
pub fn run_pipeline(cfg: &SceneConfig) -> Result<RunOutcome> {
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    let out = &cfg.output;
    if let Some(dir) = &out.dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e).in_stage("output"))?;
    }
    let mut writer = Writer { dir: out.dir.clone(), hashes: BTreeMap::new() };

    let scene = load_scene(cfg).map_err(|e| e.in_stage("scene"))?;
    let (radiance, compose_report) = compose(cfg, scene).map_err(|e| e.in_stage("compose"))?;
    let scene_lum = luminance_map(&radiance).map_err(|e| e.in_stage("compose"))?;
    let scene_stats = level_stats(&scene_lum).map_err(|e| e.in_stage("compose"))?;
    if out.radiance_sri {
        writer.emit("radiance.sri", |p| write_sri(p, &radiance)).map_err(|e| e.in_stage("output"))?;
    }

    let sensor_preset = load_preset(&cfg.sensor.preset).map_err(|e| e.in_stage("sensor"))?;
    let mut sensor = sensor_preset.sensor.clone().with_size(radiance.rows(), radiance.cols());
    sensor.seed = cfg.stage_seed("sensor");
    if let Some(t) = cfg.sensor.exposure {
        sensor.exposure = t;
    }
    if let Some(g) = cfg.sensor.analog_gain {
        sensor.analog_gain = g;
    }
    sensor.validate().map_err(|e| e.in_stage("sensor"))?;

    let (psfs, open_fraction) = build_psfs(cfg, sensor.pixel.pitch, radiance.rows(), radiance.cols()).map_err(|e| e.in_stage("optics"))?;
    let irr = apply_optics(&radiance, &psfs, &cfg.optics).map_err(|e| e.in_stage("optics"))?;
    let illum = spectral_to_xyz(&irr).map_err(|e| e.in_stage("optics"))?.y().to_owned();
    let irr_stats = level_stats(&illum).map_err(|e| e.in_stage("optics"))?;
    if out.irradiance_sri {
        writer.emit("irradiance.sri", |p| write_sri(p, &irr)).map_err(|e| e.in_stage("output"))?;
    }

    let noise = cfg.sensor.noise;
    let captures = match &sensor_preset.split {
        Some(split) => Captures::Split(expose_split(&irr, &sensor, split, noise).map_err(|e| e.in_stage("sensor"))?),
        None => Captures::Single(expose(&irr, &sensor, noise).map_err(|e| e.in_stage("sensor"))?),
    };
    for (name, c) in captures.named() {
        if out.raw_png {
            writer.emit(&format!("raw_{name}.png"), |p| export_gray16_png(p, &c.dn)).map_err(|e| e.in_stage("output"))?;
        }
        if out.saturation_png {
            writer
                .emit(&format!("saturated_{name}.png"), |p| export_mask_png(p, &c.saturated))
                .map_err(|e| e.in_stage("output"))?;
        }
    }

    let lsb = sensor.pixel.lsb();
    let hdr = reconstruct_hdr(cfg, &captures, lsb).map_err(|e| e.in_stage("reconstruct"))?;
    let large_area = sensor_preset.split.map_or(1.0, |s| s.area_split);
    let rendered = render(cfg, &irr, &sensor, large_area, &hdr).map_err(|e| e.in_stage("reconstruct"))?;
    let valid: Vec<f64> = hdr.valid_values();
    let recon_report = ReconstructionReport {
        hdr: cfg.reconstruct.hdr,
        demosaic: cfg.reconstruct.demosaic,
        valid_fraction: valid.len() as f64 / hdr.values.len() as f64,
        min_valid: valid.iter().copied().reduce(f64::min),
        max_valid: valid.iter().copied().reduce(f64::max),
    };
    if let Some(r) = &rendered {
        if out.srgb_png {
            let img = xyz_to_srgb_display(&r.xyz, 1.0 / r.white[1]).map_err(|e| e.in_stage("reconstruct"))?;
            writer.emit("srgb.png", |p| export_png(p, &img)).map_err(|e| e.in_stage("output"))?;
        }
    }

    let mut metrics: BTreeMap<String, f64> = BTreeMap::new();
    let mut profiles: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    metrics.insert("scene_dynamic_range".to_string(), scene_stats.dynamic_range);
    let stage = |e: Error| e.in_stage("metrics");
    for m in &cfg.metrics.list {
        match m {
            Metric::IrradianceDr => {
                metrics.insert("irradiance_dynamic_range".into(), irr_stats.dynamic_range);
            }
            Metric::Saturation => {
                for (name, c) in captures.named() {
                    metrics.insert(format!("saturated_fraction_{name}"), capture_report(c).saturated_fraction);
                }
                metrics.insert("invalid_fraction_reconstruction".into(), 1.0 - recon_report.valid_fraction);
            }
            Metric::Profile => {
                let row = cfg.metrics.profile_row.unwrap_or(sensor.rows / 2);
                let scene_row = row + (radiance.rows() - sensor.rows) / 2;
                profiles.insert("scene_luminance".into(), line_profile(scene_lum.view(), scene_row).map_err(stage)?);
                profiles.insert("reconstruction".into(), line_profile(hdr.values.view(), row).map_err(stage)?);
                let valid_row: Vec<f64> = line_profile(hdr.valid.mapv(|v| f64::from(u8::from(v))).view(), row).map_err(stage)?;
                profiles.insert("reconstruction_valid".into(), valid_row);
                let main = input_refer_capture(captures.main(), lsb, 1.0).map_err(stage)?;
                profiles.insert("main_capture".into(), line_profile(main.values.view(), row).map_err(stage)?);
                let sat = captures.main().saturated.row(row).iter().filter(|&&s| s).count();
                metrics.insert("profile_main_capture_saturated".into(), sat as f64);
                let invalid = hdr.valid.row(row).iter().filter(|&&v| !v).count();
                metrics.insert("profile_reconstruction_invalid".into(), invalid as f64);
            }
            Metric::Ssim => {
                let r = rendered.as_ref().expect("validated: demosaic set");
                let s = ssim(r.xyz.y(), r.reference.y(), r.white[1]).map_err(stage)?;
                metrics.insert("ssim".into(), s);
            }
            Metric::DeltaE => {
                let r = rendered.as_ref().expect("validated: demosaic set");
                let d = delta_e(&r.xyz, &r.reference, r.white).map_err(stage)?;
                metrics.insert("delta_e_mean".into(), d.mean);
            }
        }
    }
    if out.profile_csv && !profiles.is_empty() {
        let mut table = Table::new().with_column("column", (0..sensor.cols).map(|c| c as f64).collect());
        for (k, v) in &profiles {
            table = table.with_column(k, v.clone());
        }
        writer.emit("profile.csv", |p| export_csv(p, &table)).map_err(|e| e.in_stage("output"))?;
    }

    let seeds = SEEDED_STAGES.iter().map(|s| (s.to_string(), cfg.stage_seed(s))).collect();
    let report = RunReport {
        tool: format!("hdrsim {}", env!("CARGO_PKG_VERSION")),
        config: cfg.clone(),
        seeds,
        scene: scene_stats,
        compose: compose_report,
        optics: OpticsReport {
            mode: cfg.psf.mode,
            kernel_sizes: psfs.kernels.iter().map(|k| k.nrows()).collect(),
            aperture_open_fraction: open_fraction,
        },
        irradiance: irr_stats,
        sensor: SensorReport {
            spec: sensor.clone(),
            split: sensor_preset.split,
            captures: captures.named().into_iter().map(|(n, c)| (n.to_string(), capture_report(c))).collect(),
        },
        reconstruction: recon_report,
        metrics,
        profiles,
        artifacts: writer.hashes,
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Structural(format!("report serialization: {e}")).in_stage("output"))?;
    let hash = sha256_hex(json.as_bytes());
    let report_path = match &out.dir {
        Some(dir) => {
            let p = dir.join(&out.report);
            std::fs::write(&p, &json).map_err(|e| Error::io(&p, e).in_stage("output"))?;
            Some(p)
        }
        None => None,
    };
    Ok(RunOutcome { report, json, hash, report_path })
}
