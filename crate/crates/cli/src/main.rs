use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hdrsim_core::hdr::{combine3, input_refer_capture};
use hdrsim_core::io::{export_csv, export_gray16_png, export_png, read_gray16_png, read_sri, write_sri, Table};
use hdrsim_core::isp::{delta_e, demosaic_bilinear, demosaic_rgbw, spectral_to_xyz, ssim, xyz_to_srgb_display, CameraColor};
use hdrsim_core::optics::{
    apply_optics, build_psf_stack, kernel_cap, padded_size, psf_from_pupil, synthesize_apodization, build_pupil, ApertureSpec,
    OpticsSpec, PsfSampling, PsfStack, WavefrontSpec,
};
use hdrsim_core::pipeline::{load_preset, run_pipeline, SceneConfig};
use hdrsim_core::scenes;
use hdrsim_core::sensor::{expose, expose_split, Capture, CaptureSet, SensorPreset};
use hdrsim_core::spectral::{
    compose_light_groups, dynamic_range, line_profile, luminance_map, mean_luminance, set_weights_for_target,
    GroupWeights, LightGroup, SpectralImage, SpectralKind, WavelengthGrid, WeightMask, DEFAULT_CLIP_PERCENTILES,
};

#[derive(Parser)]
#[command(name = "hdrsim", version, about = "Physics-based HDR image-systems simulator")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic radiance scene as SRI.
    GenScene(GenScene),
    /// Weighted sum of light-group SRI files.
    Compose(Compose),
    /// Compute a PSF and write it as CSV.
    Psf(PsfArgs),
    /// Render scene radiance to sensor irradiance.
    Optics(OpticsArgs),
    /// Expose a sensor preset to an irradiance SRI; writes raw DN PNGs.
    Sensor(SensorArgs),
    /// Three-capture HDR combination of raw PNGs from `sensor`.
    Combine(CombineArgs),
    /// Demosaic a raw PNG to display sRGB.
    Demosaic(DemosaicArgs),
    /// Photometric statistics of an SRI file, optionally against a reference.
    Metrics(MetricsArgs),
    /// Luminance (or illuminance) along one row, as CSV.
    Profile(ProfileArgs),
    /// Run a full config-driven pipeline.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 400.0)]
    start_nm: f64,
    #[arg(long, default_value_t = 10.0)]
    step_nm: f64,
    #[arg(long, default_value_t = 31)]
    bands: usize,
}

impl GridArgs {
    fn grid(&self) -> Result<WavelengthGrid> {
        Ok(WavelengthGrid::new(self.start_nm, self.step_nm, self.bands)?)
    }
}

#[derive(Args)]
struct GenScene {
    #[command(subcommand)]
    kind: SceneKind,
}

#[derive(Subcommand)]
enum SceneKind {
    /// Row of emitters stepping down by a constant factor.
    PointGrid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 4)]
        n_sources: usize,
        #[arg(long)]
        top_level: f64,
        #[arg(long, default_value_t = 10.0)]
        decade_step: f64,
        #[arg(long)]
        background_level: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Horizontal log-linear luminance ramp.
    Ramp {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        decades: f64,
        #[arg(long)]
        min_level: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(short, long)]
        out: PathBuf,
        /// Also write the analytic column luminance.
        #[arg(long)]
        truth_csv: Option<PathBuf>,
    },
    /// Tunnel light group; writes <out>_<member>.sri per group member.
    Tunnel {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        interior_level: f64,
        #[arg(long)]
        exit_level: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Reflectance chart under D65.
    Macbeth {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        white_luminance: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Compose {
    #[arg(long)]
    sky: Option<PathBuf>,
    #[arg(long)]
    headlights: Option<PathBuf>,
    #[arg(long)]
    streetlights: Option<PathBuf>,
    #[arg(long)]
    otherlights: Option<PathBuf>,
    /// sky,headlights,streetlights,otherlights
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Search the sky weight for this dynamic range (decades).
    #[arg(long, requires = "target_mean")]
    target_dr: Option<f64>,
    /// Mean luminance of the result, cd/m².
    #[arg(long, requires = "target_dr")]
    target_mean: Option<f64>,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct ApertureArgs {
    #[arg(long, default_value_t = 4.0)]
    f_number: f64,
    /// mm
    #[arg(long, default_value_t = 4.4)]
    focal_length: f64,
    #[arg(long, default_value_t = 0)]
    blades: u32,
    #[arg(long, default_value_t = 0)]
    dust: usize,
    #[arg(long, default_value_t = 0)]
    scratches: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 128)]
    pupil_samples: usize,
    #[arg(long, default_value_t = 4)]
    padding: usize,
}

impl ApertureArgs {
    fn spec(&self) -> ApertureSpec {
        ApertureSpec {
            n_blades: self.blades,
            pupil_diameter: self.focal_length / self.f_number,
            dust_count: self.dust,
            scratch_count: self.scratches,
            seed: self.seed,
            ..ApertureSpec::default()
        }
    }

    fn wavefront(&self) -> WavefrontSpec {
        WavefrontSpec::diffraction_limited(self.f_number, self.focal_length)
    }
}

#[derive(Args)]
struct PsfArgs {
    #[command(flatten)]
    aperture: ApertureArgs,
    #[arg(long, default_value_t = 550.0)]
    wavelength: f64,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PsfModeArg {
    Delta,
    Diffraction,
}

#[derive(Args)]
struct OpticsArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[command(flatten)]
    aperture: ApertureArgs,
    #[arg(long, value_enum, default_value = "diffraction")]
    psf: PsfModeArg,
    /// Sensor-plane sample pitch, µm.
    #[arg(long, default_value_t = 3.0)]
    pitch: f64,
    #[arg(long, default_value_t = 63)]
    max_kernel: usize,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct SensorArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Built-in preset name or preset TOML path.
    #[arg(long)]
    preset: String,
    #[arg(long)]
    no_noise: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// seconds
    #[arg(long)]
    exposure: Option<f64>,
    /// Output directory.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct CombineArgs {
    /// Directory written by `sensor`.
    #[arg(long)]
    dir: PathBuf,
    #[arg(long)]
    preset: String,
    /// Row for the profile; default middle.
    #[arg(long)]
    row: Option<usize>,
    /// Profile CSV: combined and LPLG-only electrons per column.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemosaicArg {
    Bilinear,
    Rgbw,
}

#[derive(Args)]
struct DemosaicArgs {
    /// 16-bit raw PNG from `sensor`.
    #[arg(long)]
    raw: PathBuf,
    #[arg(long)]
    preset: String,
    /// For split-pixel presets: which capture the raw file holds.
    #[arg(long, default_value = "lplg")]
    capture: String,
    #[arg(long, value_enum, default_value = "bilinear")]
    method: DemosaicArg,
    /// Display white, as a multiple of the brightest pixel's Y.
    #[arg(long, default_value_t = 1.0)]
    white: f64,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    /// Image under test.
    #[arg(short = 'a', long)]
    image: PathBuf,
    /// Reference of the same kind and size.
    #[arg(short = 'b', long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    row: Option<usize>,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    config: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::FAILURE
        }
    }
}

/// The error chain, skipping causes already spelled out by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let s = cause.to_string();
        if !msg.contains(&s) {
            if !msg.is_empty() {
                msg.push_str(": ");
            }
            msg.push_str(&s);
        }
    }
    msg
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::GenScene(a) => gen_scene(a),
        Cmd::Compose(a) => compose(a),
        Cmd::Psf(a) => psf(a),
        Cmd::Optics(a) => optics(a),
        Cmd::Sensor(a) => sensor(a),
        Cmd::Combine(a) => combine(a),
        Cmd::Demosaic(a) => demosaic(a),
        Cmd::Metrics(a) => metrics(a),
        Cmd::Profile(a) => profile(a),
        Cmd::Pipeline(a) => pipeline(a),
    }
}

fn save(path: &Path, img: &SpectralImage) -> Result<()> {
    write_sri(path, img)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load(path: &Path) -> Result<SpectralImage> {
    read_sri(path).with_context(|| format!("reading {}", path.display()))
}

fn gen_scene(a: GenScene) -> Result<()> {
    match a.kind {
        SceneKind::PointGrid { rows, cols, n_sources, top_level, decade_step, background_level, grid, out } => {
            let img = scenes::gen_point_grid_scene(rows, cols, &grid.grid()?, n_sources, top_level, decade_step, background_level)?;
            save(&out, &img)
        }
        SceneKind::Ramp { rows, cols, decades, min_level, grid, out, truth_csv } => {
            let ramp = scenes::gen_ramp_scene(rows, cols, &grid.grid()?, decades, min_level)?;
            if let Some(p) = truth_csv {
                let t = Table::new()
                    .with_column("column", (0..cols).map(|c| c as f64).collect())
                    .with_column("luminance", ramp.column_luminance.clone());
                export_csv(&p, &t)?;
            }
            save(&out, &ramp.image)
        }
        SceneKind::Tunnel { rows, cols, interior_level, exit_level, grid, out } => {
            let group = scenes::gen_tunnel_scene(rows, cols, &grid.grid()?, interior_level, exit_level)?;
            let stem = out.to_string_lossy().trim_end_matches(".sri").to_string();
            for (name, m) in ["sky", "headlights", "streetlights", "otherlights"].iter().zip(group.members()) {
                save(Path::new(&format!("{stem}_{name}.sri")), m)?;
            }
            Ok(())
        }
        SceneKind::Macbeth { rows, cols, white_luminance, grid, out } => {
            save(&out, &scenes::gen_macbeth_scene(rows, cols, &grid.grid()?, white_luminance)?)
        }
    }
}

fn compose(a: Compose) -> Result<()> {
    let paths = [&a.sky, &a.headlights, &a.streetlights, &a.otherlights];
    let loaded: Vec<Option<SpectralImage>> = paths.iter().map(|p| p.as_deref().map(load).transpose()).collect::<Result<_>>()?;
    let Some(first) = loaded.iter().flatten().next() else {
        bail!("give at least one of --sky, --headlights, --streetlights, --otherlights");
    };
    let dark = SpectralImage::zeros(first.rows(), first.cols(), *first.grid(), SpectralKind::Radiance);
    let members: Vec<SpectralImage> = loaded.into_iter().map(|m| m.unwrap_or_else(|| dark.clone())).collect();
    let group = LightGroup::new(members.try_into().expect("four members"))?;
    let start = match &a.weights {
        Some(w) if w.len() == 4 => GroupWeights::new(w[0], w[1], w[2], w[3])?,
        Some(w) => bail!("--weights takes 4 comma-separated values, got {}", w.len()),
        None => GroupWeights::uniform(1.0)?,
    };
    let weights = match (a.target_dr, a.target_mean) {
        (Some(dr), Some(mean)) => {
            let sol = set_weights_for_target(&group, &start, &WeightMask::default(), dr, mean)?;
            println!(
                "{}",
                json!({"weights": sol.weights, "achieved_dr": sol.achieved_dr,
                       "achieved_mean_luminance": sol.achieved_mean_luminance, "reachable": sol.reachable})
            );
            sol.weights
        }
        _ => start,
    };
    save(&a.out, &compose_light_groups(&group, &weights)?)
}

fn psf(a: PsfArgs) -> Result<()> {
    let spec = a.aperture.spec();
    let mask = synthesize_apodization(&spec, a.aperture.pupil_samples)?;
    let pupil = build_pupil(&mask, &a.aperture.wavefront(), a.wavelength)?;
    let k = psf_from_pupil(&pupil, padded_size(a.aperture.pupil_samples, a.aperture.padding))?;
    let n = k.size();
    let mut table = Table::new();
    for c in 0..n {
        table = table.with_column(&format!("c{c}"), k.values.column(c).to_vec());
    }
    export_csv(&a.out, &table)?;
    let airy_um = 1.22 * a.wavelength * 1e-3 * a.aperture.f_number;
    println!(
        "{}",
        json!({
            "size": n, "sample_pitch_um": k.sample_pitch, "sum": k.values.sum(), "peak": k.peak(),
            "open_fraction": mask.open_fraction(), "energy_outside_airy_core": k.energy_outside(airy_um),
        })
    );
    Ok(())
}

fn optics(a: OpticsArgs) -> Result<()> {
    let radiance = load(&a.input)?;
    let grid = *radiance.grid();
    let psfs = match a.psf {
        PsfModeArg::Delta => PsfStack::delta(grid, a.pitch),
        PsfModeArg::Diffraction => {
            let mask = synthesize_apodization(&a.aperture.spec(), a.aperture.pupil_samples)?;
            let sampling = PsfSampling {
                n_fft: padded_size(a.aperture.pupil_samples, a.aperture.padding),
                target_pitch: a.pitch,
                max_kernel: a.max_kernel.min(kernel_cap(radiance.rows(), radiance.cols())),
            };
            build_psf_stack(&mask, &a.aperture.wavefront(), &grid, sampling)?
        }
    };
    let spec = OpticsSpec::new(a.aperture.f_number, a.aperture.focal_length);
    save(&a.out, &apply_optics(&radiance, &psfs, &spec)?)
}

fn sensor_for(preset_name: &str, rows: usize, cols: usize) -> Result<SensorPreset> {
    let mut p = load_preset(preset_name)?;
    p.sensor = p.sensor.with_size(rows, cols);
    p.sensor.validate()?;
    Ok(p)
}

fn sensor(a: SensorArgs) -> Result<()> {
    let irr = load(&a.input)?;
    let mut p = sensor_for(&a.preset, irr.rows(), irr.cols())?;
    p.sensor.seed = a.seed;
    if let Some(t) = a.exposure {
        p.sensor.exposure = t;
    }
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let noise = !a.no_noise;
    let captures: Vec<(&str, Capture)> = match &p.split {
        Some(split) => {
            let s = expose_split(&irr, &p.sensor, split, noise)?;
            vec![("lphg", s.lphg), ("lplg", s.lplg), ("splg", s.splg)]
        }
        None => vec![("single", expose(&irr, &p.sensor, noise)?)],
    };
    let mut summary = serde_json::Map::new();
    for (name, c) in &captures {
        let path = a.out.join(format!("raw_{name}.png"));
        export_gray16_png(&path, &c.dn)?;
        let sat = c.saturated.iter().filter(|&&s| s).count() as f64 / c.dn.len() as f64;
        summary.insert(name.to_string(), json!({"file": path, "volts_per_electron": c.volts_per_electron, "saturated_fraction": sat}));
    }
    println!("{}", serde_json::Value::Object(summary));
    Ok(())
}

fn combine(a: CombineArgs) -> Result<()> {
    let lplg = read_gray16_png(a.dir.join("raw_lplg.png"))?;
    let (rows, cols) = lplg.dim();
    let p = sensor_for(&a.preset, rows, cols)?;
    let Some(split) = p.split else { bail!("preset `{}` has no split pixel", a.preset) };
    let base = p.sensor.pixel.conversion_gain * p.sensor.analog_gain;
    let set = CaptureSet {
        lphg: Capture::from_dn(read_gray16_png(a.dir.join("raw_lphg.png"))?, base * split.gain_high, &p.sensor)?,
        lplg: Capture::from_dn(lplg, base * split.gain_low, &p.sensor)?,
        splg: Capture::from_dn(read_gray16_png(a.dir.join("raw_splg.png"))?, base * split.gain_low, &p.sensor)?,
        sensor: p.sensor.clone(),
        split,
    };
    let hdr = combine3(&set)?;
    let lg = input_refer_capture(&set.lplg, p.sensor.pixel.lsb(), 1.0)?;
    let row = a.row.unwrap_or(rows / 2);
    let table = Table::new()
        .with_column("column", (0..cols).map(|c| c as f64).collect())
        .with_column("combined", line_profile(hdr.values.view(), row)?)
        .with_column("combined_valid", line_profile(hdr.valid.mapv(|v| f64::from(u8::from(v))).view(), row)?)
        .with_column("lplg", line_profile(lg.values.view(), row)?)
        .with_column("lplg_saturated", line_profile(set.lplg.saturated.mapv(|v| f64::from(u8::from(v))).view(), row)?);
    export_csv(&a.out, &table)?;
    let valid = hdr.valid_values();
    println!(
        "{}",
        json!({
            "valid_fraction": valid.len() as f64 / hdr.values.len() as f64,
            "min_electrons": valid.iter().copied().reduce(f64::min),
            "max_electrons": valid.iter().copied().reduce(f64::max),
        })
    );
    Ok(())
}

fn demosaic(a: DemosaicArgs) -> Result<()> {
    let dn = read_gray16_png(&a.raw)?;
    let (rows, cols) = dn.dim();
    let p = sensor_for(&a.preset, rows, cols)?;
    let base = p.sensor.pixel.conversion_gain * p.sensor.analog_gain;
    let (vpe, area) = match (&p.split, a.capture.as_str()) {
        (None, _) => (base, 1.0),
        (Some(s), "lphg") => (base * s.gain_high, s.area_split),
        (Some(s), "lplg") => (base * s.gain_low, s.area_split),
        (Some(s), "splg") => (base * s.gain_low, s.area_split * s.sensitivity_ratio),
        (Some(_), other) => bail!("unknown capture `{other}`; use lphg, lplg or splg"),
    };
    let cap = Capture::from_dn(dn, vpe, &p.sensor)?;
    let cam = CameraColor::fit(&p.sensor.cfa, &WavelengthGrid::default())?;
    let area_time = p.sensor.pixel.area_m2() * p.sensor.exposure * area;
    let bal = cam.balance_mosaic(cap.electrons.view(), &p.sensor.cfa, area_time)?;
    let rgb = match a.method {
        DemosaicArg::Bilinear => demosaic_bilinear(bal.view(), &p.sensor.cfa)?,
        DemosaicArg::Rgbw => demosaic_rgbw(bal.view(), &p.sensor.cfa)?,
    };
    let xyz = cam.to_xyz(&rgb)?;
    let peak = xyz.y().iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        bail!("raw image is black");
    }
    export_png(&a.out, &xyz_to_srgb_display(&xyz, 1.0 / (a.white * peak))?)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

/// Luminance for radiance, illuminance for irradiance.
fn photometric(img: &SpectralImage) -> Result<ndarray::Array2<f64>> {
    Ok(match img.kind() {
        SpectralKind::Radiance => luminance_map(img)?,
        SpectralKind::Irradiance => spectral_to_xyz(img)?.y().to_owned(),
    })
}

fn metrics(a: MetricsArgs) -> Result<()> {
    let img = load(&a.image)?;
    let map = photometric(&img)?;
    let mut out = json!({
        "kind": img.kind().as_str(),
        "mean": mean_luminance(map.view()),
        "max": map.iter().copied().fold(0.0, f64::max),
        "dynamic_range": dynamic_range(map.view(), DEFAULT_CLIP_PERCENTILES)?,
        "dynamic_range_full": dynamic_range(map.view(), (0.0, 100.0))?,
    });
    if let Some(r) = &a.reference {
        let reference = load(r)?;
        let (xa, xb) = (spectral_to_xyz(&img)?, spectral_to_xyz(&reference)?);
        // White: the reference pixel with the largest Y.
        let mut white = [0.0; 3];
        for row in 0..xb.rows() {
            for col in 0..xb.cols() {
                let p = xb.pixel(row, col);
                if p[1] > white[1] {
                    white = p;
                }
            }
        }
        if !(white[1] > 0.0) {
            bail!("reference image is black");
        }
        out["ssim"] = json!(ssim(xa.y(), xb.y(), white[1])?);
        out["delta_e_mean"] = json!(delta_e(&xa, &xb, white)?.mean);
    }
    println!("{out}");
    Ok(())
}

fn profile(a: ProfileArgs) -> Result<()> {
    let img = load(&a.input)?;
    let map = photometric(&img)?;
    let row = a.row.unwrap_or(img.rows() / 2);
    let t = Table::new()
        .with_column("column", (0..img.cols()).map(|c| c as f64).collect())
        .with_column(if img.kind() == SpectralKind::Radiance { "luminance" } else { "illuminance" }, line_profile(map.view(), row)?);
    export_csv(&a.out, &t)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn pipeline(a: PipelineArgs) -> Result<()> {
    let cfg = SceneConfig::load(&a.config)?;
    let outcome = run_pipeline(&cfg).with_context(|| format!("config {}", a.config.display()))?;
    if let Some(p) = &outcome.report_path {
        println!("report {}", p.display());
    }
    println!("report sha256 {}", outcome.hash);
    Ok(())
}
