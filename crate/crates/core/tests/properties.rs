use hdrsim_core::hdr::{combine3, input_refer_capture};
use hdrsim_core::io::{decode_sri, encode_sri};
use hdrsim_core::isp::{delta_e, demosaic_bilinear, demosaic_rgbw, ssim, XyzImage};
use hdrsim_core::optics::{
    apply_optics, build_psf_stack, build_pupil, psf_from_pupil, synthesize_apodization, ApertureSpec, OpticsSpec,
    PsfSampling, WavefrontSpec,
};
use hdrsim_core::scenes::gen_tunnel_scene;
use hdrsim_core::sensor::{expose, expose_split, mean_signal_electrons, preset, Channel, PixelSpec, SensorSpec};
use hdrsim_core::spectral::{
    compose_light_groups, dynamic_range, luminance_map, set_weights_for_target, GroupWeights, LightGroup,
    SpectralImage, SpectralKind, WavelengthGrid, WeightMask, DEFAULT_CLIP_PERCENTILES,
};
use ndarray::{Array2, Array3};
use proptest::prelude::*;

fn small_grid() -> WavelengthGrid {
    WavelengthGrid::new(450.0, 100.0, 3).unwrap()
}

fn image(rows: usize, cols: usize, values: &[f64], kind: SpectralKind) -> SpectralImage {
    let grid = small_grid();
    let data = Array3::from_shape_fn((grid.count, rows, cols), |(b, r, c)| values[(b * rows + r) * cols + c]);
    SpectralImage::new(grid, kind, data).unwrap()
}

/// Four radiance members of a `rows`×`cols` group on the small grid.
fn group_strategy(rows: usize, cols: usize) -> impl Strategy<Value = LightGroup> {
    let n = 3 * rows * cols;
    prop::collection::vec(prop::collection::vec(0.0..100.0f64, n), 4).prop_map(move |v| {
        LightGroup::new(std::array::from_fn(|m| image(rows, cols, &v[m], SpectralKind::Radiance))).unwrap()
    })
}

fn weights() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.0..10.0f64)
}

fn close(a: &Array3<f64>, b: &Array3<f64>, rel: f64) -> bool {
    let scale = a.iter().chain(b.iter()).map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= rel * scale)
}

fn point_asymmetry(k: &Array2<f64>) -> f64 {
    let n = k.nrows();
    let peak = k.iter().copied().fold(0.0, f64::max);
    k.indexed_iter()
        .map(|((i, j), v)| (v - k[[n - 1 - i, n - 1 - j]]).abs())
        .fold(0.0, f64::max)
        / peak
}

fn aperture_strategy() -> impl Strategy<Value = ApertureSpec> {
    (
        prop_oneof![Just(0u32), 3u32..10],
        0.0..1.0f64,
        0usize..60,
        0usize..10,
        0.1..=1.0f64,
        any::<u64>(),
    )
        .prop_map(|(n_blades, blade_rotation, dust_count, scratch_count, occlusion_opacity, seed)| ApertureSpec {
            n_blades,
            blade_rotation,
            dust_count,
            scratch_count,
            occlusion_opacity,
            seed,
            ..Default::default()
        })
}

fn flat(rows: usize, cols: usize, level: f64) -> SpectralImage {
    let grid = WavelengthGrid::default();
    SpectralImage::new(grid, SpectralKind::Irradiance, Array3::from_elem((grid.count, rows, cols), level)).unwrap()
}

fn xyz_image(values: &[f64]) -> XyzImage {
    XyzImage::new(Array3::from_shape_vec((3, 2, 2), values.to_vec()).unwrap()).unwrap()
}

fn sri_image() -> impl Strategy<Value = SpectralImage> {
    (1usize..6, 1usize..6, 1usize..8, 350.0..600.0f64, prop_oneof![Just(1.0), Just(5.0), Just(10.0)], any::<bool>())
        .prop_flat_map(|(rows, cols, count, start, step, radiance)| {
            prop::collection::vec(0.0..1e6f32, rows * cols * count).prop_map(move |v| {
                let grid = WavelengthGrid::new(start, step, count).unwrap();
                let kind = if radiance { SpectralKind::Radiance } else { SpectralKind::Irradiance };
                let data = Array3::from_shape_fn((count, rows, cols), |(b, r, c)| f64::from(v[(b * rows + r) * cols + c]));
                SpectralImage::new(grid, kind, data).unwrap()
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compose_is_superposition(group in group_strategy(3, 4), w1 in weights(), w2 in weights(), alpha in 0.0..5.0f64, beta in 0.0..5.0f64) {
        let mixed: [f64; 4] = std::array::from_fn(|i| alpha * w1[i] + beta * w2[i]);
        let lhs = compose_light_groups(&group, &GroupWeights::from_array(mixed).unwrap()).unwrap();
        let a = compose_light_groups(&group, &GroupWeights::from_array(w1).unwrap()).unwrap();
        let b = compose_light_groups(&group, &GroupWeights::from_array(w2).unwrap()).unwrap();
        let rhs = a.data() * alpha + b.data() * beta;
        prop_assert!(close(lhs.data(), &rhs, 1e-12));
        prop_assert!(lhs.data().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn luminance_is_linear_and_monotone(v in prop::collection::vec(0.0..100.0f64, 36), dv in prop::collection::vec(0.0..10.0f64, 36), k in 0.01..100.0f64) {
        let img = image(3, 4, &v, SpectralKind::Radiance);
        let brighter: Vec<f64> = v.iter().zip(&dv).map(|(a, b)| a + b).collect();
        let lum = luminance_map(&img).unwrap();
        let scaled = luminance_map(&img.scaled(k).unwrap()).unwrap();
        let up = luminance_map(&image(3, 4, &brighter, SpectralKind::Radiance)).unwrap();
        let scale = lum.iter().copied().fold(0.0, f64::max).max(1e-300) * k;
        prop_assert!(lum.iter().zip(scaled.iter()).all(|(a, b)| (a * k - b).abs() <= 1e-12 * scale));
        prop_assert!(lum.iter().zip(up.iter()).all(|(a, b)| b >= a));
    }

    #[test]
    fn dynamic_range_is_scale_invariant(v in prop::collection::vec(1e-3..1e4f64, 64), k in 1e-3..1e3f64) {
        let lum = Array2::from_shape_vec((8, 8), v).unwrap();
        let a = dynamic_range(lum.view(), DEFAULT_CLIP_PERCENTILES).unwrap();
        let b = dynamic_range(lum.mapv(|x| x * k).view(), DEFAULT_CLIP_PERCENTILES).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn optics_is_linear(a in prop::collection::vec(0.0..100.0f64, 3 * 144), b in prop::collection::vec(0.0..100.0f64, 3 * 144), alpha in 0.0..5.0f64, beta in 0.0..5.0f64, seed in any::<u64>()) {
        let spec = ApertureSpec { n_blades: 6, dust_count: 20, seed, ..Default::default() };
        let mask = synthesize_apodization(&spec, 64).unwrap();
        let wf = WavefrontSpec::diffraction_limited(4.0, 4.4);
        let psfs = build_psf_stack(&mask, &wf, &small_grid(), PsfSampling { n_fft: 128, target_pitch: 2.0, max_kernel: 9 }).unwrap();
        let optics = OpticsSpec::new(4.0, 4.4);
        let (ia, ib) = (image(12, 12, &a, SpectralKind::Radiance), image(12, 12, &b, SpectralKind::Radiance));
        let mix = SpectralImage::new(small_grid(), SpectralKind::Radiance, ia.data() * alpha + ib.data() * beta).unwrap();
        let lhs = apply_optics(&mix, &psfs, &optics).unwrap();
        let rhs = apply_optics(&ia, &psfs, &optics).unwrap().data() * alpha + apply_optics(&ib, &psfs, &optics).unwrap().data() * beta;
        prop_assert!(close(lhs.data(), &rhs, 1e-9));
    }

    #[test]
    fn ssim_is_symmetric_and_one_only_on_equal(a in prop::collection::vec(0.0..1.0f64, 256), at in 0usize..256, delta in 1e-3..0.5f64) {
        let a = Array2::from_shape_vec((16, 16), a).unwrap();
        let mut b = a.clone();
        b[[at / 16, at % 16]] += delta;
        prop_assert_eq!(ssim(a.view(), b.view(), 1.0).unwrap(), ssim(b.view(), a.view(), 1.0).unwrap());
        prop_assert!((ssim(a.view(), a.view(), 1.0).unwrap() - 1.0).abs() <= 1e-12);
        prop_assert!(ssim(a.view(), b.view(), 1.0).unwrap() < 1.0 - 1e-12);
    }

    #[test]
    fn delta_e_is_relative(a in prop::collection::vec(0.0..2.0f64, 12), b in prop::collection::vec(0.0..2.0f64, 12), white in prop::array::uniform3(0.5..1.5f64), k in 1e-2..1e2f64) {
        let base = delta_e(&xyz_image(&a), &xyz_image(&b), white).unwrap().mean;
        let sa: Vec<f64> = a.iter().map(|v| v * k).collect();
        let sb: Vec<f64> = b.iter().map(|v| v * k).collect();
        let scaled = delta_e(&xyz_image(&sa), &xyz_image(&sb), white.map(|w| w * k)).unwrap().mean;
        prop_assert!((base - scaled).abs() <= 1e-9 * base.max(1.0));
    }

    #[test]
    fn demosaic_exact_on_constants_and_linear(m1 in prop::collection::vec(0.0..100.0f64, 48), m2 in prop::collection::vec(0.0..100.0f64, 48), v in 0.01..100.0f64, alpha in 0.0..5.0f64, beta in 0.0..5.0f64) {
        let bayer = preset("rgb-bayer-like").unwrap().sensor.cfa;
        let rgbw = preset("rgbw-onsemi-like").unwrap().sensor.cfa;
        let constant = Array2::from_elem((6, 8), v);
        for out in [demosaic_bilinear(constant.view(), &bayer).unwrap(), demosaic_rgbw(constant.view(), &rgbw).unwrap()] {
            prop_assert!(out.planes.iter().all(|x| (x - v).abs() <= 1e-12 * v));
        }
        let (a, b) = (Array2::from_shape_vec((6, 8), m1).unwrap(), Array2::from_shape_vec((6, 8), m2).unwrap());
        let mix = &a * alpha + &b * beta;
        let lhs = demosaic_bilinear(mix.view(), &bayer).unwrap().planes;
        let rhs = demosaic_bilinear(a.view(), &bayer).unwrap().planes * alpha + demosaic_bilinear(b.view(), &bayer).unwrap().planes * beta;
        prop_assert!(close(&lhs, &rhs, 1e-12));
        // The W/luma guide makes the RGBW path homogeneous but not additive.
        let scaled = demosaic_rgbw((&a * alpha).view(), &rgbw).unwrap().planes;
        let base = demosaic_rgbw(a.view(), &rgbw).unwrap().planes * alpha;
        prop_assert!(close(&scaled, &base, 1e-12));
    }

    #[test]
    fn sri_round_trip_is_lossless(img in sri_image()) {
        let bytes = encode_sri(&img).unwrap();
        let back = decode_sri(&bytes).unwrap();
        prop_assert_eq!(back.grid(), img.grid());
        prop_assert_eq!(back.kind(), img.kind());
        prop_assert!(back.data().iter().zip(img.data().iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
        prop_assert_eq!(encode_sri(&back).unwrap(), bytes);
    }

    #[test]
    fn sri_header_corruption_is_rejected(img in sri_image(), pos in any::<prop::sample::Index>(), byte in any::<u8>()) {
        let bytes = encode_sri(&img).unwrap();
        let header_len = bytes.windows(5).position(|w| w == b"\nend\n").unwrap() + 5;
        let at = pos.index(header_len);
        prop_assume!(bytes[at] != byte);
        let mut bad = bytes.clone();
        bad[at] = byte;
        let err = decode_sri(&bad).unwrap_err();
        prop_assert!(!err.to_string().is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn psfs_normalized_and_point_symmetric(spec in aperture_strategy(), lambda in 400.0..700.0f64) {
        let a = synthesize_apodization(&spec, 64).unwrap();
        prop_assert_eq!(&a, &synthesize_apodization(&spec, 64).unwrap());
        prop_assume!(a.open_fraction() > 0.0);
        let pupil = build_pupil(&a, &WavefrontSpec::diffraction_limited(4.0, 4.4), lambda).unwrap();
        let k = psf_from_pupil(&pupil, 128).unwrap();
        prop_assert!((k.values.sum() - 1.0).abs() <= 1e-6);
        prop_assert!(k.values.iter().all(|v| *v >= 0.0));
        prop_assert!(point_asymmetry(&k.values) <= 1e-12);
    }

    #[test]
    fn weight_search_is_idempotent(target_dr in 1.0..4.0f64, mean in 1.0..1000.0f64) {
        let group = gen_tunnel_scene(16, 16, &small_grid(), 1.0, 1e4).unwrap();
        let fixed = WeightMask::default();
        let first = set_weights_for_target(&group, &GroupWeights::uniform(1.0).unwrap(), &fixed, target_dr, mean).unwrap();
        let again = set_weights_for_target(&group, &first.weights, &fixed, target_dr, mean).unwrap();
        for (a, b) in first.weights.as_array().iter().zip(again.weights.as_array()) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-12), "{:?} vs {:?}", first.weights, again.weights);
        }
    }

    #[test]
    fn noise_off_response_is_monotone_and_linear_in_exposure(lo in 1e-3..1e2f64, factor in 1.0..50.0f64) {
        let s = preset("rgb-bayer-like").unwrap().sensor.with_size(4, 4);
        let a = expose(&flat(4, 4, lo), &s, false).unwrap();
        let b = expose(&flat(4, 4, lo * factor), &s, false).unwrap();
        prop_assert!(a.electrons.iter().zip(b.electrons.iter()).all(|(x, y)| y >= x));
        prop_assert!(a.volts.iter().zip(b.volts.iter()).all(|(x, y)| y >= x));
        let long = SensorSpec { exposure: s.exposure * factor, ..s.clone() };
        let e1 = mean_signal_electrons(&flat(4, 4, lo), &s).unwrap();
        let e2 = mean_signal_electrons(&flat(4, 4, lo), &long).unwrap();
        prop_assert!(e1.iter().zip(e2.iter()).all(|(x, y)| (x * factor - y).abs() <= 1e-12 * y));
    }

    #[test]
    fn white_channel_dominates(spectrum in prop::collection::vec(0.0..10.0f64, 31)) {
        let cfa = preset("rgbw-onsemi-like").unwrap().sensor.cfa;
        let grid = WavelengthGrid::default();
        let response = |ch: Channel| cfa.qe_on_grid(ch, &grid).iter().zip(&spectrum).map(|(q, s)| q * s).sum::<f64>();
        let w = response(Channel::W);
        for ch in [Channel::R, Channel::G, Channel::B] {
            prop_assert!(w >= response(ch));
        }
    }

    #[test]
    fn split_reads_agree_when_unsaturated(level in 1e-4..1e1f64) {
        let p = preset("splitpixel-3capture").unwrap();
        let split = p.split.unwrap();
        let sensor = SensorSpec { pixel: PixelSpec { dark_current: 0.0, ..p.sensor.pixel.clone() }, ..p.sensor.with_size(2, 2) };
        let caps = expose_split(&flat(2, 2, level), &sensor, &split, false).unwrap();
        let lsb = sensor.pixel.lsb();
        let lg = input_refer_capture(&caps.lplg, lsb, 1.0).unwrap();
        let sp = input_refer_capture(&caps.splg, lsb, split.sensitivity_ratio).unwrap();
        let tol = 0.5 * (lg.quantization_step.unwrap() + sp.quantization_step.unwrap()) + 1e-9;
        for idx in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            if lg.valid[idx] && sp.valid[idx] {
                prop_assert!((lg.values[idx] - sp.values[idx]).abs() <= tol);
            }
        }
    }

    #[test]
    fn noise_is_reproducible_per_seed(seed in any::<u64>(), level in 1e-2..1e1f64) {
        let p = preset("splitpixel-3capture").unwrap();
        let sensor = SensorSpec { seed, ..p.sensor.with_size(4, 4) };
        let split = p.split.unwrap();
        let a = expose_split(&flat(4, 4, level), &sensor, &split, true).unwrap();
        let b = expose_split(&flat(4, 4, level), &sensor, &split, true).unwrap();
        prop_assert_eq!(&a.lphg.dn, &b.lphg.dn);
        prop_assert_eq!(&a.splg.dn, &b.splg.dn);
        prop_assert_eq!(combine3(&a).unwrap(), combine3(&b).unwrap());
    }
}

#[test]
fn combine3_is_monotone_over_a_fine_noise_free_sweep() {
    let p = preset("splitpixel-3capture").unwrap();
    let split = p.split.unwrap();
    let sensor = p.sensor.with_size(2, 2);
    let unit = mean_signal_electrons(&flat(2, 2, 1.0), &sensor).unwrap()[[0, 0]] * split.area_split;
    let mut prev = Array2::<f64>::zeros((2, 2));
    let steps = 4000;
    for i in 0..=steps {
        let electrons = 10.0 * 10f64.powf(6.0 * i as f64 / steps as f64);
        let caps = expose_split(&flat(2, 2, electrons / unit), &sensor, &split, false).unwrap();
        let x = combine3(&caps).unwrap().values;
        for (idx, v) in x.indexed_iter() {
            assert!(*v >= prev[idx], "step {i} pixel {idx:?}: {v} < {}", prev[idx]);
        }
        prev = x;
    }
}

#[test]
fn combined_range_extends_low_gain_range() {
    let p = preset("splitpixel-3capture").unwrap();
    let split = p.split.unwrap();
    let std = |x: &Array2<f64>| {
        let m = x.mean().unwrap();
        (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
    };
    // Noise floors from a noisy dark frame.
    let dark = p.sensor.clone().with_size(64, 64);
    let caps = expose_split(&flat(64, 64, 0.0), &dark, &split, true).unwrap();
    let lsb = dark.pixel.lsb();
    let floor_lplg = std(&input_refer_capture(&caps.lplg, lsb, 1.0).unwrap().values);
    let floor_comb = std(&combine3(&caps).unwrap().values);

    // Largest valid values over a noise-free sweep.
    let sensor = p.sensor.with_size(2, 2);
    let unit = mean_signal_electrons(&flat(2, 2, 1.0), &sensor).unwrap()[[0, 0]] * split.area_split;
    let (mut max_lplg, mut max_comb) = (0.0f64, 0.0f64);
    for i in 0..=600 {
        let electrons = 10.0 * 10f64.powf(6.0 * i as f64 / 600.0);
        let caps = expose_split(&flat(2, 2, electrons / unit), &sensor, &split, false).unwrap();
        let lg = input_refer_capture(&caps.lplg, sensor.pixel.lsb(), 1.0).unwrap();
        let comb = combine3(&caps).unwrap();
        max_lplg = max_lplg.max(lg.valid_values().into_iter().fold(0.0, f64::max));
        max_comb = max_comb.max(comb.valid_values().into_iter().fold(0.0, f64::max));
    }
    let gain = (max_comb / floor_comb) / (max_lplg / floor_lplg);
    assert!(gain >= 0.5 / split.sensitivity_ratio, "range gain {gain}");
}
