//! Two-dimensional FFTs and linear convolution on top of `rustfft`.

use ndarray::{s, Array2, ArrayView2};
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// Smallest `m ≥ n` whose only prime factors are 2, 3 and 5.
pub fn next_fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

fn fft_rows(data: &mut Array2<Complex64>, planner: &mut FftPlanner<f64>, dir: FftDirection) {
    let cols = data.ncols();
    let fft = planner.plan_fft(cols, dir);
    let buf = data
        .as_slice_mut()
        .expect("fft buffers are allocated in standard layout");
    // rustfft transforms every consecutive chunk of `cols` samples.
    fft.process(buf);
}

/// Unnormalized 2-D DFT (forward) or its unnormalized inverse.
pub fn fft2(data: &mut Array2<Complex64>, planner: &mut FftPlanner<f64>, dir: FftDirection) {
    if !data.is_standard_layout() {
        *data = data.as_standard_layout().into_owned();
    }
    fft_rows(data, planner, dir);
    let mut t = data.t().as_standard_layout().into_owned();
    fft_rows(&mut t, planner, dir);
    *data = t.t().as_standard_layout().into_owned();
}

/// Forward 2-D DFT of `input` zero-padded to `rows`×`cols`.
pub fn fft2_padded(
    input: ArrayView2<Complex64>,
    rows: usize,
    cols: usize,
    planner: &mut FftPlanner<f64>,
) -> Array2<Complex64> {
    let (r, c) = input.dim();
    let mut buf = Array2::<Complex64>::zeros((rows, cols));
    buf.slice_mut(s![..r, ..c]).assign(&input);
    fft2(&mut buf, planner, FftDirection::Forward);
    buf
}

/// Linear convolution of `image` with an odd-sized, centered `kernel`,
/// cropped back to the image size. Padding avoids wraparound.
pub fn convolve_same(image: ArrayView2<f64>, kernel: ArrayView2<f64>) -> Array2<f64> {
    let (rows, cols) = image.dim();
    let (kr, kc) = kernel.dim();
    debug_assert!(kr % 2 == 1 && kc % 2 == 1, "kernel must have odd size");
    if kr == 1 && kc == 1 {
        let k = kernel[[0, 0]];
        return image.mapv(|v| v * k);
    }
    let pr = next_fast_len(rows + kr - 1);
    let pc = next_fast_len(cols + kc - 1);
    let mut planner = FftPlanner::<f64>::new();
    let img_c = image.mapv(|v| Complex64::new(v, 0.0));
    let ker_c = kernel.mapv(|v| Complex64::new(v, 0.0));
    let mut a = fft2_padded(img_c.view(), pr, pc, &mut planner);
    let b = fft2_padded(ker_c.view(), pr, pc, &mut planner);
    a.zip_mut_with(&b, |x, y| *x *= *y);
    fft2(&mut a, &mut planner, FftDirection::Inverse);
    let norm = 1.0 / (pr * pc) as f64;
    let (hr, hc) = (kr / 2, kc / 2);
    a.slice(s![hr..hr + rows, hc..hc + cols]).mapv(|z| z.re * norm)
}
