//! Zernike polynomials on the unit disk, Noll single-index ordering,
//! normalized to unit RMS over the disk.

/// Radial degree `n` and azimuthal frequency `m` of Noll index `j` (j ≥ 1).
/// Negative `m` denotes the sine term.
pub fn noll_to_nm(j: usize) -> (u32, i32) {
    assert!(j >= 1, "Noll indices start at 1");
    let mut n: usize = 0;
    let mut j1 = j - 1;
    while j1 > n {
        n += 1;
        j1 -= n;
    }
    let m_abs = (n % 2) + 2 * ((j1 + (n + 1) % 2) / 2);
    let sign = if j % 2 == 0 { 1 } else { -1 };
    (n as u32, sign * m_abs as i32)
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Radial polynomial R_n^m(ρ).
pub fn radial(n: u32, m: u32, rho: f64) -> f64 {
    if (n - m) % 2 != 0 {
        return 0.0;
    }
    let half_sum = (n + m) / 2;
    let half_diff = (n - m) / 2;
    (0..=half_diff)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * factorial(n - k)
                / (factorial(k) * factorial(half_sum - k) * factorial(half_diff - k))
                * rho.powi((n - 2 * k) as i32)
        })
        .sum()
}

/// Z_j(ρ, θ) with Noll normalization.
pub fn zernike(j: usize, rho: f64, theta: f64) -> f64 {
    let (n, m) = noll_to_nm(j);
    let ma = m.unsigned_abs();
    let r = radial(n, ma, rho);
    if m == 0 {
        f64::from(n + 1).sqrt() * r
    } else {
        let norm = (2.0 * f64::from(n + 1)).sqrt();
        if m > 0 {
            norm * r * (f64::from(ma) * theta).cos()
        } else {
            norm * r * (f64::from(ma) * theta).sin()
        }
    }
}
