//! The m'th roots of unity `ω^k`, `ω = exp(2πi/m)`.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `ω^k` for `ω = exp(2πi/m)`. `k` is reduced mod `m` first so the angle
/// stays in `[0, 2π)`.
pub fn root(m: usize, k: usize) -> Complex64 {
    let k = k % m;
    // Exact values on the axes keep small cases free of 1e-17 noise.
    if 4 * k == m {
        return Complex64::new(0.0, 1.0);
    }
    if 2 * k == m {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * k == 3 * m {
        return Complex64::new(0.0, -1.0);
    }
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)
}

/// All `m` roots, indexed by exponent.
pub fn table(m: usize) -> Vec<Complex64> {
    (0..m).map(|k| root(m, k)).collect()
}

/// Exponent of the root nearest in angle to `c`. Ties go to the smaller
/// exponent; `c = 0` maps to exponent 0.
pub fn nearest_exponent(c: Complex64, m: usize) -> usize {
    if c.re == 0.0 && c.im == 0.0 {
        return 0;
    }
    let step = 2.0 * PI / m as f64;
    let mut angle = c.im.atan2(c.re);
    if angle < 0.0 {
        angle += 2.0 * PI;
    }
    let pos = angle / step;
    let lower = pos.floor();
    let frac = pos - lower;
    let lower = lower as usize % m;
    let upper = (lower + 1) % m;
    if frac < 0.5 {
        lower
    } else if frac > 0.5 {
        upper
    } else {
        lower.min(upper)
    }
}
