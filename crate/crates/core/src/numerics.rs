//! Small numerical helpers: cancellation-free `sinc`, Simpson quadrature,
//! Gauss–Legendre rules and Bessel functions.

use crate::C64;

/// `sin(w)/w`, with a Taylor series below `|w| < 1e-4`.
pub fn sinc(w: f64) -> f64 {
    if w.abs() < 1e-4 {
        let w2 = w * w;
        // 1 − w²/6 + w⁴/120 − w⁶/5040 + w⁸/362880
        1.0 - w2 / 6.0 * (1.0 - w2 / 20.0 * (1.0 - w2 / 42.0 * (1.0 - w2 / 72.0)))
    } else {
        w.sin() / w
    }
}

/// `J₁(z)/z`, finite at the origin (→ ½).
pub fn bessel_j1_over_z(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        let z2 = z * z;
        // ½ − z²/16 + z⁴/384 − z⁶/18432
        0.5 - z2 / 16.0 + z2 * z2 / 384.0 - z2 * z2 * z2 / 18432.0
    } else {
        bessel_j1(z) / z
    }
}

pub fn bessel_j0(z: f64) -> f64 {
    puruspe::Jn(0, z)
}

pub fn bessel_j1(z: f64) -> f64 {
    puruspe::Jn(1, z)
}

/// Composite Simpson rule for uniformly spaced samples. Requires an odd
/// number of samples (even number of intervals); with an even count the
/// last interval is closed with a 3-point end correction.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (f[0] + f[1]),
        _ => {
            let m = if n % 2 == 1 { n } else { n - 1 };
            let mut acc = f[0] + f[m - 1];
            for (i, v) in f[1..m - 1].iter().enumerate() {
                acc += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
            }
            let mut s = acc * h / 3.0;
            if m < n {
                s += h * (-f[n - 3] + 8.0 * f[n - 2] + 5.0 * f[n - 1]) / 12.0;
            }
            s
        }
    }
}

/// Complex Simpson, same conventions as [`simpson`].
pub fn simpson_c(f: &[C64], h: f64) -> C64 {
    let re: Vec<f64> = f.iter().map(|z| z.re).collect();
    let im: Vec<f64> = f.iter().map(|z| z.im).collect();
    C64::new(simpson(&re, h), simpson(&im, h))
}

/// Cumulative Simpson integral `F_i = ∫_{x₀}^{x_i} f`. Even nodes use the
/// plain Simpson sum; odd nodes add a quadratic-interpolation half panel.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return out;
    }
    let mut i = 2;
    while i < n {
        out[i] = out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
        i += 2;
    }
    let mut i = 1;
    while i < n {
        out[i] = if i + 1 < n {
            out[i - 1] + h * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]) / 12.0
        } else {
            out[i - 1] + h * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]) / 12.0
        };
        i += 2;
    }
    out
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss–Legendre integration of `f` over `[a, b]` split into
/// `panels` equal panels with the given reference rule.
pub fn integrate_gl<F: FnMut(f64) -> C64>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    rule: &(Vec<f64>, Vec<f64>),
) -> C64 {
    if !(b > a) {
        return C64::new(0.0, 0.0);
    }
    let h = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        for (xi, wi) in rule.0.iter().zip(&rule.1) {
            acc += f(mid + 0.5 * h * xi) * (wi * 0.5 * h);
        }
    }
    acc
}

/// Uniform samples `a + i·h`, `i = 0..n`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + i as f64 * h).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sinc_is_smooth_across_switch() {
        for &w in &[0.0, 1e-8, 5e-5, 9.99e-5, 1e-4, 1.01e-4, 0.3, 2.0] {
            let exact = if w == 0.0 { 1.0 } else { (w as f64).sin() / w };
            assert_relative_eq!(sinc(w), exact, max_relative = 1e-15);
        }
    }

    #[test]
    fn bessel_values() {
        // reference values (Abramowitz–Stegun tables)
        assert_relative_eq!(bessel_j0(1.0), 0.765_197_686_557_966_6, max_relative = 1e-13);
        assert_relative_eq!(bessel_j1(1.0), 0.440_050_585_744_933_5, max_relative = 1e-13);
        assert_relative_eq!(bessel_j1_over_z(1e-4), 0.5 - 1e-8 / 16.0, max_relative = 1e-14);
        let z = 2e-3;
        assert_relative_eq!(bessel_j1_over_z(z), bessel_j1(z) / z, max_relative = 1e-12);
    }

    #[test]
    fn simpson_exact_on_cubics() {
        let x = linspace(0.0, 2.0, 11);
        let f: Vec<f64> = x.iter().map(|x| x * x * x - x).collect();
        assert_relative_eq!(simpson(&f, 0.2), 2.0, max_relative = 1e-14);
        // even nodes are exact for cubics, odd nodes for quadratics
        let c = cumulative_simpson(&f, 0.2);
        for (xi, ci) in x.iter().zip(&c).step_by(2) {
            let want = xi.powi(4) / 4.0 - xi * xi / 2.0;
            assert!((ci - want).abs() < 1e-13, "{xi}: {ci} vs {want}");
        }
        let g: Vec<f64> = x.iter().map(|x| 3.0 * x * x - 1.0).collect();
        let c = cumulative_simpson(&g, 0.2);
        for (xi, ci) in x.iter().zip(&c) {
            assert!((ci - (xi.powi(3) - xi)).abs() < 1e-13);
        }
        // even count: end correction keeps quadratics exact
        let x = linspace(0.0, 1.0, 10);
        let f: Vec<f64> = x.iter().map(|x| x * x).collect();
        assert_relative_eq!(simpson(&f, 1.0 / 9.0), 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 8, 16] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert_relative_eq!(s, 2.0, max_relative = 1e-14);
            let deg = 2 * n - 1;
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let k = deg - 1;
            let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-14);
        }
        let rule = gauss_legendre(8);
        let v = integrate_gl(|x| C64::new(x.cos(), 0.0), 0.0, 3.0, 4, &rule);
        assert_relative_eq!(v.re, 3.0_f64.sin(), max_relative = 1e-13);
    }
}
