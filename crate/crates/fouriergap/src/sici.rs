//! Sine and cosine integrals Si(x), Ci(x).
//!
//! Power series below the crossover, and above it the continued fraction for
//! the exponential integral E1(ix) evaluated by the modified Lentz scheme:
//! E1(ix) = -Ci(x) - i (pi/2 - Si(x)) for x > 0.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

const EULER_GAMMA: f64 = 0.5772156649015328606;
const CROSSOVER: f64 = 8.0;

/// Sine integral Si(x) = int_0^x sin(t)/t dt.
pub fn si(x: f64) -> f64 {
    if x < 0.0 {
        return -si(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x <= CROSSOVER {
        si_series(x)
    } else {
        FRAC_PI_2 + e1_ix(x).im
    }
}

/// Cosine integral Ci(x) = gamma + ln x + int_0^x (cos t - 1)/t dt, x > 0.
pub fn ci(x: f64) -> f64 {
    assert!(x > 0.0, "Ci requires a positive argument");
    if x <= CROSSOVER {
        ci_series(x)
    } else {
        -e1_ix(x).re
    }
}

fn si_series(x: f64) -> f64 {
    // sum (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 1u32;
    loop {
        let n = 2.0 * k as f64;
        term *= -x2 / (n * (n + 1.0));
        let contrib = term / (n + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs().max(1.0) {
            return sum;
        }
        k += 1;
        if k > 60 {
            return sum;
        }
    }
}

fn ci_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 0.0f64;
    let mut k = 1u32;
    loop {
        let n = 2.0 * k as f64;
        term *= -x2 / ((n - 1.0) * n);
        let contrib = term / n;
        sum += contrib;
        if contrib.abs() < 1e-17 * (1.0 + sum.abs()) {
            break;
        }
        k += 1;
        if k > 60 {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}

/// E1(ix) by the continued fraction for the incomplete gamma function,
/// Gamma(0, z) = e^{-z} / (z + 1 - 1^2/(z + 3 - 2^2/(z + 5 - ...))).
fn e1_ix(x: f64) -> Complex64 {
    let z = Complex64::new(0.0, x);
    let tiny = Complex64::new(1e-300, 0.0);
    let mut b = z + 1.0;
    let mut c = Complex64::new(1e300, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for k in 1..400 {
        let kf = k as f64;
        let a = -kf * kf;
        b += 2.0;
        d = a * d + b;
        if d.norm_sqr() < 1e-600 {
            d = tiny;
        }
        c = b + a / c;
        if c.norm_sqr() < 1e-600 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    // e^{-ix} * h
    Complex64::new(0.0, -x).exp() * h
}

/// int_X^infty cos(a t)/t dt for a > 0, X > 0.
pub fn cos_tail_over_t(a: f64, x: f64) -> f64 {
    -ci(a * x)
}

/// int_X^infty sin(a t)/t dt for a > 0, X > 0.
pub fn sin_tail_over_t(a: f64, x: f64) -> f64 {
    FRAC_PI_2 - si(a * x)
}

/// int_X^infty cos(a t)/t^2 dt for a >= 0, X > 0 (integration by parts).
pub fn cos_tail_over_t2(a: f64, x: f64) -> f64 {
    if a == 0.0 {
        return 1.0 / x;
    }
    (a * x).cos() / x - a * (FRAC_PI_2 - si(a * x))
}

/// int_X^infty cos(2 pi omega t) / (t - shift) dt, requires X > shift.
pub fn cos_tail_shifted(omega: f64, shift: f64, x: f64) -> f64 {
    let a = 2.0 * PI * omega.abs();
    if a == 0.0 {
        panic!("cos_tail_shifted needs omega != 0");
    }
    let w = x - shift;
    // cos(a(w + shift)) = cos(a shift) cos(aw) - sin(a shift) sin(aw)
    let phi = a * shift;
    phi.cos() * cos_tail_over_t(a, w) - phi.sin() * sin_tail_over_t(a, w)
}
