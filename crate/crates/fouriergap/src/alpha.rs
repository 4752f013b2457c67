//! The piecewise-linear profile behind the sup-norm-d0 dual witness.
//!
//! A continuous, piecewise linear alpha on [0, 1/2] is pinned by a fixed knot
//! tau = 0.29289 and two coupled parameters (epsilon, y):
//!
//!   alpha = 2x-1          on [0, tau]
//!           rises to 1    on [tau, tau+eps]
//!           1             on [tau+eps, 1/2-2eps]
//!           falls to 1-y  on [1/2-2eps, 1/2-eps]
//!           rises to 1    on [1/2-eps, 1/2]
//!
//! with eps = (tau^2 - 2 tau + 1/2)/(1 + y - 2 tau), and y chosen so that
//! int_0^{1/2} ((1-alpha)/j) cos(2 pi x) dx = 0 for j(x) = sin(2 pi x)/(2 pi x).
//! The epsilon-wide panels would destroy a naive adaptive budget, so every
//! integral here is done on the exact panel decomposition with fixed
//! Gauss-Legendre rules.

use crate::quad::gauss;
use crate::roots::{self, RootError};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Fixed profile knot, 29289/100000 exactly.
pub const TAU: f64 = 0.29289;

#[derive(Debug, Error)]
pub enum AlphaError {
    #[error(transparent)]
    Bracket(#[from] RootError),
    #[error("profile integral is degenerate ({0}); no finite d0")]
    DegenerateProfile(f64),
}

/// Solved profile parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaProfile {
    pub tau: f64,
    pub epsilon: f64,
    pub y: f64,
}

/// One linear piece on [lo, hi], anchored at its left endpoint value so the
/// steep epsilon-pieces evaluate without cancellation.
#[derive(Debug, Clone, Copy)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
    pub value_lo: f64,
}

impl Piece {
    pub fn value_at(&self, x: f64) -> f64 {
        self.value_lo + self.slope * (x - self.lo)
    }
}

pub fn epsilon_of_y(y: f64) -> f64 {
    (TAU * TAU - 2.0 * TAU + 0.5) / (1.0 + y - 2.0 * TAU)
}

impl AlphaProfile {
    pub fn from_y(y: f64) -> Self {
        AlphaProfile { tau: TAU, epsilon: epsilon_of_y(y), y }
    }

    pub fn pieces(&self) -> [Piece; 5] {
        let (t, e, y) = (self.tau, self.epsilon, self.y);
        let m2 = 2.0 * (1.0 - t) / e;
        [
            Piece { lo: 0.0, hi: t, slope: 2.0, value_lo: -1.0 },
            Piece { lo: t, hi: t + e, slope: m2, value_lo: 2.0 * t - 1.0 },
            Piece { lo: t + e, hi: 0.5 - 2.0 * e, slope: 0.0, value_lo: 1.0 },
            Piece { lo: 0.5 - 2.0 * e, hi: 0.5 - e, slope: -y / e, value_lo: 1.0 },
            Piece { lo: 0.5 - e, hi: 0.5, slope: y / e, value_lo: 1.0 - y },
        ]
    }

    /// alpha(x) for x in [0, 1/2].
    pub fn alpha(&self, x: f64) -> f64 {
        debug_assert!((0.0..=0.5 + 1e-12).contains(&x));
        for p in self.pieces() {
            if x <= p.hi {
                return p.value_at(x);
            }
        }
        self.pieces()[4].value_at(x)
    }

    /// Panel boundaries of the profile within [0, 1/2].
    pub fn breakpoints(&self) -> [f64; 6] {
        let (t, e) = (self.tau, self.epsilon);
        [0.0, t, t + e, 0.5 - 2.0 * e, 0.5 - e, 0.5]
    }
}

/// 1/j(x) = 2 pi x / sin(2 pi x) on [0, 1/2], evaluated through the
/// complementary coordinate near x = 1/2 where sin(2 pi x) vanishes.
pub fn inv_j(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let s = if x < 0.25 {
        (2.0 * PI * x).sin()
    } else {
        (2.0 * PI * (0.5 - x)).sin()
    };
    2.0 * PI * x / s
}

/// int over [0,1/2] of (1 - alpha(x)) / j(x) * w(x) on the exact panels.
/// The constant-1 piece contributes nothing since 1 - alpha = 0 there.
fn profile_integral<W: Fn(f64) -> f64>(profile: &AlphaProfile, w: W) -> f64 {
    let pieces = profile.pieces();
    let mut total = 0.0;
    for (i, p) in pieces.iter().enumerate() {
        if i == 2 {
            continue;
        }
        let g = |x: f64| (1.0 - p.value_at(x)) * inv_j(x) * w(x);
        // wide first piece: a few chunks of a high-order rule; the
        // epsilon-wide panels are a single rule each
        if i == 0 {
            let n_chunks = 4;
            let h = (p.hi - p.lo) / n_chunks as f64;
            for k in 0..n_chunks {
                total += gauss(&g, p.lo + k as f64 * h, p.lo + (k + 1) as f64 * h, 60);
            }
        } else {
            total += gauss(&g, p.lo, p.hi, 60);
        }
    }
    total
}

pub fn orthogonality_residual(y: f64) -> f64 {
    let profile = AlphaProfile::from_y(y);
    profile_integral(&profile, |x| (2.0 * PI * x).cos())
}

/// Solve for y in the bracket so the cosine-weighted profile integral
/// vanishes; epsilon follows from its closed form.
pub fn solve_alpha(y_lo: f64, y_hi: f64) -> Result<AlphaProfile, AlphaError> {
    let y = roots::bisect(orthogonality_residual, y_lo, y_hi, 1e-13)?;
    Ok(AlphaProfile::from_y(y))
}

/// d0 = (int_0^{1/2} (1 - alpha)/j dx)^{-1}.
pub fn compute_d0(profile: &AlphaProfile) -> Result<f64, AlphaError> {
    let d = profile_integral(profile, |_| 1.0);
    if !(d > 1e-6) {
        return Err(AlphaError::DegenerateProfile(d));
    }
    Ok(1.0 / d)
}

/// Exact 2 int_0^{1/2} alpha(x) cos(2 pi n x) dx (n = 0 gives 2 int alpha).
/// These are the cosine coefficients of the even 1-periodic extension of the
/// profile; the witness delta atoms are d0 times these.
pub fn profile_cos_coeff(profile: &AlphaProfile, n: u32) -> f64 {
    let mut total = 0.0;
    for p in profile.pieces() {
        total += linear_cos_integral(&p, n);
    }
    2.0 * total
}

/// int_lo^hi of the linear piece times cos(2 pi n x), in closed form.
fn linear_cos_integral(p: &Piece, n: u32) -> f64 {
    let w = p.hi - p.lo;
    if n == 0 {
        return p.value_lo * w + 0.5 * p.slope * w * w;
    }
    let k = 2.0 * PI * n as f64;
    let anti = |x: f64| p.value_at(x) * (k * x).sin() / k + p.slope * (k * x).cos() / (k * k);
    anti(p.hi) - anti(p.lo)
}

/// Exact 2 int_0^{1/2} alpha(x)^2 dx, the squared L2 norm of the periodic
/// profile over one period.
pub fn profile_l2_sq(profile: &AlphaProfile) -> f64 {
    let mut total = 0.0;
    for p in profile.pieces() {
        if p.slope == 0.0 {
            total += p.value_lo * p.value_lo * (p.hi - p.lo);
        } else {
            total += (p.value_at(p.hi).powi(3) - p.value_lo.powi(3)) / (3.0 * p.slope);
        }
    }
    2.0 * total
}

/// b(x) = d0 (1 - alpha(x)) / (2 j(x)) - 1 on [0, 1/2].
pub fn b_value(profile: &AlphaProfile, d0: f64, x: f64) -> f64 {
    0.5 * d0 * (1.0 - profile.alpha(x)) * inv_j(x) - 1.0
}

/// The two sign changes of b: one in the epsilon-rise after tau, one in the
/// first falling epsilon-panel near 1/2.
pub fn b_roots(profile: &AlphaProfile, d0: f64) -> Result<(f64, f64), AlphaError> {
    let bp = profile.breakpoints();
    let f = |x: f64| b_value(profile, d0, x);
    let r2 = roots::bisect(f, bp[1], bp[2], 1e-16)?;
    let r4 = roots::bisect(f, bp[3], bp[4], 1e-16)?;
    Ok((r2, r4))
}

/// int_{-1/2}^{1/2} |b| = 2 int_0^{1/2} |b|, with panels split at the profile
/// breakpoints and at the sign changes of b.
pub fn b_abs_integral(profile: &AlphaProfile, d0: f64) -> Result<f64, AlphaError> {
    let (r2, r4) = b_roots(profile, d0)?;
    let bp = profile.breakpoints();
    let mut cuts = vec![bp[0], bp[1], r2, bp[2], bp[3], r4, bp[4], bp[5]];
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-18);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let g = |x: f64| b_value(profile, d0, x).abs();
        // first panel is widest; split it for the rule
        if w[1] - w[0] > 0.1 {
            let n_chunks = 6;
            let h = (w[1] - w[0]) / n_chunks as f64;
            for k in 0..n_chunks {
                total += gauss(&g, w[0] + k as f64 * h, w[0] + (k + 1) as f64 * h, 60);
            }
        } else {
            total += gauss(&g, w[0], w[1], 60);
        }
    }
    Ok(2.0 * total)
}

/// 2 int_0^{1/2} b(x) cos(2 pi n x) dx by oscillation-aware panels.
pub fn b_cos_coeff(profile: &AlphaProfile, d0: f64, n: u32) -> f64 {
    let bp = profile.breakpoints();
    let g = |x: f64| b_value(profile, d0, x) * (2.0 * PI * n as f64 * x).cos();
    let mut cuts: Vec<f64> = bp.to_vec();
    if n >= 2 {
        // resolve the cosine: panel per half-period inside [0, tau+]
        let h = 0.25 / n as f64;
        let mut x = h;
        while x < bp[3] {
            cuts.push(x);
            x += h;
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-18);
    }
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let wide = w[1] - w[0] > 0.1;
        if wide {
            let n_chunks = 6;
            let h = (w[1] - w[0]) / n_chunks as f64;
            for k in 0..n_chunks {
                total += gauss(&g, w[0] + k as f64 * h, w[0] + (k + 1) as f64 * h, 40);
            }
        } else {
            total += gauss(&g, w[0], w[1], 40);
        }
    }
    2.0 * total
}

/// Profile cosine coefficients and b-coefficients up to n_max, with the
/// near-zero leading coefficients surfaced for assertion.
#[derive(Debug, Clone, Serialize)]
pub struct FourierCoeffs {
    /// index n -> 2 int alpha cos(2 pi n x); entry 0 is the mean term
    pub a: Vec<f64>,
    /// index n -> 2 int b cos(2 pi n x)
    pub b: Vec<f64>,
}

/// The paper-scale coefficient tables: a-entries are the normalized profile
/// coefficients (the witness atoms carry an extra factor d0), b-entries feed
/// the block structure of the witness transform.
pub fn fourier_coeffs(profile: &AlphaProfile, d0: f64, n_max: u32) -> FourierCoeffs {
    assert!(n_max >= 3, "need at least the first three coefficients");
    let a: Vec<f64> = (0..=n_max).map(|n| profile_cos_coeff(profile, n)).collect();
    let b: Vec<f64> = (0..=n_max).map(|n| b_cos_coeff(profile, d0, n)).collect();
    FourierCoeffs { a, b }
}
