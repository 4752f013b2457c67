//! Function/transform pairs and the two extremal functionals.
//!
//! A [`FourierPair`] bundles evaluators for F and its transform (convention
//! F^(t) = int F(x) e^{-2 pi i x t} dx) with the metadata the quadrature layer
//! needs: support of the transform, decay class of F, and an exact tail model
//! for oscillatory integrals where one is available.

use crate::quad::{self, Integral, QuadError, QuadratureSpec};
use crate::roots;
use crate::sici;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransformKind {
    ClosedForm,
    NumericOracle,
}

/// Functional flavor: absolute tail (J) or positive-part tail (J+).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    J,
    Jplus,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::J => write!(f, "J"),
            Mode::Jplus => write!(f, "Jplus"),
        }
    }
}

/// The parameter A in [1, oo]. Infinity changes admissibility preconditions,
/// so it is a distinguished value rather than a large float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AParam {
    Finite(f64),
    Infinity,
}

impl AParam {
    pub fn parse(s: &str) -> Option<AParam> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Some(AParam::Infinity);
        }
        t.parse::<f64>().ok().map(AParam::Finite)
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            AParam::Finite(a) => Some(*a),
            AParam::Infinity => None,
        }
    }
}

impl fmt::Display for AParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AParam::Finite(a) => write!(f, "{a}"),
            AParam::Infinity => write!(f, "inf"),
        }
    }
}

/// Caller-declared decay of F, used to bound truncation tails.
#[derive(Debug, Clone, Copy)]
pub enum Decay {
    /// |F(x)| <= c / x^k for |x| >= r0, with k > 1
    Power { c: f64, k: u32, r0: f64 },
    /// |F(x)| <= c e^{-rate x^2}
    Gaussian { c: f64, rate: f64 },
}

impl Decay {
    /// Bound for int_{|x|>r} |F|.
    pub fn l1_tail_bound(&self, r: f64) -> f64 {
        match *self {
            Decay::Power { c, k, r0 } => {
                let r = r.max(r0);
                2.0 * c / ((k - 1) as f64 * r.powi(k as i32 - 1))
            }
            Decay::Gaussian { c, rate } => c * (-rate * r * r).exp() / (rate * r),
        }
    }
}

/// Exact asymptotic form of F beyond the truncation radius, when known.
/// Enables closed-form oscillatory tails through Si/Ci.
#[derive(Debug, Clone, Copy)]
pub enum TailForm {
    None,
    /// F(x) = cos(2 pi x / lambda) / (1 - 16 (x/lambda)^2) for all |x| beyond
    /// the removable singularities.
    CosineOverQuadratic { lambda: f64 },
    /// F(x) = (sin(pi x/lambda) / (pi x/lambda))^2.
    SincSquared { lambda: f64 },
}

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An evaluable function/transform pair with support and symmetry metadata.
#[derive(Clone)]
pub struct FourierPair {
    f: EvalFn,
    fhat: EvalFn,
    pub transform_kind: TransformKind,
    /// F^ vanishes outside [-N, N] when set.
    pub support_radius: Option<f64>,
    pub is_even: bool,
    pub l1_closed_form: Option<f64>,
    pub decay: Decay,
    pub tail_form: TailForm,
    /// |F^| is negligible (< 1e-16 of scale) beyond this radius; equals
    /// `support_radius` for bandlimited pairs.
    pub fhat_cutoff: f64,
    /// Shortest oscillation length of F, a panelization hint.
    pub osc_scale: f64,
}

impl fmt::Debug for FourierPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierPair")
            .field("transform_kind", &self.transform_kind)
            .field("support_radius", &self.support_radius)
            .field("is_even", &self.is_even)
            .field("l1_closed_form", &self.l1_closed_form)
            .finish()
    }
}

impl FourierPair {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f: EvalFn,
        fhat: EvalFn,
        transform_kind: TransformKind,
        support_radius: Option<f64>,
        is_even: bool,
        l1_closed_form: Option<f64>,
        decay: Decay,
        tail_form: TailForm,
        fhat_cutoff: f64,
        osc_scale: f64,
    ) -> Self {
        FourierPair {
            f,
            fhat,
            transform_kind,
            support_radius,
            is_even,
            l1_closed_form,
            decay,
            tail_form,
            fhat_cutoff,
            osc_scale,
        }
    }

    pub fn eval_f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn eval_fhat(&self, t: f64) -> f64 {
        (self.fhat)(t)
    }

    /// The dilation x -> F(x/lambda), whose transform is lambda F^(lambda t).
    pub fn dilate(&self, lambda: f64) -> FourierPair {
        assert!(lambda > 0.0, "dilation parameter must be positive");
        let f = self.f.clone();
        let fhat = self.fhat.clone();
        let decay = match self.decay {
            Decay::Power { c, k, r0 } => Decay::Power {
                c: c * lambda.powi(k as i32),
                k,
                r0: r0 * lambda,
            },
            Decay::Gaussian { c, rate } => Decay::Gaussian {
                c,
                rate: rate / (lambda * lambda),
            },
        };
        let tail_form = match self.tail_form {
            TailForm::None => TailForm::None,
            TailForm::CosineOverQuadratic { lambda: l } => {
                TailForm::CosineOverQuadratic { lambda: l * lambda }
            }
            TailForm::SincSquared { lambda: l } => TailForm::SincSquared { lambda: l * lambda },
        };
        FourierPair {
            f: Arc::new(move |x| f(x / lambda)),
            fhat: Arc::new(move |t| lambda * fhat(lambda * t)),
            transform_kind: self.transform_kind,
            support_radius: self.support_radius.map(|n| n / lambda),
            is_even: self.is_even,
            l1_closed_form: self.l1_closed_form.map(|v| v * lambda),
            decay,
            tail_form,
            fhat_cutoff: self.fhat_cutoff / lambda,
            osc_scale: self.osc_scale * lambda,
        }
    }
}

#[derive(Debug, Error)]
pub enum FourierError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: L1 norm is zero")]
    DegenerateL1,
    #[error("closed form {closed} disagrees with quadrature {numeric} beyond the error estimate {error}")]
    ClosedFormMismatch { closed: f64, numeric: f64, error: f64 },
}

/// J or J+ evaluation with all intermediate integrals and error estimates.
#[derive(Debug, Clone, Serialize)]
pub struct FunctionalReport {
    pub a: AParam,
    pub mode: Mode,
    pub value_at_zero: f64,
    pub l1_norm: f64,
    pub tail_integral: f64,
    pub functional_value: f64,
    pub error_estimate: f64,
}

/// Locate the sign changes of `g` on [lo, hi] by scanning at `step` and
/// bisecting each bracketed change.
fn sign_roots<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if hi <= lo {
        return out;
    }
    let n = (((hi - lo) / step).ceil() as usize).clamp(4, 2_000_000);
    let h = (hi - lo) / n as f64;
    let mut x0 = lo;
    let mut g0 = g(x0);
    for i in 1..=n {
        let x1 = lo + i as f64 * h;
        let g1 = g(x1);
        if g0 == 0.0 {
            out.push(x0);
        } else if g0 * g1 < 0.0 {
            if let Ok(r) = roots::bisect(g, x0, x1, 1e-14 * (1.0 + x1.abs())) {
                out.push(r);
            }
        }
        x0 = x1;
        g0 = g1;
    }
    out
}

/// Integrate g over [lo, hi] split at its sign changes; returns the per-panel
/// signed integrals so callers can take |.| or (.)+ without smearing kinks.
fn signed_panels<G: Fn(f64) -> f64>(
    g: &G,
    lo: f64,
    hi: f64,
    scan_step: f64,
    spec: &QuadratureSpec,
) -> Result<(Vec<f64>, f64), QuadError> {
    let mut cuts = vec![lo];
    cuts.extend(sign_roots(g, lo, hi, scan_step));
    cuts.push(hi);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * (1.0 + b.abs()));
    let panel_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / cuts.len() as f64,
        ..spec.clone()
    };
    let mut vals = Vec::with_capacity(cuts.len());
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let r = quad::integrate(g, w[0], w[1], &panel_spec)?;
        vals.push(r.value);
        err += r.error;
    }
    Ok((vals, err))
}

/// int |F| with a recorded error estimate. Uses the closed form when present
/// and cross-checks it against quadrature plus the declared-decay tail bound.
pub fn l1_norm(fp: &FourierPair, q: &QuadratureSpec) -> Result<Integral, FourierError> {
    let r = q.truncation_radius;
    let g = |x: f64| fp.eval_f(x);
    let scan = (fp.osc_scale / 8.0).min(0.25).max(1e-3);
    let numeric = if fp.is_even {
        let (vals, err) = signed_panels(&g, 0.0, r, scan, q)?;
        let sum: f64 = vals.iter().map(|v| v.abs()).sum();
        Integral::new(2.0 * sum, 2.0 * err)
    } else {
        let (vals, err) = signed_panels(&g, -r, r, scan, q)?;
        Integral::new(vals.iter().map(|v| v.abs()).sum(), err)
    };
    let tail = fp.decay.l1_tail_bound(r);
    let est = Integral::new(numeric.value, numeric.error + tail);

    if let Some(closed) = fp.l1_closed_form {
        // Truncation only loses mass, so closed >= numeric - error is expected.
        if (closed - est.value).abs() > est.error + q.tolerance_for(closed) {
            return Err(FourierError::ClosedFormMismatch {
                closed,
                numeric: est.value,
                error: est.error,
            });
        }
        return Ok(Integral::new(closed, 4.0 * f64::EPSILON * closed.abs()));
    }
    if est.error > q.tolerance_for(est.value) {
        return Err(QuadError::ToleranceNotMet {
            value: est.value,
            error: est.error,
        }
        .into());
    }
    Ok(est)
}

fn tail_panels(fp: &FourierPair, q: &QuadratureSpec) -> Result<(Vec<f64>, f64), FourierError> {
    let hi = match fp.support_radius {
        Some(n) => n,
        None => fp.fhat_cutoff,
    };
    if hi <= 1.0 {
        return Ok((Vec::new(), 0.0));
    }
    let g = |t: f64| fp.eval_fhat(t);
    let scan = ((hi - 1.0) / 400.0).min(0.02).max(1e-6);
    let (vals, err) = signed_panels(&g, 1.0, hi, scan, q)?;
    Ok((vals, err))
}

/// int_{|t|>1} |F^(t)| dt.
pub fn tail_abs_integral(fp: &FourierPair, q: &QuadratureSpec) -> Result<Integral, FourierError> {
    let (vals, err) = tail_panels(fp, q)?;
    let one_side: f64 = vals.iter().map(|v| v.abs()).sum();
    let sides = if fp.is_even { 2.0 } else { 1.0 };
    Ok(Integral::new(sides * one_side, sides * err))
}

/// int_{|t|>1} (F^(t))_+ dt, with panel boundaries at the bisection-located
/// roots of F^ so the positive part never smears a kink.
pub fn tail_pos_integral(fp: &FourierPair, q: &QuadratureSpec) -> Result<Integral, FourierError> {
    let (vals, err) = tail_panels(fp, q)?;
    let one_side: f64 = vals.iter().filter(|v| **v > 0.0).sum();
    let sides = if fp.is_even { 2.0 } else { 1.0 };
    Ok(Integral::new(sides * one_side, sides * err))
}

/// Assemble the functional (|F(0)| - A * tail) / ||F||_1 (mode J) or its
/// positive-part variant (mode J+). Positive values are certified lower
/// bounds for the corresponding extremal constant.
pub fn functional(
    fp: &FourierPair,
    a: AParam,
    mode: Mode,
    q: &QuadratureSpec,
) -> Result<FunctionalReport, FourierError> {
    if let AParam::Finite(av) = a {
        if !(av >= 1.0) {
            return Err(FourierError::Domain(format!("A = {av} must be >= 1")));
        }
    }
    let f0 = fp.eval_f(0.0);
    let value_at_zero = match mode {
        Mode::J => f0.abs(),
        Mode::Jplus => f0,
    };
    let l1 = l1_norm(fp, q)?;
    if l1.value <= 0.0 {
        return Err(FourierError::DegenerateL1);
    }

    let (tail, a_eff) = match a {
        AParam::Finite(av) => {
            let tail = match mode {
                Mode::J => tail_abs_integral(fp, q)?,
                Mode::Jplus => tail_pos_integral(fp, q)?,
            };
            (tail, av)
        }
        AParam::Infinity => {
            match mode {
                Mode::J => {
                    let ok = fp.support_radius.map(|n| n <= 1.0 + 1e-12).unwrap_or(false);
                    if !ok {
                        return Err(FourierError::Domain(
                            "A = inf in mode J needs transform support inside [-1, 1]".into(),
                        ));
                    }
                }
                Mode::Jplus => {
                    let tp = tail_pos_integral(fp, q)?;
                    if tp.value > 10.0 * q.abs_tol.max(1e-12) + tp.error {
                        return Err(FourierError::Domain(format!(
                            "A = inf in mode Jplus needs a vanishing positive tail, got {}",
                            tp.value
                        )));
                    }
                }
            }
            (Integral::exact(0.0), 0.0)
        }
    };

    let functional_value = (value_at_zero - a_eff * tail.value) / l1.value;
    let error_estimate =
        (a_eff * tail.error + functional_value.abs() * l1.error) / l1.value + 1e-15;
    Ok(FunctionalReport {
        a,
        mode,
        value_at_zero,
        l1_norm: l1.value,
        tail_integral: tail.value,
        functional_value,
        error_estimate,
    })
}

/// Closed tail of int_R^inf F(x) cos(2 pi t x) dx from the declared tail form.
fn transform_tail(fp: &FourierPair, t: f64, r: f64) -> Integral {
    let t = t.abs();
    match fp.tail_form {
        TailForm::None => Integral::new(0.0, fp.decay.l1_tail_bound(r) / 2.0),
        TailForm::CosineOverQuadratic { lambda } => {
            let nu = 1.0 / lambda;
            let c = lambda / 4.0;
            let mut total = 0.0;
            for omega in [nu + t, (nu - t).abs()] {
                let part = if omega == 0.0 {
                    ((r + c) / (r - c)).ln()
                } else {
                    sici::cos_tail_shifted(omega, c, r) - sici::cos_tail_shifted(omega, -c, r)
                };
                total += part;
            }
            Integral::new(-(lambda / 16.0) * total, 1e-15)
        }
        TailForm::SincSquared { lambda } => {
            let nu = 1.0 / lambda;
            let g = |omega: f64| sici::cos_tail_over_t2(2.0 * PI * omega.abs(), r);
            let v = lambda * lambda / (2.0 * PI * PI)
                * (g(t) - 0.5 * g(nu + t) - 0.5 * g((nu - t).abs()));
            Integral::new(v, 1e-15)
        }
    }
}

/// Oscillatory-aware quadrature oracle for F^(t) = int F(x) e^{-2 pi i x t} dx,
/// real part (the pairs in this crate are even). Panels follow the kernel's
/// half-periods on [0, R]; the remainder uses the exact tail model.
pub fn numeric_transform(
    fp: &FourierPair,
    t: f64,
    q: &QuadratureSpec,
) -> Result<Integral, FourierError> {
    let r = q.truncation_radius;
    let ta = t.abs();
    let g = |x: f64| fp.eval_f(x) * (2.0 * PI * x * ta).cos();
    // panel boundaries: half-periods of the kernel and of F's own oscillation
    let h = {
        let kernel = if ta > 1e-9 { 0.5 / ta } else { f64::INFINITY };
        kernel.min(fp.osc_scale * 0.5).min(1.0)
    };
    let mut cuts = Vec::new();
    let mut x = h;
    while x < r {
        cuts.push(x);
        x += h;
    }
    let main = quad::integrate_panels(&g, 0.0, r, &cuts, q)?;
    let tail = transform_tail(fp, ta, r);
    Ok(Integral::new(
        2.0 * (main.value + tail.value),
        2.0 * (main.error + tail.error),
    ))
}
