//! Concrete test-function families as closed-form pair constructors.

use crate::fourier::{Decay, FourierPair, TailForm, TransformKind};
use crate::sici;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("dilation parameter {0} outside (0, 1]")]
    BadLambda(f64),
    #[error("mixture needs at least one term")]
    EmptyMixture,
    #[error("mixture rate must be positive, got {0}")]
    BadRate(f64),
    #[error("mixture config line {line}: {msg}")]
    Config { line: usize, msg: String },
}

/// sin(z)/z with the removable singularity filled in.
pub fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0 + z.powi(4) / 120.0
    } else {
        z.sin() / z
    }
}

/// The kernel cos(2 pi u)/(1 - 16 u^2), with a guarded local expansion around
/// the removable singularities at u = +-1/4 (direct division loses about
/// eight digits there).
pub fn cos_kernel(u: f64) -> f64 {
    let au = u.abs();
    let q = au - 0.25;
    if q.abs() <= 1e-4 {
        let c2 = 4.0 - 2.0 * PI * PI / 3.0;
        let c3 = -8.0 + 4.0 * PI * PI / 3.0;
        (PI / 4.0) * (1.0 + q * (-2.0 + q * (c2 + q * c3)))
    } else {
        (2.0 * PI * u).cos() / (1.0 - 16.0 * u * u)
    }
}

/// Derivative of [`cos_kernel`], with the matching guarded expansion.
pub fn cos_kernel_deriv(u: f64) -> f64 {
    let au = u.abs();
    let q = au - 0.25;
    let d = if q.abs() <= 1e-4 {
        let c2 = 4.0 - 2.0 * PI * PI / 3.0;
        let c3 = -8.0 + 4.0 * PI * PI / 3.0;
        (PI / 4.0) * (-2.0 + q * (2.0 * c2 + q * 3.0 * c3))
    } else {
        let den = 1.0 - 16.0 * au * au;
        (-2.0 * PI * (2.0 * PI * au).sin() * den + 32.0 * au * (2.0 * PI * au).cos()) / (den * den)
    };
    if u < 0.0 {
        -d
    } else {
        d
    }
}

/// Dilated cosine kernel H(x/lambda) with transform
/// lambda (pi/4) cos(pi lambda t / 2) on [-1/lambda, 1/lambda].
#[derive(Debug, Clone, Copy)]
pub struct DilatedCosineKernel {
    pub lambda: f64,
}

impl DilatedCosineKernel {
    pub fn new(lambda: f64) -> Result<Self, FamilyError> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(FamilyError::BadLambda(lambda));
        }
        Ok(DilatedCosineKernel { lambda })
    }

    pub fn pair(&self) -> FourierPair {
        let l = self.lambda;
        FourierPair::new(
            Arc::new(move |x| cos_kernel(x / l)),
            Arc::new(move |t| {
                if t.abs() <= 1.0 / l {
                    l * (PI / 4.0) * (PI * l * t / 2.0).cos()
                } else {
                    0.0
                }
            }),
            TransformKind::ClosedForm,
            Some(1.0 / l),
            true,
            // ||H||_1 = Si(pi)/2, and the dilation scales it by lambda
            Some(l * sici::si(PI) / 2.0),
            // |H(u)| <= 1/(15 u^2) for |u| >= 1
            Decay::Power { c: l * l / 15.0, k: 2, r0: l },
            TailForm::CosineOverQuadratic { lambda: l },
            1.0 / l,
            l / 2.0,
        )
    }
}

pub fn make_dilated_cosine(lambda: f64) -> Result<FourierPair, FamilyError> {
    Ok(DilatedCosineKernel::new(lambda)?.pair())
}

/// Fejer kernel dilation (sin(pi x/lambda)/(pi x/lambda))^2 with triangular
/// transform lambda (1 - lambda |t|)_+.
#[derive(Debug, Clone, Copy)]
pub struct FejerKernel {
    pub lambda: f64,
}

impl FejerKernel {
    pub fn new(lambda: f64) -> Result<Self, FamilyError> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(FamilyError::BadLambda(lambda));
        }
        Ok(FejerKernel { lambda })
    }

    pub fn pair(&self) -> FourierPair {
        let l = self.lambda;
        FourierPair::new(
            Arc::new(move |x| {
                let s = sinc(PI * x / l);
                s * s
            }),
            Arc::new(move |t| l * (1.0 - l * t.abs()).max(0.0)),
            TransformKind::ClosedForm,
            Some(1.0 / l),
            true,
            Some(l),
            Decay::Power {
                c: l * l / (PI * PI),
                k: 2,
                r0: l,
            },
            TailForm::SincSquared { lambda: l },
            1.0 / l,
            l / 2.0,
        )
    }
}

pub fn make_fejer(lambda: f64) -> Result<FourierPair, FamilyError> {
    Ok(FejerKernel::new(lambda)?.pair())
}

/// The normalized Gaussian e^{-pi x^2}, its own transform.
pub fn gaussian_pair() -> FourierPair {
    FourierPair::new(
        Arc::new(|x| (-PI * x * x).exp()),
        Arc::new(|t| (-PI * t * t).exp()),
        TransformKind::ClosedForm,
        None,
        true,
        Some(1.0),
        Decay::Gaussian { c: 1.0, rate: PI },
        TailForm::None,
        3.7,
        1.0,
    )
}

/// One mixture term: coef * x^{2 power} e^{-rate x^2}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureTerm {
    pub coef: f64,
    pub power: u32,
    pub rate: f64,
}

/// Finite sum of even Gaussian monomials. The transform is closed-form via
/// physicists' Hermite polynomials:
/// (x^{2m} e^{-s x^2})^(t) = sqrt(pi/s) (-1/(4s))^m H_{2m}(pi t/sqrt(s)) e^{-pi^2 t^2/s}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    pub terms: Vec<MixtureTerm>,
}

impl GaussianMixture {
    pub fn new(terms: Vec<MixtureTerm>) -> Result<Self, FamilyError> {
        if terms.is_empty() {
            return Err(FamilyError::EmptyMixture);
        }
        for t in &terms {
            if !(t.rate > 0.0) {
                return Err(FamilyError::BadRate(t.rate));
            }
        }
        Ok(GaussianMixture { terms })
    }

    /// The five-term mixture used as the stock optimizer seed; its J+ value
    /// at A = 36/11 exceeds 25/21.
    pub fn five_term_example() -> Self {
        GaussianMixture {
            terms: vec![
                MixtureTerm { coef: -4.8, power: 1, rate: 3.3 },
                MixtureTerm { coef: 1.5, power: 1, rate: 7.4 },
                MixtureTerm { coef: 520.0, power: 12, rate: 9.7 },
                MixtureTerm { coef: 1.3, power: 0, rate: 2.8 },
                MixtureTerm { coef: 0.18, power: 0, rate: 2.0 },
            ],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x2 = x * x;
        let mut sum = NeumaierSum::default();
        for t in &self.terms {
            sum.add(t.coef * x2.powi(t.power as i32) * (-t.rate * x2).exp());
        }
        sum.value()
    }

    /// Closed-form transform. The high-degree term cancels against the others
    /// at the 1e-3 scale, so terms are accumulated in compensated summation.
    pub fn eval_transform(&self, t: f64) -> f64 {
        let mut sum = NeumaierSum::default();
        for term in &self.terms {
            let s = term.rate;
            let u = PI * t / s.sqrt();
            let h = hermite(2 * term.power, u);
            let scale = (PI / s).sqrt() * (-0.25 / s).powi(term.power as i32);
            sum.add(term.coef * scale * h * (-u * u).exp());
        }
        sum.value()
    }

    fn decay(&self) -> Decay {
        let rate = self.terms.iter().map(|t| t.rate).fold(f64::INFINITY, f64::min) / 2.0;
        let mut c = 0.0;
        for t in &self.terms {
            let q = t.rate - rate;
            let m = t.power as f64;
            let peak = if t.power == 0 { 1.0 } else { (m / (std::f64::consts::E * q)).powf(m) };
            c += t.coef.abs() * peak;
        }
        Decay::Gaussian { c, rate }
    }

    fn fhat_cutoff(&self) -> f64 {
        let mut t = 2.0;
        let mut quiet = 0;
        while t < 50.0 {
            if self.eval_transform(t).abs() < 1e-17 {
                quiet += 1;
                if quiet >= 6 {
                    return t;
                }
            } else {
                quiet = 0;
            }
            t += 0.5;
        }
        50.0
    }

    pub fn pair(&self) -> FourierPair {
        let me = self.clone();
        let me2 = self.clone();
        let decay = self.decay();
        let cutoff = self.fhat_cutoff();
        FourierPair::new(
            Arc::new(move |x| me.eval(x)),
            Arc::new(move |t| me2.eval_transform(t)),
            TransformKind::ClosedForm,
            None,
            true,
            None,
            decay,
            TailForm::None,
            cutoff,
            1.0,
        )
    }

    /// Plain-text config: one term per line, "c m s" whitespace-separated,
    /// '#' begins a comment.
    pub fn parse_config(text: &str) -> Result<Self, FamilyError> {
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(FamilyError::Config {
                    line: i + 1,
                    msg: format!("expected 3 fields 'c m s', got {}", fields.len()),
                });
            }
            let coef: f64 = fields[0].parse().map_err(|e| FamilyError::Config {
                line: i + 1,
                msg: format!("bad coefficient: {e}"),
            })?;
            let power: u32 = fields[1].parse().map_err(|e| FamilyError::Config {
                line: i + 1,
                msg: format!("bad power: {e}"),
            })?;
            let rate: f64 = fields[2].parse().map_err(|e| FamilyError::Config {
                line: i + 1,
                msg: format!("bad rate: {e}"),
            })?;
            terms.push(MixtureTerm { coef, power, rate });
        }
        GaussianMixture::new(terms)
    }
}

pub fn make_gaussian_mixture(terms: Vec<MixtureTerm>) -> Result<FourierPair, FamilyError> {
    Ok(GaussianMixture::new(terms)?.pair())
}

/// Centered cardinal B-spline of order n (the n-fold convolution of the unit
/// box), evaluated by the Cox-de Boor recursion, which is numerically stable
/// where the alternating closed form is not.
pub fn bspline(n: u32, u: f64) -> f64 {
    let n = n as usize;
    let x = u + n as f64 / 2.0; // knots at 0..n
    if x <= 0.0 || x >= n as f64 {
        return 0.0;
    }
    // degree-0 coefficients on intervals [j, j+1)
    let j0 = x.floor() as usize;
    let mut vals = vec![0.0; n];
    vals[j0] = 1.0;
    for d in 1..n {
        for j in 0..(n - d) {
            let a = (x - j as f64) / d as f64;
            let b = ((j + d + 1) as f64 - x) / d as f64;
            vals[j] = a * vals[j] + b * vals[j + 1];
        }
    }
    vals[0]
}

/// Even bandlimited probe c * sinc(pi w x)^{2m} cos(2 pi mu x): transform
/// support radius m w + mu, x-decay x^{-2m}. Used to exercise pairing and
/// duality surfaces against functions strictly inside the unit band.
pub fn sinc_power_pair(m: u32, w: f64, mu: f64, c: f64) -> FourierPair {
    assert!(m >= 1 && w > 0.0 && mu >= 0.0);
    let support = m as f64 * w + mu;
    let f = move |x: f64| {
        let s = sinc(PI * w * x);
        c * s.powi(2 * m as i32) * (2.0 * PI * mu * x).cos()
    };
    let fhat = move |t: f64| {
        let b = |u: f64| bspline(2 * m, u / w) / w;
        c * 0.5 * (b(t - mu) + b(t + mu))
    };
    let env = (1.0 / (PI * w)).powi(2 * m as i32) * c.abs();
    FourierPair::new(
        Arc::new(f),
        Arc::new(fhat),
        TransformKind::ClosedForm,
        Some(support),
        true,
        None,
        Decay::Power { c: env, k: 2 * m, r0: 1.0f64.max(1.0 / (PI * w)) },
        TailForm::None,
        support,
        0.5 / (mu + w).max(0.1),
    )
}

/// Physicists' Hermite polynomial H_n by the three-term recurrence.
pub fn hermite(n: u32, u: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut h0 = 1.0;
    let mut h1 = 2.0 * u;
    for k in 1..n {
        let h2 = 2.0 * u * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Neumaier-compensated accumulator.
#[derive(Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier;
    use crate::quad::QuadratureSpec;

    #[test]
    fn h_kernel_basics() {
        assert!((cos_kernel(0.0) - 1.0).abs() < 1e-15);
        // removable singularity: continuous, limit pi/4
        assert!((cos_kernel(0.25) - PI / 4.0).abs() < 1e-14);
        for d in [1e-7, -1e-7, 5e-5, -5e-5] {
            let v = cos_kernel(0.25 + d);
            assert!((v - PI / 4.0).abs() < 1e-3);
            assert!(v.is_finite());
        }
        // window edge consistency with the direct formula
        let edge = 0.25 + 1.0001e-4;
        let direct = (2.0 * PI * edge).cos() / (1.0 - 16.0 * edge * edge);
        let inner = cos_kernel(0.25 + 0.9999e-4);
        assert!((direct - inner).abs() < 1e-6);
    }

    #[test]
    fn dilated_cosine_values() {
        let fp = make_dilated_cosine(0.5).unwrap();
        // F^(1) = 0.5 (pi/4) cos(pi/4)
        let expect = 0.5 * (PI / 4.0) * (PI / 4.0).cos();
        assert!((fp.eval_fhat(1.0) - expect).abs() < 1e-15);
        assert!(fp.eval_fhat(2.1).abs() == 0.0);
        assert!(make_dilated_cosine(0.0).is_err());
        assert!(make_dilated_cosine(1.5).is_err());
    }

    #[test]
    fn mixture_at_zero_and_config() {
        let m = GaussianMixture::five_term_example();
        assert!((m.eval(0.0) - 1.48).abs() < 1e-15);
        let text = "# five terms\n-4.8 1 3.3\n1.5 1 7.4\n520 12 9.7\n1.3 0 2.8\n0.18 0 2.0\n";
        let parsed = GaussianMixture::parse_config(text).unwrap();
        assert_eq!(parsed, m);
        assert!(GaussianMixture::parse_config("1 2\n").is_err());
        assert!(GaussianMixture::parse_config("# nothing\n").is_err());
        assert!(GaussianMixture::new(vec![MixtureTerm { coef: 1.0, power: 0, rate: -1.0 }]).is_err());
    }

    #[test]
    fn single_gaussian_term_is_self_dual() {
        let m = GaussianMixture::new(vec![MixtureTerm { coef: 1.0, power: 0, rate: PI }]).unwrap();
        for t in [0.0, 0.3, 1.0, 2.2] {
            assert!((m.eval_transform(t) - (-PI * t * t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn bspline_is_a_density_and_matches_transform() {
        // order 2 is the triangle
        assert!((bspline(2, 0.0) - 1.0).abs() < 1e-15);
        assert!((bspline(2, 0.5) - 0.5).abs() < 1e-15);
        assert_eq!(bspline(2, 1.0), 0.0);
        // sinc^{2m} probe: F(0) = c, transform integrates to F(0)
        let fp = sinc_power_pair(4, 0.11, 0.4, 1.0);
        assert!((fp.eval_f(0.0) - 1.0).abs() < 1e-15);
        let spec = QuadratureSpec::default();
        let total =
            crate::quad::integrate(&|t| fp.eval_fhat(t), -0.95, 0.95, &spec).unwrap().value;
        assert!((total - 1.0).abs() < 1e-9, "int fhat = {total}");
        // numeric transform agrees with the B-spline closed form
        for t in [0.0, 0.2, 0.5, 0.8, 0.93] {
            let oracle = fourier::numeric_transform(&fp, t, &spec).unwrap();
            assert!(
                (oracle.value - fp.eval_fhat(t)).abs() < 1e-8,
                "t={t}: {} vs {}",
                oracle.value,
                fp.eval_fhat(t)
            );
        }
    }

    #[test]
    fn transforms_match_numeric_oracle() {
        let spec = QuadratureSpec::default();
        let pairs = [
            make_dilated_cosine(1.0).unwrap(),
            make_dilated_cosine(0.9).unwrap(),
            make_fejer(1.0).unwrap(),
            make_fejer(0.5).unwrap(),
            GaussianMixture::five_term_example().pair(),
        ];
        for fp in &pairs {
            for k in 0..50 {
                let t = 0.03 + 0.077 * k as f64; // spread over [0, 3.8]
                let oracle = fourier::numeric_transform(fp, t, &spec).unwrap();
                let closed = fp.eval_fhat(t);
                assert!(
                    (oracle.value - closed).abs() < 1e-9,
                    "t = {t}: oracle {} vs closed {closed}",
                    oracle.value
                );
            }
        }
    }

    #[test]
    fn hermite_closed_form_vs_finite_differences() {
        // transform of x^{2m} e^{-s x^2} = (-1/(4 pi^2))^m d^{2m}/dt^{2m} of the
        // base Gaussian transform. Direct 2m-fold Richardson differences hold
        // to 1e-6 relative for m <= 3; the eighth difference bottoms out near
        // 2e-6 in double precision, so the m = 4 stage is checked as a second
        // difference of the (already validated) m = 3 closed form, which still
        // reaches the base transform through four difference stages.
        let s = 2.8;
        let base = |t: f64| (PI / s).sqrt() * (-PI * PI * t * t / s).exp();
        let term = |m: u32| {
            GaussianMixture::new(vec![MixtureTerm { coef: 1.0, power: m, rate: s }]).unwrap()
        };
        for m in 1..=3u32 {
            let tm = term(m);
            for &t0 in &[0.0, 0.4, 1.1] {
                let closed = tm.eval_transform(t0);
                let deriv = richardson_deriv(&base, 2 * m as usize, t0, 0.6, 6);
                let fd = (-1.0 / (4.0 * PI * PI)).powi(m as i32) * deriv;
                let scale = closed.abs().max(1e-12);
                assert!(
                    ((fd - closed) / scale).abs() < 1e-6,
                    "m={m} t={t0}: fd {fd} vs closed {closed}"
                );
            }
        }
        let t3 = term(3);
        let t4 = term(4);
        for &t0 in &[0.0, 0.4, 1.1] {
            let closed = t4.eval_transform(t0);
            let prior = |t: f64| t3.eval_transform(t);
            let fd = -richardson_deriv(&prior, 2, t0, 0.15, 5) / (4.0 * PI * PI);
            let scale = closed.abs().max(1e-12);
            assert!(
                ((fd - closed) / scale).abs() < 1e-6,
                "m=4 t={t0}: fd {fd} vs closed {closed}"
            );
        }
    }

    // 2m-fold central difference with Richardson extrapolation in h^2
    fn richardson_deriv(f: &dyn Fn(f64) -> f64, order: usize, t: f64, h0: f64, levels: u32) -> f64 {
        let stencil = |h: f64| -> f64 {
            let n = order;
            let mut acc = 0.0;
            for k in 0..=n {
                let w = binom(n, k) * if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
                acc += w * f(t + (k as f64 - n as f64 / 2.0) * h);
            }
            acc / h.powi(n as i32)
        };
        let mut rows: Vec<f64> = (0..levels).map(|i| stencil(h0 / 2f64.powi(i as i32))).collect();
        let mut fac = 4.0;
        while rows.len() > 1 {
            rows = rows
                .windows(2)
                .map(|w| (fac * w[1] - w[0]) / (fac - 1.0))
                .collect();
            fac *= 4.0;
        }
        rows[0]
    }

    fn binom(n: usize, k: usize) -> f64 {
        let mut r = 1.0;
        for i in 0..k {
            r = r * (n - i) as f64 / (i + 1) as f64;
        }
        r
    }
}
