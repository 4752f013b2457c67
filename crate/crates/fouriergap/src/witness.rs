//! Dual witnesses: bounded functions whose distributional transform is 1 on
//! the open unit interval, with certified sup norms.
//!
//! Three constructions live here: the piecewise-profile witness psi built
//! from [`crate::alpha`] (sup norm d0), the windowed-sinc example Psi
//! (sup norm below 1.2), and the mollification that dilates a witness and
//! multiplies by a sinc to cap its transform-domain delta atoms at finite
//! height.

use crate::alpha::{self, AlphaProfile};
use crate::fourier::{FourierError, FourierPair};
use crate::quad::{self, QuadratureSpec};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Alpha(#[from] alpha::AlphaError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error("certified sup {sup} exceeds the required bound {limit}")]
    Certification { sup: f64, limit: f64 },
    #[error("atom cutoff too small for tail control: {0}")]
    TailBound(String),
    #[error("mollification domain: {0}")]
    Domain(String),
    #[error("pairing requires transform support strictly inside (-1, 1), got {0}")]
    PairingSupport(f64),
}

/// Numerical sup-norm certificate: sampled-and-refined, not a proof.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Certificate {
    pub grid_step: f64,
    pub sample_radius: f64,
    pub refinement_depth: u32,
    /// extra allowance for |f| beyond the sampled radius (0 when the tail
    /// envelope stays below the sampled sup)
    pub tail_allowance: f64,
    pub argmax: f64,
    pub sup: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeltaAtom {
    pub location: f64,
    pub coefficient: f64,
}

/// A constant block of the witness transform: height on
/// [center - half_width, center + half_width].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TransformBlock {
    pub center: f64,
    pub half_width: f64,
    pub height: f64,
}

/// Box deviation of the transform at the origin (a mollified origin atom).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoreBump {
    pub half_width: f64,
    pub height: f64,
}

/// Kink locations of the witness, for panel-aware pairing quadrature.
#[derive(Debug, Clone)]
pub enum KinkModel {
    Smooth,
    /// kinks at k*period +- offset for every integer k
    Periodic { period: f64, offsets: Vec<f64> },
}

/// A dual test function: continuous evaluator plus the distributional parts
/// of its transform (delta atoms, far blocks) and a sup-norm certificate.
/// The transform equals 1 on (-1,1) up to the recorded origin atom/bump.
#[derive(Clone)]
pub struct DualWitness {
    pub name: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub delta_atoms: Vec<DeltaAtom>,
    pub core_bump: Option<CoreBump>,
    pub blocks: Vec<TransformBlock>,
    pub sup_norm: f64,
    pub certificate: Certificate,
    pub kinks: KinkModel,
    pub continuous_terms: Vec<String>,
}

impl std::fmt::Debug for DualWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DualWitness")
            .field("name", &self.name)
            .field("sup_norm", &self.sup_norm)
            .field("atoms", &self.delta_atoms.len())
            .finish()
    }
}

impl DualWitness {
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Largest |coefficient| among transform-domain delta atoms away from 0.
    pub fn max_atom(&self) -> f64 {
        self.delta_atoms
            .iter()
            .filter(|a| a.location != 0.0)
            .map(|a| a.coefficient.abs())
            .fold(0.0, f64::max)
    }

    fn panel_cuts(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut cuts = Vec::new();
        match &self.kinks {
            KinkModel::Smooth => {
                let mut x = lo.floor();
                while x <= hi {
                    if x > lo {
                        cuts.push(x);
                    }
                    x += 1.0;
                }
            }
            KinkModel::Periodic { period, offsets } => {
                let k0 = (lo / period).floor() as i64 - 1;
                let k1 = (hi / period).ceil() as i64 + 1;
                for k in k0..=k1 {
                    let base = k as f64 * period;
                    for &off in offsets {
                        for cand in [base - off, base + off] {
                            if cand > lo && cand < hi {
                                cuts.push(cand);
                            }
                        }
                    }
                }
                cuts.sort_by(f64::total_cmp);
                cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
            }
        }
        cuts
    }

    /// Serializable description (closures are not serialized).
    pub fn report(&self) -> WitnessReport {
        WitnessReport {
            name: self.name.clone(),
            continuous_terms: self.continuous_terms.clone(),
            delta_atoms: self.delta_atoms.iter().map(|a| (a.location, a.coefficient)).collect(),
            sup_norm: self.sup_norm,
            certificate: self.certificate,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub name: String,
    pub continuous_terms: Vec<String>,
    pub delta_atoms: Vec<(f64, f64)>,
    pub sup_norm: f64,
    pub certificate: Certificate,
}

/// Sup-norm certification: dense even-grid sampling over [0, radius], then
/// local refinement around the strongest samples. `tail_bound` caps |f|
/// beyond the sampled radius; the certified sup covers it.
#[derive(Debug, Clone)]
pub struct CertifySpec {
    pub grid_step: f64,
    pub sample_radius: f64,
    pub refine_top: usize,
    pub refine_depth: u32,
}

impl Default for CertifySpec {
    fn default() -> Self {
        CertifySpec { grid_step: 1e-4, sample_radius: 60.0, refine_top: 100, refine_depth: 45 }
    }
}

pub fn certify_sup<F>(f: &F, spec: &CertifySpec, tail_bound: f64) -> Certificate
where
    F: Fn(f64) -> f64 + Sync,
{
    let n = (spec.sample_radius / spec.grid_step).ceil() as u64;
    const CHUNK: u64 = 1 << 16;
    let n_chunks = n.div_ceil(CHUNK);
    // per-chunk top candidates, merged in index order for determinism
    let mut tops: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = ((ci + 1) * CHUNK).min(n + 1);
            let mut best: Vec<(f64, f64)> = Vec::with_capacity(8);
            for i in lo..hi {
                let x = i as f64 * spec.grid_step;
                let v = f(x).abs();
                if best.len() < 8 {
                    best.push((v, x));
                    best.sort_by(|a, b| b.0.total_cmp(&a.0));
                } else if v > best[7].0 {
                    best[7] = (v, x);
                    best.sort_by(|a, b| b.0.total_cmp(&a.0));
                }
            }
            best
        })
        .reduce(Vec::new, |mut acc, mut b| {
            acc.append(&mut b);
            acc
        });
    tops.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    tops.truncate(spec.refine_top);

    let mut sup = 0.0f64;
    let mut argmax = 0.0f64;
    for &(v0, x0) in &tops {
        let (v, x) = refine_max(f, x0, spec.grid_step, spec.refine_depth);
        let (v, x) = if v >= v0 { (v, x) } else { (v0, x0) };
        if v > sup {
            sup = v;
            argmax = x;
        }
    }
    let tail_allowance = (tail_bound - sup).max(0.0);
    Certificate {
        grid_step: spec.grid_step,
        sample_radius: spec.sample_radius,
        refinement_depth: spec.refine_depth,
        tail_allowance,
        argmax,
        sup: sup.max(tail_bound),
    }
}

/// Golden-section maximization of |f| on [x0 - h, x0 + h].
fn refine_max<F: Fn(f64) -> f64>(f: &F, x0: f64, h: f64, depth: u32) -> (f64, f64) {
    let inv_phi = 0.618_033_988_749_894_9;
    let (mut a, mut b) = ((x0 - h).max(0.0), x0 + h);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c).abs();
    let mut fd = f(d).abs();
    for _ in 0..depth {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c).abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d).abs();
        }
    }
    let xm = 0.5 * (a + b);
    (f(xm).abs(), xm)
}

/// Result of pairing a witness against a bandlimited pair: the x-side
/// integral int F w must match the transform-side prediction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairingCheck {
    pub integral: f64,
    pub quad_error: f64,
    pub predicted: f64,
    pub defect: f64,
}

/// Evaluate int F w by kink-aware panels on [-radius, radius] and compare
/// with F(0) plus the contribution of transform parts inside the support of
/// F^ (for support < 1 that is only the origin atom or bump).
pub fn pairing(
    w: &DualWitness,
    fp: &FourierPair,
    radius: f64,
    q: &QuadratureSpec,
) -> Result<PairingCheck, WitnessError> {
    let support = fp
        .support_radius
        .ok_or_else(|| WitnessError::PairingSupport(f64::INFINITY))?;
    if support >= 1.0 {
        return Err(WitnessError::PairingSupport(support));
    }
    let g = |x: f64| fp.eval_f(x) * w.eval(x);
    let cuts = w.panel_cuts(-radius, radius);
    let main = quad::integrate_panels(&g, -radius, radius, &cuts, q)
        .map_err(FourierError::from)?;
    let tail = w.sup_norm * fp.decay.l1_tail_bound(radius);

    let mut predicted = fp.eval_f(0.0);
    for a in &w.delta_atoms {
        if a.location.abs() < support {
            predicted += a.coefficient * fp.eval_fhat(a.location);
        }
    }
    if let Some(bump) = w.core_bump {
        let lim = bump.half_width.min(support);
        let v = quad::integrate(&|t| fp.eval_fhat(t), -lim, lim, q).map_err(FourierError::from)?;
        predicted += bump.height * v.value;
    }
    let integral = main.value;
    Ok(PairingCheck {
        integral,
        quad_error: main.error + tail,
        predicted,
        defect: integral - predicted,
    })
}

/// The profile witness and its audit quantities.
#[derive(Clone)]
pub struct ProfileWitness {
    pub profile: AlphaProfile,
    pub d0: f64,
    pub witness: DualWitness,
    /// sup over sampled transform cells of the block part (the core is 1)
    pub block_transform_sup: f64,
    /// Parseval cap on |atoms| beyond the stored cutoff
    pub atom_tail_cap: f64,
}

/// psi(x) = 2 j(x)(1 + b(x)) + a(x) with a = d0 alpha and
/// b = (d0 - a)/(2j) - 1 extended 1-periodically and evenly. Reduced to the
/// exact branch form psi(x) = a(r) + sign(xi) (r/x)(d0 - a(r)) with
/// xi = x - round(x), r = |xi|; on [-1/2, 1/2] this is identically d0.
fn psi_eval(profile: &AlphaProfile, d0: f64, x: f64) -> f64 {
    let n = x.round();
    let xi = x - n;
    if xi == 0.0 {
        return if n == 0.0 { d0 } else { -d0 };
    }
    let r = xi.abs();
    let a_r = d0 * profile.alpha(r);
    a_r + xi.signum() * (r / x) * (d0 - a_r)
}

/// Build the profile witness: solve nothing here, the caller supplies the
/// solved profile. Atoms are stored for |n| <= n_max with a Parseval cap on
/// the remainder; the continuous part is evaluated in closed form, so the
/// certificate needs no series tail allowance.
pub fn build_psi(profile: &AlphaProfile, n_max: u32) -> Result<ProfileWitness, WitnessError> {
    if n_max < 3 {
        return Err(WitnessError::TailBound(format!(
            "atom cutoff {n_max} cannot support the coefficient checks"
        )));
    }
    let d0 = alpha::compute_d0(profile)?;

    // exact piecewise-linear facts giving the global envelope |psi| <= d0:
    // |alpha| <= 1 and alpha(r) >= 2r - 1 on [0, 1/2], both linear per piece
    for p in profile.pieces() {
        for r in [p.lo, p.hi] {
            let a = p.value_at(r);
            if a.abs() > 1.0 + 1e-9 || a < 2.0 * r - 1.0 - 1e-9 {
                return Err(WitnessError::Certification { sup: a.abs(), limit: 1.0 });
            }
        }
    }

    let mut atoms = vec![DeltaAtom { location: 0.0, coefficient: d0 * alpha::profile_cos_coeff(profile, 0) }];
    let mut coeff_sq_sum = 0.0;
    for n in 1..=n_max {
        let c = alpha::profile_cos_coeff(profile, n);
        coeff_sq_sum += 2.0 * c * c;
        let coef = d0 * c;
        atoms.push(DeltaAtom { location: n as f64, coefficient: coef });
        atoms.push(DeltaAtom { location: -(n as f64), coefficient: coef });
    }
    let l2 = alpha::profile_l2_sq(profile);
    let atom_tail_cap = d0 * ((l2 - coeff_sq_sum).max(0.0) / 2.0).sqrt();

    let n_blocks = n_max.min(16);
    let mut blocks = Vec::new();
    let mut b_coeffs = vec![0.0; n_blocks as usize + 2];
    for n in 2..=n_blocks {
        let bn = alpha::b_cos_coeff(profile, d0, n);
        b_coeffs[n as usize] = bn;
        blocks.push(TransformBlock { center: n as f64, half_width: 1.0, height: bn });
        blocks.push(TransformBlock { center: -(n as f64), half_width: 1.0, height: bn });
    }
    // transform cells (k, k+1) carry b_k + b_{k+1}; the core carries 1
    let mut block_transform_sup = 0.0f64;
    for k in 1..=n_blocks as usize {
        let cell = b_coeffs[k] + b_coeffs[k + 1];
        block_transform_sup = block_transform_sup.max(cell.abs());
    }

    let prof = *profile;
    let eval = move |x: f64| psi_eval(&prof, d0, x);
    let cspec = CertifySpec::default();
    // beyond the sampled radius the branch bounds cap |psi| by d0 exactly
    let certificate = certify_sup(&eval, &cspec, d0);

    let offsets: Vec<f64> = profile.breakpoints().to_vec();
    let witness = DualWitness {
        name: "psi".into(),
        eval: Arc::new(eval),
        delta_atoms: atoms,
        core_bump: None,
        blocks,
        sup_norm: certificate.sup,
        certificate,
        kinks: KinkModel::Periodic { period: 1.0, offsets },
        continuous_terms: vec![
            format!("2 j(x) (1 + b(x)) with b = (d0 - a)/(2j) - 1, d0 = {d0:.9}"),
            format!("a(x) = d0 * alpha(x), profile y = {:.9}, eps = {:.6e}", profile.y, profile.epsilon),
        ],
    };
    Ok(ProfileWitness { profile: *profile, d0, witness, block_transform_sup, atom_tail_cap })
}

/// a~_n = (4/pi) sum_{j>=n} (-1)^j/(2j+1)^2, summed in consecutive pairs so
/// the remainder is O(K^-2); the reported value is within 1e-12.
pub fn tilde_psi_coeff(n: u32) -> f64 {
    let mut sum = 0.0f64;
    let mut j = n as u64;
    // leading unpaired term when the parity starts negative
    let sign = |j: u64| if j % 2 == 0 { 1.0 } else { -1.0 };
    const PAIRS: u64 = 1_200_000;
    let end = n as u64 + 2 * PAIRS;
    while j + 1 < end {
        let a = 1.0 / ((2 * j + 1) as f64).powi(2);
        let b = 1.0 / ((2 * j + 3) as f64).powi(2);
        sum += sign(j) * (a - b);
        j += 2;
    }
    (4.0 / PI) * sum
}

/// The sup norm of the alternative block witness, a~_0 = 1.16624...
pub fn tilde_psi_a0() -> f64 {
    tilde_psi_coeff(0)
}

/// Truncation of the a~_0 series after `terms` terms (Leibniz bracketing).
pub fn tilde_psi_a0_partial(terms: u32) -> f64 {
    let mut sum = 0.0;
    for j in 0..terms as u64 {
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += s / ((2 * j + 1) as f64).powi(2);
    }
    (4.0 / PI) * sum
}

const PSI_EX_A: f64 = 0.018;
const PSI_EX_B: f64 = 0.027;
const PSI_EX_C: f64 = 0.002;

fn psi_example_eval(x: f64) -> f64 {
    // sin(w pi x)/(pi x) = w sinc(w pi x)
    let sp = |w: f64| w * crate::families::sinc(w * PI * x);
    sp(2.0)
        + 2.0 * sp(PSI_EX_A) * (3.0 * PI * x).cos()
        + 2.0 * sp(PSI_EX_B) * (4.0 * PI * x).cos()
        + 2.0 * sp(PSI_EX_C) * (10.0 * PI * x).cos()
        - 0.888 * (2.0 * PI * x).cos()
        - 0.01 * (6.0 * PI * x).cos()
}

/// The windowed-sinc witness: transform is 1 on [-1, 1] with indicator blocks
/// at +-3/2, +-2, +-5 and atoms -0.444 at +-1, -0.005 at +-3. Certification
/// fails if the sampled sup reaches 1.2.
pub fn build_psi_example() -> Result<DualWitness, WitnessError> {
    let eval = |x: f64| psi_example_eval(x);
    let cspec = CertifySpec { sample_radius: 12.0, ..Default::default() };
    // envelope: the sinc terms decay like 1/(pi x), the cosines stay 0.898
    let x0 = cspec.sample_radius;
    let tail_bound = 0.898 + (2.0 + 2.0 * (PSI_EX_A + PSI_EX_B + PSI_EX_C)) / (PI * x0);
    let certificate = certify_sup(&eval, &cspec, tail_bound);
    if certificate.sup >= 1.2 {
        return Err(WitnessError::Certification { sup: certificate.sup, limit: 1.2 });
    }
    Ok(DualWitness {
        name: "psi-example".into(),
        eval: Arc::new(eval),
        delta_atoms: vec![
            DeltaAtom { location: 1.0, coefficient: -0.444 },
            DeltaAtom { location: -1.0, coefficient: -0.444 },
            DeltaAtom { location: 3.0, coefficient: -0.005 },
            DeltaAtom { location: -3.0, coefficient: -0.005 },
        ],
        core_bump: None,
        blocks: vec![
            TransformBlock { center: 1.5, half_width: PSI_EX_A / 2.0, height: 1.0 },
            TransformBlock { center: -1.5, half_width: PSI_EX_A / 2.0, height: 1.0 },
            TransformBlock { center: 2.0, half_width: PSI_EX_B / 2.0, height: 1.0 },
            TransformBlock { center: -2.0, half_width: PSI_EX_B / 2.0, height: 1.0 },
            TransformBlock { center: 5.0, half_width: PSI_EX_C / 2.0, height: 1.0 },
            TransformBlock { center: -5.0, half_width: PSI_EX_C / 2.0, height: 1.0 },
        ],
        sup_norm: certificate.sup,
        certificate,
        kinks: KinkModel::Smooth,
        continuous_terms: vec![
            "sin(2 pi x)/(pi x)".into(),
            format!("2 sin({PSI_EX_A} pi x)/(pi x) cos(3 pi x)"),
            format!("2 sin({PSI_EX_B} pi x)/(pi x) cos(4 pi x)"),
            format!("2 sin({PSI_EX_C} pi x)/(pi x) cos(10 pi x)"),
            "-0.888 cos(2 pi x)".into(),
            "-0.01 cos(6 pi x)".into(),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MollifyMode {
    C,
    Cplus,
}

/// A mollified witness Phi(x) = gamma w(gamma x) sinc(pi lambda_m x):
/// dilation pushes the transform atoms to +-gamma n, and the wide sinc --
/// the inverse transform of the width-lambda_m box -- convolves the
/// transform with that box, capping atom heights at gamma |coef| / lambda_m.
/// gamma - 1 = lambda_m / 2 keeps the transform identically 1 on (-1, 1).
#[derive(Clone)]
pub struct MollifiedWitness {
    pub witness: DualWitness,
    pub gamma: f64,
    pub lambda_m: f64,
    /// delta-coefficient cap the closed-form parameters assume
    pub cap: f64,
    /// actual largest |coefficient| among base atoms away from the origin
    pub max_atom: f64,
    /// gamma * max_atom / lambda_m, the tallest mollified atom
    pub atom_height_bound: f64,
    /// whether the mollified transform provably stays in the advertised
    /// range (|transform| <= A-1 for C, [1-A, 1] for C+); fails iff some
    /// base atom exceeds the cap
    pub range_ok: bool,
    /// gamma * base sup norm, an a-priori bound on the sup
    pub sup_bound: f64,
}

pub fn mollify(
    base: &DualWitness,
    a: f64,
    mode: MollifyMode,
) -> Result<MollifiedWitness, WitnessError> {
    let (cap, offset) = match mode {
        MollifyMode::C => {
            if !(a >= 2.6) {
                return Err(WitnessError::Domain(format!(
                    "mode C mollification needs A >= 2.6, got {a}"
                )));
            }
            (0.6, 2.0)
        }
        MollifyMode::Cplus => {
            if !(a > 1.222) {
                return Err(WitnessError::Domain(format!(
                    "mode C+ mollification needs A > 1.222, got {a}"
                )));
            }
            (0.444, 1.0)
        }
    };
    let gamma = 1.0 / (1.0 - cap / (2.0 * (a - offset)));
    let lambda_m = 2.0 * (gamma - 1.0);

    let base_eval = base.eval.clone();
    let lm = lambda_m;
    let eval = move |x: f64| gamma * base_eval(gamma * x) * crate::families::sinc(PI * lm * x);

    let sup_bound = gamma * base.sup_norm;
    let cspec = CertifySpec { sample_radius: 40.0, ..Default::default() };
    // |sinc(pi lambda x)| <= 1/(pi lambda |x|) beyond the sampled radius
    let tail_bound = sup_bound / (PI * lambda_m * cspec.sample_radius);
    let certificate = certify_sup(&eval, &cspec, tail_bound);

    let max_atom = base.max_atom();
    let atom_height_bound = gamma * max_atom / lambda_m;
    // base continuous transform is bounded by 1 in absolute value, so the
    // advertised range holds exactly when every atom is below the cap
    let range_ok = max_atom <= cap + 1e-12;

    // transform bookkeeping: atoms become boxes at +-gamma n, blocks dilate
    // and smear by lambda_m/2; the origin atom becomes a core bump
    let mut blocks = Vec::new();
    let mut core_bump = None;
    for at in &base.delta_atoms {
        if at.location == 0.0 {
            core_bump = Some(CoreBump {
                half_width: lambda_m / 2.0,
                height: gamma * at.coefficient / lambda_m,
            });
        } else {
            blocks.push(TransformBlock {
                center: gamma * at.location,
                half_width: lambda_m / 2.0,
                height: gamma * at.coefficient / lambda_m,
            });
        }
    }
    for b in &base.blocks {
        blocks.push(TransformBlock {
            center: gamma * b.center,
            half_width: gamma * b.half_width + lambda_m / 2.0,
            height: b.height,
        });
    }

    let kinks = match &base.kinks {
        KinkModel::Smooth => KinkModel::Smooth,
        KinkModel::Periodic { period, offsets } => KinkModel::Periodic {
            period: period / gamma,
            offsets: offsets.iter().map(|o| o / gamma).collect(),
        },
    };

    let witness = DualWitness {
        name: format!("{}-mollified", base.name),
        eval: Arc::new(eval),
        delta_atoms: Vec::new(),
        core_bump,
        blocks,
        sup_norm: certificate.sup.min(sup_bound),
        certificate,
        kinks,
        continuous_terms: vec![format!(
            "gamma base(gamma x) sinc(pi lambda x), gamma = {gamma:.12}, lambda = {lambda_m:.12}"
        )],
    };
    Ok(MollifiedWitness {
        witness,
        gamma,
        lambda_m,
        cap,
        max_atom,
        atom_height_bound,
        range_ok,
        sup_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn solved_psi() -> ProfileWitness {
        let profile = alpha::solve_alpha(0.3, 0.6).unwrap();
        build_psi(&profile, 64).unwrap()
    }

    #[test]
    fn psi_core_and_integers() {
        let pw = solved_psi();
        let d0 = pw.d0;
        for x in [0.0, 0.2, -0.37] {
            assert!((pw.witness.eval(x) - d0).abs() < 1e-14, "psi({x})");
        }
        // x = 1/2 runs through the steep epsilon-piece, where evaluating the
        // profile costs a few ulps of its 8e4 slope
        assert!((pw.witness.eval(0.5) - d0).abs() < 1e-9, "psi(0.5)");
        for n in [1.0f64, 2.0, 7.0, -3.0] {
            assert!((pw.witness.eval(n) + d0).abs() < 1e-14, "psi({n})");
        }
        // the left bands of positive integers sit at -d0 exactly
        assert!((pw.witness.eval(1.0 - 0.2) + d0).abs() < 1e-12);
    }

    #[test]
    fn psi_certificate_is_d0() {
        let pw = solved_psi();
        assert!((pw.witness.sup_norm - pw.d0).abs() < 1e-9);
        assert!((pw.witness.certificate.argmax).abs() <= 1.0 + 1e-6);
        // block transform stays within the unit bound
        assert!(pw.block_transform_sup <= 1.0, "cells {}", pw.block_transform_sup);
        // origin atom is the profile mean times d0: -2 d0 eps tau
        let a0 = pw.witness.delta_atoms[0];
        assert_eq!(a0.location, 0.0);
        assert!((a0.coefficient + 2.0 * pw.d0 * pw.profile.epsilon * pw.profile.tau).abs() < 1e-12);
        // atoms beyond the first exceed no cap and the tail cap is small
        assert!(pw.witness.max_atom() < 0.62);
        assert!(pw.atom_tail_cap < 0.26);
    }

    #[test]
    fn refinement_never_lowers_certified_sup() {
        let pw = solved_psi();
        let coarse = certify_sup(
            &|x| pw.witness.eval(x),
            &CertifySpec { grid_step: 2e-4, sample_radius: 20.0, ..Default::default() },
            0.0,
        );
        let fine = certify_sup(
            &|x| pw.witness.eval(x),
            &CertifySpec { grid_step: 1e-4, sample_radius: 20.0, ..Default::default() },
            0.0,
        );
        assert!(fine.sup + 1e-12 >= coarse.sup);
    }

    #[test]
    fn tilde_constants() {
        let a0 = tilde_psi_a0();
        assert!((a0 - 1.16624).abs() < 1e-5, "a~0 = {a0}");
        // one-term truncation is 4/pi
        assert!((tilde_psi_a0_partial(1) - 4.0 / PI).abs() < 1e-15);
        // Leibniz bracket: error after N terms below (4/pi)/(2N+1)^2
        for n in [1u32, 5, 20, 100] {
            let err = (tilde_psi_a0_partial(n) - a0).abs();
            assert!(err <= (4.0 / PI) / ((2 * n + 1) as f64).powi(2) + 1e-12);
        }
    }

    #[test]
    fn psi_example_shape() {
        let w = build_psi_example().unwrap();
        let v0 = w.eval(0.0);
        // 2 + 2(a+b+c) - 0.888 - 0.01
        assert!((v0 - 1.196).abs() < 1e-12, "Psi(0) = {v0}");
        assert!(w.sup_norm < 1.2);
        assert!(w.sup_norm >= 1.196);
    }

    #[test]
    fn pairing_psi_example_exact() {
        let w = build_psi_example().unwrap();
        let q = QuadratureSpec::default().with_abs_tol(1e-12);
        let fp = families::sinc_power_pair(4, 0.11, 0.4, 1.3);
        let chk = pairing(&w, &fp, 50.0, &q).unwrap();
        assert!((chk.predicted - 1.3).abs() < 1e-12);
        assert!(chk.defect.abs() < 1e-8, "defect {}", chk.defect);
    }

    #[test]
    fn pairing_psi_includes_origin_atom() {
        let pw = solved_psi();
        let q = QuadratureSpec::default().with_abs_tol(1e-12);
        let fp = families::sinc_power_pair(4, 0.12, 0.3, 1.0);
        let chk = pairing(&pw.witness, &fp, 50.0, &q).unwrap();
        // predicted = F(0) + a0 F^(0); the raw defect against F(0) alone is
        // exactly that tiny origin-atom contribution
        assert!(chk.defect.abs() < 1e-8, "defect {}", chk.defect);
        let a0 = pw.witness.delta_atoms[0].coefficient;
        assert!((chk.predicted - (1.0 + a0 * fp.eval_fhat(0.0))).abs() < 1e-13);
    }

    #[test]
    fn pairing_rejects_wide_support() {
        let w = build_psi_example().unwrap();
        let fp = families::make_fejer(1.0).unwrap();
        assert!(matches!(
            pairing(&w, &fp, 40.0, &QuadratureSpec::default()),
            Err(WitnessError::PairingSupport(_))
        ));
    }

    #[test]
    fn mollify_parameters() {
        let w = build_psi_example().unwrap();
        let m = mollify(&w, 36.0 / 11.0, MollifyMode::Cplus).unwrap();
        assert!((m.gamma - 1.0 / (1.0 - 0.222 * 11.0 / 25.0)).abs() < 1e-14);
        // algebraic identity, exact in floating point by construction
        assert_eq!(m.gamma - 1.0, m.lambda_m / 2.0);
        assert!(m.range_ok, "Psi atoms are within the 0.444 cap");
        assert!(m.witness.sup_norm <= m.gamma * w.sup_norm + 1e-12);
        // A -> inf recovers the base bound
        let mbig = mollify(&w, 1e9, MollifyMode::Cplus).unwrap();
        assert!((mbig.gamma - 1.0).abs() < 1e-9);
        assert!(mollify(&w, 1.2, MollifyMode::Cplus).is_err());
        assert!(mollify(&w, 2.5, MollifyMode::C).is_err());
    }

    #[test]
    fn mollified_pairing_still_exact() {
        let w = build_psi_example().unwrap();
        let m = mollify(&w, 36.0 / 11.0, MollifyMode::Cplus).unwrap();
        let q = QuadratureSpec::default().with_abs_tol(1e-12);
        let fp = families::sinc_power_pair(4, 0.1, 0.35, 0.7);
        let chk = pairing(&m.witness, &fp, 50.0, &q).unwrap();
        assert!((chk.predicted - 0.7).abs() < 1e-12);
        assert!(chk.defect.abs() < 2e-7, "defect {}", chk.defect);
    }

    #[test]
    fn mollified_psi_reports_range_honestly() {
        // the profile witness carries an atom slightly above the 0.6 cap, so
        // the advertised transform range cannot be certified
        let pw = solved_psi();
        let m = mollify(&pw.witness, 5.0, MollifyMode::C).unwrap();
        assert!((m.gamma - 1.0 / 0.9).abs() < 1e-12);
        assert!(m.max_atom > 0.6 && m.max_atom < 0.62);
        assert!(!m.range_ok);
        assert!(m.sup_bound <= m.gamma * pw.d0 + 1e-8);
    }
}
