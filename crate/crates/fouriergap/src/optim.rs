//! Derivative-free search over Gaussian mixtures.
//!
//! Nelder-Mead simplex over the coefficients and log-rates with the even
//! powers held fixed, plus seeded random restarts. The returned mixture never
//! scores below the initialization.

use crate::families::{GaussianMixture, MixtureTerm};
use crate::fourier::{self, AParam, FourierError, FunctionalReport, Mode};
use crate::quad::QuadratureSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerConfig {
    pub max_evaluations: usize,
    pub initial_simplex_scale: f64,
    pub convergence_tol: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_evaluations: 2000,
            initial_simplex_scale: 0.15,
            convergence_tol: 1e-9,
            seed: 1,
            restarts: 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum OptimError {
    #[error("optimizer requires finite A > 1, got {0}")]
    Domain(String),
    #[error(transparent)]
    Functional(#[from] FourierError),
    #[error("convergence tolerance must be positive")]
    BadTolerance,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeOutcome {
    pub mixture: GaussianMixture,
    pub report: FunctionalReport,
    /// false when the budget ran out without beating the initial value,
    /// in which case the initial mixture is returned unchanged
    pub improved: bool,
    pub evaluations: usize,
}

/// Minimize `f` with a standard Nelder-Mead simplex; returns (x, f(x), evals).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    scale: f64,
    tol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut evals = 0usize;
    let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let push = |p: Vec<f64>, f: &mut F, evals: &mut usize| {
        let v = f(&p);
        *evals += 1;
        (p, v)
    };
    pts.push(push(x0.to_vec(), &mut f, &mut evals));
    for i in 0..n {
        let mut p = x0.to_vec();
        let step = if p[i].abs() > 1e-12 { scale * p[i].abs() } else { scale };
        p[i] += step;
        pts.push(push(p, &mut f, &mut evals));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while evals < max_evals {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = pts[n].1 - pts[0].1;
        if spread.abs() < tol {
            break;
        }
        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, x) in centroid.iter_mut().zip(&p.0) {
                *c += x / n as f64;
            }
        }
        let worst = pts[n].clone();
        let at = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let refl = push(at(alpha), &mut f, &mut evals);
        if refl.1 < pts[0].1 {
            let exp = push(at(gamma), &mut f, &mut evals);
            pts[n] = if exp.1 < refl.1 { exp } else { refl };
        } else if refl.1 < pts[n - 1].1 {
            pts[n] = refl;
        } else {
            let contr = if refl.1 < worst.1 {
                push(at(rho), &mut f, &mut evals)
            } else {
                push(at(-rho), &mut f, &mut evals)
            };
            if contr.1 < worst.1.min(refl.1) {
                pts[n] = contr;
            } else {
                // shrink toward the best vertex
                let best = pts[0].0.clone();
                for p in pts.iter_mut().skip(1) {
                    let q: Vec<f64> = best
                        .iter()
                        .zip(&p.0)
                        .map(|(b, x)| b + sigma * (x - b))
                        .collect();
                    *p = push(q, &mut f, &mut evals);
                }
            }
        }
    }
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    let best = pts.remove(0);
    (best.0, best.1, evals)
}

fn mixture_from_params(powers: &[u32], params: &[f64]) -> GaussianMixture {
    let n = powers.len();
    let terms: Vec<MixtureTerm> = (0..n)
        .map(|i| MixtureTerm {
            coef: params[i],
            power: powers[i],
            rate: params[n + i].exp(),
        })
        .collect();
    GaussianMixture { terms }
}

fn score(
    powers: &[u32],
    params: &[f64],
    a: AParam,
    mode: Mode,
    q: &QuadratureSpec,
) -> f64 {
    // rates are exp(param), so positivity is structural; wild rates are
    // penalized instead of evaluated
    let n = powers.len();
    for &lr in &params[n..] {
        if !(-6.0..=8.0).contains(&lr) {
            return 1e6;
        }
    }
    let mix = mixture_from_params(powers, params);
    match fourier::functional(&mix.pair(), a, mode, q) {
        Ok(rep) => -rep.functional_value,
        Err(_) => 1e6,
    }
}

/// Search mixtures with the given initialization, deterministic per seed.
pub fn optimize_mixture(
    a: AParam,
    mode: Mode,
    init: &GaussianMixture,
    cfg: &OptimizerConfig,
) -> Result<OptimizeOutcome, OptimError> {
    match a {
        AParam::Finite(av) if av > 1.0 => {}
        other => return Err(OptimError::Domain(format!("{other:?}"))),
    }
    if !(cfg.convergence_tol > 0.0) {
        return Err(OptimError::BadTolerance);
    }
    // coarse tolerances keep each functional evaluation cheap inside the loop
    let q = QuadratureSpec {
        abs_tol: 1e-8,
        rel_tol: 1e-8,
        ..Default::default()
    };
    let powers: Vec<u32> = init.terms.iter().map(|t| t.power).collect();
    let x0: Vec<f64> = init
        .terms
        .iter()
        .map(|t| t.coef)
        .chain(init.terms.iter().map(|t| t.rate.ln()))
        .collect();

    let init_report = fourier::functional(&init.pair(), a, mode, &QuadratureSpec::default())?;
    let mut best_params = x0.clone();
    let mut best_score = -init_report.functional_value;
    let mut total_evals = 0usize;
    let budget = cfg.max_evaluations / (cfg.restarts + 1).max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for restart in 0..=cfg.restarts {
        let start: Vec<f64> = if restart == 0 {
            x0.clone()
        } else {
            x0.iter()
                .map(|v| v * (1.0 + 0.2 * (rng.gen::<f64>() - 0.5)) + 0.01 * (rng.gen::<f64>() - 0.5))
                .collect()
        };
        let (p, s, e) = nelder_mead(
            |p| score(&powers, p, a, mode, &q),
            &start,
            cfg.initial_simplex_scale,
            cfg.convergence_tol,
            budget.max(50),
        );
        total_evals += e;
        if s < best_score {
            best_score = s;
            best_params = p;
        }
    }

    let candidate = mixture_from_params(&powers, &best_params);
    let report = fourier::functional(&candidate.pair(), a, mode, &QuadratureSpec::default())?;
    if report.functional_value >= init_report.functional_value {
        let improved = report.functional_value > init_report.functional_value;
        Ok(OptimizeOutcome { mixture: candidate, report, improved, evaluations: total_evals })
    } else {
        // precise re-evaluation fell below the start: keep the initialization
        Ok(OptimizeOutcome {
            mixture: init.clone(),
            report: init_report,
            improved: false,
            evaluations: total_evals,
        })
    }
}
