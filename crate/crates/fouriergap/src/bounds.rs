//! Closed-form lower/upper bounds for the two extremal constants, the
//! lambda(A) dilation equation, and bound tables.
//!
//! Lower bounds come from the cosine-kernel and Fejer dilation families; upper
//! bounds from the mollified dual witnesses, taking the better of the witness
//! value and the trivial bound 2.

use crate::alpha;
use crate::fourier::AParam;
use crate::roots;
use crate::sici;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("lambda(A) requires A > 1, got {0}")]
    LambdaDomain(f64),
    #[error("bounds require A >= 1, got {0}")]
    ADomain(f64),
    #[error(transparent)]
    Root(#[from] roots::RootError),
}

/// Which extremal constant a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Target {
    C,
    Cplus,
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::C => write!(f, "C"),
            Target::Cplus => write!(f, "Cplus"),
        }
    }
}

/// c0 = (4/pi) (int_{-1}^{1} sin(pi t)/(pi t) dt)^{-1} = 2 / Si(pi).
pub fn c0() -> f64 {
    2.0 / sici::si(PI)
}

/// d0, the sup norm of the piecewise-profile dual witness (cached).
pub fn d0() -> f64 {
    static D0: OnceLock<f64> = OnceLock::new();
    *D0.get_or_init(|| {
        let profile = alpha::solve_alpha(0.3, 0.6).expect("profile solve");
        alpha::compute_d0(&profile).expect("d0 quadrature")
    })
}

/// Unique solution in (0, 1) of 1 - 1/A = sin(pi l/2) - (pi l/2) cos(pi l/2).
/// The right side increases strictly from 0 to 1, so (0, 1) brackets the root.
pub fn lambda_of_a(a: f64) -> Result<f64, BoundsError> {
    if !(a > 1.0) {
        return Err(BoundsError::LambdaDomain(a));
    }
    let target = 1.0 - 1.0 / a;
    let f = move |l: f64| {
        let half = PI * l / 2.0;
        half.sin() - half * half.cos() - target
    };
    let df = move |l: f64| {
        let half = PI * l / 2.0;
        (PI * PI * l / 4.0) * half.sin()
    };
    Ok(roots::bisect_newton(f, df, 1e-15, 1.0, 1e-12)?)
}

/// A lower bound together with both closed-form branch values and the
/// description of the achieving family.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBound {
    pub value: f64,
    pub cosine_branch: f64,
    pub fejer_branch: f64,
    pub witness: String,
}

/// max{ 2A - 2 sqrt(A(A-1)), (pi A c0/2) cos(pi lambda(A)/2) }; at A = inf the
/// bandlimited cosine kernel itself gives c0.
pub fn lower_bound_c(a: AParam) -> Result<LowerBound, BoundsError> {
    match a {
        AParam::Infinity => Ok(LowerBound {
            value: c0(),
            cosine_branch: c0(),
            fejer_branch: 1.0,
            witness: "cos-kernel H (bandlimited, H(0)/||H||_1 = c0)".into(),
        }),
        AParam::Finite(av) => {
            if !(av >= 1.0) {
                return Err(BoundsError::ADomain(av));
            }
            let fejer = 2.0 * av - 2.0 * (av * (av - 1.0)).sqrt();
            let (cosine, lam) = if av == 1.0 {
                (PI * c0() / 2.0, 0.0)
            } else {
                let lam = lambda_of_a(av)?;
                ((PI * av * c0() / 2.0) * (PI * lam / 2.0).cos(), lam)
            };
            let (value, witness) = if cosine >= fejer {
                (cosine, format!("H(x/{lam:.6}) cosine-kernel dilation"))
            } else {
                let lf = ((av - 1.0) / av).sqrt();
                (fejer, format!("Fejer dilation K(x/{lf:.6})"))
            };
            Ok(LowerBound { value, cosine_branch: cosine, fejer_branch: fejer, witness })
        }
    }
}

/// An upper bound with the dual construction that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    pub value: f64,
    pub witness: String,
}

/// min{ d0 / (1 - 0.3/(A-2)), 2 }, the mollified-witness branch being
/// available only for A >= 2.6.
pub fn upper_bound_c(a: AParam) -> Result<UpperBound, BoundsError> {
    match a {
        AParam::Infinity => Ok(UpperBound {
            value: d0(),
            witness: "piecewise-profile witness psi, ||psi||_inf = d0".into(),
        }),
        AParam::Finite(av) => {
            if !(av >= 1.0) {
                return Err(BoundsError::ADomain(av));
            }
            if av < 2.6 {
                return Ok(UpperBound { value: 2.0, witness: "trivial bound 2".into() });
            }
            let gamma = 1.0 / (1.0 - 0.3 / (av - 2.0));
            let molly = gamma * d0();
            if molly < 2.0 {
                Ok(UpperBound {
                    value: molly,
                    witness: format!("mollified psi, gamma = {gamma:.9}"),
                })
            } else {
                Ok(UpperBound { value: 2.0, witness: "trivial bound 2".into() })
            }
        }
    }
}

/// min{ 1.2 / (1 - 0.222/(A-1)), 2 }, available for A > 1.222.
pub fn upper_bound_cplus(a: AParam) -> Result<UpperBound, BoundsError> {
    match a {
        AParam::Infinity => Ok(UpperBound {
            value: 1.2,
            witness: "windowed-sinc witness, ||Psi||_inf < 1.2".into(),
        }),
        AParam::Finite(av) => {
            if !(av >= 1.0) {
                return Err(BoundsError::ADomain(av));
            }
            if av <= 1.222 {
                return Ok(UpperBound { value: 2.0, witness: "trivial bound 2".into() });
            }
            let gamma = 1.0 / (1.0 - 0.222 / (av - 1.0));
            let molly = gamma * 1.2;
            if molly < 2.0 {
                Ok(UpperBound {
                    value: molly,
                    witness: format!("mollified Psi, gamma = {gamma:.9}"),
                })
            } else {
                Ok(UpperBound { value: 2.0, witness: "trivial bound 2".into() })
            }
        }
    }
}

/// One row of a bound table.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRecord {
    pub a: AParam,
    pub target: Target,
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: String,
    pub upper_witness: String,
}

/// Assemble records for a list of A values. For the positive-part constant the
/// lower bound additionally tries the stock Gaussian mixture (valid for any
/// finite A > 1 since a positive functional value is always a lower bound).
pub fn bounds_table(a_values: &[AParam], target: Target) -> Result<Vec<BoundRecord>, BoundsError> {
    let mut out = Vec::with_capacity(a_values.len());
    for &a in a_values {
        let rec = match target {
            Target::C => {
                let lo = lower_bound_c(a)?;
                let up = upper_bound_c(a)?;
                BoundRecord {
                    a,
                    target,
                    lower: lo.value,
                    upper: up.value,
                    lower_witness: format!(
                        "{} (cos branch {:.6}, fejer branch {:.6})",
                        lo.witness, lo.cosine_branch, lo.fejer_branch
                    ),
                    upper_witness: up.witness,
                }
            }
            Target::Cplus => {
                let lo = lower_bound_c(a)?;
                let up = upper_bound_cplus(a)?;
                let mut lower = lo.value;
                let mut lower_witness = format!(
                    "{} (cos branch {:.6}, fejer branch {:.6})",
                    lo.witness, lo.cosine_branch, lo.fejer_branch
                );
                if let AParam::Finite(av) = a {
                    if av > 1.0 {
                        let mix = crate::families::GaussianMixture::five_term_example();
                        let q = crate::quad::QuadratureSpec::default().with_abs_tol(1e-9);
                        if let Ok(rep) = crate::fourier::functional(
                            &mix.pair(),
                            a,
                            crate::fourier::Mode::Jplus,
                            &q,
                        ) {
                            if rep.functional_value > lower {
                                lower = rep.functional_value;
                                lower_witness =
                                    format!("five-term Gaussian mixture, J+ = {lower:.6}");
                            }
                        }
                    }
                }
                BoundRecord {
                    a,
                    target,
                    lower,
                    upper: up.value,
                    lower_witness,
                    upper_witness: up.witness,
                }
            }
        };
        out.push(rec);
    }
    Ok(out)
}

/// CSV with the fixed header "A,target,lower,upper,lower_witness,upper_witness".
pub fn bounds_table_csv(records: &[BoundRecord]) -> String {
    let mut s = String::from("A,target,lower,upper,lower_witness,upper_witness\n");
    for r in records {
        s.push_str(&format!(
            "{},{},{:.12},{:.12},\"{}\",\"{}\"\n",
            r.a, r.target, r.lower, r.upper, r.lower_witness, r.upper_witness
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c0_value() {
        assert!((c0() - 1.0799503135698025).abs() < 1e-14);
    }

    #[test]
    fn lambda_known_values() {
        // lambda(2) frozen from a 1e-15 bisection oracle run before this
        // implementation existed
        assert!((lambda_of_a(4.0).unwrap() - 0.8924223299584085).abs() < 1e-10);
        assert!((lambda_of_a(2.0).unwrap() - 0.7655295060766001).abs() < 1e-10);
        assert!(lambda_of_a(1.0).is_err());
        // A -> inf: right side reaches 1 exactly at lambda = 1
        assert!((lambda_of_a(1e12).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn lambda_monotone_in_a() {
        let grid = [1.1, 2.0, 4.0, 10.0, 100.0];
        let mut prev = 0.0;
        for &a in &grid {
            let l = lambda_of_a(a).unwrap();
            assert!(l > prev && l < 1.0);
            prev = l;
        }
    }

    #[test]
    fn lower_bound_values() {
        let lb = lower_bound_c(AParam::Finite(4.0)).unwrap();
        assert!((lb.value - 1.1411869446963552).abs() < 1e-9);
        let lb1 = lower_bound_c(AParam::Finite(1.0)).unwrap();
        assert!((lb1.value - 2.0).abs() < 1e-14, "C(1) lower = {}", lb1.value);
        let lbi = lower_bound_c(AParam::Infinity).unwrap();
        assert!((lbi.value - c0()).abs() < 1e-14);
        // at 36/11 the cosine branch reaches about 1.15698
        let lb36 = lower_bound_c(AParam::Finite(36.0 / 11.0)).unwrap();
        assert!((lb36.cosine_branch - 1.1569799939991152).abs() < 1e-9);
        assert!(lb36.value >= lb36.fejer_branch && lb36.value >= lb36.cosine_branch);
    }

    #[test]
    fn fejer_branch_at_2() {
        let lb = lower_bound_c(AParam::Finite(2.0)).unwrap();
        assert!((lb.fejer_branch - (4.0 - 2.0 * 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn upper_bound_values() {
        assert!((upper_bound_c(AParam::Infinity).unwrap().value - 1.09769).abs() < 5e-5);
        // A = 2.6: 1 - 0.3/0.6 = 1/2, so the witness branch is 2 d0 > 2
        assert!((upper_bound_c(AParam::Finite(2.6)).unwrap().value - 2.0).abs() < 1e-14);
        let u5 = upper_bound_c(AParam::Finite(5.0)).unwrap();
        assert!((u5.value - d0() / 0.9).abs() < 1e-12);
        assert!((upper_bound_cplus(AParam::Infinity).unwrap().value - 1.2).abs() < 1e-15);
        let u36 = upper_bound_cplus(AParam::Finite(36.0 / 11.0)).unwrap();
        assert!((u36.value - 1.2 / (1.0 - 0.222 * 11.0 / 25.0)).abs() < 1e-12);
        assert!((upper_bound_cplus(AParam::Finite(1.2)).unwrap().value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn upper_bounds_decrease_and_approach_limits() {
        let grid = [2.6, 3.0, 5.0, 10.0, 100.0, 1e6];
        let mut prev = f64::INFINITY;
        for &a in &grid {
            let v = upper_bound_c(AParam::Finite(a)).unwrap().value;
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        assert!((prev - d0()).abs() < 1e-6);
        let mut prev = f64::INFINITY;
        for &a in &[1.3, 2.0, 5.0, 100.0, 1e6] {
            let v = upper_bound_cplus(AParam::Finite(a)).unwrap().value;
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        assert!((prev - 1.2).abs() < 1e-6);
    }

    #[test]
    fn chain_lower_below_upper() {
        for &a in &[1.0, 1.5, 2.0, 2.6, 36.0 / 11.0, 4.0, 5.0, 10.0, 100.0] {
            let lo = lower_bound_c(AParam::Finite(a)).unwrap().value;
            let up = upper_bound_c(AParam::Finite(a)).unwrap().value;
            let upp = upper_bound_cplus(AParam::Finite(a)).unwrap().value;
            assert!(lo <= up + 1e-12, "A = {a}: {lo} > {up}");
            assert!(1.0 <= lo && up <= 2.0);
            // C <= C+, so the C lower bound must stay below the C+ upper bound
            assert!(lo <= upp + 1e-12);
        }
    }

    #[test]
    fn table_rows() {
        let rows = bounds_table(&[AParam::Infinity, AParam::Finite(1.0)], Target::C).unwrap();
        assert!((rows[0].lower - 1.07995).abs() < 5e-5);
        assert!((rows[0].upper - 1.09769).abs() < 5e-5);
        assert!((rows[1].lower - 2.0).abs() < 1e-12);
        assert!((rows[1].upper - 2.0).abs() < 1e-12);
        let csv = bounds_table_csv(&rows);
        assert!(csv.starts_with("A,target,lower,upper,lower_witness,upper_witness\n"));
        assert!(csv.contains("inf,C,"));
    }
}
