//! Numerical verification of the bracket algebra of the spin observables.
//!
//! Left-hand sides run through the automatic-differentiation bracket engine;
//! right-hand sides are direct epsilon contractions of directly evaluated
//! observables, so the two routes share no code.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::repspace::RepMatrices;

use super::observable::bracket;
use super::suite::{direct, observables_suite};
use super::{PhaseState, StateSampler};

/// One named residual with its tolerance.
#[derive(Debug, Clone)]
pub struct AlgebraCheck {
    pub name: String,
    /// Largest |lhs - rhs| across states and index pairs, divided by the
    /// largest term magnitude encountered.
    pub max_residual: f64,
    pub scale: f64,
    pub tolerance: f64,
}

impl AlgebraCheck {
    pub fn pass(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct AlgebraReport {
    pub states: usize,
    pub checks: Vec<AlgebraCheck>,
}

impl AlgebraReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(AlgebraCheck::pass)
    }

    pub fn worst(&self) -> Option<&AlgebraCheck> {
        self.checks
            .iter()
            .max_by(|a, b| a.max_residual.partial_cmp(&b.max_residual).unwrap())
    }
}

/// Evaluate the three bracket relations of the spin observables at `n`
/// sampled states and report the worst relative residual per relation:
///
/// ```text
/// {W_mu, W_nu} = eps_{mu nu rho la} p^rho W^la
/// {W_mu, r_nu} = eps_{mu nu rho la} p^rho r^la
/// {r_mu, r_nu} = -(1/p^4) eps_{mu nu rho la} p^rho W^la
/// ```
pub fn algebra_residuals(
    rep: &RepMatrices,
    metric: &Metric,
    sampler: &mut StateSampler,
    n: usize,
    tolerance: f64,
) -> AlgebraReport {
    let set = observables_suite(rep, metric);
    let w_low = set.pauli_lubansky.lowered(metric);
    let r_low = set.radius.lowered(metric);

    let mut checks = vec![
        AlgebraCheck {
            name: "{W,W} = eps p W".into(),
            max_residual: 0.0,
            scale: 0.0,
            tolerance,
        },
        AlgebraCheck {
            name: "{W,r} = eps p r".into(),
            max_residual: 0.0,
            scale: 0.0,
            tolerance,
        },
        AlgebraCheck {
            name: "{r,r} = -eps p W / p^4".into(),
            max_residual: 0.0,
            scale: 0.0,
            tolerance,
        },
    ];
    let mut raw = [[0.0f64; 2]; 3]; // [max |lhs-rhs|, max term scale]

    for _ in 0..n {
        let state = sampler.sample(rep, metric);
        let coords = state.coords(rep, metric);
        let w = direct::pauli_lubansky(rep, metric, &state);
        let r = direct::radius(rep, metric, &state);
        let p2 = metric.dot(state.p, state.p);

        let contraction = |v: &[Complex64; 4], mu: usize, nu: usize| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for rho in 0..4 {
                for la in 0..4 {
                    let eps = metric.epsilon_lower([mu, nu, rho, la]);
                    if eps != 0.0 {
                        acc += Complex64::new(eps * state.p[rho], 0.0) * v[la];
                    }
                }
            }
            acc
        };

        for mu in 0..4 {
            for nu in 0..4 {
                let lhs_ww = bracket(w_low.at(mu), w_low.at(nu)).eval(&coords);
                let rhs_ww = contraction(&w, mu, nu);
                let lhs_wr = bracket(w_low.at(mu), r_low.at(nu)).eval(&coords);
                let rhs_wr = contraction(&r, mu, nu);
                let lhs_rr = bracket(r_low.at(mu), r_low.at(nu)).eval(&coords);
                let rhs_rr = -contraction(&w, mu, nu) / Complex64::new(p2 * p2, 0.0);
                for (k, (lhs, rhs)) in [(lhs_ww, rhs_ww), (lhs_wr, rhs_wr), (lhs_rr, rhs_rr)]
                    .into_iter()
                    .enumerate()
                {
                    raw[k][0] = raw[k][0].max((lhs - rhs).norm());
                    raw[k][1] = raw[k][1].max(lhs.norm().max(rhs.norm()));
                }
            }
        }
    }

    for (k, check) in checks.iter_mut().enumerate() {
        check.scale = raw[k][1];
        check.max_residual = if n == 0 {
            0.0
        } else {
            raw[k][0] / raw[k][1].max(1e-30)
        };
    }
    AlgebraReport { states: n, checks }
}

/// Like [`algebra_residuals`] but failing with `AlgebraViolation` when any
/// relation exceeds the tolerance.
pub fn verify_algebra(
    rep: &RepMatrices,
    metric: &Metric,
    sampler: &mut StateSampler,
    n: usize,
    tolerance: f64,
) -> Result<AlgebraReport> {
    let report = algebra_residuals(rep, metric, sampler, n, tolerance);
    if let Some(bad) = report.checks.iter().find(|c| !c.pass()) {
        return Err(Error::AlgebraViolation {
            check: bad.name.clone(),
            residual: bad.max_residual,
            tolerance,
        });
    }
    Ok(report)
}

/// Largest |{z^mu, z^nu}| over mu < nu for z = x - r. The displaced
/// coordinate fails to be canonical; the returned magnitude quantifies it.
pub fn check_z_not_canonical(rep: &RepMatrices, metric: &Metric, state: &PhaseState) -> f64 {
    let set = observables_suite(rep, metric);
    let coords = state.coords(rep, metric);
    let mut max = 0.0f64;
    for mu in 0..4 {
        for nu in (mu + 1)..4 {
            let val = bracket(set.shifted_position.at(mu), set.shifted_position.at(nu))
                .eval(&coords);
            max = max.max(val.norm());
        }
    }
    max
}
