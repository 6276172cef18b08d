//! Free equations of motion: exact propagator, fourth-order Runge-Kutta
//! stepper, the closed-form rotating radius, and trajectory decomposition
//! into center + drift + radius.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig, expm, CMat, CVec, Eigen};
use crate::metric::{Metric, Vec4};
use crate::phase_space::{direct, PhaseState};
use crate::repspace::RepMatrices;

const COND_LIMIT: f64 = 1e8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Proper-time derivatives of a state.
#[derive(Debug, Clone)]
pub struct Derivs {
    pub dx: Vec4,
    pub dp: Vec4,
    pub dxi: CVec,
}

/// One trajectory point with the derived observables evaluated there.
#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub tau: f64,
    pub x: Vec4,
    pub p: Vec4,
    pub xi: CVec,
    pub lambda: f64,
    pub velocity: Vec4,
    pub radius: Vec4,
    pub pauli_lubansky: Vec4,
    pub spin_tensor: [[f64; 4]; 4],
    pub hamiltonian: f64,
}

impl TrajectorySample {
    pub fn from_state(rep: &RepMatrices, metric: &Metric, tau: f64, state: &PhaseState) -> Self {
        TrajectorySample {
            tau,
            x: state.x,
            p: state.p,
            xi: state.xi.clone(),
            lambda: state.lambda,
            velocity: direct::re4(direct::velocity(rep, state)),
            radius: direct::re4(direct::radius(rep, metric, state)),
            pauli_lubansky: direct::re4(direct::pauli_lubansky(rep, metric, state)),
            spin_tensor: {
                let s = direct::spin_tensor(rep, state);
                std::array::from_fn(|mu| std::array::from_fn(|nu| s[mu][nu].re))
            },
            hamiltonian: direct::hamiltonian(rep, metric, state).re,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactPropagator,
    Rk4,
}

#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    pub tau_end: f64,
    /// Emit a sample every `stride` steps (the initial and final points are
    /// always emitted).
    pub stride: usize,
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::BadConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.tau_end >= 0.0) || !self.tau_end.is_finite() {
            return Err(Error::BadConfig(format!(
                "tau_end must be nonnegative, got {}",
                self.tau_end
            )));
        }
        if self.stride == 0 {
            return Err(Error::BadConfig("stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Free equations of motion: dx = xi-bar beta xi, dp = 0,
/// dxi = -(i/lambda) beta.p xi.
pub fn eom(rep: &RepMatrices, state: &PhaseState) -> Result<Derivs> {
    if state.lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    let dx = direct::re4(direct::velocity(rep, state));
    let dxi = rep.beta_dot(state.p) * &state.xi * c(0.0, -1.0 / state.lambda);
    Ok(Derivs {
        dx,
        dp: [0.0; 4],
        dxi,
    })
}

/// Zitterbewegung angular frequency sqrt(p^2) / (lambda s).
pub fn zbw_frequency(rep: &RepMatrices, metric: &Metric, state: &PhaseState) -> f64 {
    let p2 = metric.dot(state.p, state.p);
    p2.sqrt() / (state.lambda.abs() * rep.spin.s())
}

/// Zitterbewegung period 2 pi lambda s / sqrt(p^2).
pub fn zbw_period(rep: &RepMatrices, metric: &Metric, state: &PhaseState) -> f64 {
    std::f64::consts::TAU / zbw_frequency(rep, metric, state)
}

enum Evolution {
    /// Spectral form: xi(tau) = V exp(-i values tau / lambda) V^-1 xi(0).
    Spectral { eigen: Eigen, coeff: CVec },
    /// Scaling-and-squaring fallback for ill-conditioned eigenbases.
    Pade { generator: CMat },
}

/// Closed-form propagator for the free dynamics. The spinor advances through
/// the matrix exponential of beta.p; the position is assembled as
/// x(tau) = x(0) + f(tau) p + (r(tau) - r(0)) with f linear in tau.
pub struct ExactPropagator<'a> {
    rep: &'a RepMatrices,
    metric: &'a Metric,
    base: PhaseState,
    f_slope: f64,
    r0: Vec4,
    evolution: Evolution,
}

impl<'a> ExactPropagator<'a> {
    pub fn new(rep: &'a RepMatrices, metric: &'a Metric, state: &PhaseState) -> Result<Self> {
        if state.lambda == 0.0 {
            return Err(Error::ZeroLambda);
        }
        state.validate(rep, metric)?;
        let bp = rep.beta_dot(state.p);
        let eigen = eig(&bp)?;
        let evolution = if eigen.basis_condition() < COND_LIMIT {
            let inv = eigen
                .vectors
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Numerical("eigenbasis not invertible".into()))?;
            Evolution::Spectral {
                coeff: &inv * &state.xi,
                eigen,
            }
        } else {
            Evolution::Pade {
                generator: bp * c(0.0, -1.0 / state.lambda),
            }
        };
        let f_slope = direct::f_slope(rep, metric, state).re;
        let r0 = direct::re4(direct::radius(rep, metric, state));
        Ok(ExactPropagator {
            rep,
            metric,
            base: state.clone(),
            f_slope,
            r0,
            evolution,
        })
    }

    pub fn spinor_at(&self, tau: f64) -> CVec {
        match &self.evolution {
            Evolution::Spectral { eigen, coeff } => {
                let lam = self.base.lambda;
                let phased = DVector::from_iterator(
                    coeff.len(),
                    coeff
                        .iter()
                        .zip(eigen.values.iter())
                        .map(|(ck, ev)| ck * (ev * c(0.0, -tau / lam)).exp()),
                );
                &eigen.vectors * phased
            }
            Evolution::Pade { generator } => expm(&(generator * c(tau, 0.0)), COND_LIMIT) * &self.base.xi,
        }
    }

    pub fn state_at(&self, tau: f64) -> PhaseState {
        let mut state = self.base.clone();
        state.xi = self.spinor_at(tau);
        let r = direct::re4(direct::radius(self.rep, self.metric, &state));
        for mu in 0..4 {
            state.x[mu] =
                self.base.x[mu] + self.f_slope * tau * self.base.p[mu] + (r[mu] - self.r0[mu]);
        }
        state
    }
}

/// One-shot exact propagation.
pub fn propagate_exact(
    rep: &RepMatrices,
    metric: &Metric,
    state: &PhaseState,
    tau: f64,
) -> Result<PhaseState> {
    Ok(ExactPropagator::new(rep, metric, state)?.state_at(tau))
}

/// Closed-form radius r(tau) = r(0) cos(w tau) + (1/w) rdot(0) sin(w tau)
/// with w = sqrt(p^2)/(lambda s) and rdot(0) the p-orthogonal part of the
/// initial velocity.
pub fn closed_form_radius(
    rep: &RepMatrices,
    metric: &Metric,
    state: &PhaseState,
    tau: f64,
) -> Result<Vec4> {
    let p2 = metric.dot(state.p, state.p);
    if p2 <= 0.0 {
        return Err(Error::NonTimelike(p2));
    }
    let r0 = direct::re4(direct::radius(rep, metric, state));
    let u = direct::re4(direct::velocity(rep, state));
    let up = metric.dot(u, state.p) / p2;
    let rdot0: Vec4 = std::array::from_fn(|mu| u[mu] - up * state.p[mu]);
    let omega = zbw_frequency(rep, metric, state);
    let (sin, cos) = (omega * tau).sin_cos();
    Ok(std::array::from_fn(|mu| {
        r0[mu] * cos + rdot0[mu] * sin / omega
    }))
}

/// Shared fixed-step RK4 driver over a packed real state vector.
pub(crate) fn rk4_path(
    y0: Vec<f64>,
    dt: f64,
    n_steps: usize,
    stride: usize,
    deriv: impl Fn(&[f64]) -> Vec<f64>,
    mut emit: impl FnMut(usize, &[f64]) -> Result<()>,
) -> Result<()> {
    let mut y = y0;
    emit(0, &y)?;
    for step in 1..=n_steps {
        let k1 = deriv(&y);
        let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * dt * k).collect();
        let k2 = deriv(&y2);
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * dt * k).collect();
        let k3 = deriv(&y3);
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + dt * k).collect();
        let k4 = deriv(&y4);
        for (i, v) in y.iter_mut().enumerate() {
            *v += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if step % stride == 0 || step == n_steps {
            emit(step, &y)?;
        }
    }
    Ok(())
}

fn pack(state: &PhaseState) -> Vec<f64> {
    let d = state.xi.len();
    let mut y = Vec::with_capacity(8 + 2 * d);
    y.extend_from_slice(&state.x);
    y.extend_from_slice(&state.p);
    y.extend(state.xi.iter().map(|z| z.re));
    y.extend(state.xi.iter().map(|z| z.im));
    y
}

fn unpack(template: &PhaseState, y: &[f64]) -> PhaseState {
    let d = template.xi.len();
    let mut s = template.clone();
    s.x.copy_from_slice(&y[0..4]);
    s.p.copy_from_slice(&y[4..8]);
    s.xi = DVector::from_iterator(d, (0..d).map(|a| c(y[8 + a], y[8 + d + a])));
    s
}

/// Integrate the free dynamics, emitting samples with derived observables.
pub fn integrate(
    rep: &RepMatrices,
    metric: &Metric,
    state: &PhaseState,
    cfg: &IntegratorConfig,
) -> Result<Vec<TrajectorySample>> {
    cfg.validate()?;
    state.validate(rep, metric)?;
    match cfg.method {
        Method::ExactPropagator => {
            let prop = ExactPropagator::new(rep, metric, state)?;
            let mut out = Vec::new();
            let n_steps = steps_for(cfg);
            let mut step = 0usize;
            while step <= n_steps {
                let tau = step as f64 * cfg.dt;
                out.push(TrajectorySample::from_state(
                    rep,
                    metric,
                    tau,
                    &prop.state_at(tau),
                ));
                if step == n_steps {
                    break;
                }
                step = (step + cfg.stride).min(n_steps);
            }
            Ok(out)
        }
        Method::Rk4 => {
            if state.lambda == 0.0 {
                return Err(Error::ZeroLambda);
            }
            let bp = rep.beta_dot(state.p);
            let template = state.clone();
            let rep_metric = (rep, metric);
            let deriv = |y: &[f64]| -> Vec<f64> {
                let s = unpack(&template, y);
                let u = direct::re4(direct::velocity(rep_metric.0, &s));
                let dxi = &bp * &s.xi * c(0.0, -1.0 / s.lambda);
                let d = s.xi.len();
                let mut dy = vec![0.0; 8 + 2 * d];
                dy[0..4].copy_from_slice(&u);
                for a in 0..d {
                    dy[8 + a] = dxi[a].re;
                    dy[8 + d + a] = dxi[a].im;
                }
                dy
            };
            let mut out = Vec::new();
            rk4_path(pack(state), cfg.dt, steps_for(cfg), cfg.stride, deriv, |step, y| {
                let s = unpack(&template, y);
                out.push(TrajectorySample::from_state(
                    rep,
                    metric,
                    step as f64 * cfg.dt,
                    &s,
                ));
                Ok(())
            })?;
            Ok(out)
        }
    }
}

pub(crate) fn steps_for(cfg: &IntegratorConfig) -> usize {
    (cfg.tau_end / cfg.dt - 1e-9).ceil().max(0.0) as usize
}

/// Trajectory split into conserved center, linear drift, and rotating radius.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Conserved center X^mu = (1/p^2) J^{mu nu} p_nu from the first sample.
    pub center: Vec4,
    pub f_slope: f64,
    /// Extracted radius series (tau, x - X - f(tau) p).
    pub radius_series: Vec<(f64, Vec4)>,
    /// Largest deviation between the extracted radius and the closed-form
    /// rotating radius seeded at the first sample.
    pub residual: f64,
}

/// Decompose samples of one free trajectory.
pub fn decompose(
    rep: &RepMatrices,
    metric: &Metric,
    samples: &[TrajectorySample],
) -> Result<Decomposition> {
    if samples.len() < 2 {
        return Err(Error::BadConfig("need at least two samples".into()));
    }
    let p = samples[0].p;
    let p_scale = p.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    let drift = samples
        .iter()
        .flat_map(|s| (0..4).map(move |mu| (s.p[mu] - p[mu]).abs()))
        .fold(0.0f64, f64::max);
    if drift > 1e-12 * (1.0 + p_scale) {
        return Err(Error::InconsistentMomentum(drift));
    }

    let first = reconstruct_state(rep, &samples[0]);
    let center = direct::re4(direct::center(rep, metric, &first));
    let f_slope = direct::f_slope(rep, metric, &first).re;
    let p2 = metric.dot(p, p);
    let f0 = metric.dot(first.x, p) / p2;
    let tau0 = samples[0].tau;

    let mut series = Vec::with_capacity(samples.len());
    let mut residual = 0.0f64;
    for s in samples {
        let f = f0 + f_slope * (s.tau - tau0);
        let r: Vec4 = std::array::from_fn(|mu| s.x[mu] - center[mu] - f * p[mu]);
        let model = closed_form_radius(rep, metric, &first, s.tau - tau0)?;
        for mu in 0..4 {
            residual = residual.max((r[mu] - model[mu]).abs());
        }
        series.push((s.tau, r));
    }
    Ok(Decomposition {
        center,
        f_slope,
        radius_series: series,
        residual,
    })
}

fn reconstruct_state(rep: &RepMatrices, sample: &TrajectorySample) -> PhaseState {
    PhaseState::new(sample.x, sample.p, sample.xi.clone(), sample.lambda, rep.spin)
}

/// Angular frequency extracted from sign changes of a sampled scalar series,
/// with linear interpolation between samples. Returns `None` when fewer than
/// two crossings are present.
pub fn oscillation_frequency(series: &[(f64, f64)]) -> Option<f64> {
    let mut crossings = Vec::new();
    for w in series.windows(2) {
        let (t0, v0) = w[0];
        let (t1, v1) = w[1];
        if v0 == 0.0 {
            crossings.push(t0);
        } else if v0 * v1 < 0.0 {
            crossings.push(t0 + (t1 - t0) * v0 / (v0 - v1));
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    // consecutive zero crossings are half a period apart
    let span = crossings.last().unwrap() - crossings.first().unwrap();
    let half_periods = (crossings.len() - 1) as f64;
    Some(std::f64::consts::PI * half_periods / span)
}
