//! Minimal coupling p -> p - e A(x): analytic field profiles, the modified
//! equations of motion, and interaction diagnostics.
//!
//! The substituted Lagrangian is linear in the velocities, so the modified
//! equations follow by varying each coordinate independently:
//!
//! * varying p:    dx^mu/dtau = xi-bar beta^mu xi                 (unchanged)
//! * varying x:    dp_mu/dtau = e (d_mu A_nu)(x) dx^nu/dtau
//! * varying xi-bar: i lambda dxi/dtau = beta.(p - e A(x)) xi
//!
//! Canonical momentum p and kinetic momentum pi = p - e A differ during the
//! interaction; pi obeys the Lorentz-force form dpi_mu/dtau = e F_{mu nu}
//! dx^nu with F_{mu nu} = d_mu A_nu - d_nu A_mu, and gauge-covariant
//! observables (radius, eigen splitting) are evaluated at pi. A fuller
//! walk-through of the derivation lives in docs/em_equations.md.

use num_complex::Complex64;

use crate::dynamics::{rk4_path, steps_for, Derivs, IntegratorConfig, TrajectorySample};
use crate::error::{Error, Result};
use crate::metric::{Metric, Vec4};
use crate::phase_space::{direct, CoordLayout, Observable, PhaseState};
use crate::radiation::eigen_split;
use crate::repspace::RepMatrices;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// External potential profile. Only analytic profiles ship, so gradients are
/// exact.
#[derive(Debug, Clone)]
pub enum FieldKind {
    None,
    /// Constant field-strength tensor F_{mu nu} (lower indices), realized by
    /// A_nu(x) = -(1/2) F_{nu rho} x^rho.
    UniformF { f: [[f64; 4]; 4] },
    /// A_nu(x) = a_nu cos(k.x) with lightlike k and transverse amplitude.
    PlaneWave {
        /// a^mu (upper index).
        amplitude: Vec4,
        /// k^mu (upper index), k.k = 0.
        wave_vector: Vec4,
    },
}

#[derive(Debug, Clone)]
pub struct FieldConfig {
    pub kind: FieldKind,
    pub charge: f64,
    /// Constant added to A_nu (lower index): the pure-gauge shift generated
    /// by chi(x) = c.x. Physics is unchanged; the canonical momentum moves by
    /// e c while the kinetic momentum does not.
    pub gauge_offset: Vec4,
}

impl FieldConfig {
    pub fn free() -> Self {
        FieldConfig {
            kind: FieldKind::None,
            charge: 0.0,
            gauge_offset: [0.0; 4],
        }
    }

    pub fn new(kind: FieldKind, charge: f64) -> Self {
        FieldConfig {
            kind,
            charge,
            gauge_offset: [0.0; 4],
        }
    }

    pub fn validate(&self, metric: &Metric) -> Result<()> {
        match &self.kind {
            FieldKind::None => Ok(()),
            FieldKind::UniformF { f } => {
                let scale = f.iter().flatten().map(|v| v.abs()).fold(0.0f64, f64::max);
                for mu in 0..4 {
                    for nu in 0..4 {
                        if (f[mu][nu] + f[nu][mu]).abs() > 1e-12 * (1.0 + scale) {
                            return Err(Error::BadConfig(
                                "uniform field tensor must be antisymmetric".into(),
                            ));
                        }
                    }
                }
                Ok(())
            }
            FieldKind::PlaneWave {
                amplitude,
                wave_vector,
            } => {
                let k2 = metric.dot(*wave_vector, *wave_vector);
                let scale = wave_vector.iter().map(|v| v * v).sum::<f64>();
                if k2.abs() > 1e-10 * (1.0 + scale) {
                    return Err(Error::BadConfig(format!(
                        "plane wave vector must be lightlike, k.k = {k2:.3e}"
                    )));
                }
                let ka = metric.dot(*wave_vector, *amplitude);
                if ka.abs() > 1e-10 {
                    return Err(Error::BadConfig(format!(
                        "plane wave must be transverse, k.a = {ka:.3e}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// A_nu(x), lower index.
    pub fn potential(&self, metric: &Metric, x: Vec4) -> Vec4 {
        let base: Vec4 = match &self.kind {
            FieldKind::None => [0.0; 4],
            FieldKind::UniformF { f } => {
                std::array::from_fn(|nu| -0.5 * (0..4).map(|rho| f[nu][rho] * x[rho]).sum::<f64>())
            }
            FieldKind::PlaneWave {
                amplitude,
                wave_vector,
            } => {
                let phase = metric.dot(*wave_vector, x);
                let a_low = metric.lower(*amplitude);
                std::array::from_fn(|nu| a_low[nu] * phase.cos())
            }
        };
        std::array::from_fn(|nu| base[nu] + self.gauge_offset[nu])
    }

    /// d_mu A_nu (both indices lower).
    pub fn potential_grad(&self, metric: &Metric, x: Vec4) -> [[f64; 4]; 4] {
        match &self.kind {
            FieldKind::None => [[0.0; 4]; 4],
            FieldKind::UniformF { f } => std::array::from_fn(|mu| {
                std::array::from_fn(|nu| 0.5 * f[mu][nu])
            }),
            FieldKind::PlaneWave {
                amplitude,
                wave_vector,
            } => {
                let phase = metric.dot(*wave_vector, x);
                let a_low = metric.lower(*amplitude);
                let k_low = metric.lower(*wave_vector);
                std::array::from_fn(|mu| {
                    std::array::from_fn(|nu| -a_low[nu] * k_low[mu] * phase.sin())
                })
            }
        }
    }

    /// Kinetic momentum pi^mu = p^mu - e A^mu(x).
    pub fn kinetic_momentum(&self, metric: &Metric, state: &PhaseState) -> Vec4 {
        let a_up = metric.raise(self.potential(metric, state.x));
        std::array::from_fn(|mu| state.p[mu] - self.charge * a_up[mu])
    }
}

/// Minimally-coupled equations of motion (canonical-momentum form).
pub fn eom_em(
    rep: &RepMatrices,
    metric: &Metric,
    state: &PhaseState,
    field: &FieldConfig,
) -> Result<Derivs> {
    if state.lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    field.validate(metric)?;
    let dx = direct::re4(direct::velocity(rep, state));
    let grad = field.potential_grad(metric, state.x);
    let dp_low: Vec4 = std::array::from_fn(|mu| {
        field.charge * (0..4).map(|nu| grad[mu][nu] * dx[nu]).sum::<f64>()
    });
    let pi = field.kinetic_momentum(metric, state);
    let dxi = rep.beta_dot(pi) * &state.xi * c(0.0, -1.0 / state.lambda);
    Ok(Derivs {
        dx,
        dp: metric.raise(dp_low),
        dxi,
    })
}

/// One row of the interaction diagnostic series.
#[derive(Debug, Clone)]
pub struct InteractionRow {
    pub tau: f64,
    /// Instantaneous Minkowski magnitude sqrt(-r.r) of the radius, with the
    /// kinetic momentum substituted into the radius definition.
    pub radius_norm: f64,
    /// Purity of the beta.pi eigen split.
    pub purity: f64,
    pub kinetic_p: Vec4,
    pub canonical_p: Vec4,
}

#[derive(Debug, Clone)]
pub struct InteractionReport {
    pub rows: Vec<InteractionRow>,
}

/// Integrate the coupled equations with RK4. Samples carry the derived
/// observables evaluated at the kinetic momentum; the report tracks the
/// radius envelope and purity alongside both momenta.
pub fn integrate_em(
    rep: &RepMatrices,
    metric: &Metric,
    state: &PhaseState,
    field: &FieldConfig,
    cfg: &IntegratorConfig,
) -> Result<(Vec<TrajectorySample>, InteractionReport)> {
    cfg.validate()?;
    field.validate(metric)?;
    state.validate(rep, metric)?;
    if state.lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    if cfg.method != crate::dynamics::Method::Rk4 {
        return Err(Error::BadConfig(
            "the coupled system has no exact propagator; use rk4".into(),
        ));
    }

    let template = state.clone();
    let deriv = |y: &[f64]| -> Vec<f64> {
        let s = unpack(&template, y);
        // validation already done; inline the derivative for speed
        let dx = direct::re4(direct::velocity(rep, &s));
        let grad = field.potential_grad(metric, s.x);
        let dp_low: Vec4 = std::array::from_fn(|mu| {
            field.charge * (0..4).map(|nu| grad[mu][nu] * dx[nu]).sum::<f64>()
        });
        let dp = metric.raise(dp_low);
        let pi = field.kinetic_momentum(metric, &s);
        let dxi = rep.beta_dot(pi) * &s.xi * c(0.0, -1.0 / s.lambda);
        let d = s.xi.len();
        let mut dy = vec![0.0; 8 + 2 * d];
        dy[0..4].copy_from_slice(&dx);
        dy[4..8].copy_from_slice(&dp);
        for a in 0..d {
            dy[8 + a] = dxi[a].re;
            dy[8 + d + a] = dxi[a].im;
        }
        dy
    };

    let mut samples = Vec::new();
    let mut rows = Vec::new();
    rk4_path(
        pack(state),
        cfg.dt,
        steps_for(cfg),
        cfg.stride,
        deriv,
        |step, y| {
            let tau = step as f64 * cfg.dt;
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::StepUnstable(tau));
            }
            let s = unpack(&template, y);
            let pi = field.kinetic_momentum(metric, &s);
            let pi2 = metric.dot(pi, pi);
            if pi2 <= 0.0 {
                return Err(Error::StepUnstable(tau));
            }
            // gauge-covariant observables: same state, kinetic momentum
            let mut kin = s.clone();
            kin.p = pi;
            let mut sample = TrajectorySample::from_state(rep, metric, tau, &kin);
            sample.p = s.p; // keep the canonical momentum in the sample
            let r = sample.radius;
            rows.push(InteractionRow {
                tau,
                radius_norm: (-metric.dot(r, r)).max(0.0).sqrt(),
                purity: eigen_split(rep, metric, &kin)?.purity,
                kinetic_p: pi,
                canonical_p: s.p,
            });
            samples.push(sample);
            Ok(())
        },
    )?;
    Ok((samples, InteractionReport { rows }))
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
    s.xi = nalgebra::DVector::from_iterator(d, (0..d).map(|a| c(y[8 + a], y[8 + d + a])));
    s
}

/// H_em = xi-bar beta^mu (p_mu - e A_mu(x)) xi as a bracket-ready observable,
/// for the uniform-field profile (the potential is polynomial in x there).
pub fn hamiltonian_em_uniform(
    rep: &RepMatrices,
    metric: &Metric,
    f: &[[f64; 4]; 4],
    charge: f64,
) -> Observable {
    let layout = CoordLayout::new(rep.dim());
    let mut acc = Observable::constant(layout, c(0.0, 0.0));
    for mu in 0..4 {
        let bil = Observable::bilinear(layout, rep.beta[mu].clone(), format!("eta.beta{mu}.xi"));
        // p_mu - e A_mu(x) with A_mu = -(1/2) F_{mu rho} x^rho
        let mut coupling = Observable::coordinate(layout, layout.p(mu), format!("p_{mu}"));
        for rho in 0..4 {
            if f[mu][rho] != 0.0 {
                let x_rho = Observable::coordinate(layout, layout.x(rho), format!("x^{rho}"));
                coupling = &coupling + &x_rho.scaled(c(0.5 * charge * f[mu][rho], 0.0));
            }
        }
        acc = &acc + &(&bil * &coupling);
    }
    let lam = Observable::coordinate(layout, layout.lambda(), "lambda");
    let _ = metric;
    (&acc.scaled(c(0.0, -1.0)) / &lam).with_label("H_em")
}

/// Spinless Lorentz-force reference: RK4 for dx = pi/sqrt(pi.pi),
/// dpi_mu = e F_{mu nu} dx^nu in a uniform field, used as the oracle that
/// the coupled kinetic momentum tracks when zitterbewegung is negligible.
pub fn lorentz_force_oracle(
    metric: &Metric,
    x0: Vec4,
    pi0: Vec4,
    f: &[[f64; 4]; 4],
    charge: f64,
    dt: f64,
    n_steps: usize,
    stride: usize,
) -> Result<Vec<(f64, Vec4, Vec4)>> {
    let mut y0 = Vec::with_capacity(8);
    y0.extend_from_slice(&x0);
    y0.extend_from_slice(&pi0);
    let deriv = |y: &[f64]| -> Vec<f64> {
        let pi: Vec4 = [y[4], y[5], y[6], y[7]];
        let norm = metric.dot(pi, pi).sqrt();
        let u: Vec4 = std::array::from_fn(|mu| pi[mu] / norm);
        let dpi_low: Vec4 = std::array::from_fn(|mu| {
            charge * (0..4).map(|nu| f[mu][nu] * u[nu]).sum::<f64>()
        });
        let dpi = metric.raise(dpi_low);
        vec![u[0], u[1], u[2], u[3], dpi[0], dpi[1], dpi[2], dpi[3]]
    };
    let mut out = Vec::new();
    rk4_path(y0, dt, n_steps, stride, deriv, |step, y| {
        out.push((
            step as f64 * dt,
            [y[0], y[1], y[2], y[3]],
            [y[4], y[5], y[6], y[7]],
        ));
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{eom, integrate, zbw_period, Method};
    use crate::phase_space::bracket;
    use crate::phase_space::observables_suite;
    use crate::radiation::eigenbasis;
    use crate::repspace::{build_rep, SpinLabel};
    use nalgebra::DVector;
    use std::f64::consts::PI;

    fn setup() -> (RepMatrices, Metric) {
        let metric = Metric::minkowski();
        let rep = build_rep(SpinLabel::half(), &metric).unwrap();
        (rep, metric)
    }

    fn mixed_rest_state(rep: &RepMatrices) -> PhaseState {
        let inv = 1.0 / 2f64.sqrt();
        let xi = DVector::from_vec(vec![c(inv, 0.0), c(0.0, 0.0), c(0.0, inv), c(0.0, 0.0)]);
        PhaseState::new([0.0; 4], [1.0, 0.0, 0.0, 0.0], xi, 1.0, rep.spin)
    }

    fn rest_eigenstate(rep: &RepMatrices, metric: &Metric) -> PhaseState {
        let modes = eigenbasis(rep, metric, [1.0, 0.0, 0.0, 0.0]).unwrap();
        PhaseState::new(
            [0.0; 4],
            [1.0, 0.0, 0.0, 0.0],
            modes[0].vector.clone(),
            1.0,
            rep.spin,
        )
    }

    fn electric_field(e_strength: f64, charge: f64) -> FieldConfig {
        let mut f = [[0.0; 4]; 4];
        f[0][1] = e_strength;
        f[1][0] = -e_strength;
        FieldConfig::new(FieldKind::UniformF { f }, charge)
    }

    #[test]
    fn validation_rejects_bad_fields() {
        let metric = Metric::minkowski();
        let mut f = [[0.0; 4]; 4];
        f[0][1] = 1.0;
        f[1][0] = 1.0; // symmetric: invalid
        assert!(matches!(
            FieldConfig::new(FieldKind::UniformF { f }, 1.0).validate(&metric),
            Err(Error::BadConfig(_))
        ));
        let timelike_k = FieldConfig::new(
            FieldKind::PlaneWave {
                amplitude: [0.0, 0.1, 0.0, 0.0],
                wave_vector: [1.0, 0.0, 0.0, 0.0],
            },
            1.0,
        );
        assert!(matches!(timelike_k.validate(&metric), Err(Error::BadConfig(_))));
        let longitudinal = FieldConfig::new(
            FieldKind::PlaneWave {
                amplitude: [0.0, 0.0, 0.0, 1.0],
                wave_vector: [1.0, 0.0, 0.0, 1.0],
            },
            1.0,
        );
        assert!(matches!(longitudinal.validate(&metric), Err(Error::BadConfig(_))));
        let good = FieldConfig::new(
            FieldKind::PlaneWave {
                amplitude: [0.0, 0.1, -0.2, 0.0],
                wave_vector: [1.3, 0.0, 0.0, 1.3],
            },
            1.0,
        );
        good.validate(&metric).unwrap();
    }

    #[test]
    fn zero_charge_reduces_to_free_eom() {
        let (rep, metric) = setup();
        let state = mixed_rest_state(&rep);
        let field = electric_field(0.5, 0.0);
        let coupled = eom_em(&rep, &metric, &state, &field).unwrap();
        let free = eom(&rep, &state).unwrap();
        assert_eq!(coupled.dx, free.dx);
        assert_eq!(coupled.dp, [0.0; 4]);
        assert!((coupled.dxi - free.dxi).norm() == 0.0);
    }

    #[test]
    fn uniform_field_gradient_realizes_tensor() {
        // d_mu A_nu - d_nu A_mu must reproduce the configured F exactly
        let metric = Metric::minkowski();
        let mut f = [[0.0; 4]; 4];
        for (mu, nu, v) in [(0, 1, 0.3), (1, 2, -0.7), (2, 3, 0.2)] {
            f[mu][nu] = v;
            f[nu][mu] = -v;
        }
        let field = FieldConfig::new(FieldKind::UniformF { f }, 1.0);
        let grad = field.potential_grad(&metric, [0.4, -0.2, 1.0, 0.3]);
        for mu in 0..4 {
            for nu in 0..4 {
                assert!((grad[mu][nu] - grad[nu][mu] - f[mu][nu]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn kinetic_momentum_obeys_lorentz_force_form() {
        // dpi_mu/dtau = e F_{mu nu} xdot^nu, assembled from dp and dA
        let (rep, metric) = setup();
        let mut f = [[0.0; 4]; 4];
        f[0][1] = 0.11;
        f[1][0] = -0.11;
        f[1][2] = -0.23;
        f[2][1] = 0.23;
        let field = FieldConfig::new(FieldKind::UniformF { f }, 0.8);
        let mut state = mixed_rest_state(&rep);
        state.x = [0.3, -0.1, 0.2, 0.5];
        state.p = [1.3, 0.2, -0.1, 0.3];
        let d = eom_em(&rep, &metric, &state, &field).unwrap();
        // dpi_mu = dp_mu - e (dA_mu/dtau) = dp_mu - e (d_nu A_mu) xdot^nu
        let grad = field.potential_grad(&metric, state.x);
        let dp_low = metric.lower(d.dp);
        let dpi_low: Vec4 = std::array::from_fn(|mu| {
            dp_low[mu] - field.charge * (0..4).map(|nu| grad[nu][mu] * d.dx[nu]).sum::<f64>()
        });
        for mu in 0..4 {
            let lorentz: f64 =
                field.charge * (0..4).map(|nu| f[mu][nu] * d.dx[nu]).sum::<f64>();
            assert!((dpi_low[mu] - lorentz).abs() < 1e-13);
        }
    }

    #[test]
    fn momentum_rate_matches_bracket_with_coupled_hamiltonian() {
        // dp_mu = {p_mu, H_em} at random states, engine vs direct
        let (rep, metric) = setup();
        let mut sampler = crate::phase_space::StateSampler::new(rep.spin, 7).with_rapidity(0.8);
        let mut f = [[0.0; 4]; 4];
        f[0][1] = 0.17;
        f[1][0] = -0.17;
        f[2][3] = 0.05;
        f[3][2] = -0.05;
        let charge = 0.6;
        let field = FieldConfig::new(FieldKind::UniformF { f }, charge);
        let h_em = hamiltonian_em_uniform(&rep, &metric, &f, charge);
        let layout = crate::phase_space::CoordLayout::new(rep.dim());
        for _ in 0..10 {
            let state = sampler.sample(&rep, &metric);
            let coords = state.coords(&rep, &metric);
            let d = eom_em(&rep, &metric, &state, &field).unwrap();
            let dp_low = metric.lower(d.dp);
            for mu in 0..4 {
                let p_mu = crate::phase_space::Observable::coordinate(
                    layout,
                    layout.p(mu),
                    format!("p_{mu}"),
                );
                let via_bracket = bracket(&p_mu, &h_em).eval(&coords);
                assert!(
                    (via_bracket - c(dp_low[mu], 0.0)).norm() < 1e-9 * (1.0 + dp_low[mu].abs()),
                    "mu={mu}: bracket {via_bracket} vs eom {}",
                    dp_low[mu]
                );
            }
            // and the coupled Hamiltonian reduces to the free one at e = 0
            let h_free = observables_suite(&rep, &metric).hamiltonian;
            let h0 = hamiltonian_em_uniform(&rep, &metric, &f, 0.0);
            let a = h0.eval(&coords);
            let b = h_free.eval(&coords);
            assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn free_limit_matches_free_integrator() {
        let (rep, metric) = setup();
        let state = mixed_rest_state(&rep);
        let period = zbw_period(&rep, &metric, &state);
        let cfg = IntegratorConfig {
            method: Method::Rk4,
            dt: period / 512.0,
            tau_end: 10.0 * period,
            stride: 64,
        };
        let field = electric_field(0.4, 0.0); // charge zero
        let (samples, report) = integrate_em(&rep, &metric, &state, &field, &cfg).unwrap();
        let free = integrate(&rep, &metric, &state, &cfg).unwrap();
        assert_eq!(samples.len(), free.len());
        for (a, b) in samples.iter().zip(&free) {
            for mu in 0..4 {
                assert!((a.x[mu] - b.x[mu]).abs() < 1e-10);
                assert!((a.radius[mu] - b.radius[mu]).abs() < 1e-10);
            }
        }
        // amplitude and purity series match the free run
        let free_norms: Vec<f64> = free
            .iter()
            .map(|s| (-metric.dot(s.radius, s.radius)).max(0.0).sqrt())
            .collect();
        for ((row, fr), fs) in report.rows.iter().zip(&free_norms).zip(&free) {
            assert!((row.radius_norm - fr).abs() < 1e-10);
            let st = PhaseState::new(fs.x, fs.p, fs.xi.clone(), fs.lambda, rep.spin);
            let free_purity = eigen_split(&rep, &metric, &st).unwrap().purity;
            assert!((row.purity - free_purity).abs() < 1e-10);
        }
    }

    #[test]
    fn purity_decays_from_eigenstate_under_uniform_field() {
        let (rep, metric) = setup();
        let state = rest_eigenstate(&rep, &metric);
        let field = electric_field(2e-2, 1.0);
        let period = zbw_period(&rep, &metric, &state);
        let cfg = IntegratorConfig {
            method: Method::Rk4,
            dt: period / 1000.0,
            tau_end: period / 2.0,
            stride: 50,
        };
        let (_, report) = integrate_em(&rep, &metric, &state, &field, &cfg).unwrap();
        assert!((report.rows[0].purity - 1.0).abs() < 1e-12);
        // monotone decay over the first half period, then a finite dip
        for w in report.rows.windows(2) {
            assert!(
                w[1].purity <= w[0].purity + 1e-12,
                "purity grew: {} -> {}",
                w[0].purity,
                w[1].purity
            );
        }
        let last = report.rows.last().unwrap();
        assert!(last.purity < 1.0 - 1e-5, "purity barely moved: {}", last.purity);
        // the radius amplitude grows from zero as the field feeds it
        assert!(report.rows[0].radius_norm < 1e-14);
        assert!(last.radius_norm > 1e-3);
    }

    #[test]
    fn gauge_shift_moves_canonical_momentum_only() {
        let (rep, metric) = setup();
        let state = mixed_rest_state(&rep);
        let mut f = [[0.0; 4]; 4];
        f[0][1] = 0.03;
        f[1][0] = -0.03;
        let charge = 0.7;
        let gauge_a = FieldConfig::new(FieldKind::UniformF { f }, charge);
        let shift = [0.11, -0.07, 0.02, 0.05]; // lower-index constant
        let mut gauge_b = gauge_a.clone();
        gauge_b.gauge_offset = shift;
        // same kinetic data: canonical p moves by e * g^{mu nu} shift_nu
        let mut state_b = state.clone();
        let shift_up = metric.raise(shift);
        for mu in 0..4 {
            state_b.p[mu] += charge * shift_up[mu];
        }
        let period = zbw_period(&rep, &metric, &state);
        let cfg = IntegratorConfig {
            method: Method::Rk4,
            dt: period / 400.0,
            tau_end: period,
            stride: 20,
        };
        let (sa, ra) = integrate_em(&rep, &metric, &state, &gauge_a, &cfg).unwrap();
        let (sb, rb) = integrate_em(&rep, &metric, &state_b, &gauge_b, &cfg).unwrap();
        for ((a, b), (rowa, rowb)) in sa.iter().zip(&sb).zip(ra.rows.iter().zip(&rb.rows)) {
            for mu in 0..4 {
                assert!((a.x[mu] - b.x[mu]).abs() < 1e-8, "x diverged");
                assert!(
                    (rowb.canonical_p[mu] - rowa.canonical_p[mu] - charge * shift_up[mu]).abs()
                        < 1e-8
                );
                assert!((rowa.kinetic_p[mu] - rowb.kinetic_p[mu]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn plane_wave_keeps_zbw_frequency() {
        let (rep, metric) = setup();
        let state = mixed_rest_state(&rep);
        let field = FieldConfig::new(
            FieldKind::PlaneWave {
                amplitude: [0.0, 0.01, 0.0, 0.0],
                wave_vector: [1.0, 0.0, 0.0, 1.0],
            },
            1.0,
        );
        let period = zbw_period(&rep, &metric, &state);
        let cfg = IntegratorConfig {
            method: Method::Rk4,
            dt: period / 500.0,
            tau_end: 10.0 * period,
            stride: 5,
        };
        let (samples, report) = integrate_em(&rep, &metric, &state, &field, &cfg).unwrap();
        let series: Vec<(f64, f64)> = samples.iter().map(|s| (s.tau, s.radius[3])).collect();
        let omega = crate::dynamics::oscillation_frequency(&series).unwrap();
        let mid = &report.rows[report.rows.len() / 2];
        let pi2 = metric.dot(mid.kinetic_p, mid.kinetic_p);
        let expected = pi2.sqrt() / (state.lambda * rep.spin.s());
        assert!(
            (omega - expected).abs() / expected < 0.01,
            "omega {omega} vs sqrt(pi^2)/(lambda s) {expected}"
        );
    }

    #[test]
    fn charge_to_zero_continuity_is_linear() {
        let (rep, metric) = setup();
        let state = mixed_rest_state(&rep);
        let period = zbw_period(&rep, &metric, &state);
        let cfg = IntegratorConfig {
            method: Method::Rk4,
            dt: period / 800.0,
            tau_end: period,
            stride: usize::MAX,
        };
        let err_for = |charge: f64| {
            let field = electric_field(1.0, charge);
            let (s, _) = integrate_em(&rep, &metric, &state, &field, &cfg).unwrap();
            let free = integrate(&rep, &metric, &state, &cfg).unwrap();
            let a = s.last().unwrap();
            let b = free.last().unwrap();
            (0..4)
                .map(|mu| (a.x[mu] - b.x[mu]).abs())
                .fold(0.0f64, f64::max)
        };
        let e_full = err_for(0.02);
        let e_half = err_for(0.01);
        assert!(e_full > 1e-6, "field too weak to measure");
        let ratio = e_full / e_half;
        assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn indefinite_norm_is_conserved_by_coupling() {
        let (rep, metric) = setup();
        let state = mixed_rest_state(&rep);
        let field = electric_field(0.3, 0.9);
        let period = zbw_period(&rep, &metric, &state);
        let cfg = IntegratorConfig {
            method: Method::Rk4,
            dt: period / 600.0,
            tau_end: 3.0 * period,
            stride: 30,
        };
        let (samples, _) = integrate_em(&rep, &metric, &state, &field, &cfg).unwrap();
        let n0 = rep.indefinite_norm(&state.xi);
        for s in &samples {
            assert!((rep.indefinite_norm(&s.xi) - n0).abs() < 1e-10);
        }
    }

    #[test]
    fn kinetic_momentum_tracks_lorentz_oracle() {
        // eigenstate start in a weak magnetic field: the kinetic momentum
        // follows the spinless Lorentz-force trajectory up to feed-in of the
        // zitterbewegung amplitude measured along the run.
        let (rep, metric) = setup();
        let b = 5e-3;
        let mut f = [[0.0; 4]; 4];
        f[1][2] = b;
        f[2][1] = -b;
        let field = FieldConfig::new(FieldKind::UniformF { f }, 1.0);
        let p0 = [(1.0f64 + 0.09).sqrt(), 0.3, 0.0, 0.0];
        let modes = eigenbasis(&rep, &metric, p0).unwrap();
        let state = PhaseState::new([0.0; 4], p0, modes[0].vector.clone(), 1.0, rep.spin);
        let period = std::f64::consts::PI;
        let n_periods = 20.0;
        let dt = period / 500.0;
        let cfg = IntegratorConfig {
            method: Method::Rk4,
            dt,
            tau_end: n_periods * period,
            stride: 50,
        };
        let (_, report) = integrate_em(&rep, &metric, &state, &field, &cfg).unwrap();
        let oracle = lorentz_force_oracle(
            &metric,
            [0.0; 4],
            p0,
            &f,
            1.0,
            dt,
            (n_periods * 500.0) as usize,
            50,
        )
        .unwrap();
        assert_eq!(report.rows.len(), oracle.len());
        let max_radius = report
            .rows
            .iter()
            .map(|r| r.radius_norm)
            .fold(0.0f64, f64::max);
        let omega = 2.0; // sqrt(p^2)/(lambda s) with m = lambda = 1, s = 1/2
        let tolerance = 5.0 * field.charge * b * (n_periods * period) * omega * max_radius + 1e-9;
        for (row, (tau, _, pi_oracle)) in report.rows.iter().zip(&oracle) {
            assert!((row.tau - tau).abs() < 1e-12);
            for mu in 0..4 {
                assert!(
                    (row.kinetic_p[mu] - pi_oracle[mu]).abs() < tolerance,
                    "tau {tau}: pi {:?} vs oracle {:?} (tol {tolerance:.2e})",
                    row.kinetic_p,
                    pi_oracle
                );
            }
        }
        assert!(max_radius < 5e-3, "eigenstate zbw grew unexpectedly: {max_radius}");
    }

    #[test]
    fn exact_method_is_rejected_for_coupled_runs() {
        let (rep, metric) = setup();
        let state = mixed_rest_state(&rep);
        let field = electric_field(0.1, 1.0);
        let cfg = IntegratorConfig {
            method: Method::ExactPropagator,
            dt: 0.01,
            tau_end: 1.0,
            stride: 1,
        };
        assert!(matches!(
            integrate_em(&rep, &metric, &state, &field, &cfg),
            Err(Error::BadConfig(_))
        ));
    }
}
