//! The `verify` subcommand: the cross-module property suite as one audit.

use num_complex::Complex64;

use zitter_core::dynamics::{
    integrate, zbw_period, ExactPropagator, IntegratorConfig, Method,
};
use zitter_core::linalg::CMat;
use zitter_core::metric::{dual4, dual4_complex, Metric};
use zitter_core::phase_space::{
    algebra_residuals, bracket, check_z_not_canonical, direct, observables_suite, PhaseState,
    StateSampler,
};
use zitter_core::radiation::free_radiation_report;
use zitter_core::repspace::{build_gammas, build_rep, SpinLabel};

use crate::output::{AuditReport, CheckKind};
use crate::CliError;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Run the property suite with `cases` sampled states per stochastic check.
pub fn execute(seed: u64, cases: usize) -> Result<AuditReport, CliError> {
    let metric = Metric::minkowski();
    let rep = build_rep(SpinLabel::half(), &metric).map_err(runtime)?;
    let mut audit = AuditReport::default();
    audit.field("seed", seed);
    audit.field("cases", cases);
    if cases == 0 {
        return Ok(audit); // empty report, success
    }

    // exact algebra of the gamma matrices
    let gammas = build_gammas();
    let mut clifford = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            let anti = &gammas.gamma[mu] * &gammas.gamma[nu] + &gammas.gamma[nu] * &gammas.gamma[mu];
            let expect =
                CMat::identity(4, 4) * c(2.0 * if mu == nu { metric.g(mu) } else { 0.0 }, 0.0);
            clifford = clifford.max((anti - expect).norm());
        }
    }
    audit.check("clifford_anticommutators", clifford, 0.0, CheckKind::UpperBound);

    // dual involution on the representation tensor
    let mut involution = 0.0f64;
    let dd = zitter_core::repspace::dual_matrix_tensor(&metric, &rep.beta_dual).map_err(runtime)?;
    for mu in 0..4 {
        for nu in 0..4 {
            involution = involution.max((&dd[mu][nu] + &rep.beta_tensor[mu][nu]).norm());
        }
    }
    audit.check("dual_involution", involution, 1e-13, CheckKind::UpperBound);
    // and on a numeric tensor
    let mut t = [[0.0; 4]; 4];
    t[1][2] = 1.0;
    t[2][1] = -1.0;
    let num_dd = dual4(&metric, &dual4(&metric, &t).map_err(runtime)?).map_err(runtime)?;
    let mut num_res = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            num_res = num_res.max((num_dd[mu][nu] + t[mu][nu]).abs());
        }
    }
    audit.check("dual_involution_numeric", num_res, 1e-13, CheckKind::UpperBound);

    // bracket algebra, engine vs direct contraction
    let mut sampler = StateSampler::new(rep.spin, seed).with_rapidity(1.2);
    let report = algebra_residuals(&rep, &metric, &mut sampler, cases, 1e-9);
    for chk in &report.checks {
        let name = match chk.name.as_str() {
            "{W,W} = eps p W" => "bracket_ww",
            "{W,r} = eps p r" => "bracket_wr",
            _ => "bracket_rr",
        };
        audit.check(name, chk.max_residual, 1e-9, CheckKind::UpperBound);
    }

    // identity suite at sampled states
    let mut recon = 0.0f64;
    let mut norm_identity = 0.0f64;
    let mut orthogonality = 0.0f64;
    let mut dual_constant = 0.0f64;
    let mut reality = 0.0f64;
    let mut sampler2 = StateSampler::new(rep.spin, seed.wrapping_add(1)).with_rapidity(1.0);
    for _ in 0..cases {
        let state = sampler2.sample(&rep, &metric);
        let s = direct::spin_tensor(&rep, &state);
        let r = direct::radius(&rep, &metric, &state);
        let w = direct::pauli_lubansky(&rep, &metric, &state);
        let p2 = metric.dot(state.p, state.p);
        let pc: [Complex64; 4] = std::array::from_fn(|mu| c(state.p[mu], 0.0));
        let p_low = metric.lower(state.p);
        let w_low: [Complex64; 4] = std::array::from_fn(|mu| w[mu] * c(metric.g(mu), 0.0));
        orthogonality = orthogonality
            .max(metric.cdot(r, pc).norm())
            .max(metric.cdot(w, pc).norm());
        reality = reality
            .max(direct::max_im4(r))
            .max(direct::max_im4(w))
            .max(direct::max_im4(direct::velocity(&rep, &state)))
            .max(direct::hamiltonian(&rep, &metric, &state).im.abs());
        let s_dual = dual4_complex(&metric, &s).map_err(runtime)?;
        let mut half_ss = c(0.0, 0.0);
        let mut half_dual_ss = c(0.0, 0.0);
        for mu in 0..4 {
            for nu in 0..4 {
                let lower = c(0.5 * metric.g(mu) * metric.g(nu), 0.0);
                half_ss += s[mu][nu] * s[mu][nu] * lower;
                half_dual_ss += s_dual[mu][nu] * s[mu][nu] * lower;
                let mut eps_term = c(0.0, 0.0);
                for rho in 0..4 {
                    for sigma in 0..4 {
                        let eps = metric.epsilon_upper([mu, nu, rho, sigma]);
                        if eps != 0.0 {
                            eps_term += w_low[rho] * c(eps * p_low[sigma], 0.0);
                        }
                    }
                }
                recon = recon.max(
                    (s[mu][nu] + (r[mu] * pc[nu] - r[nu] * pc[mu]) - eps_term / c(p2, 0.0))
                        .norm(),
                );
            }
        }
        let w2 = metric.cdot(w, w);
        let r2 = metric.cdot(r, r);
        norm_identity =
            norm_identity.max((half_ss - (-w2 / c(p2, 0.0) + r2 * c(p2, 0.0))).norm());
        let wr = metric.cdot(w, r);
        if wr.norm() > 1e-3 {
            dual_constant = dual_constant.max((half_dual_ss / wr - c(2.0, 0.0)).norm());
        }
    }
    audit.check("spin_reconstruction", recon, 1e-10, CheckKind::UpperBound);
    audit.check("invariant_norm_identity", norm_identity, 1e-10, CheckKind::UpperBound);
    audit.check("orthogonality_r_w_to_p", orthogonality, 1e-10, CheckKind::UpperBound);
    audit.check("dual_invariant_constant_dev", dual_constant, 1e-9, CheckKind::UpperBound);
    audit.check("reality_residual", reality, 1e-12, CheckKind::UpperBound);

    // jacobi identity on nested brackets
    let set = observables_suite(&rep, &metric);
    let mut jacobi = 0.0f64;
    let mut sampler3 = StateSampler::new(rep.spin, seed.wrapping_add(2));
    for _ in 0..cases.min(5) {
        let state = sampler3.sample(&rep, &metric);
        let coords = state.coords(&rep, &metric);
        let triples = [
            [set.pauli_lubansky.at(1), set.pauli_lubansky.at(2), set.pauli_lubansky.at(3)],
            [set.pauli_lubansky.at(1), set.radius.at(2), set.radius.at(3)],
            [set.position.at(1), set.pauli_lubansky.at(2), set.radius.at(1)],
        ];
        for [a, b, cc] in triples {
            let total = bracket(a, &bracket(b, cc)).eval(&coords)
                + bracket(b, &bracket(cc, a)).eval(&coords)
                + bracket(cc, &bracket(a, b)).eval(&coords);
            jacobi = jacobi.max(total.norm());
        }
    }
    audit.check("jacobi_identity", jacobi, 1e-6, CheckKind::UpperBound);

    // hamilton-lagrange slope agreement
    let mut slope_dev = 0.0f64;
    let mut sampler4 = StateSampler::new(rep.spin, seed.wrapping_add(3));
    for _ in 0..cases.min(10) {
        let state = sampler4.sample(&rep, &metric);
        let coords = state.coords(&rep, &metric);
        let prop = ExactPropagator::new(&rep, &metric, &state).map_err(runtime)?;
        let h = 1e-4;
        let fwd = prop.state_at(h);
        let bwd = prop.state_at(-h);
        for mu in 0..4 {
            let slope = (direct::radius(&rep, &metric, &fwd)[mu].re
                - direct::radius(&rep, &metric, &bwd)[mu].re)
                / (2.0 * h);
            let via = bracket(set.radius.at(mu), &set.hamiltonian).eval(&coords);
            slope_dev = slope_dev.max((via.re - slope).abs());
        }
    }
    audit.check("hamilton_lagrange_slopes", slope_dev, 1e-6, CheckKind::UpperBound);

    // integrator agreement and convergence order on a mixed state
    let inv = 1.0 / 2f64.sqrt();
    let xi = nalgebra::DVector::from_vec(vec![c(inv, 0.0), c(0.0, 0.0), c(0.0, inv), c(0.0, 0.0)]);
    let mixed = PhaseState::new([0.0; 4], [1.0, 0.0, 0.0, 0.0], xi, 1.0, rep.spin);
    let period = zbw_period(&rep, &metric, &mixed);
    let cfg = IntegratorConfig {
        method: Method::Rk4,
        dt: period / 1e4,
        tau_end: period,
        stride: 500,
    };
    let rk = integrate(&rep, &metric, &mixed, &cfg).map_err(runtime)?;
    let exact = integrate(
        &rep,
        &metric,
        &mixed,
        &IntegratorConfig {
            method: Method::ExactPropagator,
            ..cfg
        },
    )
    .map_err(runtime)?;
    let mut max_dx = 0.0f64;
    for (a, b) in rk.iter().zip(&exact) {
        for mu in 0..4 {
            max_dx = max_dx.max((a.x[mu] - b.x[mu]).abs());
        }
    }
    audit.check("integrator_agreement", max_dx, 1e-6, CheckKind::UpperBound);

    let prop = ExactPropagator::new(&rep, &metric, &mixed).map_err(runtime)?;
    let err_at = |steps: f64| -> Result<f64, CliError> {
        let cfg = IntegratorConfig {
            method: Method::Rk4,
            dt: period / steps,
            tau_end: period,
            stride: usize::MAX,
        };
        let last = integrate(&rep, &metric, &mixed, &cfg)
            .map_err(runtime)?
            .pop()
            .unwrap();
        let reference = prop.state_at(last.tau);
        let mut err = (last.xi.clone() - &reference.xi).norm();
        for mu in 0..4 {
            err = err.max((last.x[mu] - reference.x[mu]).abs());
        }
        Ok(err)
    };
    let factor = err_at(200.0)? / err_at(400.0)?;
    audit.check("rk4_convergence_factor_low", factor, 12.0, CheckKind::LowerBound);
    audit.check("rk4_convergence_factor_high", factor, 20.0, CheckKind::UpperBound);

    // no-radiation triad on sampled mixed states
    let mut sampler5 = StateSampler::new(rep.spin, seed.wrapping_add(4)).with_rapidity(1.0);
    let mut triad_ok = true;
    for _ in 0..cases.min(25) {
        let state = sampler5.sample(&rep, &metric);
        let rad = free_radiation_report(&rep, &metric, &state, 1.0, 16).map_err(runtime)?;
        let no_rate = rad.max_radiated_rate < 1e-18;
        let pure = rad.purity > 1.0 - 1e-9;
        let no_radius = rad.max_radius < 1e-10;
        triad_ok &= no_rate == pure && pure == no_radius;
    }
    audit.check(
        "no_radiation_triad_agreement",
        if triad_ok { 0.0 } else { 1.0 },
        0.0,
        CheckKind::UpperBound,
    );

    // z = x - r fails canonicality at the pinned generic state
    let xi = nalgebra::DVector::from_vec(vec![c(0.9, 0.0), c(0.1, 0.2), c(0.0, 0.35), c(0.1, 0.0)]);
    let xi = xi.clone() / c(xi.norm(), 0.0);
    let z_state = PhaseState::new([0.1, -0.2, 0.3, 0.0], [1.0, 0.0, 0.0, 0.0], xi, 1.0, rep.spin);
    let z_max = check_z_not_canonical(&rep, &metric, &z_state);
    audit.check("noncanonical_z_magnitude", z_max, 1e-3, CheckKind::LowerBound);

    Ok(audit)
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}
