//! The named observables of the spinning-particle phase space, both as
//! bracket-ready expression trees and as plain direct evaluators.
//!
//! The two code paths are kept deliberately independent: the trees evaluate
//! through the automatic-differentiation engine in eta-form (spinor momentum
//! as an explicit coordinate), the direct evaluators contract matrices with
//! xi-bar = xi^dagger parity. Verification suites compare them.

use num_complex::Complex64;

use crate::linalg::CMat;
use crate::metric::{CVec4, Metric, Vec4};
use crate::repspace::RepMatrices;

use super::observable::{Observable, Symmetry, TensorObservable};
use super::{CoordLayout, PhaseState};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The named physical observables over one representation.
#[derive(Debug, Clone)]
pub struct ObservableSet {
    /// u^mu = xi-bar beta^mu xi (the velocity).
    pub velocity: TensorObservable,
    /// S^{mu nu} = -lambda s xi-bar beta^{mu nu} xi.
    pub spin_tensor: TensorObservable,
    /// W^mu = lambda s xi-bar beta*^{mu nu} xi p_nu.
    pub pauli_lubansky: TensorObservable,
    /// r^mu = (lambda s / p^2) xi-bar beta^{mu nu} xi p_nu.
    pub radius: TensorObservable,
    /// X^mu = (1/p^2) J^{mu nu} p_nu (conserved center).
    pub center: TensorObservable,
    /// L^{mu nu} = x^mu p^nu - x^nu p^mu.
    pub orbital: TensorObservable,
    /// J = L + S.
    pub total_angular: TensorObservable,
    /// z^mu = x^mu - r^mu (the non-canonical displaced coordinate).
    pub shifted_position: TensorObservable,
    /// x^mu as observables, for bracket tests.
    pub position: TensorObservable,
    /// H = xi-bar beta.p xi.
    pub hamiltonian: Observable,
    /// (1/p^2) xi-bar beta.p xi, the slope of f(tau).
    pub f_slope: Observable,
}

/// H = xi-bar beta_mu p^mu xi as an expression tree.
pub fn hamiltonian(rep: &RepMatrices, _metric: &Metric) -> Observable {
    let layout = CoordLayout::new(rep.dim());
    let mut acc = Observable::constant(layout, c(0.0, 0.0));
    for mu in 0..4 {
        let term = &Observable::bilinear(layout, rep.beta[mu].clone(), format!("eta.beta{mu}.xi"))
            * &Observable::coordinate(layout, layout.p(mu), format!("p_{mu}"));
        acc = &acc + &term;
    }
    // xi-bar = eta / (i lambda)
    let lam = Observable::coordinate(layout, layout.lambda(), "lambda");
    (&acc.scaled(c(0.0, -1.0)) / &lam).with_label("H")
}

fn p_squared(layout: CoordLayout, metric: &Metric) -> Observable {
    let mut acc = Observable::constant(layout, c(0.0, 0.0));
    for mu in 0..4 {
        let pm = Observable::coordinate(layout, layout.p(mu), format!("p_{mu}"));
        acc = &acc + &(&pm * &pm).scaled(c(1.0 / metric.g(mu), 0.0));
    }
    acc.with_label("p^2")
}

/// Build every observable in the set. All tensor components carry upper
/// indices; lower them with [`TensorObservable::lowered`] when needed.
pub fn observables_suite(rep: &RepMatrices, metric: &Metric) -> ObservableSet {
    let layout = CoordLayout::new(rep.dim());
    let s = rep.spin.s();
    let lam = Observable::coordinate(layout, layout.lambda(), "lambda");
    let p2 = p_squared(layout, metric);

    let bil = |m: &CMat, label: String| Observable::bilinear(layout, m.clone(), label);

    // u^mu = -(i/lambda) eta beta^mu xi
    let velocity = TensorObservable::vector(std::array::from_fn(|mu| {
        (&bil(&rep.beta[mu], format!("eta.beta{mu}.xi")).scaled(c(0.0, -1.0)) / &lam)
            .with_label(format!("u^{mu}"))
    }));

    // S^{mu nu} = i s eta beta^{mu nu} xi
    let spin_tensor = TensorObservable::matrix(
        (0..16)
            .map(|k| {
                let (mu, nu) = (k / 4, k % 4);
                bil(&rep.beta_tensor[mu][nu], format!("eta.beta{mu}{nu}.xi"))
                    .scaled(c(0.0, s))
                    .with_label(format!("S^{mu}{nu}"))
            })
            .collect(),
        Symmetry::Antisymmetric,
    );

    // contraction sum_nu eta M^{mu nu} xi p_nu (p_nu is the raw coordinate)
    let contract_p = |mats: &[[CMat; 4]; 4], mu: usize, tag: &str| {
        let mut acc = Observable::constant(layout, c(0.0, 0.0));
        for nu in 0..4 {
            let term = &bil(&mats[mu][nu], format!("eta.{tag}{mu}{nu}.xi"))
                * &Observable::coordinate(layout, layout.p(nu), format!("p_{nu}"));
            acc = &acc + &term;
        }
        acc
    };

    // W^mu = -i s eta beta*^{mu nu} xi p_nu
    let pauli_lubansky = TensorObservable::vector(std::array::from_fn(|mu| {
        contract_p(&rep.beta_dual, mu, "beta*")
            .scaled(c(0.0, -s))
            .with_label(format!("W^{mu}"))
    }));

    // r^mu = -(i s / p^2) eta beta^{mu nu} xi p_nu
    let radius = TensorObservable::vector(std::array::from_fn(|mu| {
        (&contract_p(&rep.beta_tensor, mu, "beta").scaled(c(0.0, -s)) / &p2)
            .with_label(format!("r^{mu}"))
    }));

    let coord = |k: usize, label: String| Observable::coordinate(layout, k, label);
    let position = TensorObservable::vector(std::array::from_fn(|mu| {
        coord(layout.x(mu), format!("x^{mu}"))
    }));

    // L^{mu nu} = x^mu p^nu - x^nu p^mu with p^nu = g^{nu nu} p_nu
    let p_up = |nu: usize| {
        coord(layout.p(nu), format!("p_{nu}")).scaled(c(1.0 / metric.g(nu), 0.0))
    };
    let orbital = TensorObservable::matrix(
        (0..16)
            .map(|k| {
                let (mu, nu) = (k / 4, k % 4);
                (&(&coord(layout.x(mu), format!("x^{mu}")) * &p_up(nu))
                    - &(&coord(layout.x(nu), format!("x^{nu}")) * &p_up(mu)))
                    .with_label(format!("L^{mu}{nu}"))
            })
            .collect(),
        Symmetry::Antisymmetric,
    );

    let total_angular = TensorObservable::matrix(
        (0..16)
            .map(|k| {
                let (mu, nu) = (k / 4, k % 4);
                (&orbital.at2(mu, nu).clone() + spin_tensor.at2(mu, nu))
                    .with_label(format!("J^{mu}{nu}"))
            })
            .collect(),
        Symmetry::Antisymmetric,
    );

    // X^mu = (1/p^2) J^{mu nu} p_nu
    let center = TensorObservable::vector(std::array::from_fn(|mu| {
        let mut acc = Observable::constant(layout, c(0.0, 0.0));
        for nu in 0..4 {
            acc = &acc
                + &(total_angular.at2(mu, nu) * &coord(layout.p(nu), format!("p_{nu}")));
        }
        (&acc / &p2).with_label(format!("X^{mu}"))
    }));

    let shifted_position = TensorObservable::vector(std::array::from_fn(|mu| {
        (&coord(layout.x(mu), format!("x^{mu}")) - radius.at(mu)).with_label(format!("z^{mu}"))
    }));

    let h = hamiltonian(rep, metric);
    let f_slope = (&h / &p2).with_label("f-slope");

    ObservableSet {
        velocity,
        spin_tensor,
        pauli_lubansky,
        radius,
        center,
        orbital,
        total_angular,
        shifted_position,
        position,
        hamiltonian: h,
        f_slope,
    }
}

/// Plain-arithmetic evaluators for the same observables. These never touch
/// the AD engine and serve as the independent side of every dual-route check.
pub mod direct {
    use super::*;

    /// u^mu = xi-bar beta^mu xi.
    pub fn velocity(rep: &RepMatrices, state: &PhaseState) -> CVec4 {
        std::array::from_fn(|mu| rep.bilinear(&state.xi, &rep.beta[mu]))
    }

    /// S^{mu nu} = -lambda s xi-bar beta^{mu nu} xi.
    pub fn spin_tensor(rep: &RepMatrices, state: &PhaseState) -> [[Complex64; 4]; 4] {
        let k = c(-state.lambda * rep.spin.s(), 0.0);
        std::array::from_fn(|mu| {
            std::array::from_fn(|nu| k * rep.bilinear(&state.xi, &rep.beta_tensor[mu][nu]))
        })
    }

    /// W^mu = lambda s xi-bar beta*^{mu nu} xi p_nu.
    pub fn pauli_lubansky(rep: &RepMatrices, metric: &Metric, state: &PhaseState) -> CVec4 {
        let p_low = metric.lower(state.p);
        let k = c(state.lambda * rep.spin.s(), 0.0);
        std::array::from_fn(|mu| {
            (0..4)
                .map(|nu| {
                    k * rep.bilinear(&state.xi, &rep.beta_dual[mu][nu]) * c(p_low[nu], 0.0)
                })
                .sum()
        })
    }

    /// r^mu = (lambda s / p^2) xi-bar beta^{mu nu} xi p_nu.
    pub fn radius(rep: &RepMatrices, metric: &Metric, state: &PhaseState) -> CVec4 {
        let p_low = metric.lower(state.p);
        let p2 = metric.dot(state.p, state.p);
        let k = c(state.lambda * rep.spin.s() / p2, 0.0);
        std::array::from_fn(|mu| {
            (0..4)
                .map(|nu| {
                    k * rep.bilinear(&state.xi, &rep.beta_tensor[mu][nu]) * c(p_low[nu], 0.0)
                })
                .sum()
        })
    }

    /// L^{mu nu} = x^mu p^nu - x^nu p^mu.
    pub fn orbital(state: &PhaseState) -> [[f64; 4]; 4] {
        std::array::from_fn(|mu| {
            std::array::from_fn(|nu| state.x[mu] * state.p[nu] - state.x[nu] * state.p[mu])
        })
    }

    /// J^{mu nu} = L^{mu nu} + S^{mu nu}.
    pub fn total_angular(
        rep: &RepMatrices,
        _metric: &Metric,
        state: &PhaseState,
    ) -> [[Complex64; 4]; 4] {
        let l = orbital(state);
        let s = spin_tensor(rep, state);
        std::array::from_fn(|mu| std::array::from_fn(|nu| c(l[mu][nu], 0.0) + s[mu][nu]))
    }

    /// X^mu = (1/p^2) J^{mu nu} p_nu.
    pub fn center(rep: &RepMatrices, metric: &Metric, state: &PhaseState) -> CVec4 {
        let j = total_angular(rep, metric, state);
        let p_low = metric.lower(state.p);
        let p2 = metric.dot(state.p, state.p);
        std::array::from_fn(|mu| {
            (0..4).map(|nu| j[mu][nu] * c(p_low[nu] / p2, 0.0)).sum()
        })
    }

    /// H = xi-bar beta_mu p^mu xi.
    pub fn hamiltonian(rep: &RepMatrices, metric: &Metric, state: &PhaseState) -> Complex64 {
        let p_low = metric.lower(state.p);
        (0..4)
            .map(|mu| rep.bilinear(&state.xi, &rep.beta[mu]) * c(p_low[mu], 0.0))
            .sum()
    }

    /// f-slope = H / p^2.
    pub fn f_slope(rep: &RepMatrices, metric: &Metric, state: &PhaseState) -> Complex64 {
        hamiltonian(rep, metric, state) / c(metric.dot(state.p, state.p), 0.0)
    }

    /// z^mu = x^mu - r^mu.
    pub fn shifted_position(rep: &RepMatrices, metric: &Metric, state: &PhaseState) -> CVec4 {
        let r = radius(rep, metric, state);
        std::array::from_fn(|mu| c(state.x[mu], 0.0) - r[mu])
    }

    /// Real parts of a complex four-vector, for reporting.
    pub fn re4(v: CVec4) -> Vec4 {
        std::array::from_fn(|mu| v[mu].re)
    }

    /// Largest imaginary part, for reality checks.
    pub fn max_im4(v: CVec4) -> f64 {
        v.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}
