//! The enlarged phase space {(x^mu, p_nu), (xi, eta)}, its canonical bracket,
//! and the physical observables as differentiable phase-space functions.
//!
//! xi and eta are independent bracket coordinates; the physical constraint
//! eta = i lambda xi-bar is imposed only when a concrete state is flattened
//! into a coordinate vector for evaluation.

mod observable;
mod sampler;
mod suite;
mod verify;

pub use observable::{bracket, Observable, Symmetry, TensorObservable};
pub use sampler::StateSampler;
pub use suite::{direct, hamiltonian, observables_suite, ObservableSet};
pub use verify::{
    algebra_residuals, check_z_not_canonical, verify_algebra, AlgebraCheck, AlgebraReport,
};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metric::{Metric, Vec4};
use crate::repspace::{RepMatrices, SpinLabel};

/// One point of the enlarged phase space.
#[derive(Debug, Clone)]
pub struct PhaseState {
    /// Position x^mu (upper index).
    pub x: Vec4,
    /// Momentum p^mu (upper index); must be timelike for dynamics.
    pub p: Vec4,
    /// Spinor coordinate, dimension D(s).
    pub xi: DVector<Complex64>,
    /// Scalar with the dimensions of action (units of hbar).
    pub lambda: f64,
    pub spin: SpinLabel,
    /// Declared indefinite normalization (+1 or -1), checked by `validate`.
    pub declared_norm: Option<f64>,
}

impl PhaseState {
    pub fn new(x: Vec4, p: Vec4, xi: DVector<Complex64>, lambda: f64, spin: SpinLabel) -> Self {
        PhaseState {
            x,
            p,
            xi,
            lambda,
            spin,
            declared_norm: None,
        }
    }

    /// Check the state against the representation: matching spinor dimension,
    /// timelike momentum, and the declared normalization if any.
    pub fn validate(&self, rep: &RepMatrices, metric: &Metric) -> Result<()> {
        if self.xi.len() != rep.dim() {
            return Err(Error::SpinorDimension {
                expected: rep.dim(),
                found: self.xi.len(),
            });
        }
        let p2 = metric.dot(self.p, self.p);
        if p2 <= 0.0 {
            return Err(Error::NonTimelike(p2));
        }
        if let Some(want) = self.declared_norm {
            let got = rep.indefinite_norm(&self.xi);
            if (got - want).abs() > 1e-12 {
                return Err(Error::BadConfig(format!(
                    "state declared normalized to {want} but xi-bar xi = {got}"
                )));
            }
        }
        Ok(())
    }

    /// Spinor momentum eta = i lambda xi-bar, derived, never stored.
    pub fn eta(&self, rep: &RepMatrices) -> DVector<Complex64> {
        let bar = rep.bar(&self.xi);
        DVector::from_iterator(
            bar.len(),
            bar.iter().map(|z| Complex64::new(0.0, self.lambda) * z),
        )
    }

    /// Flatten into the canonical coordinate vector (see [`CoordLayout`]).
    pub fn coords(&self, rep: &RepMatrices, metric: &Metric) -> Vec<Complex64> {
        let layout = CoordLayout::new(rep.dim());
        let mut out = vec![Complex64::new(0.0, 0.0); layout.len()];
        let p_low = metric.lower(self.p);
        for mu in 0..4 {
            out[layout.x(mu)] = Complex64::new(self.x[mu], 0.0);
            out[layout.p(mu)] = Complex64::new(p_low[mu], 0.0);
        }
        let eta = self.eta(rep);
        for a in 0..rep.dim() {
            out[layout.xi_re(a)] = Complex64::new(self.xi[a].re, 0.0);
            out[layout.xi_im(a)] = Complex64::new(self.xi[a].im, 0.0);
            out[layout.eta_re(a)] = Complex64::new(eta[a].re, 0.0);
            out[layout.eta_im(a)] = Complex64::new(eta[a].im, 0.0);
        }
        out[layout.lambda()] = Complex64::new(self.lambda, 0.0);
        out
    }
}

/// Index layout of the real canonical coordinates: x^0..x^3, p_0..p_3 (lower
/// index), then Re/Im of xi and eta, then lambda as an inert parameter slot
/// that never participates in the bracket pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoordLayout {
    pub spinor_dim: usize,
}

impl CoordLayout {
    pub fn new(spinor_dim: usize) -> Self {
        CoordLayout { spinor_dim }
    }

    pub fn len(&self) -> usize {
        9 + 4 * self.spinor_dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, mu: usize) -> usize {
        mu
    }

    pub fn p(&self, mu: usize) -> usize {
        4 + mu
    }

    pub fn xi_re(&self, a: usize) -> usize {
        8 + a
    }

    pub fn xi_im(&self, a: usize) -> usize {
        8 + self.spinor_dim + a
    }

    pub fn eta_re(&self, a: usize) -> usize {
        8 + 2 * self.spinor_dim + a
    }

    pub fn eta_im(&self, a: usize) -> usize {
        8 + 3 * self.spinor_dim + a
    }

    pub fn lambda(&self) -> usize {
        8 + 4 * self.spinor_dim
    }
}
