//! Phase-space functions with exact derivatives, closed under the canonical
//! bracket.
//!
//! An [`Observable`] is an expression tree evaluated generically over any
//! [`AdScalar`]. A bracket node lifts the coordinates one jet level, reads
//! off both gradients, and contracts them:
//!
//! ```text
//! {A,B} = dA/dx^mu dB/dp_mu - dA/dp_mu dB/dx^mu
//!       + dA/dxi_a dB/deta_a - dB/dxi_a dA/deta_a
//! ```
//!
//! Spinor derivatives are holomorphic (Wirtinger) derivatives assembled from
//! the real-coordinate gradient; every observable built here is polynomial in
//! (xi, eta), so they are exact. Because the scalar type is generic, bracket
//! results evaluate inside other brackets with full second-order accuracy.

use std::sync::Arc;

use num_complex::Complex64;

use crate::jet::{AdScalar, Lift};
use crate::linalg::CMat;
use crate::metric::Metric;
use crate::repspace::RepMatrices;

use super::{CoordLayout, PhaseState};

#[derive(Debug)]
enum Node {
    Const(Complex64),
    Coord(usize),
    /// eta^T Gamma xi with both spinors assembled from the real coordinates.
    Bilinear(Arc<CMat>),
    Add(Arc<Node>, Arc<Node>),
    Sub(Arc<Node>, Arc<Node>),
    Mul(Arc<Node>, Arc<Node>),
    Div(Arc<Node>, Arc<Node>),
    Neg(Arc<Node>),
    Bracket(Arc<Node>, Arc<Node>),
}

/// A labelled phase-space function with exact derivatives with respect to
/// all canonical coordinates.
#[derive(Clone, Debug)]
pub struct Observable {
    pub label: String,
    layout: CoordLayout,
    node: Arc<Node>,
}

impl Observable {
    pub fn constant(layout: CoordLayout, value: Complex64) -> Self {
        Observable {
            label: format!("{value}"),
            layout,
            node: Arc::new(Node::Const(value)),
        }
    }

    /// The raw coordinate with the given layout index.
    pub fn coordinate(layout: CoordLayout, index: usize, label: impl Into<String>) -> Self {
        assert!(index < layout.len());
        Observable {
            label: label.into(),
            layout,
            node: Arc::new(Node::Coord(index)),
        }
    }

    /// Bilinear eta Gamma xi.
    pub fn bilinear(layout: CoordLayout, gamma: CMat, label: impl Into<String>) -> Self {
        assert_eq!(gamma.nrows(), layout.spinor_dim);
        Observable {
            label: label.into(),
            layout,
            node: Arc::new(Node::Bilinear(Arc::new(gamma))),
        }
    }

    pub fn layout(&self) -> CoordLayout {
        self.layout
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Evaluate at a raw coordinate vector over any scalar type.
    pub fn eval<S: AdScalar + Lift>(&self, coords: &[S]) -> S {
        assert_eq!(coords.len(), self.layout.len());
        eval_node(&self.node, coords, &self.layout)
    }

    /// Value at a physical state.
    pub fn value(&self, rep: &RepMatrices, metric: &Metric, state: &PhaseState) -> Complex64 {
        self.eval(&state.coords(rep, metric))
    }

    /// Value and full gradient with respect to the real coordinates.
    pub fn gradient(
        &self,
        rep: &RepMatrices,
        metric: &Metric,
        state: &PhaseState,
    ) -> (Complex64, Vec<Complex64>) {
        let coords = state.coords(rep, metric);
        let n = coords.len();
        let lifted: Vec<<Complex64 as Lift>::Up> = coords
            .iter()
            .enumerate()
            .map(|(k, &v)| Complex64::lift_var(v, k, n))
            .collect();
        let out = self.eval(&lifted);
        let mut grad = out.grad;
        grad.resize(n, Complex64::new(0.0, 0.0));
        (out.val, grad)
    }
}

/// Canonical bracket of two observables; the result is itself an observable
/// with exact derivatives, so brackets nest.
pub fn bracket(a: &Observable, b: &Observable) -> Observable {
    assert_eq!(a.layout, b.layout, "observables live on different layouts");
    Observable {
        label: format!("{{{}, {}}}", a.label, b.label),
        layout: a.layout,
        node: Arc::new(Node::Bracket(a.node.clone(), b.node.clone())),
    }
}

fn eval_node<S: AdScalar + Lift>(node: &Node, coords: &[S], layout: &CoordLayout) -> S {
    match node {
        Node::Const(c) => S::from_c64(*c),
        Node::Coord(k) => coords[*k].clone(),
        Node::Bilinear(gamma) => eval_bilinear(gamma, coords, layout),
        Node::Add(a, b) => eval_node(a, coords, layout) + eval_node(b, coords, layout),
        Node::Sub(a, b) => eval_node(a, coords, layout) - eval_node(b, coords, layout),
        Node::Mul(a, b) => eval_node(a, coords, layout) * eval_node(b, coords, layout),
        Node::Div(a, b) => eval_node(a, coords, layout) / eval_node(b, coords, layout),
        Node::Neg(a) => -eval_node(a, coords, layout),
        Node::Bracket(a, b) => eval_bracket(a, b, coords, layout),
    }
}

fn eval_bilinear<S: AdScalar + Lift>(gamma: &CMat, coords: &[S], layout: &CoordLayout) -> S {
    let d = layout.spinor_dim;
    let i = Complex64::new(0.0, 1.0);
    let mut acc = S::zero();
    for a in 0..d {
        let mut row = S::zero();
        let mut any = false;
        for b in 0..d {
            let g = gamma[(a, b)];
            if g.norm() == 0.0 {
                continue;
            }
            let xi_b = coords[layout.xi_re(b)].clone()
                + S::from_c64(i) * coords[layout.xi_im(b)].clone();
            row = row + S::from_c64(g) * xi_b;
            any = true;
        }
        if any {
            let eta_a = coords[layout.eta_re(a)].clone()
                + S::from_c64(i) * coords[layout.eta_im(a)].clone();
            acc = acc + eta_a * row;
        }
    }
    acc
}

fn eval_bracket<S: AdScalar + Lift>(a: &Node, b: &Node, coords: &[S], layout: &CoordLayout) -> S {
    let n = coords.len();
    let lifted: Vec<S::Up> = coords
        .iter()
        .enumerate()
        .map(|(k, v)| S::lift_var(v.clone(), k, n))
        .collect();
    let fa = eval_node(a, &lifted, layout);
    let fb = eval_node(b, &lifted, layout);

    let mut out = S::zero();
    for mu in 0..4 {
        out = out + S::partial_of(&fa, layout.x(mu)) * S::partial_of(&fb, layout.p(mu))
            - S::partial_of(&fa, layout.p(mu)) * S::partial_of(&fb, layout.x(mu));
    }
    // Wirtinger derivative: d/dz = (d/dRe - i d/dIm) / 2
    let half = S::from_c64(Complex64::new(0.5, 0.0));
    let minus_i = S::from_c64(Complex64::new(0.0, -1.0));
    let wirt = |f: &S::Up, re: usize, im: usize| -> S {
        half.clone() * (S::partial_of(f, re) + minus_i.clone() * S::partial_of(f, im))
    };
    for s in 0..layout.spinor_dim {
        let da_xi = wirt(&fa, layout.xi_re(s), layout.xi_im(s));
        let db_xi = wirt(&fb, layout.xi_re(s), layout.xi_im(s));
        let da_eta = wirt(&fa, layout.eta_re(s), layout.eta_im(s));
        let db_eta = wirt(&fb, layout.eta_re(s), layout.eta_im(s));
        out = out + da_xi * db_eta - db_xi * da_eta;
    }
    out
}

macro_rules! observable_binop {
    ($trait:ident, $method:ident, $variant:ident, $symbol:literal) => {
        impl std::ops::$trait for &Observable {
            type Output = Observable;
            fn $method(self, rhs: &Observable) -> Observable {
                assert_eq!(self.layout, rhs.layout);
                Observable {
                    label: format!("({} {} {})", self.label, $symbol, rhs.label),
                    layout: self.layout,
                    node: Arc::new(Node::$variant(self.node.clone(), rhs.node.clone())),
                }
            }
        }
    };
}

observable_binop!(Add, add, Add, "+");
observable_binop!(Sub, sub, Sub, "-");
observable_binop!(Mul, mul, Mul, "*");
observable_binop!(Div, div, Div, "/");

impl std::ops::Neg for &Observable {
    type Output = Observable;
    fn neg(self) -> Observable {
        Observable {
            label: format!("(-{})", self.label),
            layout: self.layout,
            node: Arc::new(Node::Neg(self.node.clone())),
        }
    }
}

impl Observable {
    /// Scale by a complex constant.
    pub fn scaled(&self, factor: Complex64) -> Observable {
        let k = Observable::constant(self.layout, factor);
        &k * self
    }
}

/// Declared index symmetry of a tensor observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    None,
    Antisymmetric,
}

/// A rank-1 or rank-2 indexed family of observables.
#[derive(Debug, Clone)]
pub struct TensorObservable {
    pub symmetry: Symmetry,
    rank: usize,
    comps: Vec<Observable>,
}

impl TensorObservable {
    pub fn vector(comps: [Observable; 4]) -> Self {
        TensorObservable {
            symmetry: Symmetry::None,
            rank: 1,
            comps: comps.into_iter().collect(),
        }
    }

    pub fn matrix(comps: Vec<Observable>, symmetry: Symmetry) -> Self {
        assert_eq!(comps.len(), 16);
        TensorObservable {
            symmetry,
            rank: 2,
            comps,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn at(&self, mu: usize) -> &Observable {
        assert_eq!(self.rank, 1);
        &self.comps[mu]
    }

    pub fn at2(&self, mu: usize, nu: usize) -> &Observable {
        assert_eq!(self.rank, 2);
        &self.comps[4 * mu + nu]
    }

    /// Component with the index (first index for rank 2) lowered.
    pub fn lowered(&self, metric: &Metric) -> TensorObservable {
        let comps = match self.rank {
            1 => (0..4)
                .map(|mu| self.at(mu).scaled(Complex64::new(metric.g(mu), 0.0)))
                .collect(),
            _ => (0..16)
                .map(|k| {
                    let (mu, nu) = (k / 4, k % 4);
                    self.at2(mu, nu)
                        .scaled(Complex64::new(metric.g(mu) * metric.g(nu), 0.0))
                })
                .collect(),
        };
        TensorObservable {
            symmetry: self.symmetry,
            rank: self.rank,
            comps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{observables_suite, StateSampler};
    use crate::repspace::{build_rep, SpinLabel};
    use nalgebra::DMatrix;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup() -> (RepMatrices, Metric, StateSampler) {
        let metric = Metric::minkowski();
        let rep = build_rep(SpinLabel::half(), &metric).unwrap();
        let sampler = StateSampler::new(SpinLabel::half(), 2024);
        (rep, metric, sampler)
    }

    #[test]
    fn canonical_pairs() {
        let (rep, metric, mut sampler) = setup();
        let set = observables_suite(&rep, &metric);
        let layout = CoordLayout::new(rep.dim());
        let state = sampler.sample(&rep, &metric);
        let coords = state.coords(&rep, &metric);
        let p1 = Observable::coordinate(layout, layout.p(1), "p_1");
        let p2 = Observable::coordinate(layout, layout.p(2), "p_2");
        let x1 = set.position.at(1);
        let x2 = set.position.at(2);
        assert!((bracket(x1, &p1).eval(&coords) - c(1.0, 0.0)).norm() < 1e-14);
        assert!(bracket(x1, x2).eval(&coords).norm() < 1e-14);
        assert!(bracket(&p1, &p2).eval(&coords).norm() < 1e-14);
    }

    #[test]
    fn bilinear_bracket_is_commutator() {
        // {eta G1 xi, eta G2 xi} = eta [G1, G2] xi, the engine vs a direct
        // matrix-commutator evaluation.
        let (rep, metric, mut sampler) = setup();
        let layout = CoordLayout::new(rep.dim());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let state = sampler.sample(&rep, &metric);
            let coords = state.coords(&rep, &metric);
            let rand_mat = |rng: &mut ChaCha8Rng| {
                DMatrix::from_fn(4, 4, |_, _| {
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                })
            };
            let g1 = rand_mat(&mut rng);
            let g2 = rand_mat(&mut rng);
            let a = Observable::bilinear(layout, g1.clone(), "A");
            let b = Observable::bilinear(layout, g2.clone(), "B");
            let engine = bracket(&a, &b).eval(&coords);

            let eta = state.eta(&rep);
            let comm = &g1 * &g2 - &g2 * &g1;
            let direct = (eta.transpose() * comm * &state.xi)[(0, 0)];
            assert!(
                (engine - direct).norm() < 1e-12 * (1.0 + direct.norm()),
                "engine {engine} vs direct {direct}"
            );
        }
    }

    #[test]
    fn partials_match_central_differences() {
        let (rep, metric, mut sampler) = setup();
        let set = observables_suite(&rep, &metric);
        let state = sampler.sample(&rep, &metric);
        let coords = state.coords(&rep, &metric);
        let observables = [
            set.hamiltonian.clone(),
            set.radius.at(3).clone(),
            set.pauli_lubansky.at(1).clone(),
            set.f_slope.clone(),
            set.center.at(2).clone(),
        ];
        for obs in &observables {
            let (_, grad) = obs.gradient(&rep, &metric, &state);
            for k in 0..coords.len() {
                let h = 1e-6;
                let mut up = coords.clone();
                let mut dn = coords.clone();
                up[k] += c(h, 0.0);
                dn[k] -= c(h, 0.0);
                let fd = (obs.eval(&up) - obs.eval(&dn)) / c(2.0 * h, 0.0);
                let scale = grad[k].norm().max(1.0);
                assert!(
                    (grad[k] - fd).norm() < 1e-6 * scale,
                    "{}: coord {k}: exact {} vs fd {}",
                    obs.label,
                    grad[k],
                    fd
                );
            }
        }
    }

    #[test]
    fn bracket_antisymmetry_and_bilinearity() {
        let (rep, metric, mut sampler) = setup();
        let set = observables_suite(&rep, &metric);
        for _ in 0..5 {
            let state = sampler.sample(&rep, &metric);
            let coords = state.coords(&rep, &metric);
            let a = set.pauli_lubansky.at(1);
            let b = set.radius.at(2);
            let ab = bracket(a, b).eval(&coords);
            let ba = bracket(b, a).eval(&coords);
            assert!((ab + ba).norm() < 1e-12 * (1.0 + ab.norm()));

            // {a + 2 c, b} = {a, b} + 2 {c, b}
            let cobs = set.hamiltonian.clone();
            let lhs = bracket(&(&a.clone() + &cobs.scaled(c(2.0, 0.0))), b).eval(&coords);
            let rhs = ab + bracket(&cobs, b).eval(&coords) * c(2.0, 0.0);
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn leibniz_rule() {
        let (rep, metric, mut sampler) = setup();
        let set = observables_suite(&rep, &metric);
        for _ in 0..5 {
            let state = sampler.sample(&rep, &metric);
            let coords = state.coords(&rep, &metric);
            let a = set.radius.at(1);
            let b = set.pauli_lubansky.at(3);
            let h = &set.hamiltonian;
            let prod = a * b;
            let lhs = bracket(&prod, h).eval(&coords);
            let rhs = a.eval(&coords) * bracket(b, h).eval(&coords)
                + bracket(a, h).eval(&coords) * b.eval(&coords);
            assert!(
                (lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()),
                "leibniz residual {}",
                (lhs - rhs).norm()
            );
        }
    }

    #[test]
    fn jacobi_identity() {
        let (rep, metric, mut sampler) = setup();
        let set = observables_suite(&rep, &metric);
        let layout = CoordLayout::new(rep.dim());
        let w = &set.pauli_lubansky;
        let r = &set.radius;
        let x1 = set.position.at(1).clone();
        let p2 = Observable::coordinate(layout, layout.p(2), "p_2");
        let triples: Vec<[Observable; 3]> = vec![
            [w.at(1).clone(), w.at(2).clone(), w.at(3).clone()],
            [w.at(1).clone(), r.at(2).clone(), r.at(3).clone()],
            [r.at(1).clone(), r.at(2).clone(), w.at(0).clone()],
            [x1.clone(), w.at(2).clone(), r.at(1).clone()],
            [p2.clone(), w.at(1).clone(), r.at(3).clone()],
            [x1, p2, r.at(0).clone()],
        ];
        for _ in 0..3 {
            let state = sampler.sample(&rep, &metric);
            let coords = state.coords(&rep, &metric);
            for [a, b, cc] in &triples {
                let term1 = bracket(a, &bracket(b, cc)).eval(&coords);
                let term2 = bracket(b, &bracket(cc, a)).eval(&coords);
                let term3 = bracket(cc, &bracket(a, b)).eval(&coords);
                let total = term1 + term2 + term3;
                let scale = term1.norm().max(term2.norm()).max(term3.norm()).max(1e-3);
                assert!(
                    total.norm() < 1e-6 * scale,
                    "jacobi({}, {}, {}) = {} (scale {scale})",
                    a.label,
                    b.label,
                    cc.label,
                    total.norm()
                );
            }
        }
    }

    #[test]
    fn tensor_symmetry_holds_valuewise() {
        let (rep, metric, mut sampler) = setup();
        let set = observables_suite(&rep, &metric);
        for _ in 0..5 {
            let state = sampler.sample(&rep, &metric);
            let coords = state.coords(&rep, &metric);
            for t in [&set.spin_tensor, &set.orbital, &set.total_angular] {
                assert_eq!(t.symmetry, Symmetry::Antisymmetric);
                for mu in 0..4 {
                    for nu in 0..4 {
                        let a = t.at2(mu, nu).eval(&coords);
                        let b = t.at2(nu, mu).eval(&coords);
                        assert!((a + b).norm() < 1e-12 * (1.0 + a.norm()));
                    }
                }
            }
        }
    }

    #[test]
    fn bilinear_rejects_wrong_dimension() {
        let layout = CoordLayout::new(4);
        let bad = DMatrix::from_element(3, 3, c(1.0, 0.0));
        let result = std::panic::catch_unwind(|| Observable::bilinear(layout, bad, "bad"));
        assert!(result.is_err());
    }

    #[test]
    fn gradient_pads_untracked_coordinates() {
        let (rep, metric, mut sampler) = setup();
        let layout = CoordLayout::new(rep.dim());
        let state = sampler.sample(&rep, &metric);
        let obs = Observable::coordinate(layout, layout.x(0), "x^0");
        let (_, grad) = obs.gradient(&rep, &metric, &state);
        assert_eq!(grad.len(), layout.len());
        assert!((grad[layout.x(0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(grad[layout.lambda()].norm() < 1e-15);
    }
}

#[cfg(test)]
mod concurrency_tests {
    use super::*;
    use crate::phase_space::{observables_suite, StateSampler};
    use crate::repspace::{build_rep, SpinLabel};

    #[test]
    fn observables_evaluate_in_parallel_without_synchronization() {
        let metric = Metric::minkowski();
        let rep = build_rep(SpinLabel::half(), &metric).unwrap();
        let set = observables_suite(&rep, &metric);
        let mut sampler = StateSampler::new(rep.spin, 1234);
        let states: Vec<_> = (0..8).map(|_| sampler.sample(&rep, &metric)).collect();
        let h = &set.hamiltonian;
        let serial: Vec<_> = states.iter().map(|st| h.value(&rep, &metric, st)).collect();
        let parallel: Vec<_> = std::thread::scope(|scope| {
            let handles: Vec<_> = states
                .iter()
                .map(|st| scope.spawn(|| h.value(&rep, &metric, st)))
                .collect();
            handles.into_iter().map(|j| j.join().unwrap()).collect()
        });
        assert_eq!(serial, parallel);
    }
}
