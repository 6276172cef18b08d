//! Forward-mode automatic differentiation over complex scalars.
//!
//! A [`Jet`] carries a value and its gradient with respect to a fixed set of
//! coordinates. The scalar type is generic, so jets nest: evaluating with
//! `Jet<Jet<Complex64>>` propagates exact second-order information, which is
//! what lets canonical brackets of bracket results stay differentiable.
//!
//! An empty gradient vector means "identically zero gradient"; constants stay
//! cheap regardless of how many coordinates are live.

use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar admissible for observable evaluation: complex arithmetic plus
/// embedding of complex constants.
pub trait AdScalar:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_c64(c: Complex64) -> Self;
    fn zero() -> Self;
    fn one() -> Self;
}

impl AdScalar for Complex64 {
    fn from_c64(c: Complex64) -> Self {
        c
    }
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
}

/// First-order Taylor value over `S`: value plus gradient.
#[derive(Clone, Debug)]
pub struct Jet<S> {
    pub val: S,
    pub grad: Vec<S>,
}

impl<S: AdScalar> Jet<S> {
    pub fn constant(val: S) -> Self {
        Jet { val, grad: Vec::new() }
    }

    /// Coordinate number `k` out of `n`: unit gradient along its own slot.
    pub fn variable(val: S, k: usize, n: usize) -> Self {
        let mut grad = vec![S::zero(); n];
        grad[k] = S::one();
        Jet { val, grad }
    }

    /// Partial derivative along coordinate `k` (zero when untracked).
    pub fn partial(&self, k: usize) -> S {
        self.grad.get(k).cloned().unwrap_or_else(S::zero)
    }
}

fn zip_map<S: AdScalar>(a: &[S], b: &[S], f: impl Fn(S, S) -> S) -> Vec<S> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(S::zero);
            let y = b.get(k).cloned().unwrap_or_else(S::zero);
            f(x, y)
        })
        .collect()
}

impl<S: AdScalar> Add for Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: Jet<S>) -> Jet<S> {
        Jet {
            val: self.val + rhs.val,
            grad: zip_map(&self.grad, &rhs.grad, |x, y| x + y),
        }
    }
}

impl<S: AdScalar> Sub for Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: Jet<S>) -> Jet<S> {
        Jet {
            val: self.val - rhs.val,
            grad: zip_map(&self.grad, &rhs.grad, |x, y| x - y),
        }
    }
}

impl<S: AdScalar> Mul for Jet<S> {
    type Output = Jet<S>;
    #[allow(clippy::suspicious_arithmetic_impl)] // product rule
    fn mul(self, rhs: Jet<S>) -> Jet<S> {
        let grad = zip_map(&self.grad, &rhs.grad, |da, db| {
            da * rhs.val.clone() + self.val.clone() * db
        });
        Jet {
            val: self.val * rhs.val,
            grad,
        }
    }
}

impl<S: AdScalar> Div for Jet<S> {
    type Output = Jet<S>;
    #[allow(clippy::suspicious_arithmetic_impl)] // quotient rule
    fn div(self, rhs: Jet<S>) -> Jet<S> {
        let q = self.val.clone() / rhs.val.clone();
        let grad = zip_map(&self.grad, &rhs.grad, |da, db| {
            (da - q.clone() * db) / rhs.val.clone()
        });
        Jet { val: q, grad }
    }
}

impl<S: AdScalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet {
            val: -self.val,
            grad: self.grad.into_iter().map(|g| -g).collect(),
        }
    }
}

impl<S: AdScalar> AdScalar for Jet<S> {
    fn from_c64(c: Complex64) -> Self {
        Jet::constant(S::from_c64(c))
    }
    fn zero() -> Self {
        Jet::constant(S::zero())
    }
    fn one() -> Self {
        Jet::constant(S::one())
    }
}

/// One differentiation level on top of a scalar. The tower is closed at a
/// fixed depth so generic bracket nesting terminates at compile time; going
/// deeper than four levels panics at the lift site.
pub trait Lift: AdScalar {
    type Up: AdScalar + Lift;
    fn lift_var(val: Self, k: usize, n: usize) -> Self::Up;
    fn partial_of(lifted: &Self::Up, k: usize) -> Self;
}

macro_rules! lift_level {
    ($lower:ty) => {
        impl Lift for $lower {
            type Up = Jet<$lower>;
            fn lift_var(val: Self, k: usize, n: usize) -> Self::Up {
                Jet::variable(val, k, n)
            }
            fn partial_of(lifted: &Self::Up, k: usize) -> Self {
                lifted.partial(k)
            }
        }
    };
}

lift_level!(Complex64);
lift_level!(Jet<Complex64>);
lift_level!(Jet<Jet<Complex64>>);
lift_level!(Jet<Jet<Jet<Complex64>>>);

impl Lift for Jet<Jet<Jet<Jet<Complex64>>>> {
    type Up = Jet<Jet<Jet<Jet<Complex64>>>>;
    fn lift_var(_val: Self, _k: usize, _n: usize) -> Self::Up {
        panic!("bracket nesting exceeds the supported differentiation depth (4)")
    }
    fn partial_of(_lifted: &Self::Up, _k: usize) -> Self {
        unreachable!("lift_var panics before any partial is requested")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // f(a, b) = a^2 b + b / a
    fn f<S: AdScalar>(a: S, b: S) -> S {
        a.clone() * a.clone() * b.clone() + b / a
    }

    #[test]
    fn first_order_partials() {
        let a0 = c(1.5, 0.2);
        let b0 = c(-0.7, 1.1);
        let a = Jet::variable(a0, 0, 2);
        let b = Jet::variable(b0, 1, 2);
        let out = f(a, b);
        // df/da = 2ab - b/a^2, df/db = a^2 + 1/a
        let dfda = c(2.0, 0.0) * a0 * b0 - b0 / (a0 * a0);
        let dfdb = a0 * a0 + c(1.0, 0.0) / a0;
        assert!((out.val - (a0 * a0 * b0 + b0 / a0)).norm() < 1e-14);
        assert!((out.partial(0) - dfda).norm() < 1e-14);
        assert!((out.partial(1) - dfdb).norm() < 1e-14);
    }

    #[test]
    fn nested_jets_give_second_order() {
        let a0 = c(1.5, 0.2);
        let b0 = c(-0.7, 1.1);
        // outer level tracks both coordinates, each value itself a jet
        let a = Jet::variable(Jet::variable(a0, 0, 2), 0, 2);
        let b = Jet::variable(Jet::variable(b0, 1, 2), 1, 2);
        let out = f(a, b);
        // d2f/dadb = 2a - 1/a^2
        let mixed = out.partial(0).partial(1);
        let expect = c(2.0, 0.0) * a0 - c(1.0, 0.0) / (a0 * a0);
        assert!((mixed - expect).norm() < 1e-13);
        // d2f/da2 = 2b + 2b/a^3
        let daa = out.partial(0).partial(0);
        let expect2 = c(2.0, 0.0) * b0 + c(2.0, 0.0) * b0 / (a0 * a0 * a0);
        assert!((daa - expect2).norm() < 1e-13);
    }

    #[test]
    fn constants_have_empty_gradients() {
        let k = Jet::<Complex64>::from_c64(c(3.0, -1.0));
        let x = Jet::variable(c(2.0, 0.0), 0, 1);
        let y = k.clone() * x;
        assert!((y.partial(0) - c(3.0, -1.0)).norm() < 1e-15);
        assert!(k.grad.is_empty());
    }
}
