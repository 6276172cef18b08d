//! Seedable random physical states for property tests and audits.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::metric::{apply4, boost, Metric};
use crate::repspace::{RepMatrices, SpinLabel};

use super::PhaseState;

/// Samples timelike-momentum states with spinors drawn from the complex unit
/// ball, optionally normalized to xi-bar xi = +-1, optionally boosted.
#[derive(Debug, Clone)]
pub struct StateSampler {
    rng: ChaCha8Rng,
    spin: SpinLabel,
    mass_range: (f64, f64),
    rapidity: f64,
    lambda: f64,
    normalize: bool,
}

impl StateSampler {
    pub fn new(spin: SpinLabel, seed: u64) -> Self {
        StateSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spin,
            mass_range: (0.5, 2.0),
            rapidity: 0.8,
            lambda: 1.0,
            normalize: false,
        }
    }

    /// Restrict sampling to the rest frame (p = (m, 0, 0, 0)).
    pub fn rest_frame(mut self) -> Self {
        self.rapidity = 0.0;
        self
    }

    /// Maximum rapidity of the sampled momentum.
    pub fn with_rapidity(mut self, rapidity: f64) -> Self {
        self.rapidity = rapidity;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    /// Normalize spinors to xi-bar xi = +-1.
    pub fn normalized(mut self) -> Self {
        self.normalize = true;
        self
    }

    pub fn sample(&mut self, rep: &RepMatrices, metric: &Metric) -> PhaseState {
        let d = rep.dim();
        let m = self.rng.gen_range(self.mass_range.0..self.mass_range.1);
        let p = if self.rapidity > 0.0 {
            let chi = self.rng.gen_range(0.0..self.rapidity);
            let dir = self.random_direction();
            apply4(&boost(dir, chi), [m, 0.0, 0.0, 0.0])
        } else {
            [m, 0.0, 0.0, 0.0]
        };
        let x = std::array::from_fn(|_| self.rng.gen_range(-1.0..1.0));

        let xi = loop {
            let mut v = DVector::from_iterator(
                d,
                (0..d).map(|_| {
                    Complex64::new(
                        self.rng.gen_range(-1.0..1.0),
                        self.rng.gen_range(-1.0..1.0),
                    )
                }),
            );
            let norm = v.norm();
            if norm < 1e-3 {
                continue;
            }
            v /= Complex64::new(norm, 0.0);
            if self.normalize {
                let ind = rep.indefinite_norm(&v);
                if ind.abs() < 0.05 {
                    continue; // nearly null in the indefinite norm; resample
                }
                v /= Complex64::new(ind.abs().sqrt(), 0.0);
            }
            break v;
        };

        let mut state = PhaseState::new(x, p, xi, self.lambda, self.spin);
        if self.normalize {
            let ind = rep.indefinite_norm(&state.xi);
            state.declared_norm = Some(ind.signum());
        }
        debug_assert!(metric.dot(state.p, state.p) > 0.0);
        state
    }

    fn random_direction(&mut self) -> [f64; 3] {
        loop {
            let v: [f64; 3] = std::array::from_fn(|_| self.rng.gen_range(-1.0..1.0));
            let n2 = v.iter().map(|x| x * x).sum::<f64>();
            if n2 > 1e-4 && n2 <= 1.0 {
                let n = n2.sqrt();
                return [v[0] / n, v[1] / n, v[2] / n];
            }
        }
    }
}
