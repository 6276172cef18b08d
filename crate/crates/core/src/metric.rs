//! Minkowski metric, Levi-Civita orientation, and four-vector helpers.
//!
//! Conventions used throughout the crate: signature (+,-,-,-), totally
//! antisymmetric epsilon with `eps^{0123} = +1` (so `eps_{0123} = -1`),
//! proper time normalized by `dtau^2 = dx_mu dx^mu`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Vec4 = [f64; 4];
pub type CVec4 = [Complex64; 4];

/// Diagonal spacetime metric. Constructed as Minkowski in normal use; the
/// diagonal is kept as data so verification suites can inject a corrupted
/// metric as a negative control.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    diag: [f64; 4],
}

impl Default for Metric {
    fn default() -> Self {
        Self::minkowski()
    }
}

impl Metric {
    pub fn minkowski() -> Self {
        Metric {
            diag: [1.0, -1.0, -1.0, -1.0],
        }
    }

    /// Arbitrary diagonal metric; test hook for negative controls.
    pub fn with_diag(diag: [f64; 4]) -> Self {
        Metric { diag }
    }

    pub fn diag(&self) -> [f64; 4] {
        self.diag
    }

    /// g_{mu mu} component (diagonal).
    pub fn g(&self, mu: usize) -> f64 {
        self.diag[mu]
    }

    /// v_mu = g_{mu nu} v^nu
    pub fn lower(&self, v: Vec4) -> Vec4 {
        [
            self.diag[0] * v[0],
            self.diag[1] * v[1],
            self.diag[2] * v[2],
            self.diag[3] * v[3],
        ]
    }

    /// v^mu = g^{mu nu} v_nu (inverse diagonal).
    pub fn raise(&self, v: Vec4) -> Vec4 {
        [
            v[0] / self.diag[0],
            v[1] / self.diag[1],
            v[2] / self.diag[2],
            v[3] / self.diag[3],
        ]
    }

    /// a^mu g_{mu nu} b^nu for real four-vectors with upper indices.
    pub fn dot(&self, a: Vec4, b: Vec4) -> f64 {
        (0..4).map(|mu| self.diag[mu] * a[mu] * b[mu]).sum()
    }

    /// Same contraction for complex-valued four-vectors (no conjugation).
    pub fn cdot(&self, a: CVec4, b: CVec4) -> Complex64 {
        (0..4).map(|mu| a[mu] * b[mu] * self.diag[mu]).sum()
    }

    /// eps^{mu nu rho sigma} with the +1 orientation on (0,1,2,3).
    pub fn epsilon_upper(&self, idx: [usize; 4]) -> f64 {
        perm_sign4(idx)
    }

    /// eps_{mu nu rho sigma}: all four indices lowered with this metric.
    pub fn epsilon_lower(&self, idx: [usize; 4]) -> f64 {
        perm_sign4(idx) * idx.iter().map(|&i| self.diag[i]).product::<f64>()
    }

    /// Projector orthogonal to p: d^{mu nu} = g^{mu nu} - p^mu p^nu / p^2.
    pub fn orthogonal_projector(&self, p: Vec4) -> Result<[[f64; 4]; 4]> {
        let p2 = self.dot(p, p);
        if p2 <= 0.0 {
            return Err(Error::NonTimelike(p2));
        }
        let mut d = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                let g_up = if mu == nu { 1.0 / self.diag[mu] } else { 0.0 };
                d[mu][nu] = g_up - p[mu] * p[nu] / p2;
            }
        }
        Ok(d)
    }
}

/// Sign of the permutation (0 when an index repeats).
pub fn perm_sign4(idx: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Hodge dual of an antisymmetric numeric tensor with upper indices:
/// `T*^{mu nu} = (1/2) eps^{mu nu rho sigma} T_{rho sigma}`.
pub fn dual4(metric: &Metric, t: &[[f64; 4]; 4]) -> Result<[[f64; 4]; 4]> {
    check_antisymmetric(t)?;
    let g = metric.diag();
    let mut out = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let mut acc = 0.0;
            for rho in 0..4 {
                for sigma in 0..4 {
                    let eps = metric.epsilon_upper([mu, nu, rho, sigma]);
                    if eps != 0.0 {
                        // lower both contracted indices
                        acc += 0.5 * eps * g[rho] * g[sigma] * t[rho][sigma];
                    }
                }
            }
            out[mu][nu] = acc;
        }
    }
    Ok(out)
}

/// Complex variant of [`dual4`].
pub fn dual4_complex(metric: &Metric, t: &[[Complex64; 4]; 4]) -> Result<[[Complex64; 4]; 4]> {
    let max = t
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    let mut asym: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            asym = asym.max((t[mu][nu] + t[nu][mu]).norm());
        }
    }
    if asym > 1e-10 * (1.0 + max) {
        return Err(Error::NotAntisymmetric(asym));
    }
    let g = metric.diag();
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for rho in 0..4 {
                for sigma in 0..4 {
                    let eps = metric.epsilon_upper([mu, nu, rho, sigma]);
                    if eps != 0.0 {
                        acc += t[rho][sigma] * (0.5 * eps * g[rho] * g[sigma]);
                    }
                }
            }
            out[mu][nu] = acc;
        }
    }
    Ok(out)
}

fn check_antisymmetric(t: &[[f64; 4]; 4]) -> Result<()> {
    let max = t
        .iter()
        .flatten()
        .map(|x| x.abs())
        .fold(0.0f64, f64::max);
    let mut asym: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            asym = asym.max((t[mu][nu] + t[nu][mu]).abs());
        }
    }
    if asym > 1e-10 * (1.0 + max) {
        return Err(Error::NotAntisymmetric(asym));
    }
    Ok(())
}

/// Pure boost along `dir` (unit 3-vector) with the given rapidity, acting on
/// upper-index four-vectors: x'^mu = L^mu_nu x^nu.
pub fn boost(dir: [f64; 3], rapidity: f64) -> [[f64; 4]; 4] {
    let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    let n = if norm > 0.0 {
        [dir[0] / norm, dir[1] / norm, dir[2] / norm]
    } else {
        [0.0, 0.0, 1.0]
    };
    let ch = rapidity.cosh();
    let sh = rapidity.sinh();
    let mut l = [[0.0; 4]; 4];
    l[0][0] = ch;
    for i in 0..3 {
        l[0][i + 1] = sh * n[i];
        l[i + 1][0] = sh * n[i];
        for j in 0..3 {
            l[i + 1][j + 1] = if i == j { 1.0 } else { 0.0 } + (ch - 1.0) * n[i] * n[j];
        }
    }
    l
}

/// Apply a Lorentz matrix to an upper-index four-vector.
pub fn apply4(l: &[[f64; 4]; 4], v: Vec4) -> Vec4 {
    let mut out = [0.0; 4];
    for mu in 0..4 {
        out[mu] = (0..4).map(|nu| l[mu][nu] * v[nu]).sum();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn epsilon_orientation() {
        let m = Metric::minkowski();
        assert_eq!(m.epsilon_upper([0, 1, 2, 3]), 1.0);
        assert_eq!(m.epsilon_lower([0, 1, 2, 3]), -1.0);
        assert_eq!(m.epsilon_upper([0, 1, 2, 2]), 0.0);
        assert_eq!(m.epsilon_upper([1, 0, 2, 3]), -1.0);
    }

    #[test]
    fn metric_inverse_is_identity() {
        let m = Metric::minkowski();
        let v = [1.3, -0.2, 0.7, 2.1];
        let back = m.raise(m.lower(v));
        for mu in 0..4 {
            assert!((back[mu] - v[mu]).abs() < 1e-15);
        }
    }

    #[test]
    fn dual_single_entry() {
        // T^{12} = -T^{21} = 1 maps onto the (0,3)/(3,0) slots.
        let m = Metric::minkowski();
        let mut t = [[0.0; 4]; 4];
        t[1][2] = 1.0;
        t[2][1] = -1.0;
        let d = dual4(&m, &t).unwrap();
        // independent oracle: direct permutation-parity contraction
        let mut oracle = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                for rho in 0..4 {
                    for sigma in 0..4 {
                        let low = [1.0, -1.0, -1.0, -1.0];
                        oracle[mu][nu] += 0.5
                            * perm_sign4([mu, nu, rho, sigma])
                            * low[rho]
                            * low[sigma]
                            * t[rho][sigma];
                    }
                }
            }
        }
        for mu in 0..4 {
            for nu in 0..4 {
                assert!((d[mu][nu] - oracle[mu][nu]).abs() < 1e-15);
                let expect_nonzero = (mu == 0 && nu == 3) || (mu == 3 && nu == 0);
                if expect_nonzero {
                    assert!(d[mu][nu].abs() > 0.5);
                } else {
                    assert_eq!(d[mu][nu], 0.0);
                }
            }
        }
        assert_eq!(d[0][3], 1.0);
    }

    #[test]
    fn dual_zero() {
        let m = Metric::minkowski();
        let z = [[0.0; 4]; 4];
        let d = dual4(&m, &z).unwrap();
        assert!(d.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn dual_rejects_symmetric() {
        let m = Metric::minkowski();
        let mut t = [[0.0; 4]; 4];
        t[1][2] = 1.0;
        t[2][1] = 1.0;
        assert!(matches!(dual4(&m, &t), Err(Error::NotAntisymmetric(_))));
    }

    #[test]
    fn boost_preserves_interval() {
        let m = Metric::minkowski();
        let l = boost([0.3, -0.5, 0.8], 0.9);
        let v = [2.0, 0.3, -0.4, 1.1];
        let w = apply4(&l, v);
        assert!((m.dot(w, w) - m.dot(v, v)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn double_dual_is_minus_identity(entries in proptest::array::uniform3(-5.0f64..5.0),
                                         more in proptest::array::uniform3(-5.0f64..5.0)) {
            let m = Metric::minkowski();
            let mut t = [[0.0; 4]; 4];
            let vals = [entries[0], entries[1], entries[2], more[0], more[1], more[2]];
            let slots = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            for (k, &(a, b)) in slots.iter().enumerate() {
                t[a][b] = vals[k];
                t[b][a] = -vals[k];
            }
            let dd = dual4(&m, &dual4(&m, &t).unwrap()).unwrap();
            for mu in 0..4 {
                for nu in 0..4 {
                    prop_assert!((dd[mu][nu] + t[mu][nu]).abs() < 1e-12);
                }
            }
        }
    }
}
