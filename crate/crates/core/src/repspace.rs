//! Dirac gamma algebra and its spin-s extension: tensor products of gamma
//! factors restricted to the symmetric subspace, the derived antisymmetric
//! tensor matrices, their duals, and the parity matrix.

use nalgebra::RowDVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron_at, CMat, CVec};
use crate::metric::{Metric, Vec4};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Spin label s = twice/2. The representation acts on symmetric rank-n
/// tensors over C^4 with n = 2s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinLabel {
    twice: u32,
}

impl SpinLabel {
    pub fn new(twice_s: u32) -> Result<Self> {
        if twice_s == 0 {
            return Err(Error::UnsupportedSpin(twice_s));
        }
        Ok(SpinLabel { twice: twice_s })
    }

    pub fn half() -> Self {
        SpinLabel { twice: 1 }
    }

    pub fn one() -> Self {
        SpinLabel { twice: 2 }
    }

    pub fn s(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn twice(&self) -> u32 {
        self.twice
    }

    /// Number of tensor factors n = 2s.
    pub fn factors(&self) -> usize {
        self.twice as usize
    }

    /// Dimension of the symmetric subspace: C(n+3, 3).
    pub fn dim(&self) -> usize {
        let n = self.factors();
        (n + 1) * (n + 2) * (n + 3) / 6
    }
}

/// The four Dirac-basis gamma matrices and the parity matrix gamma^0.
#[derive(Debug, Clone)]
pub struct GammaSet {
    pub gamma: [CMat; 4],
}

impl GammaSet {
    pub fn parity(&self) -> &CMat {
        &self.gamma[0]
    }
}

/// Dirac basis: gamma^0 = diag(I2, -I2), gamma^i = offdiag(sigma^i, -sigma^i).
pub fn build_gammas() -> GammaSet {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    #[rustfmt::skip]
    let g0 = CMat::from_row_slice(4, 4, &[
        o, z, z, z,
        z, o, z, z,
        z, z, -o, z,
        z, z, z, -o,
    ]);
    #[rustfmt::skip]
    let g1 = CMat::from_row_slice(4, 4, &[
        z, z, z, o,
        z, z, o, z,
        z, -o, z, z,
        -o, z, z, z,
    ]);
    #[rustfmt::skip]
    let g2 = CMat::from_row_slice(4, 4, &[
        z, z, z, -i,
        z, z, i, z,
        z, i, z, z,
        -i, z, z, z,
    ]);
    #[rustfmt::skip]
    let g3 = CMat::from_row_slice(4, 4, &[
        z, z, o, z,
        z, z, z, -o,
        -o, z, z, z,
        z, o, z, z,
    ]);
    GammaSet {
        gamma: [g0, g1, g2, g3],
    }
}

/// Isometry from the symmetric rank-n subspace onto (C^4)^(x n): a 4^n x D
/// matrix whose columns are the normalized symmetrized basis tensors, ordered
/// by non-decreasing index multisets (lexicographic).
pub fn sym_projector(n: usize) -> CMat {
    assert!(n >= 1, "need at least one tensor factor");
    let rows = 4usize.pow(n as u32);
    // enumerate multisets as sorted index tuples
    let mut multisets: Vec<Vec<usize>> = Vec::new();
    let mut stack = vec![(Vec::new(), 0usize)];
    while let Some((prefix, min)) = stack.pop() {
        if prefix.len() == n {
            multisets.push(prefix);
            continue;
        }
        // push in reverse so pops run in lexicographic order
        for idx in (min..4).rev() {
            let mut next = prefix.clone();
            next.push(idx);
            stack.push((next, idx));
        }
    }
    let col_of: std::collections::HashMap<Vec<usize>, usize> = multisets
        .iter()
        .enumerate()
        .map(|(k, m)| (m.clone(), k))
        .collect();

    let dim = multisets.len();
    let mut counts = vec![0usize; dim];
    let mut assignments = vec![0usize; rows];
    for row in 0..rows {
        let mut digits: Vec<usize> = (0..n).map(|k| (row >> (2 * (n - 1 - k))) & 3).collect();
        digits.sort_unstable();
        let col = col_of[&digits];
        assignments[row] = col;
        counts[col] += 1;
    }
    let mut iso = CMat::zeros(rows, dim);
    for row in 0..rows {
        let col = assignments[row];
        iso[(row, col)] = c(1.0 / (counts[col] as f64).sqrt(), 0.0);
    }
    iso
}

/// The full tensor-product matrix (1/2s) sum_k I (x) .. gamma^mu .. (x) I
/// before restriction to the symmetric subspace.
pub fn unprojected_beta(gammas: &GammaSet, spin: SpinLabel, mu: usize) -> CMat {
    let n = spin.factors();
    let rows = 4usize.pow(n as u32);
    let mut acc = CMat::zeros(rows, rows);
    for slot in 0..n {
        acc += kron_at(&gammas.gamma[mu], slot, n, 4);
    }
    acc * c(1.0 / (2.0 * spin.s()), 0.0)
}

/// Representation matrices for one spin: beta^mu, beta^{mu nu}, the dual
/// tensor, and the parity matrix, all restricted to the symmetric subspace.
#[derive(Debug, Clone)]
pub struct RepMatrices {
    pub spin: SpinLabel,
    pub beta: [CMat; 4],
    pub beta_tensor: [[CMat; 4]; 4],
    pub beta_dual: [[CMat; 4]; 4],
    pub parity: CMat,
    pub sym_projector: CMat,
    metric: Metric,
}

/// Build the representation for the given spin. Spins above 1 are rejected:
/// the symmetric restriction alone is not validated beyond n = 2.
pub fn build_rep(spin: SpinLabel, metric: &Metric) -> Result<RepMatrices> {
    if spin.twice() > 2 {
        return Err(Error::UnsupportedSpin(spin.twice()));
    }
    let gammas = build_gammas();
    let n = spin.factors();
    let iso = sym_projector(n);
    let compress = |m: &CMat| iso.adjoint() * m * &iso;

    let beta: [CMat; 4] = std::array::from_fn(|mu| compress(&unprojected_beta(&gammas, spin, mu)));

    let s = spin.s();
    let beta_tensor: [[CMat; 4]; 4] = std::array::from_fn(|mu| {
        std::array::from_fn(|nu| {
            (&beta[mu] * &beta[nu] - &beta[nu] * &beta[mu]) * c(0.0, s)
        })
    });
    let beta_dual = dual_matrix_tensor(metric, &beta_tensor)?;

    let mut parity_full = CMat::identity(1, 1);
    for _ in 0..n {
        parity_full = parity_full.kronecker(gammas.parity());
    }
    let parity = compress(&parity_full);

    Ok(RepMatrices {
        spin,
        beta,
        beta_tensor,
        beta_dual,
        parity,
        sym_projector: iso,
        metric: metric.clone(),
    })
}

/// Hodge dual of an antisymmetric tensor of matrices:
/// `T*^{mu nu} = (1/2) eps^{mu nu rho sigma} T_{rho sigma}`.
pub fn dual_matrix_tensor(metric: &Metric, t: &[[CMat; 4]; 4]) -> Result<[[CMat; 4]; 4]> {
    let scale = t
        .iter()
        .flatten()
        .map(|m| m.norm())
        .fold(0.0f64, f64::max);
    let mut asym: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            asym = asym.max((&t[mu][nu] + &t[nu][mu]).norm());
        }
    }
    if asym > 1e-10 * (1.0 + scale) {
        return Err(Error::NotAntisymmetric(asym));
    }
    let g = metric.diag();
    let dim = t[0][1].nrows();
    Ok(std::array::from_fn(|mu| {
        std::array::from_fn(|nu| {
            let mut acc = CMat::zeros(dim, dim);
            for rho in 0..4 {
                for sigma in 0..4 {
                    let eps = metric.epsilon_upper([mu, nu, rho, sigma]);
                    if eps != 0.0 {
                        acc += &t[rho][sigma] * c(0.5 * eps * g[rho] * g[sigma], 0.0);
                    }
                }
            }
            acc
        })
    }))
}

impl RepMatrices {
    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    /// beta^mu p_mu for an upper-index momentum.
    pub fn beta_dot(&self, p: Vec4) -> CMat {
        let p_low = self.metric.lower(p);
        let mut acc = CMat::zeros(self.dim(), self.dim());
        for mu in 0..4 {
            if p_low[mu] != 0.0 {
                acc += &self.beta[mu] * c(p_low[mu], 0.0);
            }
        }
        acc
    }

    /// The adjoint spinor xi-bar = xi^dagger parity, as a row vector.
    pub fn bar(&self, xi: &CVec) -> RowDVector<Complex64> {
        xi.adjoint() * &self.parity
    }

    /// Bilinear xi-bar M xi.
    pub fn bilinear(&self, xi: &CVec, m: &CMat) -> Complex64 {
        (self.bar(xi) * m * xi)[(0, 0)]
    }

    /// Indefinite norm xi-bar xi.
    pub fn indefinite_norm(&self, xi: &CVec) -> f64 {
        (self.bar(xi) * xi)[(0, 0)].re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig;

    fn rep(spin: SpinLabel) -> RepMatrices {
        build_rep(spin, &Metric::minkowski()).unwrap()
    }

    #[test]
    fn clifford_relations_exact() {
        let g = build_gammas();
        let m = Metric::minkowski();
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = &g.gamma[mu] * &g.gamma[nu] + &g.gamma[nu] * &g.gamma[mu];
                let expected = CMat::identity(4, 4) * c(2.0 * if mu == nu { m.g(mu) } else { 0.0 }, 0.0);
                // integer-entry matrices: equality must be exact
                assert_eq!((anti - expected).norm(), 0.0, "anticommutator ({mu},{nu})");
            }
        }
    }

    #[test]
    fn gamma_hermiticity_under_parity() {
        let g = build_gammas();
        for mu in 0..4 {
            let lhs = g.parity() * g.gamma[mu].adjoint() * g.parity();
            assert_eq!((lhs - &g.gamma[mu]).norm(), 0.0);
        }
    }

    #[test]
    fn spin_half_beta_is_gamma() {
        let r = rep(SpinLabel::half());
        let g = build_gammas();
        assert_eq!(r.dim(), 4);
        for mu in 0..4 {
            assert_eq!((&r.beta[mu] - &g.gamma[mu]).norm(), 0.0);
        }
    }

    #[test]
    fn spin_dimension_formula() {
        assert_eq!(SpinLabel::half().dim(), 4);
        assert_eq!(SpinLabel::one().dim(), 10);
    }

    #[test]
    fn unsupported_spin_rejected() {
        let three_half = SpinLabel::new(3).unwrap();
        assert!(matches!(
            build_rep(three_half, &Metric::minkowski()),
            Err(Error::UnsupportedSpin(3))
        ));
    }

    #[test]
    fn sym_projector_n1_is_identity() {
        let iso = sym_projector(1);
        assert_eq!((iso - CMat::identity(4, 4)).norm(), 0.0);
    }

    #[test]
    fn sym_projector_n2_isometry() {
        let iso = sym_projector(2);
        assert_eq!(iso.ncols(), 10);
        let gram = iso.adjoint() * &iso;
        assert!((gram - CMat::identity(10, 10)).norm() < 1e-13);
    }

    #[test]
    fn sym_projector_kills_antisymmetric_vectors() {
        let iso = sym_projector(2);
        // v (x) w - w (x) v for v = e0, w = e2
        let mut t = CVec::zeros(16);
        t[2] = c(1.0, 0.0); // e0 (x) e2
        t[8] = c(-1.0, 0.0); // e2 (x) e0

        let projected = iso.adjoint() * t;
        assert!(projected.norm() < 1e-14);
    }

    #[test]
    fn parity_squares_to_identity() {
        for spin in [SpinLabel::half(), SpinLabel::one()] {
            let r = rep(spin);
            let p2 = &r.parity * &r.parity;
            assert!((p2 - CMat::identity(r.dim(), r.dim())).norm() < 1e-13);
        }
    }

    #[test]
    fn beta_hermiticity_under_parity() {
        for spin in [SpinLabel::half(), SpinLabel::one()] {
            let r = rep(spin);
            for mu in 0..4 {
                let lhs = &r.parity * r.beta[mu].adjoint() * &r.parity;
                assert!((lhs - &r.beta[mu]).norm() < 1e-13, "mu={mu} spin={spin:?}");
            }
        }
    }

    #[test]
    fn beta_tensor_antisymmetric_and_consistent() {
        for spin in [SpinLabel::half(), SpinLabel::one()] {
            let r = rep(spin);
            let s = spin.s();
            for mu in 0..4 {
                for nu in 0..4 {
                    assert!((&r.beta_tensor[mu][nu] + &r.beta_tensor[nu][mu]).norm() < 1e-13);
                    // recompute the commutator freshly
                    let fresh = (&r.beta[mu] * &r.beta[nu] - &r.beta[nu] * &r.beta[mu]) * c(0.0, s);
                    assert!((&r.beta_tensor[mu][nu] - fresh).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn beta_tensor_spin_half_matches_gamma_commutator() {
        let r = rep(SpinLabel::half());
        let g = build_gammas();
        let fresh = (&g.gamma[1] * &g.gamma[2] - &g.gamma[2] * &g.gamma[1]) * c(0.0, 0.5);
        assert_eq!((&r.beta_tensor[1][2] - fresh).norm(), 0.0);
    }

    #[test]
    fn matrix_dual_involution() {
        for spin in [SpinLabel::half(), SpinLabel::one()] {
            let r = rep(spin);
            let m = Metric::minkowski();
            let dd = dual_matrix_tensor(&m, &r.beta_dual).unwrap();
            for mu in 0..4 {
                for nu in 0..4 {
                    assert!((&dd[mu][nu] + &r.beta_tensor[mu][nu]).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn rest_frame_spectrum_spin_half() {
        let r = rep(SpinLabel::half());
        let m = 1.7;
        let e = eig(&r.beta_dot([m, 0.0, 0.0, 0.0])).unwrap();
        let plus = e.values.iter().filter(|v| (*v - c(m, 0.0)).norm() < 1e-10).count();
        let minus = e.values.iter().filter(|v| (*v + c(m, 0.0)).norm() < 1e-10).count();
        assert_eq!((plus, minus), (2, 2));
    }

    #[test]
    fn boosted_spectrum_spin_half() {
        let r = rep(SpinLabel::half());
        let m = 1.1f64;
        let pvec = [0.6, -0.2, 0.4];
        let p0 = (m * m + pvec.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let e = eig(&r.beta_dot([p0, pvec[0], pvec[1], pvec[2]])).unwrap();
        let plus = e.values.iter().filter(|v| (*v - c(m, 0.0)).norm() < 1e-9).count();
        let minus = e.values.iter().filter(|v| (*v + c(m, 0.0)).norm() < 1e-9).count();
        assert_eq!((plus, minus), (2, 2));
    }

    #[test]
    fn spin_one_spectrum_vs_unprojected_oracle() {
        let spin = SpinLabel::one();
        let r = rep(spin);
        let m = 1.3;
        let projected = eig(&r.beta_dot([m, 0.0, 0.0, 0.0])).unwrap();

        // oracle: brute-force eigendecomposition of the 16x16 unprojected matrix
        let g = build_gammas();
        let full = unprojected_beta(&g, spin, 0) * c(m, 0.0);
        let unprojected = eig(&full).unwrap();

        let count = |vals: &[Complex64], target: f64| {
            vals.iter().filter(|v| (*v - c(target, 0.0)).norm() < 1e-9).count()
        };
        assert_eq!(count(&unprojected.values, m), 4);
        assert_eq!(count(&unprojected.values, 0.0), 8);
        assert_eq!(count(&unprojected.values, -m), 4);

        assert_eq!(count(&projected.values, m), 3);
        assert_eq!(count(&projected.values, 0.0), 4);
        assert_eq!(count(&projected.values, -m), 3);

        // spectrum real and symmetric under sign flip
        for v in &projected.values {
            assert!(v.im.abs() < 1e-10);
            assert!(projected.values.iter().any(|w| (w + v).norm() < 1e-9));
        }
    }
}
