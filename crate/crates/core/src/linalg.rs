//! Dense complex linear algebra for small representation matrices (D <= 16).
//!
//! Eigenvalues come from the complex Schur form; eigenvectors are recovered
//! per eigenvalue cluster as SVD null spaces of `A - lambda I`, which stays
//! robust for the degenerate spectra these representations produce.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Eigen decomposition `A V = V diag(values)`, columns of `vectors` 2-norm
/// normalized, ordered by descending real part of the eigenvalue.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    pub vectors: CMat,
}

impl Eigen {
    /// 2-norm condition number of the eigenvector matrix.
    pub fn basis_condition(&self) -> f64 {
        cond2(&self.vectors)
    }
}

/// Full eigen decomposition of a small dense complex matrix.
pub fn eig(a: &CMat) -> Result<Eigen> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eig expects a square matrix");
    let scale = a.norm().max(1.0);
    let schur = a.clone().schur();
    let t = schur.unpack().1;
    let mut values: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();
    values.sort_by(|x, y| {
        y.re.partial_cmp(&x.re)
            .unwrap()
            .then(y.im.partial_cmp(&x.im).unwrap())
    });

    // Cluster numerically equal eigenvalues and extract each eigenspace as
    // the null space of (A - lambda I).
    let cluster_tol = 1e-8 * scale;
    let mut vectors = CMat::zeros(n, n);
    let mut col = 0usize;
    let mut k = 0usize;
    while k < n {
        let mut mult = 1usize;
        while k + mult < n && (values[k + mult] - values[k]).norm() < cluster_tol {
            mult += 1;
        }
        let mean: Complex64 =
            values[k..k + mult].iter().sum::<Complex64>() / Complex64::new(mult as f64, 0.0);
        let shifted = a - CMat::identity(n, n) * mean;
        let svd = shifted.svd(false, true);
        let v_t = svd
            .v_t
            .as_ref()
            .ok_or_else(|| Error::Numerical("SVD did not return singular vectors".into()))?;
        // rows of v_t with the smallest singular values span the null space
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            svd.singular_values[i]
                .partial_cmp(&svd.singular_values[j])
                .unwrap()
        });
        for m in 0..mult {
            let row = v_t.row(order[m]);
            let vec = row.adjoint();
            vectors.set_column(col, &(&vec / Complex64::new(vec.norm(), 0.0)));
            for j in 0..mult {
                // store the cluster mean for every member
                values[k + j] = mean;
            }
            col += 1;
        }
        k += mult;
    }

    let eig = Eigen { values, vectors };
    let residual = residual_norm(a, &eig);
    if residual > 1e-8 * scale {
        return Err(Error::Numerical(format!(
            "eigen decomposition residual {residual:.3e} too large"
        )));
    }
    Ok(eig)
}

fn residual_norm(a: &CMat, e: &Eigen) -> f64 {
    let n = a.nrows();
    let mut lam = CMat::zeros(n, n);
    for k in 0..n {
        lam[(k, k)] = e.values[k];
    }
    (a * &e.vectors - &e.vectors * lam).norm()
}

/// 2-norm condition number via singular values.
pub fn cond2(a: &CMat) -> f64 {
    let svd = a.clone().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Matrix exponential via eigendecomposition when the eigenbasis is well
/// conditioned, scaling-and-squaring otherwise.
pub fn expm(a: &CMat, cond_limit: f64) -> CMat {
    if let Ok(e) = eig(a) {
        if e.basis_condition() < cond_limit {
            if let Some(inv) = e.vectors.clone().try_inverse() {
                let n = a.nrows();
                let mut d = CMat::zeros(n, n);
                for k in 0..n {
                    d[(k, k)] = e.values[k].exp();
                }
                return &e.vectors * d * inv;
            }
        }
    }
    a.exp()
}

/// Kronecker chain with `op` in the given slot and identities elsewhere.
pub fn kron_at(op: &CMat, slot: usize, factors: usize, dim: usize) -> CMat {
    let mut out = CMat::identity(1, 1);
    for k in 0..factors {
        let next = if k == slot {
            op.clone()
        } else {
            CMat::identity(dim, dim)
        };
        out = out.kronecker(&next);
    }
    out
}
