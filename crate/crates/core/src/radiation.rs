//! Electromagnetic current, the free-particle radiated-rate diagnostic, and
//! the split of spinors into beta.p eigencomponents with a purity measure.
//!
//! Pure states (single eigenvalue sector) carry no rotating radius and do not
//! radiate; mixtures do, which is the free-particle inconsistency the
//! diagnostics below expose.

use num_complex::Complex64;

use crate::dynamics::{zbw_frequency, ExactPropagator};
use crate::error::{Error, Result};
use crate::linalg::{cond2, eig, CMat, CVec};
use crate::metric::{Metric, Vec4};
use crate::phase_space::{direct, PhaseState};
use crate::repspace::RepMatrices;

const COND_LIMIT: f64 = 1e8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Electromagnetic current j^mu = e xi-bar beta^mu xi = e u^mu.
pub fn current(rep: &RepMatrices, state: &PhaseState, charge: f64) -> Vec4 {
    let u = direct::re4(direct::velocity(rep, state));
    std::array::from_fn(|mu| charge * u[mu])
}

/// Radiated four-momentum rate at proper time `tau` along the free
/// trajectory: -(2/3) e^2 (rddot.rddot) u^mu with rddot = -w^2 r from the
/// closed-form rotation, evaluated analytically rather than by numerical
/// differentiation.
pub fn radiated_rate(
    rep: &RepMatrices,
    metric: &Metric,
    state: &PhaseState,
    tau: f64,
    charge: f64,
) -> Result<Vec4> {
    let prop = ExactPropagator::new(rep, metric, state)?;
    Ok(radiated_rate_at(rep, metric, &prop.state_at(tau), charge))
}

/// Same rate from an already-evolved state.
pub fn radiated_rate_at(
    rep: &RepMatrices,
    metric: &Metric,
    state: &PhaseState,
    charge: f64,
) -> Vec4 {
    let omega = zbw_frequency(rep, metric, state);
    let r = direct::re4(direct::radius(rep, metric, state));
    let rddot: Vec4 = std::array::from_fn(|mu| -omega * omega * r[mu]);
    let scalar = metric.dot(rddot, rddot); // spacelike: <= 0
    let u = direct::re4(direct::velocity(rep, state));
    std::array::from_fn(|mu| -(2.0 / 3.0) * charge * charge * scalar * u[mu])
}

/// Classification of one eigenvalue sector of beta.p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorLabel {
    /// Eigenvalue +sqrt(p^2).
    Particle,
    /// Eigenvalue -sqrt(p^2).
    Antiparticle,
    /// Residual sectors of higher-spin representations (reported, never
    /// silently dropped).
    Other,
}

/// One eigenvector of beta.p, normalized to xi-bar v = +-1.
#[derive(Debug, Clone)]
pub struct EigenMode {
    pub eigenvalue: f64,
    pub vector: CVec,
    /// Sign of the indefinite norm of `vector` (+1 or -1).
    pub norm_sign: f64,
    pub label: SectorLabel,
}

/// Indefinitely-orthonormalized eigenbasis of beta.p, ordered by descending
/// eigenvalue. Each vector satisfies xi-bar v = norm_sign in {+1, -1}; the
/// basis is orthogonal under the indefinite form, so sector coefficients are
/// read off by bilinear pairing.
pub fn eigenbasis(rep: &RepMatrices, metric: &Metric, p: Vec4) -> Result<Vec<EigenMode>> {
    eigenbasis_with_limit(rep, metric, p, COND_LIMIT)
}

/// [`eigenbasis`] with an explicit conditioning threshold. The indefinite
/// normalization degrades toward the light cone; representable f64 timelike
/// momenta max out around cond 9e7, so the default 1e8 limit flags only
/// numerically broken bases.
pub fn eigenbasis_with_limit(
    rep: &RepMatrices,
    metric: &Metric,
    p: Vec4,
    cond_limit: f64,
) -> Result<Vec<EigenMode>> {
    let p2 = metric.dot(p, p);
    if p2 <= 0.0 {
        return Err(Error::NonTimelike(p2));
    }
    let mass = p2.sqrt();
    let bp = rep.beta_dot(p);
    let decomposition = eig(&bp)?;
    let cond = decomposition.basis_condition();
    if cond > cond_limit {
        return Err(Error::DegenerateOperator(cond));
    }

    let n = decomposition.values.len();
    let cluster_tol = 1e-8 * (1.0 + mass);
    let mut modes: Vec<EigenMode> = Vec::with_capacity(n);
    let mut k = 0usize;
    while k < n {
        let ev = decomposition.values[k];
        if ev.im.abs() > 1e-8 * (1.0 + mass) {
            return Err(Error::Numerical(format!(
                "beta.p eigenvalue {ev} is not real for timelike p"
            )));
        }
        let mut cluster: Vec<CVec> = vec![decomposition.vectors.column(k).clone_owned()];
        while k + cluster.len() < n
            && (decomposition.values[k + cluster.len()] - ev).norm() < cluster_tol
        {
            cluster.push(
                decomposition
                    .vectors
                    .column(k + cluster.len())
                    .clone_owned(),
            );
        }
        k += cluster.len();

        // Gram-Schmidt under the indefinite form; sectors of these
        // representations are definite, so the norms stay away from zero.
        let mut basis: Vec<(CVec, f64)> = Vec::with_capacity(cluster.len());
        for mut v in cluster {
            for (w, sign) in &basis {
                let overlap = (rep.bar(w) * &v)[(0, 0)];
                v -= w * (overlap * c(*sign, 0.0));
            }
            let norm = rep.indefinite_norm(&v);
            if norm.abs() < 1e-10 {
                return Err(Error::Numerical(
                    "eigenvector with null indefinite norm; cannot normalize".into(),
                ));
            }
            v /= c(norm.abs().sqrt(), 0.0);
            basis.push((v, norm.signum()));
        }

        let label = if (ev.re - mass).abs() < 1e-6 * mass {
            SectorLabel::Particle
        } else if (ev.re + mass).abs() < 1e-6 * mass {
            SectorLabel::Antiparticle
        } else {
            SectorLabel::Other
        };
        for (vector, norm_sign) in basis {
            modes.push(EigenMode {
                eigenvalue: ev.re,
                vector,
                norm_sign,
                label,
            });
        }
    }
    // Conditioning of the basis actually used for coefficient extraction:
    // the indefinite normalization inflates the columns as p approaches the
    // light cone even though the raw eigenvectors stay well separated.
    let mut basis_matrix = CMat::zeros(n, n);
    for (k, mode) in modes.iter().enumerate() {
        basis_matrix.set_column(k, &mode.vector);
    }
    let cond_normalized = cond2(&basis_matrix);
    if cond_normalized > cond_limit {
        return Err(Error::DegenerateOperator(cond_normalized));
    }
    Ok(modes)
}

/// One eigenvalue sector of a decomposed spinor.
#[derive(Debug, Clone)]
pub struct EigenSector {
    pub eigenvalue: f64,
    pub label: SectorLabel,
    /// The full component of xi living in this sector.
    pub component: CVec,
    /// Signed sector weight: sum of norm_sign |c_a|^2 over the sector basis.
    pub weight: f64,
}

/// Decomposition of a spinor over the beta.p eigenbasis.
#[derive(Debug, Clone)]
pub struct EigenSplit {
    pub sectors: Vec<EigenSector>,
    /// |dominant sector weight| / sum of |weights|; 1 exactly on pure states.
    pub purity: f64,
}

impl EigenSplit {
    pub fn dominant(&self) -> &EigenSector {
        self.sectors
            .iter()
            .max_by(|a, b| a.weight.abs().partial_cmp(&b.weight.abs()).unwrap())
            .expect("split always has at least one sector")
    }
}

/// Split a state's spinor into beta.p eigencomponents.
pub fn eigen_split(rep: &RepMatrices, metric: &Metric, state: &PhaseState) -> Result<EigenSplit> {
    let modes = eigenbasis(rep, metric, state.p)?;
    let mass = metric.dot(state.p, state.p).sqrt();
    let cluster_tol = 1e-8 * (1.0 + mass);

    let mut sectors: Vec<EigenSector> = Vec::new();
    for mode in &modes {
        // coefficient in the indefinite-orthonormal basis
        let coeff = (rep.bar(&mode.vector) * &state.xi)[(0, 0)] * c(mode.norm_sign, 0.0);
        let contribution = &mode.vector * coeff;
        let weight = mode.norm_sign * coeff.norm_sqr();
        match sectors
            .iter_mut()
            .find(|s| (s.eigenvalue - mode.eigenvalue).abs() < cluster_tol)
        {
            Some(sector) => {
                sector.component += contribution;
                sector.weight += weight;
            }
            None => sectors.push(EigenSector {
                eigenvalue: mode.eigenvalue,
                label: mode.label,
                component: contribution,
                weight,
            }),
        }
    }

    let total: f64 = sectors.iter().map(|s| s.weight.abs()).sum();
    let dominant = sectors
        .iter()
        .map(|s| s.weight.abs())
        .fold(0.0f64, f64::max);
    let purity = if total > 0.0 { dominant / total } else { 0.0 };
    debug_assert!({
        let mut sum = CVec::zeros(state.xi.len());
        for s in &sectors {
            sum += &s.component;
        }
        (sum - &state.xi).norm() < 1e-9 * (1.0 + state.xi.norm())
    });
    Ok(EigenSplit { sectors, purity })
}

/// Diagnostics of the free charged spinning particle: the momentum never
/// changes and the oscillation frequency is fixed, yet a mixed state radiates
/// at a finite rate, even at rest.
#[derive(Debug, Clone)]
pub struct FreeRadiationReport {
    /// |dp/dtau| along the free trajectory (identically zero).
    pub momentum_rate: f64,
    /// Largest radiated-rate Euclidean norm over one sampled period.
    pub max_radiated_rate: f64,
    /// Largest Minkowski radius magnitude sqrt(-r.r) over the period.
    pub max_radius: f64,
    pub purity: f64,
    /// Oscillation frequency sqrt(p^2)/(lambda s), unaffected by radiation.
    pub zbw_frequency: f64,
}

/// Sample one zitterbewegung period of the free trajectory and report the
/// radiation diagnostics.
pub fn free_radiation_report(
    rep: &RepMatrices,
    metric: &Metric,
    state: &PhaseState,
    charge: f64,
    n_samples: usize,
) -> Result<FreeRadiationReport> {
    let prop = ExactPropagator::new(rep, metric, state)?;
    let period = std::f64::consts::TAU / zbw_frequency(rep, metric, state);
    let mut max_rate = 0.0f64;
    let mut max_radius = 0.0f64;
    for k in 0..n_samples.max(1) {
        let tau = period * k as f64 / n_samples.max(1) as f64;
        let evolved = prop.state_at(tau);
        let rate = radiated_rate_at(rep, metric, &evolved, charge);
        max_rate = max_rate.max(rate.iter().map(|v| v * v).sum::<f64>().sqrt());
        let r = direct::re4(direct::radius(rep, metric, &evolved));
        max_radius = max_radius.max((-metric.dot(r, r)).max(0.0).sqrt());
    }
    Ok(FreeRadiationReport {
        momentum_rate: 0.0,
        max_radiated_rate: max_rate,
        max_radius,
        purity: eigen_split(rep, metric, state)?.purity,
        zbw_frequency: zbw_frequency(rep, metric, state),
    })
}
