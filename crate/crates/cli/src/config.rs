//! Scenario configuration: a single TOML file with nested sections. Complex
//! numbers are written as two-element arrays [re, im].

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Deserialize;

use zitter_core::em_coupling::{FieldConfig, FieldKind};
use zitter_core::metric::Metric;
use zitter_core::phase_space::PhaseState;
use zitter_core::radiation::{eigenbasis, SectorLabel};
use zitter_core::repspace::{build_rep, RepMatrices, SpinLabel};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Spin as a decimal: 0.5 or 1.0.
    pub spin: f64,
    /// Mass in natural units (fixes the momentum scale).
    pub mass: f64,
    /// Optional physical mass in MeV for SI frequency conversion.
    #[serde(default)]
    pub mass_mev: Option<f64>,
    /// Action constant in units of hbar.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Initial p^mu. When the energy slot is <= 0 it is filled from the mass shell.
    pub momentum: [f64; 4],
    #[serde(default)]
    pub position: [f64; 4],
    pub tau_end: f64,
    pub dt: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default)]
    pub seed: u64,
    pub spinor: SpinorSpec,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    pub output: OutputSpec,
}

fn default_lambda() -> f64 {
    1.0
}

fn default_stride() -> usize {
    1
}

fn default_method() -> String {
    "exact".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinorSpec {
    /// "eigen" | "components" | "mix"
    pub kind: String,
    /// Sector for eigen/mix: "+" or "-".
    #[serde(default = "default_sector")]
    pub sector: String,
    /// Polarization index within the sector.
    #[serde(default)]
    pub polarization: usize,
    /// Complex mixing weight for kind = "mix": xi = (xi_sector + alpha
    /// xi_other) / |..|, with both vectors at the same polarization index.
    #[serde(default)]
    pub alpha: Option<[f64; 2]>,
    /// Explicit components for kind = "components".
    #[serde(default)]
    pub components: Option<Vec<[f64; 2]>>,
}

fn default_sector() -> String {
    "+".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    /// "none" | "uniform" | "plane-wave"
    pub kind: String,
    #[serde(default)]
    pub charge: f64,
    /// F_{mu nu} (lower indices) for kind = "uniform".
    #[serde(default)]
    pub f: Option<[[f64; 4]; 4]>,
    /// a^mu for kind = "plane-wave".
    #[serde(default)]
    pub amplitude: Option<[f64; 4]>,
    /// k^mu for kind = "plane-wave" (lightlike, transverse to amplitude).
    #[serde(default)]
    pub wave_vector: Option<[f64; 4]>,
    /// Constant gauge offset added to A_nu.
    #[serde(default)]
    pub gauge_offset: [f64; 4],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub samples: String,
    pub audit: String,
}

/// Everything needed to run a scenario.
pub struct Scenario {
    pub config: ScenarioConfig,
    pub rep: RepMatrices,
    pub metric: Metric,
    pub state: PhaseState,
    pub field: FieldConfig,
}

pub fn parse(text: &str) -> Result<ScenarioConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
}

pub fn build(config: ScenarioConfig) -> Result<Scenario, CliError> {
    let metric = Metric::minkowski();
    let spin = spin_label(config.spin)?;
    let rep = build_rep(spin, &metric).map_err(|e| CliError::Config(e.to_string()))?;

    if config.mass <= 0.0 {
        return Err(CliError::Config("mass must be positive".into()));
    }
    if config.lambda == 0.0 {
        return Err(CliError::Config("lambda must be nonzero".into()));
    }

    let mut p = config.momentum;
    if p[0] <= 0.0 {
        // fill the energy from the mass shell
        p[0] = (config.mass * config.mass + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
    }
    let p2 = metric.dot(p, p);
    if p2 <= 0.0 {
        return Err(CliError::Config(format!(
            "momentum must be timelike, p.p = {p2:.6e}"
        )));
    }
    if (p2.sqrt() - config.mass).abs() > 1e-6 * config.mass {
        return Err(CliError::Config(format!(
            "momentum is off the mass shell: sqrt(p.p) = {} vs mass = {}",
            p2.sqrt(),
            config.mass
        )));
    }

    let xi = resolve_spinor(&rep, &metric, p, &config.spinor)?;
    let state = PhaseState::new(config.position, p, xi, config.lambda, spin);
    state
        .validate(&rep, &metric)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let field = resolve_field(config.field.as_ref(), &metric)?;

    match config.method.as_str() {
        "exact" | "rk4" => {}
        other => {
            return Err(CliError::Config(format!(
                "unknown method '{other}' (expected 'exact' or 'rk4')"
            )))
        }
    }
    if config.field.is_some()
        && config
            .field
            .as_ref()
            .is_some_and(|f| f.kind != "none")
        && config.method == "exact"
    {
        return Err(CliError::Config(
            "coupled runs need method = \"rk4\"".into(),
        ));
    }

    Ok(Scenario {
        config,
        rep,
        metric,
        state,
        field,
    })
}

pub fn spin_label(spin: f64) -> Result<SpinLabel, CliError> {
    let twice = (2.0 * spin).round();
    if (2.0 * spin - twice).abs() > 1e-12 || twice < 1.0 {
        return Err(CliError::Config(format!(
            "spin must be a positive half-integer, got {spin}"
        )));
    }
    SpinLabel::new(twice as u32).map_err(|e| CliError::Config(e.to_string()))
}

/// Resolve a spinor spec at the given momentum. Eigen and mix specs index the
/// deterministic sector bases returned by the eigen decomposition.
pub fn resolve_spinor(
    rep: &RepMatrices,
    metric: &Metric,
    p: [f64; 4],
    spec: &SpinorSpec,
) -> Result<DVector<Complex64>, CliError> {
    match spec.kind.as_str() {
        "components" => {
            let comps = spec.components.as_ref().ok_or_else(|| {
                CliError::Config("spinor.kind = \"components\" needs spinor.components".into())
            })?;
            if comps.len() != rep.dim() {
                return Err(CliError::Config(format!(
                    "spinor has {} components, the representation needs {}",
                    comps.len(),
                    rep.dim()
                )));
            }
            Ok(DVector::from_iterator(
                comps.len(),
                comps.iter().map(|[re, im]| Complex64::new(*re, *im)),
            ))
        }
        "eigen" => {
            let v = sector_vector(rep, metric, p, &spec.sector, spec.polarization)?;
            Ok(v)
        }
        "mix" => {
            let alpha = spec
                .alpha
                .map(|[re, im]| Complex64::new(re, im))
                .unwrap_or_else(|| Complex64::new(0.0, 1.0));
            let main = sector_vector(rep, metric, p, &spec.sector, spec.polarization)?;
            let other = sector_vector(
                rep,
                metric,
                p,
                if spec.sector == "+" { "-" } else { "+" },
                spec.polarization,
            )?;
            let mixed = main + other * alpha;
            let norm = mixed.norm();
            if norm < 1e-12 {
                return Err(CliError::Config("mix produced a null spinor".into()));
            }
            Ok(mixed / Complex64::new(norm, 0.0))
        }
        other => Err(CliError::Config(format!(
            "unknown spinor kind '{other}' (expected eigen, components, or mix)"
        ))),
    }
}

fn sector_vector(
    rep: &RepMatrices,
    metric: &Metric,
    p: [f64; 4],
    sector: &str,
    polarization: usize,
) -> Result<DVector<Complex64>, CliError> {
    let want = match sector {
        "+" => SectorLabel::Particle,
        "-" => SectorLabel::Antiparticle,
        other => {
            return Err(CliError::Config(format!(
                "unknown sector '{other}' (expected '+' or '-')"
            )))
        }
    };
    let modes = eigenbasis(rep, metric, p).map_err(|e| CliError::Config(e.to_string()))?;
    let sector_modes: Vec<_> = modes.into_iter().filter(|m| m.label == want).collect();
    sector_modes
        .get(polarization)
        .map(|m| m.vector.clone())
        .ok_or_else(|| {
            CliError::Config(format!(
                "polarization index {polarization} out of range for sector {sector} ({} modes)",
                sector_modes.len()
            ))
        })
}

pub fn resolve_field(spec: Option<&FieldSpec>, metric: &Metric) -> Result<FieldConfig, CliError> {
    let Some(spec) = spec else {
        return Ok(FieldConfig::free());
    };
    let kind = match spec.kind.as_str() {
        "none" => FieldKind::None,
        "uniform" => FieldKind::UniformF {
            f: spec.f.ok_or_else(|| {
                CliError::Config("field.kind = \"uniform\" needs field.f".into())
            })?,
        },
        "plane-wave" => FieldKind::PlaneWave {
            amplitude: spec.amplitude.ok_or_else(|| {
                CliError::Config("field.kind = \"plane-wave\" needs field.amplitude".into())
            })?,
            wave_vector: spec.wave_vector.ok_or_else(|| {
                CliError::Config("field.kind = \"plane-wave\" needs field.wave_vector".into())
            })?,
        },
        other => {
            return Err(CliError::Config(format!(
                "unknown field kind '{other}' (expected none, uniform, or plane-wave)"
            )))
        }
    };
    let mut field = FieldConfig::new(kind, spec.charge);
    field.gauge_offset = spec.gauge_offset;
    field
        .validate(metric)
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(field)
}

/// FNV-1a over the raw config bytes, recorded in every artifact.
pub fn config_hash(text: &str) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}
