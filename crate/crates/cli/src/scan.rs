//! The `scan` subcommand: sweep one parameter, one summary row per value,
//! rows computed concurrently.

use std::fmt::Write as _;

use zitter_core::dynamics::{oscillation_frequency, zbw_frequency};
use zitter_core::em_coupling::FieldKind;
use zitter_core::metric::Metric;
use zitter_core::phase_space::PhaseState;
use zitter_core::radiation::radiated_rate_at;
use zitter_core::repspace::RepMatrices;

use crate::config::{self, ScenarioConfig};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanParameter {
    Lambda,
    MixWeight,
    FieldStrength,
}

impl ScanParameter {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "lambda" => Ok(ScanParameter::Lambda),
            "mix-weight" => Ok(ScanParameter::MixWeight),
            "field-strength" => Ok(ScanParameter::FieldStrength),
            other => Err(CliError::Config(format!(
                "unknown scan parameter '{other}' (expected lambda, mix-weight, or field-strength)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanRow {
    pub value: f64,
    pub zbw_amplitude: f64,
    pub zbw_frequency: f64,
    pub purity: f64,
    pub max_radiation_rate: f64,
}

/// Apply the swept parameter to a scenario configuration.
fn apply(
    base: &ScenarioConfig,
    parameter: ScanParameter,
    value: f64,
) -> Result<ScenarioConfig, CliError> {
    let mut cfg = base.clone();
    match parameter {
        ScanParameter::Lambda => {
            if value == 0.0 {
                return Err(CliError::Config("lambda sweep crossed zero".into()));
            }
            cfg.lambda = value;
        }
        ScanParameter::MixWeight => {
            // quarter-phase mixture of weight `value` on top of the
            // configured sector/polarization
            cfg.spinor.kind = "mix".into();
            cfg.spinor.alpha = Some([0.0, value]);
            cfg.spinor.components = None;
        }
        ScanParameter::FieldStrength => {
            // scale the coupling: the zero row is exactly the free run
            let Some(field) = cfg.field.as_mut() else {
                return Err(CliError::Config(
                    "field-strength sweep needs a [field] section".into(),
                ));
            };
            field.charge *= value;
        }
    }
    Ok(cfg)
}

fn summarize(cfg: ScenarioConfig, value: f64) -> Result<ScanRow, CliError> {
    let scenario = config::build(cfg)?;
    summarize_from_run(&scenario, value)
}

fn summarize_from_run(scenario: &config::Scenario, value: f64) -> Result<ScanRow, CliError> {
    let rep: &RepMatrices = &scenario.rep;
    let metric: &Metric = &scenario.metric;
    let method_cfg = zitter_core::dynamics::IntegratorConfig {
        method: if scenario.config.method == "rk4"
            || !matches!(scenario.field.kind, FieldKind::None)
        {
            zitter_core::dynamics::Method::Rk4
        } else {
            zitter_core::dynamics::Method::ExactPropagator
        },
        dt: scenario.config.dt,
        tau_end: scenario.config.tau_end,
        stride: scenario.config.stride,
    };

    let field_active = !matches!(scenario.field.kind, FieldKind::None);
    // purity: the minimum over the run (the dip is the informative number
    // during an interaction; for free runs it is constant anyway)
    let (samples, purity, kinetic_mid) = if field_active {
        let (samples, report) =
            zitter_core::em_coupling::integrate_em(rep, metric, &scenario.state, &scenario.field, &method_cfg)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
        let purity = report
            .rows
            .iter()
            .map(|r| r.purity)
            .fold(f64::INFINITY, f64::min);
        let mid = report.rows[report.rows.len() / 2].kinetic_p;
        (samples, purity, mid)
    } else {
        let samples = zitter_core::dynamics::integrate(rep, metric, &scenario.state, &method_cfg)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let last = samples.last().unwrap();
        let st = PhaseState::new(last.x, last.p, last.xi.clone(), last.lambda, rep.spin);
        let purity = zitter_core::radiation::eigen_split(rep, metric, &st)
            .map(|s| s.purity)
            .unwrap_or(f64::NAN);
        (samples, purity, scenario.state.p)
    };

    let zbw_amplitude = samples
        .iter()
        .map(|s| (-metric.dot(s.radius, s.radius)).max(0.0).sqrt())
        .fold(0.0f64, f64::max);
    let amp = |mu: usize| {
        samples
            .iter()
            .map(|s| s.radius[mu].abs())
            .fold(0.0f64, f64::max)
    };
    let best = (0..4)
        .max_by(|&a, &b| amp(a).partial_cmp(&amp(b)).unwrap())
        .filter(|&mu| amp(mu) > 1e-8); // below this the crossings are noise
    let measured = best.and_then(|mu| {
        let series: Vec<(f64, f64)> = samples.iter().map(|s| (s.tau, s.radius[mu])).collect();
        oscillation_frequency(&series)
    });
    let frequency = measured.unwrap_or_else(|| {
        // no measurable oscillation: report the closed-form frequency at the
        // (mid-run kinetic) momentum
        let mut st = scenario.state.clone();
        st.p = kinetic_mid;
        zbw_frequency(rep, metric, &st)
    });
    let max_rate = samples
        .iter()
        .map(|s| {
            let st = PhaseState::new(s.x, s.p, s.xi.clone(), s.lambda, rep.spin);
            let rate = radiated_rate_at(rep, metric, &st, scenario.field.charge);
            rate.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .fold(0.0f64, f64::max);

    Ok(ScanRow {
        value,
        zbw_amplitude,
        zbw_frequency: frequency,
        purity,
        max_radiation_rate: max_rate,
    })
}

/// Sweep the parameter across `steps` evenly spaced values (inclusive ends),
/// computing rows concurrently but emitting them in order.
pub fn execute(
    base: &ScenarioConfig,
    parameter: ScanParameter,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<Vec<ScanRow>, CliError> {
    if steps < 1 {
        return Err(CliError::Config("steps must be at least 1".into()));
    }
    let values: Vec<f64> = (0..steps)
        .map(|k| {
            if steps == 1 {
                from
            } else {
                from + (to - from) * k as f64 / (steps - 1) as f64
            }
        })
        .collect();

    let mut rows: Vec<Option<Result<ScanRow, CliError>>> = Vec::new();
    rows.resize_with(values.len(), || None);
    let parallelism = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(values.len().max(1));
    std::thread::scope(|scope| {
        let mut remaining: &mut [Option<Result<ScanRow, CliError>>] = &mut rows;
        let mut offset = 0usize;
        let chunk = values.len().div_ceil(parallelism);
        while !remaining.is_empty() {
            let take = chunk.min(remaining.len());
            let (head, tail) = remaining.split_at_mut(take);
            let vals = &values[offset..offset + take];
            let base_ref = &base;
            scope.spawn(move || {
                for (slot, &v) in head.iter_mut().zip(vals) {
                    *slot = Some(apply(base_ref, parameter, v).and_then(|cfg| summarize(cfg, v)));
                }
            });
            remaining = tail;
            offset += take;
        }
    });

    rows.into_iter()
        .map(|r| r.expect("every slot is filled"))
        .collect()
}

pub fn render(rows: &[ScanRow], config_hash: &str, parameter: ScanParameter) -> String {
    let mut out = String::new();
    let name = match parameter {
        ScanParameter::Lambda => "lambda",
        ScanParameter::MixWeight => "mix-weight",
        ScanParameter::FieldStrength => "field-strength",
    };
    let _ = writeln!(out, "# config_hash={config_hash} param={name}");
    let _ = writeln!(out, "value,zbw_amplitude,zbw_frequency,purity,max_radiation_rate");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            r.value, r.zbw_amplitude, r.zbw_frequency, r.purity, r.max_radiation_rate
        );
    }
    out
}
