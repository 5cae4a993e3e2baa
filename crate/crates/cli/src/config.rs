//! Experiment configuration: JSON file, defaults, validation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::error::Category;
use trotter_lowenergy::bounds::{DeltaPrimePolicy, DEFAULT_CHAIN_THETA, DEFAULT_SLACK};
use trotter_lowenergy::cost::DEFAULT_R_CAP;
use trotter_lowenergy::formulas::{log_spaced, FormulaSchedule, Stage};
use trotter_lowenergy::pauli::{heisenberg_chain, tfim_chain, Boundary, ModelFile, DEFAULT_DENSE_LIMIT};
use trotter_lowenergy::{Hamiltonian, Schedule};

use crate::CliError;

/// Largest dense limit a config may request.
pub const MAX_DENSE_LIMIT: usize = 14;

/// Reference text for every configuration key, shown by `--help`.
pub const CONFIG_KEYS: &str = "\
Config keys (JSON object; unknown keys are rejected):
  name                 model label used in reports (default derived from the model)
  model                exactly one of:
    generator          \"tfim\" | \"heisenberg\", with
      n_qubits         chain length
      boundary         \"open\" (default) | \"periodic\"
      j_zz, h_x        TFIM couplings (default 1, 1)
      j                Heisenberg coupling (default 1)
      psd_shift        Heisenberg: shift every bond to be PSD (default false)
    inline             {\"n_qubits\": n, \"groups\": [[{\"pauli\": \"X0 Z1\", \"coeff\": c}, ...], ...]}
    file               path to a JSON file holding the inline form (relative to the config)
  schedule
    name               \"lie-trotter\" | \"strang\" | \"suzuki\" | \"custom\"
    order              Suzuki order (even) or declared order of a custom schedule
    stages             custom only: [{\"group\": m, \"coeff\": a}, ...], zero-based groups
  s_grid               list of step sizes, or {\"min\", \"max\", \"points\"} log-spaced
                       (default 8 points from 1e-3 to 1e-1)
  delta                {\"percentiles\": [..]} (default [25, 50]) or {\"absolute\": [..]}
  delta_prime          {\"target\": theta} (default 1e-3) or {\"gap\": g} for delta' = delta + g
  slack                remainder slack on leading-order bounds (default 1.25)
  chain_theta          leakage share allowed in the cutoff chain (default 0.1)
  dense_limit          largest qubit count diagonalized densely (default 12, max 14)
  seed                 seed for randomized checks (default 0)
  leakage              {\"operators\": 50, \"locality\": k, \"percentiles\": [..5], \"gaps\": [..]}
  cost                 {\"total_time\": 1, \"eps_target\": 1e-6, \"delta_percentile\": 25,
                        \"unit_constant\": 1, \"r_cap\": 1048576, \"orders\": [1, 2, 3]}
  output               {\"path\": \"report.csv\", \"format\": \"csv\" | \"json\"}
";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Tfim,
    Heisenberg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub generator: Option<Generator>,
    pub n_qubits: Option<usize>,
    pub boundary: Option<Boundary>,
    pub j_zz: Option<f64>,
    pub h_x: Option<f64>,
    pub j: Option<f64>,
    pub psd_shift: Option<bool>,
    pub inline: Option<ModelFile>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSpec {
    pub group: usize,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub name: String,
    pub order: Option<usize>,
    pub stages: Option<Vec<StageSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Log(LogGrid),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaSpec {
    pub percentiles: Option<Vec<f64>>,
    pub absolute: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaPrimeSpec {
    pub target: Option<f64>,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeakageSpec {
    pub operators: Option<usize>,
    pub locality: Option<usize>,
    pub percentiles: Option<Vec<f64>>,
    pub gaps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    pub total_time: Option<f64>,
    pub eps_target: Option<f64>,
    pub delta_percentile: Option<f64>,
    pub unit_constant: Option<f64>,
    pub r_cap: Option<u64>,
    pub orders: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// The config file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub name: Option<String>,
    pub model: ModelSpec,
    pub schedule: ScheduleSpec,
    pub s_grid: Option<GridSpec>,
    pub delta: Option<DeltaSpec>,
    pub delta_prime: Option<DeltaPrimeSpec>,
    pub slack: Option<f64>,
    pub chain_theta: Option<f64>,
    pub dense_limit: Option<usize>,
    pub seed: Option<u64>,
    pub leakage: Option<LeakageSpec>,
    pub cost: Option<CostSpec>,
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaCutoff {
    Percentile(f64),
    Absolute(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakageSettings {
    pub operators: usize,
    pub locality: Option<usize>,
    pub percentiles: Vec<f64>,
    /// Gaps `Λ′ − Λ`; `None` derives five gaps from `R` and `λ`.
    pub gaps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostSettings {
    pub total_time: f64,
    pub eps_target: f64,
    pub delta_percentile: f64,
    pub unit_constant: f64,
    pub r_cap: u64,
    pub orders: Vec<u32>,
}

/// Validated configuration with defaults filled in.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub hamiltonian: Hamiltonian,
    pub schedule: Schedule,
    pub s_grid: Vec<f64>,
    pub deltas: Vec<DeltaCutoff>,
    pub delta_prime: DeltaPrimePolicy<f64>,
    pub slack: f64,
    pub chain_theta: f64,
    pub dense_limit: usize,
    pub seed: u64,
    pub leakage: LeakageSettings,
    pub cost: CostSettings,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Parses JSON text. Syntax errors carry line and column; type errors and
/// unknown keys are validation errors naming the offending field.
pub fn parse_raw(text: &str) -> Result<RawConfig, CliError> {
    serde_json::from_str(text).map_err(|e| match e.classify() {
        Category::Syntax | Category::Eof | Category::Io => CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
        Category::Data => {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.starts_with("unknown field") || msg.starts_with("missing field"))
                .unwrap_or("config")
                .to_string();
            CliError::Validation { field, message: msg }
        }
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let raw = parse_raw(&text)?;
    validate(raw, path.parent())
}

fn finite_positive(field: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(invalid(field, format!("must be positive and finite, got {x}")))
    }
}

fn check_percentile(field: &str, p: f64) -> Result<f64, CliError> {
    if (0.0..=100.0).contains(&p) {
        Ok(p)
    } else {
        Err(invalid(field, format!("percentile {p} outside [0, 100]")))
    }
}

pub fn validate(raw: RawConfig, base: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    let dense_limit = raw.dense_limit.unwrap_or(DEFAULT_DENSE_LIMIT);
    if dense_limit == 0 || dense_limit > MAX_DENSE_LIMIT {
        return Err(invalid("dense_limit", format!("must lie in 1..={MAX_DENSE_LIMIT}")));
    }
    let (hamiltonian, derived_name) = build_model(&raw.model, base, dense_limit)?;
    let name = raw.name.unwrap_or(derived_name);
    if name.is_empty() || name.contains([',', '"', '\n', '\r']) {
        return Err(invalid("name", "must be non-empty without commas, quotes or newlines"));
    }
    let schedule = build_schedule(&raw.schedule, hamiltonian.groups().len())?;

    let s_grid = match raw.s_grid {
        None => log_spaced(1e-3, 1e-1, 8),
        Some(GridSpec::List(v)) => v,
        Some(GridSpec::Log(g)) => {
            finite_positive("s_grid.min", g.min)?;
            finite_positive("s_grid.max", g.max)?;
            if g.points == 0 || g.max < g.min {
                return Err(invalid("s_grid", "need points >= 1 and max >= min"));
            }
            log_spaced(g.min, g.max, g.points)
        }
    };
    if s_grid.is_empty() {
        return Err(invalid("s_grid", "grid is empty"));
    }
    for &s in &s_grid {
        finite_positive("s_grid", s)?;
    }

    let deltas = match raw.delta {
        None => vec![DeltaCutoff::Percentile(25.0), DeltaCutoff::Percentile(50.0)],
        Some(DeltaSpec {
            percentiles: Some(p),
            absolute: None,
        }) => p
            .into_iter()
            .map(|x| check_percentile("delta.percentiles", x).map(DeltaCutoff::Percentile))
            .collect::<Result<_, _>>()?,
        Some(DeltaSpec {
            percentiles: None,
            absolute: Some(a),
        }) => a
            .into_iter()
            .map(|x| {
                if x.is_finite() {
                    Ok(DeltaCutoff::Absolute(x))
                } else {
                    Err(invalid("delta.absolute", "energies must be finite"))
                }
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(invalid("delta", "give exactly one of `percentiles`, `absolute`")),
    };
    if deltas.is_empty() {
        return Err(invalid("delta", "grid is empty"));
    }

    let delta_prime = match raw.delta_prime {
        None => DeltaPrimePolicy::Auto { target: 1e-3 },
        Some(DeltaPrimeSpec {
            target: Some(t),
            gap: None,
        }) => {
            if !(t > 0.0 && t <= 1.0) {
                return Err(invalid("delta_prime.target", "must lie in (0, 1]"));
            }
            DeltaPrimePolicy::Auto { target: t }
        }
        Some(DeltaPrimeSpec {
            target: None,
            gap: Some(g),
        }) => {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(invalid("delta_prime.gap", "must be nonnegative"));
            }
            DeltaPrimePolicy::Gap(g)
        }
        Some(_) => return Err(invalid("delta_prime", "give exactly one of `target`, `gap`")),
    };

    let slack = raw.slack.unwrap_or(DEFAULT_SLACK);
    if !(slack >= 1.0 && slack.is_finite()) {
        return Err(invalid("slack", "must be at least 1"));
    }
    let chain_theta = raw.chain_theta.unwrap_or(DEFAULT_CHAIN_THETA);
    if !(chain_theta > 0.0 && chain_theta < 1.0) {
        return Err(invalid("chain_theta", "must lie in (0, 1)"));
    }

    let leakage = {
        let l = raw.leakage.unwrap_or(LeakageSpec {
            operators: None,
            locality: None,
            percentiles: None,
            gaps: None,
        });
        let percentiles = l.percentiles.unwrap_or_else(|| vec![10.0, 30.0, 50.0, 70.0, 90.0]);
        for &p in &percentiles {
            check_percentile("leakage.percentiles", p)?;
        }
        if let Some(gaps) = &l.gaps {
            if gaps.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
                return Err(invalid("leakage.gaps", "gaps must be nonnegative"));
            }
        }
        if let Some(k) = l.locality {
            if k == 0 || k > hamiltonian.n_qubits() {
                return Err(invalid("leakage.locality", "must lie in 1..=n_qubits"));
            }
        }
        LeakageSettings {
            operators: l.operators.unwrap_or(50),
            locality: l.locality,
            percentiles,
            gaps: l.gaps,
        }
    };

    let cost = {
        let c = raw.cost.unwrap_or(CostSpec {
            total_time: None,
            eps_target: None,
            delta_percentile: None,
            unit_constant: None,
            r_cap: None,
            orders: None,
        });
        let eps_target = c.eps_target.unwrap_or(1e-6);
        if !(eps_target > 0.0 && eps_target < 1.0) {
            return Err(invalid("cost.eps_target", "must lie in (0, 1)"));
        }
        let orders = c.orders.unwrap_or_else(|| vec![1, 2, 3]);
        if orders.is_empty() || orders.contains(&0) {
            return Err(invalid("cost.orders", "orders must be positive"));
        }
        let unit_constant = c.unit_constant.unwrap_or(1.0);
        if !(unit_constant >= 0.0 && unit_constant.is_finite()) {
            return Err(invalid("cost.unit_constant", "must be nonnegative"));
        }
        CostSettings {
            total_time: finite_positive("cost.total_time", c.total_time.unwrap_or(1.0))?,
            eps_target,
            delta_percentile: check_percentile("cost.delta_percentile", c.delta_percentile.unwrap_or(25.0))?,
            unit_constant,
            r_cap: c.r_cap.unwrap_or(DEFAULT_R_CAP).max(1),
            orders,
        }
    };

    let (output_path, format) = match raw.output {
        None => (None, Format::Csv),
        Some(o) => (o.path, o.format.unwrap_or(Format::Csv)),
    };

    Ok(ExperimentConfig {
        name,
        hamiltonian,
        schedule,
        s_grid,
        deltas,
        delta_prime,
        slack,
        chain_theta,
        dense_limit,
        seed: raw.seed.unwrap_or(0),
        leakage,
        cost,
        output_path,
        format,
    })
}

fn build_model(spec: &ModelSpec, base: Option<&Path>, dense_limit: usize) -> Result<(Hamiltonian, String), CliError> {
    let sources = [spec.generator.is_some(), spec.inline.is_some(), spec.file.is_some()];
    if sources.iter().filter(|&&x| x).count() != 1 {
        return Err(invalid("model", "give exactly one of `generator`, `inline`, `file`"));
    }
    let model_err = |e: trotter_lowenergy::Error| invalid("model", e.to_string());
    let check_size = |n: usize| {
        if n > dense_limit {
            Err(CliError::Runtime(trotter_lowenergy::Error::DimensionTooLarge {
                n_qubits: n,
                limit: dense_limit,
            }))
        } else {
            Ok(())
        }
    };
    if let Some(generator) = spec.generator {
        let n = spec.n_qubits.ok_or_else(|| invalid("model.n_qubits", "required with `generator`"))?;
        check_size(n)?;
        let boundary = spec.boundary.unwrap_or(Boundary::Open);
        let bname = match boundary {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        };
        return match generator {
            Generator::Tfim => {
                if spec.j.is_some() || spec.psd_shift.is_some() {
                    return Err(invalid("model", "`j` and `psd_shift` apply to the Heisenberg generator"));
                }
                let h = tfim_chain(n, spec.j_zz.unwrap_or(1.0), spec.h_x.unwrap_or(1.0), boundary).map_err(model_err)?;
                Ok((h, format!("tfim-{n}-{bname}")))
            }
            Generator::Heisenberg => {
                if spec.j_zz.is_some() || spec.h_x.is_some() {
                    return Err(invalid("model", "`j_zz` and `h_x` apply to the TFIM generator"));
                }
                let shift = spec.psd_shift.unwrap_or(false);
                let h = heisenberg_chain(n, spec.j.unwrap_or(1.0), boundary, shift).map_err(model_err)?;
                let tag = if shift { "-psd" } else { "" };
                Ok((h, format!("heisenberg-{n}-{bname}{tag}")))
            }
        };
    }
    if spec.n_qubits.is_some()
        || spec.boundary.is_some()
        || spec.j_zz.is_some()
        || spec.h_x.is_some()
        || spec.j.is_some()
        || spec.psd_shift.is_some()
    {
        return Err(invalid("model", "generator parameters given without `generator`"));
    }
    let (file, label) = match (&spec.inline, &spec.file) {
        (Some(inline), _) => (inline.clone(), "inline".to_string()),
        (None, Some(path)) => {
            let full = match base {
                Some(b) if path.is_relative() => b.join(path),
                _ => path.clone(),
            };
            let text = fs::read_to_string(&full).map_err(|e| CliError::Io {
                path: full.clone(),
                message: e.to_string(),
            })?;
            let file: ModelFile = serde_json::from_str(&text).map_err(|e| invalid("model.file", e.to_string()))?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("model").to_string();
            (file, stem)
        }
        _ => unreachable!(),
    };
    check_size(file.n_qubits)?;
    let h = file.build::<f64>(dense_limit).map_err(model_err)?;
    Ok((h, format!("{label}-{}", file.n_qubits)))
}

fn build_schedule(spec: &ScheduleSpec, groups: usize) -> Result<Schedule, CliError> {
    let err = |e: trotter_lowenergy::Error| invalid("schedule", e.to_string());
    let no_stages = |name: &str| {
        if spec.stages.is_some() {
            Err(invalid("schedule.stages", format!("only custom schedules take stages, not `{name}`")))
        } else {
            Ok(())
        }
    };
    let f = match spec.name.as_str() {
        "lie-trotter" => {
            no_stages("lie-trotter")?;
            if spec.order.is_some_and(|o| o != 1) {
                return Err(invalid("schedule.order", "Lie-Trotter has order 1"));
            }
            FormulaSchedule::lie_trotter(groups).map_err(err)?
        }
        "strang" => {
            no_stages("strang")?;
            if spec.order.is_some_and(|o| o != 2) {
                return Err(invalid("schedule.order", "Strang has order 2"));
            }
            FormulaSchedule::strang(groups).map_err(err)?
        }
        "suzuki" => {
            no_stages("suzuki")?;
            let order = spec.order.ok_or_else(|| invalid("schedule.order", "required for suzuki"))?;
            FormulaSchedule::suzuki(order, groups).map_err(err)?
        }
        "custom" => {
            let order = spec.order.ok_or_else(|| invalid("schedule.order", "required for custom"))?;
            let stages = spec
                .stages
                .as_ref()
                .ok_or_else(|| invalid("schedule.stages", "required for custom"))?
                .iter()
                .map(|s| Stage::new(s.group, s.coeff))
                .collect();
            FormulaSchedule::new("custom", stages, order).map_err(err)?
        }
        other => return Err(invalid("schedule.name", format!("unknown schedule `{other}`"))),
    };
    f.validate(groups).map_err(err)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        validate(parse_raw(text)?, None)
    }

    const MINIMAL: &str = r#"{"model": {"generator": "tfim", "n_qubits": 4}, "schedule": {"name": "strang"}}"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse(MINIMAL).unwrap();
        assert_eq!(c.s_grid.len(), 8);
        assert!((c.s_grid[0] - 1e-3).abs() < 1e-15 && (c.s_grid[7] - 1e-1).abs() < 1e-15);
        assert_eq!(c.deltas, vec![DeltaCutoff::Percentile(25.0), DeltaCutoff::Percentile(50.0)]);
        assert_eq!(c.delta_prime, DeltaPrimePolicy::Auto { target: 1e-3 });
        assert_eq!(c.name, "tfim-4-open");
        assert_eq!(c.dense_limit, 12);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn unknown_key_names_the_field() {
        let text = r#"{"model": {"generator": "tfim", "n_qubits": 4}, "schedule": {"name": "strang"}, "deltaa": 3}"#;
        match parse(text) {
            Err(CliError::Validation { field, .. }) => assert_eq!(field, "deltaa"),
            other => panic!("{other:?}"),
        }
        let nested = r#"{"model": {"generator": "tfim", "n_qubits": 4, "hx": 1}, "schedule": {"name": "strang"}}"#;
        assert!(matches!(parse(nested), Err(CliError::Validation { field, .. }) if field == "hx"));
    }

    #[test]
    fn bad_percentile_is_rejected() {
        let text = r#"{"model": {"generator": "tfim", "n_qubits": 4}, "schedule": {"name": "strang"}, "delta": {"percentiles": [25, 120]}}"#;
        assert!(matches!(parse(text), Err(CliError::Validation { field, .. }) if field == "delta.percentiles"));
    }

    #[test]
    fn syntax_error_has_position() {
        let text = "{\n  \"model\": {\"generator\": \"tfim\",, }\n}";
        match parse(text) {
            Err(CliError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 33)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oversized_model_fails_before_work() {
        let text = r#"{"model": {"generator": "tfim", "n_qubits": 20}, "schedule": {"name": "strang"}}"#;
        assert!(matches!(
            parse(text),
            Err(CliError::Runtime(trotter_lowenergy::Error::DimensionTooLarge { n_qubits: 20, limit: 12 }))
        ));
    }

    #[test]
    fn schedules_and_models() {
        let c = parse(r#"{"model": {"generator": "heisenberg", "n_qubits": 6, "psd_shift": true}, "schedule": {"name": "suzuki", "order": 4}}"#).unwrap();
        assert_eq!(c.schedule.q(), 11);
        assert!(c.hamiltonian.is_psd());
        assert_eq!(c.name, "heisenberg-6-open-psd");

        let inline = r#"{"model": {"inline": {"n_qubits": 2, "groups": [[{"pauli": "Z0 Z1", "coeff": 1.0}], [{"pauli": "X0", "coeff": 0.5}]]}},
                         "schedule": {"name": "custom", "order": 1, "stages": [{"group": 0, "coeff": 1.0}, {"group": 1, "coeff": 1.0}]},
                         "s_grid": {"min": 0.001, "max": 0.01, "points": 3}, "delta_prime": {"gap": 2.0}}"#;
        let c = parse(inline).unwrap();
        assert_eq!(c.s_grid.len(), 3);
        assert_eq!(c.delta_prime, DeltaPrimePolicy::Gap(2.0));

        let bad = r#"{"model": {"generator": "tfim", "n_qubits": 4}, "schedule": {"name": "custom", "order": 1, "stages": [{"group": 0, "coeff": 0.5}, {"group": 1, "coeff": 1.0}]}}"#;
        assert!(matches!(parse(bad), Err(CliError::Validation { field, .. }) if field == "schedule"));
        let two = r#"{"model": {"generator": "tfim", "n_qubits": 4, "file": "x.json"}, "schedule": {"name": "strang"}}"#;
        assert!(matches!(parse(two), Err(CliError::Validation { field, .. }) if field == "model"));
    }
}
