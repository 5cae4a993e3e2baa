//! The `leakage` sweep: the generic bound on random local operators and the
//! product-formula leakage bound on the analysis grid.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use trotter_lowenergy::bounds::{arad_leakage_bound, LeakageParams, Verdict};
use trotter_lowenergy::pauli::{dense_matrix, Letter, LocalTerm, PauliString};
use trotter_lowenergy::spectral::spectral_norm;
use trotter_lowenergy::{CMatrix, Dense, Term};

use crate::analyze::{resolve_deltas, run_analyze};
use crate::config::{DeltaCutoff, ExperimentConfig};
use crate::report::fmt_float;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeakageKind {
    Arad,
    Formula,
}

/// One measured leakage against its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageRow {
    pub kind: LeakageKind,
    pub model: String,
    /// Operator index for `arad` rows, schedule name for `formula` rows.
    pub label: String,
    pub s: Option<f64>,
    pub low: f64,
    pub high: f64,
    pub measured: f64,
    pub bound: Option<f64>,
    pub vacuous: bool,
}

impl LeakageRow {
    pub fn verdict(&self) -> Verdict {
        Verdict::compare(self.measured, self.bound)
    }
}

pub const LEAKAGE_COLUMNS: [&str; 10] = [
    "kind", "model", "label", "s", "low", "high", "measured", "bound", "verdict", "vacuous",
];

pub fn leakage_csv(rows: &[LeakageRow]) -> String {
    let mut out = LEAKAGE_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let kind = match r.kind {
            LeakageKind::Arad => "arad",
            LeakageKind::Formula => "formula",
        };
        let opt = |x: Option<f64>| x.map(fmt_float).unwrap_or_else(|| "na".into());
        out.push_str(
            &[
                kind.to_string(),
                r.model.clone(),
                r.label.clone(),
                opt(r.s),
                fmt_float(r.low),
                fmt_float(r.high),
                fmt_float(r.measured),
                opt(r.bound),
                r.verdict().to_string(),
                r.vacuous.to_string(),
            ]
            .join(","),
        );
        out.push('\n');
    }
    out
}

/// Random Hermitian operator on `k` distinct random qubits: every
/// non-identity Pauli word on those qubits with a standard normal weight.
pub fn random_local_operator<R: Rng>(n_qubits: usize, k: usize, rng: &mut R) -> Result<Vec<Term>, CliError> {
    let mut qubits = sample(rng, n_qubits, k).into_vec();
    qubits.sort_unstable();
    let mut terms = Vec::with_capacity(4usize.pow(k as u32) - 1);
    for code in 1..4usize.pow(k as u32) {
        let mut letters = Vec::new();
        let mut c = code;
        for &q in &qubits {
            match c % 4 {
                1 => letters.push((q, Letter::X)),
                2 => letters.push((q, Letter::Y)),
                3 => letters.push((q, Letter::Z)),
                _ => {}
            }
            c /= 4;
        }
        let pauli = PauliString::from_letters(n_qubits, &letters)?;
        terms.push(LocalTerm::real(pauli, rng.sample::<f64, _>(StandardNormal)));
    }
    Ok(terms)
}

/// Default `Λ′ − Λ` grid: three fractions of the spectral width, then two
/// gaps past `2R` where the bound becomes non-trivial.
pub fn default_gaps(width: f64, r: f64, lambda: f64) -> Vec<f64> {
    vec![0.25 * width, 0.5 * width, width, 2.0 * r + 1.0 / lambda, 2.0 * r + 4.0 / lambda]
}

/// Generic bound on `operators` random `k`-local operators over the
/// `(Λ, Λ′)` grid.
pub fn arad_rows(cfg: &ExperimentConfig, model: &Dense, pool: &rayon::ThreadPool) -> Result<Vec<LeakageRow>, CliError> {
    let h = &cfg.hamiltonian;
    let n = h.n_qubits();
    let prm = LeakageParams::from_summary(h.params())?;
    let k = cfg.leakage.locality.unwrap_or(prm.k);
    let spectrum = model.spectrum();
    let lows = resolve_deltas(
        &cfg.leakage
            .percentiles
            .iter()
            .map(|&p| DeltaCutoff::Percentile(p))
            .collect::<Vec<_>>(),
        spectrum,
    )?;
    let gaps = cfg.leakage.gaps.clone().unwrap_or_else(|| {
        default_gaps(spectrum.max_energy() - spectrum.min_energy(), prm.r, prm.lambda)
    });

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ops: Vec<CMatrix<f64>> = (0..cfg.leakage.operators)
        .map(|_| {
            let terms = random_local_operator(n, k, &mut rng)?;
            Ok(dense_matrix(n, &terms, h.dense_limit())?)
        })
        .collect::<Result<_, CliError>>()?;

    let per_op: Vec<Result<Vec<LeakageRow>, CliError>> = pool.install(|| {
        ops.par_iter()
            .enumerate()
            .map(|(i, a)| {
                let norm = spectral_norm(a);
                let mut rows = Vec::new();
                for &low in &lows {
                    for &gap in &gaps {
                        let high = low + gap;
                        let bound = arad_leakage_bound(norm, prm.r, prm.lambda, low, high)?;
                        rows.push(LeakageRow {
                            kind: LeakageKind::Arad,
                            model: cfg.name.clone(),
                            label: format!("op{i}"),
                            s: None,
                            low,
                            high,
                            measured: spectrum.leakage_norm(a, low, high)?,
                            bound: Some(bound.value),
                            vacuous: bound.vacuous,
                        });
                    }
                }
                Ok(rows)
            })
            .collect()
    });
    let mut out = Vec::new();
    for r in per_op {
        out.extend(r?);
    }
    Ok(out)
}

/// Arad rows followed by the formula leakage of every analysis grid point.
pub fn run_leakage(cfg: &ExperimentConfig, pool: &rayon::ThreadPool) -> Result<Vec<LeakageRow>, CliError> {
    let model = Dense::new(&cfg.hamiltonian)?;
    let mut rows = arad_rows(cfg, &model, pool)?;
    let run = run_analyze(cfg, pool)?;
    if let Some(f) = run.failures.first() {
        return Err(CliError::Runtime(trotter_lowenergy::Error::InvalidParameter(format!(
            "grid point s = {}, delta = {} failed: {}",
            f.s, f.delta, f.error
        ))));
    }
    rows.extend(run.reports.into_iter().map(|r| LeakageRow {
        kind: LeakageKind::Formula,
        model: r.model,
        label: r.schedule,
        s: Some(r.s),
        low: r.delta,
        high: r.delta_prime,
        measured: r.leakage_empirical,
        bound: r.leakage_bound,
        vacuous: r.vacuity_flags.iter().any(|f| f == "leakage"),
    }));
    Ok(rows)
}
