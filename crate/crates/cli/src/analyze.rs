//! The `analyze` sweep over `(s, Δ)` grid points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use trotter_lowenergy::bounds::{AnalysisContext, BoundReport};
use trotter_lowenergy::{Dense, Spectrum};

use crate::config::{DeltaCutoff, ExperimentConfig};
use crate::CliError;

/// A grid point that raised an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub s: f64,
    pub delta: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRun {
    pub reports: Vec<BoundReport>,
    pub failures: Vec<Failure>,
}

impl AnalysisRun {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(BoundReport::all_pass)
    }
}

/// Absolute cutoff energies for the configured `Δ` grid.
pub fn resolve_deltas(cutoffs: &[DeltaCutoff], spectrum: &Spectrum) -> Result<Vec<f64>, CliError> {
    cutoffs
        .iter()
        .map(|c| match *c {
            DeltaCutoff::Percentile(p) => Ok(spectrum.percentile_energy(p)?),
            DeltaCutoff::Absolute(e) => Ok(e),
        })
        .collect()
}

/// Sorted `(s, Δ)` grid.
pub fn grid_points(s_grid: &[f64], deltas: &[f64]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = s_grid
        .iter()
        .flat_map(|&s| deltas.iter().map(move |&d| (s, d)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts
}

/// Evaluates every grid point on `pool`. Model-level errors abort the run;
/// errors at a single point are collected in `failures`.
pub fn run_analyze(cfg: &ExperimentConfig, pool: &rayon::ThreadPool) -> Result<AnalysisRun, CliError> {
    let model = Dense::new(&cfg.hamiltonian)?;
    let ctx = AnalysisContext::new(&cfg.hamiltonian, &model, &cfg.schedule)?
        .with_slack(cfg.slack)
        .with_chain_theta(cfg.chain_theta);
    let deltas = resolve_deltas(&cfg.deltas, model.spectrum())?;
    let points = grid_points(&cfg.s_grid, &deltas);

    let results: Vec<_> = pool.install(|| {
        points
            .par_iter()
            .map(|&(s, delta)| ctx.evaluate(s, delta, cfg.delta_prime).map_err(|e| (s, delta, e)))
            .collect()
    });

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(mut rep) => {
                rep.model = cfg.name.clone();
                reports.push(rep);
            }
            Err((s, delta, e)) => failures.push(Failure {
                s,
                delta,
                error: e.to_string(),
            }),
        }
    }
    Ok(AnalysisRun { reports, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_raw, validate};

    fn cfg(text: &str) -> ExperimentConfig {
        validate(parse_raw(text).unwrap(), None).unwrap()
    }

    #[test]
    fn grid_is_sorted() {
        let pts = grid_points(&[0.1, 0.01], &[2.0, -1.0]);
        assert_eq!(pts, vec![(0.01, -1.0), (0.01, 2.0), (0.1, -1.0), (0.1, 2.0)]);
    }

    #[test]
    fn commuting_groups_have_zero_error() {
        let c = cfg(r#"{"model": {"inline": {"n_qubits": 3, "groups": [[{"pauli": "Z0 Z1", "coeff": 1.0}], [{"pauli": "Z1 Z2", "coeff": 0.5}, {"pauli": "Z0", "coeff": 0.3}]]}},
                        "schedule": {"name": "strang"}}"#);
        let run = run_analyze(&c, &crate::worker_pool(Some(2)).unwrap()).unwrap();
        assert_eq!(run.reports.len(), 16);
        assert!(run.failures.is_empty());
        for r in &run.reports {
            assert!(r.eps_empirical < 1e-12, "{}", r.eps_empirical);
            assert!(r.all_pass());
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let c = cfg(r#"{"model": {"generator": "tfim", "n_qubits": 4}, "schedule": {"name": "lie-trotter"},
                        "s_grid": [0.01, 0.003, 0.001]}"#);
        let a = run_analyze(&c, &crate::worker_pool(Some(1)).unwrap()).unwrap();
        let b = run_analyze(&c, &crate::worker_pool(Some(3)).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.reports.windows(2).all(|w| (w[0].s, w[0].delta) <= (w[1].s, w[1].delta)));
    }
}
