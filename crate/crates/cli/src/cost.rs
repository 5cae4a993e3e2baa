//! The `cost` and `compare` subcommands.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use trotter_lowenergy::bounds::Verdict;
use trotter_lowenergy::cost::{
    empirical_trotter_number, evaluate_law, n_exponent, n_exponent_closed_form, scaling, Exponent, Method,
    TrotterSearch,
};
use trotter_lowenergy::Dense;

use crate::config::ExperimentConfig;
use crate::report::fmt_float;
use crate::CliError;

/// Largest order in the exponent comparison.
pub const FIG_P_MAX: u32 = 8;

fn exp_value(e: Exponent) -> f64 {
    *e.numer() as f64 / *e.denom() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub method: Method,
    pub p: u32,
    pub law: String,
    pub n_exponent: String,
    pub n_exponent_closed_form: String,
    pub n_exponent_value: f64,
    /// Law evaluated at the run's `(T, N, Δ, ε)` with the unit constant.
    pub value: Option<f64>,
    /// Index of the largest monomial in `law`.
    pub dominant_term: Option<usize>,
    pub error: Option<String>,
}

/// Exponents of `N` for one order, with the ordering checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub p: u32,
    pub general: String,
    pub prior: String,
    pub present: String,
    pub general_value: f64,
    pub prior_value: f64,
    pub present_value: f64,
    /// Present exponent strictly below both others.
    pub present_smallest: bool,
    /// `present < prior < general`.
    pub strict_chain: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub r: Option<u64>,
    pub error: Option<f64>,
    pub failure: Option<String>,
}

impl From<Result<TrotterSearch, trotter_lowenergy::Error>> for SearchOutcome {
    fn from(r: Result<TrotterSearch, trotter_lowenergy::Error>) -> Self {
        match r {
            Ok(t) => SearchOutcome {
                r: Some(t.r),
                error: Some(t.error),
                failure: None,
            },
            Err(e) => SearchOutcome {
                r: None,
                error: None,
                failure: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRow {
    pub schedule: String,
    pub p: usize,
    pub total_time: f64,
    pub eps_target: f64,
    pub delta: f64,
    pub restricted: SearchOutcome,
    pub full: SearchOutcome,
    /// Restricted `r` at most the full-space `r`.
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub model: String,
    pub n_qubits: usize,
    /// `Δ` measured from the ground energy, as used in the laws.
    pub delta_above_ground: f64,
    pub laws: Vec<LawRow>,
    pub exponents: Vec<CompareRow>,
    pub empirical: EmpiricalRow,
}

impl CostReport {
    pub fn has_failures(&self) -> bool {
        self.laws.iter().any(|r| r.error.is_some())
            || self.empirical.restricted.failure.is_some()
            || self.empirical.full.failure.is_some()
    }
}

pub fn run_compare(orders: &[u32]) -> Result<Vec<CompareRow>, CliError> {
    orders
        .iter()
        .map(|&p| {
            let g = n_exponent(Method::General, p)?;
            let pr = n_exponent(Method::PriorLowEnergy, p)?;
            let ps = n_exponent(Method::Present, p)?;
            Ok(CompareRow {
                p,
                general: g.to_string(),
                prior: pr.to_string(),
                present: ps.to_string(),
                general_value: exp_value(g),
                prior_value: exp_value(pr),
                present_value: exp_value(ps),
                present_smallest: ps < pr && ps < g,
                strict_chain: ps < pr && pr < g,
            })
        })
        .collect()
}

pub const COMPARE_COLUMNS: [&str; 9] = [
    "p",
    "general",
    "prior",
    "present",
    "general_value",
    "prior_value",
    "present_value",
    "present_smallest",
    "strict_chain",
];

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out = COMPARE_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.p,
            r.general,
            r.prior,
            r.present,
            fmt_float(r.general_value),
            fmt_float(r.prior_value),
            fmt_float(r.present_value),
            r.present_smallest,
            r.strict_chain
        );
    }
    out
}

pub fn law_rows(orders: &[u32], t: f64, n: f64, delta: f64, eps: f64, unit_constant: f64) -> Vec<LawRow> {
    let mut rows = Vec::new();
    for &p in orders {
        for method in Method::ALL {
            let row = (|| -> Result<LawRow, trotter_lowenergy::Error> {
                let law = scaling(method, p)?;
                let ne = n_exponent(method, p)?;
                let (value, dominant_term, error) = match evaluate_law(&law, t, n, delta, eps, unit_constant) {
                    Ok(v) => (Some(v.value), Some(v.dominant), None),
                    Err(e) => (None, None, Some(e.to_string())),
                };
                Ok(LawRow {
                    method,
                    p,
                    law: law.to_string(),
                    n_exponent: ne.to_string(),
                    n_exponent_closed_form: n_exponent_closed_form(method, p)?.to_string(),
                    n_exponent_value: exp_value(ne),
                    value,
                    dominant_term,
                    error,
                })
            })();
            rows.push(row.unwrap_or_else(|e| LawRow {
                method,
                p,
                law: String::new(),
                n_exponent: String::new(),
                n_exponent_closed_form: String::new(),
                n_exponent_value: f64::NAN,
                value: None,
                dominant_term: None,
                error: Some(e.to_string()),
            }));
        }
    }
    rows
}

/// Scaling laws at the configured point, the exponent comparison for
/// `p = 1..=8`, and the empirical minimal `r` for the configured schedule
/// with restricted and full-space error.
pub fn run_cost(cfg: &ExperimentConfig, pool: &rayon::ThreadPool) -> Result<CostReport, CliError> {
    let model = Dense::new(&cfg.hamiltonian)?;
    let spectrum = model.spectrum();
    let c = &cfg.cost;
    let delta = spectrum.percentile_energy(c.delta_percentile)?;
    let above = delta - spectrum.min_energy();
    let n = cfg.hamiltonian.n_qubits();

    let laws = law_rows(&c.orders, c.total_time, n as f64, above, c.eps_target, c.unit_constant);
    let exponents = run_compare(&(1..=FIG_P_MAX).collect::<Vec<_>>())?;

    let (restricted, full) = pool.install(|| {
        rayon::join(
            || empirical_trotter_number(&model, &cfg.schedule, Some(delta), c.total_time, c.eps_target, c.r_cap),
            || empirical_trotter_number(&model, &cfg.schedule, None, c.total_time, c.eps_target, c.r_cap),
        )
    });
    let restricted = SearchOutcome::from(restricted);
    let full = SearchOutcome::from(full);
    let verdict = match (restricted.r, full.r) {
        (Some(a), Some(b)) if a <= b => Verdict::Pass,
        (Some(_), Some(_)) => Verdict::Fail,
        _ => Verdict::Na,
    };
    Ok(CostReport {
        model: cfg.name.clone(),
        n_qubits: n,
        delta_above_ground: above,
        laws,
        exponents,
        empirical: EmpiricalRow {
            schedule: cfg.schedule.name().to_string(),
            p: cfg.schedule.order(),
            total_time: c.total_time,
            eps_target: c.eps_target,
            delta,
            restricted,
            full,
            verdict,
        },
    })
}
