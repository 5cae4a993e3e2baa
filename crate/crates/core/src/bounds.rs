//! Analytic low-energy bounds and the empirical quantities they dominate.
//!
//! Leakage bounds decay like `e^{−λ·gap}` with `λ = 1/(2Jdk)`. Every
//! exponential bound carries a vacuity flag: it is vacuous when it does
//! not beat the trivial bound (`1` for blocks of unitaries, `‖A‖` for a
//! generic operator).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::commutators::{bound_terms, expand_f_coefficients, MAX_COEFF_ORDER};
use crate::formulas::{DenseModel, FormulaSchedule};
use crate::pauli::{ParamSummary, PartitionedHamiltonian};
use crate::spectral::{spectral_norm, SpectralCache};
use crate::{lit, to_f64, CMatrix, Error, Real, Result};

/// Default remainder slack applied to leading-order bounds.
pub const DEFAULT_SLACK: f64 = 1.25;

/// Default share of the chain bracket allowed for leakage terms.
pub const DEFAULT_CHAIN_THETA: f64 = 0.1;

/// Tolerance used when comparing a measured value with its bound.
pub const VERDICT_TOL: f64 = 1e-12;

/// An exponential bound and whether it is vacuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpBound<T> {
    pub value: T,
    pub vacuous: bool,
}

/// `λ`, `g = Jd` and the radius `R` of the generic leakage bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageParams<T> {
    pub lambda: T,
    pub g: T,
    pub r: T,
    pub k: usize,
    pub d: usize,
    pub j: T,
}

impl<T: Real> LeakageParams<T> {
    /// `R` defaults to `kJd`, the bound for a single `k`-local operator.
    pub fn new(j: T, d: usize, k: usize) -> Result<Self> {
        let lambda = lambda_param(j, d, k)?;
        let kf = lit::<T>(k as f64);
        let df = lit::<T>(d as f64);
        Ok(LeakageParams {
            lambda,
            g: j * df,
            r: kf * j * df,
            k,
            d,
            j,
        })
    }

    pub fn from_summary(p: &ParamSummary<T>) -> Result<Self> {
        Self::new(p.j, p.d, p.k)
    }

    pub fn with_r(mut self, r: T) -> Result<Self> {
        if r < T::zero() {
            return Err(Error::InvalidParameter("R must be nonnegative".into()));
        }
        self.r = r;
        Ok(self)
    }
}

/// `λ = 1/(2Jdk)`.
pub fn lambda_param<T: Real>(j: T, d: usize, k: usize) -> Result<T> {
    if j <= T::zero() || d == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "λ needs J, d, k > 0 (got J = {}, d = {d}, k = {k})",
            to_f64(j)
        )));
    }
    Ok(T::one() / (lit::<T>(2.0) * j * lit::<T>(d as f64) * lit::<T>(k as f64)))
}

fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |a, i| a * lit::<T>(i as f64))
}

/// `ℓ_n = L · n! · (Jkde)ⁿ · eJ`.
pub fn ell_n<T: Real>(n: usize, l: usize, k: usize, d: usize, j: T) -> T {
    let e = T::E();
    let kd = lit::<T>((k * d) as f64);
    lit::<T>(l as f64) * factorial::<T>(n) * (j * kd * e).powi(n as i32) * e * j
}

/// The same quantity written as `(L (kd)ⁿ n!) · J^{n+1} · e^{2λJkd(n+1)}`,
/// i.e. term count times strength times the leakage weight.
pub fn ell_n_counting_form<T: Real>(n: usize, l: usize, k: usize, d: usize, j: T) -> Result<T> {
    let lambda = lambda_param(j, d, k)?;
    let kd = lit::<T>((k * d) as f64);
    let count = lit::<T>(l as f64) * kd.powi(n as i32) * factorial::<T>(n);
    let weight = (lit::<T>(2.0) * lambda * j * kd * lit::<T>((n + 1) as f64)).exp();
    Ok(count * j.powi(n as i32 + 1) * weight)
}

/// `‖A‖ e^{−λ(Λ′ − Λ − 2R)}`, vacuous when it is at least `‖A‖`.
pub fn arad_leakage_bound<T: Real>(norm_a: T, r: T, lambda: T, low: T, high: T) -> Result<ExpBound<T>> {
    check_cutoffs(low, high)?;
    let exponent = -lambda * (high - low - lit::<T>(2.0) * r);
    let value = norm_a * exponent.exp();
    Ok(ExpBound {
        value,
        vacuous: value >= norm_a,
    })
}

fn check_cutoffs<T: Real>(low: T, high: T) -> Result<()> {
    if high < low {
        return Err(Error::CutoffOrder {
            lower: to_f64(low),
            upper: to_f64(high),
        });
    }
    Ok(())
}

/// Leading-order leakage radius `R^W(s) = (s^{p+1}/(p+1)) (ℓ_p/λ) Σ|f|`.
pub fn r_w_from_parts<T: Real>(s: T, p: usize, ell_p: T, lambda: T, f_sum: T) -> T {
    s.abs().powi(p as i32 + 1) / lit::<T>((p + 1) as f64) * ell_p / lambda * f_sum
}

/// `α` in `R^W = α s^{p+1} L`: `ℓ_p Σ|f| / (λ (p+1) L)`.
pub fn alpha<T: Real>(p: usize, l: usize, ell_p: T, lambda: T, f_sum: T) -> T {
    ell_p * f_sum / (lambda * lit::<T>((p + 1) as f64) * lit::<T>(l as f64))
}

/// `Σ|f|` over order-`p` group tuples whose nested commutator survives.
pub fn surviving_f_sum<T: Real>(f: &FormulaSchedule<T>, h: &PartitionedHamiltonian<T>, p: usize) -> Result<T> {
    Ok(bound_terms(f, h, p)?
        .iter()
        .filter(|bt| !bt.nested.is_empty())
        .fold(T::zero(), |a, bt| a + bt.coeff.abs()))
}

/// `R^W(s)` for a schedule of declared order `p ≤ 3`.
pub fn r_w<T: Real>(f: &FormulaSchedule<T>, h: &PartitionedHamiltonian<T>, s: T) -> Result<T> {
    let p = f.order();
    let prm = h.params();
    let lambda = lambda_param(prm.j, prm.d, prm.k)?;
    let ell_p = ell_n(p, prm.l, prm.k, prm.d, prm.j);
    Ok(r_w_from_parts(s, p, ell_p, lambda, surviving_f_sum(f, h, p)?))
}

/// `e^{−λ(Δ′ − Δ − 2R^W)}`, vacuous when it is at least 1.
pub fn formula_leakage_bound<T: Real>(delta: T, delta_prime: T, lambda: T, r_w: T) -> Result<ExpBound<T>> {
    check_cutoffs(delta, delta_prime)?;
    let value = (-lambda * (delta_prime - delta - lit::<T>(2.0) * r_w)).exp();
    Ok(ExpBound {
        value,
        vacuous: value >= T::one(),
    })
}

/// `Δ′ = Δ + 2R^W + ln(1/ϑ)/λ` with its two offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPrime<T> {
    pub value: T,
    pub radius_term: T,
    pub log_term: T,
}

pub fn select_delta_prime<T: Real>(delta: T, r_w: T, lambda: T, target: T) -> Result<DeltaPrime<T>> {
    if !(target > T::zero() && target <= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "target leakage must lie in (0, 1], got {}",
            to_f64(target)
        )));
    }
    let radius_term = lit::<T>(2.0) * r_w;
    let log_term = -target.ln() / lambda;
    Ok(DeltaPrime {
        value: delta + radius_term + log_term,
        radius_term,
        log_term,
    })
}

/// Cutoffs `Δ′ = c_0 ≤ c_1 ≤ … ≤ c_p = Δ_f`, one step per commutator level.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffChain<T> {
    cutoffs: Vec<T>,
}

impl<T: Real> CutoffChain<T> {
    pub fn new(cutoffs: Vec<T>) -> Result<Self> {
        if cutoffs.len() < 2 {
            return Err(Error::InvalidChain("need Δ′ and at least one further cutoff".into()));
        }
        if cutoffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidChain("cutoffs must be finite".into()));
        }
        if let Some(w) = cutoffs.windows(2).find(|w| w[1] < w[0]) {
            return Err(Error::InvalidChain(format!(
                "cutoff {} follows larger cutoff {}",
                to_f64(w[1]),
                to_f64(w[0])
            )));
        }
        Ok(CutoffChain { cutoffs })
    }

    pub fn cutoffs(&self) -> &[T] {
        &self.cutoffs
    }

    pub fn delta_prime(&self) -> T {
        self.cutoffs[0]
    }

    pub fn delta_f(&self) -> T {
        *self.cutoffs.last().unwrap()
    }

    /// Number of commutator levels the chain covers.
    pub fn levels(&self) -> usize {
        self.cutoffs.len() - 1
    }

    pub fn gaps(&self) -> Vec<T> {
        self.cutoffs.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Chain bracket of one nested commutator `[H_{m_p}, …, [H_{m_1}, H_m]]`:
/// leakage terms `2ʲ (∏_{i<j} ‖H_{m_{p−i+1}}‖_{≤c_i}) ℓ_0 ℓ_{p−j} e^{−2λ(c_j − c_{j−1})}`
/// for `j = 1..p`, and the final term `2ᵖ ∏_{i=1}^{p} ‖H_{m_{p−i+1}}‖_{≤c_i} · ‖H_m‖_{≤c_p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTerm<T> {
    pub groups: Vec<usize>,
    pub coeff: T,
    pub leakage: Vec<T>,
    pub final_term: T,
}

impl<T: Real> ChainTerm<T> {
    pub fn bracket(&self) -> T {
        self.leakage.iter().fold(self.final_term, |a, &b| a + b)
    }

    pub fn leakage_sum(&self) -> T {
        self.leakage.iter().fold(T::zero(), |a, &b| a + b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainBound<T> {
    pub p: usize,
    pub terms: Vec<ChainTerm<T>>,
}

impl<T: Real> ChainBound<T> {
    /// `Σ |f| · bracket`.
    pub fn total(&self) -> T {
        self.terms.iter().fold(T::zero(), |a, t| a + t.coeff.abs() * t.bracket())
    }

    /// Largest single bracket.
    pub fn max_bracket(&self) -> T {
        self.terms.iter().fold(T::zero(), |a, t| a.max(t.bracket()))
    }

    /// Largest ratio of leakage terms to the final term.
    pub fn leakage_share(&self) -> T {
        self.terms.iter().fold(T::zero(), |a, t| {
            if t.final_term > T::zero() {
                a.max(t.leakage_sum() / t.final_term)
            } else if t.leakage_sum() > T::zero() {
                T::max_value().unwrap()
            } else {
                a
            }
        })
    }

    /// Retained-component bound `(s^{p+1}/(p+1)) · total`.
    pub fn step_bound(&self, s: T) -> T {
        s.abs().powi(self.p as i32 + 1) / lit::<T>((self.p + 1) as f64) * self.total()
    }
}

/// `ℓ_0, …, ℓ_p` from the model parameters.
pub fn ell_values<T: Real>(p: usize, prm: &ParamSummary<T>) -> Vec<T> {
    (0..=p).map(|n| ell_n(n, prm.l, prm.k, prm.d, prm.j)).collect()
}

/// Evaluates the cutoff-chain bracket of every surviving order-`p` term.
pub fn cutoff_chain_bound<T: Real>(
    h: &PartitionedHamiltonian<T>,
    model: &DenseModel<T>,
    f: &FormulaSchedule<T>,
    p: usize,
    chain: &CutoffChain<T>,
) -> Result<ChainBound<T>> {
    if chain.levels() != p {
        return Err(Error::InvalidChain(format!(
            "order {p} needs {p} cutoffs after Δ′, got {}",
            chain.levels()
        )));
    }
    let prm = h.params();
    let lambda = lambda_param(prm.j, prm.d, prm.k)?;
    let ells = ell_values(p, prm);
    let cache = model.spectrum();
    let c = chain.cutoffs();
    // norms[m][i] = ‖H_m‖_{≤c_i}
    let norms: Vec<Vec<T>> = (0..model.groups())
        .map(|m| {
            c.iter()
                .map(|&ci| cache.restricted_norm(model.group_matrix(m), ci))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let two = lit::<T>(2.0);
    let mut terms = Vec::new();
    for bt in bound_terms(f, h, p)? {
        if bt.nested.is_empty() {
            continue;
        }
        // idx[0] = m_p (outermost), …, idx[p] = m
        let idx = bt.spec.indices();
        let mut leakage = Vec::with_capacity(p);
        let mut prefix = T::one();
        for jj in 1..=p {
            let gap = c[jj] - c[jj - 1];
            leakage.push(two.powi(jj as i32) * prefix * ells[0] * ells[p - jj] * (-two * lambda * gap).exp());
            prefix *= norms[idx[jj - 1]][jj];
        }
        let final_term = two.powi(p as i32) * prefix * norms[idx[p]][p];
        terms.push(ChainTerm {
            groups: idx.to_vec(),
            coeff: bt.coeff,
            leakage,
            final_term,
        });
    }
    Ok(ChainBound { p, terms })
}

/// Spaces the chain so each leakage term is at most `θ/p` of the final
/// term: `c_j − c_{j−1} = (1/(2λ)) ln(2ʲ ℓ_0 ℓ_{p−j} scale^{j−1} p / (θ F))`.
///
/// `scale` must bound every `‖H_m‖` and `final_estimate` must not exceed
/// any final term; gaps that come out negative are clamped to zero.
pub fn auto_chain<T: Real>(
    delta_prime: T,
    p: usize,
    lambda: T,
    ells: &[T],
    theta: T,
    scale: T,
    final_estimate: T,
) -> Result<CutoffChain<T>> {
    if p == 0 {
        return Err(Error::InvalidChain("order must be positive".into()));
    }
    if ells.len() < p {
        return Err(Error::InvalidChain(format!("need ℓ_0..ℓ_{}", p - 1)));
    }
    if !(theta > T::zero() && theta < T::one()) {
        return Err(Error::InvalidParameter("θ must lie in (0, 1)".into()));
    }
    if final_estimate <= T::zero() {
        return Err(Error::InvalidChain("final-term estimate must be positive".into()));
    }
    let two = lit::<T>(2.0);
    let pf = lit::<T>(p as f64);
    let mut cutoffs = vec![delta_prime];
    let mut c = delta_prime;
    for j in 1..=p {
        let arg = two.powi(j as i32) * ells[0] * ells[p - j] * scale.powi(j as i32 - 1) * pf / (theta * final_estimate);
        let gap = (arg.ln() / (two * lambda)).max(T::zero());
        c += gap;
        cutoffs.push(c);
    }
    CutoffChain::new(cutoffs)
}

/// [`auto_chain`] with `ℓ`, `λ` from the model, `scale = max_m ‖H_m‖` and
/// `F = 2ᵖ (min_m ‖H_m‖_{≤Δ′})^{p+1}`.
pub fn auto_chain_for<T: Real>(
    h: &PartitionedHamiltonian<T>,
    model: &DenseModel<T>,
    p: usize,
    delta_prime: T,
    theta: T,
) -> Result<CutoffChain<T>> {
    let prm = h.params();
    let lambda = lambda_param(prm.j, prm.d, prm.k)?;
    let ells = ell_values(p, prm);
    let mut scale = T::zero();
    let mut min_restricted = T::max_value().unwrap();
    for m in 0..model.groups() {
        let g = model.group_matrix(m);
        scale = scale.max(spectral_norm(g));
        min_restricted = min_restricted.min(model.spectrum().restricted_norm(g, delta_prime)?);
    }
    let estimate = lit::<T>(2.0).powi(p as i32) * min_restricted.powi(p as i32 + 1);
    auto_chain(delta_prime, p, lambda, &ells, theta, scale, estimate)
}

/// `(s^{p+1}/(p+1)) · 2ᵖ · Σ|f| · Δ_f^{p+1}`, the step bound for PSD groups.
pub fn psd_step_error_bound<T: Real>(s: T, p: usize, delta_f: T, f_sum: T) -> T {
    s.abs().powi(p as i32 + 1) / lit::<T>((p + 1) as f64)
        * lit::<T>(2.0).powi(p as i32)
        * f_sum
        * delta_f.powi(p as i32 + 1)
}

/// `Δ̃_f = max_m min_C ‖Π(H_m + C)Π‖`, i.e. the largest half-spread of a
/// compressed group block.
pub fn delta_tilde_f<T: Real>(model: &DenseModel<T>, delta_f: T) -> Result<T> {
    let cache = model.spectrum();
    if cache.count_leq(delta_f) == 0 {
        return Err(Error::EmptySubspace(to_f64(delta_f)));
    }
    let mut best = T::zero();
    for m in 0..model.groups() {
        best = best.max(half_spread(&cache.compress(model.group_matrix(m), delta_f)?)?);
    }
    Ok(best)
}

fn half_spread<T: Real>(block: &CMatrix<T>) -> Result<T> {
    let sc = SpectralCache::new(block)?;
    Ok((sc.max_energy() - sc.min_energy()) / lit::<T>(2.0))
}

/// `ε_Δ(s) = ‖(W(s) − e^{−iHs}) Π_{≤Δ}‖`.
pub fn empirical_low_energy_error<T: Real>(
    model: &DenseModel<T>,
    f: &FormulaSchedule<T>,
    s: T,
    delta: T,
) -> Result<T> {
    let diff = model.apply_formula(f, s)? - model.exact(s);
    Ok(spectral_norm(&(diff * model.spectrum().low_basis(delta))))
}

/// `‖Π_{>Δ′} W(s) Π_{≤Δ}‖`.
pub fn empirical_leakage<T: Real>(
    model: &DenseModel<T>,
    f: &FormulaSchedule<T>,
    s: T,
    delta: T,
    delta_prime: T,
) -> Result<T> {
    check_cutoffs(delta, delta_prime)?;
    model.spectrum().leakage_norm(&model.apply_formula(f, s)?, delta, delta_prime)
}

/// `ε_Δ` split at `Δ′` into retained and leakage blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition<T> {
    pub eps: T,
    /// `‖Π_{≤Δ′}(W − e^{−iHs})Π_{≤Δ}‖`.
    pub retained: T,
    /// `‖Π_{>Δ′} W Π_{≤Δ}‖`.
    pub leakage: T,
}

impl<T: Real> Decomposition<T> {
    pub fn triangle_holds(&self) -> bool {
        self.eps <= self.retained + self.leakage + lit::<T>(VERDICT_TOL)
    }
}

pub fn error_decomposition<T: Real>(
    model: &DenseModel<T>,
    f: &FormulaSchedule<T>,
    s: T,
    delta: T,
    delta_prime: T,
) -> Result<Decomposition<T>> {
    check_cutoffs(delta, delta_prime)?;
    let cache = model.spectrum();
    let w = model.apply_formula(f, s)?;
    let diff = &w - model.exact(s);
    let low = cache.low_basis(delta);
    let eps = spectral_norm(&(&diff * &low));
    let retained = spectral_norm(&(cache.low_basis(delta_prime).adjoint() * &diff * &low));
    let leakage = spectral_norm(&(cache.high_basis(delta_prime).adjoint() * &w * &low));
    let out = Decomposition { eps, retained, leakage };
    debug_assert!(out.triangle_holds());
    Ok(out)
}

/// Outcome of comparing a measured value with its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Na,
}

impl Verdict {
    pub fn compare(measured: f64, bound: Option<f64>) -> Self {
        match bound {
            None => Verdict::Na,
            Some(b) if measured <= b + VERDICT_TOL => Verdict::Pass,
            Some(_) => Verdict::Fail,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Na => "na",
        })
    }
}

/// How `Δ′` is chosen at each grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaPrimePolicy<T> {
    /// [`select_delta_prime`] with the given target leakage `ϑ`.
    Auto { target: T },
    /// `Δ′ = Δ + gap`.
    Gap(T),
}

/// Per-(model, schedule) data shared by every grid point.
#[derive(Debug, Clone)]
pub struct AnalysisContext<'a, T: Real> {
    h: &'a PartitionedHamiltonian<T>,
    model: &'a DenseModel<T>,
    f: &'a FormulaSchedule<T>,
    lambda: T,
    /// `(|f|, dense nested commutator)` for surviving order-`p` terms;
    /// `None` when `p` exceeds the tabulated orders.
    terms: Option<Vec<(T, CMatrix<T>)>>,
    f_sum: T,
    ell_p: T,
    chain_theta: T,
    slack: T,
}

impl<'a, T: Real> AnalysisContext<'a, T> {
    pub fn new(h: &'a PartitionedHamiltonian<T>, model: &'a DenseModel<T>, f: &'a FormulaSchedule<T>) -> Result<Self> {
        f.validate(h.groups().len())?;
        let prm = h.params();
        let lambda = lambda_param(prm.j, prm.d, prm.k)?;
        let p = f.order();
        let terms = if p <= MAX_COEFF_ORDER {
            let mut out = Vec::new();
            for bt in bound_terms(f, h, p)? {
                if !bt.nested.is_empty() {
                    out.push((bt.coeff.abs(), bt.nested.dense(h.dense_limit())?));
                }
            }
            Some(out)
        } else {
            None
        };
        let f_sum = terms
            .as_ref()
            .map(|t| t.iter().fold(T::zero(), |a, (c, _)| a + *c))
            .unwrap_or_else(T::zero);
        Ok(AnalysisContext {
            h,
            model,
            f,
            lambda,
            terms,
            f_sum,
            ell_p: ell_n(p, prm.l, prm.k, prm.d, prm.j),
            chain_theta: lit(DEFAULT_CHAIN_THETA),
            slack: lit(DEFAULT_SLACK),
        })
    }

    pub fn with_slack(mut self, slack: T) -> Self {
        self.slack = slack;
        self
    }

    pub fn with_chain_theta(mut self, theta: T) -> Self {
        self.chain_theta = theta;
        self
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn order(&self) -> usize {
        self.f.order()
    }

    /// Whether coefficient-based bounds are available.
    pub fn has_coefficients(&self) -> bool {
        self.terms.is_some()
    }

    pub fn f_sum(&self) -> T {
        self.f_sum
    }

    pub fn r_w(&self, s: T) -> Option<T> {
        self.terms
            .as_ref()
            .map(|_| r_w_from_parts(s, self.order(), self.ell_p, self.lambda, self.f_sum))
    }

    pub fn commutator_bound_sum(&self) -> Option<T> {
        self.terms
            .as_ref()
            .map(|t| t.iter().fold(T::zero(), |a, (c, m)| a + *c * spectral_norm(m)))
    }

    pub fn restricted_commutator_bound_sum(&self, cutoff: T) -> Result<Option<T>> {
        let Some(terms) = &self.terms else {
            return Ok(None);
        };
        let cache = self.model.spectrum();
        let mut acc = T::zero();
        for (c, m) in terms {
            acc += *c * cache.restricted_norm(m, cutoff)?;
        }
        Ok(Some(acc))
    }

    /// Evaluates every empirical quantity and bound at one grid point.
    pub fn evaluate(&self, s: T, delta: T, policy: DeltaPrimePolicy<T>) -> Result<BoundReport> {
        let p = self.order();
        let rw = self.r_w(s);
        let delta_prime = match (policy, rw) {
            (DeltaPrimePolicy::Gap(g), _) => {
                if g < T::zero() {
                    return Err(Error::InvalidParameter("Δ′ gap must be nonnegative".into()));
                }
                delta + g
            }
            (DeltaPrimePolicy::Auto { target }, Some(rw)) => select_delta_prime(delta, rw, self.lambda, target)?.value,
            (DeltaPrimePolicy::Auto { .. }, None) => delta,
        };
        let dec = error_decomposition(self.model, self.f, s, delta, delta_prime)?;
        let mut flags = Vec::new();

        let leakage_bound = match rw {
            Some(rw) => {
                let b = formula_leakage_bound(delta, delta_prime, self.lambda, rw)?;
                if b.vacuous {
                    flags.push("leakage");
                }
                Some(b.value)
            }
            None => None,
        };
        let retained_bound = self.restricted_commutator_bound_sum(delta_prime)?.map(|sum| {
            let b = s.abs().powi(p as i32 + 1) / lit::<T>((p + 1) as f64) * sum * self.slack;
            if b >= lit(2.0) {
                flags.push("retained");
            }
            b
        });

        let (delta_f, psd_bound) = if self.has_coefficients() {
            let chain = auto_chain_for(self.h, self.model, p, delta_prime, self.chain_theta)?;
            let df = chain.delta_f();
            let psd = if self.h.is_psd() {
                let b = psd_step_error_bound(s, p, df, self.f_sum) * self.slack;
                if b >= lit(2.0) {
                    flags.push("psd");
                }
                Some(b)
            } else {
                None
            };
            (Some(df), psd)
        } else {
            (None, None)
        };
        let delta_tilde = match delta_f {
            Some(df) if !self.h.is_psd() => Some(to_f64(delta_tilde_f(self.model, df)?)),
            _ => None,
        };

        Ok(BoundReport {
            model: String::new(),
            schedule: self.f.name().to_string(),
            p,
            s: to_f64(s),
            delta: to_f64(delta),
            delta_prime: to_f64(delta_prime),
            delta_f: delta_f.map(to_f64),
            delta_tilde_f: delta_tilde,
            eps_empirical: to_f64(dec.eps),
            leakage_empirical: to_f64(dec.leakage),
            retained_empirical: to_f64(dec.retained),
            leakage_bound: leakage_bound.map(to_f64),
            retained_bound: retained_bound.map(to_f64),
            psd_bound: psd_bound.map(to_f64),
            vacuity_flags: flags.into_iter().map(String::from).collect(),
        })
    }
}

/// One grid point of an analysis run. Verdicts are derived from the
/// stored numbers on demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub model: String,
    pub schedule: String,
    pub p: usize,
    pub s: f64,
    pub delta: f64,
    pub delta_prime: f64,
    pub delta_f: Option<f64>,
    /// Largest optimally shifted group norm below `Δ_f`, for non-PSD models.
    pub delta_tilde_f: Option<f64>,
    pub eps_empirical: f64,
    pub leakage_empirical: f64,
    pub retained_empirical: f64,
    pub leakage_bound: Option<f64>,
    /// Leading-order restricted bound, slack included.
    pub retained_bound: Option<f64>,
    /// PSD step bound, slack included.
    pub psd_bound: Option<f64>,
    pub vacuity_flags: Vec<String>,
}

impl BoundReport {
    pub fn verdict_leakage(&self) -> Verdict {
        Verdict::compare(self.leakage_empirical, self.leakage_bound)
    }

    pub fn verdict_retained(&self) -> Verdict {
        Verdict::compare(self.retained_empirical, self.retained_bound)
    }

    pub fn verdict_psd(&self) -> Verdict {
        Verdict::compare(self.eps_empirical, self.psd_bound)
    }

    pub fn verdicts(&self) -> [Verdict; 3] {
        [self.verdict_leakage(), self.verdict_retained(), self.verdict_psd()]
    }

    pub fn all_pass(&self) -> bool {
        !self.verdicts().contains(&Verdict::Fail)
    }
}

/// Aggregated order-`n` coefficient sum `Σ|f|` over all group tuples,
/// including those whose commutator vanishes.
pub fn f_abs_sum<T: Real>(f: &FormulaSchedule<T>, n: usize) -> Result<T> {
    Ok(expand_f_coefficients(f, n)?.abs_sum(n))
}
