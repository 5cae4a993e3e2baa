//! Trotter-number scaling laws and an empirical minimal-`r` search.
//!
//! Exponents are exact rationals over the variables `T` (total time), `N`
//! (system size), `Δ` (initial energy cutoff) and `ε` (target error).

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bounds::empirical_low_energy_error;
use crate::formulas::{DenseModel, FormulaSchedule};
use crate::{lit, to_f64, Error, Real, Result};

pub type Exponent = Ratio<i64>;

/// Default ceiling on the Trotter number search.
pub const DEFAULT_R_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    General,
    PriorLowEnergy,
    Present,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::General, Method::PriorLowEnergy, Method::Present];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::General => "general",
            Method::PriorLowEnergy => "prior-low-energy",
            Method::Present => "present",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Method::General),
            "prior" | "prior-low-energy" => Ok(Method::PriorLowEnergy),
            "present" => Ok(Method::Present),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// `c · T^t N^n Δ^δ ε^e` with rational exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monomial {
    pub t: Exponent,
    pub n: Exponent,
    pub delta: Exponent,
    pub eps: Exponent,
}

impl Monomial {
    fn new(t: Exponent, n: Exponent, delta: Exponent, eps: Exponent) -> Self {
        Monomial { t, n, delta, eps }
    }

    /// Direct evaluation as a product of powers.
    pub fn eval(&self, t: f64, n: f64, delta: f64, eps: f64) -> f64 {
        pow(t, self.t) * pow(n, self.n) * pow(delta, self.delta) * pow(eps, self.eps)
    }

    /// Evaluation through logarithms, `exp(Σ a ln x)`.
    pub fn eval_log(&self, t: f64, n: f64, delta: f64, eps: f64) -> f64 {
        let f = |r: Exponent| *r.numer() as f64 / *r.denom() as f64;
        (f(self.t) * t.ln() + f(self.n) * n.ln() + f(self.delta) * delta.ln() + f(self.eps) * eps.ln()).exp()
    }
}

fn pow(x: f64, r: Exponent) -> f64 {
    if *r.numer() == 0 {
        return 1.0;
    }
    x.powf(*r.numer() as f64 / *r.denom() as f64)
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("T", self.t), ("N", self.n), ("Delta", self.delta), ("eps", self.eps)] {
            if *e.numer() == 0 {
                continue;
            }
            if e == Exponent::from_integer(1) {
                parts.push(name.to_string());
            } else {
                parts.push(format!("{name}^({e})"));
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingLaw {
    pub method: Method,
    pub p: u32,
    pub terms: Vec<Monomial>,
    /// Whether the law holds only up to polylogarithmic factors.
    pub polylog: bool,
}

impl fmt::Display for ScalingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.terms.iter().map(Monomial::to_string).collect();
        let o = if self.polylog { "O~" } else { "O" };
        write!(f, "{o}({})", body.join(" + "))
    }
}

fn ratio(n: i64, d: i64) -> Exponent {
    Exponent::new(n, d)
}

fn check_order(p: u32) -> Result<i64> {
    if p == 0 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    Ok(p as i64)
}

/// The cutoff-dependent monomial `T^{1+1/p} Δ^{1+1/p} ε^{−1/p}` shared by
/// both low-energy laws.
fn delta_term(p: i64) -> Monomial {
    let a = ratio(p + 1, p);
    Monomial::new(a, Exponent::from_integer(0), a, ratio(-1, p))
}

/// `T^{1+1/p} N^{1/p} ε^{−1/p}`.
pub fn scaling_general(p: u32) -> Result<ScalingLaw> {
    let p = check_order(p)?;
    Ok(ScalingLaw {
        method: Method::General,
        p: p as u32,
        terms: vec![Monomial::new(ratio(p + 1, p), ratio(1, p), Exponent::from_integer(0), ratio(-1, p))],
        polylog: false,
    })
}

/// `T^{1+1/p} Δ^{1+1/p} ε^{−1/p} + T^{(2p+2)/(2p+1)} N^{(p+1)/(2p+1)} ε^{−1/(2p+1)}`.
pub fn scaling_prior_low_energy(p: u32) -> Result<ScalingLaw> {
    let p = check_order(p)?;
    let q = 2 * p + 1;
    Ok(ScalingLaw {
        method: Method::PriorLowEnergy,
        p: p as u32,
        terms: vec![
            delta_term(p),
            Monomial::new(ratio(2 * p + 2, q), ratio(p + 1, q), Exponent::from_integer(0), ratio(-1, q)),
        ],
        polylog: true,
    })
}

/// `T^{1+1/p} Δ^{1+1/p} ε^{−1/p} + T^{1+1/q} N^{(p+1)/q} ε^{−1/q}` with
/// `q = (p+1)² + p`.
pub fn scaling_present(p: u32) -> Result<ScalingLaw> {
    let p = check_order(p)?;
    let q = (p + 1) * (p + 1) + p;
    Ok(ScalingLaw {
        method: Method::Present,
        p: p as u32,
        terms: vec![
            delta_term(p),
            Monomial::new(ratio(q + 1, q), ratio(p + 1, q), Exponent::from_integer(0), ratio(-1, q)),
        ],
        polylog: true,
    })
}

pub fn scaling(method: Method, p: u32) -> Result<ScalingLaw> {
    match method {
        Method::General => scaling_general(p),
        Method::PriorLowEnergy => scaling_prior_low_energy(p),
        Method::Present => scaling_present(p),
    }
}

/// Exponent of `N` in the law, read off its monomials.
pub fn n_exponent(method: Method, p: u32) -> Result<Exponent> {
    let law = scaling(method, p)?;
    Ok(law
        .terms
        .iter()
        .map(|m| m.n)
        .max()
        .unwrap_or_else(|| Exponent::from_integer(0)))
}

/// The same exponent in the closed form quoted alongside the comparison:
/// `1/p`, `1/2 + 1/(4p+2)` and `1/(p + 1 + p/(p+1))`.
pub fn n_exponent_closed_form(method: Method, p: u32) -> Result<Exponent> {
    let p = check_order(p)?;
    let one = Exponent::from_integer(1);
    Ok(match method {
        Method::General => ratio(1, p),
        Method::PriorLowEnergy => ratio(1, 2) + ratio(1, 4 * p + 2),
        Method::Present => one / (Exponent::from_integer(p + 1) + ratio(p, p + 1)),
    })
}

/// `N` exponents of the three methods for `p = 1..=p_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentRow {
    pub p: u32,
    pub general: Exponent,
    pub prior: Exponent,
    pub present: Exponent,
}

pub fn exponent_comparison(p_max: u32) -> Result<Vec<ExponentRow>> {
    (1..=p_max)
        .map(|p| {
            Ok(ExponentRow {
                p,
                general: n_exponent(Method::General, p)?,
                prior: n_exponent(Method::PriorLowEnergy, p)?,
                present: n_exponent(Method::Present, p)?,
            })
        })
        .collect()
}

/// A law evaluated with an explicit constant in front of every monomial.
#[derive(Debug, Clone, PartialEq)]
pub struct LawValue {
    pub value: f64,
    pub terms: Vec<f64>,
    /// Index of the largest monomial.
    pub dominant: usize,
}

pub fn evaluate_law(law: &ScalingLaw, t: f64, n: f64, delta: f64, eps: f64, unit_constant: f64) -> Result<LawValue> {
    for (name, x) in [("T", t), ("N", n), ("Delta", delta), ("eps", eps)] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")));
        }
    }
    if eps >= 1.0 {
        return Err(Error::InvalidParameter(format!("eps must be below 1, got {eps}")));
    }
    if unit_constant < 0.0 {
        return Err(Error::InvalidParameter("unit constant must be nonnegative".into()));
    }
    let terms: Vec<f64> = law.terms.iter().map(|m| unit_constant * m.eval(t, n, delta, eps)).collect();
    let dominant = terms
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > terms[best] { i } else { best });
    Ok(LawValue {
        value: terms.iter().sum(),
        terms,
        dominant,
    })
}

/// Result of a minimal Trotter-number search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterSearch {
    pub r: u64,
    /// `r · ε(T/r)` at the returned `r`.
    pub error: f64,
}

/// Smallest `r` with `r · ε(T/r) ≤ ε_target`, where `ε` is the error on
/// eigenvalues `≤ Δ` (or on the full space when `delta` is `None`).
///
/// Doubles `r` until the target is met, bisects the last bracket, then
/// checks that `r + 1` also meets the target.
pub fn empirical_trotter_number<T: Real>(
    model: &DenseModel<T>,
    f: &FormulaSchedule<T>,
    delta: Option<T>,
    total_time: T,
    eps_target: T,
    cap: u64,
) -> Result<TrotterSearch> {
    if total_time <= T::zero() {
        return Err(Error::InvalidParameter("total time must be positive".into()));
    }
    if !(eps_target > T::zero() && eps_target < T::one()) {
        return Err(Error::InvalidParameter("target error must lie in (0, 1)".into()));
    }
    let cutoff = delta.unwrap_or_else(|| model.spectrum().max_energy());
    let g = |r: u64| -> Result<T> {
        let rf = lit::<T>(r as f64);
        Ok(rf * empirical_low_energy_error(model, f, total_time / rf, cutoff)?)
    };
    let mut hi = 1u64;
    let mut g_hi = g(hi)?;
    while g_hi > eps_target {
        if hi >= cap {
            return Err(Error::RNotFoundWithinBudget { cap });
        }
        hi = (hi * 2).min(cap);
        g_hi = g(hi)?;
    }
    let mut lo = hi / 2; // fails the target, or 0 when r = 1 suffices
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let g_mid = g(mid)?;
        if g_mid <= eps_target {
            hi = mid;
            g_hi = g_mid;
        } else {
            lo = mid;
        }
    }
    if g(hi + 1)? > eps_target {
        return Err(Error::NonMonotone(hi));
    }
    Ok(TrotterSearch {
        r: hi,
        error: to_f64(g_hi),
    })
}
