//! Product-formula schedules and their exact dense evaluation.
//!
//! A schedule is a list of stages `(m_ν, a_ν)`; the first stage is applied
//! first, so `W(s) = e^{−i a_q s H_{m_q}} ⋯ e^{−i a_1 s H_{m_1}}`. Group
//! indices are zero-based.

use nalgebra::Complex;

use crate::pauli::PartitionedHamiltonian;
use crate::quadrature;
use crate::spectral::{spectral_norm, SpectralCache};
use crate::{lit, to_f64, CMatrix, Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage<T: Real> {
    pub group: usize,
    pub coeff: T,
}

impl<T: Real> Stage<T> {
    pub fn new(group: usize, coeff: T) -> Self {
        Stage { group, coeff }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormulaSchedule<T: Real> {
    name: String,
    stages: Vec<Stage<T>>,
    order: usize,
}

/// Tolerance on the per-group coefficient sums.
const CONSISTENCY_TOL: f64 = 1e-10;

impl<T: Real> FormulaSchedule<T> {
    /// User-supplied schedule. Adjacent stages on the same group are fused.
    pub fn new(name: impl Into<String>, stages: Vec<Stage<T>>, order: usize) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidSchedule("no stages".into()));
        }
        if order == 0 {
            return Err(Error::InvalidSchedule("order must be positive".into()));
        }
        Ok(FormulaSchedule {
            name: name.into(),
            stages: fuse(stages),
            order,
        })
    }

    /// First-order formula `e^{−isH_M} ⋯ e^{−isH_1}`.
    pub fn lie_trotter(groups: usize) -> Result<Self> {
        check_groups(groups)?;
        let stages = (0..groups).map(|m| Stage::new(m, T::one())).collect();
        Self::new("lie-trotter", stages, 1)
    }

    /// Symmetric second-order formula.
    pub fn strang(groups: usize) -> Result<Self> {
        check_groups(groups)?;
        Self::new("strang", strang_stages(groups), 2)
    }

    /// Suzuki's recursion `S_{2κ}(s) = S_{2κ−2}(u s)² S_{2κ−2}((1−4u)s) S_{2κ−2}(u s)²`
    /// with `u = 1/(4 − 4^{1/(2κ−1)})`, starting from the Strang formula.
    pub fn suzuki(order: usize, groups: usize) -> Result<Self> {
        check_groups(groups)?;
        if order == 0 || order % 2 == 1 {
            return Err(Error::OddOrder(order));
        }
        let name = if order == 2 {
            "strang".to_string()
        } else {
            format!("suzuki-{order}")
        };
        Self::new(name, suzuki_stages(order, groups), order)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> &[Stage<T>] {
        &self.stages
    }

    /// Declared order `p`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of exponentials `q`.
    pub fn q(&self) -> usize {
        self.stages.len()
    }

    /// Per-group coefficient sums `Σ_{ν: m_ν = m} a_ν`.
    pub fn group_sums(&self, groups: usize) -> Vec<T> {
        let mut sums = vec![T::zero(); groups];
        for st in &self.stages {
            if st.group < groups {
                sums[st.group] += st.coeff;
            }
        }
        sums
    }

    /// Checks group indices and first-order consistency against `M` groups.
    pub fn validate(&self, groups: usize) -> Result<()> {
        if let Some(st) = self.stages.iter().find(|st| st.group >= groups) {
            return Err(Error::GroupOutOfRange {
                index: st.group,
                groups,
            });
        }
        for (m, sum) in self.group_sums(groups).into_iter().enumerate() {
            if (sum - T::one()).abs() > lit(CONSISTENCY_TOL) {
                return Err(Error::InvalidSchedule(format!(
                    "coefficients of group {m} sum to {}, not 1",
                    to_f64(sum)
                )));
            }
        }
        Ok(())
    }

    pub fn is_palindrome(&self) -> bool {
        let n = self.stages.len();
        (0..n / 2).all(|i| {
            let (a, b) = (self.stages[i], self.stages[n - 1 - i]);
            a.group == b.group && (a.coeff - b.coeff).abs() <= lit(1e-14)
        })
    }
}

fn check_groups(groups: usize) -> Result<()> {
    if groups == 0 {
        return Err(Error::NoGroups);
    }
    Ok(())
}

fn fuse<T: Real>(stages: Vec<Stage<T>>) -> Vec<Stage<T>> {
    let mut out: Vec<Stage<T>> = Vec::with_capacity(stages.len());
    for st in stages {
        match out.last_mut() {
            Some(last) if last.group == st.group => last.coeff += st.coeff,
            _ => out.push(st),
        }
    }
    out
}

fn strang_stages<T: Real>(groups: usize) -> Vec<Stage<T>> {
    let half = lit::<T>(0.5);
    let mut stages: Vec<Stage<T>> = (0..groups - 1).map(|m| Stage::new(m, half)).collect();
    stages.push(Stage::new(groups - 1, T::one()));
    stages.extend((0..groups - 1).rev().map(|m| Stage::new(m, half)));
    fuse(stages)
}

fn suzuki_stages<T: Real>(order: usize, groups: usize) -> Vec<Stage<T>> {
    if order == 2 {
        return strang_stages(groups);
    }
    let base = suzuki_stages::<T>(order - 2, groups);
    let u = suzuki_weight::<T>(order / 2);
    let scaled = |w: T| base.iter().map(move |st| Stage::new(st.group, st.coeff * w));
    let outer = lit::<T>(1.0) - lit::<T>(4.0) * u;
    let stages: Vec<Stage<T>> = scaled(u)
        .chain(scaled(u))
        .chain(scaled(outer))
        .chain(scaled(u))
        .chain(scaled(u))
        .collect();
    fuse(stages)
}

/// `u_κ = 1/(4 − 4^{1/(2κ−1)})`.
pub fn suzuki_weight<T: Real>(kappa: usize) -> T {
    let exponent = lit::<T>(1.0) / lit::<T>((2 * kappa - 1) as f64);
    T::one() / (lit::<T>(4.0) - lit::<T>(4.0).powf(exponent))
}

/// Dense matrices and spectral caches of a Hamiltonian and its groups.
#[derive(Debug, Clone)]
pub struct DenseModel<T: Real> {
    hamiltonian: CMatrix<T>,
    spectrum: SpectralCache<T>,
    group_matrices: Vec<CMatrix<T>>,
    group_spectra: Vec<SpectralCache<T>>,
}

impl<T: Real> DenseModel<T> {
    pub fn new(h: &PartitionedHamiltonian<T>) -> Result<Self> {
        let hamiltonian = h.dense()?;
        let spectrum = SpectralCache::new(&hamiltonian)?;
        let group_matrices = (0..h.groups().len())
            .map(|m| h.group_dense(m))
            .collect::<Result<Vec<_>>>()?;
        let group_spectra = group_matrices
            .iter()
            .map(SpectralCache::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(DenseModel {
            hamiltonian,
            spectrum,
            group_matrices,
            group_spectra,
        })
    }

    pub fn hamiltonian(&self) -> &CMatrix<T> {
        &self.hamiltonian
    }

    /// Spectral cache of the full Hamiltonian.
    pub fn spectrum(&self) -> &SpectralCache<T> {
        &self.spectrum
    }

    pub fn group_matrix(&self, m: usize) -> &CMatrix<T> {
        &self.group_matrices[m]
    }

    pub fn groups(&self) -> usize {
        self.group_matrices.len()
    }

    pub fn dimension(&self) -> usize {
        self.hamiltonian.nrows()
    }

    fn stage_unitary(&self, st: &Stage<T>, s: T) -> CMatrix<T> {
        self.group_spectra[st.group].evolve(st.coeff * s)
    }

    /// Exact propagator `e^{−iHs}`.
    pub fn exact(&self, s: T) -> CMatrix<T> {
        self.spectrum.evolve(s)
    }

    /// `W(s)`: product of group propagators in stage order.
    pub fn apply_formula(&self, f: &FormulaSchedule<T>, s: T) -> Result<CMatrix<T>> {
        f.validate(self.groups())?;
        let dim = self.dimension();
        let mut w = CMatrix::identity(dim, dim);
        for st in f.stages() {
            w = self.stage_unitary(st, s) * w;
        }
        Ok(w)
    }

    /// `F(s) = Σ_ν a_ν V_ν H_{m_ν} V_ν†` with `V_ν = U_q ⋯ U_{ν+1}`,
    /// so that `dW/ds = −i F(s) W(s)`.
    pub fn f_operator(&self, f: &FormulaSchedule<T>, s: T) -> Result<CMatrix<T>> {
        f.validate(self.groups())?;
        let dim = self.dimension();
        let mut v = CMatrix::identity(dim, dim);
        let mut out = CMatrix::zeros(dim, dim);
        for st in f.stages().iter().rev() {
            let conj = &v * &self.group_matrices[st.group] * v.adjoint();
            out += conj * Complex::new(st.coeff, T::zero());
            v *= self.stage_unitary(st, s);
        }
        Ok(hermitize(out))
    }

    /// `E(s) = F(s) − H`.
    pub fn e_operator(&self, f: &FormulaSchedule<T>, s: T) -> Result<CMatrix<T>> {
        Ok(self.f_operator(f, s)? - &self.hamiltonian)
    }

    /// `‖W(s) − e^{−iHs}‖`.
    pub fn step_error(&self, f: &FormulaSchedule<T>, s: T) -> Result<T> {
        Ok(spectral_norm(&(self.apply_formula(f, s)? - self.exact(s))))
    }
}

fn hermitize<T: Real>(a: CMatrix<T>) -> CMatrix<T> {
    let half = Complex::new(lit::<T>(0.5), T::zero());
    (&a + a.adjoint()) * half
}

/// `∫_0^s ‖E(σ)‖ dσ` by Gauss–Legendre quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralBound<T> {
    pub value: T,
    /// `|value − value with ⌈n/2⌉ nodes|`.
    pub refinement_delta: T,
}

pub fn error_integral_bound<T: Real>(
    model: &DenseModel<T>,
    f: &FormulaSchedule<T>,
    s: T,
    n_quad: usize,
) -> Result<IntegralBound<T>> {
    if n_quad < 2 {
        return Err(Error::InvalidParameter("quadrature needs at least 2 nodes".into()));
    }
    let integrand = |sigma: T| model.e_operator(f, sigma).map(|e| spectral_norm(&e));
    let lo = if s >= T::zero() { T::zero() } else { s };
    let hi = if s >= T::zero() { s } else { T::zero() };
    let value = quadrature::integrate(n_quad, lo, hi, integrand)?;
    let coarse = quadrature::integrate(n_quad.div_ceil(2), lo, hi, integrand)?;
    Ok(IntegralBound {
        value,
        refinement_delta: (value - coarse).abs(),
    })
}

/// Regime guard for slope fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitGuard {
    /// Largest error still considered asymptotic.
    pub max_error: f64,
    /// Errors at or below this are treated as round-off and dropped.
    pub floor: f64,
    pub min_points: usize,
}

impl Default for FitGuard {
    fn default() -> Self {
        FitGuard {
            max_error: 1e-3,
            floor: 1e-12,
            min_points: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(s, error)` pairs that entered the fit.
    pub points: Vec<(f64, f64)>,
}

/// Least-squares slope of `log ‖W(s) − e^{−iHs}‖` against `log s`.
pub fn empirical_order<T: Real>(
    model: &DenseModel<T>,
    f: &FormulaSchedule<T>,
    s_grid: &[T],
    guard: FitGuard,
) -> Result<OrderFit> {
    let s_f: Vec<f64> = s_grid.iter().map(|&s| to_f64(s)).collect();
    let (lo, hi) = s_f
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
    if s_f.is_empty() || lo <= 0.0 || hi / lo < 10.0 - 1e-9 {
        return Err(Error::InvalidParameter(
            "step grid must be positive and span at least one decade".into(),
        ));
    }
    let mut points = Vec::new();
    for (&s, &sf) in s_grid.iter().zip(&s_f) {
        let err = to_f64(model.step_error(f, s)?);
        if err > guard.max_error {
            return Err(Error::NonAsymptoticGrid { s: sf, error: err });
        }
        if err > guard.floor {
            points.push((sf, err));
        }
    }
    if points.len() < guard.min_points.max(2) {
        return Err(Error::DegenerateFit(format!(
            "{} of {} errors above the {:e} floor",
            points.len(),
            s_grid.len(),
            guard.floor
        )));
    }
    let (slope, intercept) = least_squares(points.iter().map(|&(s, e)| (s.ln(), e.ln())));
    Ok(OrderFit {
        slope,
        intercept,
        points,
    })
}

/// Ordinary least-squares line through `(x, y)` pairs.
pub fn least_squares(pts: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let n = pts.clone().count() as f64;
    let (sx, sy) = pts.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
