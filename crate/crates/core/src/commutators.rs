//! Symbolic nested commutators of Hamiltonian groups and the coefficient
//! tables of the product-formula generator expansion.

use std::collections::BTreeMap;

use nalgebra::Complex;

use crate::formulas::FormulaSchedule;
use crate::pauli::{dense_matrix, LocalTerm, PartitionedHamiltonian, PauliString};
use crate::spectral::{spectral_norm, SpectralCache};
use crate::{lit, CMatrix, Error, Real, Result};

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Default cap on the nesting depth of a symbolic expansion.
pub const DEFAULT_MAX_NESTED: usize = 4;

/// Highest order for which generator coefficients are tabulated.
pub const MAX_COEFF_ORDER: usize = 3;

/// Coefficients at or below this magnitude are dropped after each level.
pub const DROP_TOL: f64 = 1e-14;

/// Group indices `(m_n, …, m_1, m)` of `[H_{m_n}, …, [H_{m_1}, H_m]]`,
/// outermost first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NestedSpec {
    indices: Vec<usize>,
}

impl NestedSpec {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter("nested spec needs at least one index".into()));
        }
        Ok(NestedSpec { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Nesting order `n` (number of commutators).
    pub fn order(&self) -> usize {
        self.indices.len() - 1
    }

    /// Innermost group `m`.
    pub fn inner(&self) -> usize {
        *self.indices.last().unwrap()
    }

    /// Groups applied from the inside out: `m_1, …, m_n`.
    pub fn outer_from_inside(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices[..self.indices.len() - 1].iter().rev().copied()
    }
}

/// Canonical sum of Pauli words with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum<T: Real> {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex<T>>,
}

impl<T: Real> OperatorSum<T> {
    pub fn zero(n_qubits: usize) -> Self {
        OperatorSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<'a>(n_qubits: usize, terms: impl IntoIterator<Item = &'a LocalTerm<T>>) -> Result<Self> {
        let mut out = Self::zero(n_qubits);
        for t in terms {
            out.add_term(t)?;
        }
        out.prune();
        Ok(out)
    }

    fn add_term(&mut self, t: &LocalTerm<T>) -> Result<()> {
        if t.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: t.n_qubits(),
            });
        }
        *self.terms.entry(t.pauli).or_insert_with(czero) += t.coeff;
        Ok(())
    }

    fn prune(&mut self) {
        let tol = lit::<T>(DROP_TOL);
        self.terms.retain(|_, c| c.norm_sqr().sqrt() > tol);
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = LocalTerm<T>> + '_ {
        self.terms.iter().map(|(p, c)| LocalTerm::new(*p, *c))
    }

    pub fn coefficient(&self, pauli: &PauliString) -> Complex<T> {
        self.terms.get(pauli).copied().unwrap_or_else(czero)
    }

    /// Largest support over the terms.
    pub fn max_support(&self) -> usize {
        self.terms.keys().map(PauliString::weight).max().unwrap_or(0)
    }

    /// Largest coefficient magnitude over the terms.
    pub fn max_coeff(&self) -> T {
        self.terms
            .values()
            .map(|c| c.norm_sqr().sqrt())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// `Σ |c|`, an upper bound on the operator norm.
    pub fn l1_norm(&self) -> T {
        self.terms.values().fold(T::zero(), |a, c| a + c.norm_sqr().sqrt())
    }

    /// `self + w · other`, pruned.
    pub fn add_scaled(&mut self, other: &Self, w: T) -> Result<()> {
        let w = Complex::new(w, T::zero());
        for t in other.terms() {
            self.add_term(&LocalTerm::new(t.pauli, t.coeff * w))?;
        }
        self.prune();
        Ok(())
    }

    pub fn dense(&self, limit: usize) -> Result<CMatrix<T>> {
        let terms: Vec<LocalTerm<T>> = self.terms().collect();
        dense_matrix(self.n_qubits, &terms, limit)
    }
}

/// Size statistics of one symbolic expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionStats<T> {
    pub order: usize,
    /// Non-vanishing pairwise products generated at the last level, before
    /// words are fused.
    pub atoms: u128,
    /// Distinct words after fusion.
    pub terms: usize,
    pub max_support: usize,
    /// Largest fused coefficient magnitude.
    pub max_coeff: T,
    /// Largest magnitude of a single unfused product `2ⁿ ∏|c_i|`.
    pub max_atom_coeff: T,
}

/// Upper bounds on the expansion of an order-`n` nested commutator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountBounds<T> {
    /// `L (kd)ⁿ n!`, saturating.
    pub max_terms: u128,
    /// `(n + 1) k`.
    pub max_support: usize,
    /// `J^{n+1}`.
    pub max_strength: T,
}

pub fn count_bounds<T: Real>(n: usize, l: usize, k: usize, d: usize, j: T) -> CountBounds<T> {
    let kd = (k as u128).saturating_mul(d as u128);
    let mut terms = l as u128;
    for i in 1..=n {
        terms = terms.saturating_mul(kd).saturating_mul(i as u128);
    }
    CountBounds {
        max_terms: terms,
        max_support: (n + 1) * k,
        max_strength: j.powi(n as i32 + 1),
    }
}

impl<T: Real> CountBounds<T> {
    /// Whether an expansion respects the bounds. The strength envelope is
    /// checked on single products; fused words can collect several of them.
    pub fn admits(&self, stats: &ExpansionStats<T>) -> bool {
        let slack = T::one() + lit::<T>(1e-12);
        stats.atoms <= self.max_terms
            && (stats.terms as u128) <= self.max_terms
            && stats.max_support <= self.max_support
            && stats.max_atom_coeff <= self.max_strength * slack
    }
}

/// Expands `[H_{m_n}, …, [H_{m_1}, H_m]]` with the default depth cap.
pub fn expand_nested<T: Real>(h: &PartitionedHamiltonian<T>, spec: &NestedSpec) -> Result<OperatorSum<T>> {
    Ok(expand_nested_with_stats(h, spec, DEFAULT_MAX_NESTED)?.0)
}

/// Expands a nested commutator level by level, innermost first, fusing
/// words after each level.
pub fn expand_nested_with_stats<T: Real>(
    h: &PartitionedHamiltonian<T>,
    spec: &NestedSpec,
    max_order: usize,
) -> Result<(OperatorSum<T>, ExpansionStats<T>)> {
    if spec.order() > max_order {
        return Err(Error::OrderTooLarge {
            order: spec.order(),
            max: max_order,
        });
    }
    let n = h.n_qubits();
    // word -> (coefficient, largest single-product magnitude)
    let mut current: BTreeMap<PauliString, (Complex<T>, T)> = BTreeMap::new();
    for t in h.group(spec.inner())?.terms() {
        let e = current.entry(t.pauli).or_insert((czero(), T::zero()));
        e.0 += t.coeff;
        e.1 = e.1.max(t.coeff.norm_sqr().sqrt());
    }
    let mut atoms = current.len() as u128;
    for m in spec.outer_from_inside() {
        let group = h.group(m)?;
        let mut next: BTreeMap<PauliString, (Complex<T>, T)> = BTreeMap::new();
        atoms = 0;
        for (word, (c, amax)) in &current {
            let inner = LocalTerm::new(*word, *c);
            for t in group.terms() {
                if let Some(prod) = t.commutator(&inner)? {
                    atoms += 1;
                    let single = lit::<T>(2.0) * *amax * t.coeff.norm_sqr().sqrt();
                    let e = next.entry(prod.pauli).or_insert((czero(), T::zero()));
                    e.0 += prod.coeff;
                    e.1 = e.1.max(single);
                }
            }
        }
        let tol = lit::<T>(DROP_TOL);
        next.retain(|_, (c, _)| c.norm_sqr().sqrt() > tol);
        current = next;
    }
    let mut sum = OperatorSum::zero(n);
    let mut max_atom = T::zero();
    for (word, (c, amax)) in current {
        sum.terms.insert(word, c);
        max_atom = max_atom.max(amax);
    }
    sum.prune();
    let stats = ExpansionStats {
        order: spec.order(),
        atoms,
        terms: sum.len(),
        max_support: sum.max_support(),
        max_coeff: sum.max_coeff(),
        max_atom_coeff: max_atom,
    };
    Ok((sum, stats))
}

/// Dense iterated commutator, used as an independent reference.
pub fn dense_nested<T: Real>(h: &PartitionedHamiltonian<T>, spec: &NestedSpec) -> Result<CMatrix<T>> {
    let mut acc = h.group_dense(spec.inner())?;
    for m in spec.outer_from_inside() {
        let g = h.group_dense(m)?;
        acc = &g * &acc - &acc * &g;
    }
    Ok(acc)
}

/// Coefficients of `F(s) = H + Σ_n (−is)ⁿ Σ f̃ [H_{m_{ν_n}}, …, [H_{m_{ν_1}}, H_{m_ν}]]`.
///
/// Stage tuples `(ν_n, …, ν_1, ν)` satisfy `ν < ν_1 ≤ … ≤ ν_n` and carry
/// `f̃ = a_ν ∏_j a_j^{k_j} / k_j!`, with `k_j` the multiplicity of stage
/// `j`. Group tuples `(m_n, …, m_1, m)` collect `f`, the sum of `f̃` over
/// stage tuples mapping to them. Both are keyed outermost first.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable<T: Real> {
    up_to: usize,
    stage: BTreeMap<Vec<usize>, T>,
    group: BTreeMap<Vec<usize>, T>,
}

impl<T: Real> CoefficientTable<T> {
    pub fn up_to(&self) -> usize {
        self.up_to
    }

    /// `f̃` for a stage tuple; zero if the tuple violates the ordering.
    pub fn stage_coeff(&self, nus: &[usize]) -> T {
        self.stage.get(nus).copied().unwrap_or_else(T::zero)
    }

    /// Aggregated `f` for a group tuple.
    pub fn group_coeff(&self, ms: &[usize]) -> T {
        self.group.get(ms).copied().unwrap_or_else(T::zero)
    }

    pub fn stage_entries(&self, n: usize) -> impl Iterator<Item = (&[usize], T)> + '_ {
        self.stage
            .iter()
            .filter(move |(k, _)| k.len() == n + 1)
            .map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn group_entries(&self, n: usize) -> impl Iterator<Item = (&[usize], T)> + '_ {
        self.group
            .iter()
            .filter(move |(k, _)| k.len() == n + 1)
            .map(|(k, v)| (k.as_slice(), *v))
    }

    /// `Σ |f|` over group tuples of order `n`.
    pub fn abs_sum(&self, n: usize) -> T {
        self.group_entries(n).fold(T::zero(), |a, (_, f)| a + f.abs())
    }
}

pub fn expand_f_coefficients<T: Real>(f: &FormulaSchedule<T>, up_to: usize) -> Result<CoefficientTable<T>> {
    if up_to > MAX_COEFF_ORDER {
        return Err(Error::OrderTooLarge {
            order: up_to,
            max: MAX_COEFF_ORDER,
        });
    }
    let stages = f.stages();
    let q = stages.len();
    let mut table = CoefficientTable {
        up_to,
        stage: BTreeMap::new(),
        group: BTreeMap::new(),
    };
    for n in 1..=up_to {
        for nu in 0..q {
            let mut seq = Vec::with_capacity(n);
            visit_nondecreasing(nu + 1, q, n, &mut seq, &mut |seq| {
                let mut coeff = stages[nu].coeff;
                let mut i = 0;
                while i < seq.len() {
                    let mut k = 1;
                    while i + k < seq.len() && seq[i + k] == seq[i] {
                        k += 1;
                    }
                    let a = stages[seq[i]].coeff;
                    coeff *= a.powi(k as i32) / lit::<T>(factorial(k));
                    i += k;
                }
                let mut key: Vec<usize> = seq.iter().rev().copied().collect();
                key.push(nu);
                let groups: Vec<usize> = key.iter().map(|&j| stages[j].group).collect();
                *table.group.entry(groups).or_insert_with(T::zero) += coeff;
                table.stage.insert(key, coeff);
            });
        }
    }
    Ok(table)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Calls `visit` on every nondecreasing sequence of length `len` drawn
/// from `lo..hi`.
fn visit_nondecreasing(lo: usize, hi: usize, len: usize, seq: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if seq.len() == len {
        visit(seq);
        return;
    }
    let start = seq.last().copied().unwrap_or(lo);
    for j in start..hi {
        seq.push(j);
        visit_nondecreasing(lo, hi, len, seq, visit);
        seq.pop();
    }
}

/// `Σ f · [H_{m_n}, …, [H_{m_1}, H_m]]` over all order-`n` group tuples.
pub fn aggregated_commutator_sum<T: Real>(
    h: &PartitionedHamiltonian<T>,
    table: &CoefficientTable<T>,
    n: usize,
) -> Result<OperatorSum<T>> {
    let mut out = OperatorSum::zero(h.n_qubits());
    for (groups, coeff) in table.group_entries(n) {
        let nested = expand_nested(h, &NestedSpec::new(groups.to_vec())?)?;
        out.add_scaled(&nested, coeff)?;
    }
    Ok(out)
}

/// One term of the order-`p` bound sum.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTerm<T: Real> {
    pub spec: NestedSpec,
    pub coeff: T,
    pub nested: OperatorSum<T>,
}

/// Order-`p` group tuples with nonzero `f`, together with their expansions.
pub fn bound_terms<T: Real>(
    f: &FormulaSchedule<T>,
    h: &PartitionedHamiltonian<T>,
    p: usize,
) -> Result<Vec<BoundTerm<T>>> {
    f.validate(h.groups().len())?;
    let table = expand_f_coefficients(f, p)?;
    table
        .group_entries(p)
        .filter(|(_, c)| *c != T::zero())
        .map(|(groups, coeff)| {
            let spec = NestedSpec::new(groups.to_vec())?;
            let nested = expand_nested(h, &spec)?;
            Ok(BoundTerm { spec, coeff, nested })
        })
        .collect()
}

/// `Σ |f| ‖[H_{m_p}, …, [H_{m_1}, H_m]]‖`, the prefactor of the leading
/// single-step bound `s^{p+1}/(p+1) · Σ`.
pub fn commutator_bound_sum<T: Real>(
    f: &FormulaSchedule<T>,
    h: &PartitionedHamiltonian<T>,
    p: usize,
) -> Result<T> {
    let mut acc = T::zero();
    for bt in bound_terms(f, h, p)? {
        if !bt.nested.is_empty() {
            acc += bt.coeff.abs() * spectral_norm(&bt.nested.dense(h.dense_limit())?);
        }
    }
    Ok(acc)
}

/// As [`commutator_bound_sum`] with every norm restricted to eigenvalues
/// `≤ cutoff` of `cache`.
pub fn restricted_commutator_bound_sum<T: Real>(
    f: &FormulaSchedule<T>,
    h: &PartitionedHamiltonian<T>,
    p: usize,
    cache: &SpectralCache<T>,
    cutoff: T,
) -> Result<T> {
    let mut acc = T::zero();
    for bt in bound_terms(f, h, p)? {
        if !bt.nested.is_empty() {
            acc += bt.coeff.abs() * cache.restricted_norm(&bt.nested.dense(h.dense_limit())?, cutoff)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{DenseModel, Stage};
    use crate::pauli::{heisenberg_chain, tfim_chain, Boundary};
    use proptest::prelude::*;

    fn tfim4() -> PartitionedHamiltonian<f64> {
        tfim_chain(4, 1.0, 1.0, Boundary::Open).unwrap()
    }

    fn spec(v: &[usize]) -> NestedSpec {
        NestedSpec::new(v.to_vec()).unwrap()
    }

    fn max_abs(a: &CMatrix<f64>) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn all_specs(groups: usize, max_order: usize) -> Vec<NestedSpec> {
        let mut out = Vec::new();
        let mut frontier: Vec<Vec<usize>> = (0..groups).map(|m| vec![m]).collect();
        for _ in 0..=max_order {
            let mut next = Vec::new();
            for v in &frontier {
                out.push(spec(v));
                for m in 0..groups {
                    let mut w = vec![m];
                    w.extend(v);
                    next.push(w);
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn self_and_commuting_commutators_vanish() {
        let h = tfim4();
        assert!(expand_nested(&h, &spec(&[0, 0])).unwrap().is_empty());
        assert!(expand_nested(&h, &spec(&[1, 1])).unwrap().is_empty());
        let comm = PartitionedHamiltonian::new(
            2,
            vec![
                vec![LocalTerm::parse(2, "Z0 Z1", 1.0).unwrap()],
                vec![LocalTerm::parse(2, "Z0", 0.5).unwrap()],
            ],
        )
        .unwrap();
        assert!(expand_nested(&comm, &spec(&[1, 0])).unwrap().is_empty());
        assert!(expand_nested(&comm, &spec(&[0, 1, 0])).unwrap().is_empty());
    }

    #[test]
    fn order_cap() {
        let h = tfim4();
        assert!(matches!(
            expand_nested(&h, &spec(&[0, 1, 0, 1, 0, 1])),
            Err(Error::OrderTooLarge { order: 5, max: 4 })
        ));
        assert!(expand_nested_with_stats(&h, &spec(&[0, 1, 0, 1, 0, 1]), 5).is_ok());
    }

    #[test]
    fn tfim_first_order_matches_dense() {
        let h = tfim4();
        let s = spec(&[1, 0]);
        let sym = expand_nested(&h, &s).unwrap().dense(12).unwrap();
        let hx = h.group_dense(1).unwrap();
        let hzz = h.group_dense(0).unwrap();
        let direct = &hx * &hzz - &hzz * &hx;
        assert!(max_abs(&(sym - direct)) < 1e-10);
    }

    #[test]
    fn dense_equivalence_and_count_bounds_on_small_models() {
        let models = [
            tfim_chain(4, 1.0, 1.0, Boundary::Open).unwrap(),
            tfim_chain(5, 0.7, 1.3, Boundary::Periodic).unwrap(),
            heisenberg_chain(6, 1.0, Boundary::Open, false).unwrap(),
            heisenberg_chain(4, -0.8, Boundary::Periodic, true).unwrap(),
        ];
        for h in &models {
            let p = h.params();
            for s in all_specs(h.groups().len(), 3) {
                let (sum, stats) = expand_nested_with_stats(h, &s, 3).unwrap();
                let dense = dense_nested(h, &s).unwrap();
                let scale = 1.0 + max_abs(&dense);
                assert!(max_abs(&(sum.dense(12).unwrap() - &dense)) < 1e-10 * scale, "{s:?}");
                let b = count_bounds(s.order(), p.l, p.k, p.d, p.j);
                assert!(b.admits(&stats), "{s:?}: {stats:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn count_bounds_examples() {
        let b = count_bounds(0, 5, 2, 3, 1.5);
        assert_eq!((b.max_terms, b.max_support, b.max_strength), (5, 2, 1.5));
        let b = count_bounds(1, 5, 2, 3, 1.5);
        assert_eq!((b.max_terms, b.max_support, b.max_strength), (30, 4, 2.25));
        let b = count_bounds(3, 5, 2, 3, 2.0);
        assert_eq!((b.max_terms, b.max_support, b.max_strength), (5 * 6 * 12 * 18, 8, 16.0));
    }

    #[test]
    fn coefficient_closed_forms() {
        let lt = FormulaSchedule::<f64>::lie_trotter(2).unwrap();
        let t = expand_f_coefficients(&lt, 2).unwrap();
        assert_eq!(t.stage_coeff(&[1, 0]), 1.0);
        assert_eq!(t.group_coeff(&[1, 0]), 1.0);
        assert_eq!(t.stage_coeff(&[1, 1, 0]), 0.5);
        assert_eq!(t.stage_coeff(&[0, 1]), 0.0);

        let custom = FormulaSchedule::<f64>::new(
            "c",
            vec![Stage::new(0, 0.3), Stage::new(1, 0.6), Stage::new(0, 0.7), Stage::new(1, 0.4)],
            1,
        )
        .unwrap();
        let t: CoefficientTable<f64> = expand_f_coefficients(&custom, 3).unwrap();
        assert!((t.stage_coeff(&[2, 2, 0]) - 0.5 * 0.3 * 0.49).abs() < 1e-15);
        assert!((t.stage_coeff(&[3, 2, 1]) - 0.6 * 0.7 * 0.4).abs() < 1e-15);
        assert!((t.stage_coeff(&[3, 3, 3, 0]) - 0.3 * 0.064 / 6.0).abs() < 1e-15);
        assert!((t.stage_coeff(&[3, 2, 2, 1]) - 0.6 * 0.49 / 2.0 * 0.4).abs() < 1e-15);
        // group (1, 0): stage pairs (1,0), (3,0), (3,2)
        let expect = 0.3 * 0.6 + 0.3 * 0.4 + 0.7 * 0.4;
        assert!((t.group_coeff(&[1, 0]) - expect).abs() < 1e-15);

        assert!(matches!(expand_f_coefficients(&lt, 4), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn group_coefficients_aggregate_stage_coefficients() {
        let f = FormulaSchedule::<f64>::suzuki(4, 3).unwrap();
        let t = expand_f_coefficients(&f, 3).unwrap();
        for n in 1..=3 {
            let mut agg: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            for (nus, c) in t.stage_entries(n) {
                let g: Vec<usize> = nus.iter().map(|&j| f.stages()[j].group).collect();
                *agg.entry(g).or_default() += c;
            }
            for (g, c) in agg {
                assert!((t.group_coeff(&g) - c).abs() < 1e-14);
            }
        }
    }

    fn expanded_f_matches_dense(f: &FormulaSchedule<f64>, h: &PartitionedHamiltonian<f64>) {
        // F(s) − H − Σ_{n≤3} (−is)ⁿ Σ f [...] = O(s⁴)
        let model = DenseModel::new(h).unwrap();
        let table = expand_f_coefficients(f, 3).unwrap();
        let sums: Vec<CMatrix<f64>> = (1..=3)
            .map(|n| aggregated_commutator_sum(h, &table, n).unwrap().dense(12).unwrap())
            .collect();
        let resid = |s: f64| {
            let mut approx = model.hamiltonian().clone();
            for (i, m) in sums.iter().enumerate() {
                approx += m * Complex::new(0.0, -s).powu(i as u32 + 1);
            }
            spectral_norm(&(model.f_operator(f, s).unwrap() - approx))
        };
        let (r1, r2) = (resid(2e-2), resid(1e-2));
        let ratio = r1 / r2;
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn series_agrees_with_dense_generator() {
        let h = tfim4();
        expanded_f_matches_dense(&FormulaSchedule::lie_trotter(2).unwrap(), &h);
        expanded_f_matches_dense(&FormulaSchedule::strang(2).unwrap(), &h);
        let heis = heisenberg_chain(4, 1.0, Boundary::Open, false).unwrap();
        let custom = FormulaSchedule::<f64>::new(
            "c",
            vec![Stage::new(0, 0.3), Stage::new(1, 0.6), Stage::new(0, 0.7), Stage::new(1, 0.4)],
            1,
        )
        .unwrap();
        expanded_f_matches_dense(&custom, &heis);
    }

    #[test]
    fn lower_orders_vanish_for_declared_order() {
        let h = tfim4();
        let heis = heisenberg_chain(6, 1.0, Boundary::Open, false).unwrap();
        for (f, h) in [
            (FormulaSchedule::strang(2).unwrap(), &h),
            (FormulaSchedule::strang(2).unwrap(), &heis),
            (FormulaSchedule::suzuki(4, 2).unwrap(), &h),
        ] {
            let table = expand_f_coefficients(&f, 3).unwrap();
            for n in 1..f.order().min(4) {
                let sum = aggregated_commutator_sum(h, &table, n).unwrap();
                assert!(max_abs(&sum.dense(12).unwrap()) < 1e-10, "{} order {n}", f.name());
            }
        }
        let table = expand_f_coefficients(&FormulaSchedule::lie_trotter(2).unwrap(), 1).unwrap();
        assert!(!aggregated_commutator_sum(&h, &table, 1).unwrap().is_empty());
    }

    #[test]
    fn bound_sum_examples() {
        let comm = PartitionedHamiltonian::new(
            2,
            vec![
                vec![LocalTerm::parse(2, "Z0 Z1", 1.0).unwrap()],
                vec![LocalTerm::parse(2, "Z0", 0.5).unwrap()],
            ],
        )
        .unwrap();
        assert_eq!(commutator_bound_sum(&FormulaSchedule::lie_trotter(2).unwrap(), &comm, 1).unwrap(), 0.0);
        let single = heisenberg_chain(2, 1.0, Boundary::Open, false).unwrap();
        assert_eq!(commutator_bound_sum(&FormulaSchedule::lie_trotter(1).unwrap(), &single, 1).unwrap(), 0.0);
        assert!(matches!(
            commutator_bound_sum(&FormulaSchedule::suzuki(4, 2).unwrap(), &tfim4(), 4),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn lie_trotter_leading_bound_dominates_measurement() {
        let h = tfim4();
        let model = DenseModel::new(&h).unwrap();
        let f = FormulaSchedule::lie_trotter(2).unwrap();
        let sum = commutator_bound_sum(&f, &h, 1).unwrap();
        for s in [1e-3, 3e-3, 1e-2] {
            let measured = model.step_error(&f, s).unwrap();
            let lead = s * s / 2.0 * sum;
            assert!(1.1 * lead >= measured, "s {s}: {lead} vs {measured}");
            assert!(measured >= 0.9 * lead, "leading term should be tight: {lead} vs {measured}");
        }
    }

    #[test]
    fn restricted_sum_examples() {
        let h = heisenberg_chain::<f64>(6, 1.0, Boundary::Open, false).unwrap();
        let model = DenseModel::new(&h).unwrap();
        let cache = model.spectrum();
        let f = FormulaSchedule::strang(2).unwrap();
        let full = commutator_bound_sum(&f, &h, 2).unwrap();
        let top = restricted_commutator_bound_sum(&f, &h, 2, cache, cache.max_energy()).unwrap();
        assert!((top - full).abs() < 1e-9 * full);
        let below = restricted_commutator_bound_sum(&f, &h, 2, cache, cache.min_energy() - 1.0).unwrap();
        assert_eq!(below, 0.0);
        let cut = cache.percentile_energy(30.0).unwrap();
        let mid = restricted_commutator_bound_sum(&f, &h, 2, cache, cut).unwrap();
        assert!(mid < full, "{mid} vs {full}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn restricted_sum_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let h = tfim4();
            let model = DenseModel::new(&h).unwrap();
            let cache = model.spectrum();
            let f = FormulaSchedule::lie_trotter(2).unwrap();
            let (lo, hi): (f64, f64) = if a <= b { (a, b) } else { (b, a) };
            let span = cache.max_energy() - cache.min_energy();
            let at = |t: f64| restricted_commutator_bound_sum(&f, &h, 1, cache, cache.min_energy() + t * span).unwrap();
            prop_assert!(at(lo) <= at(hi) + 1e-12);
        }
    }
}
