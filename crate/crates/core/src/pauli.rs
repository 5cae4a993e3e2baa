//! Pauli-string algebra and partitioned k-local Hamiltonians.
//!
//! A Pauli string on `n ≤ 64` qubits is stored as an `(x, z)` bit-mask pair:
//! qubit `q` carries `X` when only bit `q` of `x` is set, `Z` when only bit
//! `q` of `z` is set, and `Y` when both are. Basis state `|b⟩` uses bit `q` of
//! `b` for qubit `q`.

use std::fmt;

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{lit, to_f64, CMatrix, Error, Real, Result};

/// Default maximum qubit count for dense matrices (4096-dimensional).
pub const DEFAULT_DENSE_LIMIT: usize = 12;

const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X,
    Y,
    Z,
}

impl Letter {
    fn masks(self) -> (bool, bool) {
        match self {
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }
}

/// Power of `i`: the phase `i^k` for `k ∈ {0, 1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex<T: Real>(self) -> Complex<T> {
        match self.0 {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Tensor product of single-qubit Paulis, without phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(n_qubits));
        }
        Ok(PauliString { n_qubits, x: 0, z: 0 })
    }

    pub fn from_letters(n_qubits: usize, letters: &[(usize, Letter)]) -> Result<Self> {
        let mut p = Self::identity(n_qubits)?;
        for &(q, letter) in letters {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            let bit = 1u64 << q;
            if (p.x | p.z) & bit != 0 {
                return Err(Error::InvalidPauli(format!("qubit {q} appears twice")));
            }
            let (xb, zb) = letter.masks();
            if xb {
                p.x |= bit;
            }
            if zb {
                p.z |= bit;
            }
        }
        Ok(p)
    }

    pub fn single(n_qubits: usize, qubit: usize, letter: Letter) -> Result<Self> {
        Self::from_letters(n_qubits, &[(qubit, letter)])
    }

    /// Parses a whitespace-separated token list such as `"X0 Y3 Z4"`.
    /// An empty string or a lone `"I"` is the identity.
    pub fn parse(n_qubits: usize, text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let mut chars = token.chars();
            let head = chars.next().unwrap_or(' ');
            let rest = chars.as_str();
            let letter = match head {
                'X' | 'x' => Letter::X,
                'Y' | 'y' => Letter::Y,
                'Z' | 'z' => Letter::Z,
                'I' | 'i' => continue,
                _ => return Err(Error::InvalidPauli(token.to_string())),
            };
            let q: usize = rest
                .parse()
                .map_err(|_| Error::InvalidPauli(token.to_string()))?;
            letters.push((q, letter));
        }
        Self::from_letters(n_qubits, &letters)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support_mask() == 0
    }

    pub fn letter(&self, qubit: usize) -> Option<Letter> {
        let bit = 1u64 << qubit;
        match (self.x & bit != 0, self.z & bit != 0) {
            (true, false) => Some(Letter::X),
            (true, true) => Some(Letter::Y),
            (false, true) => Some(Letter::Z),
            (false, false) => None,
        }
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_qubits).filter(|&q| self.support_mask() >> q & 1 == 1)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Strings commute iff their symplectic product is even.
    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones().is_multiple_of(2)
    }

    /// `self · other = phase · result`.
    pub fn product(&self, other: &Self) -> Result<(Phase, PauliString)> {
        self.check_same(other)?;
        let (ax, ay, az) = (self.x & !self.z, self.x & self.z, !self.x & self.z);
        let (bx, by, bz) = (other.x & !other.z, other.x & other.z, !other.x & other.z);
        // cyclic XY = iZ, YZ = iX, ZX = iY; anticyclic pairs pick up -i
        let plus = (ax & by) | (ay & bz) | (az & bx);
        let minus = (ay & bx) | (az & by) | (ax & bz);
        let k = plus.count_ones() as i64 - minus.count_ones() as i64;
        Ok((
            Phase::from_power(k),
            PauliString {
                n_qubits: self.n_qubits,
                x: self.x ^ other.x,
                z: self.z ^ other.z,
            },
        ))
    }

    /// `P|b⟩ = i^{|x∧z|} (−1)^{|z∧b|} |b ⊕ x⟩`: returns the target index and phase.
    #[inline]
    pub(crate) fn act(&self, b: usize) -> (usize, Phase) {
        let b64 = b as u64;
        let k = (self.x & self.z).count_ones() as i64 + 2 * (self.z & b64).count_ones() as i64;
        ((b64 ^ self.x) as usize, Phase::from_power(k))
    }

    pub fn dense<T: Real>(&self, limit: usize) -> Result<CMatrix<T>> {
        let dim = dense_dim(self.n_qubits, limit)?;
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (row, ph) = self.act(b);
            m[(row, b)] = ph.to_complex();
        }
        Ok(m)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for q in self.support() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let c = match self.letter(q) {
                Some(Letter::X) => 'X',
                Some(Letter::Y) => 'Y',
                Some(Letter::Z) => 'Z',
                None => unreachable!(),
            };
            write!(f, "{c}{q}")?;
        }
        Ok(())
    }
}

pub(crate) fn dense_dim(n_qubits: usize, limit: usize) -> Result<usize> {
    if n_qubits > limit {
        return Err(Error::DimensionTooLarge { n_qubits, limit });
    }
    Ok(1usize << n_qubits)
}

/// One Pauli word with a (possibly complex) coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTerm<T: Real> {
    pub pauli: PauliString,
    pub coeff: Complex<T>,
}

impl<T: Real> LocalTerm<T> {
    pub fn new(pauli: PauliString, coeff: Complex<T>) -> Self {
        LocalTerm { pauli, coeff }
    }

    pub fn real(pauli: PauliString, coeff: T) -> Self {
        LocalTerm {
            pauli,
            coeff: Complex::new(coeff, T::zero()),
        }
    }

    pub fn parse(n_qubits: usize, pauli: &str, coeff: T) -> Result<Self> {
        Ok(Self::real(PauliString::parse(n_qubits, pauli)?, coeff))
    }

    pub fn n_qubits(&self) -> usize {
        self.pauli.n_qubits()
    }

    pub fn is_real(&self) -> bool {
        self.coeff.im == T::zero()
    }

    /// `[self, other]`, or `None` when the words commute.
    pub fn commutator(&self, other: &Self) -> Result<Option<Self>> {
        self.pauli.check_same(&other.pauli)?;
        if self.pauli.commutes_with(&other.pauli) {
            return Ok(None);
        }
        let (phase, word) = self.pauli.product(&other.pauli)?;
        let two = Complex::new(lit::<T>(2.0), T::zero());
        Ok(Some(LocalTerm {
            pauli: word,
            coeff: two * self.coeff * other.coeff * phase.to_complex(),
        }))
    }

    /// Spectral spread `λmax − λmin` of the term, i.e. `2·min_c ‖h + c‖`.
    pub fn strength_j(&self) -> Result<T> {
        if !self.is_real() {
            return Err(Error::ComplexCoefficient(to_f64(self.coeff.im)));
        }
        if self.pauli.is_identity() {
            return Ok(T::zero());
        }
        Ok(lit::<T>(2.0) * self.coeff.re.abs())
    }

    pub fn dense(&self, limit: usize) -> Result<CMatrix<T>> {
        dense_matrix(self.n_qubits(), std::slice::from_ref(self), limit)
    }
}

/// Dense matrix of `Σ terms` on `n_qubits` qubits.
pub fn dense_matrix<'a, T: Real>(
    n_qubits: usize,
    terms: impl IntoIterator<Item = &'a LocalTerm<T>>,
    limit: usize,
) -> Result<CMatrix<T>> {
    let dim = dense_dim(n_qubits, limit)?;
    let mut m = DMatrix::zeros(dim, dim);
    for t in terms {
        if t.n_qubits() != n_qubits {
            return Err(Error::QubitMismatch {
                left: n_qubits,
                right: t.n_qubits(),
            });
        }
        for b in 0..dim {
            let (row, ph) = t.pauli.act(b);
            m[(row, b)] += t.coeff * ph.to_complex();
        }
    }
    Ok(m)
}

/// Spread `λmax − λmin` of a sum of real-coefficient Pauli terms, computed
/// by diagonalizing the sum on its own support. This is `2·min_c ‖h + c‖`
/// for a local interaction `h` written in several Pauli words.
pub fn interaction_spread<T: Real>(terms: &[LocalTerm<T>]) -> Result<T> {
    let Some(first) = terms.first() else {
        return Ok(T::zero());
    };
    let n = first.n_qubits();
    let mut support = 0u64;
    for t in terms {
        if !t.is_real() {
            return Err(Error::ComplexCoefficient(to_f64(t.coeff.im)));
        }
        if t.n_qubits() != n {
            return Err(Error::QubitMismatch {
                left: n,
                right: t.n_qubits(),
            });
        }
        support |= t.pauli.support_mask();
    }
    let qubits: Vec<usize> = (0..n).filter(|&q| support >> q & 1 == 1).collect();
    let width = qubits.len().max(1);
    let compressed: Vec<LocalTerm<T>> = terms
        .iter()
        .map(|t| {
            let letters: Vec<(usize, Letter)> = qubits
                .iter()
                .enumerate()
                .filter_map(|(i, &q)| t.pauli.letter(q).map(|l| (i, l)))
                .collect();
            PauliString::from_letters(width, &letters).map(|p| LocalTerm::new(p, t.coeff))
        })
        .collect::<Result<_>>()?;
    let m = dense_matrix(width, &compressed, MAX_QUBITS)?;
    let eig = SymmetricEigen::new(m);
    let (mut lo, mut hi) = (eig.eigenvalues[0], eig.eigenvalues[0]);
    for &e in eig.eigenvalues.iter() {
        lo = lo.min(e);
        hi = hi.max(e);
    }
    Ok(hi - lo)
}

/// Mutually commuting Pauli terms forming one fast-forwardable group.
#[derive(Debug, Clone, PartialEq)]
pub struct TermGroup<T: Real> {
    terms: Vec<LocalTerm<T>>,
}

impl<T: Real> TermGroup<T> {
    /// Fuses terms that share a Pauli word (first occurrence keeps its place)
    /// and drops words whose fused coefficient is exactly zero.
    pub fn new(terms: Vec<LocalTerm<T>>) -> Self {
        let mut fused: Vec<LocalTerm<T>> = Vec::with_capacity(terms.len());
        for t in terms {
            match fused.iter_mut().find(|f| f.pauli == t.pauli) {
                Some(f) => f.coeff += t.coeff,
                None => fused.push(t),
            }
        }
        fused.retain(|t| t.coeff != Complex::new(T::zero(), T::zero()));
        TermGroup { terms: fused }
    }

    pub fn terms(&self) -> &[LocalTerm<T>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dense(&self, n_qubits: usize, limit: usize) -> Result<CMatrix<T>> {
        dense_matrix(n_qubits, &self.terms, limit)
    }

    /// First pair of terms that fails to commute.
    pub fn first_noncommuting_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                if !self.terms[i].pauli.commutes_with(&self.terms[j].pauli) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Structural parameters consumed by the bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSummary<T: Real> {
    /// Qubit count `N`.
    pub n_qubits: usize,
    /// Number of groups `M`.
    pub groups: usize,
    /// Maximum support size of any term.
    pub k: usize,
    /// Maximum, over qubits, of the number of terms touching the qubit.
    pub d: usize,
    /// Largest group size.
    pub l: usize,
    /// Per-group term counts `L_m`.
    pub group_sizes: Vec<usize>,
    /// Largest single-term spread.
    pub j: T,
    /// Whether every group matrix is positive semidefinite; `None` when the
    /// model exceeds the dense limit.
    pub psd: Option<bool>,
}

/// Checks the partition (non-empty, internally commuting, real coefficients)
/// and derives `(N, M, k, d, L, J)` plus the PSD flag.
pub fn validate_partition<T: Real>(
    n_qubits: usize,
    groups: &[TermGroup<T>],
    dense_limit: usize,
) -> Result<ParamSummary<T>> {
    if groups.is_empty() {
        return Err(Error::NoGroups);
    }
    let mut per_qubit = vec![0usize; n_qubits];
    let mut k = 0;
    let mut j = T::zero();
    for (m, g) in groups.iter().enumerate() {
        if g.is_empty() {
            return Err(Error::EmptyGroup(m));
        }
        for t in g.terms() {
            if t.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch {
                    left: n_qubits,
                    right: t.n_qubits(),
                });
            }
            j = j.max(t.strength_j()?);
            k = k.max(t.pauli.weight());
            for q in t.pauli.support() {
                per_qubit[q] += 1;
            }
        }
        if let Some((first, second)) = g.first_noncommuting_pair() {
            return Err(Error::NonCommutingGroup {
                group: m,
                first,
                second,
            });
        }
    }
    let psd = if n_qubits <= dense_limit {
        let mut all = true;
        for g in groups {
            let m = g.dense(n_qubits, dense_limit)?;
            let scale = m.iter().map(|c| c.norm_sqr().sqrt()).fold(T::one(), |a, b| a.max(b));
            let eig = SymmetricEigen::new(m);
            let min = eig.eigenvalues.iter().fold(T::max_value().unwrap(), |a, &b| a.min(b));
            if min < -lit::<T>(1e-10) * scale {
                all = false;
            }
        }
        Some(all)
    } else {
        None
    };
    let group_sizes: Vec<usize> = groups.iter().map(TermGroup::len).collect();
    Ok(ParamSummary {
        n_qubits,
        groups: groups.len(),
        k,
        d: per_qubit.into_iter().max().unwrap_or(0),
        l: group_sizes.iter().copied().max().unwrap_or(0),
        group_sizes,
        j,
        psd,
    })
}

/// `H = Σ_m H_m` with validated groups and cached parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedHamiltonian<T: Real> {
    n_qubits: usize,
    groups: Vec<TermGroup<T>>,
    params: ParamSummary<T>,
    dense_limit: usize,
}

impl<T: Real> PartitionedHamiltonian<T> {
    pub fn new(n_qubits: usize, groups: Vec<Vec<LocalTerm<T>>>) -> Result<Self> {
        Self::with_dense_limit(n_qubits, groups, DEFAULT_DENSE_LIMIT)
    }

    pub fn with_dense_limit(
        n_qubits: usize,
        groups: Vec<Vec<LocalTerm<T>>>,
        dense_limit: usize,
    ) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(n_qubits));
        }
        for t in groups.iter().flatten() {
            if !t.is_real() {
                return Err(Error::ComplexCoefficient(to_f64(t.coeff.im)));
            }
        }
        let groups: Vec<TermGroup<T>> = groups.into_iter().map(TermGroup::new).collect();
        let params = validate_partition(n_qubits, &groups, dense_limit)?;
        Ok(PartitionedHamiltonian {
            n_qubits,
            groups,
            params,
            dense_limit,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn groups(&self) -> &[TermGroup<T>] {
        &self.groups
    }

    pub fn group(&self, m: usize) -> Result<&TermGroup<T>> {
        self.groups.get(m).ok_or(Error::GroupOutOfRange {
            index: m,
            groups: self.groups.len(),
        })
    }

    pub fn params(&self) -> &ParamSummary<T> {
        &self.params
    }

    pub fn dense_limit(&self) -> usize {
        self.dense_limit
    }

    pub fn is_psd(&self) -> bool {
        self.params.psd == Some(true)
    }

    pub fn terms(&self) -> impl Iterator<Item = &LocalTerm<T>> {
        self.groups.iter().flat_map(|g| g.terms().iter())
    }

    pub fn dense(&self) -> Result<CMatrix<T>> {
        dense_matrix(self.n_qubits, self.terms(), self.dense_limit)
    }

    pub fn group_dense(&self, m: usize) -> Result<CMatrix<T>> {
        self.group(m)?.dense(self.n_qubits, self.dense_limit)
    }

    pub fn to_model_file(&self) -> ModelFile {
        ModelFile {
            n_qubits: self.n_qubits,
            groups: self
                .groups
                .iter()
                .map(|g| {
                    g.terms()
                        .iter()
                        .map(|t| TermSpec {
                            pauli: t.pauli.to_string(),
                            coeff: to_f64(t.coeff.re),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

fn bonds(n: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic {
        out.push((n - 1, 0));
    }
    out
}

/// `H = J_zz Σ Z_i Z_{i+1} + h_x Σ X_i`, grouped as {ZZ bonds}, {X fields}.
pub fn tfim_chain<T: Real>(
    n: usize,
    j_zz: T,
    h_x: T,
    boundary: Boundary,
) -> Result<PartitionedHamiltonian<T>> {
    if n < 2 || (boundary == Boundary::Periodic && n < 3) {
        return Err(Error::InvalidParameter(format!(
            "TFIM chain needs at least {} sites",
            if boundary == Boundary::Periodic { 3 } else { 2 }
        )));
    }
    let zz = bonds(n, boundary)
        .into_iter()
        .map(|(a, b)| {
            PauliString::from_letters(n, &[(a, Letter::Z), (b, Letter::Z)])
                .map(|p| LocalTerm::real(p, j_zz))
        })
        .collect::<Result<Vec<_>>>()?;
    let x = (0..n)
        .map(|q| PauliString::single(n, q, Letter::X).map(|p| LocalTerm::real(p, h_x)))
        .collect::<Result<Vec<_>>>()?;
    PartitionedHamiltonian::new(n, vec![zz, x])
}

/// `H = J Σ (XX + YY + ZZ)` on nearest-neighbour bonds, grouped into even
/// bonds `(2i, 2i+1)` and odd bonds `(2i+1, 2i+2)`.
///
/// With `psd_shift` every bond receives the identity offset that makes its
/// smallest eigenvalue zero (`3J` for `J > 0`, `|J|` for `J < 0`), so both
/// groups are positive semidefinite.
pub fn heisenberg_chain<T: Real>(
    n: usize,
    j: T,
    boundary: Boundary,
    psd_shift: bool,
) -> Result<PartitionedHamiltonian<T>> {
    if n < 2 || (boundary == Boundary::Periodic && (n < 4 || n % 2 == 1)) {
        return Err(Error::InvalidParameter(
            "Heisenberg chain needs n >= 2 (open) or even n >= 4 (periodic)".into(),
        ));
    }
    let shift = if j > T::zero() { lit::<T>(3.0) * j } else { -j };
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for (a, b) in bonds(n, boundary) {
        let target = if a % 2 == 0 { &mut even } else { &mut odd };
        for l in [Letter::X, Letter::Y, Letter::Z] {
            target.push(LocalTerm::real(
                PauliString::from_letters(n, &[(a, l), (b, l)])?,
                j,
            ));
        }
        if psd_shift {
            target.push(LocalTerm::real(PauliString::identity(n)?, shift));
        }
    }
    let mut groups = vec![even];
    if !odd.is_empty() {
        groups.push(odd);
    }
    PartitionedHamiltonian::new(n, groups)
}

/// One term of a model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub pauli: String,
    pub coeff: f64,
}

/// Model description: `n_qubits` plus a list of groups of terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n_qubits: usize,
    pub groups: Vec<Vec<TermSpec>>,
}

impl ModelFile {
    pub fn build<T: Real>(&self, dense_limit: usize) -> Result<PartitionedHamiltonian<T>> {
        let groups = self
            .groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|t| LocalTerm::parse(self.n_qubits, &t.pauli, lit::<T>(t.coeff)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PartitionedHamiltonian::with_dense_limit(self.n_qubits, groups, dense_limit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn close(a: &CMatrix<f64>, b: &CMatrix<f64>, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    fn all_strings(n: usize) -> Vec<PauliString> {
        (0..4usize.pow(n as u32))
            .map(|code| {
                let letters: Vec<(usize, Letter)> = (0..n)
                    .filter_map(|q| match (code >> (2 * q)) & 3 {
                        1 => Some((q, Letter::X)),
                        2 => Some((q, Letter::Y)),
                        3 => Some((q, Letter::Z)),
                        _ => None,
                    })
                    .collect();
                PauliString::from_letters(n, &letters).unwrap()
            })
            .collect()
    }

    #[test]
    fn product_examples() {
        let x0 = PauliString::parse(1, "X0").unwrap();
        let z0 = PauliString::parse(1, "Z0").unwrap();
        let (ph, r) = x0.product(&x0).unwrap();
        assert_eq!(ph, Phase::ONE);
        assert!(r.is_identity());

        let (ph, r) = z0.product(&x0).unwrap();
        assert_eq!(ph, Phase::I);
        assert_eq!(r, PauliString::parse(1, "Y0").unwrap());

        let a = PauliString::parse(2, "X0").unwrap();
        let b = PauliString::parse(2, "Z1").unwrap();
        let (p1, r1) = a.product(&b).unwrap();
        let (p2, r2) = b.product(&a).unwrap();
        assert_eq!((p1, r1), (Phase::ONE, r2));
        assert_eq!(p2, Phase::ONE);
    }

    #[test]
    fn product_rejects_mismatched_widths() {
        let a = PauliString::parse(1, "X0").unwrap();
        let b = PauliString::parse(2, "X0").unwrap();
        assert!(matches!(a.product(&b), Err(Error::QubitMismatch { .. })));
        let ta = LocalTerm::real(a, 1.0);
        let tb = LocalTerm::real(b, 1.0);
        assert!(ta.commutator(&tb).is_err());
    }

    #[test]
    fn product_matches_dense_for_all_two_qubit_pairs() {
        let strings = all_strings(2);
        for a in &strings {
            let ma = a.dense::<f64>(12).unwrap();
            for b in &strings {
                let mb = b.dense::<f64>(12).unwrap();
                let (ph, r) = a.product(b).unwrap();
                let lhs = r.dense::<f64>(12).unwrap() * ph.to_complex::<f64>();
                assert!(close(&lhs, &(&ma * &mb), 1e-12), "{a} * {b}");
            }
        }
    }

    #[test]
    fn commutator_matches_dense_for_all_two_qubit_pairs() {
        let strings = all_strings(2);
        for a in &strings {
            for b in &strings {
                let ta = LocalTerm::new(*a, c(0.7, -0.2));
                let tb = LocalTerm::new(*b, c(-1.3, 0.4));
                let (ma, mb) = (ta.dense(12).unwrap(), tb.dense(12).unwrap());
                let dense = &ma * &mb - &mb * &ma;
                let sym = match ta.commutator(&tb).unwrap() {
                    Some(t) => t.dense(12).unwrap(),
                    None => CMatrix::zeros(4, 4),
                };
                assert!(close(&sym, &dense, 1e-12), "[{a}, {b}]");
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let z = LocalTerm::parse(1, "Z0", 1.0).unwrap();
        let x = LocalTerm::parse(1, "X0", 1.0).unwrap();
        let r = z.commutator(&x).unwrap().unwrap();
        assert_eq!(r.pauli, PauliString::parse(1, "Y0").unwrap());
        assert_eq!(r.coeff, c(0.0, 2.0));

        let xx = LocalTerm::parse(3, "X0 X1", 1.0).unwrap();
        let z2 = LocalTerm::parse(3, "Z2", 1.0).unwrap();
        assert!(xx.commutator(&z2).unwrap().is_none());
    }

    #[test]
    fn commutator_xx_with_z0_against_brute_force() {
        let xx = LocalTerm::parse(3, "X0 X1", 1.0).unwrap();
        let z0 = LocalTerm::parse(3, "Z0", 1.0).unwrap();
        let r = xx.commutator(&z0).unwrap().unwrap();
        assert_eq!(r.pauli, PauliString::parse(3, "Y0 X1").unwrap());
        assert_eq!(r.coeff, c(0.0, -2.0));
        let (a, b) = (xx.dense(12).unwrap(), z0.dense(12).unwrap());
        assert!(close(&r.dense(12).unwrap(), &(&a * &b - &b * &a), 1e-12));
    }

    #[test]
    fn strength_examples() {
        let t = LocalTerm::parse(2, "X0 Z1", -0.35).unwrap();
        assert_eq!(t.strength_j().unwrap(), 0.7);
        let zero = LocalTerm::parse(2, "X0", 0.0).unwrap();
        assert_eq!(zero.strength_j().unwrap(), 0.0);
        let complex = LocalTerm::new(PauliString::parse(1, "X0").unwrap(), c(1.0, 1.0));
        assert!(matches!(complex.strength_j(), Err(Error::ComplexCoefficient(_))));

        // 0.5 (I + Z): eigenvalues {0, 1}
        let proj = [
            LocalTerm::<f64>::parse(1, "I", 0.5).unwrap(),
            LocalTerm::parse(1, "Z0", 0.5).unwrap(),
        ];
        assert!((interaction_spread::<f64>(&proj).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strength_equals_twice_min_shift_norm_by_grid_scan() {
        let terms = [
            LocalTerm::parse(3, "X0 Z2", 0.8).unwrap(),
            LocalTerm::parse(3, "Z0 Z2", -0.3).unwrap(),
            LocalTerm::parse(3, "I", 0.25).unwrap(),
        ];
        for t in &terms {
            let m = t.dense(12).unwrap();
            let min = (-2000..=2000)
                .map(|i| {
                    let shift = i as f64 * 1e-3;
                    let shifted = &m + CMatrix::<f64>::identity(8, 8) * c(shift, 0.0);
                    shifted.singular_values().max()
                })
                .fold(f64::INFINITY, f64::min);
            assert!((t.strength_j().unwrap() - 2.0 * min).abs() < 1e-9);
        }
    }

    #[test]
    fn dense_examples() {
        let id = LocalTerm::parse(1, "I", 1.0).unwrap().dense(12).unwrap();
        assert_eq!(id, CMatrix::<f64>::identity(2, 2));
        let z = LocalTerm::parse(1, "Z0", 1.0).unwrap().dense(12).unwrap();
        assert_eq!(z, CMatrix::from_diagonal(&nalgebra::dvector![c(1.0, 0.0), c(-1.0, 0.0)]));
        let big = tfim_chain::<f64>(14, 1.0, 1.0, Boundary::Open).unwrap();
        assert!(matches!(big.dense(), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn tfim_two_site_spectrum_against_quartic_oracle() {
        // H = Z0Z1 + X0 + X1. In the symmetric sector {|00>, |11>, (|01>+|10>)/√2}
        // H = [[1,0,√2],[0,1,√2],[√2,√2,-1]] and the antisymmetric state has E = -1.
        // Characteristic polynomial of the full 4x4: (E-1)(E+1)(E²-5).
        let h = tfim_chain::<f64>(2, 1.0, 1.0, Boundary::Open).unwrap();
        let m = h.dense().unwrap();
        let poly = |e: f64| (e - 1.0) * (e + 1.0) * (e * e - 5.0);
        let roots = [-(5f64.sqrt()), -1.0, 1.0, 5f64.sqrt()];
        for r in roots {
            assert!(poly(r).abs() < 1e-12);
        }
        let mut eig: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        for (a, b) in eig.iter().zip(roots) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tfim_parameters() {
        let h = tfim_chain::<f64>(4, 1.0, 1.0, Boundary::Open).unwrap();
        let p = h.params();
        assert_eq!((p.n_qubits, p.groups, p.k, p.d, p.l), (4, 2, 2, 3, 4));
        assert_eq!(p.group_sizes, vec![3, 4]);
        assert_eq!(p.j, 2.0);
        assert_eq!(p.psd, Some(false));
    }

    #[test]
    fn heisenberg_parameters_from_counting_rule() {
        let h = heisenberg_chain::<f64>(6, 1.0, Boundary::Open, false).unwrap();
        let p = h.params();
        // bonds (0,1),(2,3),(4,5) even and (1,2),(3,4) odd, three words each;
        // a bulk qubit sits on two bonds, so six words touch it
        assert_eq!(p.k, 2);
        assert_eq!(p.d, 6);
        assert_eq!(p.group_sizes, vec![9, 6]);
        assert_eq!(p.l, 9);
        assert_eq!(p.j, 2.0);
        assert_eq!(p.psd, Some(false));

        let shifted = heisenberg_chain::<f64>(6, 1.0, Boundary::Open, true).unwrap();
        assert_eq!(shifted.params().psd, Some(true));
        // fused identity offset adds one word per group
        assert_eq!(shifted.params().group_sizes, vec![10, 7]);
        assert_eq!(shifted.params().d, 6);

        let ferro = heisenberg_chain::<f64>(6, -1.0, Boundary::Periodic, true).unwrap();
        assert_eq!(ferro.params().psd, Some(true));
    }

    #[test]
    fn noncommuting_group_is_rejected() {
        let g = vec![
            LocalTerm::parse(1, "X0", 1.0).unwrap(),
            LocalTerm::parse(1, "Z0", 1.0).unwrap(),
        ];
        let err = PartitionedHamiltonian::new(1, vec![g]).unwrap_err();
        assert_eq!(
            err,
            Error::NonCommutingGroup {
                group: 0,
                first: 0,
                second: 1
            }
        );
        let err = PartitionedHamiltonian::<f64>::new(1, vec![vec![]]).unwrap_err();
        assert_eq!(err, Error::EmptyGroup(0));
    }

    #[test]
    fn complex_coefficients_rejected_in_hamiltonians() {
        let t = LocalTerm::new(PauliString::parse(1, "X0").unwrap(), c(1.0, 0.5));
        assert!(matches!(
            PartitionedHamiltonian::new(1, vec![vec![t]]),
            Err(Error::ComplexCoefficient(_))
        ));
    }

    #[test]
    fn duplicate_words_are_fused() {
        let g = TermGroup::new(vec![
            LocalTerm::parse(2, "Z0 Z1", 1.0).unwrap(),
            LocalTerm::parse(2, "Z1", 1.0).unwrap(),
            LocalTerm::parse(2, "Z1 Z0", 0.5).unwrap(),
        ]);
        assert_eq!(g.len(), 2);
        assert_eq!(g.terms()[0].coeff, c(1.5, 0.0));
    }

    #[test]
    fn symbolic_commutativity_matches_dense() {
        // every pair of two-qubit words as a candidate group on three qubits
        let strings = all_strings(2);
        for a in &strings {
            for b in &strings {
                let lift = |p: &PauliString| {
                    let letters: Vec<_> = p.support().map(|q| (q + 1, p.letter(q).unwrap())).collect();
                    PauliString::from_letters(3, &letters).unwrap()
                };
                let ta = LocalTerm::real(lift(a), 1.0);
                let tb = LocalTerm::real(lift(b), 0.5);
                let symbolic = PartitionedHamiltonian::new(3, vec![vec![ta, tb]]).is_ok();
                let (ma, mb) = (ta.dense(12).unwrap(), tb.dense(12).unwrap());
                let dense = (&ma * &mb - &mb * &ma).iter().all(|z| z.norm() <= 1e-12);
                assert_eq!(symbolic, dense || a == b, "{a} {b}");
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let p = PauliString::parse(5, "Y3 X0 Z4").unwrap();
        assert_eq!(p.to_string(), "X0 Y3 Z4");
        assert!(PauliString::parse(5, "").unwrap().is_identity());
        assert!(PauliString::parse(3, "X7").is_err());
        assert!(PauliString::parse(3, "Q1").is_err());
        assert!(PauliString::parse(3, "X1 Z1").is_err());
    }

    #[test]
    fn model_file_round_trip() {
        let h = heisenberg_chain::<f64>(4, 0.5, Boundary::Open, true).unwrap();
        let file = h.to_model_file();
        let back: PartitionedHamiltonian<f64> = file.build(12).unwrap();
        assert_eq!(back, h);
    }
}
