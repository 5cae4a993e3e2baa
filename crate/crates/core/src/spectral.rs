//! Dense Hermitian spectral kernel.
//!
//! Projectors `Π_{≤Λ}` are closed at the cutoff: an eigenvalue within
//! [`CUTOFF_TIE`] of `Λ` counts as `≤ Λ`. Restricted norms and leakage
//! blocks are evaluated in the eigenbasis, `‖Π A Π‖ = ‖V_sel† A V_sel‖`,
//! which is exact because `V_sel` is an isometry.

use nalgebra::{Complex, SymmetricEigen};

use crate::{lit, to_f64, CMatrix, Error, Real, Result};

/// Eigenvalues this close to a cutoff are treated as lying on it.
pub const CUTOFF_TIE: f64 = 1e-12;

/// Relative Hermiticity tolerance accepted by [`SpectralCache::new`].
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCache<T: Real> {
    eigenvalues: Vec<T>,
    eigenvectors: CMatrix<T>,
}

impl<T: Real> SpectralCache<T> {
    /// Eigendecomposes a Hermitian matrix; eigenpairs sorted ascending.
    pub fn new(a: &CMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                actual: a.ncols(),
            });
        }
        let deviation = (a - a.adjoint()).norm();
        let scale = a.norm().max(T::one());
        if deviation > lit::<T>(HERMITIAN_TOL) * scale {
            return Err(Error::NotHermitian(to_f64(deviation)));
        }
        let eig = SymmetricEigen::new(a.clone());
        let mut order: Vec<usize> = (0..a.nrows()).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[i]
                .partial_cmp(&eig.eigenvalues[j])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = eig.eigenvectors.select_columns(order.iter());
        Ok(SpectralCache {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix<T> {
        &self.eigenvectors
    }

    pub fn min_energy(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max_energy(&self) -> T {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Nearest-rank percentile of the spectrum, `p ∈ [0, 100]`.
    pub fn percentile_energy(&self, p: f64) -> Result<T> {
        if !(0.0..=100.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("percentile {p} not in [0, 100]")));
        }
        let idx = (p / 100.0 * (self.dimension() - 1) as f64).round() as usize;
        Ok(self.eigenvalues[idx])
    }

    /// Number of eigenvalues `≤ Λ` (ties included).
    pub fn count_leq(&self, cutoff: T) -> usize {
        let edge = cutoff + lit::<T>(CUTOFF_TIE);
        self.eigenvalues.partition_point(|&e| e <= edge)
    }

    /// Eigenvectors spanning `Π_{≤Λ}` as columns.
    pub fn low_basis(&self, cutoff: T) -> CMatrix<T> {
        let n = self.count_leq(cutoff);
        self.eigenvectors.columns(0, n).into_owned()
    }

    /// Eigenvectors spanning `Π_{>Λ}` as columns.
    pub fn high_basis(&self, cutoff: T) -> CMatrix<T> {
        let n = self.count_leq(cutoff);
        self.eigenvectors
            .columns(n, self.dimension() - n)
            .into_owned()
    }

    pub fn projector_leq(&self, cutoff: T) -> CMatrix<T> {
        let v = self.low_basis(cutoff);
        &v * v.adjoint()
    }

    pub fn projector_gt(&self, cutoff: T) -> CMatrix<T> {
        CMatrix::identity(self.dimension(), self.dimension()) - self.projector_leq(cutoff)
    }

    /// `Σ_i g(E_i) v_i v_i†`.
    pub fn function(&self, g: impl Fn(T) -> Complex<T>) -> CMatrix<T> {
        let mut scaled = self.eigenvectors.clone();
        for (j, &e) in self.eigenvalues.iter().enumerate() {
            let w = g(e);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= w;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Exact propagator `e^{−isH}`.
    pub fn evolve(&self, s: T) -> CMatrix<T> {
        self.function(|e| {
            let theta = -s * e;
            Complex::new(theta.cos(), theta.sin())
        })
    }

    /// `V_sel† A V_sel` for the eigenvectors with energy `≤ Λ`.
    pub fn compress(&self, a: &CMatrix<T>, cutoff: T) -> Result<CMatrix<T>> {
        self.check_dim(a)?;
        let v = self.low_basis(cutoff);
        Ok(v.adjoint() * a * &v)
    }

    /// Restricted norm `‖Π_{≤Λ} A Π_{≤Λ}‖`.
    pub fn restricted_norm(&self, a: &CMatrix<T>, cutoff: T) -> Result<T> {
        Ok(spectral_norm(&self.compress(a, cutoff)?))
    }

    /// Leakage block norm `‖Π_{>Λ′} A Π_{≤Λ}‖`.
    pub fn leakage_norm(&self, a: &CMatrix<T>, low: T, high: T) -> Result<T> {
        self.check_dim(a)?;
        let vl = self.low_basis(low);
        let vh = self.high_basis(high);
        Ok(spectral_norm(&(vh.adjoint() * a * vl)))
    }

    fn check_dim(&self, a: &CMatrix<T>) -> Result<()> {
        if a.nrows() != self.dimension() || a.ncols() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: a.nrows().max(a.ncols()),
            });
        }
        Ok(())
    }
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm<T: Real>(a: &CMatrix<T>) -> T {
    if a.is_empty() {
        return T::zero();
    }
    // strongly rectangular blocks go through the smaller Gram matrix
    if a.nrows() > 2 * a.ncols() {
        max_singular(&(a.adjoint() * a)).sqrt()
    } else if a.ncols() > 2 * a.nrows() {
        max_singular(&(a * a.adjoint())).sqrt()
    } else {
        max_singular(a)
    }
}

fn max_singular<T: Real>(a: &CMatrix<T>) -> T {
    a.singular_values().iter().fold(T::zero(), |m, &x| m.max(x))
}
