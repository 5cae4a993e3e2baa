//! Error analysis of product formulas acting on low-energy states.
//!
//! The crate works on small qubit Hamiltonians `H = Σ_m H_m` whose groups
//! `H_m` are sums of mutually commuting Pauli terms. Everything that can be
//! measured exactly by dense diagonalization (product-formula error, leakage
//! out of a low-energy window, restricted norms of nested commutators) sits
//! next to the analytic bounds that are supposed to dominate it.
//!
//! Numerical code is generic over the real scalar type through [`Real`]; the
//! aliases at the crate root fix it to `f64`, which is what the command line
//! front end uses. Cost exponents are exact rationals.

pub mod bounds;
pub mod commutators;
pub mod cost;
mod error;
pub mod formulas;
pub mod pauli;
pub mod quadrature;
pub mod spectral;

use nalgebra::{Complex, DMatrix, RealField};
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

pub use error::{Error, Result};

/// Real scalar usable by every numeric routine in the crate.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + FloatConst {}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive + FloatConst {}

/// Dense complex matrix over the scalar `T`.
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Converts an `f64` literal into the working scalar.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub type Term = pauli::LocalTerm<f64>;
pub type Group = pauli::TermGroup<f64>;
pub type Hamiltonian = pauli::PartitionedHamiltonian<f64>;
pub type Spectrum = spectral::SpectralCache<f64>;
pub type Schedule = formulas::FormulaSchedule<f64>;
pub type Dense = formulas::DenseModel<f64>;
pub type OpSum = commutators::OperatorSum<f64>;
pub type Coefficients = commutators::CoefficientTable<f64>;

pub type Hamiltonian32 = pauli::PartitionedHamiltonian<f32>;
pub type Spectrum32 = spectral::SpectralCache<f32>;
pub type Schedule32 = formulas::FormulaSchedule<f32>;
