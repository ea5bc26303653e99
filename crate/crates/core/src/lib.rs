//! Numerical laboratory for doubling Fock spaces: the radius field of a
//! subharmonic weight, lattices and partitions of unity, local holomorphic
//! approximation (G₂ and MO₂), the global IDA/IMO quasi-norms, and Hankel and
//! Toeplitz operators with their Schatten quasi-norms on radial weights.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! `*F64` aliases below fix the usual double-precision instantiation. The
//! [`experiments`] and [`io`] layers work in `f64` only.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decompose;
pub mod error;
pub mod experiments;
pub mod fockops;
pub mod geometry;
pub mod io;
pub mod localfit;
pub mod quadrature;
mod scalar;
pub mod seminorms;
pub mod stats;
pub mod symbols;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

pub type C64 = Complex<f64>;

pub type WeightSpecF64 = weights::WeightSpec<f64>;
pub type WeightModelF64 = weights::WeightModel<f64>;
pub type SymbolF64 = symbols::SymbolDescriptor<f64>;
pub type DiskFitF64 = localfit::DiskFit<f64>;
pub type LocalFitterF64 = localfit::LocalFitter<f64>;
pub type LatticeF64 = geometry::Lattice<f64>;
pub type PartitionF64 = geometry::Partition<f64>;
pub type BasisTableF64 = fockops::BasisTable<f64>;
pub type SchattenReportF64 = fockops::SchattenReport<f64>;
pub type SeminormReportF64 = seminorms::SeminormReport<f64>;
