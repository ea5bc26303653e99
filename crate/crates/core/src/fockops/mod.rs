//! Operators on radial doubling Fock spaces: monomial norms, the reproducing
//! kernel, Hankel Gram matrices and their singular values, and diagonal
//! Toeplitz operators.

mod basis;
mod eigen;
mod hankel;
mod kernel;
mod moments;
mod schatten;
mod toeplitz;

pub use basis::BasisTable;
pub use eigen::hermitian_eigenvalues;
pub use hankel::{hankel_gram, GramBlock, GramMatrix};
pub use kernel::{kernel_decay_fit, kernel_eval, kernel_norm_ln, DecayFit, KernelValue};
pub use moments::{LogValue, MomentIntegrator};
pub use schatten::{
    schatten_quasi_norm, schatten_report, singular_values, PSeries, SchattenReport, SchattenVerdict,
};
pub use toeplitz::{
    averaging_transform, toeplitz_equivalence_report, toeplitz_matrix, DensityRow, RadialDensity,
    ToeplitzEquivalence,
};
