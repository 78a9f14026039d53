//! Dense complex linear algebra for small quantum registers.

pub mod eig;
pub mod matrix;
pub mod ortho;
pub mod partial;
pub mod schmidt;
pub mod spectrum;

pub use eig::{hermitian_eig, HermitianEigen};
pub use matrix::{inner, is_unitary, kron, norm_sqr, ComplexMatrix, MAX_DIM};
pub use partial::{partial_trace, reduced_density};
pub use schmidt::{schmidt_decompose, Schmidt};
pub use spectrum::{cluster_spectrum, Cluster, SpectrumClusters};
