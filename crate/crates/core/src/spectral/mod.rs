//! Eigen-decompositions: a dense oracle and closed forms for total graphs.

mod eigensystem;
mod knn_basis;
mod solver;
mod total;

pub use eigensystem::{grouping_tolerance, EigenSystem, Spectrum, GROUPING_RTOL};
pub use knn_basis::{kernel_weight, KnnEigenbasis, NamedVector};
pub use solver::{symmetric_eig, symmetric_eig_with, symmetric_spectrum, EigOptions, Solver, JACOBI_AUTO_LIMIT};
pub use total::{
    check_regular_root, incidence_kernel_basis, kernel_dimension, theta_pair, total_eigenvectors_regular,
    total_spectrum_from_root, total_spectrum_regular, x_coefficient, x_norm_sq, x_vectors, ClosedFormLevel,
    LevelSource, TotalSpectrumClosedForm,
};
