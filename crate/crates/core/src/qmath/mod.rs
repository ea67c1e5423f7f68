//! Dense complex linear algebra and quantum-information primitives.

mod density;
mod eigen;
mod matrix;

pub use density::{
    fidelity_with_pure, partial_trace, spectrum_entropy, trace_distance, von_neumann_entropy,
    DensityMatrix, MAX_QUBITS,
};
pub(crate) use density::{bit_shift, check_wires};
pub use eigen::hermitian_eigenvalues;
pub use matrix::{tensor_product, ComplexMatrix};

pub use num_complex::Complex64;
