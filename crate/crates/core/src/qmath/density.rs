use num_complex::Complex64;

use super::eigen::jacobi_eigenvalues;
use super::ComplexMatrix;
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 10;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

/// Trace-one, Hermitian, positive semidefinite state over `n_qubits` qubits.
///
/// Qubit 0 is the leftmost (most significant) tensor factor, so basis index
/// `i` carries the bit of wire `w` at position `n_qubits - 1 - w`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every state invariant, including positivity.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let n_qubits = qubits_for_dim(mat.rows())?;
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let rho = Self { n_qubits, mat };
        rho.check()?;
        Ok(rho)
    }

    /// Wraps a matrix produced by a CPTP evolution of a valid state.
    pub(crate) fn from_evolved(n_qubits: usize, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(mat.rows(), 1 << n_qubits);
        Self { n_qubits, mat }
    }

    /// Pure state |ψ⟩⟨ψ|; ψ must be normalized within 1e-10.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let n_qubits = qubits_for_dim(psi.len())?;
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("state vector norm {norm}")));
        }
        Ok(Self {
            n_qubits,
            mat: ComplexMatrix::outer(psi),
        })
    }

    /// Computational basis projector |index⟩⟨index|.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "{n_qubits} qubits (supported: 1..={MAX_QUBITS})"
            )));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut mat = ComplexMatrix::zeros(dim, dim);
        mat[(index, index)] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, mat })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        qubits_for_dim(dim)?;
        Ok(Self {
            n_qubits,
            mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        })
    }

    /// Convex combination `alpha·self + (1 − alpha)·other`.
    pub fn mix(&self, other: &Self, alpha: f64) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch("mixing states of different width".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::ProbabilityOutOfRange { name: "alpha", value: alpha });
        }
        let mat = &self.mat.scale_real(alpha) + &other.mat.scale_real(1.0 - alpha);
        Ok(Self::from_evolved(self.n_qubits, mat))
    }

    /// Product state `self ⊗ other`; `self` occupies the leading wires.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        Ok(Self::from_evolved(n, self.mat.kron(&other.mat)))
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    #[inline]
    pub(crate) fn matrix_mut(&mut self) -> &mut ComplexMatrix {
        &mut self.mat
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        jacobi_eigenvalues(&self.mat)
    }

    /// Re-checks Hermiticity, unit trace and positivity.
    pub fn check(&self) -> Result<()> {
        if self.mat.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("density matrix has non-finite entries".into()));
        }
        let herm = self.mat.hermiticity_residual();
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = self.mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "dimension {dim} is not a power of two ≥ 2"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("{n} qubits exceeds {MAX_QUBITS}")));
    }
    Ok(n)
}

#[inline]
pub(crate) fn bit_shift(n_qubits: usize, wire: usize) -> usize {
    n_qubits - 1 - wire
}

pub(crate) fn check_wires(n_qubits: usize, wires: &[usize]) -> Result<()> {
    for (i, &w) in wires.iter().enumerate() {
        if w >= n_qubits {
            return Err(Error::WireOutOfRange { wire: w, n_qubits });
        }
        if wires[..i].contains(&w) {
            return Err(Error::InvalidArgument(format!("wire {w} listed twice")));
        }
    }
    Ok(())
}

/// Reduced state on `keep`, with output wires in the order given.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one qubit".into()));
    }
    check_wires(n, keep)?;
    let traced: Vec<usize> = (0..n).filter(|w| !keep.contains(w)).collect();
    let k = keep.len();

    // full basis index for (kept configuration, traced configuration)
    let compose = |kept_cfg: usize, traced_cfg: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &w) in keep.iter().enumerate() {
            let bit = (kept_cfg >> (k - 1 - pos)) & 1;
            idx |= bit << bit_shift(n, w);
        }
        for (pos, &w) in traced.iter().enumerate() {
            let bit = (traced_cfg >> (traced.len() - 1 - pos)) & 1;
            idx |= bit << bit_shift(n, w);
        }
        idx
    };

    let kd = 1usize << k;
    let td = 1usize << traced.len();
    let index: Vec<usize> = (0..kd)
        .flat_map(|a| (0..td).map(move |t| (a, t)))
        .map(|(a, t)| compose(a, t))
        .collect();

    let src = rho.mat.data();
    let dim = rho.dim();
    let mut out = ComplexMatrix::zeros(kd, kd);
    for a in 0..kd {
        for b in 0..kd {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..td {
                acc += src[index[a * td + t] * dim + index[b * td + t]];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix::from_evolved(k, out))
}

/// Shannon entropy in bits of a spectrum; entries are clamped to [0, 1]
/// and 0·log 0 is taken as 0.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    let h: f64 = eigenvalues
        .iter()
        .map(|&l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum();
    h.max(0.0)
}

/// S(ρ) = −Tr ρ log₂ ρ.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    spectrum_entropy(&rho.eigenvalues())
}

/// ½‖ρ − σ‖₁
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {}- and {}-dimensional states",
            rho.dim(),
            sigma.dim()
        )));
    }
    let diff = &rho.mat - &sigma.mat;
    let d: f64 = jacobi_eigenvalues(&diff).iter().map(|m| m.abs()).sum::<f64>() * 0.5;
    Ok(d.clamp(0.0, 1.0))
}

/// ⟨ψ|ρ|ψ⟩ for a normalized ψ.
pub fn fidelity_with_pure(rho: &DensityMatrix, psi: &[Complex64]) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state vector of length {} against a {}-dimensional state",
            psi.len(),
            rho.dim()
        )));
    }
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("state vector norm {norm}")));
    }
    let dim = rho.dim();
    let m = rho.mat.data();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..dim {
            row += m[i * dim + j] * psi[j];
        }
        acc += psi[i].conj() * row;
    }
    if acc.im.abs() > 1e-10 {
        return Err(Error::Numerical(format!("fidelity has imaginary part {:.3e}", acc.im)));
    }
    Ok(acc.re.clamp(0.0, 1.0))
}
