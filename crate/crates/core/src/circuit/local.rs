//! In-place application of few-qubit operators to a full density matrix.

use num_complex::Complex64;

use crate::qmath::{bit_shift, ComplexMatrix};

/// Basis-index bookkeeping for an operator acting on `wires` of an
/// `n_qubits` register.
pub(crate) struct LocalLayout {
    offsets: Vec<usize>,
    bases: Vec<usize>,
}

impl LocalLayout {
    pub(crate) fn new(n_qubits: usize, wires: &[usize]) -> Self {
        let k = wires.len();
        let offsets: Vec<usize> = (0..1usize << k)
            .map(|l| {
                wires.iter().enumerate().fold(0usize, |acc, (pos, &w)| {
                    if (l >> (k - 1 - pos)) & 1 == 1 {
                        acc | (1 << bit_shift(n_qubits, w))
                    } else {
                        acc
                    }
                })
            })
            .collect();
        let mask = *offsets.last().expect("at least one wire");
        let bases = (0..1usize << n_qubits).filter(|i| i & mask == 0).collect();
        Self { offsets, bases }
    }
}

/// ρ ← K ρ K† with K acting on the layout's wires.
pub(crate) fn conjugate(rho: &mut ComplexMatrix, op: &ComplexMatrix, layout: &LocalLayout) {
    let dim = rho.rows();
    let ld = layout.offsets.len();
    let u = op.data();
    let data = rho.data_mut();
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; ld];

    // left: K ρ
    for c in 0..dim {
        for &b in &layout.bases {
            for (m, off) in layout.offsets.iter().enumerate() {
                v[m] = data[(b + off) * dim + c];
            }
            for (l, off) in layout.offsets.iter().enumerate() {
                let row = &u[l * ld..(l + 1) * ld];
                data[(b + off) * dim + c] = row.iter().zip(&v).map(|(a, x)| a * x).sum();
            }
        }
    }
    // right: (K ρ) K†
    for r in 0..dim {
        let row_data = &mut data[r * dim..(r + 1) * dim];
        for &b in &layout.bases {
            for (m, off) in layout.offsets.iter().enumerate() {
                v[m] = row_data[b + off];
            }
            for (l, off) in layout.offsets.iter().enumerate() {
                let row = &u[l * ld..(l + 1) * ld];
                row_data[b + off] = row.iter().zip(&v).map(|(a, x)| x * a.conj()).sum();
            }
        }
    }
}

/// Σᵢ Kᵢ ρ Kᵢ† for single-wire Kraus operators.
pub(crate) fn kraus_sum(rho: &ComplexMatrix, ops: &[ComplexMatrix], layout: &LocalLayout) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(rho.rows(), rho.cols());
    for k in ops {
        if k.max_abs() == 0.0 {
            continue;
        }
        let mut term = rho.clone();
        conjugate(&mut term, k, layout);
        for (a, t) in acc.data_mut().iter_mut().zip(term.data()) {
            *a += t;
        }
    }
    acc
}
