//! Cyclic Jacobi eigenvalue solver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real Jacobi rotation to the resulting
//! real-symmetric 2x2 block. Only eigenvalues are tracked.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::{Error, Result};

/// Hermiticity tolerance for inputs, scaled by `max(1, ‖H‖_max)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Convergence threshold on the off-diagonal Frobenius norm.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues of a {}x{} matrix",
            h.rows(),
            h.cols()
        )));
    }
    let residual = h.hermiticity_residual();
    if residual > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian(residual));
    }
    Ok(jacobi_eigenvalues(h))
}

/// Jacobi sweeps without the Hermiticity precondition check. The input is
/// symmetrized first, so tiny round-off asymmetry is harmless.
pub(crate) fn jacobi_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let src = h.data();
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        a[i * n + i] = Complex64::new(src[i * n + i].re, 0.0);
        for j in i + 1..n {
            let v = 0.5 * (src[i * n + j] + src[j * n + i].conj());
            a[i * n + j] = v;
            a[j * n + i] = v.conj();
        }
    }

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * a[i * n + j].norm_sqr())
            .sum();
        if off.sqrt() < OFF_DIAGONAL_TOL {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, n, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    // skip pivots that can no longer change the diagonal in floating point
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[p * n + q] = Complex64::new(0.0, 0.0);
        a[q * n + p] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag; // e^{iφ}
    let theta = 0.5 * (aqq - app) / mag;
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q); A <- J† A J
    let ph_conj = phase.conj();
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c - akq * (s * ph_conj);
        a[k * n + q] = akp * s + akq * (c * ph_conj);
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c - aqk * (s * phase);
        a[q * n + k] = apk * s + aqk * (c * phase);
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p] = Complex64::new(app - t * mag, 0.0);
    a[q * n + q] = Complex64::new(aqq + t * mag, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    /// Number of eigenvalues below `x`, from the signs of the LDL† pivots of
    /// `H - xI` (Sylvester's law of inertia).
    fn count_below(h: &ComplexMatrix, x: f64) -> usize {
        let n = h.rows();
        let mut a: Vec<Complex64> = h.data().to_vec();
        for i in 0..n {
            a[i * n + i] -= x;
        }
        let mut negatives = 0;
        for k in 0..n {
            let mut piv = a[k * n + k].re;
            if piv == 0.0 {
                piv = -1e-300;
            }
            if piv < 0.0 {
                negatives += 1;
            }
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                for j in k + 1..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= f * akj;
                }
            }
        }
        negatives
    }

    /// Brute-force spectrum by bisection on the inertia count.
    fn bisection_spectrum(h: &ComplexMatrix) -> Vec<f64> {
        let n = h.rows();
        let bound = 1.0 + (0..n)
            .map(|i| (0..n).map(|j| h[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        (0..n)
            .map(|k| {
                let (mut lo, mut hi) = (-bound, bound);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if count_below(h, mid) > k {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    #[test]
    fn diagonal_input() {
        let e = hermitian_eigenvalues(&ComplexMatrix::diag(&[0.7, 0.3])).unwrap();
        assert!((e[0] - 0.3).abs() < 1e-15 && (e[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = hermitian_eigenvalues(&x).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian(_))));
        assert!(hermitian_eigenvalues(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn matches_bisection_oracle_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n in &[2usize, 4, 8] {
            for _ in 0..10 {
                let h = random_hermitian(n, &mut rng);
                let jac = hermitian_eigenvalues(&h).unwrap();
                let oracle = bisection_spectrum(&h);
                for (a, b) in jac.iter().zip(&oracle) {
                    assert!((a - b).abs() < 1e-8, "n={n}: {jac:?} vs {oracle:?}");
                }
                let tr = h.trace().re;
                assert!((jac.iter().sum::<f64>() - tr).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // I/4 + small rank-one perturbation keeps three equal eigenvalues
        let psi = [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.5), Complex64::new(0.5, 0.0), Complex64::new(0.0, -0.5)];
        let m = &ComplexMatrix::identity(4).scale_real(0.25) + &ComplexMatrix::outer(&psi).scale_real(0.5);
        let e = hermitian_eigenvalues(&m).unwrap();
        for v in &e[..3] {
            assert!((v - 0.25).abs() < 1e-12);
        }
        assert!((e[3] - 0.75).abs() < 1e-12);
    }
}
