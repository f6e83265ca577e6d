use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::StateError;

pub type C64 = Complex64;

/// Sorted real eigenvalues of a Hermitian matrix (the anti-Hermitian part is discarded).
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Partial trace of an n-qubit matrix, keeping the qubits at positions `keep` in the given order.
pub fn partial_trace(m: &DMatrix<C64>, n: usize, keep: &[usize]) -> Result<DMatrix<C64>, StateError> {
    if keep.is_empty() {
        return Err(StateError::EmptyKeep);
    }
    if m.nrows() != 1 << n || m.ncols() != 1 << n {
        return Err(StateError::InvalidState(format!("expected a {0}×{0} matrix", 1 << n)));
    }
    for (k, &q) in keep.iter().enumerate() {
        if q >= n || keep[..k].contains(&q) {
            return Err(StateError::InvalidState(format!("bad qubit index {q}")));
        }
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let bit = |q: usize| 1usize << (n - 1 - q);
    let spread = |sub: usize, qs: &[usize]| -> usize {
        qs.iter()
            .enumerate()
            .filter(|&(k, _)| sub & (1 << (qs.len() - 1 - k)) != 0)
            .fold(0, |acc, (_, &q)| acc | bit(q))
    };
    let dk = 1 << keep.len();
    let dt = 1 << traced.len();
    let env: Vec<usize> = (0..dt).map(|e| spread(e, &traced)).collect();
    let mut out = DMatrix::zeros(dk, dk);
    for r in 0..dk {
        let rr = spread(r, keep);
        for c in 0..dk {
            let cc = spread(c, keep);
            let mut acc = C64::new(0.0, 0.0);
            for &e in &env {
                acc += m[(rr | e, cc | e)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Checks trace, Hermiticity and (optionally) positivity.
pub(crate) fn check_density(m: &DMatrix<C64>, psd_tol: Option<f64>) -> Result<(), StateError> {
    let tr = m.trace();
    if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
        return Err(StateError::InvalidState(format!("trace {tr}")));
    }
    let herm = (m - m.adjoint()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if herm > 1e-12 {
        return Err(StateError::InvalidState(format!("not Hermitian (deviation {herm:e})")));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(StateError::InvalidState("non-finite entry".into()));
    }
    if let Some(tol) = psd_tol {
        let min = hermitian_eigenvalues(m)[0];
        if min < -tol {
            return Err(StateError::InconsistentParameters { min_eigenvalue: min });
        }
    }
    Ok(())
}
