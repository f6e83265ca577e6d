use nalgebra::DMatrix;
use udw_state::{build_pair_state, hermitian_eigenvalues, partial_state, PairParams, TwoQubitState, C64};

use crate::MeasureError;

/// h(x) = −(1−x)/2 log₂((1−x)/2) − (1+x)/2 log₂((1+x)/2), with |x| clipped to [0, 1].
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.abs().min(1.0);
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term((1.0 - x) / 2.0) + term((1.0 + x) / 2.0)
}

/// Von Neumann entropy in bits. Eigenvalues in [−1e−8, 0) are clipped before renormalising.
pub fn entropy(rho: &DMatrix<C64>) -> Result<f64, MeasureError> {
    let ev = hermitian_eigenvalues(rho);
    if let Some(&min) = ev.first() {
        if min < -1e-8 {
            return Err(MeasureError::NegativeEigenvalue { eigenvalue: min });
        }
    }
    let clipped: Vec<f64> = ev.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    Ok(clipped
        .iter()
        .map(|&l| l / total)
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum())
}

/// S(ρ_A) + S(ρ_B) − S(ρ_AB) from eigenvalues of the actual matrices.
pub fn mutual_information_of(s: &TwoQubitState) -> Result<f64, MeasureError> {
    let [a, b] = s.labels();
    let sa = entropy(&partial_state(s, &[a])?)?;
    let sb = entropy(&partial_state(s, &[b])?)?;
    Ok(sa + sb - entropy(&s.to_dmatrix())?)
}

/// Closed-form mutual information for identical detectors.
///
/// The marginals are S(ρ_A) = h(e^{−ζ/2}) and S(ρ_B) = h(e^{−ζ/2} cos ξ_AB Π); the joint entropy
/// uses the X-state eigenvalues (a₁ ± a₂)/2 and (b₁ ± b₂)/2. Field phases enter the state only as a
/// local unitary, so they do not change the value.
pub fn mutual_information_closed(p: &PairParams) -> Result<f64, MeasureError> {
    if !p.is_identical() {
        return Err(MeasureError::ClosedFormUnavailable("equal self overlaps"));
    }
    let pi = p.attenuation();
    let e = (-p.zeta / 2.0).exp();
    let e2 = e * e;
    let s_a = binary_entropy(e);
    let s_b = binary_entropy(e * p.xi_ab.cos() * pi);
    let a1 = 0.5 * (1.0 + e2 * p.zeta_ab.cosh() * pi);
    let b1 = 0.5 * (1.0 - e2 * p.zeta_ab.cosh() * pi);
    let common = pi * pi * (1.0 + e2 * p.zeta_ab.sinh().powi(2));
    let a2 = (0.25 * e2 * (1.0 + 2.0 * p.xi_ab.cos() * pi + common)).max(0.0).sqrt();
    let b2 = (0.25 * e2 * (1.0 - 2.0 * p.xi_ab.cos() * pi + common)).max(0.0).sqrt();
    let block = |w: f64, v: f64| if w > 0.0 { -w * w.log2() + w * binary_entropy(v / w) } else { 0.0 };
    let s_ab = block(a1, a2) + block(b1, b2);
    Ok(s_a + s_b - s_ab)
}

/// Mutual information: closed form for identical detectors in the vacuum, eigenvalues otherwise.
pub fn mutual_information(p: &PairParams) -> Result<f64, MeasureError> {
    if p.is_identical() && p.is_vacuum() {
        mutual_information_closed(p)
    } else {
        mutual_information_of(&build_pair_state(p)?)
    }
}
