use nalgebra::{Matrix2, Matrix4};
use udw_state::{build_pair_state, pauli, Basis, PairParams, StateError, TwoQubitState, C64};

use crate::MeasureError;

/// Coefficients of 𝟙, S₁, S₂, S₃ for a single-detector observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableCoeffs {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ObservableCoeffs {
    pub fn new(c0: f64, c1: f64, c2: f64, c3: f64) -> Self {
        Self { c0, c1, c2, c3 }
    }

    /// H = Ω/2 (𝟙 − S₁).
    pub fn hamiltonian(omega: f64) -> Self {
        Self::new(omega / 2.0, -omega / 2.0, 0.0, 0.0)
    }

    pub fn operator(&self) -> Matrix2<C64> {
        [self.c0, self.c1, self.c2, self.c3]
            .iter()
            .enumerate()
            .fold(Matrix2::zeros(), |acc, (m, &c)| acc + pauli(m) * C64::new(c, 0.0))
    }

    fn traceless(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }
}

/// Tr[ρ O_A O_B] − Tr[ρ O_A] Tr[ρ O_B] by direct matrix algebra, any basis.
pub fn direct_correlator(s: &TwoQubitState, a: &Matrix2<C64>, b: &Matrix2<C64>) -> f64 {
    let id = Matrix2::<C64>::identity();
    let oa: Matrix4<C64> = a.kronecker(&id);
    let ob: Matrix4<C64> = id.kronecker(b);
    let rho = s.matrix();
    ((rho * oa * ob).trace() - (rho * oa).trace() * (rho * ob).trace()).re
}

fn pauli_from_elements(s: &TwoQubitState, m: usize, n: usize) -> f64 {
    // Element expressions written for r = 4ρ, indices 1-based as 11 … 44.
    let r = |i: usize, j: usize| s.matrix()[(i - 1, j - 1)] * 4.0;
    let (r12, r13, r14, r23, r24, r34) = (r(1, 2), r(1, 3), r(1, 4), r(2, 3), r(2, 4), r(3, 4));
    match (m, n) {
        (1, 1) => 0.5 * (r23.re + r14.re) - 0.25 * (r13.re + r24.re) * (r12.re + r34.re),
        (1, 2) => 0.5 * (-r14.im + r23.im) - 0.25 * (r13.re + r24.re) * (-r12.im - r34.im),
        (1, 3) => 0.5 * (r13.re - r24.re),
        (2, 1) => -0.5 * (r23.im + r14.im) + 0.25 * (r13.im + r24.im) * (r12.re + r34.re),
        (2, 2) => 0.5 * (r23.re - r14.re) + 0.25 * (r13.im + r24.im) * (-r12.im - r34.im),
        (2, 3) => 0.5 * (-r13.im + r24.im),
        (3, 1) => 0.5 * (r12.re - r34.re),
        (3, 2) => 0.5 * (-r12.im + r34.im),
        (3, 3) => 0.0,
        _ => panic!("Pauli indices must lie in 1..=3, got ({m}, {n})"),
    }
}

/// Γ(S_m^A, S_n^B) for m, n ∈ 1..=3 from the pair-state elements.
pub fn pauli_correlator(p: &PairParams, m: usize, n: usize) -> Result<f64, MeasureError> {
    Ok(pauli_from_elements(&build_pair_state(p)?, m, n))
}

/// All nine Pauli correlators, row m (Alice), column n (Bob).
pub fn pauli_table(p: &PairParams) -> Result<[[f64; 3]; 3], MeasureError> {
    let s = build_pair_state(p)?;
    Ok(pauli_table_of(&s)?)
}

pub(crate) fn pauli_table_of(s: &TwoQubitState) -> Result<[[f64; 3]; 3], StateError> {
    if s.basis() != Basis::SBasis {
        return Err(StateError::WrongBasis { expected: Basis::SBasis });
    }
    let mut t = [[0.0; 3]; 3];
    for (m, row) in t.iter_mut().enumerate() {
        for (n, v) in row.iter_mut().enumerate() {
            *v = pauli_from_elements(s, m + 1, n + 1);
        }
    }
    Ok(t)
}

/// Γ(O_A, O_B). Identical detectors use the closed form; otherwise the Pauli table is contracted.
pub fn observable_correlator(p: &PairParams, a: &ObservableCoeffs, b: &ObservableCoeffs) -> Result<f64, MeasureError> {
    if !p.is_identical() {
        let t = pauli_table(p)?;
        let (ac, bc) = (a.traceless(), b.traceless());
        return Ok((0..3).flat_map(|m| (0..3).map(move |n| (m, n))).map(|(m, n)| ac[m] * bc[n] * t[m][n]).sum());
    }
    p.validate()?;
    let (s0a, c0a) = p.xi_0a.sin_cos();
    let (s0b, c0b) = p.xi_0b.sin_cos();
    let (sab, cab) = p.xi_ab.sin_cos();
    let diff = p.zeta_ab.cosh() - cab;
    let a_perp = a.c1 * s0a - a.c2 * c0a;
    let b_perp = b.c1 * s0b - b.c2 * c0b;
    let bracket = p.zeta_ab.sinh() * a_perp * b_perp
        + diff * (a.c1 * c0a + a.c2 * s0a) * (b.c1 * c0b + b.c2 * s0b)
        + (p.zeta / 2.0).exp() * a.c3 * sab * b_perp;
    Ok(p.attenuation() * (-p.zeta).exp() * bracket)
}

/// Γ(H_A, H_B) with H = Ω/2 (𝟙 − S₁).
pub fn energy_correlator(p: &PairParams, omega_a: f64, omega_b: f64) -> Result<f64, MeasureError> {
    if !p.is_identical() {
        return observable_correlator(p, &ObservableCoeffs::hamiltonian(omega_a), &ObservableCoeffs::hamiltonian(omega_b));
    }
    p.validate()?;
    let bracket = (p.zeta_ab.cosh() - p.xi_ab.cos()) * p.xi_0b.cos() * p.xi_0a.cos()
        + p.zeta_ab.sinh() * p.xi_0b.sin() * p.xi_0a.sin();
    Ok(omega_a * omega_b / 4.0 * p.attenuation() * (-p.zeta).exp() * bracket)
}
