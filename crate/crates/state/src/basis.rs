use nalgebra::{DMatrix, Matrix2, Matrix4};

use crate::linalg::{check_density, hermitian_eigenvalues, C64};
use crate::StateError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// {|+1⟩, |−1⟩} per qubit.
    SBasis,
    /// {|g⟩, e^{iΩt}|e⟩} per qubit.
    EnergyBasis,
}

/// A two-detector density matrix, qubits ordered (first, second) as built.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    matrix: Matrix4<C64>,
    basis: Basis,
    phases: Option<(f64, f64)>,
    labels: [String; 2],
}

impl TwoQubitState {
    /// Wraps an S-basis matrix after checking trace, Hermiticity and positivity.
    pub fn from_s_basis(matrix: Matrix4<C64>) -> Result<Self, StateError> {
        Self::from_s_basis_with(matrix, 1e-10)
    }

    pub(crate) fn from_s_basis_with(matrix: Matrix4<C64>, psd_tol: f64) -> Result<Self, StateError> {
        check_density(&to_dynamic(&matrix), Some(psd_tol))?;
        Ok(Self { matrix, basis: Basis::SBasis, phases: None, labels: ["A".into(), "B".into()] })
    }

    /// Renames the two qubits (defaults are `A` and `B`).
    pub fn with_labels(mut self, first: impl Into<String>, second: impl Into<String>) -> Self {
        self.labels = [first.into(), second.into()];
        self
    }

    pub fn labels(&self) -> &[String; 2] {
        &self.labels
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// (Ω_A t_A, Ω_B t_B) absorbed into the energy basis.
    pub fn phases(&self) -> Option<(f64, f64)> {
        self.phases
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        to_dynamic(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.to_dmatrix())
    }

    /// Energy-basis matrix in the fixed {|g⟩, |e⟩} frame, restoring the free phases e^{iΩt}.
    pub fn lab_frame(&self) -> Result<Matrix4<C64>, StateError> {
        let (pa, pb) = self.phases.ok_or(StateError::WrongBasis { expected: Basis::EnergyBasis })?;
        let da = Matrix2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::from_polar(1.0, pa));
        let db = Matrix2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::from_polar(1.0, pb));
        let d = da.kronecker(&db);
        Ok(d * self.matrix * d.adjoint())
    }
}

pub(crate) fn to_dynamic(m: &Matrix4<C64>) -> DMatrix<C64> {
    DMatrix::from_iterator(4, 4, m.iter().copied())
}

/// S₁ = σx, S₂ = σy, S₃ = σz; index 0 is the identity.
pub fn pauli(m: usize) -> Matrix2<C64> {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match m {
        0 => Matrix2::new(l, o, o, l),
        1 => Matrix2::new(o, l, l, o),
        2 => Matrix2::new(o, -i, i, o),
        3 => Matrix2::new(l, o, o, -l),
        _ => panic!("Pauli index {m} out of range 0..=3"),
    }
}

/// Rewrites an S-basis pair state in the energy basis {gg, ge, eg, ee} of the rotating frame.
pub fn to_energy_basis(s: &TwoQubitState, omega_t_a: f64, omega_t_b: f64) -> Result<TwoQubitState, StateError> {
    if s.basis != Basis::SBasis {
        return Err(StateError::WrongBasis { expected: Basis::SBasis });
    }
    // Row g = (⟨+|g⟩, ⟨−|g⟩) = (1, 1)/√2, row e = (1, −1)/√2.
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let w = Matrix2::new(h, h, h, -h);
    let u = w.kronecker(&w);
    let matrix = u * s.matrix * u.adjoint();
    Ok(TwoQubitState { matrix, basis: Basis::EnergyBasis, phases: Some((omega_t_a, omega_t_b)), labels: s.labels.clone() })
}
