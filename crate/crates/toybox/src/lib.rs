//! A four-qubit pure state (Alice, interloper, Bob, field) in which Bob is maximally mixed and
//! uncorrelated with Alice while no detector pair is entangled.
//!
//! |Ψ⟩ = (a|0⟩ + c|1⟩)_A |0⟩_I |Φ⁺⟩_BF / √2 + (b|0⟩ + d|1⟩)_A |1⟩_I |Ψ⁺⟩_BF / √2,
//! qubits packed big-endian in the order A, I, B, F.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use thiserror::Error;
use udw_state::{hermitian_eigenvalues, partial_state, MultiQubitState, StateError, C64};

pub const LABELS: [&str; 4] = ["A", "I", "B", "F"];

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ToyError {
    #[error("coefficients violate |a|²+|b|² = 1 or |c|²+|d|² = 1 (deviation {0:e})")]
    Normalisation(f64),
    #[error("expected a two-qubit density matrix")]
    Shape,
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToyCoeffs {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl ToyCoeffs {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self, ToyError> {
        let k = Self { a, b, c, d };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), ToyError> {
        let dev = (self.a.norm_sqr() + self.b.norm_sqr() - 1.0)
            .abs()
            .max((self.c.norm_sqr() + self.d.norm_sqr() - 1.0).abs());
        if !(dev <= 1e-12) {
            return Err(ToyError::Normalisation(dev));
        }
        Ok(())
    }

    /// (1/4) | |b|² + |d|² − |a|² − |c|² |.
    pub fn bob_field_negativity(&self) -> f64 {
        0.25 * (self.b.norm_sqr() + self.d.norm_sqr() - self.a.norm_sqr() - self.c.norm_sqr()).abs()
    }
}

fn state_vector(k: &ToyCoeffs) -> DVector<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = DVector::zeros(16);
    let idx = |a: usize, i: usize, b: usize, f: usize| 8 * a + 4 * i + 2 * b + f;
    let alice0 = [k.a, k.c];
    let alice1 = [k.b, k.d];
    for (a, (&x, &y)) in alice0.iter().zip(&alice1).enumerate() {
        // |Φ⁺⟩ = (|00⟩ + |11⟩)/√2, |Ψ⁺⟩ = (|01⟩ + |10⟩)/√2.
        v[idx(a, 0, 0, 0)] += x * h * h;
        v[idx(a, 0, 1, 1)] += x * h * h;
        v[idx(a, 1, 0, 1)] += y * h * h;
        v[idx(a, 1, 1, 0)] += y * h * h;
    }
    v
}

/// |Ψ⟩⟨Ψ| over the qubits A, I, B, F.
pub fn toy_state(k: &ToyCoeffs) -> Result<MultiQubitState, ToyError> {
    k.validate()?;
    let v = state_vector(k);
    let rho: DMatrix<C64> = &v * v.adjoint();
    Ok(MultiQubitState::new(rho, LABELS.iter().map(|s| s.to_string()).collect())?)
}

/// Which qubit of a pair is transposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

pub fn partial_transpose(rho: &DMatrix<C64>, side: Subsystem) -> Result<DMatrix<C64>, ToyError> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(ToyError::Shape);
    }
    Ok(DMatrix::from_fn(4, 4, |r, c| {
        let (r1, r2, c1, c2) = (r >> 1, r & 1, c >> 1, c & 1);
        match side {
            Subsystem::First => rho[(2 * c1 + r2, 2 * r1 + c2)],
            Subsystem::Second => rho[(2 * r1 + c2, 2 * c1 + r2)],
        }
    }))
}

/// Sum of |λ| over negative eigenvalues of the partial transpose.
pub fn negativity(rho: &DMatrix<C64>, side: Subsystem) -> Result<f64, ToyError> {
    let tr = rho.trace();
    let herm = (rho - rho.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(ToyError::Shape);
    }
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 || herm > 1e-10 {
        return Err(StateError::InvalidState(format!("trace {tr}, Hermiticity deviation {herm:e}")).into());
    }
    let ev = hermitian_eigenvalues(&partial_transpose(rho, side)?);
    Ok(ev.iter().filter(|&&l| l < 0.0).map(|l| -l).sum())
}

/// Outcome of the toy-model checks; each `*_error` is a max-norm distance.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyReport {
    pub purity: f64,
    /// ‖ρ_AB − ρ_A ⊗ 𝟙/2‖.
    pub product_error: f64,
    /// ‖ρ_A − ½[[1, ac* + bd*], [a*c + b*d, 1]]‖.
    pub alice_error: f64,
    /// ‖ρ_AI − ½|u⟩⟨u| ⊗ |0⟩⟨0| − ½|v⟩⟨v| ⊗ |1⟩⟨1|‖ with u = (a, c), v = (b, d).
    pub alice_interloper_error: f64,
    pub negativity_ib: f64,
    /// ‖ρ_IB^{T_B} − ρ_IB‖.
    pub ib_transpose_error: f64,
    pub negativity_bf: f64,
    pub negativity_bf_expected: f64,
    /// max(‖ρ_AF − ρ_AB‖, ‖ρ_IF − ρ_IB‖).
    pub exchange_error: f64,
}

impl ToyReport {
    pub fn passes(&self, tol: f64) -> bool {
        (self.purity - 1.0).abs() < tol
            && self.product_error < tol
            && self.alice_error < tol
            && self.alice_interloper_error < tol
            && self.negativity_ib < tol
            && self.ib_transpose_error < tol
            && (self.negativity_bf - self.negativity_bf_expected).abs() < tol
            && self.exchange_error < tol
    }
}

fn max_norm(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn to_dyn2(m: Matrix2<C64>) -> DMatrix<C64> {
    DMatrix::from_iterator(2, 2, m.iter().copied())
}

pub fn toy_report(k: &ToyCoeffs) -> Result<ToyReport, ToyError> {
    let psi = toy_state(k)?;
    let rho = psi.matrix();
    let purity = (rho * rho).trace().re;
    let part = |keep: &[&str]| partial_state(&psi, keep);
    let (rab, ra, rai, rib, rbf, raf, rif) =
        (part(&["A", "B"])?, part(&["A"])?, part(&["A", "I"])?, part(&["I", "B"])?, part(&["B", "F"])?, part(&["A", "F"])?, part(&["I", "F"])?);
    let half = DMatrix::<C64>::identity(2, 2) * C64::new(0.5, 0.0);
    let product_error = max_norm(&(&rab - ra.kronecker(&half)));
    let coh = k.a * k.c.conj() + k.b * k.d.conj();
    let alice_expected = Matrix2::new(C64::new(0.5, 0.0), coh * 0.5, coh.conj() * 0.5, C64::new(0.5, 0.0));
    let alice_error = max_norm(&(&ra - to_dyn2(alice_expected)));
    let proj = |x: C64, y: C64| {
        let u = nalgebra::Vector2::new(x, y);
        u * u.adjoint() * C64::new(0.5, 0.0)
    };
    let ket0 = Matrix2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let ket1 = Matrix2::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let ai_expected: Matrix4<C64> = proj(k.a, k.c).kronecker(&ket0) + proj(k.b, k.d).kronecker(&ket1);
    let alice_interloper_error = max_norm(&(&rai - DMatrix::from_iterator(4, 4, ai_expected.iter().copied())));
    let ib_transpose_error = max_norm(&(partial_transpose(&rib, Subsystem::Second)? - &rib));
    let exchange_error = max_norm(&(&raf - &rab)).max(max_norm(&(&rif - &rib)));
    Ok(ToyReport {
        purity,
        product_error,
        alice_error,
        alice_interloper_error,
        negativity_ib: negativity(&rib, Subsystem::Second)?,
        ib_transpose_error,
        negativity_bf: negativity(&rbf, Subsystem::Second)?,
        negativity_bf_expected: k.bob_field_negativity(),
        exchange_error,
    })
}
