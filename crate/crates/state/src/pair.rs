use nalgebra::Matrix4;

use crate::basis::TwoQubitState;
use crate::linalg::C64;
use crate::StateError;

/// Scalar parameters of the reduced Alice–Bob state.
///
/// `zeta` is Alice's self overlap and `zeta_b` Bob's; for identical targets they coincide.
/// `xi_jb` holds ξ_jB for every interloper coupling between t_A and t_B.
#[derive(Clone, Debug, PartialEq)]
pub struct PairParams {
    pub zeta: f64,
    pub zeta_b: f64,
    pub zeta_ab: f64,
    pub xi_ab: f64,
    pub xi_0a: f64,
    pub xi_0b: f64,
    pub xi_jb: Vec<f64>,
}

impl PairParams {
    /// Identical targets (ζ_A = ζ_B = ζ), vacuum field, no interlopers.
    pub fn identical(zeta: f64, zeta_ab: f64, xi_ab: f64) -> Self {
        Self { zeta, zeta_b: zeta, zeta_ab, xi_ab, xi_0a: 0.0, xi_0b: 0.0, xi_jb: Vec::new() }
    }

    pub fn with_interlopers(mut self, xi_jb: Vec<f64>) -> Self {
        self.xi_jb = xi_jb;
        self
    }

    pub fn with_phases(mut self, xi_0a: f64, xi_0b: f64) -> Self {
        self.xi_0a = xi_0a;
        self.xi_0b = xi_0b;
        self
    }

    /// Π_j cos ξ_jB.
    pub fn attenuation(&self) -> f64 {
        swarm_attenuation(&self.xi_jb)
    }

    pub fn is_vacuum(&self) -> bool {
        self.xi_0a == 0.0 && self.xi_0b == 0.0
    }

    pub fn is_identical(&self) -> bool {
        self.zeta == self.zeta_b
    }

    pub fn validate(&self) -> Result<(), StateError> {
        let all = [self.zeta, self.zeta_b, self.zeta_ab, self.xi_ab, self.xi_0a, self.xi_0b];
        if all.iter().chain(&self.xi_jb).any(|v| !v.is_finite()) {
            return Err(StateError::InvalidState("non-finite pair parameter".into()));
        }
        if self.zeta < 0.0 || self.zeta_b < 0.0 {
            return Err(StateError::InvalidState("self overlaps must be non-negative".into()));
        }
        Ok(())
    }
}

/// Π_j cos ξ_j.
pub fn swarm_attenuation(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x.cos()).product()
}

/// The reduced pair state in the S basis, ordered (Alice, Bob).
pub fn build_pair_state(p: &PairParams) -> Result<TwoQubitState, StateError> {
    p.validate()?;
    let pi = p.attenuation();
    let (za, zb) = (p.zeta, p.zeta_b);
    let q = 0.25;
    let e = |re: f64, im: f64, scale: f64| C64::from_polar(q * scale * re.exp(), im);
    let r12 = e(-zb / 2.0, -p.xi_0b + p.xi_ab, pi);
    let r13 = e(-za / 2.0, -p.xi_0a, 1.0);
    let r14 = e(-(za + zb) / 2.0 - p.zeta_ab, -p.xi_0a - p.xi_0b, pi);
    let r23 = e(-(za + zb) / 2.0 + p.zeta_ab, p.xi_0b - p.xi_0a, pi);
    let r24 = r13;
    let r34 = e(-zb / 2.0, -p.xi_0b - p.xi_ab, pi);
    let d = C64::new(q, 0.0);
    #[rustfmt::skip]
    let m = Matrix4::new(
        d,          r12,        r13,        r14,
        r12.conj(), d,          r23,        r24,
        r13.conj(), r23.conj(), d,          r34,
        r14.conj(), r24.conj(), r34.conj(), d,
    );
    TwoQubitState::from_s_basis_with(m, 1e-8)
}
