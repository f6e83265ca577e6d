use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4};
use rayon::prelude::*;
use udw_state::{build_pair_state, partial_state, to_energy_basis, Basis, PairParams, StateError, TwoQubitState, C64};

use crate::entropy::{binary_entropy, entropy, mutual_information, mutual_information_of};
use crate::MeasureError;

/// Conditions under which the X-state C formula is known to be optimal, evaluated on the
/// real-ified energy-basis matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscordValidity {
    pub cond1: bool,
    pub cond2: bool,
    /// |√(σ₁₁σ₄₄) − √(σ₂₂σ₃₃)| − 2|σ₂₃|; condition 2 holds iff this is ≤ 0.
    pub f_value: f64,
    /// 4|σ₂₃|² − (σ₁₁ − σ₂₂)(σ₄₄ − σ₃₃); condition 1 holds iff this is ≤ 0.
    pub cond1_gap: f64,
    /// The matrix after the local phase rotation that makes σ₂₃ real and non-negative.
    pub realified: Matrix4<C64>,
}

/// Which qubit of the pair is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasuredSide {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleOutcome {
    pub c: f64,
    pub discord: f64,
    pub mutual_information: f64,
    /// Minimal average conditional entropy found.
    pub conditional_entropy: f64,
    /// (t, y₁, y₂, y₃) of the best SU(2) rotation.
    pub rotation: [f64; 4],
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HvOutcome {
    pub c: f64,
    pub fallback_used: bool,
    pub validity: DiscordValidity,
}

const X_TOL: f64 = 1e-10;

pub fn discord_validity(s: &TwoQubitState) -> Result<DiscordValidity, MeasureError> {
    if s.basis() != Basis::EnergyBasis {
        return Err(StateError::WrongBasis { expected: Basis::EnergyBasis }.into());
    }
    let m = s.matrix();
    let deviation = [(0, 1), (0, 2), (1, 3), (2, 3)]
        .iter()
        .map(|&(r, c)| m[(r, c)].norm().max(m[(c, r)].norm()))
        .fold(0.0, f64::max);
    if deviation > X_TOL {
        return Err(MeasureError::NotXState { deviation });
    }
    let s23 = m[(1, 2)];
    let u = if s23.norm() > 0.0 { s23.conj() / s23.norm() } else { C64::new(1.0, 0.0) };
    let d = [u, u, C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
    let realified = Matrix4::from_fn(|r, c| d[r] * m[(r, c)] * d[c].conj());
    let diag = |k: usize| realified[(k, k)].re;
    let (s11, s22, s33, s44) = (diag(0), diag(1), diag(2), diag(3));
    let a23 = s23.norm();
    let cond1_gap = 4.0 * a23 * a23 - (s11 - s22) * (s44 - s33);
    let f_value = ((s11 * s44).max(0.0).sqrt() - (s22 * s33).max(0.0).sqrt()).abs() - 2.0 * a23;
    Ok(DiscordValidity { cond1: cond1_gap <= 0.0, cond2: f_value <= 0.0, f_value, cond1_gap, realified })
}

/// Closed-form C for identical detectors in the vacuum, measuring Alice.
pub fn henderson_vedral_c_closed(p: &PairParams) -> Result<f64, MeasureError> {
    if !p.is_identical() {
        return Err(MeasureError::ClosedFormUnavailable("equal self overlaps"));
    }
    if !p.is_vacuum() {
        return Err(MeasureError::ClosedFormUnavailable("vacuum field phases"));
    }
    p.validate()?;
    let pi = p.attenuation();
    let e = (-p.zeta / 2.0).exp();
    let (cx, ch, sh) = (p.xi_ab.cos(), p.zeta_ab.cosh(), p.zeta_ab.sinh());
    let s_b = binary_entropy(e * cx * pi);
    let p0 = (1.0 - e) / 2.0;
    let p1 = (1.0 + e) / 2.0;
    let weighted = |pk: f64, num: f64| if pk > 0.0 { pk * binary_entropy(e * num * pi / (2.0 * pk)) } else { 0.0 };
    let axial = weighted(p0, cx - e * ch) + weighted(p1, cx + e * ch);
    let transverse = binary_entropy(e * (1.0 + e * e * sh * sh).sqrt() * pi);
    Ok(s_b - axial.min(transverse))
}

/// C with the validity check; falls back to the measurement oracle when neither condition holds.
pub fn henderson_vedral_c(p: &PairParams) -> Result<HvOutcome, MeasureError> {
    let s = build_pair_state(p)?;
    let validity = discord_validity(&to_energy_basis(&s, 0.0, 0.0)?)?;
    if validity.cond1 || validity.cond2 {
        Ok(HvOutcome { c: henderson_vedral_c_closed(p)?, fallback_used: false, validity })
    } else {
        let o = discord_oracle(&s, 24, MeasuredSide::First)?;
        Ok(HvOutcome { c: o.c, fallback_used: true, validity })
    }
}

/// I − C, floored at the −1e−9 reporting threshold.
pub fn quantum_discord(p: &PairParams) -> Result<f64, MeasureError> {
    let mi = mutual_information(p)?;
    let c = henderson_vedral_c(p)?.c;
    Ok((mi - c).max(-1e-9))
}

fn rotation(angles: [f64; 3]) -> [f64; 4] {
    let [psi, theta, phi] = angles;
    [
        psi.cos(),
        psi.sin() * theta.cos(),
        psi.sin() * theta.sin() * phi.cos(),
        psi.sin() * theta.sin() * phi.sin(),
    ]
}

/// Average conditional entropy of the unmeasured qubit after projecting onto V|0⟩, V|1⟩.
fn conditional_entropy(rho: &Matrix4<C64>, side: MeasuredSide, v: [f64; 4]) -> f64 {
    let [t, y1, y2, y3] = v;
    let i = C64::new(0.0, 1.0);
    let vm = Matrix2::new(
        C64::new(t, 0.0) + i * y3,
        i * y1 + C64::new(y2, 0.0),
        i * y1 - C64::new(y2, 0.0),
        C64::new(t, 0.0) - i * y3,
    );
    let mut total = 0.0;
    for k in 0..2 {
        let vk = [vm[(0, k)], vm[(1, k)]];
        // Conditional (unnormalised) 2×2 block of the other qubit.
        let mut blk = Matrix2::<C64>::zeros();
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for x in 0..2 {
                    for y in 0..2 {
                        let (r, c) = match side {
                            MeasuredSide::First => (2 * x + a, 2 * y + b),
                            MeasuredSide::Second => (2 * a + x, 2 * b + y),
                        };
                        acc += vk[x].conj() * rho[(r, c)] * vk[y];
                    }
                }
                blk[(a, b)] = acc;
            }
        }
        let pk = (blk[(0, 0)] + blk[(1, 1)]).re;
        if pk <= 0.0 {
            continue;
        }
        let len = ((blk[(0, 0)] - blk[(1, 1)]).re.powi(2) + 4.0 * blk[(0, 1)].norm_sqr()).sqrt() / pk;
        total += pk * binary_entropy(len);
    }
    total
}

/// Brute-force C and discord over von Neumann measurements V|k⟩, V = t𝟙 + i y·σ ∈ SU(2).
///
/// A resolution³ grid on hyperspherical angles of (t, y) is followed by coordinate descent with
/// step halving down to 1e−7 rad.
pub fn discord_oracle(
    s: &TwoQubitState,
    resolution: usize,
    side: MeasuredSide,
) -> Result<OracleOutcome, MeasureError> {
    if resolution < 16 {
        return Err(MeasureError::Resolution(resolution));
    }
    let rho = *s.matrix();
    let eval = |a: [f64; 3]| conditional_entropy(&rho, side, rotation(a));
    let n = resolution;
    let step0 = PI / n as f64;
    let angles = |k: usize| {
        let (i, j, l) = (k / (n * n), (k / n) % n, k % n);
        [i as f64 * step0, j as f64 * step0, l as f64 * 2.0 * step0]
    };
    let values: Vec<f64> = (0..n * n * n).into_par_iter().map(|k| eval(angles(k))).collect();
    let (best_k, mut best) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bk, bv), (k, &v)| if v < bv { (k, v) } else { (bk, bv) });
    let mut x = angles(best_k);
    let mut step = step0;
    let mut evaluations = 0usize;
    let mut converged = true;
    while step >= 1e-7 {
        let mut improved = false;
        for d in 0..3 {
            for sign in [1.0, -1.0] {
                let mut y = x;
                y[d] += sign * step;
                let v = eval(y);
                evaluations += 1;
                if v < best {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
        if evaluations > 200_000 {
            converged = false;
            break;
        }
    }
    let [a, b] = s.labels();
    let other = match side {
        MeasuredSide::First => b,
        MeasuredSide::Second => a,
    };
    let s_other = entropy(&partial_state(s, &[other])?)?;
    let mi = mutual_information_of(s)?;
    let c = s_other - best;
    Ok(OracleOutcome { c, discord: mi - c, mutual_information: mi, conditional_entropy: best, rotation: rotation(x), converged })
}
