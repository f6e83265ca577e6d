//! Closed-form overlap parameters ζ_ij and ξ_ij.
//!
//! Both are computed from a dimensionless geometric factor of x = |X|/σ and t = T/σ,
//! then scaled by λ̃_iλ̃_j/σ². ξ is odd in T and vanishes at T = 0.

use std::f64::consts::PI;

use crate::quad::{integrate, principal_value, QuadConfig};
use crate::smearing::{ShapeKind, SmearingShape};
use crate::KernelError;

/// One detector's coupling event.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorSpec {
    pub label: String,
    pub position: [f64; 3],
    pub time: f64,
    /// Effective coupling λ̃ (length units).
    pub coupling: f64,
    /// Energy gap Ω (inverse length).
    pub gap: f64,
    pub smearing: SmearingShape,
}

impl DetectorSpec {
    pub fn new(
        label: impl Into<String>,
        position: [f64; 3],
        time: f64,
        coupling: f64,
        gap: f64,
        smearing: SmearingShape,
    ) -> Result<Self, KernelError> {
        let d = Self { label: label.into(), position, time, coupling, gap, smearing };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        let bad = |reason: &str| KernelError::InvalidDetector { label: self.label.clone(), reason: reason.to_string() };
        if self.label.is_empty() {
            return Err(bad("empty label"));
        }
        if !self.position.iter().all(|v| v.is_finite()) || !self.time.is_finite() {
            return Err(bad("non-finite position or time"));
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(bad("coupling must be finite and non-negative"));
        }
        if !(self.gap >= 0.0 && self.gap.is_finite()) {
            return Err(bad("gap must be finite and non-negative"));
        }
        if !(self.smearing.sigma > 0.0 && self.smearing.sigma.is_finite()) {
            return Err(KernelError::InvalidShape { sigma: self.smearing.sigma });
        }
        Ok(())
    }

    /// Spatial distance |x_j − x_i|.
    pub fn distance_to(&self, other: &DetectorSpec) -> f64 {
        let d: Vec<f64> = (0..3).map(|k| other.position[k] - self.position[k]).collect();
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

fn common_shape(i: &DetectorSpec, j: &DetectorSpec) -> Result<SmearingShape, KernelError> {
    if i.smearing != j.smearing {
        return Err(KernelError::MixedShapes { a: i.label.clone(), b: j.label.clone() });
    }
    Ok(i.smearing)
}

fn sign_of(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// sinh(u)/u.
pub(crate) fn sinhc(u: f64) -> f64 {
    if u.abs() < 1e-3 {
        let u2 = u * u;
        1.0 + u2 / 6.0 + u2 * u2 / 120.0
    } else {
        u.sinh() / u
    }
}

/// Geometric factor of ξ: ξ = λ̃_iλ̃_j/σ² · xi_geometric(x, t).
pub fn xi_geometric(kind: ShapeKind, x: f64, t: f64) -> f64 {
    let s = sign_of(t);
    if s == 0.0 {
        return 0.0;
    }
    let (x, t) = (x.abs(), t.abs());
    s * match kind {
        ShapeKind::HardSphere => hard_sphere_xi(x, t),
        ShapeKind::Gaussian => gaussian_xi(x, t),
    }
}

fn hard_sphere_xi(x: f64, t: f64) -> f64 {
    let c = 3.0 * (2.0 * PI).sqrt();
    let a = 0.5 * (x + t);
    let b = 0.5 * (x - t).abs();
    if b >= 1.0 {
        return 0.0;
    }
    if a >= 1.0 {
        // 1/5 − G(b²) with G(ε) = ε − ε^{3/2} + ε^{5/2}/5, factorised.
        let tail = (1.0 - b).powi(3) * (1.0 + 3.0 * b + b * b) / 5.0;
        return c * tail / x;
    }
    // [G(a²) − G(b²)]/x with a − b = min(x, t).
    let ratio = if x <= t { 1.0 } else { t / x };
    let (a2, b2) = (a * a, b * b);
    let poly = (a + b) - (a2 + a * b + b2) + (a2 * a2 + a2 * a * b + a2 * b2 + a * b2 * b + b2 * b2) / 5.0;
    c * ratio * poly
}

fn gaussian_xi(x: f64, t: f64) -> f64 {
    let u = 0.5 * t * x;
    if u < 1.0 {
        t / 2f64.sqrt() * (-(t * t + x * x) / 4.0).exp() * sinhc(u)
    } else {
        let d = (-(t - x) * (t - x) / 4.0).exp() - (-(t + x) * (t + x) / 4.0).exp();
        d / (2f64.sqrt() * x)
    }
}

/// Geometric factor of ζ: ζ = λ̃_iλ̃_j/σ² · zeta_geometric(x, t). Even in t.
pub fn zeta_geometric(kind: ShapeKind, x: f64, t: f64, cfg: &QuadConfig) -> Result<f64, KernelError> {
    let (x, t) = (x.abs(), t.abs());
    match kind {
        ShapeKind::HardSphere => hard_sphere_zeta(x, t, cfg),
        ShapeKind::Gaussian => gaussian_zeta(x, t, cfg),
    }
    .map_err(|source| KernelError::Quadrature { context: "zeta", source })
}

fn hard_sphere_zeta(x: f64, t: f64, cfg: &QuadConfig) -> Result<f64, crate::quad::QuadError> {
    // ∫ρ²g(ρ)∫dμ 1/(ρ² + x² − t² − 2ρxμ), with the μ integral done as a logarithm.
    let integrand = |r: f64| {
        let u = 0.5 * r;
        let g = (1.0 - u) * (1.0 - u) * (2.0 + u);
        // A ± B = (r ± x)² − t², kept in factored form so that A − B never cancels.
        let b = 2.0 * r * x;
        let minus = (r - x - t) * (r - x + t);
        let plus = (r + x - t) * (r + x + t);
        if minus == 0.0 || plus == 0.0 {
            // A node landed exactly on an integrable log singularity.
            return 0.0;
        }
        let inner = if b == 0.0 {
            2.0 / minus
        } else {
            let z = 2.0 * b / minus;
            if z > -1.0 {
                z.ln_1p() / b
            } else {
                (plus.abs() / minus.abs()).ln() / b
            }
        };
        r * r * g * inner
    };
    let breaks = [(x - t).abs(), x + t, t];
    // At x = 0 there is a simple pole at t; for x > 0 it splits into log singularities at
    // t ± x, and pairing about t keeps that near-pole structure balanced.
    let value = if t > 0.0 && t < 2.0 {
        principal_value(integrand, 0.0, 2.0, t, &breaks, cfg)?
    } else {
        integrate(integrand, 0.0, 2.0, &breaks, cfg)?
    };
    Ok(1.5 * (2.0 / PI).sqrt() * value.value)
}

fn gaussian_zeta(x: f64, t: f64, cfg: &QuadConfig) -> Result<f64, crate::quad::QuadError> {
    const REACH: f64 = 14.0;
    let shell = |r: f64| {
        let u = 0.5 * r * x;
        if u < 1.0 {
            (-(r * r + x * x) / 4.0).exp() * 0.5 * r * sinhc(u)
        } else {
            ((-(r - x) * (r - x) / 4.0).exp() - (-(r + x) * (r + x) / 4.0).exp()) / (2.0 * x)
        }
    };
    let integrand = |r: f64| r * shell(r) / ((r - t) * (r + t));
    let lo = (x - REACH).max(0.0);
    let hi = x + REACH;
    let mut breaks: Vec<f64> = (0..=14).map(|k| lo + 2.0 * k as f64).filter(|&p| p < hi).collect();
    breaks.push(x);
    breaks.push(t);
    let value = principal_value(integrand, lo, hi, t, &breaks, cfg)?;
    Ok(2.0 * 2f64.sqrt() / PI * value.value)
}

/// ξ_ij for two detectors of the same shape.
pub fn xi_overlap(i: &DetectorSpec, j: &DetectorSpec) -> Result<f64, KernelError> {
    let shape = common_shape(i, j)?;
    let s = shape.sigma;
    let g = xi_geometric(shape.kind, i.distance_to(j) / s, (j.time - i.time) / s);
    Ok(i.coupling * j.coupling * g / (s * s))
}

/// ζ_ij for two detectors of the same shape, including the self case.
pub fn zeta_overlap(i: &DetectorSpec, j: &DetectorSpec) -> Result<f64, KernelError> {
    zeta_overlap_with(i, j, &QuadConfig::default())
}

pub fn zeta_overlap_with(i: &DetectorSpec, j: &DetectorSpec, cfg: &QuadConfig) -> Result<f64, KernelError> {
    let shape = common_shape(i, j)?;
    let s = shape.sigma;
    let g = zeta_geometric(shape.kind, i.distance_to(j) / s, (j.time - i.time) / s, cfg)?;
    Ok(i.coupling * j.coupling * g / (s * s))
}

/// Self overlap ζ_ii.
pub fn zeta_self(d: &DetectorSpec, cfg: &QuadConfig) -> Result<f64, KernelError> {
    zeta_overlap_with(d, d, cfg)
}

/// Pairwise overlaps for a list of detectors, stored as dense label-indexed tables.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapSet {
    labels: Vec<String>,
    zeta: Vec<f64>,
    xi: Vec<f64>,
}

impl OverlapSet {
    pub fn compute(detectors: &[DetectorSpec], cfg: &QuadConfig) -> Result<Self, KernelError> {
        let n = detectors.len();
        for (k, d) in detectors.iter().enumerate() {
            d.validate()?;
            if detectors[..k].iter().any(|e| e.label == d.label) {
                return Err(KernelError::DuplicateLabel(d.label.clone()));
            }
        }
        let mut zeta = vec![0.0; n * n];
        let mut xi = vec![0.0; n * n];
        for a in 0..n {
            for b in a..n {
                let z = zeta_overlap_with(&detectors[a], &detectors[b], cfg)?;
                zeta[a * n + b] = z;
                zeta[b * n + a] = z;
                if a != b {
                    let x = xi_overlap(&detectors[a], &detectors[b])?;
                    xi[a * n + b] = x;
                    xi[b * n + a] = -x;
                }
            }
        }
        Ok(Self { labels: detectors.iter().map(|d| d.label.clone()).collect(), zeta, xi })
    }

    /// Builds a set from explicit tables (row-major, n × n). ξ must be antisymmetric and ζ symmetric.
    pub fn from_tables(labels: Vec<String>, zeta: Vec<f64>, xi: Vec<f64>) -> Result<Self, KernelError> {
        let n = labels.len();
        if zeta.len() != n * n || xi.len() != n * n {
            return Err(KernelError::Domain { what: "overlap table size", value: zeta.len() as f64 });
        }
        for a in 0..n {
            for b in 0..n {
                if zeta[a * n + b] != zeta[b * n + a] || xi[a * n + b] != -xi[b * n + a] {
                    return Err(KernelError::Domain { what: "overlap table symmetry", value: (a * n + b) as f64 });
                }
            }
        }
        Ok(Self { labels, zeta, xi })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index(&self, label: &str) -> Result<usize, KernelError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| KernelError::UnknownLabel(label.to_string()))
    }

    pub fn zeta(&self, a: &str, b: &str) -> Result<f64, KernelError> {
        Ok(self.zeta_at(self.index(a)?, self.index(b)?))
    }

    pub fn xi(&self, a: &str, b: &str) -> Result<f64, KernelError> {
        Ok(self.xi_at(self.index(a)?, self.index(b)?))
    }

    pub fn zeta_self(&self, a: &str) -> Result<f64, KernelError> {
        self.zeta(a, a)
    }

    pub fn zeta_at(&self, a: usize, b: usize) -> f64 {
        self.zeta[a * self.labels.len() + b]
    }

    pub fn xi_at(&self, a: usize, b: usize) -> f64 {
        self.xi[a * self.labels.len() + b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(x: f64, t: f64, lambda: f64, kind: ShapeKind) -> DetectorSpec {
        DetectorSpec::new("d", [x, 0.0, 0.0], t, lambda, 1.0, SmearingShape::new(kind, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn hard_sphere_self_overlap() {
        let z = zeta_overlap(&det(0.0, 0.0, 1.0, ShapeKind::HardSphere), &det(0.0, 0.0, 1.0, ShapeKind::HardSphere))
            .unwrap();
        assert!((z - 9.0 / (2.0 * PI).sqrt()).abs() < 1e-12, "{z}");
    }

    #[test]
    fn gaussian_self_overlap() {
        let z = zeta_overlap(&det(0.0, 0.0, 1.0, ShapeKind::Gaussian), &det(0.0, 0.0, 1.0, ShapeKind::Gaussian)).unwrap();
        assert!((z - (2.0 / PI).sqrt()).abs() < 1e-10, "{z}");
    }

    #[test]
    fn gaussian_xi_unit_point() {
        let g = xi_geometric(ShapeKind::Gaussian, 1.0, 1.0);
        assert!((g - (1.0 - (-1f64).exp()) / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hard_sphere_xi_vanishes_outside_band() {
        assert_eq!(xi_geometric(ShapeKind::HardSphere, 5.0, 1.0), 0.0);
        assert_eq!(xi_geometric(ShapeKind::HardSphere, 0.0, 2.0), 0.0);
        assert_eq!(xi_geometric(ShapeKind::HardSphere, 1.0, 3.0), 0.0);
    }

    #[test]
    fn hard_sphere_xi_on_axis() {
        // At |X| = 0 the shell average reduces to 4π(F⋆F)(T).
        let t: f64 = 0.8;
        let expect = 3.0 * (2.0 * PI).sqrt() * (t - 0.75 * t * t + t.powi(4) / 16.0);
        assert!((xi_geometric(ShapeKind::HardSphere, 0.0, t) - expect).abs() < 1e-14);
        assert!((xi_geometric(ShapeKind::HardSphere, 1e-9, t) - expect).abs() < 1e-8);
    }

    #[test]
    fn mixed_shapes_rejected() {
        let a = det(0.0, 0.0, 1.0, ShapeKind::Gaussian);
        let b = det(1.0, 1.0, 1.0, ShapeKind::HardSphere);
        assert!(matches!(xi_overlap(&a, &b), Err(KernelError::MixedShapes { .. })));
    }

    #[test]
    fn time_reversal_of_zeta() {
        for kind in [ShapeKind::HardSphere, ShapeKind::Gaussian] {
            let cfg = QuadConfig::default();
            let a = zeta_geometric(kind, 0.7, 1.3, &cfg).unwrap();
            let b = zeta_geometric(kind, 0.7, -1.3, &cfg).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}
