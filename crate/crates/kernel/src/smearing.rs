//! Smearing profiles and their self-convolutions.

use std::f64::consts::PI;

use crate::KernelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    HardSphere,
    Gaussian,
}

impl ShapeKind {
    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::HardSphere => "hard_sphere",
            ShapeKind::Gaussian => "gaussian",
        }
    }
}

/// An L¹-normalised spherically symmetric smearing profile.
///
/// `sigma` is the radius of the hard sphere or the standard deviation of the Gaussian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmearingShape {
    pub kind: ShapeKind,
    pub sigma: f64,
}

impl SmearingShape {
    pub fn new(kind: ShapeKind, sigma: f64) -> Result<Self, KernelError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(KernelError::InvalidShape { sigma });
        }
        Ok(Self { kind, sigma })
    }

    pub fn hard_sphere(sigma: f64) -> Result<Self, KernelError> {
        Self::new(ShapeKind::HardSphere, sigma)
    }

    pub fn gaussian(sigma: f64) -> Result<Self, KernelError> {
        Self::new(ShapeKind::Gaussian, sigma)
    }

    /// F(r).
    pub fn profile(&self, r: f64) -> f64 {
        let s = self.sigma;
        match self.kind {
            ShapeKind::HardSphere => {
                if r <= s {
                    3.0 / (4.0 * PI * s * s * s)
                } else {
                    0.0
                }
            }
            ShapeKind::Gaussian => (2.0 * PI * s * s).powf(-1.5) * (-r * r / (2.0 * s * s)).exp(),
        }
    }

    /// Fourier transform of F normalised to 1 at k = 0.
    pub fn form_factor(&self, k: f64) -> f64 {
        let x = k * self.sigma;
        match self.kind {
            ShapeKind::HardSphere => {
                if x.abs() < 5e-2 {
                    let x2 = x * x;
                    1.0 - x2 / 10.0 + x2 * x2 / 280.0 - x2 * x2 * x2 / 15120.0
                } else {
                    3.0 * (x.sin() - x * x.cos()) / (x * x * x)
                }
            }
            ShapeKind::Gaussian => (-0.5 * x * x).exp(),
        }
    }

    /// Radius beyond which the profile is zero or below double precision relevance.
    pub fn support_radius(&self) -> f64 {
        match self.kind {
            ShapeKind::HardSphere => self.sigma,
            ShapeKind::Gaussian => 10.0 * self.sigma,
        }
    }
}

/// (F ⋆ F)(r) for a single shape, in closed form.
pub fn convolved_profile(shape: &SmearingShape, r: f64) -> Result<f64, KernelError> {
    if !(r >= 0.0) {
        return Err(KernelError::Domain { what: "convolution radius", value: r });
    }
    let s = shape.sigma;
    Ok(match shape.kind {
        ShapeKind::HardSphere => {
            if r >= 2.0 * s {
                0.0
            } else {
                let u = r / (2.0 * s);
                3.0 / (8.0 * PI * s * s * s) * (1.0 - u) * (1.0 - u) * (2.0 + u)
            }
        }
        ShapeKind::Gaussian => (4.0 * PI * s * s).powf(-1.5) * (-r * r / (4.0 * s * s)).exp(),
    })
}
