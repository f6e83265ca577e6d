//! Brute-force evaluation of T_ij, independent of the closed forms.
//!
//! Two paths are evaluated:
//!
//! * position space: the convolution F_i ⋆ F_j is computed by nested quadrature and tabulated,
//!   averaged over spherical shells around the separation vector, then integrated against the
//!   principal-value kernel (real part) and sampled on the light-cone shell (imaginary part);
//! * momentum space: the k integral with form factors and an e^{−εk} regulator, evaluated for each
//!   regulator and extrapolated to ε → 0 by Neville's scheme.
//!
//! The extrapolated momentum-space pair is returned; the position-space pair is kept as a cross-check.
//! Shapes of the two detectors may differ here, but such results are flagged as not validated.

use std::f64::consts::PI;

use crate::overlap::DetectorSpec;
use crate::quad::{integrate, principal_value, QuadConfig, WGK, XGK};
use crate::smearing::SmearingShape;
use crate::KernelError;

/// Output of [`overlap_oracle`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub zeta: f64,
    pub xi: f64,
    /// (ζ, ξ) from the position-space path.
    pub position_space: (f64, f64),
    /// (ε, ζ^ε, ξ^ε) for every regulator.
    pub regulated: Vec<(f64, f64, f64)>,
    /// Both detectors share one shape; only then are the closed forms comparable.
    pub validated: bool,
    /// The two paths agree within 1e-5 relative (1e-7 absolute).
    pub paths_agree: bool,
}

/// Regulators used when the caller has no preference: 0.016σ down to 0.002σ.
pub fn default_regulators(sigma: f64) -> Vec<f64> {
    [0.016, 0.008, 0.004, 0.002].iter().map(|e| e * sigma).collect()
}

pub fn overlap_oracle(i: &DetectorSpec, j: &DetectorSpec, regulators: &[f64]) -> Result<OracleReport, KernelError> {
    if regulators.len() < 2 {
        return Err(KernelError::OracleFailure { diagnostics: "need at least two regulators".into() });
    }
    if regulators.iter().any(|e| !(*e > 0.0)) || regulators.windows(2).any(|w| w[1] >= w[0]) {
        return Err(KernelError::OracleFailure {
            diagnostics: format!("regulators must be positive and strictly decreasing: {regulators:?}"),
        });
    }
    let x = i.distance_to(j);
    let t = j.time - i.time;
    let lam = i.coupling * j.coupling;

    let position_space = position_space_pair(&i.smearing, &j.smearing, x, t)?;
    let regulated_raw = regulated_pairs(&i.smearing, &j.smearing, x, t, regulators);

    let eps: Vec<f64> = regulators.to_vec();
    let re: Vec<f64> = regulated_raw.iter().map(|v| v.0).collect();
    let im: Vec<f64> = regulated_raw.iter().map(|v| v.1).collect();
    let re0 = neville_at_zero(&eps, &re);
    let im0 = neville_at_zero(&eps, &im);

    // Residuals must shrink as ε → 0, otherwise the expansion in ε is not trustworthy.
    let resid: Vec<f64> = re.iter().zip(&im).map(|(a, b)| ((a - re0).powi(2) + (b - im0).powi(2)).sqrt()).collect();
    let floor = 1e-12 * (1.0 + re0.abs() + im0.abs());
    for k in 1..resid.len() {
        if resid[k] > resid[k - 1] * (1.0 + 1e-9) + floor {
            return Err(KernelError::OracleFailure {
                diagnostics: format!(
                    "non-monotone extrapolation residuals {resid:?} for regulators {eps:?} (|X| = {x}, T = {t})"
                ),
            });
        }
    }

    let zeta = lam * re0;
    let xi = lam * im0;
    let pz = lam * position_space.0;
    let px = lam * position_space.1;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-7_f64.max(1e-5 * a.abs().max(b.abs()));
    Ok(OracleReport {
        zeta,
        xi,
        position_space: (pz, px),
        regulated: eps.iter().zip(&regulated_raw).map(|(e, v)| (*e, lam * v.0, lam * v.1)).collect(),
        validated: i.smearing == j.smearing,
        paths_agree: close(zeta, pz) && close(xi, px),
    })
}

/// Value at 0 of the interpolating polynomial through (x_k, y_k).
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = p.len();
    for m in 1..n {
        for k in 0..n - m {
            p[k] = (xs[k + m] * p[k] - xs[k] * p[k + 1]) / (xs[k + m] - xs[k]);
        }
    }
    p[0]
}

// ---------------------------------------------------------------------------------------------
// Momentum space

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// Returns (4 Re T^ε, 4 Im T^ε)/(λ̃_iλ̃_j) for each regulator ε.
fn regulated_pairs(si: &SmearingShape, sj: &SmearingShape, x: f64, t: f64, eps: &[f64]) -> Vec<(f64, f64)> {
    use crate::smearing::ShapeKind::Gaussian;
    let mut k_gauss = f64::INFINITY;
    let gauss_var: f64 = [si, sj].iter().filter(|s| s.kind == Gaussian).map(|s| s.sigma * s.sigma).sum();
    if gauss_var > 0.0 {
        k_gauss = (2.0 * 45.0 / gauss_var).sqrt();
    }
    let cutoffs: Vec<f64> = eps.iter().map(|e| (40.0 / e).min(k_gauss)).collect();
    let k_end = cutoffs.iter().cloned().fold(0.0, f64::max);
    let freq = t.abs() + x + si.sigma + sj.sigma;
    let h = PI / freq;
    let base = |k: f64| {
        let amp = k * si.form_factor(k) * sj.form_factor(k) * sinc(k * x);
        (amp * (k * t).cos(), amp * (k * t).sin())
    };

    let mut acc = vec![(0.0_f64, 0.0_f64); eps.len()];
    let n_panels = (k_end / h).ceil() as usize;
    for p in 0..n_panels {
        let a = p as f64 * h;
        let c = a + 0.5 * h;
        let half = 0.5 * h;
        let mut nodes = [(0.0, 1.0); 15];
        for jn in 0..7 {
            nodes[2 * jn] = (c - half * XGK[jn], WGK[jn]);
            nodes[2 * jn + 1] = (c + half * XGK[jn], WGK[jn]);
        }
        nodes[14] = (c, WGK[7]);
        for &(k, w) in &nodes {
            let (br, bi) = base(k);
            for (r, (&e, &kc)) in eps.iter().zip(&cutoffs).enumerate() {
                if a < kc {
                    let damp = (-e * k).exp() * w * half;
                    acc[r].0 += br * damp;
                    acc[r].1 += bi * damp;
                }
            }
        }
    }
    let pref = 4.0 / (2.0 * PI).sqrt();
    acc.into_iter().map(|(r, i)| (pref * r, pref * i)).collect()
}

// ---------------------------------------------------------------------------------------------
// Position space

struct ChebPiece {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl ChebPiece {
    fn fit<F: Fn(f64) -> Result<f64, KernelError>>(f: &F, a: f64, b: f64, n: usize) -> Result<Self, KernelError> {
        let vals: Vec<f64> = (0..n)
            .map(|k| {
                let z = (PI * (k as f64 + 0.5) / n as f64).cos();
                f(0.5 * (a + b) + 0.5 * (b - a) * z)
            })
            .collect::<Result<_, _>>()?;
        let coeffs = (0..n)
            .map(|m| {
                let s: f64 = vals
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * (PI * m as f64 * (k as f64 + 0.5) / n as f64).cos())
                    .sum();
                s * if m == 0 { 1.0 } else { 2.0 } / n as f64
            })
            .collect();
        Ok(Self { a, b, coeffs })
    }

    fn eval(&self, u: f64) -> f64 {
        let z = (2.0 * u - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * z * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        z * b1 - b2 + self.coeffs[0]
    }
}

/// Numerically tabulated (F_i ⋆ F_j)(u) on [0, support], together with Q(u) = ∫_0^u s (F_i ⋆ F_j)(s) ds.
struct ConvolutionTable {
    pieces: Vec<ChebPiece>,
    moments: Vec<ChebPiece>,
    support: f64,
}

impl ConvolutionTable {
    fn build(si: &SmearingShape, sj: &SmearingShape) -> Result<Self, KernelError> {
        const DEGREE: usize = 22;
        let (ri, rj) = (si.support_radius(), sj.support_radius());
        let support = ri + rj;
        let width = si.sigma.min(sj.sigma);
        let mut edges = vec![0.0, support];
        if (ri - rj).abs() > 0.0 {
            edges.push((ri - rj).abs());
        }
        edges.sort_by(f64::total_cmp);
        let mut pieces = Vec::new();
        for w in edges.windows(2) {
            let n_sub = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
            let step = (w[1] - w[0]) / n_sub as f64;
            for s in 0..n_sub {
                let a = w[0] + s as f64 * step;
                let b = if s + 1 == n_sub { w[1] } else { a + step };
                pieces.push(ChebPiece::fit(&|d| numeric_convolution(si, sj, d), a, b, DEGREE)?);
            }
        }
        // s·P(s) is a polynomial on each piece, so one Gauss–Kronrod panel integrates it exactly
        // and Q is again a polynomial: the shell average built from Q is smooth, which the
        // principal-value pairing relies on.
        let mut moments = Vec::with_capacity(pieces.len());
        let mut base = 0.0;
        for p in &pieces {
            let start = base;
            let q = ChebPiece::fit(
                &|u| {
                    let (v, _) = crate::quad::gk15(&|s| s * p.eval(s), p.a, u).map_err(quad_err)?;
                    Ok(start + v)
                },
                p.a,
                p.b,
                DEGREE + 2,
            )?;
            base = start + crate::quad::gk15(&|s| s * p.eval(s), p.a, p.b).map_err(quad_err)?.0;
            moments.push(q);
        }
        Ok(Self { pieces, moments, support })
    }

    fn locate(&self, u: f64) -> usize {
        self.pieces.partition_point(|p| p.b <= u).min(self.pieces.len() - 1)
    }

    fn eval(&self, u: f64) -> f64 {
        if u >= self.support || u < 0.0 {
            return 0.0;
        }
        self.pieces[self.locate(u)].eval(u)
    }

    fn moment(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, self.support);
        self.moments[self.locate(u)].eval(u)
    }

    fn edges(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.a).chain(std::iter::once(self.support)).collect()
    }
}

fn quad_err(source: crate::quad::QuadError) -> KernelError {
    KernelError::Quadrature { context: "oracle", source }
}

/// (F_i ⋆ F_j)(d) by nested radial quadrature of the profiles themselves.
fn numeric_convolution(si: &SmearingShape, sj: &SmearingShape, d: f64) -> Result<f64, KernelError> {
    let cfg = QuadConfig { abs_tol: 1e-18, rel_tol: 1e-12, max_intervals: 2000 };
    let (ri, rj) = (si.support_radius(), sj.support_radius());
    if d < 1e-12 {
        let r = ri.min(rj);
        return integrate(|s| 4.0 * PI * s * s * si.profile(s) * sj.profile(s), 0.0, r, &[], &cfg)
            .map(|e| e.value)
            .map_err(quad_err);
    }
    let inner = |rho: f64| -> f64 {
        let lo = (d - rho).abs();
        let hi = (d + rho).min(rj);
        if lo >= hi {
            return 0.0;
        }
        match integrate(|s| s * sj.profile(s), lo, hi, &[], &cfg) {
            Ok(e) => e.value,
            Err(_) => f64::NAN,
        }
    };
    let breaks = [d - rj, rj - d, d, d + rj];
    let outer = integrate(|rho| rho * si.profile(rho) * inner(rho), 0.0, ri, &breaks, &cfg).map_err(quad_err)?;
    Ok(2.0 * PI / d * outer.value)
}

/// Returns (ζ, ξ)/(λ̃_iλ̃_j) from the position-space path.
fn position_space_pair(si: &SmearingShape, sj: &SmearingShape, x: f64, t: f64) -> Result<(f64, f64), KernelError> {
    let table = ConvolutionTable::build(si, sj)?;
    let edges = table.edges();
    let s_max = table.support;
    let cfg = QuadConfig { abs_tol: 1e-16, rel_tol: 1e-11, max_intervals: 4000 };
    let near_axis = x < 1e-7 * si.sigma.min(sj.sigma);

    // Shell average A(r) = ∫dΩ (F⋆F)(|r n + X|) = 2π/(r|X|) ∫_{|r−|X||}^{r+|X|} u (F⋆F)(u) du.
    let shell = |r: f64| -> f64 {
        if near_axis {
            return 4.0 * PI * table.eval(r);
        }
        if r == 0.0 {
            return 4.0 * PI * table.eval(x);
        }
        let lo = (r - x).abs();
        if lo >= s_max {
            return 0.0;
        }
        2.0 * PI / (r * x) * (table.moment(r + x) - table.moment(lo))
    };

    let tt = t.abs();
    let r_end = x + s_max;
    let mut breaks: Vec<f64> = Vec::new();
    for &e in &edges {
        breaks.push((x - e).abs());
        breaks.push(x + e);
    }
    breaks.push(x);
    let pv = principal_value(|r| r * r * shell(r) / ((r - tt) * (r + tt)), 0.0, r_end, tt, &breaks, &cfg)
        .map_err(quad_err)?;
    let zeta = 2.0 * (2.0 / PI).sqrt() * pv.value;
    let sign = if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    };
    let xi = if sign == 0.0 { 0.0 } else { (2.0 * PI).sqrt() * sign * tt * shell(tt) };
    if !zeta.is_finite() || !xi.is_finite() {
        return Err(KernelError::OracleFailure { diagnostics: format!("non-finite position-space result at |X| = {x}, T = {t}") });
    }
    Ok((zeta, xi))
}
