use std::sync::OnceLock;

use udw_kernel::{xi_geometric, ShapeKind, SmearingShape};

use crate::SabotageError;

/// Location and value of the largest ξ_IB over (|X|, T) ∈ [0, 4σ]².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiMaximum {
    pub x: f64,
    pub t: f64,
    pub xi: f64,
    /// False if the alternating refinement hit its round limit.
    pub converged: bool,
}

const GRID: usize = 160;
const EXTENT: f64 = 4.0;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // Endpoints matter when the maximum sits on the boundary.
    [(a, f(a)), (b, f(b)), (c, fc), (d, fd)]
        .into_iter()
        .fold((a, f64::NEG_INFINITY), |best, p| if p.1 > best.1 { p } else { best })
}

fn cached_geometric(kind: ShapeKind) -> XiMaximum {
    static HS: OnceLock<XiMaximum> = OnceLock::new();
    static GAUSS: OnceLock<XiMaximum> = OnceLock::new();
    match kind {
        ShapeKind::HardSphere => *HS.get_or_init(|| max_geometric(kind)),
        ShapeKind::Gaussian => *GAUSS.get_or_init(|| max_geometric(kind)),
    }
}

/// Maximises the dimensionless factor 𝓘(x, t) = ξ σ²/(λ̃_I λ̃_B) on [0, 4]²: grid, then
/// alternating golden-section searches until the point stops moving.
fn max_geometric(kind: ShapeKind) -> XiMaximum {
    let f = |x: f64, t: f64| xi_geometric(kind, x, t);
    let h = EXTENT / GRID as f64;
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..=GRID {
        for j in 0..=GRID {
            let (x, t) = (i as f64 * h, j as f64 * h);
            let v = f(x, t);
            if v > best.2 {
                best = (x, t, v);
            }
        }
    }
    let (mut x, mut t, mut v) = best;
    let mut width = 2.0 * h;
    for _ in 0..200 {
        let (nx, _) = golden_max(|s| f(s, t), (x - width).max(0.0), (x + width).min(EXTENT), 1e-13);
        let (nt, nv) = golden_max(|s| f(nx, s), (t - width).max(0.0), (t + width).min(EXTENT), 1e-13);
        let moved = (nx - x).abs().max((nt - t).abs());
        let gain = nv - v;
        if nv >= v {
            x = nx;
            t = nt;
            v = nv;
        }
        width = (4.0 * moved).max(1e-6).min(2.0 * h);
        // A flat maximum pins the point only to ~√ε; stop once the value no longer improves.
        if moved < 1e-12 || gain <= 1e-15 * v.abs() {
            return XiMaximum { x, t, xi: v, converged: true };
        }
    }
    XiMaximum { x, t, xi: v, converged: false }
}

fn check(l: f64) -> Result<(), SabotageError> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(SabotageError::Coupling(l))
    }
}

/// Global maximum of ξ_IB for the given couplings, with its location in length units.
pub fn max_xi(shape: &SmearingShape, lambda_i: f64, lambda_b: f64) -> Result<XiMaximum, SabotageError> {
    check(lambda_i)?;
    check(lambda_b)?;
    let g = cached_geometric(shape.kind);
    let s = shape.sigma;
    Ok(XiMaximum { x: g.x * s, t: g.t * s, xi: lambda_i * lambda_b * g.xi / (s * s), converged: g.converged })
}

/// Maximum of ξ_IB restricted to the null diagonal |X| = T.
pub fn max_xi_on_null_line(shape: &SmearingShape, lambda_i: f64, lambda_b: f64) -> Result<XiMaximum, SabotageError> {
    check(lambda_i)?;
    check(lambda_b)?;
    let f = |u: f64| xi_geometric(shape.kind, u, u);
    let h = EXTENT / GRID as f64;
    let start = (0..=GRID).map(|i| i as f64 * h).fold(0.0, |b: f64, u| if f(u) > f(b) { u } else { b });
    let (u, v) = golden_max(f, (start - h).max(0.0), (start + h).min(EXTENT), 1e-13);
    let s = shape.sigma;
    Ok(XiMaximum { x: u * s, t: u * s, xi: lambda_i * lambda_b * v / (s * s), converged: true })
}

/// Smallest λ̃_I for which ξ_IB reaches π/2 somewhere: (π/2) σ² / (𝓘_max λ̃_B).
pub fn threshold_coupling(shape: &SmearingShape, lambda_b: f64) -> Result<f64, SabotageError> {
    check(lambda_b)?;
    let g = cached_geometric(shape.kind);
    Ok(std::f64::consts::FRAC_PI_2 * shape.sigma * shape.sigma / (g.xi * lambda_b))
}
