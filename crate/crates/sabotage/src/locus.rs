use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use udw_kernel::{xi_geometric, SmearingShape};

use crate::maximum::max_xi;
use crate::SabotageError;

/// Scan rectangle [0, extent·σ]² with nx × nt cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocusGrid {
    pub nx: usize,
    pub nt: usize,
    pub extent_sigmas: f64,
}

impl Default for LocusGrid {
    fn default() -> Self {
        Self { nx: 256, nt: 256, extent_sigmas: 4.0 }
    }
}

/// Boundary points of {ξ_IB ≥ target} in the (|X|, T) plane, T > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SabotageLocus {
    pub points: Vec<(f64, f64)>,
    pub target: f64,
    pub residuals: Vec<f64>,
}

impl SabotageLocus {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Bisects a sign change of g on [a, b] down to adjacent doubles.
fn bisect<F: Fn(f64) -> f64>(g: F, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    if g(a).abs() <= g(b).abs() {
        a
    } else {
        b
    }
}

fn roots_along<F: Fn(f64) -> f64 + Copy>(g: F, nodes: &[f64]) -> Vec<f64> {
    let vals: Vec<f64> = nodes.iter().map(|&u| g(u)).collect();
    let mut out = Vec::new();
    for k in 0..nodes.len() {
        if vals[k] == 0.0 {
            out.push(nodes[k]);
        } else if k + 1 < nodes.len() && vals[k + 1] != 0.0 && (vals[k] > 0.0) != (vals[k + 1] > 0.0) {
            out.push(bisect(g, nodes[k], nodes[k + 1]));
        }
    }
    out
}

/// Row and column scans of ξ_IB − target, plus the row and column through the maximum so that
/// super-level sets smaller than a grid cell are still found.
pub fn sabotage_locus(
    shape: &SmearingShape,
    lambda_i: f64,
    lambda_b: f64,
    grid: &LocusGrid,
    target: f64,
) -> Result<SabotageLocus, SabotageError> {
    if grid.nx < 2 || grid.nt < 2 || !(grid.extent_sigmas > 0.0) {
        return Err(SabotageError::Grid);
    }
    let peak = max_xi(shape, lambda_i, lambda_b)?;
    let s = shape.sigma;
    let scale = lambda_i * lambda_b / (s * s);
    let xi = move |x: f64, t: f64| scale * xi_geometric(shape.kind, x / s, t / s);
    let empty = SabotageLocus { points: Vec::new(), target, residuals: Vec::new() };
    if peak.xi < target {
        return Ok(empty);
    }
    let extent = grid.extent_sigmas * s;
    let xs: Vec<f64> = (0..=grid.nx).map(|i| extent * i as f64 / grid.nx as f64).collect();
    let ts: Vec<f64> = (1..=grid.nt).map(|j| extent * j as f64 / grid.nt as f64).collect();

    let mut rows: Vec<(f64, f64)> = ts
        .par_iter()
        .flat_map_iter(|&t| roots_along(move |x| xi(x, t) - target, &xs).into_iter().map(move |x| (x, t)))
        .collect();
    let cols: Vec<(f64, f64)> = xs
        .par_iter()
        .flat_map_iter(|&x| roots_along(move |t| xi(x, t) - target, &ts).into_iter().map(move |t| (x, t)))
        .collect();
    rows.extend(cols);
    if peak.t > 0.0 {
        let mut through_x = xs.clone();
        through_x.push(peak.x);
        through_x.sort_by(f64::total_cmp);
        rows.extend(roots_along(|x| xi(x, peak.t) - target, &through_x).into_iter().map(|x| (x, peak.t)));
        let mut through_t = ts.clone();
        through_t.push(peak.t);
        through_t.sort_by(f64::total_cmp);
        rows.extend(roots_along(|t| xi(peak.x, t) - target, &through_t).into_iter().map(|t| (peak.x, t)));
    }

    rows.retain(|p| p.1 > 0.0);
    rows.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    let tol = 1e-12 * extent;
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(rows.len());
    for p in rows {
        if !points.iter().rev().take(8).any(|q| (q.0 - p.0).abs() <= tol && (q.1 - p.1).abs() <= tol) {
            points.push(p);
        }
    }
    let residuals = points.iter().map(|&(x, t)| (xi(x, t) - target).abs()).collect();
    Ok(SabotageLocus { points, target, residuals })
}

/// Convenience form with the first odd multiple π/2 and the default grid.
pub fn default_locus(shape: &SmearingShape, lambda_i: f64, lambda_b: f64) -> Result<SabotageLocus, SabotageError> {
    sabotage_locus(shape, lambda_i, lambda_b, &LocusGrid::default(), FRAC_PI_2)
}

/// Whether an interloper on the sphere of radius |X_IB| around Bob can be causally linked to Alice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AliceContact {
    Never,
    Sometimes,
    Always,
}

impl AliceContact {
    pub fn name(self) -> &'static str {
        match self {
            AliceContact::Never => "never",
            AliceContact::Sometimes => "sometimes",
            AliceContact::Always => "always",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocusAnnotation {
    /// t_I ≥ t_A, i.e. the interloper enters the pair parameters.
    pub after_alice: bool,
    /// Overlap of the interloper's and Alice's null bands over all placements on the sphere.
    pub contact: AliceContact,
}

/// Annotates locus points relative to Alice at separation `alice_separation` and delay
/// `alice_delay` = t_B − t_A from Bob.
pub fn annotate_locus(
    locus: &SabotageLocus,
    shape: &SmearingShape,
    alice_separation: f64,
    alice_delay: f64,
) -> Vec<LocusAnnotation> {
    let band = 2.0 * shape.support_radius();
    locus
        .points
        .iter()
        .map(|&(x_ib, t_ib)| {
            let t_ia = alice_delay - t_ib;
            let (dmin, dmax) = ((alice_separation - x_ib).abs(), alice_separation + x_ib);
            let (lo, hi) = (t_ia.abs() - band, t_ia.abs() + band);
            let contact = if dmax <= lo || dmin >= hi {
                AliceContact::Never
            } else if dmin > lo && dmax < hi {
                AliceContact::Always
            } else {
                AliceContact::Sometimes
            };
            LocusAnnotation { after_alice: t_ia >= 0.0, contact }
        })
        .collect()
}
