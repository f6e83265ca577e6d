//! Figure presets. Every preset fixes σ = 1, Ω = 1/σ and its couplings, and records them in the
//! CSV comment header.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use udw_kernel::{xi_geometric, xi_overlap, zeta_overlap, DetectorSpec, OverlapSet, QuadConfig, ShapeKind, SmearingShape};
use udw_measures::{correlation_report, direct_correlator, CorrelationReport, ObservableCoeffs};
use udw_sabotage::default_locus;
use udw_state::{pair_state_closed, PairParams};

use crate::table::{Cell, Table};
use crate::CliError;

pub const FIGURE_NAMES: [&str; 8] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

/// |X| and T grid of the correlation maps: |X| ∈ [2, 10], T ∈ [0.25, 10], step σ/4.
pub fn map_grid() -> (Vec<f64>, Vec<f64>) {
    let xs = (0..33).map(|k| 2.0 + 0.25 * k as f64).collect();
    let ts = (0..40).map(|k| 0.25 + 0.25 * k as f64).collect();
    (xs, ts)
}

/// (|X|, T) pairs of the coupling-strength sweep: timelike, partly lightlike, spacelike.
pub const STRENGTH_GEOMETRIES: [(f64, f64); 3] = [(0.0, 5.0), (5.0, 5.0), (10.0, 5.0)];

/// λ̃² ∈ [0, 100] in steps of 0.1.
pub fn strength_grid() -> Vec<f64> {
    (0..=1000).map(|k| k as f64 / 10.0).collect()
}

/// Interloper positions along the Alice–Bob axis, x_I ∈ [−5, 15] in steps of 0.05.
pub fn theft_grid() -> Vec<f64> {
    (0..=400).map(|k| -5.0 + 0.05 * k as f64).collect()
}

pub const THEFT_T_I: f64 = 2.5;
pub const THEFT_T_B: f64 = 5.0;
pub const THEFT_X_B: f64 = 10.0;
pub const THEFT_LAMBDA_AB: f64 = 1.3;
pub const THEFT_LAMBDA_I: f64 = 2.0;

fn shape(kind: ShapeKind) -> SmearingShape {
    SmearingShape { kind, sigma: 1.0 }
}

fn detector(label: &str, x: f64, t: f64, lambda: f64, kind: ShapeKind) -> DetectorSpec {
    DetectorSpec { label: label.into(), position: [x, 0.0, 0.0], time: t, coupling: lambda, gap: 1.0, smearing: shape(kind) }
}

/// Alice at the origin at t = 0 and Bob at (|X|, 0, 0) at time T, no interlopers, vacuum field.
pub fn vacuum_pair(kind: ShapeKind, lambda: f64, x: f64, t: f64) -> Result<PairParams, CliError> {
    let a = detector("A", 0.0, 0.0, lambda, kind);
    let b = detector("B", x, t, lambda, kind);
    Ok(PairParams::identical(zeta_overlap(&a, &a)?, zeta_overlap(&a, &b)?, xi_overlap(&a, &b)?))
}

fn measure_cells(p: &PairParams, r: &CorrelationReport) -> Vec<Cell> {
    let v = r.validity.as_ref();
    vec![
        Cell::Num(p.zeta),
        Cell::Num(p.zeta_ab),
        Cell::Num(p.xi_ab),
        Cell::Num(r.energy),
        Cell::Num(r.mutual_information),
        Cell::Num(r.c_function),
        Cell::Num(r.discord),
        v.map_or(Cell::Text(String::new()), |v| Cell::Num(v.f_value)),
        v.map_or(Cell::Text(String::new()), |v| Cell::Flag(v.cond2)),
    ]
}

const MEASURE_COLUMNS: [&str; 9] = ["zeta", "zeta_ab", "xi_ab", "energy", "mi", "c", "discord", "f_value", "cond2"];

fn header(lead: &[&str], rest: &[&str]) -> Vec<String> {
    lead.iter().chain(rest).map(|s| s.to_string()).collect()
}

fn collect_rows(rows: Vec<Result<Vec<Cell>, CliError>>) -> Result<Vec<Vec<Cell>>, CliError> {
    rows.into_iter().collect()
}

fn xi_surface(kind: ShapeKind, name: &str) -> Result<Vec<(String, Table)>, CliError> {
    let lambda = 2.0;
    let axis: Vec<f64> = (0..=80).map(|k| 0.05 * k as f64).collect();
    let mut surface = Table::new(header(&["x", "t", "xi_ib"], &[]))
        .comment(format!("preset = {name}: xi_IB over (|X|, T) = (|x_B - x_I|, t_B - t_I)"))
        .comment(format!("smearing = {}, sigma = 1", kind.name()))
        .comment(format!("lambda_I = lambda_B = {lambda}"));
    for &x in &axis {
        for &t in &axis {
            surface.rows.push(vec![Cell::Num(x), Cell::Num(t), Cell::Num(lambda * lambda * xi_geometric(kind, x, t))]);
        }
    }
    let locus = default_locus(&shape(kind), lambda, lambda)?;
    let mut contour = Table::new(header(&["x", "t", "xi_ib", "residual"], &[]))
        .comment(format!("preset = {name}: points with xi_IB = pi/2"))
        .comment(format!("smearing = {}, sigma = 1", kind.name()))
        .comment(format!("lambda_I = lambda_B = {lambda}; scan 256 x 256 on [0, 4]^2 with bisection"));
    for (&(x, t), &res) in locus.points.iter().zip(&locus.residuals) {
        contour.rows.push(vec![
            Cell::Num(x),
            Cell::Num(t),
            Cell::Num(lambda * lambda * xi_geometric(kind, x, t)),
            Cell::Num(res),
        ]);
    }
    Ok(vec![(format!("{name}_xi_surface.csv"), surface), (format!("{name}_locus.csv"), contour)])
}

/// Measures over the (|X|, T) grid for one shape.
pub fn correlation_map(kind: ShapeKind) -> Result<Table, CliError> {
    let (xs, ts) = map_grid();
    let points: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ts.iter().map(move |&t| (x, t))).collect();
    let rows = points
        .par_iter()
        .map(|&(x, t)| {
            let p = vacuum_pair(kind, 1.0, x, t)?;
            let r = correlation_report(&p, 1.0, 1.0)?;
            Ok([Cell::Num(x), Cell::Num(t)].into_iter().chain(measure_cells(&p, &r)).collect())
        })
        .collect();
    let mut t = Table::new(header(&["x", "t"], &MEASURE_COLUMNS))
        .comment("A at the origin at t = 0, B at distance |X| at time T, vacuum field, no interlopers")
        .comment(format!("smearing = {}, sigma = 1, lambda_A = lambda_B = 1, Omega_A = Omega_B = 1", kind.name()))
        .comment("grid |X| = 2, 2.25, ..., 10; T = 0.25, 0.5, ..., 10");
    t.rows = collect_rows(rows)?;
    Ok(t)
}

/// Measures against λ̃² for the three geometries (hard sphere).
pub fn strength_sweep() -> Result<Table, CliError> {
    let lam2 = strength_grid();
    let points: Vec<(f64, f64, f64)> =
        STRENGTH_GEOMETRIES.iter().flat_map(|&(x, t)| lam2.iter().map(move |&l| (x, t, l))).collect();
    let rows = points
        .par_iter()
        .map(|&(x, t, l2)| {
            let p = vacuum_pair(ShapeKind::HardSphere, l2.sqrt(), x, t)?;
            let r = correlation_report(&p, 1.0, 1.0)?;
            Ok([Cell::Num(x), Cell::Num(t), Cell::Num(l2)].into_iter().chain(measure_cells(&p, &r)).collect())
        })
        .collect();
    let mut t = Table::new(header(&["x", "t", "lambda_sq"], &MEASURE_COLUMNS))
        .comment("A at the origin at t = 0, B at distance |X| at time T, vacuum field, no interlopers")
        .comment("smearing = hard_sphere, sigma = 1, lambda_A = lambda_B = lambda, Omega_A = Omega_B = 1")
        .comment("(|X|, T) in {(0, 5), (5, 5), (10, 5)}; lambda^2 = 0, 0.1, ..., 100");
    t.rows = collect_rows(rows)?;
    Ok(t)
}

fn energy_between(dets: &[DetectorSpec], overlaps: &OverlapSet, a: &str, b: &str) -> Result<f64, CliError> {
    let s = pair_state_closed(dets, &BTreeMap::new(), overlaps, a, b)?;
    let h = ObservableCoeffs::hamiltonian(1.0).operator();
    Ok(direct_correlator(&s, &h, &h))
}

fn theft_detectors(x_i: f64) -> Vec<DetectorSpec> {
    let k = ShapeKind::HardSphere;
    vec![
        detector("A", 0.0, 0.0, THEFT_LAMBDA_AB, k),
        detector("B", THEFT_X_B, THEFT_T_B, THEFT_LAMBDA_AB, k),
        detector("I", x_i, THEFT_T_I, THEFT_LAMBDA_I, k),
    ]
}

/// ξ_IB for the interloper at x_I.
pub fn theft_xi_ib(x_i: f64) -> Result<f64, CliError> {
    let d = theft_detectors(x_i);
    Ok(xi_overlap(&d[2], &d[1])?)
}

/// Positions x_I in the theft grid range where ξ_IB = π/2, to machine precision.
pub fn theft_sabotage_points() -> Result<Vec<f64>, CliError> {
    let grid = theft_grid();
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let n = 20 * (grid.len() - 1);
    let f = |x: f64| theft_xi_ib(x).map(|v| v - FRAC_PI_2);
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0)?;
    for k in 1..=n {
        let x1 = lo + (hi - lo) * k as f64 / n as f64;
        let f1 = f(x1)?;
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            loop {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = f(m)?;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(roots)
}

fn theft() -> Result<Vec<(String, Table)>, CliError> {
    let quad = QuadConfig::default();
    let rows = theft_grid()
        .par_iter()
        .map(|&x_i| {
            let dets = theft_detectors(x_i);
            let ov = OverlapSet::compute(&dets, &quad)?;
            Ok(vec![
                Cell::Num(x_i),
                Cell::Num(ov.xi("I", "B")?),
                Cell::Num(ov.xi("A", "I")?),
                Cell::Num(ov.zeta("A", "B")?),
                Cell::Num(energy_between(&dets, &ov, "A", "I")?),
                Cell::Num(energy_between(&dets, &ov, "B", "I")?),
                Cell::Num(energy_between(&dets, &ov, "A", "B")?),
            ])
        })
        .collect();
    let comments = [
        "A at x = 0, t = 0; B at x = 10, t = 5; interloper I at (x_I, 0, 0), t = 2.5".to_string(),
        format!("smearing = hard_sphere, sigma = 1, lambda_A = lambda_B = {THEFT_LAMBDA_AB}, lambda_I = {THEFT_LAMBDA_I}"),
        "Omega_A = Omega_B = Omega_I = 1, vacuum field; gamma = energy correlator of the named pair".to_string(),
    ];
    let mut traces = Table::new(header(&["x_i", "xi_ib", "xi_ai", "zeta_ab", "gamma_ai", "gamma_bi", "gamma_ab"], &[]));
    traces.comments = comments.to_vec();
    traces.rows = collect_rows(rows)?;
    let mut points = Table::new(header(&["x_i", "xi_ib"], &[]));
    points.comments = comments.to_vec();
    points.comments.push("interloper positions with xi_IB = pi/2".into());
    for x in theft_sabotage_points()? {
        points.rows.push(vec![Cell::Num(x), Cell::Num(theft_xi_ib(x)?)]);
    }
    Ok(vec![("fig6_correlators.csv".into(), traces), ("fig6_sabotage_points.csv".into(), points)])
}

fn validity_only(src: &Table, lead: &[&str], extra: Option<(&str, &str)>) -> Table {
    let mut cols: Vec<&str> = Vec::new();
    if let Some((name, _)) = extra {
        cols.push(name);
    }
    cols.extend_from_slice(lead);
    cols.extend_from_slice(&["f_value", "cond2"]);
    let mut t = Table::new(cols.iter().map(|s| s.to_string()).collect());
    let idx: Vec<usize> = lead.iter().chain(&["f_value", "cond2"]).map(|c| src.column(c).expect("column")).collect();
    for r in &src.rows {
        let mut row = Vec::new();
        if let Some((_, v)) = extra {
            row.push(Cell::Text(v.into()));
        }
        row.extend(idx.iter().map(|&k| r[k].clone()));
        t.rows.push(row);
    }
    t
}

/// Tables for one preset, keyed by file name.
pub fn figure(name: &str) -> Result<Vec<(String, Table)>, CliError> {
    match name {
        "fig1" => xi_surface(ShapeKind::HardSphere, "fig1"),
        "fig2" => xi_surface(ShapeKind::Gaussian, "fig2"),
        "fig3" => Ok(vec![("fig3_measures.csv".into(), correlation_map(ShapeKind::HardSphere)?.comment("preset = fig3"))]),
        "fig4" => Ok(vec![("fig4_measures.csv".into(), correlation_map(ShapeKind::Gaussian)?.comment("preset = fig4"))]),
        "fig5" => Ok(vec![("fig5_strength.csv".into(), strength_sweep()?.comment("preset = fig5"))]),
        "fig6" => theft(),
        "fig7" => {
            let hs = correlation_map(ShapeKind::HardSphere)?;
            let g = correlation_map(ShapeKind::Gaussian)?;
            let mut t = validity_only(&hs, &["x", "t"], Some(("smearing", "hard_sphere")));
            t.rows.extend(validity_only(&g, &["x", "t"], Some(("smearing", "gaussian"))).rows);
            t.comments = hs.comments.iter().take(1).cloned().collect();
            t.comments.push("smearing in {hard_sphere, gaussian}, sigma = 1, lambda_A = lambda_B = 1, Omega = 1".into());
            t.comments.push("grid |X| = 2, 2.25, ..., 10; T = 0.25, 0.5, ..., 10".into());
            t.comments.push("preset = fig7: f = |sqrt(s11 s44) - sqrt(s22 s33)| - 2|s23|".into());
            Ok(vec![("fig7_validity.csv".into(), t)])
        }
        "fig8" => {
            let s = strength_sweep()?;
            let mut t = validity_only(&s, &["x", "t", "lambda_sq"], None);
            t.comments = s.comments.clone();
            t.comments.push("preset = fig8: f = |sqrt(s11 s44) - sqrt(s22 s33)| - 2|s23|".into());
            Ok(vec![("fig8_validity.csv".into(), t)])
        }
        other => Err(CliError::UnknownFigure(other.to_string())),
    }
}
